#include "ssdu/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "ssdu/encoding.hpp"
#include "ssdu/errors.hpp"
#include "ssdu/rng.hpp"

namespace ssdu {

UnrollConfig BenchmarkConfig::unroll() const {
  UnrollConfig u;
  u.t_unroll = t_unroll;
  u.cg_iters = cg_iters;
  u.cg_tol = cg_tol;
  return u;
}

TrainConfig BenchmarkConfig::train_config(const std::string& method, uint64_t seed) const {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.lr = lr;
  cfg.seed = seed;
  cfg.channels = channels;
  cfg.blocks = blocks;
  cfg.rho = rho;
  cfg.k = k;
  cfg.unroll = unroll();
  if (method == "supervised") {
    cfg.mode = TrainMode::Supervised;
  } else if (method == "ssdu") {
    cfg.mode = TrainMode::SSDU;
  } else if (method == "multimask") {
    cfg.mode = TrainMode::MultiMaskSSDU;
  } else if (method == "multimask-gaussian") {
    cfg.mode = TrainMode::MultiMaskSSDU;
    cfg.dist = MaskDistribution::gaussian();
  } else if (method == "cyclic") {
    cfg.mode = TrainMode::CyclicMultiMask;
  } else {
    throw ConfigError("unknown method '" + method + "'");
  }
  return cfg;
}

bool method_needs_training(const std::string& method) {
  if (method == "cgsense") return false;
  (void)BenchmarkConfig{}.train_config(method, 0);  // validates the name
  return true;
}

PhantomSet benchmark_phantoms(const BenchmarkConfig& bench, uint64_t seed) {
  return generate_phantom_set(bench.n, bench.ncoils, bench.ntrain, bench.ntest, bench.spec,
                              bench.sigma, seed);
}

TrainedModel train_method(const PhantomSet& set, const std::string& method,
                          const BenchmarkConfig& bench, uint64_t seed) {
  if (!method_needs_training(method))
    throw ConfigError("train_method: '" + method + "' has no trainable model");
  TrainConfig cfg = bench.train_config(method, seed);
  std::vector<TrainingSample> samples =
      training_samples(set, cfg.mode == TrainMode::Supervised);
  samples = normalize_dataset(std::move(samples));
  TrainResult res = train(std::move(samples), cfg);
  return TrainedModel{std::move(res.params), cfg.unroll};
}

MetricReport eval_method(const PhantomSet& set, const std::string& method,
                         const BenchmarkConfig& bench, const TrainedModel* model) {
  if (set.test_images.empty()) throw ConfigError("eval_method: no held-out slices");
  std::vector<double> nmse_v, ssim_v;
  UnrollConfig sense_cfg = bench.unroll();
  sense_cfg.cg_iters = bench.cgsense_iters;
  for (size_t i = 0; i < set.test_images.size(); ++i) {
    ComplexImage rec(set.n, set.n);
    if (method == "cgsense") {
      rec = cg_sense(set.test_y[i], *set.coils, bench.cgsense_l2, sense_cfg);
    } else {
      if (!model) throw ConfigError("eval_method: trained model required");
      KSpaceSample y = set.test_y[i];
      double m = 0.0;
      for (const cplx& v : y.data) m = std::max(m, std::abs(v));
      if (m == 0.0) throw DataError("eval_method: empty test acquisition");
      for (cplx& v : y.data) v /= m;
      y.scale = m;
      rec = reconstruct_test(y, *set.coils, model->params, model->unroll);
    }
    nmse_v.push_back(nmse(set.test_images[i], rec));
    ssim_v.push_back(ssim(set.test_images[i], rec));
  }
  return MetricReport::from_slices(std::move(nmse_v), std::move(ssim_v));
}

MetricReport eval_zero_filled(const PhantomSet& set) {
  std::vector<double> nmse_v, ssim_v;
  for (size_t i = 0; i < set.test_images.size(); ++i) {
    ComplexImage rec = zero_filled_recon(set.test_y[i], *set.coils);
    nmse_v.push_back(nmse(set.test_images[i], rec));
    ssim_v.push_back(ssim(set.test_images[i], rec));
  }
  return MetricReport::from_slices(std::move(nmse_v), std::move(ssim_v));
}

namespace {

void validate_sweep(const SweepConfig& cfg) {
  if (cfg.values.size() < 2) throw ConfigError("run_sweep: need at least 2 sweep values");
  if (!std::is_sorted(cfg.values.begin(), cfg.values.end()))
    throw ConfigError("run_sweep: values must be sorted ascending");
  if (cfg.bench.seeds.empty()) throw ConfigError("run_sweep: no seeds");
  for (double v : cfg.values) {
    if (cfg.axis == SweepConfig::Axis::K) {
      if (v < 1 || v != std::floor(v)) throw ConfigError("run_sweep: K values must be integers >= 1");
    } else if (!(v > 0.0 && v < 1.0)) {
      throw ConfigError("run_sweep: rho values must be in (0,1)");
    }
  }
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  validate_sweep(cfg);
  std::vector<SweepRow> rows;
  for (double value : cfg.values) {
    for (uint64_t seed : cfg.bench.seeds) {
      SweepRow row;
      row.value = value;
      row.seed = seed;
      try {
        BenchmarkConfig bench = cfg.bench;
        std::string method;
        if (cfg.axis == SweepConfig::Axis::K) {
          bench.k = int(value);
          method = "multimask";
        } else {
          bench.rho = value;
          method = "ssdu";
        }
        PhantomSet set = benchmark_phantoms(bench, seed);
        TrainedModel model = train_method(set, method, bench, seed);
        row.report = eval_method(set, method, bench, &model);
        row.ok = true;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<CompareRow> compare_methods(const BenchmarkConfig& bench,
                                        const std::vector<std::string>& methods) {
  if (methods.empty()) throw ConfigError("compare_methods: no methods given");
  std::vector<CompareRow> rows;
  for (const std::string& method : methods) {
    for (uint64_t seed : bench.seeds) {
      CompareRow row;
      row.method = method;
      row.seed = seed;
      try {
        PhantomSet set = benchmark_phantoms(bench, seed);
        if (method_needs_training(method)) {
          TrainedModel model = train_method(set, method, bench, seed);
          row.report = eval_method(set, method, bench, &model);
        } else {
          row.report = eval_method(set, method, bench, nullptr);
        }
        row.ok = true;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

std::vector<std::string> report_cells(const MetricReport& r) {
  return {g17(r.nmse_mean),   g17(r.nmse_q.median), g17(r.nmse_q.q25), g17(r.nmse_q.q75),
          g17(r.ssim_mean),   g17(r.ssim_q.median), g17(r.ssim_q.q25), g17(r.ssim_q.q75)};
}

const std::vector<std::string> kReportHeader = {
    "mean_nmse", "median_nmse", "q25_nmse", "q75_nmse",
    "mean_ssim", "median_ssim", "q25_ssim", "q75_ssim"};

}  // namespace

CsvTable sweep_csv(const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  CsvTable t;
  t.header = {"axis", "value", "seed", "status"};
  t.header.insert(t.header.end(), kReportHeader.begin(), kReportHeader.end());
  const std::string axis = cfg.axis == SweepConfig::Axis::K ? "k" : "rho";
  for (const SweepRow& r : rows) {
    std::vector<std::string> cells = {axis, g17(r.value), std::to_string(r.seed),
                                      r.ok ? "ok" : "error"};
    if (r.ok) {
      auto rep = report_cells(r.report);
      cells.insert(cells.end(), rep.begin(), rep.end());
    } else {
      for (size_t i = 0; i < kReportHeader.size(); ++i) cells.push_back("nan");
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

CsvTable compare_csv(const std::vector<CompareRow>& rows) {
  CsvTable t;
  t.header = {"method", "seed", "status"};
  t.header.insert(t.header.end(), kReportHeader.begin(), kReportHeader.end());
  for (const CompareRow& r : rows) {
    std::vector<std::string> cells = {r.method, std::to_string(r.seed), r.ok ? "ok" : "error"};
    if (r.ok) {
      auto rep = report_cells(r.report);
      cells.insert(cells.end(), rep.begin(), rep.end());
    } else {
      for (size_t i = 0; i < kReportHeader.size(); ++i) cells.push_back("nan");
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace ssdu
