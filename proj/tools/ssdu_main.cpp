// Command-line front end: synthetic data generation, training, test-time
// reconstruction, metric evaluation and the sweep/compare harnesses.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssdu/csv.hpp"
#include "ssdu/dataset.hpp"
#include "ssdu/errors.hpp"
#include "ssdu/experiments.hpp"
#include "ssdu/metrics.hpp"
#include "ssdu/training.hpp"

using namespace ssdu;

namespace {

// exit codes: 0 success, 1 usage, 2 data/format error, 3 numerical failure
constexpr int kUsageError = 1;
constexpr int kDataError = 2;
constexpr int kNumericalError = 3;

struct BenchFlags {
  BenchmarkConfig bench;
  std::vector<uint64_t> seeds = {1, 2, 3};
  int r = 0;
  int ry = 0;
  int rz = 0;
  int acs = 0;
};

void add_bench_flags(CLI::App* cmd, BenchFlags& f) {
  cmd->add_option("--seeds", f.seeds, "benchmark seeds (one replicate each)")->delimiter(',');
  cmd->add_option("--n", f.bench.n, "grid size (power of two)");
  cmd->add_option("--coils", f.bench.ncoils, "number of simulated coils");
  cmd->add_option("--train", f.bench.ntrain, "training slices per seed");
  cmd->add_option("--test", f.bench.ntest, "held-out slices per seed");
  cmd->add_option("--r", f.r, "nominal acceleration");
  cmd->add_option("--ry", f.ry, "k_y undersampling factor");
  cmd->add_option("--rz", f.rz, "k_z undersampling factor");
  cmd->add_option("--shear", f.bench.spec.shear_step, "lattice shear step");
  cmd->add_option("--acs", f.acs, "ACS block size");
  cmd->add_option("--sigma", f.bench.sigma, "k-space noise std");
  cmd->add_option("--epochs", f.bench.epochs, "training epochs");
  cmd->add_option("--lr", f.bench.lr, "Adam learning rate");
  cmd->add_option("--t", f.bench.t_unroll, "unroll depth");
  cmd->add_option("--cg-iters", f.bench.cg_iters, "CG iterations per DC unit");
  cmd->add_option("--channels", f.bench.channels, "regularizer channels");
  cmd->add_option("--blocks", f.bench.blocks, "residual blocks");
  cmd->add_option("--rho", f.bench.rho, "loss-mask fraction");
  cmd->add_option("--k", f.bench.k, "number of masks");
  cmd->add_option("--cgsense-l2", f.bench.cgsense_l2, "CG-SENSE Tikhonov weight");
  cmd->add_option("--cgsense-iters", f.bench.cgsense_iters, "CG-SENSE iterations");
}

void apply_rate_flags(BenchFlags& f) {
  if (f.acs > 0) {
    f.bench.spec.acs_h = f.acs;
    f.bench.spec.acs_w = f.acs;
  }
  if (f.ry > 0 && f.rz > 0) {
    f.bench.spec.r_y = f.ry;
    f.bench.spec.r_z = f.rz;
    f.bench.spec.r_total = f.ry * f.rz;
  } else if (f.r > 0) {
    // near-square factorization with r_y >= r_z
    int rz = 1;
    for (int d = 1; d * d <= f.r; ++d)
      if (f.r % d == 0) rz = d;
    f.bench.spec.r_z = rz;
    f.bench.spec.r_y = f.r / rz;
    f.bench.spec.r_total = f.r;
  }
  f.bench.seeds = f.seeds;
}

uint64_t parse_seed_list(const std::vector<uint64_t>& seeds) {
  return seeds.empty() ? 1 : seeds.front();
}

int cmd_gen_data(const BenchFlags& flags, uint64_t seed, const std::string& out) {
  BenchmarkConfig bench = flags.bench;
  PhantomSet set = generate_phantom_set(bench.n, bench.ncoils, bench.ntrain, bench.ntest,
                                        bench.spec, bench.sigma, seed);
  write_phantom_set(out, set);
  std::printf("wrote %s: n=%d coils=%d train=%zu test=%zu R_eff=%.3f\n", out.c_str(), set.n,
              set.ncoils, set.train_images.size(), set.test_images.size(),
              set.pattern.acceleration());
  return 0;
}

int cmd_train(const std::string& mode, int k, double rho, const std::string& dist, int epochs,
              double lr, uint64_t seed, int t_unroll, int cg_iters, double cg_tol, int channels,
              int blocks, const std::string& data_path, const std::string& out,
              std::string log_path, bool timing) {
  TrainConfig cfg;
  cfg.mode = train_mode_from_string(mode);
  cfg.k = k;
  cfg.rho = rho;
  if (dist == "uniform")
    cfg.dist = MaskDistribution::uniform();
  else if (dist == "gaussian")
    cfg.dist = MaskDistribution::gaussian();
  else
    throw ConfigError("unknown distribution '" + dist + "'");
  cfg.epochs = epochs;
  cfg.lr = lr;
  cfg.seed = seed;
  cfg.channels = channels;
  cfg.blocks = blocks;
  cfg.unroll.t_unroll = t_unroll;
  cfg.unroll.cg_iters = cg_iters;
  cfg.unroll.cg_tol = cg_tol;

  PhantomSet set = read_phantom_set(data_path);
  auto samples = training_samples(set, cfg.mode == TrainMode::Supervised);
  samples = normalize_dataset(std::move(samples));

  const auto t0 = std::chrono::steady_clock::now();
  TrainResult res = train(std::move(samples), cfg);
  const auto t1 = std::chrono::steady_clock::now();

  Checkpoint ckpt;
  ckpt.params = std::move(res.params);
  ckpt.unroll = cfg.unroll;
  ckpt.mode = mode;
  ckpt.k = cfg.effective_k();
  ckpt.rho = cfg.rho;
  ckpt.dist = dist;
  ckpt.seed = seed;
  ckpt.epochs = epochs;
  ckpt.lr = lr;
  write_checkpoint(out, ckpt);

  // per-step training log; wall_time_ms is 0 unless --timing is given so
  // that identical invocations produce byte-identical files
  if (log_path.empty()) log_path = out + ".log.csv";
  const double total_ms =
      timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
  CsvTable log;
  log.header = {"epoch", "step", "mode", "k", "rho", "loss", "wall_time_ms"};
  const double per_step_ms = res.rows.empty() ? 0.0 : total_ms / double(res.rows.size());
  for (const TrainLogRow& row : res.rows)
    log.rows.push_back({std::to_string(row.epoch), std::to_string(row.step), mode,
                        std::to_string(cfg.effective_k()), g17(cfg.rho), g17(row.loss),
                        g17(timing ? per_step_ms * (row.step + 1) : 0.0)});
  log.write(log_path);

  std::printf("wrote %s (final epoch mean loss %.6g, mu %.6g)\n", out.c_str(),
              res.epoch_mean_loss.back(), ckpt.params.mu);
  return 0;
}

int cmd_recon(const std::string& ckpt_path, const std::string& data_path,
              const std::string& split, const std::string& out) {
  Checkpoint ckpt = read_checkpoint(ckpt_path);
  PhantomSet set = read_phantom_set(data_path);
  const bool use_test = split == "test";
  if (!use_test && split != "train") throw ConfigError("recon: --split must be train or test");
  const auto& ys = use_test ? set.test_y : set.train_y;
  if (ys.empty()) throw DataError("recon: dataset split '" + split + "' is empty");

  DatasetContainer c;
  c.add_scalar_u64("meta/n", uint64_t(set.n));
  c.add_scalar_u64("meta/count", ys.size());
  c.add_str("meta/split", split);
  for (size_t i = 0; i < ys.size(); ++i) {
    KSpaceSample y = ys[i];
    double m = 0;
    for (const cplx& v : y.data) m = std::max(m, std::abs(v));
    if (m == 0) throw DataError("recon: slice " + std::to_string(i) + " is empty");
    for (cplx& v : y.data) v /= m;
    y.scale = m;
    ComplexImage rec = reconstruct_test(y, *set.coils, ckpt.params, ckpt.unroll);
    c.add_c128("recon/" + std::to_string(i) + "/image", {uint64_t(set.n), uint64_t(set.n)},
               rec.data.data());
  }
  write_dataset(out, c);
  std::printf("wrote %s (%zu slices, split %s)\n", out.c_str(), ys.size(), split.c_str());
  return 0;
}

int cmd_eval(const std::string& ref_path, const std::string& rec_path, const std::string& csv) {
  PhantomSet set = read_phantom_set(ref_path);
  DatasetContainer rc = read_dataset(rec_path);
  const std::string split = rc.get_str("meta/split");
  const size_t count = rc.get_scalar_u64("meta/count");
  const auto& images = split == "test" ? set.test_images : set.train_images;
  if (count != images.size())
    throw DataError("eval: slice count mismatch between reference and reconstruction");

  std::vector<double> nmse_v, ssim_v;
  CsvTable t;
  t.header = {"slice", "nmse", "ssim"};
  for (size_t i = 0; i < count; ++i) {
    ComplexImage rec(set.n, set.n);
    rec.data = rc.get_c128("recon/" + std::to_string(i) + "/image");
    const double e = nmse(images[i], rec);
    const double s = ssim(images[i], rec);
    nmse_v.push_back(e);
    ssim_v.push_back(s);
    t.rows.push_back({std::to_string(i), g17(e), g17(s)});
  }
  MetricReport rep = MetricReport::from_slices(nmse_v, ssim_v);
  t.rows.push_back({"mean", g17(rep.nmse_mean), g17(rep.ssim_mean)});
  t.rows.push_back({"median", g17(rep.nmse_q.median), g17(rep.ssim_q.median)});
  t.rows.push_back({"q25", g17(rep.nmse_q.q25), g17(rep.ssim_q.q25)});
  t.rows.push_back({"q75", g17(rep.nmse_q.q75), g17(rep.ssim_q.q75)});
  t.write(csv);
  std::printf("wrote %s (median nmse %.6g, median ssim %.6g)\n", csv.c_str(),
              rep.nmse_q.median, rep.ssim_q.median);
  return 0;
}

int cmd_sweep(const BenchFlags& flags, const std::string& axis,
              const std::vector<double>& values, const std::string& csv) {
  SweepConfig cfg;
  if (axis == "k")
    cfg.axis = SweepConfig::Axis::K;
  else if (axis == "rho")
    cfg.axis = SweepConfig::Axis::Rho;
  else
    throw ConfigError("sweep: --axis must be k or rho");
  cfg.values = values;
  cfg.bench = flags.bench;
  std::vector<SweepRow> rows = run_sweep(cfg);
  sweep_csv(cfg, rows).write(csv);
  std::printf("wrote %s (%zu rows)\n", csv.c_str(), rows.size());
  for (const SweepRow& r : rows)
    if (!r.ok) std::fprintf(stderr, "sweep value %g seed %llu failed: %s\n", r.value,
                            (unsigned long long)r.seed, r.error.c_str());
  return 0;
}

int cmd_compare(const BenchFlags& flags, const std::vector<std::string>& methods,
                const std::string& csv) {
  std::vector<CompareRow> rows = compare_methods(flags.bench, methods);
  compare_csv(rows).write(csv);
  std::printf("wrote %s (%zu rows)\n", csv.c_str(), rows.size());
  for (const CompareRow& r : rows)
    if (!r.ok) std::fprintf(stderr, "method %s seed %llu failed: %s\n", r.method.c_str(),
                            (unsigned long long)r.seed, r.error.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-supervised multi-mask MRI reconstruction benchmark"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic multi-coil phantom dataset");
  BenchFlags gen_flags;
  gen_flags.bench.n = 64;
  gen_flags.bench.ntrain = 20;
  gen_flags.bench.ntest = 8;
  uint64_t gen_seed = 1;
  std::string gen_out = "data.ssdu";
  add_bench_flags(gen, gen_flags);
  gen->add_option("--seed", gen_seed, "dataset seed");
  gen->add_option("--out", gen_out, "output .ssdu file")->required();

  // train
  auto* tr = app.add_subcommand("train", "train a reconstruction network");
  std::string tr_mode = "multimask", tr_dist = "uniform", tr_data, tr_out = "ckpt.ssdu",
              tr_log;
  int tr_k = 5, tr_epochs = 30, tr_t = 5, tr_cg = 10, tr_channels = 16, tr_blocks = 3;
  double tr_rho = 0.4, tr_lr = 5e-4, tr_tol = 1e-6;
  uint64_t tr_seed = 1;
  bool tr_timing = false;
  tr->add_option("--mode", tr_mode, "supervised|ssdu|multimask|cyclic");
  tr->add_option("--k", tr_k, "number of masks (multimask/cyclic)");
  tr->add_option("--rho", tr_rho, "loss-mask fraction");
  tr->add_option("--dist", tr_dist, "uniform|gaussian");
  tr->add_option("--epochs", tr_epochs, "training epochs");
  tr->add_option("--lr", tr_lr, "Adam learning rate");
  tr->add_option("--seed", tr_seed, "training seed");
  tr->add_option("--t", tr_t, "unroll depth");
  tr->add_option("--cg-iters", tr_cg, "CG iterations per DC unit");
  tr->add_option("--cg-tol", tr_tol, "CG relative tolerance");
  tr->add_option("--channels", tr_channels, "regularizer channels");
  tr->add_option("--blocks", tr_blocks, "residual blocks");
  tr->add_option("--data", tr_data, "input dataset")->required();
  tr->add_option("--out", tr_out, "output checkpoint")->required();
  tr->add_option("--log", tr_log, "training-log CSV path (default <out>.log.csv)");
  tr->add_flag("--timing", tr_timing, "record wall time in the log (not byte-reproducible)");

  // recon
  auto* rc = app.add_subcommand("recon", "reconstruct a dataset split with a checkpoint");
  std::string rc_ckpt, rc_data, rc_out = "recon.ssdu", rc_split = "test";
  rc->add_option("--ckpt", rc_ckpt, "checkpoint file")->required();
  rc->add_option("--data", rc_data, "dataset file")->required();
  rc->add_option("--split", rc_split, "train|test");
  rc->add_option("--out", rc_out, "output reconstruction container")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "NMSE/SSIM of a reconstruction against references");
  std::string ev_ref, ev_rec, ev_csv = "eval.csv";
  ev->add_option("--ref", ev_ref, "reference dataset")->required();
  ev->add_option("--rec", ev_rec, "reconstruction container")->required();
  ev->add_option("--csv", ev_csv, "output CSV")->required();

  // sweep
  auto* sw = app.add_subcommand("sweep", "train/evaluate across K or rho values");
  BenchFlags sw_flags;
  std::string sw_axis = "k", sw_csv = "sweep.csv";
  std::vector<double> sw_values;
  add_bench_flags(sw, sw_flags);
  sw->add_option("--axis", sw_axis, "k|rho");
  sw->add_option("--values", sw_values, "sweep values")->required()->delimiter(',');
  sw->add_option("--csv", sw_csv, "output CSV")->required();

  // compare
  auto* cp = app.add_subcommand("compare", "train/evaluate a list of methods");
  BenchFlags cp_flags;
  std::vector<std::string> cp_methods = {"cgsense", "supervised", "ssdu", "multimask"};
  std::string cp_csv = "compare.csv";
  add_bench_flags(cp, cp_flags);
  cp->add_option("--methods", cp_methods,
                 "cgsense|supervised|ssdu|multimask|multimask-gaussian|cyclic")
      ->delimiter(',');
  cp->add_option("--csv", cp_csv, "output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      apply_rate_flags(gen_flags);
      return cmd_gen_data(gen_flags, gen_seed, gen_out);
    }
    if (tr->parsed())
      return cmd_train(tr_mode, tr_k, tr_rho, tr_dist, tr_epochs, tr_lr, tr_seed, tr_t, tr_cg,
                       tr_tol, tr_channels, tr_blocks, tr_data, tr_out, tr_log, tr_timing);
    if (rc->parsed()) return cmd_recon(rc_ckpt, rc_data, rc_split, rc_out);
    if (ev->parsed()) return cmd_eval(ev_ref, ev_rec, ev_csv);
    if (sw->parsed()) {
      apply_rate_flags(sw_flags);
      return cmd_sweep(sw_flags, sw_axis, sw_values, sw_csv);
    }
    if (cp->parsed()) {
      apply_rate_flags(cp_flags);
      return cmd_compare(cp_flags, cp_methods, cp_csv);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumericalError;
  } catch (const GraphError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumericalError;
  } catch (const Error& e) {  // Dimension/Data/Format
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kDataError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDataError;
  }
  return kUsageError;
}
