#include "ssdu/training.hpp"

#include <algorithm>
#include <cmath>

#include "ssdu/encoding.hpp"
#include "ssdu/errors.hpp"
#include "ssdu/loss.hpp"
#include "ssdu/rng.hpp"

namespace ssdu {

namespace {

constexpr uint64_t kTagPartition = 0x9A27;
constexpr uint64_t kTagInit = 0x12417;
constexpr uint64_t kTagShuffle = 0x5481F;

// Everything constant about one (sample, mask) pair during training.
struct PairData {
  int sample = 0;
  int j = 0;
  EncodingRefs enc_dc;    // what the DC units see
  EncodingRefs enc_loss;  // where the loss is read
  ComplexImage ehy;       // E_dc^H y, which is also x^(0)
  std::vector<std::vector<double>> u_packed;  // reference k-space on the loss set
  const std::vector<uint8_t>* theta = nullptr;
  const std::vector<uint8_t>* lambda = nullptr;
  const KSpaceSample* y = nullptr;
};

std::vector<double> pack_masked_coil(const KSpaceSample& y, int c,
                                     const std::vector<uint8_t>& mask) {
  const size_t plane = size_t(y.ny()) * y.nz();
  std::vector<double> out(2 * plane, 0.0);
  const cplx* yc = y.coil(c);
  for (size_t i = 0; i < plane; ++i) {
    if (!mask[i]) continue;
    out[i] = yc[i].real();
    out[plane + i] = yc[i].imag();
  }
  return out;
}

KSpaceSample restrict_to(const KSpaceSample& y, const std::vector<uint8_t>& mask) {
  SamplingPattern pat(y.ny(), y.nz(), y.pattern.acs_h, y.pattern.acs_w);
  pat.mask = mask;
  KSpaceSample out(y.ncoils, pat);
  out.scale = y.scale;
  const size_t plane = size_t(y.ny()) * y.nz();
  for (int c = 0; c < y.ncoils; ++c) {
    const cplx* src = y.coil(c);
    cplx* dst = out.coil(c);
    for (size_t i = 0; i < plane; ++i) dst[i] = mask[i] ? src[i] : cplx(0, 0);
  }
  return out;
}

void assert_disjoint(const std::vector<uint8_t>& theta, const std::vector<uint8_t>& lambda) {
  for (size_t i = 0; i < theta.size(); ++i)
    if (theta[i] && lambda[i]) throw DataError("training: theta and lambda overlap");
}

PairData make_pair_data(const TrainingSample& s, int j, const TrainConfig& cfg) {
  PairData pd;
  pd.sample = 0;
  pd.j = j;
  pd.y = &s.y;
  const size_t plane = size_t(s.y.ny()) * s.y.nz();

  if (cfg.mode == TrainMode::Supervised) {
    if (!s.y_ref) throw ConfigError("training: supervised mode requires y_ref");
    pd.enc_dc = make_encoding_refs(*s.coils, s.y.pattern.mask);
    std::vector<uint8_t> full(plane, 1);
    pd.enc_loss = make_encoding_refs(*s.coils, full);
    pd.ehy = zero_filled_recon(s.y, *s.coils);
    for (int c = 0; c < s.y.ncoils; ++c)
      pd.u_packed.push_back(pack_masked_coil(*s.y_ref, c, *pd.enc_loss.mask));
    return pd;
  }

  if (!s.partition) throw ConfigError("training: self-supervised mode requires partitions");
  const PartitionSet& parts = *s.partition;
  if (j < 0 || j >= parts.k) throw ConfigError("training: partition index out of range");
  pd.theta = &parts.theta[j];
  pd.lambda = &parts.lambda[j];
  assert_disjoint(*pd.theta, *pd.lambda);
  size_t lam_count = 0;
  for (uint8_t m : *pd.lambda) lam_count += m != 0;
  if (lam_count == 0) throw ConfigError("training: empty loss set");

  KSpaceSample y_theta = restrict_to(s.y, *pd.theta);
  pd.enc_dc = make_encoding_refs(*s.coils, *pd.theta);
  pd.enc_loss = make_encoding_refs(*s.coils, *pd.lambda);
  pd.ehy = zero_filled_recon(y_theta, *s.coils);
  for (int c = 0; c < s.y.ncoils; ++c)
    pd.u_packed.push_back(pack_masked_coil(s.y, c, *pd.lambda));
  return pd;
}

// The k-space the DC units can see must exclude every loss index.
void check_no_leakage(const PairData& pd) {
  if (!pd.theta || !pd.lambda) return;
  const std::vector<uint8_t>& dc_mask = *pd.enc_dc.mask;
  for (size_t i = 0; i < dc_mask.size(); ++i)
    if ((*pd.lambda)[i] && dc_mask[i])
      throw DataError("training: loss index visible to DC units");
}

struct StepContext {
  NetworkParams* params;
  std::vector<double>* log_mu;
  const TrainConfig* cfg;
};

double run_step(const PairData& pd, StepContext ctx, std::vector<std::vector<double>>* grads) {
  ad::Graph g;
  ResnetNodes ids = resnet_params_to_graph(g, *ctx.params, grads != nullptr);
  const bool train_mu = ctx.cfg->unroll.mu_trainable && grads != nullptr;
  const int logmu = g.input({1}, {(*ctx.log_mu)[0]}, train_mu);
  const int mu_node = g.s_exp(logmu);

  int x = g.constant({2, pd.ehy.ny, pd.ehy.nz}, ad::Graph::pack(pd.ehy));
  const int ehy_const = x;
  for (int t = 0; t < ctx.cfg->unroll.t_unroll; ++t) {
    int z = resnet_graph(g, x, *ctx.params, ids);
    x = dc_graph(g, z, ehy_const, pd.enc_dc, mu_node, ctx.cfg->unroll);
  }
  std::vector<int> v_ids = encode_graph(g, x, pd.enc_loss);
  const int loss = loss_l1l2_graph(g, v_ids, pd.u_packed);
  const double loss_value = g.scalar_value(loss);
  if (!std::isfinite(loss_value)) throw NumericalError("training: non-finite loss");

  if (grads) {
    g.backward(loss);
    grads->clear();
    std::vector<int> leaf_ids = {ids.win, ids.bin};
    for (size_t i = 0; i < ids.bw.size(); ++i) {
      leaf_ids.push_back(ids.bw[i]);
      leaf_ids.push_back(ids.bb[i]);
    }
    leaf_ids.push_back(ids.wout);
    leaf_ids.push_back(ids.bout);
    for (int id : leaf_ids) grads->push_back(g.grad(id));
    grads->push_back(g.grad(logmu));
  }
  return loss_value;
}

}  // namespace

std::string to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::Supervised:
      return "supervised";
    case TrainMode::SSDU:
      return "ssdu";
    case TrainMode::MultiMaskSSDU:
      return "multimask";
    case TrainMode::CyclicMultiMask:
      return "cyclic";
  }
  return "?";
}

TrainMode train_mode_from_string(const std::string& s) {
  if (s == "supervised") return TrainMode::Supervised;
  if (s == "ssdu") return TrainMode::SSDU;
  if (s == "multimask") return TrainMode::MultiMaskSSDU;
  if (s == "cyclic") return TrainMode::CyclicMultiMask;
  throw ConfigError("unknown training mode '" + s + "'");
}

int TrainConfig::effective_k() const {
  switch (mode) {
    case TrainMode::Supervised:
    case TrainMode::SSDU:
      return 1;
    default:
      return k;
  }
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("TrainConfig: epochs must be >= 1");
  if (lr < 0) throw ConfigError("TrainConfig: lr must be >= 0");
  if (channels < 1 || blocks < 0) throw ConfigError("TrainConfig: bad network size");
  if (mode == TrainMode::MultiMaskSSDU && k < 1) throw ConfigError("TrainConfig: k must be >= 1");
  if (mode == TrainMode::CyclicMultiMask && k < 2)
    throw ConfigError("TrainConfig: cyclic mode needs k >= 2");
  if (mode != TrainMode::Supervised && mode != TrainMode::CyclicMultiMask &&
      !(rho > 0.0 && rho < 1.0))
    throw ConfigError("TrainConfig: rho must be in (0,1)");
  if (unroll.t_unroll < 1) throw ConfigError("TrainConfig: t_unroll must be >= 1 for training");
  unroll.validate();
}

std::vector<TrainingSample> normalize_dataset(std::vector<TrainingSample> samples) {
  if (samples.empty()) throw ConfigError("normalize_dataset: empty dataset");
  for (TrainingSample& s : samples) {
    double m = 0.0;
    for (const cplx& v : s.y.data) m = std::max(m, std::abs(v));
    if (m == 0.0) throw DataError("normalize_dataset: sample k-space is all zero");
    for (cplx& v : s.y.data) v /= m;
    s.y.scale = m;
    if (s.y_ref) {
      auto ref = std::make_shared<KSpaceSample>(*s.y_ref);
      for (cplx& v : ref->data) v /= m;
      ref->scale = m;
      s.y_ref = std::move(ref);
    }
  }
  return samples;
}

TrainingSample un_normalize(TrainingSample s) {
  const double m = s.y.scale;
  for (cplx& v : s.y.data) v *= m;
  s.y.scale = 1.0;
  if (s.y_ref) {
    auto ref = std::make_shared<KSpaceSample>(*s.y_ref);
    for (cplx& v : ref->data) v *= ref->scale;
    ref->scale = 1.0;
    s.y_ref = std::move(ref);
  }
  return s;
}

void prepare_partitions(std::vector<TrainingSample>& samples, const TrainConfig& cfg) {
  if (cfg.mode == TrainMode::Supervised) return;
  const int want_k = cfg.effective_k();
  for (size_t i = 0; i < samples.size(); ++i) {
    TrainingSample& s = samples[i];
    if (s.partition) {
      if (s.partition->k != want_k)
        throw ConfigError("prepare_partitions: sample partition K mismatch");
      validate_partitions(*s.partition, s.y.pattern);
      continue;
    }
    const uint64_t pseed = derive_seed(cfg.seed, kTagPartition, uint64_t(i));
    PartitionSet parts =
        cfg.mode == TrainMode::CyclicMultiMask
            ? gen_cyclic_multi_mask(s.y.pattern, want_k, pseed)
            : gen_multi_mask(s.y.pattern, want_k, cfg.rho, cfg.dist, pseed);
    s.partition = std::make_shared<PartitionSet>(std::move(parts));
  }
}

TrainResult train(std::vector<TrainingSample> dataset, const TrainConfig& cfg) {
  cfg.validate();
  if (dataset.empty()) throw ConfigError("train: empty dataset");
  for (const TrainingSample& s : dataset) {
    if (!s.coils) throw ConfigError("train: sample has no coil maps");
    if (!s.y.respects_pattern()) throw DataError("train: k-space leaks outside its pattern");
    if (cfg.mode == TrainMode::Supervised && !s.y_ref)
      throw ConfigError("train: supervised mode requires y_ref on every sample");
  }
  prepare_partitions(dataset, cfg);

  TrainResult result;
  result.params =
      NetworkParams::init(cfg.channels, cfg.blocks, derive_seed(cfg.seed, kTagInit),
                          cfg.unroll.mu_init);
  std::vector<double> log_mu = {std::log(result.params.mu)};

  std::vector<ParamRef> refs = result.params.tensor_refs();
  refs.push_back({"mu_log", &log_mu});
  AdamState adam = AdamState::init(refs);
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;

  const int kk = cfg.effective_k();
  const int n = int(dataset.size());
  result.steps_per_epoch = n * kk;

  std::vector<PairData> pairs;
  auto rebuild_pairs = [&] {
    pairs.clear();
    pairs.reserve(size_t(n) * kk);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < kk; ++j) {
        PairData pd = make_pair_data(dataset[size_t(i)], j, cfg);
        pd.sample = i;
        pairs.push_back(std::move(pd));
      }
  };
  rebuild_pairs();

  StepContext ctx{&result.params, &log_mu, &cfg};
  std::vector<std::vector<double>> grads;
  int step_counter = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.resample_masks_each_epoch && epoch > 0 && cfg.mode != TrainMode::Supervised) {
      for (size_t i = 0; i < dataset.size(); ++i) {
        const uint64_t pseed =
            derive_seed(derive_seed(cfg.seed, kTagPartition, uint64_t(i)), uint64_t(epoch));
        dataset[i].partition = std::make_shared<PartitionSet>(
            cfg.mode == TrainMode::CyclicMultiMask
                ? gen_cyclic_multi_mask(dataset[i].y.pattern, kk, pseed)
                : gen_multi_mask(dataset[i].y.pattern, kk, cfg.rho, cfg.dist, pseed));
      }
      rebuild_pairs();
    }
    std::vector<int> order(pairs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    CounterRng shuffle_rng(derive_seed(cfg.seed, kTagShuffle, uint64_t(epoch)));
    for (size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[size_t(shuffle_rng.below(i))]);

    double loss_sum = 0.0;
    for (int idx : order) {
      const PairData& pd = pairs[size_t(idx)];
      if (pd.theta) assert_disjoint(*pd.theta, *pd.lambda);
      if (cfg.paranoid_checks) check_no_leakage(pd);
      const double loss = run_step(pd, ctx, &grads);
      const double log_mu_before = log_mu[0];
      adam_step(refs, grads, adam, adam_cfg);
      if (log_mu[0] != log_mu_before) result.params.mu = std::exp(log_mu[0]);
      loss_sum += loss;
      result.rows.push_back({epoch, step_counter++, loss});
    }
    result.epoch_mean_loss.push_back(loss_sum / double(pairs.size()));
  }
  return result;
}

TrainResult train_supervised(std::vector<TrainingSample> dataset, TrainConfig cfg) {
  cfg.mode = TrainMode::Supervised;
  return train(std::move(dataset), cfg);
}

TrainResult train_ssdu(std::vector<TrainingSample> dataset, TrainConfig cfg) {
  cfg.mode = TrainMode::SSDU;
  return train(std::move(dataset), cfg);
}

TrainResult train_multimask(std::vector<TrainingSample> dataset, TrainConfig cfg) {
  if (cfg.mode != TrainMode::CyclicMultiMask) cfg.mode = TrainMode::MultiMaskSSDU;
  return train(std::move(dataset), cfg);
}

double pair_loss(const TrainingSample& sample, int j, const NetworkParams& params,
                 const TrainConfig& cfg) {
  PairData pd = make_pair_data(sample, j, cfg);
  std::vector<double> log_mu = {std::log(params.mu)};
  StepContext ctx{const_cast<NetworkParams*>(&params), &log_mu, &cfg};
  return run_step(pd, ctx, nullptr);
}

ComplexImage reconstruct_test(const KSpaceSample& y, const CoilSensitivities& coils,
                              const NetworkParams& params, const UnrollConfig& cfg) {
  UnrollTrace trace = unrolled_forward(y, coils, params, cfg);
  ComplexImage out = trace.final();
  if (y.scale != 1.0)
    for (cplx& v : out.data) v *= y.scale;
  return out;
}

}  // namespace ssdu
