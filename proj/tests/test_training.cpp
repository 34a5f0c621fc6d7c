#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ssdu/encoding.hpp"
#include "ssdu/errors.hpp"
#include "ssdu/metrics.hpp"
#include "ssdu/training.hpp"
#include "test_util.hpp"

using namespace ssdu;

namespace {

// tiny benchmark instance shared by the training tests
PhantomSet tiny_set(uint64_t seed, int ntrain = 2, int ntest = 1) {
  UndersamplingSpec spec;
  spec.r_total = 2;
  spec.r_y = 2;
  spec.r_z = 1;
  spec.shear_step = 1;
  spec.acs_h = 4;
  spec.acs_w = 4;
  return generate_phantom_set(16, 2, ntrain, ntest, spec, 0.01, seed);
}

TrainConfig tiny_config(TrainMode mode, uint64_t seed = 1) {
  TrainConfig cfg;
  cfg.mode = mode;
  cfg.epochs = 2;
  cfg.lr = 1e-3;
  cfg.k = 2;
  cfg.rho = 0.4;
  cfg.seed = seed;
  cfg.channels = 6;
  cfg.blocks = 1;
  cfg.unroll.t_unroll = 2;
  cfg.unroll.cg_iters = 6;
  return cfg;
}

}  // namespace

TEST_CASE("normalization scales by the max magnitude and round trips") {
  PhantomSet set = tiny_set(3);
  auto samples = training_samples(set, true);
  double m = 0;
  for (const cplx& v : samples[0].y.data) m = std::max(m, std::abs(v));
  REQUIRE(m > 0);

  auto normed = normalize_dataset(samples);
  CHECK(normed[0].y.scale == m);
  double m_after = 0;
  for (const cplx& v : normed[0].y.data) m_after = std::max(m_after, std::abs(v));
  CHECK(m_after == doctest::Approx(1.0).epsilon(1e-14));
  // the reference is divided by the same factor
  CHECK(std::abs(normed[0].y_ref->data[0] - samples[0].y_ref->data[0] / m) < 1e-15);

  SUBCASE("already-normalized samples are unchanged") {
    auto twice = normalize_dataset(normed);
    CHECK(twice[0].y.scale == 1.0);
    CHECK(twice[0].y.data == normed[0].y.data);
  }

  SUBCASE("un-normalize restores the original values") {
    TrainingSample back = un_normalize(normed[0]);
    CHECK(back.y.scale == 1.0);
    for (size_t i = 0; i < back.y.data.size(); ++i)
      CHECK(std::abs(back.y.data[i] - samples[0].y.data[i]) <=
            1e-15 * (1.0 + std::abs(samples[0].y.data[i])));
  }

  SUBCASE("all-zero samples are rejected") {
    auto bad = samples;
    for (cplx& v : bad[0].y.data) v = cplx(0, 0);
    CHECK_THROWS_AS((void)normalize_dataset(bad), DataError);
  }
}

TEST_CASE("supervised training requires references") {
  PhantomSet set = tiny_set(4);
  auto samples = training_samples(set, false);  // no y_ref
  CHECK_THROWS_AS((void)train_supervised(samples, tiny_config(TrainMode::Supervised)),
                  ConfigError);
}

TEST_CASE("empty loss sets are rejected") {
  PhantomSet set = tiny_set(5);
  auto samples = normalize_dataset(training_samples(set, false));
  auto parts = std::make_shared<PartitionSet>();
  parts->k = 1;
  parts->rho = 0.4;
  parts->theta.push_back(set.pattern.mask);
  parts->lambda.push_back(std::vector<uint8_t>(set.pattern.mask.size(), 0));
  samples[0].partition = parts;
  TrainConfig cfg = tiny_config(TrainMode::SSDU);
  CHECK_THROWS_AS((void)pair_loss(samples[0], 0, NetworkParams::init(6, 1, 1), cfg),
                  ConfigError);
}

TEST_CASE("overlapping partitions are rejected at every step") {
  PhantomSet set = tiny_set(6);
  auto samples = normalize_dataset(training_samples(set, false));
  auto parts = std::make_shared<PartitionSet>();
  parts->k = 1;
  parts->rho = 0.4;
  parts->theta.push_back(set.pattern.mask);
  parts->lambda.push_back(set.pattern.mask);  // full overlap
  samples[0].partition = parts;
  TrainConfig cfg = tiny_config(TrainMode::SSDU);
  CHECK_THROWS_AS((void)pair_loss(samples[0], 0, NetworkParams::init(6, 1, 1), cfg), DataError);
}

TEST_CASE("perturbing a loss-only index changes the loss but not the DC input") {
  PhantomSet set = tiny_set(7);
  auto samples = normalize_dataset(training_samples(set, false));
  TrainConfig cfg = tiny_config(TrainMode::SSDU, 11);
  prepare_partitions(samples, cfg);
  const PartitionSet& parts = *samples[0].partition;

  size_t lambda_idx = 0;
  for (size_t i = 0; i < parts.lambda[0].size(); ++i)
    if (parts.lambda[0][i]) {
      lambda_idx = i;
      break;
    }

  NetworkParams params = NetworkParams::init(cfg.channels, cfg.blocks, 21);
  const double loss_before = pair_loss(samples[0], 0, params, cfg);

  auto perturbed = samples;
  perturbed[0].y.data[lambda_idx] += cplx(0.05, -0.02);  // coil 0, lambda-only index
  const double loss_after = pair_loss(perturbed[0], 0, params, cfg);
  CHECK(loss_after != loss_before);

  // recompute the DC input (theta-masked zero-filled image) both ways
  auto dc_input = [&](const TrainingSample& s) {
    KSpaceSample y_theta = s.y;
    SamplingPattern pat = s.y.pattern;
    pat.mask = parts.theta[0];
    y_theta.pattern = pat;
    y_theta.enforce_pattern();
    return zero_filled_recon(y_theta, *s.coils);
  };
  ComplexImage a = dc_input(samples[0]);
  ComplexImage b = dc_input(perturbed[0]);
  CHECK(a.data == b.data);
}

TEST_CASE("lr = 0 leaves the parameters at their initialization") {
  PhantomSet set = tiny_set(8);
  auto samples = normalize_dataset(training_samples(set, false));
  TrainConfig cfg = tiny_config(TrainMode::SSDU, 5);
  cfg.lr = 0.0;
  cfg.epochs = 1;
  TrainResult res = train(samples, cfg);
  NetworkParams init = NetworkParams::init(cfg.channels, cfg.blocks,
                                           derive_seed(cfg.seed, 0x12417), cfg.unroll.mu_init);
  auto a = res.params.tensor_views();
  auto b = init.tensor_views();
  for (size_t i = 0; i < a.size(); ++i) CHECK(*a[i].second == *b[i].second);
  CHECK(res.params.mu == init.mu);
}

TEST_CASE("training runs are reproducible bit for bit") {
  PhantomSet set = tiny_set(9);
  auto samples = normalize_dataset(training_samples(set, true));
  TrainConfig cfg = tiny_config(TrainMode::MultiMaskSSDU, 31);
  TrainResult r1 = train(samples, cfg);
  TrainResult r2 = train(samples, cfg);
  CHECK(r1.epoch_mean_loss == r2.epoch_mean_loss);
  auto a = r1.params.tensor_views();
  auto b = r2.params.tensor_views();
  for (size_t i = 0; i < a.size(); ++i) CHECK(*a[i].second == *b[i].second);
  CHECK(r1.params.mu == r2.params.mu);
  CHECK(std::isfinite(r1.rows[0].loss));
}

TEST_CASE("multimask with K=1 reproduces the ssdu trajectory exactly") {
  PhantomSet set = tiny_set(10);
  auto samples = normalize_dataset(training_samples(set, false));
  TrainConfig ssdu_cfg = tiny_config(TrainMode::SSDU, 77);
  TrainConfig mm_cfg = tiny_config(TrainMode::MultiMaskSSDU, 77);
  mm_cfg.k = 1;
  TrainResult a = train(samples, ssdu_cfg);
  TrainResult b = train(samples, mm_cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].loss == b.rows[i].loss);
  auto pa = a.params.tensor_views();
  auto pb = b.params.tensor_views();
  for (size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i].second == *pb[i].second);
}

TEST_CASE("steps per epoch is N * K") {
  PhantomSet set = tiny_set(12, 3, 1);
  auto samples = normalize_dataset(training_samples(set, false));
  TrainConfig cfg = tiny_config(TrainMode::MultiMaskSSDU, 13);
  cfg.k = 2;
  cfg.epochs = 2;
  TrainResult res = train(samples, cfg);
  CHECK(res.steps_per_epoch == 6);
  CHECK(res.rows.size() == 12);
  CHECK(res.rows.back().step == 11);
}

TEST_CASE("partition K mismatches are config errors") {
  PhantomSet set = tiny_set(14);
  auto samples = normalize_dataset(training_samples(set, false));
  samples[0].partition = std::make_shared<PartitionSet>(
      gen_multi_mask(set.pattern, 3, 0.4, MaskDistribution::uniform(), 5));
  TrainConfig cfg = tiny_config(TrainMode::MultiMaskSSDU, 15);
  cfg.k = 2;
  CHECK_THROWS_AS((void)train(samples, cfg), ConfigError);
}

TEST_CASE("each mode reduces its training loss on the tiny benchmark") {
  PhantomSet set = tiny_set(16, 2, 1);
  for (TrainMode mode : {TrainMode::Supervised, TrainMode::SSDU, TrainMode::MultiMaskSSDU,
                         TrainMode::CyclicMultiMask}) {
    auto samples = normalize_dataset(training_samples(set, mode == TrainMode::Supervised));
    TrainConfig cfg = tiny_config(mode, 17);
    cfg.epochs = 10;
    cfg.lr = 2e-3;
    TrainResult res = train(samples, cfg);
    INFO("mode ", to_string(mode));
    CHECK(res.epoch_mean_loss[9] < res.epoch_mean_loss[0]);
  }
}

TEST_CASE("paranoid no-leakage checks pass on well-formed data") {
  PhantomSet set = tiny_set(18);
  auto samples = normalize_dataset(training_samples(set, false));
  TrainConfig cfg = tiny_config(TrainMode::SSDU, 19);
  cfg.paranoid_checks = true;
  cfg.epochs = 1;
  TrainResult res = train(samples, cfg);
  CHECK(res.rows.size() == size_t(res.steps_per_epoch));
}

TEST_CASE("reconstruct_test is deterministic and matches repeated DC for a zero net") {
  PhantomSet set = tiny_set(20, 2, 1);
  auto coils = set.coils;
  KSpaceSample y = set.test_y[0];
  double m = 0;
  for (const cplx& v : y.data) m = std::max(m, std::abs(v));
  for (cplx& v : y.data) v /= m;
  y.scale = m;

  NetworkParams params = NetworkParams::init(6, 1, 23);
  for (ParamRef& r : params.tensor_refs())
    for (double& v : *r.data) v = 0.0;
  params.mu = 0.05;
  UnrollConfig cfg;
  cfg.t_unroll = 3;
  cfg.cg_iters = 8;

  ComplexImage a = reconstruct_test(y, *coils, params, cfg);
  ComplexImage b = reconstruct_test(y, *coils, params, cfg);
  CHECK(a.data == b.data);

  // zero regularizer output means every x^(i>=1) equals dc(0, y)
  ComplexImage z(y.ny(), y.nz());
  ComplexImage dc1 = dc_unit(z, y, *coils, params.mu, cfg);
  for (cplx& v : dc1.data) v *= y.scale;
  CHECK(testutil::rel_err(a.data, dc1.data) < 1e-12);
}

TEST_CASE("ssdu training beats the zero-filled baseline on held-out data") {
  PhantomSet set = tiny_set(24, 3, 2);
  auto samples = normalize_dataset(training_samples(set, false));
  TrainConfig cfg = tiny_config(TrainMode::SSDU, 25);
  cfg.epochs = 12;
  cfg.lr = 2e-3;
  TrainResult res = train(samples, cfg);

  double zf_nmse = 0, rec_nmse = 0;
  for (size_t i = 0; i < set.test_y.size(); ++i) {
    KSpaceSample y = set.test_y[i];
    double m = 0;
    for (const cplx& v : y.data) m = std::max(m, std::abs(v));
    for (cplx& v : y.data) v /= m;
    y.scale = m;
    ComplexImage rec = reconstruct_test(y, *set.coils, res.params, cfg.unroll);
    ComplexImage zf = zero_filled_recon(set.test_y[i], *set.coils);
    rec_nmse += nmse(set.test_images[i], rec);
    zf_nmse += nmse(set.test_images[i], zf);
  }
  CHECK(rec_nmse < zf_nmse);
}
