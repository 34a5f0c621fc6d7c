#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ssdu/encoding.hpp"
#include "ssdu/errors.hpp"
#include "ssdu/fft.hpp"
#include "ssdu/metrics.hpp"
#include "ssdu/phantom.hpp"
#include "ssdu/sampling.hpp"
#include "ssdu/solver.hpp"
#include "test_util.hpp"

using namespace ssdu;
using testutil::rel_err;

namespace {

SamplingPattern full_pattern(int n) {
  SamplingPattern p(n, n, 0, 0);
  for (auto& m : p.mask) m = 1;
  return p;
}

SamplingPattern checkerboard(int n) {
  SamplingPattern p(n, n, 2, 2);
  for (int y = 0; y < n; ++y)
    for (int z = 0; z < n; ++z)
      if ((y + z) % 2 == 0 || p.in_acs(y, z)) p.at(y, z) = 1;
  return p;
}

CoilSensitivities ones_coil(int n) {
  CoilSensitivities c(1, n, n);
  for (auto& v : c.maps) v = cplx(1, 0);
  return c;
}

// dense (E^H E + mu I) x = rhs oracle
ComplexImage dense_normal_solve(const CoilSensitivities& coils, const SamplingPattern& pat,
                                double mu, const ComplexImage& rhs) {
  auto e = testutil::dense_encoding_matrix(coils, pat);
  const size_t n = rhs.numel();
  std::vector<std::vector<cplx>> a(n, std::vector<cplx>(n, cplx(0, 0)));
  for (size_t r = 0; r < e.size(); ++r)
    for (size_t i = 0; i < n; ++i) {
      if (e[r][i] == cplx(0, 0)) continue;
      for (size_t j = 0; j < n; ++j) a[i][j] += std::conj(e[r][i]) * e[r][j];
    }
  for (size_t i = 0; i < n; ++i) a[i][i] += mu;
  auto x = testutil::lu_solve(std::move(a), rhs.data);
  ComplexImage out(rhs.ny, rhs.nz);
  out.data = std::move(x);
  return out;
}

}  // namespace

TEST_CASE("cg with the identity operator returns rhs in one step") {
  ComplexImage rhs = testutil::random_image(8, 8, 1);
  const LinOp identity = [](const ComplexImage& v) { return v; };
  CgResult res = cg_normal_solve(identity, rhs, 10, 1e-12);
  CHECK(res.iters == 1);
  CHECK(rel_err(res.x.data, rhs.data) < 1e-14);
  CHECK(res.rel_residual < 1e-14);
}

TEST_CASE("cg solves the single-coil normal equations to the dense oracle") {
  auto coils = testutil::random_coils(1, 8, 8, 2);
  SamplingPattern pat = checkerboard(8);
  const double mu = 0.1;
  ComplexImage rhs = testutil::random_image(8, 8, 3);
  const LinOp a = [&](const ComplexImage& v) { return normal_op(v, coils, pat, mu); };
  CgResult res = cg_normal_solve(a, rhs, 400, 1e-13);
  ComplexImage want = dense_normal_solve(coils, pat, mu, rhs);
  CHECK(rel_err(res.x.data, want.data) < 1e-8);
}

TEST_CASE("cg with zero rhs returns zero") {
  ComplexImage rhs(8, 8);
  const LinOp identity = [](const ComplexImage& v) { return v; };
  CgResult res = cg_normal_solve(identity, rhs, 10, 1e-12);
  CHECK(res.iters == 0);
  for (const cplx& v : res.x.data) CHECK(v == cplx(0, 0));
}

TEST_CASE("cg A-norm error is monotonically non-increasing") {
  auto coils = testutil::random_coils(2, 8, 8, 4);
  SamplingPattern pat = checkerboard(8);
  const double mu = 0.05;
  ComplexImage rhs = testutil::random_image(8, 8, 5);
  const LinOp a = [&](const ComplexImage& v) { return normal_op(v, coils, pat, mu); };
  ComplexImage xstar = dense_normal_solve(coils, pat, mu, rhs);

  double prev = 1e300;
  for (int k = 1; k <= 20; ++k) {
    // CG from a zero start is deterministic, so the k-iteration run ends at
    // the k-th iterate of one long run
    CgResult res = cg_normal_solve(a, rhs, k, 1e-30);
    ComplexImage err(8, 8);
    for (size_t i = 0; i < err.numel(); ++i) err.data[i] = res.x.data[i] - xstar.data[i];
    ComplexImage aerr = a(err);
    const double anorm = std::sqrt(std::abs(cdot(err.data, aerr.data).real()));
    CHECK(anorm <= prev * (1.0 + 1e-9) + 1e-12);
    prev = anorm;
  }
}

TEST_CASE("dc_unit matches the dense oracle") {
  auto coils = testutil::random_coils(2, 8, 8, 6);
  SamplingPattern pat = checkerboard(8);
  const double mu = 0.05;
  ComplexImage z = testutil::random_image(8, 8, 7);
  ComplexImage x_true = testutil::random_image(8, 8, 8);
  KSpaceSample y = apply_encoding(x_true, coils, pat);

  UnrollConfig cfg;
  cfg.cg_iters = 500;
  cfg.cg_tol = 1e-13;
  ComplexImage got = dc_unit(z, y, coils, mu, cfg);

  ComplexImage rhs = apply_adjoint(y, coils);
  for (size_t i = 0; i < rhs.numel(); ++i) rhs.data[i] += mu * z.data[i];
  ComplexImage want = dense_normal_solve(coils, pat, mu, rhs);
  CHECK(rel_err(got.data, want.data) < 1e-8);

  SUBCASE("first-order optimality residual is below tolerance") {
    ComplexImage ax = normal_op(got, coils, pat, mu);
    double num = 0;
    for (size_t i = 0; i < ax.numel(); ++i) num += std::norm(ax.data[i] - rhs.data[i]);
    CHECK(std::sqrt(num) <= cfg.cg_tol * norm2(rhs.data) * 10);
  }
}

TEST_CASE("dc_unit penalty-dominated limit returns z") {
  auto coils = testutil::random_coils(2, 8, 8, 9);
  SamplingPattern pat = checkerboard(8);
  ComplexImage x_true = testutil::random_image(8, 8, 10);
  KSpaceSample y = apply_encoding(x_true, coils, pat);
  ComplexImage z = testutil::random_image(8, 8, 11);
  UnrollConfig cfg;
  cfg.cg_iters = 500;
  cfg.cg_tol = 1e-13;
  ComplexImage got = dc_unit(z, y, coils, 1e6, cfg);
  double dev = 0;
  for (size_t i = 0; i < z.numel(); ++i) dev = std::max(dev, std::abs(got.data[i] - z.data[i]));
  CHECK(dev < 1e-4);
}

TEST_CASE("dc_unit with full sampling, unit coil and mu=0 inverts exactly") {
  const int n = 8;
  ComplexImage x_true = testutil::random_image(n, n, 12);
  KSpaceSample y = apply_encoding(x_true, ones_coil(n), full_pattern(n));
  UnrollConfig cfg;
  cfg.cg_iters = 50;
  cfg.cg_tol = 1e-12;
  ComplexImage z(n, n);
  ComplexImage got = dc_unit(z, y, ones_coil(n), 0.0, cfg);
  CHECK(rel_err(got.data, x_true.data) < 1e-10);
}

TEST_CASE("dc_unit is jointly linear in (y, z) once converged") {
  auto coils = testutil::random_coils(2, 8, 8, 13);
  SamplingPattern pat = checkerboard(8);
  UnrollConfig cfg;
  cfg.cg_iters = 600;
  cfg.cg_tol = 1e-14;
  const double mu = 0.2;

  ComplexImage z1 = testutil::random_image(8, 8, 14);
  ComplexImage z2 = testutil::random_image(8, 8, 15);
  KSpaceSample y1 = apply_encoding(testutil::random_image(8, 8, 16), coils, pat);
  KSpaceSample y2 = apply_encoding(testutil::random_image(8, 8, 17), coils, pat);

  const double alpha = 0.7;
  const double beta = -1.3;
  ComplexImage zc(8, 8);
  KSpaceSample yc(2, pat);
  for (size_t i = 0; i < zc.numel(); ++i) zc.data[i] = alpha * z1.data[i] + beta * z2.data[i];
  for (size_t i = 0; i < yc.data.size(); ++i) yc.data[i] = alpha * y1.data[i] + beta * y2.data[i];

  ComplexImage a = dc_unit(z1, y1, coils, mu, cfg);
  ComplexImage b = dc_unit(z2, y2, coils, mu, cfg);
  ComplexImage c = dc_unit(zc, yc, coils, mu, cfg);
  std::vector<cplx> want(a.data.size());
  for (size_t i = 0; i < want.size(); ++i) want[i] = alpha * a.data[i] + beta * b.data[i];
  CHECK(rel_err(c.data, want) < 1e-10);
}

TEST_CASE("cg_sense on noiseless full sampling recovers the phantom") {
  const int n = 32;
  ComplexImage phantom = make_phantom(n, 1);
  auto coils = simulate_coils(n, 4);
  KSpaceSample y = apply_encoding(phantom, coils, full_pattern(n));
  UnrollConfig cfg;
  cfg.cg_iters = 400;
  cfg.cg_tol = 1e-13;
  ComplexImage rec = cg_sense(y, coils, 0.0, cfg);
  CHECK(nmse(phantom, rec) < 1e-10);
}

TEST_CASE("cg_sense degrades with acceleration, and zero data gives zero") {
  const int n = 32;
  ComplexImage phantom = make_phantom(n, 2);
  auto coils = simulate_coils(n, 4);
  auto run = [&](int ry, int rz) {
    UndersamplingSpec spec;
    spec.r_total = ry * rz;
    spec.r_y = ry;
    spec.r_z = rz;
    spec.shear_step = 1;
    spec.acs_h = 6;
    spec.acs_w = 6;
    SamplingPattern pat = gen_sheared_pattern(n, n, spec);
    KSpaceSample y = simulate_acquisition(phantom, coils, pat, NoiseSpec{0.01, 99});
    UnrollConfig cfg;
    cfg.cg_iters = 40;
    cfg.cg_tol = 1e-10;
    return nmse(phantom, cg_sense(y, coils, 1e-3, cfg));
  };
  CHECK(run(2, 1) < run(4, 2));

  SamplingPattern pat = checkerboard(n);
  KSpaceSample zero_y(4, pat);
  UnrollConfig cfg;
  ComplexImage rec = cg_sense(zero_y, *std::make_shared<CoilSensitivities>(coils), 1e-3, cfg);
  for (const cplx& v : rec.data) CHECK(v == cplx(0, 0));
}

TEST_CASE("unrolled_forward with T=0 returns the zero-filled image") {
  const int n = 16;
  ComplexImage phantom = make_phantom(n, 3);
  auto coils = simulate_coils(n, 2);
  SamplingPattern pat = checkerboard(n);
  KSpaceSample y = apply_encoding(phantom, coils, pat);
  NetworkParams params = NetworkParams::init(4, 1, 21);
  UnrollConfig cfg;
  cfg.t_unroll = 0;
  UnrollTrace trace = unrolled_forward(y, coils, params, cfg);
  CHECK(trace.x.size() == 1);
  CHECK(trace.z.empty());
  ComplexImage zf = zero_filled_recon(y, coils);
  CHECK(rel_err(trace.final().data, zf.data) == 0.0);
}

TEST_CASE("identity regularizer at a DC fixed point freezes the iterates") {
  const int n = 8;
  ComplexImage x_true = testutil::random_image(n, n, 22);
  KSpaceSample y = apply_encoding(x_true, ones_coil(n), full_pattern(n));

  NetworkParams p = NetworkParams::init(4, 1, 23);
  for (ParamRef& r : p.tensor_refs())
    for (double& v : *r.data) v = 0.0;
  auto delta = [](ConvLayer& l, int co, int ci) { l.w[(size_t(co) * l.cin + ci) * 9 + 4] = 1.0; };
  delta(p.conv_in, 0, 0);
  delta(p.conv_in, 1, 1);
  delta(p.conv_out, 0, 0);
  delta(p.conv_out, 1, 1);
  p.mu = 0.5;

  UnrollConfig cfg;
  cfg.t_unroll = 4;
  cfg.cg_iters = 200;
  cfg.cg_tol = 1e-14;
  UnrollTrace trace = unrolled_forward(y, ones_coil(n), p, cfg);
  // x0 = E^H y is already the solution, so z = x and every DC returns x0
  for (size_t t = 0; t + 1 < trace.x.size(); ++t)
    CHECK(rel_err(trace.x[t + 1].data, trace.x[0].data) < 1e-10);
}

TEST_CASE("unrolled_forward is deterministic") {
  const int n = 16;
  ComplexImage phantom = make_phantom(n, 5);
  auto coils = simulate_coils(n, 2);
  SamplingPattern pat = checkerboard(n);
  KSpaceSample y = simulate_acquisition(phantom, coils, pat, NoiseSpec{0.01, 7});
  NetworkParams params = NetworkParams::init(8, 2, 24);
  UnrollConfig cfg;
  cfg.t_unroll = 3;
  UnrollTrace a = unrolled_forward(y, coils, params, cfg);
  UnrollTrace b = unrolled_forward(y, coils, params, cfg);
  CHECK(a.x.size() == b.x.size());
  for (size_t t = 0; t < a.x.size(); ++t) CHECK(a.x[t].data == b.x[t].data);
}

TEST_CASE("graph forward value equals the plain forward") {
  const int n = 16;
  ComplexImage phantom = make_phantom(n, 6);
  auto coils = simulate_coils(n, 3);
  SamplingPattern pat = checkerboard(n);
  KSpaceSample y = simulate_acquisition(phantom, coils, pat, NoiseSpec{0.005, 8});
  NetworkParams params = NetworkParams::init(8, 2, 25);
  UnrollConfig cfg;
  cfg.t_unroll = 2;

  UnrollTrace plain = unrolled_forward(y, coils, params, cfg);

  ad::Graph g;
  ResnetNodes ids = resnet_params_to_graph(g, params, false);
  const int mu_node = g.scalar(params.mu);
  UnrolledGraph ug = build_unrolled_graph(g, y, coils, params, ids, mu_node, cfg);
  ComplexImage graph_final = ad::Graph::unpack(g.value(ug.x_final), n, n);
  CHECK(rel_err(graph_final.data, plain.final().data) < 1e-12);
}

TEST_CASE("config validation") {
  UnrollConfig cfg;
  cfg.cg_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = UnrollConfig{};
  cfg.cg_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = UnrollConfig{};
  cfg.t_unroll = 10;  // full-scale unroll depth is a valid configuration
  cfg.validate();
}
