#include "ssdu/solver.hpp"

#include <cmath>
#include <string>

#include "ssdu/encoding.hpp"
#include "ssdu/errors.hpp"

namespace ssdu {

void UnrollConfig::validate() const {
  if (t_unroll < 0) throw ConfigError("UnrollConfig: t_unroll must be >= 0");
  if (cg_iters < 1) throw ConfigError("UnrollConfig: cg_iters must be >= 1");
  if (!(cg_tol > 0)) throw ConfigError("UnrollConfig: cg_tol must be > 0");
  if (!(mu_init > 0)) throw ConfigError("UnrollConfig: mu_init must be > 0");
}

CgResult cg_normal_solve(const LinOp& apply_a, const ComplexImage& rhs, int iters, double tol) {
  if (iters < 1) throw ConfigError("cg_normal_solve: iters must be >= 1");
  const double rhs_norm = norm2(rhs.data);
  CgResult res;
  res.x = ComplexImage(rhs.ny, rhs.nz);
  if (rhs_norm == 0.0) return res;

  ComplexImage r = rhs;
  ComplexImage p = r;
  double rs = norm2sq(r.data);
  int it = 0;
  for (; it < iters; ++it) {
    ComplexImage ap = apply_a(p);
    const double pap = cdot(p.data, ap.data).real();
    if (!std::isfinite(pap) || !std::isfinite(rs))
      throw NumericalError("cg_normal_solve: non-finite value at iteration " +
                           std::to_string(it));
    if (pap <= 0.0) break;  // converged to the numerical floor (p ~ 0)
    const double alpha = rs / pap;
    for (size_t i = 0; i < res.x.numel(); ++i) {
      res.x.data[i] += alpha * p.data[i];
      r.data[i] -= alpha * ap.data[i];
    }
    const double rs_new = norm2sq(r.data);
    if (!std::isfinite(rs_new))
      throw NumericalError("cg_normal_solve: non-finite residual at iteration " +
                           std::to_string(it));
    if (std::sqrt(rs_new) <= tol * rhs_norm) {
      rs = rs_new;
      ++it;
      break;
    }
    const double beta = rs_new / rs;
    rs = rs_new;
    for (size_t i = 0; i < p.numel(); ++i) p.data[i] = r.data[i] + beta * p.data[i];
  }
  res.iters = it;
  ComplexImage ax = apply_a(res.x);
  double err = 0;
  for (size_t i = 0; i < ax.numel(); ++i) err += std::norm(ax.data[i] - rhs.data[i]);
  res.rel_residual = std::sqrt(err) / rhs_norm;
  return res;
}

ComplexImage dc_unit(const ComplexImage& z, const KSpaceSample& y, const CoilSensitivities& coils,
                     double mu, const UnrollConfig& cfg) {
  cfg.validate();
  if (mu < 0) throw ConfigError("dc_unit: mu must be >= 0");
  check_shapes(z, coils, y.pattern);
  ComplexImage rhs = apply_adjoint(y, coils);
  if (mu != 0.0)
    for (size_t i = 0; i < rhs.numel(); ++i) rhs.data[i] += mu * z.data[i];
  const LinOp a = [&](const ComplexImage& v) { return normal_op(v, coils, y.pattern, mu); };
  CgResult res = cg_normal_solve(a, rhs, cfg.cg_iters, cfg.cg_tol);
  if (mu == 0.0 && res.rel_residual > 1e-3)
    throw NumericalError(
        "dc_unit: CG stalled at relative residual " + std::to_string(res.rel_residual) +
        "; the system looks rank-deficient and mu is 0");
  return std::move(res.x);
}

ComplexImage cg_sense(const KSpaceSample& y, const CoilSensitivities& coils, double l2_weight,
                      const UnrollConfig& cfg) {
  cfg.validate();
  if (l2_weight < 0) throw ConfigError("cg_sense: l2_weight must be >= 0");
  ComplexImage rhs = apply_adjoint(y, coils);
  const LinOp a = [&](const ComplexImage& v) {
    return normal_op(v, coils, y.pattern, l2_weight);
  };
  return std::move(cg_normal_solve(a, rhs, cfg.cg_iters, cfg.cg_tol).x);
}

UnrollTrace unrolled_forward(const KSpaceSample& y, const CoilSensitivities& coils,
                             const NetworkParams& params, const UnrollConfig& cfg) {
  cfg.validate();
  UnrollTrace trace;
  trace.x.push_back(zero_filled_recon(y, coils));
  for (int t = 0; t < cfg.t_unroll; ++t) {
    trace.z.push_back(resnet_regularizer(trace.x.back(), params));
    trace.x.push_back(dc_unit(trace.z.back(), y, coils, params.mu, cfg));
  }
  return trace;
}

// --- graph path --------------------------------------------------------------

EncodingRefs make_encoding_refs(const CoilSensitivities& coils,
                                const std::vector<uint8_t>& mask) {
  EncodingRefs enc;
  enc.ny = coils.ny;
  enc.nz = coils.nz;
  enc.ncoils = coils.ncoils;
  const size_t plane = size_t(coils.ny) * coils.nz;
  if (mask.size() != plane) throw DimensionError("make_encoding_refs: mask size mismatch");
  for (int c = 0; c < coils.ncoils; ++c) {
    auto m = std::make_shared<std::vector<cplx>>(coils.coil(c), coils.coil(c) + plane);
    enc.maps.push_back(std::move(m));
  }
  enc.mask = std::make_shared<std::vector<uint8_t>>(mask);
  return enc;
}

std::vector<int> encode_graph(ad::Graph& g, int x, const EncodingRefs& enc) {
  std::vector<int> out;
  out.reserve(enc.ncoils);
  for (int c = 0; c < enc.ncoils; ++c)
    out.push_back(g.mask(g.fft2c(g.cmul_map(x, enc.maps[c], false)), enc.mask));
  return out;
}

int normal_graph(ad::Graph& g, int x, const EncodingRefs& enc, int mu_node) {
  int acc = -1;
  for (int c = 0; c < enc.ncoils; ++c) {
    int t = g.cmul_map(x, enc.maps[c], false);
    t = g.fft2c(t);
    t = g.mask(t, enc.mask);
    t = g.ifft2c(t);
    t = g.cmul_map(t, enc.maps[c], true);
    acc = (acc < 0) ? t : g.add(acc, t);
  }
  return g.add(acc, g.scale(x, mu_node));
}

int dc_graph(ad::Graph& g, int z, int ehy_const, const EncodingRefs& enc, int mu_node,
             const UnrollConfig& cfg) {
  const int rhs = g.add(ehy_const, g.scale(z, mu_node));

  const auto& dims = g.dims(rhs);
  int x = g.constant(dims, std::vector<double>(g.value(rhs).size(), 0.0));
  double rhs_norm_sq = 0.0;
  for (double v : g.value(rhs)) rhs_norm_sq += v * v;
  if (rhs_norm_sq == 0.0) return x;

  int r = rhs;
  int p = rhs;
  int rs = g.dot(r, r);
  for (int it = 0; it < cfg.cg_iters; ++it) {
    int ap = normal_graph(g, p, enc, mu_node);
    int pap = g.dot(p, ap);
    if (g.scalar_value(pap) <= 0.0) break;
    int alpha = g.s_div(rs, pap);
    x = g.add(x, g.scale(p, alpha));
    r = g.add(r, g.scale(ap, g.s_scale(alpha, -1.0)));
    int rs_new = g.dot(r, r);
    if (std::sqrt(g.scalar_value(rs_new)) <= cfg.cg_tol * std::sqrt(rhs_norm_sq)) break;
    int beta = g.s_div(rs_new, rs);
    p = g.add(r, g.scale(p, beta));
    rs = rs_new;
  }
  return x;
}

UnrolledGraph build_unrolled_graph(ad::Graph& g, const KSpaceSample& y,
                                   const CoilSensitivities& coils, const NetworkParams& params,
                                   const ResnetNodes& ids, int mu_node, const UnrollConfig& cfg) {
  cfg.validate();
  EncodingRefs enc = make_encoding_refs(coils, y.pattern.mask);
  const ComplexImage x0 = zero_filled_recon(y, coils);
  const int ehy = g.complex_constant(x0);  // E^H y doubles as the initial image

  UnrolledGraph ug;
  ug.mu_node = mu_node;
  int x = g.constant({2, x0.ny, x0.nz}, ad::Graph::pack(x0));
  ug.x_iters.push_back(x);
  for (int t = 0; t < cfg.t_unroll; ++t) {
    int z = resnet_graph(g, x, params, ids);
    x = dc_graph(g, z, ehy, enc, mu_node, cfg);
    ug.x_iters.push_back(x);
  }
  ug.x_final = x;
  return ug;
}

}  // namespace ssdu
