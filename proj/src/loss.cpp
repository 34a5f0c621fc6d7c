#include "ssdu/loss.hpp"

#include <cmath>

#include "ssdu/errors.hpp"

namespace ssdu {

double loss_l1l2(const std::vector<cplx>& u, const std::vector<cplx>& v) {
  if (u.size() != v.size()) throw DimensionError("loss_l1l2: size mismatch");
  double n2 = 0, n1 = 0, d2 = 0, d1 = 0;
  for (size_t i = 0; i < u.size(); ++i) {
    const cplx d = u[i] - v[i];
    d2 += std::norm(d);
    d1 += std::abs(d);
    n2 += std::norm(u[i]);
    n1 += std::abs(u[i]);
  }
  if (n2 == 0.0 || n1 == 0.0)
    throw DataError("loss_l1l2: reference values are all zero");
  return std::sqrt(d2) / std::sqrt(n2) + d1 / n1;
}

int loss_l1l2_graph(ad::Graph& g, const std::vector<int>& v_ids,
                    const std::vector<std::vector<double>>& u_packed) {
  if (v_ids.empty() || v_ids.size() != u_packed.size())
    throw DimensionError("loss_l1l2_graph: coil count mismatch");

  double u_norm2_sq = 0.0;
  double u_norm1 = 0.0;
  for (const auto& u : u_packed) {
    const size_t plane = u.size() / 2;
    for (size_t i = 0; i < plane; ++i) {
      u_norm2_sq += u[i] * u[i] + u[plane + i] * u[plane + i];
      u_norm1 += std::sqrt(u[i] * u[i] + u[plane + i] * u[plane + i]);
    }
  }
  if (u_norm2_sq == 0.0 || u_norm1 == 0.0)
    throw DataError("loss_l1l2_graph: reference values are all zero");

  int d2 = -1;
  int d1 = -1;
  for (size_t c = 0; c < v_ids.size(); ++c) {
    const auto& dims = g.dims(v_ids[c]);
    int u_node = g.constant(dims, u_packed[c]);
    int diff = g.axpy_const(u_node, v_ids[c], -1.0);
    int dd = g.dot(diff, diff);
    int da = g.cabs_sum(diff);
    d2 = (d2 < 0) ? dd : g.s_add(d2, dd);
    d1 = (d1 < 0) ? da : g.s_add(d1, da);
  }
  int l2 = g.s_scale(g.s_sqrt(d2), 1.0 / std::sqrt(u_norm2_sq));
  int l1 = g.s_scale(d1, 1.0 / u_norm1);
  return g.s_add(l2, l1);
}

}  // namespace ssdu
