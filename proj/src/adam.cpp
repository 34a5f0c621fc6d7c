#include "ssdu/adam.hpp"

#include <cmath>

#include "ssdu/errors.hpp"

namespace ssdu {

AdamState AdamState::init(const std::vector<ParamRef>& params) {
  AdamState s;
  s.m.resize(params.size());
  s.v.resize(params.size());
  for (size_t i = 0; i < params.size(); ++i) {
    s.m[i].assign(params[i].data->size(), 0.0);
    s.v[i].assign(params[i].data->size(), 0.0);
  }
  return s;
}

void adam_step(std::vector<ParamRef>& params, const std::vector<std::vector<double>>& grads,
               AdamState& state, const AdamConfig& cfg) {
  if (cfg.lr < 0) throw ConfigError("adam_step: lr must be >= 0");
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw DimensionError("adam_step: params/grads/state count mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.t));
  for (size_t i = 0; i < params.size(); ++i) {
    std::vector<double>& p = *params[i].data;
    const std::vector<double>& g = grads[i];
    if (p.size() != g.size()) throw DimensionError("adam_step: gradient shape mismatch");
    std::vector<double>& m = state.m[i];
    std::vector<double>& v = state.v[i];
    for (size_t j = 0; j < p.size(); ++j) {
      if (!std::isfinite(g[j]))
        throw NumericalError("adam_step: non-finite gradient for parameter '" + params[i].name +
                             "'");
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p[j] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace ssdu
