#include "ssdu/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssdu/errors.hpp"
#include "ssdu/rng.hpp"

namespace ssdu {

void UndersamplingSpec::validate(int ny, int nz) const {
  if (r_y < 1 || r_z < 1 || r_total < 1) throw ConfigError("UndersamplingSpec: rates must be >= 1");
  if (r_y * r_z != r_total) throw ConfigError("UndersamplingSpec: r_y * r_z must equal r_total");
  if (r_y > ny || r_z > nz) throw ConfigError("UndersamplingSpec: rate exceeds grid dim");
  if (acs_h < 1 || acs_w < 1) throw ConfigError("UndersamplingSpec: ACS dims must be >= 1");
  if (acs_h > ny || acs_w > nz) throw ConfigError("UndersamplingSpec: ACS larger than grid");
}

SamplingPattern gen_sheared_pattern(int ny, int nz, const UndersamplingSpec& spec) {
  spec.validate(ny, nz);
  SamplingPattern pat(ny, nz, spec.acs_h, spec.acs_w);
  for (int y = 0; y < ny; y += spec.r_y) {
    int row = y / spec.r_y;
    int zr = ((spec.shear_step * row) % spec.r_z + spec.r_z) % spec.r_z;
    for (int z = zr; z < nz; z += spec.r_z) pat.at(y, z) = 1;
  }
  for (int y = 0; y < ny; ++y)
    for (int z = 0; z < nz; ++z)
      if (pat.in_acs(y, z)) pat.at(y, z) = 1;
  pat.validate();
  return pat;
}

std::vector<size_t> selectable_indices(const SamplingPattern& pattern) {
  std::vector<size_t> idx;
  for (int y = 0; y < pattern.ny; ++y)
    for (int z = 0; z < pattern.nz; ++z)
      if (pattern.at(y, z) && !pattern.in_acs(y, z)) idx.push_back(size_t(y) * pattern.nz + z);
  return idx;
}

namespace {

// round(x) with ties away from zero, as llround does.
size_t lambda_count(double rho, size_t nsel) {
  return size_t(std::llround(rho * double(nsel)));
}

std::vector<size_t> draw_lambda(const SamplingPattern& pattern,
                                const std::vector<size_t>& selectable, size_t nlam,
                                const MaskDistribution& dist, uint64_t seed) {
  CounterRng rng(seed);
  const size_t nsel = selectable.size();
  std::vector<size_t> pool = selectable;
  if (dist.kind == MaskDistribution::Kind::UniformRandom) {
    // partial Fisher-Yates; first nlam entries are the sample
    for (size_t i = 0; i < nlam; ++i) {
      size_t j = i + size_t(rng.below(nsel - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(nlam);
    return pool;
  }
  // Variable-density Gaussian, weighted sampling without replacement via
  // exponential keys (Efraimidis-Spirakis): take the nlam smallest
  // exp(1)/w_i keys.
  const double cy = pattern.ny / 2.0;
  const double cz = pattern.nz / 2.0;
  const double sigma = dist.sigma_frac * double(std::min(pattern.ny, pattern.nz));
  if (sigma <= 0) throw ConfigError("MaskDistribution: sigma_frac must be > 0");
  std::vector<std::pair<double, size_t>> keys(nsel);
  for (size_t i = 0; i < nsel; ++i) {
    size_t lin = pool[i];
    double y = double(lin / pattern.nz);
    double z = double(lin % pattern.nz);
    double d2 = (y - cy) * (y - cy) + (z - cz) * (z - cz);
    double w = std::exp(-d2 / (2.0 * sigma * sigma));
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    keys[i] = {-std::log(u) / std::max(w, 1e-300), lin};
  }
  std::sort(keys.begin(), keys.end());
  std::vector<size_t> lam(nlam);
  for (size_t i = 0; i < nlam; ++i) lam[i] = keys[i].second;
  return lam;
}

}  // namespace

void split_ssdu(const SamplingPattern& pattern, double rho, const MaskDistribution& dist,
                uint64_t seed, std::vector<uint8_t>& theta_out,
                std::vector<uint8_t>& lambda_out) {
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("split_ssdu: rho must be in (0,1)");
  pattern.validate();
  const std::vector<size_t> selectable = selectable_indices(pattern);
  const size_t nlam = lambda_count(rho, selectable.size());
  if (nlam < 1)
    throw ConfigError("split_ssdu: rho * |selectable| < 1, loss set would be empty");

  std::vector<size_t> lam = draw_lambda(pattern, selectable, nlam, dist, seed);
  theta_out = pattern.mask;
  lambda_out.assign(pattern.mask.size(), 0);
  for (size_t lin : lam) {
    theta_out[lin] = 0;
    lambda_out[lin] = 1;
  }
}

PartitionSet gen_multi_mask(const SamplingPattern& pattern, int k, double rho,
                            const MaskDistribution& dist, uint64_t seed) {
  if (k < 1) throw ConfigError("gen_multi_mask: k must be >= 1");
  PartitionSet parts;
  parts.k = k;
  parts.rho = rho;
  parts.seed = seed;
  parts.theta.resize(k);
  parts.lambda.resize(k);
  for (int j = 0; j < k; ++j)
    split_ssdu(pattern, rho, dist, derive_seed(seed, uint64_t(j)), parts.theta[j],
               parts.lambda[j]);
  return parts;
}

PartitionSet gen_cyclic_multi_mask(const SamplingPattern& pattern, int k, uint64_t seed) {
  if (k < 2) throw ConfigError("gen_cyclic_multi_mask: k must be >= 2");
  pattern.validate();
  std::vector<size_t> sel = selectable_indices(pattern);
  const size_t nsel = sel.size();
  if (size_t(k) > nsel) throw ConfigError("gen_cyclic_multi_mask: k exceeds selectable points");

  CounterRng rng(seed);
  for (size_t i = nsel - 1; i > 0; --i) {
    size_t j = size_t(rng.below(i + 1));
    std::swap(sel[i], sel[j]);
  }

  PartitionSet parts;
  parts.k = k;
  parts.rho = 1.0 / double(k);
  parts.seed = seed;
  parts.theta.assign(k, pattern.mask);
  parts.lambda.assign(k, std::vector<uint8_t>(pattern.mask.size(), 0));
  // near-equal bins; the first (nsel mod k) bins take one extra point
  const size_t base = nsel / size_t(k);
  const size_t extra = nsel % size_t(k);
  size_t pos = 0;
  for (int j = 0; j < k; ++j) {
    size_t take = base + (size_t(j) < extra ? 1 : 0);
    for (size_t t = 0; t < take; ++t, ++pos) {
      parts.theta[j][sel[pos]] = 0;
      parts.lambda[j][sel[pos]] = 1;
    }
  }
  return parts;
}

void validate_partitions(const PartitionSet& parts, const SamplingPattern& pattern) {
  if (int(parts.theta.size()) != parts.k || int(parts.lambda.size()) != parts.k)
    throw DataError("PartitionSet: list lengths inconsistent with k");
  const size_t n = pattern.mask.size();
  for (int j = 0; j < parts.k; ++j) {
    const auto& th = parts.theta[j];
    const auto& la = parts.lambda[j];
    if (th.size() != n || la.size() != n) throw DataError("PartitionSet: mask size mismatch");
    for (size_t i = 0; i < n; ++i) {
      if (th[i] && la[i]) throw DataError("PartitionSet: theta and lambda overlap");
      if ((th[i] || la[i]) != (pattern.mask[i] != 0))
        throw DataError("PartitionSet: union differs from pattern");
      if (la[i] && pattern.in_acs(int(i / pattern.nz), int(i % pattern.nz)))
        throw DataError("PartitionSet: ACS point assigned to lambda");
    }
  }
}

}  // namespace ssdu
