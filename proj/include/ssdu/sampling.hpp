#pragma once

#include <cstdint>
#include <vector>

#include "ssdu/types.hpp"

namespace ssdu {

// How loss-mask points are drawn from the acquired set.
struct MaskDistribution {
  enum class Kind { UniformRandom, GaussianVariableDensity };
  Kind kind = Kind::UniformRandom;
  // Gaussian weight w(y,z) ~ exp(-(dist to centre)^2 / (2 sigma^2)) with
  // sigma = sigma_frac * min(ny, nz).
  double sigma_frac = 0.25;

  static MaskDistribution uniform() { return {Kind::UniformRandom, 0.25}; }
  static MaskDistribution gaussian(double sigma_frac = 0.25) {
    return {Kind::GaussianVariableDensity, sigma_frac};
  }
};

// Sheared uniform k_y-k_z lattice with a fully-sampled centre block.
struct UndersamplingSpec {
  int r_total = 4;   // nominal acceleration R = r_y * r_z
  int r_y = 2;
  int r_z = 2;
  int shear_step = 1;
  int acs_h = 8;
  int acs_w = 8;

  void validate(int ny, int nz) const;
};

// K disjoint splits (Theta_j, Lambda_j) of the acquired set. Lambda masks
// never contain ACS points; rho is measured against the selectable
// (non-ACS) part of the pattern.
struct PartitionSet {
  std::vector<std::vector<uint8_t>> theta;   // K masks, ny*nz each
  std::vector<std::vector<uint8_t>> lambda;  // K masks
  double rho = 0.0;
  int k = 0;
  uint64_t seed = 0;
};

// Lattice points (y,z) with y % r_y == 0 and
// z % r_z == (shear_step * (y / r_y)) % r_z, unioned with the ACS block.
SamplingPattern gen_sheared_pattern(int ny, int nz, const UndersamplingSpec& spec);

// Acquired points outside the ACS block; the pool Lambda is drawn from.
std::vector<size_t> selectable_indices(const SamplingPattern& pattern);

// Single disjoint split: Lambda drawn without replacement from the
// selectable points (|Lambda| = round(rho * |selectable|), ties away from
// zero), Theta = Omega \ Lambda. Deterministic in the seed.
void split_ssdu(const SamplingPattern& pattern, double rho, const MaskDistribution& dist,
                uint64_t seed, std::vector<uint8_t>& theta_out, std::vector<uint8_t>& lambda_out);

// K independent splits; split j uses derive_seed(seed, j).
PartitionSet gen_multi_mask(const SamplingPattern& pattern, int k, double rho,
                            const MaskDistribution& dist, uint64_t seed);

// Constrained variant: the selectable points are shuffled once and dealt
// into K near-equal bins, so the Lambda_j partition the selectable set and
// the effective rho is 1/K.
PartitionSet gen_cyclic_multi_mask(const SamplingPattern& pattern, int k, uint64_t seed);

// Exact set checks (Theta_j ^ Lambda_j empty, union == Omega, no ACS in
// Lambda); throws DataError on violation.
void validate_partitions(const PartitionSet& parts, const SamplingPattern& pattern);

}  // namespace ssdu
