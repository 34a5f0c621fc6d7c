#pragma once

#include <cstdint>

#include "ssdu/types.hpp"

namespace ssdu {

// Complex circular Gaussian noise of std `sigma` per k-space sample (so
// sigma/sqrt(2) per real component), applied only on sampled indices.
struct NoiseSpec {
  double sigma = 0.0;
  uint64_t seed = 0;
};

// Piecewise-smooth ellipse phantom with seed-jittered geometry and a smooth
// low-order polynomial phase inside the support. Magnitude lies in [0,1]
// and is exactly zero outside the outer ellipse.
ComplexImage make_phantom(int n, uint64_t variant_seed);

// Smooth Gaussian-lobe sensitivities at equiangular border positions with
// linear phase ramps. ncoils == 1 yields a constant all-ones map (so the
// fully-sampled encoding operator is unitary).
CoilSensitivities simulate_coils(int n, int ncoils);

// y = E x + n on the sampled locations.
KSpaceSample simulate_acquisition(const ComplexImage& img, const CoilSensitivities& coils,
                                  const SamplingPattern& pattern, const NoiseSpec& noise);

}  // namespace ssdu
