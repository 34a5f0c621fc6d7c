#pragma once

#include "ssdu/types.hpp"

namespace ssdu {

// Multi-coil SENSE encoding: per coil c, y_c = mask .* F(map_c .* x) with F
// the centred orthonormal 2-D DFT. Entries outside the pattern are exact
// zeros.
KSpaceSample apply_encoding(const ComplexImage& x, const CoilSensitivities& coils,
                            const SamplingPattern& pattern);

// Adjoint of apply_encoding: sum_c conj(map_c) .* Finv(mask .* y_c).
ComplexImage apply_adjoint(const KSpaceSample& y, const CoilSensitivities& coils);

// Zero-filled reconstruction, the unrolled network's initial image.
ComplexImage zero_filled_recon(const KSpaceSample& y, const CoilSensitivities& coils);

// E^H E x with an optional Tikhonov/penalty shift: (E^H E + mu I) x.
// Shared by the CG data-consistency unit and the CG-SENSE baseline.
ComplexImage normal_op(const ComplexImage& x, const CoilSensitivities& coils,
                       const SamplingPattern& pattern, double mu);

void check_shapes(const ComplexImage& x, const CoilSensitivities& coils,
                  const SamplingPattern& pattern);

}  // namespace ssdu
