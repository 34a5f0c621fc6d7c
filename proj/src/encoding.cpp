#include "ssdu/encoding.hpp"

#include <vector>

#include "ssdu/errors.hpp"
#include "ssdu/fft.hpp"

namespace ssdu {

void check_shapes(const ComplexImage& x, const CoilSensitivities& coils,
                  const SamplingPattern& pattern) {
  if (x.ny != coils.ny || x.nz != coils.nz || x.ny != pattern.ny || x.nz != pattern.nz)
    throw DimensionError("encoding: image/coils/pattern shape mismatch");
}

KSpaceSample apply_encoding(const ComplexImage& x, const CoilSensitivities& coils,
                            const SamplingPattern& pattern) {
  check_shapes(x, coils, pattern);
  KSpaceSample y(coils.ncoils, pattern);
  const size_t plane = x.numel();
  for (int c = 0; c < coils.ncoils; ++c) {
    cplx* yc = y.coil(c);
    const cplx* map = coils.coil(c);
    for (size_t i = 0; i < plane; ++i) yc[i] = map[i] * x.data[i];
    fft2_centered_inplace(yc, x.ny, x.nz);
    for (size_t i = 0; i < plane; ++i)
      if (!pattern.mask[i]) yc[i] = cplx(0.0, 0.0);
  }
  return y;
}

ComplexImage apply_adjoint(const KSpaceSample& y, const CoilSensitivities& coils) {
  if (y.ncoils != coils.ncoils || y.ny() != coils.ny || y.nz() != coils.nz)
    throw DimensionError("apply_adjoint: kspace/coils shape mismatch");
  ComplexImage out(y.ny(), y.nz());
  const size_t plane = out.numel();
  std::vector<cplx> tmp(plane);
  for (int c = 0; c < y.ncoils; ++c) {
    const cplx* yc = y.coil(c);
    const cplx* map = coils.coil(c);
    for (size_t i = 0; i < plane; ++i) tmp[i] = y.pattern.mask[i] ? yc[i] : cplx(0.0, 0.0);
    ifft2_centered_inplace(tmp.data(), out.ny, out.nz);
    for (size_t i = 0; i < plane; ++i) out.data[i] += std::conj(map[i]) * tmp[i];
  }
  return out;
}

ComplexImage zero_filled_recon(const KSpaceSample& y, const CoilSensitivities& coils) {
  return apply_adjoint(y, coils);
}

ComplexImage normal_op(const ComplexImage& x, const CoilSensitivities& coils,
                       const SamplingPattern& pattern, double mu) {
  check_shapes(x, coils, pattern);
  ComplexImage out(x.ny, x.nz);
  const size_t plane = x.numel();
  std::vector<cplx> tmp(plane);
  for (int c = 0; c < coils.ncoils; ++c) {
    const cplx* map = coils.coil(c);
    for (size_t i = 0; i < plane; ++i) tmp[i] = map[i] * x.data[i];
    fft2_centered_inplace(tmp.data(), x.ny, x.nz);
    for (size_t i = 0; i < plane; ++i)
      if (!pattern.mask[i]) tmp[i] = cplx(0.0, 0.0);
    ifft2_centered_inplace(tmp.data(), x.ny, x.nz);
    for (size_t i = 0; i < plane; ++i) out.data[i] += std::conj(map[i]) * tmp[i];
  }
  if (mu != 0.0)
    for (size_t i = 0; i < plane; ++i) out.data[i] += mu * x.data[i];
  return out;
}

}  // namespace ssdu
