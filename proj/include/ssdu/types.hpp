#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "ssdu/errors.hpp"

namespace ssdu {

using cplx = std::complex<double>;

// Complex image on an ny x nz grid, row-major (y outer, z inner).
struct ComplexImage {
  int ny = 0;
  int nz = 0;
  std::vector<cplx> data;

  ComplexImage() = default;
  ComplexImage(int ny_, int nz_) : ny(ny_), nz(nz_), data(size_t(ny_) * nz_) {
    if (ny < 2 || nz < 2) throw DimensionError("ComplexImage: dims must be >= 2");
  }

  size_t numel() const { return data.size(); }
  cplx& at(int y, int z) { return data[size_t(y) * nz + z]; }
  const cplx& at(int y, int z) const { return data[size_t(y) * nz + z]; }

  bool same_shape(const ComplexImage& o) const { return ny == o.ny && nz == o.nz; }
};

// Acquisition sampling locations plus the fully-sampled calibration block.
// The ACS rectangle (acs_h x acs_w) is anchored at the matrix centre,
// consistent with the centred FFT convention (DC at index n/2).
struct SamplingPattern {
  int ny = 0;
  int nz = 0;
  std::vector<uint8_t> mask;  // 0/1, row-major
  int acs_h = 0;
  int acs_w = 0;

  SamplingPattern() = default;
  SamplingPattern(int ny_, int nz_, int acs_h_ = 0, int acs_w_ = 0)
      : ny(ny_), nz(nz_), mask(size_t(ny_) * nz_, 0), acs_h(acs_h_), acs_w(acs_w_) {}

  uint8_t& at(int y, int z) { return mask[size_t(y) * nz + z]; }
  uint8_t at(int y, int z) const { return mask[size_t(y) * nz + z]; }

  int acs_y0() const { return ny / 2 - acs_h / 2; }
  int acs_z0() const { return nz / 2 - acs_w / 2; }
  bool in_acs(int y, int z) const {
    return acs_h > 0 && acs_w > 0 && y >= acs_y0() && y < acs_y0() + acs_h && z >= acs_z0() &&
           z < acs_z0() + acs_w;
  }

  size_t count() const {
    size_t c = 0;
    for (uint8_t m : mask) c += m != 0;
    return c;
  }
  // Effective acceleration |grid| / |Omega|.
  double acceleration() const {
    size_t c = count();
    if (c == 0) throw DataError("SamplingPattern: empty pattern");
    return double(size_t(ny) * nz) / double(c);
  }

  void validate() const {
    if (ny < 1 || nz < 1 || mask.size() != size_t(ny) * nz)
      throw DimensionError("SamplingPattern: bad dims");
    if (count() == 0) throw DataError("SamplingPattern: at least one sampled point required");
    for (int y = 0; y < ny; ++y)
      for (int z = 0; z < nz; ++z)
        if (in_acs(y, z) && !at(y, z))
          throw DataError("SamplingPattern: ACS point not sampled");
  }
};

// Per-coil complex sensitivity maps, (ncoils, ny, nz) row-major.
struct CoilSensitivities {
  int ncoils = 0;
  int ny = 0;
  int nz = 0;
  std::vector<cplx> maps;

  CoilSensitivities() = default;
  CoilSensitivities(int nc, int ny_, int nz_)
      : ncoils(nc), ny(ny_), nz(nz_), maps(size_t(nc) * ny_ * nz_) {
    if (nc < 1) throw DimensionError("CoilSensitivities: ncoils must be >= 1");
  }

  cplx* coil(int c) { return maps.data() + size_t(c) * ny * nz; }
  const cplx* coil(int c) const { return maps.data() + size_t(c) * ny * nz; }
};

// Acquired multi-coil k-space on a sampling pattern. Entries outside the
// pattern are exact zeros. `scale` records the normalization factor applied
// at preprocessing (1 when untouched).
struct KSpaceSample {
  int ncoils = 0;
  SamplingPattern pattern;
  std::vector<cplx> data;  // (ncoils, ny, nz)
  double scale = 1.0;

  KSpaceSample() = default;
  KSpaceSample(int nc, SamplingPattern pat)
      : ncoils(nc), pattern(std::move(pat)),
        data(size_t(nc) * pattern.ny * pattern.nz) {
    if (nc < 1) throw DimensionError("KSpaceSample: ncoils must be >= 1");
  }

  int ny() const { return pattern.ny; }
  int nz() const { return pattern.nz; }
  cplx* coil(int c) { return data.data() + size_t(c) * ny() * nz(); }
  const cplx* coil(int c) const { return data.data() + size_t(c) * ny() * nz(); }

  // Zero at every index not in the pattern, exactly.
  void enforce_pattern() {
    const size_t plane = size_t(ny()) * nz();
    for (int c = 0; c < ncoils; ++c)
      for (size_t i = 0; i < plane; ++i)
        if (!pattern.mask[i]) data[size_t(c) * plane + i] = cplx(0.0, 0.0);
  }

  bool respects_pattern() const {
    const size_t plane = size_t(ny()) * nz();
    for (int c = 0; c < ncoils; ++c)
      for (size_t i = 0; i < plane; ++i)
        if (!pattern.mask[i] && data[size_t(c) * plane + i] != cplx(0.0, 0.0)) return false;
    return true;
  }
};

inline double norm2sq(const std::vector<cplx>& v) {
  double s = 0;
  for (const cplx& x : v) s += std::norm(x);
  return s;
}

inline double norm2(const std::vector<cplx>& v) { return std::sqrt(norm2sq(v)); }

// <a, b> with conjugation on the first argument.
inline cplx cdot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s(0, 0);
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline bool all_finite(const std::vector<cplx>& v) {
  for (const cplx& x : v)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  return true;
}

}  // namespace ssdu
