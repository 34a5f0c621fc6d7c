#pragma once

// Independent dense oracles used by the test suites. Everything here is
// built straight from definitions (explicit DFT sums, dense matrices,
// partial-pivot LU) and never calls the FFT/operator code paths it checks.

#include <cmath>
#include <complex>
#include <vector>

#include "ssdu/rng.hpp"
#include "ssdu/types.hpp"

namespace testutil {

using ssdu::cplx;
using ssdu::ComplexImage;
using ssdu::CoilSensitivities;
using ssdu::KSpaceSample;
using ssdu::SamplingPattern;

inline cplx dft_entry(int n, int k, int i) {
  const double c = n / 2.0;
  const double angle = -2.0 * M_PI * (k - c) * (i - c) / double(n);
  return cplx(std::cos(angle), std::sin(angle)) / std::sqrt(double(n));
}

// O(n^4) centred orthonormal DFT straight from the definition.
inline ComplexImage naive_fft2c(const ComplexImage& x) {
  ComplexImage out(x.ny, x.nz);
  for (int ky = 0; ky < x.ny; ++ky)
    for (int kz = 0; kz < x.nz; ++kz) {
      cplx acc(0, 0);
      for (int py = 0; py < x.ny; ++py)
        for (int pz = 0; pz < x.nz; ++pz)
          acc += dft_entry(x.ny, ky, py) * dft_entry(x.nz, kz, pz) * x.at(py, pz);
      out.at(ky, kz) = acc;
    }
  return out;
}

// Dense multi-coil encoding matrix, rows indexed (coil, ky, kz), columns
// (py, pz); rows outside the pattern are zero.
inline std::vector<std::vector<cplx>> dense_encoding_matrix(const CoilSensitivities& coils,
                                                            const SamplingPattern& pattern) {
  const int ny = pattern.ny;
  const int nz = pattern.nz;
  const size_t plane = size_t(ny) * nz;
  std::vector<std::vector<cplx>> e(size_t(coils.ncoils) * plane,
                                   std::vector<cplx>(plane, cplx(0, 0)));
  for (int c = 0; c < coils.ncoils; ++c)
    for (int ky = 0; ky < ny; ++ky)
      for (int kz = 0; kz < nz; ++kz) {
        if (!pattern.at(ky, kz)) continue;
        auto& row = e[size_t(c) * plane + size_t(ky) * nz + kz];
        for (int py = 0; py < ny; ++py)
          for (int pz = 0; pz < nz; ++pz)
            row[size_t(py) * nz + pz] = dft_entry(ny, ky, py) * dft_entry(nz, kz, pz) *
                                        coils.coil(c)[size_t(py) * nz + pz];
      }
  return e;
}

inline std::vector<cplx> mat_vec(const std::vector<std::vector<cplx>>& m,
                                 const std::vector<cplx>& v) {
  std::vector<cplx> out(m.size(), cplx(0, 0));
  for (size_t r = 0; r < m.size(); ++r)
    for (size_t c = 0; c < v.size(); ++c) out[r] += m[r][c] * v[c];
  return out;
}

inline std::vector<cplx> mat_vec_adj(const std::vector<std::vector<cplx>>& m,
                                     const std::vector<cplx>& v) {
  std::vector<cplx> out(m.empty() ? 0 : m[0].size(), cplx(0, 0));
  for (size_t r = 0; r < m.size(); ++r)
    for (size_t c = 0; c < out.size(); ++c) out[c] += std::conj(m[r][c]) * v[r];
  return out;
}

// Partial-pivot LU solve for small dense complex systems.
inline std::vector<cplx> lu_solve(std::vector<std::vector<cplx>> a, std::vector<cplx> b) {
  const size_t n = a.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (size_t r = col + 1; r < n; ++r) {
      const cplx f = a[r][col] / a[col][col];
      for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<cplx> x(n);
  for (size_t ri = n; ri-- > 0;) {
    cplx acc = b[ri];
    for (size_t c = ri + 1; c < n; ++c) acc -= a[ri][c] * x[c];
    x[ri] = acc / a[ri][ri];
  }
  return x;
}

inline ComplexImage random_image(int ny, int nz, uint64_t seed) {
  ssdu::CounterRng rng(seed);
  ComplexImage img(ny, nz);
  for (auto& v : img.data) v = cplx(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
  return img;
}

inline CoilSensitivities random_coils(int ncoils, int ny, int nz, uint64_t seed) {
  ssdu::CounterRng rng(seed);
  CoilSensitivities coils(ncoils, ny, nz);
  for (auto& v : coils.maps) v = cplx(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
  return coils;
}

inline double rel_err(const std::vector<cplx>& got, const std::vector<cplx>& want) {
  double num = 0, den = 0;
  for (size_t i = 0; i < got.size(); ++i) {
    num += std::norm(got[i] - want[i]);
    den += std::norm(want[i]);
  }
  return den == 0 ? std::sqrt(num) : std::sqrt(num / den);
}

}  // namespace testutil
