// Iterative radix-2 Cooley-Tukey FFT with cached twiddle tables, plus the
// centred orthonormal 2-D wrappers used by the encoding operator.

#include "ssdu/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "ssdu/errors.hpp"

namespace ssdu {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

struct Plan {
  int n = 0;
  std::vector<cplx> tw;  // tw[k] = exp(-i*tau*k/n), k < n/2
};

const Plan& plan_for(int n) {
  static std::map<int, Plan> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    Plan p;
    p.n = n;
    p.tw.resize(size_t(n) / 2);
    for (int k = 0; k < n / 2; ++k) p.tw[k] = cplx(std::cos(kTau * k / n), -std::sin(kTau * k / n));
    it = cache.emplace(n, std::move(p)).first;
  }
  return it->second;
}

void fft_pow2(cplx* a, int n, bool inverse, const Plan& plan) {
  // bit reversal permutation
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const int half = len >> 1;
    const int step = n / len;
    for (int i = 0; i < n; i += len) {
      const cplx* w = plan.tw.data();
      for (int k = 0; k < half; ++k) {
        cplx tw = w[size_t(k) * step];
        if (inverse) tw = std::conj(tw);
        cplx u = a[i + k];
        cplx v = a[i + k + half] * tw;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

// In-place 2-D fftshift for even dims: swaps diagonally opposite quadrants.
void shift2(cplx* a, int ny, int nz) {
  const int hy = ny / 2;
  const int hz = nz / 2;
  for (int y = 0; y < hy; ++y) {
    cplx* r0 = a + size_t(y) * nz;
    cplx* r1 = a + size_t(y + hy) * nz;
    for (int z = 0; z < nz; ++z) {
      int zz = z < hz ? z + hz : z - hz;
      std::swap(r0[z], r1[zz]);
    }
  }
}

void fft2_inplace(cplx* a, int ny, int nz, bool inverse) {
  if (!is_pow2(ny) || !is_pow2(nz) || ny < 2 || nz < 2)
    throw DimensionError("fft2: dims must be powers of two >= 2");
  const Plan& py = plan_for(ny);
  const Plan& pz = plan_for(nz);
  for (int y = 0; y < ny; ++y) fft_pow2(a + size_t(y) * nz, nz, inverse, pz);
  thread_local std::vector<cplx> col;
  col.resize(ny);
  for (int z = 0; z < nz; ++z) {
    for (int y = 0; y < ny; ++y) col[y] = a[size_t(y) * nz + z];
    fft_pow2(col.data(), ny, inverse, py);
    for (int y = 0; y < ny; ++y) a[size_t(y) * nz + z] = col[y];
  }
}

}  // namespace

void fft2_centered_inplace(cplx* a, int ny, int nz) {
  shift2(a, ny, nz);  // ifftshift == fftshift for even dims
  fft2_inplace(a, ny, nz, false);
  shift2(a, ny, nz);
  const double s = 1.0 / std::sqrt(double(ny) * double(nz));
  const size_t n = size_t(ny) * nz;
  for (size_t i = 0; i < n; ++i) a[i] *= s;
}

void ifft2_centered_inplace(cplx* a, int ny, int nz) {
  shift2(a, ny, nz);
  fft2_inplace(a, ny, nz, true);
  shift2(a, ny, nz);
  const double s = 1.0 / std::sqrt(double(ny) * double(nz));
  const size_t n = size_t(ny) * nz;
  for (size_t i = 0; i < n; ++i) a[i] *= s;
}

ComplexImage fft2_centered(const ComplexImage& img) {
  ComplexImage out = img;
  fft2_centered_inplace(out.data.data(), out.ny, out.nz);
  return out;
}

ComplexImage ifft2_centered(const ComplexImage& img) {
  ComplexImage out = img;
  ifft2_centered_inplace(out.data.data(), out.ny, out.nz);
  return out;
}

}  // namespace ssdu
