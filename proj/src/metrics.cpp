#include "ssdu/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ssdu/errors.hpp"

namespace ssdu {

double nmse(const ComplexImage& ref, const ComplexImage& rec) {
  if (!ref.same_shape(rec)) throw DimensionError("nmse: shape mismatch");
  double num = 0.0;
  double den = 0.0;
  for (size_t i = 0; i < ref.numel(); ++i) {
    num += std::norm(ref.data[i] - rec.data[i]);
    den += std::norm(ref.data[i]);
  }
  if (den == 0.0) throw DataError("nmse: zero reference");
  return num / den;
}

namespace {

constexpr int kWin = 11;
constexpr double kWinSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

const double* gauss_kernel() {
  static const std::array<double, kWin> k = [] {
    std::array<double, kWin> w{};
    const int half = kWin / 2;
    for (int i = 0; i < kWin; ++i) {
      const double d = i - half;
      w[size_t(i)] = std::exp(-d * d / (2.0 * kWinSigma * kWinSigma));
    }
    return w;
  }();
  return k.data();
}

}  // namespace

double ssim_magnitude(const std::vector<double>& ref, const std::vector<double>& rec, int ny,
                      int nz) {
  if (ref.size() != rec.size() || ref.size() != size_t(ny) * nz)
    throw DimensionError("ssim: shape mismatch");
  double range = 0.0;
  for (double v : ref) range = std::max(range, v);
  if (range <= 0.0) throw DataError("ssim: degenerate (constant-zero) reference");
  const double c1 = (kK1 * range) * (kK1 * range);
  const double c2 = (kK2 * range) * (kK2 * range);
  const double* kern = gauss_kernel();
  const int half = kWin / 2;

  double acc = 0.0;
  for (int y = 0; y < ny; ++y) {
    const int y0 = std::max(0, y - half);
    const int y1 = std::min(ny - 1, y + half);
    for (int z = 0; z < nz; ++z) {
      const int z0 = std::max(0, z - half);
      const int z1 = std::min(nz - 1, z + half);
      double wsum = 0, mx = 0, my = 0;
      for (int yy = y0; yy <= y1; ++yy) {
        const double wy = kern[yy - y + half];
        for (int zz = z0; zz <= z1; ++zz) {
          const double w = wy * kern[zz - z + half];
          const size_t idx = size_t(yy) * nz + zz;
          wsum += w;
          mx += w * ref[idx];
          my += w * rec[idx];
        }
      }
      mx /= wsum;
      my /= wsum;
      double vx = 0, vy = 0, cov = 0;
      for (int yy = y0; yy <= y1; ++yy) {
        const double wy = kern[yy - y + half];
        for (int zz = z0; zz <= z1; ++zz) {
          const double w = wy * kern[zz - z + half] / wsum;
          const size_t idx = size_t(yy) * nz + zz;
          const double dx = ref[idx] - mx;
          const double dy = rec[idx] - my;
          vx += w * dx * dx;
          vy += w * dy * dy;
          cov += w * dx * dy;
        }
      }
      const double num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
      const double den = (mx * mx + my * my + c1) * (vx + vy + c2);
      acc += num / den;
    }
  }
  return acc / (double(ny) * nz);
}

double ssim(const ComplexImage& ref, const ComplexImage& rec) {
  if (!ref.same_shape(rec)) throw DimensionError("ssim: shape mismatch");
  std::vector<double> mr(ref.numel()), mc(ref.numel());
  for (size_t i = 0; i < ref.numel(); ++i) {
    mr[i] = std::abs(ref.data[i]);
    mc[i] = std::abs(rec.data[i]);
  }
  return ssim_magnitude(mr, mc, ref.ny, ref.nz);
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw DataError("quartiles: empty input");
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    const double pos = q * double(values.size() - 1);
    const size_t lo = size_t(pos);
    const size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - double(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  return Quartiles{at(0.25), at(0.5), at(0.75)};
}

double mean(const std::vector<double>& values) {
  if (values.empty()) throw DataError("mean: empty input");
  double s = 0;
  for (double v : values) s += v;
  return s / double(values.size());
}

MetricReport MetricReport::from_slices(std::vector<double> nmse_v, std::vector<double> ssim_v) {
  MetricReport r;
  r.nmse_q = quartiles(nmse_v);
  r.ssim_q = quartiles(ssim_v);
  r.nmse_mean = mean(nmse_v);
  r.ssim_mean = mean(ssim_v);
  r.nmse_values = std::move(nmse_v);
  r.ssim_values = std::move(ssim_v);
  return r;
}

}  // namespace ssdu
