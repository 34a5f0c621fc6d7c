#pragma once

#include <vector>

#include "ssdu/types.hpp"

namespace ssdu {

// ||ref - rec||_2^2 / ||ref||_2^2 over the complex values.
double nmse(const ComplexImage& ref, const ComplexImage& rec);

// Mean local SSIM on magnitude images: 11x11 Gaussian window (sigma 1.5),
// K1 = 0.01, K2 = 0.03, dynamic range = max(ref). Windows are clipped at
// the borders and their weights renormalized.
double ssim(const ComplexImage& ref, const ComplexImage& rec);
double ssim_magnitude(const std::vector<double>& ref, const std::vector<double>& rec, int ny,
                      int nz);

struct Quartiles {
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
};

// Linear-interpolation quantiles at position q*(n-1) over the sorted values.
Quartiles quartiles(std::vector<double> values);
double mean(const std::vector<double>& values);

// Per-slice metrics plus the aggregate spread reported by the harness.
struct MetricReport {
  std::vector<double> nmse_values;
  std::vector<double> ssim_values;
  Quartiles nmse_q;
  Quartiles ssim_q;
  double nmse_mean = 0.0;
  double ssim_mean = 0.0;

  static MetricReport from_slices(std::vector<double> nmse_v, std::vector<double> ssim_v);
};

}  // namespace ssdu
