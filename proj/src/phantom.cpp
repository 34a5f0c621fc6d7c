#include "ssdu/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "ssdu/encoding.hpp"
#include "ssdu/errors.hpp"
#include "ssdu/fft.hpp"
#include "ssdu/rng.hpp"

namespace ssdu {

namespace {

struct Ellipse {
  double value;    // additive intensity
  double ax, ay;   // half-axes in [-1,1] coords
  double cx, cy;   // centre
  double phi;      // rotation, radians
};

// Modified Shepp-Logan table (Kak & Slaney intensities rescaled for
// contrast; same geometry as the classic head phantom).
constexpr Ellipse kBase[] = {
    {1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
    {-0.80, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
    {-0.20, 0.1100, 0.3100, 0.22, 0.0000, -0.3142},
    {-0.20, 0.1600, 0.4100, -0.22, 0.0000, 0.3142},
    {0.10, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
    {0.10, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
    {0.10, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
    {0.10, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
    {0.10, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
    {0.10, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
};

bool inside(const Ellipse& e, double x, double y) {
  const double dx = x - e.cx;
  const double dy = y - e.cy;
  const double c = std::cos(e.phi);
  const double s = std::sin(e.phi);
  const double u = (c * dx + s * dy) / e.ax;
  const double v = (-s * dx + c * dy) / e.ay;
  return u * u + v * v <= 1.0;
}

}  // namespace

ComplexImage make_phantom(int n, uint64_t variant_seed) {
  if (n < 16 || !is_pow2(n)) throw ConfigError("make_phantom: n must be a power of two >= 16");

  CounterRng rng(derive_seed(variant_seed, 0x9A170));
  Ellipse ell[10];
  for (int i = 0; i < 10; ++i) {
    ell[i] = kBase[i];
    if (i > 0) {
      ell[i].cx += 0.04 * (2.0 * rng.uniform() - 1.0);
      ell[i].cy += 0.04 * (2.0 * rng.uniform() - 1.0);
      ell[i].ax *= 1.0 + 0.08 * (2.0 * rng.uniform() - 1.0);
      ell[i].ay *= 1.0 + 0.08 * (2.0 * rng.uniform() - 1.0);
      ell[i].phi += 0.10 * (2.0 * rng.uniform() - 1.0);
      ell[i].value *= 1.0 + 0.15 * (2.0 * rng.uniform() - 1.0);
    }
  }
  // smooth phase: low-order polynomial, coefficients jittered per seed
  double ph[6];
  for (double& c : ph) c = 0.6 * (2.0 * rng.uniform() - 1.0);

  ComplexImage img(n, n);
  const double half = n / 2.0;
  for (int iy = 0; iy < n; ++iy) {
    const double y = (iy - half) / half;
    for (int iz = 0; iz < n; ++iz) {
      const double x = (iz - half) / half;
      if (!inside(ell[0], x, y)) continue;  // support of the outer ellipse
      double mag = 0.0;
      for (const Ellipse& e : ell)
        if (inside(e, x, y)) mag += e.value;
      // the guard band keeps |value| <= 1 after the phasor product rounds
      mag = std::clamp(mag, 0.0, 1.0 - 1e-12);
      const double phase =
          ph[0] + ph[1] * x + ph[2] * y + ph[3] * x * x + ph[4] * x * y + ph[5] * y * y;
      img.at(iy, iz) = mag * cplx(std::cos(phase), std::sin(phase));
    }
  }
  return img;
}

CoilSensitivities simulate_coils(int n, int ncoils) {
  if (ncoils < 1) throw ConfigError("simulate_coils: ncoils must be >= 1");
  CoilSensitivities coils(ncoils, n, n);
  if (ncoils == 1) {
    for (auto& m : coils.maps) m = cplx(1.0, 0.0);
    return coils;
  }
  const double half = n / 2.0;
  const double radius = 1.15;  // lobe centres just outside the FOV
  const double sigma = 1.0;
  const double ramp = 1.2;
  for (int c = 0; c < ncoils; ++c) {
    const double theta = 2.0 * M_PI * c / ncoils + M_PI / ncoils;
    const double qx = radius * std::cos(theta);
    const double qy = radius * std::sin(theta);
    cplx* map = coils.coil(c);
    for (int iy = 0; iy < n; ++iy) {
      const double y = (iy - half) / half;
      for (int iz = 0; iz < n; ++iz) {
        const double x = (iz - half) / half;
        const double d2 = (x - qx) * (x - qx) + (y - qy) * (y - qy);
        const double mag = std::exp(-d2 / (2.0 * sigma * sigma));
        const double phase = ramp * (std::cos(theta) * x + std::sin(theta) * y) + theta;
        map[size_t(iy) * n + iz] = mag * cplx(std::cos(phase), std::sin(phase));
      }
    }
  }
  return coils;
}

KSpaceSample simulate_acquisition(const ComplexImage& img, const CoilSensitivities& coils,
                                  const SamplingPattern& pattern, const NoiseSpec& noise) {
  if (noise.sigma < 0) throw ConfigError("simulate_acquisition: sigma must be >= 0");
  KSpaceSample y = apply_encoding(img, coils, pattern);
  if (noise.sigma > 0) {
    CounterRng rng(derive_seed(noise.seed, 0x5E01));
    const double comp = noise.sigma / std::sqrt(2.0);
    const size_t plane = size_t(pattern.ny) * pattern.nz;
    for (int c = 0; c < y.ncoils; ++c) {
      cplx* yc = y.coil(c);
      for (size_t i = 0; i < plane; ++i) {
        if (!pattern.mask[i]) continue;
        yc[i] += cplx(comp * rng.gaussian(), comp * rng.gaussian());
      }
    }
  }
  return y;
}

}  // namespace ssdu
