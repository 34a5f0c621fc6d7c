#include "ssdu/nn_kernels.hpp"

#include <cstring>

namespace ssdu::nn {

namespace {

void fill_padded(const double* x, double* xpad, int c, int h, int w) {
  const int pw = w + 2;
  const int ph = h + 2;
  std::memset(xpad, 0, size_t(c) * ph * pw * sizeof(double));
  for (int ch = 0; ch < c; ++ch) {
    const double* src = x + size_t(ch) * h * w;
    double* dst = xpad + size_t(ch) * ph * pw + pw + 1;
    for (int y = 0; y < h; ++y) std::memcpy(dst + size_t(y) * pw, src + size_t(y) * w, size_t(w) * sizeof(double));
  }
}

}  // namespace

void conv3x3_forward(const double* x, const double* w, const double* bias, double* out,
                     int ci, int co, int h, int wd, double* xpad) {
  fill_padded(x, xpad, ci, h, wd);
  const int pw = wd + 2;
  for (int o = 0; o < co; ++o) {
    double* op = out + size_t(o) * h * wd;
    const double bv = bias ? bias[o] : 0.0;
    for (int i = 0; i < h * wd; ++i) op[i] = bv;
    for (int c = 0; c < ci; ++c) {
      const double* pp = xpad + size_t(c) * (h + 2) * pw;
      const double* wp = w + (size_t(o) * ci + c) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kz = 0; kz < 3; ++kz) {
          const double wv = wp[ky * 3 + kz];
          if (wv == 0.0) continue;
          for (int y = 0; y < h; ++y) {
            const double* __restrict__ in_row = pp + size_t(y + ky) * pw + kz;
            double* __restrict__ out_row = op + size_t(y) * wd;
            for (int z = 0; z < wd; ++z) out_row[z] += wv * in_row[z];
          }
        }
      }
    }
  }
}

void conv3x3_backward_input(const double* w, const double* gout, double* gx, int ci, int co,
                            int h, int wd, double* gpad) {
  fill_padded(gout, gpad, co, h, wd);
  const int pw = wd + 2;
  for (int c = 0; c < ci; ++c) {
    double* gp = gx + size_t(c) * h * wd;
    for (int o = 0; o < co; ++o) {
      const double* pp = gpad + size_t(o) * (h + 2) * pw;
      const double* wp = w + (size_t(o) * ci + c) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kz = 0; kz < 3; ++kz) {
          const double wv = wp[(2 - ky) * 3 + (2 - kz)];  // flipped kernel
          if (wv == 0.0) continue;
          for (int y = 0; y < h; ++y) {
            const double* __restrict__ in_row = pp + size_t(y + ky) * pw + kz;
            double* __restrict__ out_row = gp + size_t(y) * wd;
            for (int z = 0; z < wd; ++z) out_row[z] += wv * in_row[z];
          }
        }
      }
    }
  }
}

void conv3x3_backward_params(const double* xpad, const double* gout, double* gw, double* gb,
                             int ci, int co, int h, int wd) {
  const int pw = wd + 2;
  for (int o = 0; o < co; ++o) {
    const double* gp = gout + size_t(o) * h * wd;
    double acc = 0.0;
    for (int i = 0; i < h * wd; ++i) acc += gp[i];
    gb[o] += acc;
    for (int c = 0; c < ci; ++c) {
      const double* pp = xpad + size_t(c) * (h + 2) * pw;
      double* wp = gw + (size_t(o) * ci + c) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kz = 0; kz < 3; ++kz) {
          double s = 0.0;
          for (int y = 0; y < h; ++y) {
            const double* __restrict__ in_row = pp + size_t(y + ky) * pw + kz;
            const double* __restrict__ g_row = gp + size_t(y) * wd;
            for (int z = 0; z < wd; ++z) s += g_row[z] * in_row[z];
          }
          wp[ky * 3 + kz] += s;
        }
      }
    }
  }
}

}  // namespace ssdu::nn
