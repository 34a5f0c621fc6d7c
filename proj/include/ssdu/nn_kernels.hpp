#pragma once

#include <cstddef>

namespace ssdu::nn {

// 3x3 same-convolution kernels on (C,H,W) row-major buffers with zero
// padding. One implementation shared by the autodiff node and the plain
// inference path so both produce bit-identical values.

inline size_t padded_size(int ci, int h, int w) {
  return size_t(ci) * (h + 2) * (w + 2);
}

// Fills xpad ((ci)(h+2)(w+2), zero border) then computes
// out[co,y,z] = b[co] + sum_{ci,ky,kz} w[co,ci,ky,kz] * xpad[ci,y+ky,z+kz].
void conv3x3_forward(const double* x, const double* w, const double* bias, double* out,
                     int ci, int co, int h, int wd, double* xpad);

// gx += correlation of gout with the flipped kernel (gpad is scratch of
// size padded_size(co,h,wd), overwritten).
void conv3x3_backward_input(const double* w, const double* gout, double* gx, int ci, int co,
                            int h, int wd, double* gpad);

// gw[co,ci,ky,kz] += sum_{y,z} gout[co,y,z] * xpad[ci,y+ky,z+kz];
// gb[co] += sum gout[co].
void conv3x3_backward_params(const double* xpad, const double* gout, double* gw, double* gb,
                             int ci, int co, int h, int wd);

}  // namespace ssdu::nn
