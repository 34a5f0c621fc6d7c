#pragma once

#include "ssdu/types.hpp"

namespace ssdu {

inline bool is_pow2(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// Orthonormal centred 2-D DFT (fftshift . FFT . ifftshift, scaled by
// 1/sqrt(ny*nz)). Grid dims must be powers of two >= 2; the DC sample sits
// at index (ny/2, nz/2). ifft2_centered is the exact inverse and adjoint.
void fft2_centered_inplace(cplx* a, int ny, int nz);
void ifft2_centered_inplace(cplx* a, int ny, int nz);

ComplexImage fft2_centered(const ComplexImage& img);
ComplexImage ifft2_centered(const ComplexImage& img);

}  // namespace ssdu
