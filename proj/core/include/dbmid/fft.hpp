#pragma once

#include <complex>
#include <vector>

namespace dbmid {

// Thin wrappers over FFTW's double-precision r2c/c2r transforms. Plans are
// cached per (h, w) behind a mutex; buffers are FFTW-allocated internally so
// callers can pass plain vectors.

// Forward 2-D real-to-complex FFT. Returns h x (w/2 + 1) bins, row-major.
std::vector<std::complex<double>> fft2_r2c(const double* in, int h, int w);

// Inverse complex-to-real FFT, normalized by 1/(h*w). `out` holds h*w doubles.
void ifft2_c2r(const std::complex<double>* in, int h, int w, double* out);

inline int spectrum_width(int w) { return w / 2 + 1; }

}  // namespace dbmid
