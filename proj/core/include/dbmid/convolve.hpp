#pragma once

#include "dbmid/blur_kernel.hpp"
#include "dbmid/image.hpp"

namespace dbmid {

enum class Boundary { Reflect, Zero };

// Mirror an index into [0, n): …2 1 0 | 0 1 2 … | n-1 n-1 n-2…
inline int reflect_index(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

// Convolves one plane with an arbitrary kernel, no clamping. `out` must hold
// h*w floats and must not alias `in`. Reflect boundary mirrors across the
// edge sample (…2 1 0 | 0 1 2…).
void convolve_plane(const float* in, int h, int w, const double* kernel, int kh,
                    int kw, Boundary boundary, float* out);

// Same as convolve2d but without the [0,1] clamp. Used where linearity of the
// operator matters (tests, residual analysis).
Image convolve_raw(const Image& img, const BlurKernel& kernel, Boundary boundary);

// Channel-wise 2-D convolution with a validated blur kernel; output clamped
// to [0,1]. Kernel must fit inside the image.
Image convolve2d(const Image& img, const BlurKernel& kernel,
                 Boundary boundary = Boundary::Reflect);

}  // namespace dbmid
