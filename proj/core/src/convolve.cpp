#include "dbmid/convolve.hpp"

#include <cmath>

#include "dbmid/errors.hpp"

namespace dbmid {

void convolve_plane(const float* in, int h, int w, const double* kernel, int kh,
                    int kw, Boundary boundary, float* out) {
    const int ry = kh / 2;
    const int rx = kw / 2;
    for (int y = 0; y < h; ++y) {
        const bool y_interior = (y >= ry && y + ry < h);
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            if (y_interior && x >= rx && x + rx < w) {
                const float* base = in + size_t(y - ry) * w + (x - rx);
                const double* kp = kernel;
                for (int ky = 0; ky < kh; ++ky) {
                    const float* row = base + size_t(ky) * w;
                    for (int kx = 0; kx < kw; ++kx) acc += kp[kx] * row[kx];
                    kp += kw;
                }
            } else {
                for (int ky = 0; ky < kh; ++ky) {
                    int iy = y + ky - ry;
                    if (boundary == Boundary::Reflect) {
                        iy = reflect_index(iy, h);
                    } else if (iy < 0 || iy >= h) {
                        continue;
                    }
                    const float* row = in + size_t(iy) * w;
                    const double* kp = kernel + size_t(ky) * kw;
                    for (int kx = 0; kx < kw; ++kx) {
                        int ix = x + kx - rx;
                        if (boundary == Boundary::Reflect) {
                            ix = reflect_index(ix, w);
                        } else if (ix < 0 || ix >= w) {
                            continue;
                        }
                        acc += kp[kx] * row[ix];
                    }
                }
            }
            out[size_t(y) * w + x] = float(acc);
        }
    }
}

namespace {

Image convolve_impl(const Image& img, const BlurKernel& kernel, Boundary boundary,
                    bool clamp) {
    img.validate();
    kernel.validate();
    if (kernel.kh > img.h || kernel.kw > img.w) {
        throw ArgumentError("kernel (" + std::to_string(kernel.kh) + "x" +
                            std::to_string(kernel.kw) + ") larger than image (" +
                            std::to_string(img.h) + "x" + std::to_string(img.w) + ")");
    }
    Image out = img;
    for (int c = 0; c < img.c; ++c) {
        convolve_plane(img.plane(c), img.h, img.w, kernel.m.data(), kernel.kh,
                       kernel.kw, boundary, out.plane(c));
    }
    if (clamp) clamp01(out);
    return out;
}

}  // namespace

Image convolve_raw(const Image& img, const BlurKernel& kernel, Boundary boundary) {
    return convolve_impl(img, kernel, boundary, false);
}

Image convolve2d(const Image& img, const BlurKernel& kernel, Boundary boundary) {
    return convolve_impl(img, kernel, boundary, true);
}

}  // namespace dbmid
