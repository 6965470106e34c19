#include "dbmid/registration.hpp"

#include <cmath>
#include <complex>

#include "dbmid/errors.hpp"
#include "dbmid/fft.hpp"

namespace dbmid {

namespace {

std::vector<double> centered_luminance(const Image& img) {
    Image lum = luminance(img);
    std::vector<double> out(lum.data.size());
    double mean = 0.0;
    for (float v : lum.data) mean += v;
    mean /= double(out.size());
    double var = 0.0;
    for (size_t i = 0; i < out.size(); ++i) {
        out[i] = lum.data[i] - mean;
        var += out[i] * out[i];
    }
    if (var / double(out.size()) < 1e-12) {
        throw RegistrationError("cannot register a constant image");
    }
    return out;
}

}  // namespace

Shift register_translation(const Image& moving, const Image& reference) {
    if (!moving.same_shape(reference)) {
        throw ArgumentError("registration inputs must share dimensions");
    }
    const int h = moving.h, w = moving.w;
    std::vector<double> mov = centered_luminance(moving);
    std::vector<double> ref = centered_luminance(reference);

    auto fm = fft2_r2c(mov.data(), h, w);
    auto fr = fft2_r2c(ref.data(), h, w);

    // Normalized cross-power spectrum; its inverse transform peaks at the
    // translation offset.
    std::vector<std::complex<double>> cross(fm.size());
    for (size_t i = 0; i < fm.size(); ++i) {
        std::complex<double> c = fm[i] * std::conj(fr[i]);
        double mag = std::abs(c);
        cross[i] = mag > 1e-15 ? c / mag : std::complex<double>(0.0, 0.0);
    }
    std::vector<double> corr(size_t(h) * w);
    ifft2_c2r(cross.data(), h, w, corr.data());

    size_t best = 0;
    for (size_t i = 1; i < corr.size(); ++i)
        if (corr[i] > corr[best]) best = i;
    int py = int(best / size_t(w));
    int px = int(best % size_t(w));
    Shift s;
    s.dy = py >= (h + 1) / 2 ? py - h : py;
    s.dx = px >= (w + 1) / 2 ? px - w : px;
    return s;
}

Image shift_image(const Image& img, int dy, int dx) {
    img.validate();
    Image out = img;
    auto wrap = [](int i, int n) {
        i %= n;
        return i < 0 ? i + n : i;
    };
    for (int c = 0; c < img.c; ++c) {
        const float* src = img.plane(c);
        float* dst = out.plane(c);
        for (int y = 0; y < img.h; ++y) {
            const int sy = wrap(y - dy, img.h);
            for (int x = 0; x < img.w; ++x) {
                dst[size_t(y) * img.w + x] = src[size_t(sy) * img.w + wrap(x - dx, img.w)];
            }
        }
    }
    return out;
}

std::vector<Shift> register_stack(const FocalStack& stack) {
    stack.validate();
    const Image& ref = stack.images[size_t(stack.in_focus_index)];
    std::vector<Shift> shifts(stack.images.size());
    for (size_t i = 0; i < stack.images.size(); ++i) {
        if (int(i) == stack.in_focus_index) continue;
        shifts[i] = register_translation(stack.images[i], ref);
    }
    return shifts;
}

}  // namespace dbmid
