#include "dbmid/blur.hpp"

#include <cmath>

#include "dbmid/convolve.hpp"
#include "dbmid/errors.hpp"

namespace dbmid {

const char* to_string(MotionDirection d) {
    return d == MotionDirection::Horizontal ? "horizontal" : "vertical";
}

MotionDirection motion_direction_from_string(const std::string& s) {
    if (s == "horizontal") return MotionDirection::Horizontal;
    if (s == "vertical") return MotionDirection::Vertical;
    throw ArgumentError("unknown motion direction: " + s);
}

double BlurKernel::sum() const {
    double s = 0.0;
    for (double v : m) s += v;
    return s;
}

void BlurKernel::validate() const {
    if (kh < 1 || kw < 1 || kh % 2 == 0 || kw % 2 == 0) {
        throw ArgumentError("kernel dimensions must be odd and positive");
    }
    if (m.size() != size_t(kh) * kw) throw ArgumentError("kernel buffer size mismatch");
    for (double v : m) {
        if (!std::isfinite(v) || v < 0.0) {
            throw ArgumentError("kernel entries must be finite and non-negative");
        }
    }
    if (std::abs(sum() - 1.0) > 1e-9) throw ArgumentError("kernel must sum to 1");
}

BlurKernel identity_kernel() {
    BlurKernel k;
    k.m = {1.0};
    return k;
}

namespace {

void normalize(BlurKernel& k) {
    double s = k.sum();
    if (s <= 0.0) throw NumericError("kernel normalization with non-positive sum");
    for (double& v : k.m) v /= s;
}

}  // namespace

BlurKernel motion_kernel(int length_px, MotionDirection direction) {
    if (length_px < 1) throw ArgumentError("motion length must be >= 1");
    // Even lengths get one zero tap appended so the kernel stays odd-sized;
    // the half-pixel centroid offset is inherent to even-length streaks.
    const int taps = length_px % 2 == 0 ? length_px + 1 : length_px;
    BlurKernel k;
    k.kind = KernelKind::Motion;
    k.length_px = length_px;
    k.direction = direction;
    if (direction == MotionDirection::Horizontal) {
        k.kh = 1;
        k.kw = taps;
    } else {
        k.kh = taps;
        k.kw = 1;
    }
    k.m.assign(size_t(taps), 0.0);
    for (int i = 0; i < length_px; ++i) k.m[size_t(i)] = 1.0 / length_px;
    k.validate();
    return k;
}

BlurKernel defocus_kernel(double radius_px) {
    if (radius_px < 0.0 || !std::isfinite(radius_px)) {
        throw ArgumentError("defocus radius must be finite and >= 0");
    }
    // Sub-pixel disks collapse to a delta under area sampling.
    const int kr = std::max(0, int(std::ceil(radius_px - 0.5 - 1e-12)));
    BlurKernel k;
    k.kind = KernelKind::Defocus;
    k.radius_px = radius_px;
    k.kh = k.kw = 2 * kr + 1;
    k.m.assign(size_t(k.kh) * k.kw, 0.0);
    if (kr == 0) {
        k.m[0] = 1.0;
        k.validate();
        return k;
    }
    const int sub = 16;
    const double r2 = radius_px * radius_px;
    for (int iy = -kr; iy <= kr; ++iy) {
        for (int ix = -kr; ix <= kr; ++ix) {
            int inside = 0;
            for (int sy = 0; sy < sub; ++sy) {
                const double y = iy - 0.5 + (sy + 0.5) / sub;
                for (int sx = 0; sx < sub; ++sx) {
                    const double x = ix - 0.5 + (sx + 0.5) / sub;
                    if (y * y + x * x <= r2) ++inside;
                }
            }
            k.at(iy + kr, ix + kr) = double(inside) / (sub * sub);
        }
    }
    normalize(k);
    k.validate();
    return k;
}

void BlurSpec::validate() const {
    if (noise_sigma < 0.0 || !std::isfinite(noise_sigma)) {
        throw ArgumentError("noise sigma must be finite and >= 0");
    }
    if (defocus_radius_px < 0.0 || !std::isfinite(defocus_radius_px)) {
        throw ArgumentError("defocus radius must be finite and >= 0");
    }
    if (motion_length_px < 0) throw ArgumentError("motion length must be >= 0");
    const bool has_defocus = defocus_radius_px > 0.0;
    const bool has_motion = motion_length_px > 0;
    switch (blur_class) {
        case BlurClass::InFocus:
            if (has_defocus || has_motion)
                throw ArgumentError("in_focus spec must have zero blur parameters");
            break;
        case BlurClass::Defocus:
            if (!has_defocus || has_motion)
                throw ArgumentError("defocus spec needs radius > 0 and no motion");
            break;
        case BlurClass::Motion:
            if (has_defocus || motion_length_px < 2)
                throw ArgumentError("motion spec needs length >= 2 and no defocus");
            break;
        case BlurClass::Mixed:
            if (!has_defocus || motion_length_px < 2)
                throw ArgumentError("mixed spec needs radius > 0 and length >= 2");
            break;
    }
}

Image apply_blur(const Image& sharp, const BlurSpec& spec) {
    sharp.validate();
    spec.validate();
    Image out = sharp;
    if (spec.motion_length_px > 0) {
        out = convolve_raw(out, motion_kernel(spec.motion_length_px, spec.motion_direction),
                           Boundary::Reflect);
    }
    if (spec.defocus_radius_px > 0.0) {
        out = convolve_raw(out, defocus_kernel(spec.defocus_radius_px), Boundary::Reflect);
    }
    if (spec.noise_sigma > 0.0) {
        Rng rng(spec.seed);
        for (float& v : out.data) v += float(rng.gaussian(0.0, spec.noise_sigma));
    }
    clamp01(out);
    return out;
}

double defocus_radius_for_z(double z_um) { return 0.32 * std::abs(z_um); }

FocalStack make_focal_stack(const Image& sharp, const std::vector<double>& z_offsets_um,
                            double noise_sigma, std::uint64_t seed) {
    if (z_offsets_um.empty()) throw ArgumentError("focal stack needs at least one plane");
    FocalStack stack;
    stack.z_offsets_um = z_offsets_um;
    int best = 0;
    for (size_t i = 1; i < z_offsets_um.size(); ++i) {
        if (std::abs(z_offsets_um[i]) < std::abs(z_offsets_um[size_t(best)])) best = int(i);
    }
    stack.in_focus_index = best;
    for (size_t i = 0; i < z_offsets_um.size(); ++i) {
        const double radius = defocus_radius_for_z(z_offsets_um[i]);
        BlurSpec spec;
        spec.blur_class = radius > 0.0 ? BlurClass::Defocus : BlurClass::InFocus;
        spec.defocus_radius_px = radius;
        spec.noise_sigma = noise_sigma;
        spec.seed = Rng::mix(seed, i);
        Image plane = apply_blur(sharp, spec);
        plane.z_offset_um = z_offsets_um[i];
        stack.images.push_back(std::move(plane));
    }
    stack.validate();
    return stack;
}

}  // namespace dbmid
