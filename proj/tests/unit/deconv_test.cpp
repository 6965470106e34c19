#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "dbmid/blur.hpp"
#include "dbmid/convolve.hpp"
#include "dbmid/deconv.hpp"
#include "dbmid/errors.hpp"
#include "dbmid/image.hpp"
#include "dbmid/metrics.hpp"
#include "dbmid/phantom.hpp"
#include "doctest.h"

using namespace dbmid;

namespace {

// Texture remapped into [0.1, 0.9] so RL's eps guard and the final [0,1]
// clamp never engage and fixed-point arguments stay exact.
Image mid_texture(int h, int w, std::uint64_t seed) {
    Image img = make_texture(h, w, seed);
    for (float& v : img.data) v = 0.1f + 0.8f * v;
    return img;
}

// Single dim gaussian spot; peak 0.8 keeps recovery clear of the clamp.
Image spot_image(int side) {
    Image img(side, side, 1, 0.1f);
    const double c = (side - 1) / 2.0;
    const double sigma = 1.5;
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            const double d2 = (y - c) * (y - c) + (x - c) * (x - c);
            img.at(y, x, 0) += float(0.7 * std::exp(-d2 / (2.0 * sigma * sigma)));
        }
    }
    return img;
}

double plane_sum(const Image& img) {
    double s = 0.0;
    for (float v : img.data) s += v;
    return s;
}

float peak(const Image& img) {
    return *std::max_element(img.data.begin(), img.data.end());
}

// Center of mass offset from the geometric center, in pixels.
double kernel_com_offset(const BlurKernel& k) {
    double sy = 0.0, sx = 0.0, s = 0.0;
    for (int y = 0; y < k.kh; ++y) {
        for (int x = 0; x < k.kw; ++x) {
            sy += k.at(y, x) * y;
            sx += k.at(y, x) * x;
            s += k.at(y, x);
        }
    }
    const double cy = sy / s - (k.kh - 1) / 2.0;
    const double cx = sx / s - (k.kw - 1) / 2.0;
    return std::sqrt(cy * cy + cx * cx);
}

}  // namespace

TEST_SUITE("deconv") {

TEST_CASE("identity kernel is a fixed point of richardson-lucy") {
    const Image img = mid_texture(48, 40, 11);
    DeconvConfig cfg;
    cfg.iterations = 5;
    const Image out = richardson_lucy(img, identity_kernel(), cfg);
    REQUIRE(out.h == img.h);
    REQUIRE(out.w == img.w);
    REQUIRE(out.c == img.c);
    // obs/x is exactly 1.0 wherever x == obs > 0, so every update is a no-op
    // and the result must be bit-identical.
    CHECK(out.data == img.data);
}

TEST_CASE("zero image passes through richardson-lucy untouched") {
    const Image zero(32, 40, 3, 0.0f);
    DeconvConfig cfg;
    cfg.iterations = 10;
    const Image out = richardson_lucy(zero, defocus_kernel(2.0), cfg);
    CHECK(out.h == 32);
    CHECK(out.w == 40);
    CHECK(out.c == 3);
    CHECK(out.data == zero.data);
}

TEST_CASE("non-blind deconvolution recovers a defocused spot") {
    const Image sharp = spot_image(64);
    const BlurKernel k = defocus_kernel(3.0);
    const Image blurred = convolve2d(sharp, k);
    // Averaging over the disk flattens the spot well below its true height.
    CHECK(peak(blurred) < 0.6f);

    DeconvConfig cfg;
    float prev = peak(blurred);
    std::vector<float> peaks;
    for (int iters : {1, 3, 6, 10, 20}) {
        cfg.iterations = iters;
        const Image rec = richardson_lucy(blurred, k, cfg);
        const float p = peak(rec);
        peaks.push_back(p);
        // RL concentrates flux back into the spot; the peak climbs with
        // iteration count.
        CHECK(p >= prev - 1e-6f);
        prev = p;
        for (float v : rec.data) {
            CHECK(v >= 0.0f);
            CHECK(v <= 1.0f);
        }
    }
    CHECK(peaks.back() > peaks.front() + 0.05f);
    CHECK(peaks.back() > 0.6f);

    cfg.iterations = 10;
    const Image rec = richardson_lucy(blurred, k, cfg);
    // Multiplicative updates preserve total flux up to boundary effects.
    const double flux_in = plane_sum(blurred);
    const double flux_out = plane_sum(rec);
    CHECK(std::abs(flux_out - flux_in) <= 0.005 * flux_in);
    CHECK(ssim(rec, sharp) > ssim(blurred, sharp));
}

TEST_CASE("zero-padded kernel takes the transform path and agrees with direct") {
    const Image sharp = mid_texture(56, 48, 3);
    const BlurKernel k7 = defocus_kernel(2.5);
    REQUIRE(k7.kh == 7);
    REQUIRE(k7.kw == 7);

    // Same taps inside a ring of zeros: mathematically the same operator, but
    // the 9x9 extent pushes ConvPlan onto the FFT branch.
    BlurKernel k9;
    k9.kind = KernelKind::Estimated;
    k9.kh = k9.kw = 9;
    k9.m.assign(81, 0.0);
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 7; ++x) k9.at(y + 1, x + 1) = k7.at(y, x);
    k9.validate();

    const Image obs = convolve2d(sharp, k7);
    DeconvConfig cfg;
    cfg.iterations = 8;
    const Image a = richardson_lucy(obs, k7, cfg);
    const Image b = richardson_lucy(obs, k9, cfg);
    REQUIRE(a.data.size() == b.data.size());
    float worst = 0.0f;
    for (size_t i = 0; i < a.data.size(); ++i) {
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    }
    CHECK(worst < 1e-5f);
}

TEST_CASE("blind deconvolution sharpens a defocused slide") {
    const Image sharp = make_texture(96, 96, 21);
    BlurSpec spec;
    spec.blur_class = BlurClass::Defocus;
    spec.defocus_radius_px = 2.0;
    spec.noise_sigma = 0.001;
    spec.seed = 5;
    const Image blurred = apply_blur(sharp, spec);

    DeconvConfig cfg;
    cfg.iterations = 30;
    cfg.kernel_size_guess = 7;
    const auto [rec, kern] = blind_deconvolve(blurred, cfg);

    const double before = ssim(blurred, sharp);
    const double after = ssim(rec, sharp);
    CHECK(after >= before + 0.05);

    CHECK(kern.kh == 7);
    CHECK(kern.kw == 7);
    CHECK(kern.kind == KernelKind::Estimated);
    CHECK(std::abs(kern.sum() - 1.0) <= 1e-9);
    for (double v : kern.m) CHECK(v >= 0.0);
    // Symmetric truth and symmetric init: the estimate must stay centered.
    CHECK(kernel_com_offset(kern) <= 1.0);
}

TEST_CASE("blind deconvolution recovers a horizontal streak") {
    const Image sharp = make_texture(96, 96, 33);
    BlurSpec spec;
    spec.blur_class = BlurClass::Motion;
    spec.motion_length_px = 11;
    spec.motion_direction = MotionDirection::Horizontal;
    spec.noise_sigma = 0.002;
    spec.seed = 9;
    const Image blurred = apply_blur(sharp, spec);

    DeconvConfig cfg;
    cfg.iterations = 30;
    cfg.kernel_size_guess = 13;
    const auto [rec, kern] = blind_deconvolve(blurred, cfg);

    CHECK(ssim(rec, sharp) >= ssim(blurred, sharp) + 0.05);
    CHECK(kernel_com_offset(kern) <= 1.5);

    // A horizontal streak concentrates kernel mass on the middle row.
    std::vector<double> row_mass(13, 0.0);
    for (int y = 0; y < 13; ++y)
        for (int x = 0; x < 13; ++x) row_mass[y] += kern.at(y, x);
    const int best =
        int(std::max_element(row_mass.begin(), row_mass.end()) - row_mass.begin());
    CHECK(best == 6);
}

TEST_CASE("blind deconvolution is gentle on a sharp input") {
    const Image sharp = make_texture(80, 80, 44);
    DeconvConfig cfg;
    cfg.iterations = 30;
    cfg.kernel_size_guess = 7;
    const auto [rec, kern] = blind_deconvolve(sharp, cfg);
    // No blur to undo: the kernel should collapse toward a delta and the
    // image should come back close to what went in.
    CHECK(ssim(rec, sharp) >= 0.8);
    CHECK(kernel_com_offset(kern) <= 1.0);
    double center_mass = kern.at(3, 3);
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 7; ++x) CHECK(kern.at(y, x) <= center_mass + 1e-12);
}

TEST_CASE("flat frames short-circuit blind deconvolution") {
    const Image flat(64, 64, 1, 0.5f);
    DeconvConfig cfg;
    cfg.kernel_size_guess = 5;

    SUBCASE("uniform init") {
        const auto [img, kern] = blind_deconvolve(flat, cfg);
        CHECK(img.data == flat.data);
        REQUIRE(kern.m.size() == 25);
        for (double v : kern.m) CHECK(v == 1.0 / 25.0);
    }
    SUBCASE("gaussian init") {
        cfg.initial_kernel = InitialKernel::Gaussian;
        const auto [img, kern] = blind_deconvolve(flat, cfg);
        CHECK(img.data == flat.data);
        CHECK(std::abs(kern.sum() - 1.0) <= 1e-12);
        // Centered and symmetric.
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 5; ++x) CHECK(kern.at(y, x) <= kern.at(2, 2));
        CHECK(kern.at(1, 2) == kern.at(3, 2));
        CHECK(kern.at(2, 1) == kern.at(2, 3));
    }
}

TEST_CASE("deconv configuration is validated") {
    const Image img = mid_texture(64, 64, 1);
    DeconvConfig cfg;

    SUBCASE("iterations must be positive") {
        cfg.iterations = 0;
        CHECK_THROWS_AS(richardson_lucy(img, identity_kernel(), cfg), ConfigError);
    }
    SUBCASE("kernel guess must be odd") {
        cfg.kernel_size_guess = 4;
        CHECK_THROWS_AS(blind_deconvolve(img, cfg), ConfigError);
    }
    SUBCASE("kernel guess must be at least 3") {
        cfg.kernel_size_guess = 1;
        CHECK_THROWS_AS(blind_deconvolve(img, cfg), ConfigError);
    }
    SUBCASE("image must be twice the kernel guess") {
        const Image small = mid_texture(20, 64, 2);
        cfg.kernel_size_guess = 15;
        CHECK_THROWS_AS(blind_deconvolve(small, cfg), ArgumentError);
    }
    SUBCASE("kernel invariants are enforced") {
        BlurKernel bad;
        bad.kh = bad.kw = 3;
        bad.m.assign(9, 0.1);  // sums to 0.9
        CHECK_THROWS_AS(richardson_lucy(img, bad, cfg), ArgumentError);
    }
}

}  // TEST_SUITE
