#include <doctest.h>

#include <cmath>

#include "dbmid/blur.hpp"
#include "dbmid/convolve.hpp"
#include "dbmid/errors.hpp"
#include "helpers.hpp"

using namespace dbmid;

TEST_SUITE_BEGIN("convolve");

TEST_CASE("reflect_index folds like a half-sample mirror") {
    // ... 2 1 0 | 0 1 2 3 | 3 2 1 ...
    CHECK(reflect_index(0, 4) == 0);
    CHECK(reflect_index(-1, 4) == 0);
    CHECK(reflect_index(-2, 4) == 1);
    CHECK(reflect_index(3, 4) == 3);
    CHECK(reflect_index(4, 4) == 3);
    CHECK(reflect_index(5, 4) == 2);
    CHECK(reflect_index(-9, 4) == 0);  // multiple folds
    CHECK(reflect_index(7, 1) == 0);
}

TEST_CASE("1x1 identity kernel is bitwise identity") {
    const Image img = testutil::random_image(16, 16, 3, 21);
    const Image out = convolve2d(img, identity_kernel());
    CHECK(out.data == img.data);
}

TEST_CASE("constant image stays constant under any normalized kernel") {
    Image img(16, 16, 1, 0.7f);
    for (const auto& k : {defocus_kernel(2.5), motion_kernel(7, MotionDirection::Vertical)}) {
        const Image out = convolve2d(img, k, Boundary::Reflect);
        for (float v : out.data) CHECK(v == doctest::Approx(0.7).epsilon(1e-6));
    }
}

TEST_CASE("impulse response reproduces the kernel matrix") {
    Image img(33, 33, 1, 0.0f);
    img.at(16, 16) = 1.0f;
    const BlurKernel k = defocus_kernel(2.0);
    REQUIRE(k.kh == 5);
    REQUIRE(k.kw == 5);
    const Image out = convolve_raw(img, k, Boundary::Zero);
    const int ry = k.kh / 2, rx = k.kw / 2;
    for (int dy = -ry; dy <= ry; ++dy)
        for (int dx = -rx; dx <= rx; ++dx)
            // A disk is symmetric under 180-degree flips, so correlation and
            // convolution agree here.
            CHECK(out.at(16 + dy, 16 + dx) ==
                  doctest::Approx(k.at(ry + dy, rx + dx)).epsilon(1e-7));
    // Outside the kernel footprint everything stays zero.
    CHECK(out.at(0, 0) == 0.0f);
    CHECK(out.at(16, 16 + rx + 1) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("convolution is linear before clamping") {
    const Image x = testutil::random_image(24, 24, 1, 31);
    const Image y = testutil::random_image(24, 24, 1, 32);
    const BlurKernel k = defocus_kernel(1.5);
    const double a = 0.6, b = 0.3;

    Image mix(24, 24, 1);
    for (size_t i = 0; i < mix.data.size(); ++i)
        mix.data[i] = float(a * x.data[i] + b * y.data[i]);

    const Image lhs = convolve_raw(mix, k, Boundary::Reflect);
    const Image cx = convolve_raw(x, k, Boundary::Reflect);
    const Image cy = convolve_raw(y, k, Boundary::Reflect);
    for (size_t i = 0; i < lhs.data.size(); ++i)
        CHECK(lhs.data[i] ==
              doctest::Approx(a * cx.data[i] + b * cy.data[i]).epsilon(1e-6));
}

TEST_CASE("normalized kernels commute away from boundaries") {
    const Image img = testutil::textured_image(48, 48, 1, 41);
    const BlurKernel k1 = defocus_kernel(2.0);
    const BlurKernel k2 = motion_kernel(5, MotionDirection::Horizontal);

    const Image ab = convolve_raw(convolve_raw(img, k1, Boundary::Reflect), k2,
                                  Boundary::Reflect);
    const Image ba = convolve_raw(convolve_raw(img, k2, Boundary::Reflect), k1,
                                  Boundary::Reflect);

    const int margin = (std::max(k1.kh, k1.kw) + std::max(k2.kh, k2.kw)) / 2;
    for (int y = margin; y < 48 - margin; ++y)
        for (int x = margin; x < 48 - margin; ++x)
            CHECK(ab.at(y, x) == doctest::Approx(ba.at(y, x)).epsilon(1e-5));
}

TEST_CASE("kernel larger than the image is rejected") {
    const Image img = testutil::random_image(16, 16, 1, 51);
    CHECK_THROWS_AS(convolve2d(img, motion_kernel(17, MotionDirection::Horizontal)),
                    ArgumentError);
}

TEST_CASE("convolve2d clamps, convolve_raw does not") {
    // A bright spike next to the reflect boundary can push values past 1 only
    // in the raw variant's intermediate math if the input itself exceeds 1.
    Image img(16, 16, 1, 0.0f);
    img.at(8, 8) = 2.0f;  // deliberately out of range
    const BlurKernel k = identity_kernel();
    CHECK(convolve_raw(img, k, Boundary::Reflect).at(8, 8) == 2.0f);
    CHECK(convolve2d(img, k, Boundary::Reflect).at(8, 8) == 1.0f);
}

TEST_CASE("zero boundary darkens edges, reflect preserves them") {
    Image img(16, 16, 1, 1.0f);
    const BlurKernel k = defocus_kernel(2.0);
    const Image z = convolve_raw(img, k, Boundary::Zero);
    const Image r = convolve_raw(img, k, Boundary::Reflect);
    CHECK(z.at(0, 0) < 0.8f);
    CHECK(r.at(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_SUITE_END();
