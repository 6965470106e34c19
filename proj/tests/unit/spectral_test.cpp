#include <doctest.h>

#include <cmath>

#include "dbmid/blur.hpp"
#include "dbmid/errors.hpp"
#include "dbmid/phantom.hpp"
#include "dbmid/spectral.hpp"
#include "helpers.hpp"

using namespace dbmid;

TEST_SUITE_BEGIN("spectral");

namespace {

Image motion_blurred(const Image& sharp, int length, MotionDirection dir) {
    BlurSpec spec;
    spec.blur_class = BlurClass::Motion;
    spec.motion_length_px = length;
    spec.motion_direction = dir;
    spec.noise_sigma = 0.0;
    spec.seed = 0;
    return apply_blur(sharp, spec);
}

Image defocus_blurred(const Image& sharp, double radius) {
    BlurSpec spec;
    spec.blur_class = BlurClass::Defocus;
    spec.defocus_radius_px = radius;
    spec.noise_sigma = 0.0;
    spec.seed = 0;
    return apply_blur(sharp, spec);
}

}  // namespace

TEST_CASE("constant image yields all-zero features") {
    const Image flat(96, 96, 1, 0.25f);
    const SpectralFeatures f = spectral_features(flat);
    CHECK(f.fringe_energy_h == 0.0);
    CHECK(f.fringe_energy_v == 0.0);
    CHECK(f.high_freq_ratio == 0.0);
    CHECK(!f.dominant_fringe_period_px.has_value());
}

TEST_CASE("input below 64x64 is rejected") {
    CHECK_THROWS_AS(spectral_features(testutil::random_image(63, 64, 1, 1)), ArgumentError);
    CHECK_THROWS_AS(spectral_features(testutil::random_image(64, 32, 1, 1)), ArgumentError);
}

TEST_CASE("white noise: high-frequency heavy, no coherent fringes") {
    const Image noise = testutil::random_image(128, 128, 1, 77);
    const SpectralFeatures f = spectral_features(noise);
    // A flat spectrum puts ~80% of the energy above 0.25 cycles/px.
    CHECK(f.high_freq_ratio > 0.3);
    CHECK(f.fringe_energy_h < 0.15 * (f.fringe_energy_h + f.fringe_energy_v + 1.0));
    CHECK(f.fringe_energy_h >= 0.0);
    CHECK(f.fringe_energy_v >= 0.0);
}

TEST_CASE("horizontal motion streak leaves horizontal fringes with period ~W/L") {
    const Image sharp = make_texture(128, 128, 5);
    const Image blurred = motion_blurred(sharp, 20, MotionDirection::Horizontal);
    const SpectralFeatures f = spectral_features(blurred);
    CHECK(f.fringe_energy_h > 2.0 * f.fringe_energy_v);
    REQUIRE(f.dominant_fringe_period_px.has_value());
    // Sinc nulls every W/L = 128/20 = 6.4 frequency bins.
    CHECK(*f.dominant_fringe_period_px == doctest::Approx(128.0 / 20.0).epsilon(0.15));
}

TEST_CASE("vertical motion puts the fringes on the other axis") {
    const Image sharp = make_texture(128, 128, 6);
    const SpectralFeatures f =
        spectral_features(motion_blurred(sharp, 16, MotionDirection::Vertical));
    CHECK(f.fringe_energy_v > 2.0 * f.fringe_energy_h);
    REQUIRE(f.dominant_fringe_period_px.has_value());
    CHECK(*f.dominant_fringe_period_px == doctest::Approx(128.0 / 16.0).epsilon(0.15));
}

TEST_CASE("defocus rings are isotropic and kill high frequencies") {
    const Image sharp = make_texture(128, 128, 7);
    const SpectralFeatures fs = spectral_features(sharp);
    const SpectralFeatures fd = spectral_features(defocus_blurred(sharp, 3.0));
    CHECK(fd.high_freq_ratio < fs.high_freq_ratio);

    // Both axes cross the same rings, so neither should dominate. The floor
    // keeps the ratio meaningful when both fringe strengths are small.
    const double eps = 0.02 * (fd.fringe_energy_h + fd.fringe_energy_v + 1e-12);
    const double hi = std::max(fd.fringe_energy_h, fd.fringe_energy_v) + eps;
    const double lo = std::min(fd.fringe_energy_h, fd.fringe_energy_v) + eps;
    CHECK(hi / lo <= 1.5);
}

TEST_CASE("brightness scale moves energies by c^2 and nothing else") {
    const Image sharp = make_texture(128, 128, 8);
    const Image blurred = motion_blurred(sharp, 12, MotionDirection::Horizontal);
    Image half = blurred;
    for (float& v : half.data) v *= 0.5f;  // exact in binary floating point

    const SpectralFeatures a = spectral_features(blurred);
    const SpectralFeatures b = spectral_features(half);
    CHECK(b.high_freq_ratio == doctest::Approx(a.high_freq_ratio).epsilon(1e-6));
    CHECK(b.fringe_energy_h == doctest::Approx(0.25 * a.fringe_energy_h).epsilon(1e-6));
    CHECK(b.fringe_energy_v == doctest::Approx(0.25 * a.fringe_energy_v).epsilon(1e-6));
    REQUIRE(a.dominant_fringe_period_px.has_value());
    REQUIRE(b.dominant_fringe_period_px.has_value());
    CHECK(*b.dominant_fringe_period_px ==
          doctest::Approx(*a.dominant_fringe_period_px).epsilon(1e-6));
}

TEST_CASE("rotating the image by 90 degrees swaps the fringe axes") {
    const Image sharp = make_texture(128, 128, 9);
    const Image blurred = motion_blurred(sharp, 20, MotionDirection::Horizontal);
    const SpectralFeatures orig = spectral_features(blurred);
    const SpectralFeatures rot = spectral_features(rotate90_ccw(blurred));

    CHECK(rot.fringe_energy_v == doctest::Approx(orig.fringe_energy_h).epsilon(1e-6));
    CHECK(rot.fringe_energy_h == doctest::Approx(orig.fringe_energy_v).epsilon(1e-6));
    CHECK(rot.high_freq_ratio == doctest::Approx(orig.high_freq_ratio).epsilon(1e-6));
}

TEST_SUITE_END();
