#pragma once

#include <optional>
#include <vector>

#include "dbmid/image.hpp"
#include "dbmid/phantom.hpp"

namespace dbmid {

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

// Mean SSIM over valid (fully interior) Gaussian windows, averaged across
// channels. Both images must share dimensions larger than the window.
// Double-precision throughout; identical images score exactly 1.
double ssim(const Image& a, const Image& b, const SsimParams& params = {});

// 10*log10(R^2 / MSE) in dB; +infinity for identical images.
double psnr(const Image& a, const Image& b, double dynamic_range = 1.0);

struct Profile {
    std::vector<double> samples;
    double spacing = 1.0;  // physical distance between samples
};

// Full width at half maximum of the profile's global peak, measured between
// linearly interpolated half-maximum crossings after subtracting the profile
// minimum as baseline. Empty when the peak is flat or a crossing leaves the
// profile.
std::optional<double> fwhm(const Profile& profile);

// FWHM of the luminance profile through (y, x) along a row (horizontal) or
// column, windowed to +/- half_window samples.
std::optional<double> measure_feature_fwhm(const Image& img, int y, int x,
                                           bool horizontal, int half_window);

// Michelson contrast of a three-bar group: gap-centre highs vs bar-centre
// lows sampled at the group's known geometry. Clamped to 0 when inverted.
double usaf_group_contrast(const Image& img, const UsafGroup& group);

// Smallest bar width resolved at the given contrast threshold in both
// orientations; empty when no width qualifies.
std::optional<int> usaf_resolution_limit(const Image& img, const UsafScene& scene,
                                         double threshold = 0.1);

}  // namespace dbmid
