#include "dbmid/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "dbmid/errors.hpp"
#include "dbmid/fft.hpp"

namespace dbmid {

namespace {

constexpr double kRadialCutoff = 0.25;  // cycles/px for high_freq_ratio

// Oscillation analysis of a positive-frequency axis profile (log power,
// cubic-detrended): normalized autocorrelation peak plus modulation depth.
struct FringeResult {
    double strength = 0.0;            // in [0,1], scale-invariant
    double period_bins = 0.0;
    bool detected = false;
};

FringeResult analyze_profile(const std::vector<double>& p) {
    FringeResult res;
    const int n = int(p.size());
    if (n < 12) return res;

    double pmax = 0.0;
    for (double v : p) pmax = std::max(pmax, v);
    if (pmax <= 0.0) return res;

    // Log profile; the floor keeps deep sinc nulls finite without flattening
    // them. Adding a constant scale to p only shifts the log, which the
    // detrend removes, so everything below is intensity-scale invariant.
    std::vector<double> l(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) l[size_t(i)] = std::log(p[size_t(i)] / pmax + 1e-12);

    // Remove the smooth spectral falloff with a cubic fit; oscillations with
    // two or more cycles across the axis survive intact.
    Eigen::MatrixXd A(n, 4);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const double t = double(i) / (n - 1);
        A(i, 0) = 1.0;
        A(i, 1) = t;
        A(i, 2) = t * t;
        A(i, 3) = t * t * t;
        y(i) = l[size_t(i)];
    }
    Eigen::VectorXd coef = (A.transpose() * A).ldlt().solve(A.transpose() * y);
    Eigen::VectorXd resid = y - A * coef;

    const double var = resid.squaredNorm() / n;
    if (var < 1e-12) return res;
    const double rms = std::sqrt(var);

    // Normalized autocorrelation over candidate periods.
    const int tau_max = n / 2;
    double best_rho = 0.0;
    int best_tau = 0;
    std::vector<double> rho(size_t(tau_max) + 1, 0.0);
    for (int tau = 2; tau <= tau_max; ++tau) {
        double acc = 0.0;
        for (int i = 0; i + tau < n; ++i) acc += resid(i) * resid(i + tau);
        rho[size_t(tau)] = acc / ((n - tau) * var);
        if (rho[size_t(tau)] > best_rho) {
            best_rho = rho[size_t(tau)];
            best_tau = tau;
        }
    }
    if (best_tau == 0) return res;
    // Prefer the fundamental: the earliest lag nearly as strong as the max.
    for (int tau = 2; tau < best_tau; ++tau) {
        if (rho[size_t(tau)] >= 0.9 * best_rho) {
            best_tau = tau;
            best_rho = rho[size_t(tau)];
            break;
        }
    }

    double tau_ref = best_tau;
    if (best_tau > 2 && best_tau < tau_max) {
        const double ym = rho[size_t(best_tau) - 1], y0 = rho[size_t(best_tau)],
                     yp = rho[size_t(best_tau) + 1];
        const double den = ym - 2.0 * y0 + yp;
        if (std::abs(den) > 1e-12) tau_ref += 0.5 * (ym - yp) / den;
    }

    // Chance-level autocorrelation peaks (~2.5/sqrt(n)) map to zero strength;
    // shallow wiggles are further discounted by modulation depth.
    const double floor_rho = 2.5 / std::sqrt(double(n));
    const double significance = std::max(0.0, (best_rho - floor_rho) / (1.0 - floor_rho));
    const double depth = std::min(1.0, rms / 0.5);
    res.strength = significance * depth;
    res.period_bins = tau_ref;
    res.detected = res.strength > 0.0;
    return res;
}

}  // namespace

SpectralFeatures spectral_features(const Image& image) {
    image.validate();
    if (image.h < 64 || image.w < 64) {
        throw ArgumentError("spectral features need at least 64x64 input");
    }
    const int h = image.h, w = image.w;
    const Image lum = image.c == 1 ? image : luminance(image);

    double mean = 0.0;
    float vmin = lum.data[0], vmax = lum.data[0];
    for (float v : lum.data) {
        mean += v;
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    mean /= double(lum.data.size());
    SpectralFeatures feats;
    if (double(vmax) - double(vmin) < 1e-12) return feats;  // constant image

    // Hann-windowed, mean-subtracted plane.
    std::vector<double> wy(static_cast<size_t>(h)), wx(static_cast<size_t>(w));
    for (int i = 0; i < h; ++i) wy[size_t(i)] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (h - 1)));
    for (int i = 0; i < w; ++i) wx[size_t(i)] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (w - 1)));
    std::vector<double> plane(size_t(h) * w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            plane[size_t(y) * w + x] = (lum.at(y, x, 0) - mean) * wy[size_t(y)] * wx[size_t(x)];

    const auto spec = fft2_r2c(plane.data(), h, w);
    const int sw = spectrum_width(w);

    // Full power grid via conjugate symmetry; keeps the two axes on exactly
    // the same code path for the fold below.
    std::vector<double> power(size_t(h) * w);
    for (int ky = 0; ky < h; ++ky) {
        for (int kx = 0; kx < w; ++kx) {
            const int sy = kx < sw ? ky : (h - ky) % h;
            const int sx = kx < sw ? kx : w - kx;
            power[size_t(ky) * w + kx] = std::norm(spec[size_t(sy) * sw + sx]);
        }
    }

    double total = 0.0, high = 0.0;
    for (int ky = 0; ky < h; ++ky) {
        const double fy = double(std::min(ky, h - ky)) / h;
        for (int kx = 0; kx < w; ++kx) {
            if (ky == 0 && kx == 0) continue;
            const double fx = double(std::min(kx, w - kx)) / w;
            const double e = power[size_t(ky) * w + kx];
            total += e;
            if (std::hypot(fy, fx) > kRadialCutoff) high += e;
        }
    }
    if (total <= 0.0) return feats;
    feats.high_freq_ratio = high / total;

    // Positive-frequency axis profiles, folded across conjugate halves.
    auto axis_profile = [&](bool along_x) {
        const int n = along_x ? w : h;
        const int m = along_x ? h : w;
        std::vector<double> prof(size_t(n / 2) + 1, 0.0);
        for (int k = 0; k <= n / 2; ++k) {
            double acc = 0.0;
            for (int j = 0; j < m; ++j) {
                acc += along_x ? power[size_t(j) * w + k] : power[size_t(k) * w + j];
                const int kc = (n - k) % n;
                if (kc != k) {
                    acc += along_x ? power[size_t(j) * w + kc] : power[size_t(kc) * w + j];
                }
            }
            prof[size_t(k)] = acc;
        }
        prof.erase(prof.begin());  // drop the zero-frequency column/row
        return prof;
    };

    const FringeResult fx = analyze_profile(axis_profile(true));
    const FringeResult fy = analyze_profile(axis_profile(false));
    feats.fringe_energy_h = fx.strength * total;
    feats.fringe_energy_v = fy.strength * total;

    const FringeResult& dom = fx.strength >= fy.strength ? fx : fy;
    if (dom.detected && dom.strength > 0.15) {
        feats.dominant_fringe_period_px = dom.period_bins;
    }
    return feats;
}

}  // namespace dbmid
