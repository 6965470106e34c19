#include "dbmid/deconv.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "dbmid/convolve.hpp"
#include "dbmid/errors.hpp"
#include "dbmid/fft.hpp"

namespace dbmid {

namespace {

constexpr double kRlEps = 1e-12;
// Direct convolution below this kernel extent, frequency domain above.
constexpr int kDirectConvLimit = 7;

// Next FFT-friendly size (factors 2/3/5 only) so padded transforms never hit
// FFTW's slow large-prime paths.
int nice_fft_size(int n) {
    for (;; ++n) {
        int m = n;
        for (int f : {2, 3, 5})
            while (m % f == 0) m /= f;
        if (m == 1) return n;
    }
}

double direct_corr_at(const double* f, int h, int w, const double* k, int kh, int kw,
                      int y, int x) {
    const int ry = kh / 2;
    const int rx = kw / 2;
    double acc = 0.0;
    for (int ky = 0; ky < kh; ++ky) {
        const int iy = reflect_index(y + ky - ry, h);
        for (int kx = 0; kx < kw; ++kx) {
            const int ix = reflect_index(x + kx - rx, w);
            acc += k[size_t(ky) * kw + kx] * f[size_t(iy) * w + ix];
        }
    }
    return acc;
}

// Correlation of a fixed kernel against h x w planes with reflect boundary.
// Small kernels run directly; larger ones go through a zero-extended FFT
// grid whose result is spot-checked against the direct sum every call.
class ConvPlan {
  public:
    ConvPlan(int h, int w, const double* kern, int kh, int kw, bool flip)
        : h_(h), w_(w), kh_(kh), kw_(kw) {
        k_.assign(kern, kern + size_t(kh) * kw);
        if (flip) std::reverse(k_.begin(), k_.end());
        use_fft_ = std::max(kh, kw) > kDirectConvLimit;
        if (!use_fft_) return;
        ry_ = kh / 2;
        rx_ = kw / 2;
        ph_ = nice_fft_size(h + 2 * ry_);
        pw_ = nice_fft_size(w + 2 * rx_);
        // Correlation equals circular convolution with the kernel mirrored
        // about its center, so embed taps at the negated offsets.
        std::vector<double> grid(size_t(ph_) * pw_, 0.0);
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx) {
                const int ty = ((ry_ - ky) % ph_ + ph_) % ph_;
                const int tx = ((rx_ - kx) % pw_ + pw_) % pw_;
                grid[size_t(ty) * pw_ + tx] = k_[size_t(ky) * kw + kx];
            }
        }
        kspec_ = fft2_r2c(grid.data(), ph_, pw_);
    }

    void apply(const std::vector<double>& f, std::vector<double>& out) const {
        out.resize(size_t(h_) * w_);
        if (!use_fft_) {
            apply_direct(f.data(), out.data());
        } else {
            apply_fft(f.data(), out.data());
            cross_check(f.data(), out.data());
        }
    }

  private:
    void apply_direct(const double* f, double* out) const {
        const int ry = kh_ / 2;
        const int rx = kw_ / 2;
        for (int y = 0; y < h_; ++y) {
            const bool y_in = y >= ry && y + ry < h_;
            for (int x = 0; x < w_; ++x) {
                if (y_in && x >= rx && x + rx < w_) {
                    double acc = 0.0;
                    const double* base = f + size_t(y - ry) * w_ + (x - rx);
                    const double* kp = k_.data();
                    for (int ky = 0; ky < kh_; ++ky) {
                        const double* row = base + size_t(ky) * w_;
                        for (int kx = 0; kx < kw_; ++kx) acc += kp[kx] * row[kx];
                        kp += kw_;
                    }
                    out[size_t(y) * w_ + x] = acc;
                } else {
                    out[size_t(y) * w_ + x] =
                        direct_corr_at(f, h_, w_, k_.data(), kh_, kw_, y, x);
                }
            }
        }
    }

    void apply_fft(const double* f, double* out) const {
        std::vector<double> pad(size_t(ph_) * pw_, 0.0);
        for (int py = 0; py < h_ + 2 * ry_; ++py) {
            const int sy = reflect_index(py - ry_, h_);
            double* dst = pad.data() + size_t(py) * pw_;
            const double* src = f + size_t(sy) * w_;
            for (int px = 0; px < w_ + 2 * rx_; ++px) {
                dst[px] = src[reflect_index(px - rx_, w_)];
            }
        }
        auto spec = fft2_r2c(pad.data(), ph_, pw_);
        for (size_t i = 0; i < spec.size(); ++i) spec[i] *= kspec_[i];
        std::vector<double> full(size_t(ph_) * pw_);
        ifft2_c2r(spec.data(), ph_, pw_, full.data());
        for (int y = 0; y < h_; ++y) {
            const double* src = full.data() + size_t(y + ry_) * pw_ + rx_;
            std::copy(src, src + w_, out + size_t(y) * w_);
        }
    }

    void cross_check(const double* f, const double* out) const {
        const int ys[] = {0, 0, h_ - 1, h_ - 1, h_ / 2, h_ / 3, (2 * h_) / 3, h_ / 5};
        const int xs[] = {0, w_ - 1, 0, w_ - 1, w_ / 2, (2 * w_) / 3, w_ / 3, w_ / 7};
        for (int i = 0; i < 8; ++i) {
            const double direct =
                direct_corr_at(f, h_, w_, k_.data(), kh_, kw_, ys[i], xs[i]);
            const double got = out[size_t(ys[i]) * w_ + xs[i]];
            if (std::abs(got - direct) > 1e-6 * std::max(1.0, std::abs(direct))) {
                throw NumericError("frequency-domain convolution disagrees with direct sum");
            }
        }
    }

    int h_, w_, kh_, kw_;
    int ry_ = 0, rx_ = 0, ph_ = 0, pw_ = 0;
    bool use_fft_ = false;
    std::vector<double> k_;
    std::vector<std::complex<double>> kspec_;
};

void rl_update(std::vector<double>& x, const std::vector<double>& obs,
               const ConvPlan& fwd, const ConvPlan& adj, bool clip,
               std::vector<double>& est, std::vector<double>& corr) {
    fwd.apply(x, est);
    for (size_t i = 0; i < est.size(); ++i) {
        est[i] = obs[i] / std::max(est[i], kRlEps);
    }
    adj.apply(est, corr);
    for (size_t i = 0; i < x.size(); ++i) {
        x[i] *= corr[i];
        if (clip && x[i] < 0.0) x[i] = 0.0;
    }
}

std::vector<double> plane_as_double(const Image& img, int ch) {
    const float* p = img.plane(ch);
    return std::vector<double>(p, p + img.pixel_count());
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

BlurKernel initial_guess(const DeconvConfig& cfg) {
    const int n = cfg.kernel_size_guess;
    BlurKernel k;
    k.kind = KernelKind::Estimated;
    k.kh = k.kw = n;
    k.m.assign(size_t(n) * n, 0.0);
    if (cfg.initial_kernel == InitialKernel::Uniform) {
        std::fill(k.m.begin(), k.m.end(), 1.0 / (double(n) * n));
    } else {
        const double sigma = double(n) / 6.0;
        const int c = n / 2;
        double s = 0.0;
        for (int y = 0; y < n; ++y) {
            for (int x = 0; x < n; ++x) {
                const double d2 = double(y - c) * (y - c) + double(x - c) * (x - c);
                k.at(y, x) = std::exp(-d2 / (2.0 * sigma * sigma));
                s += k.at(y, x);
            }
        }
        for (double& v : k.m) v /= s;
    }
    return k;
}

// k(a) <- k(a) * corr(x, ratio)(a) / corr(x, 1)(a), offsets restricted to the
// kernel support. Interior rows reduce to dot products of contiguous spans.
void kernel_update(std::vector<double>& k, int kg, const std::vector<double>& x,
                   const std::vector<double>& ratio, int h, int w) {
    const int r = kg / 2;
    for (int ay = 0; ay < kg; ++ay) {
        const int dy = ay - r;
        for (int ax = 0; ax < kg; ++ax) {
            const int dx = ax - r;
            double num = 0.0, den = 0.0;
            for (int y = 0; y < h; ++y) {
                const double* xr = x.data() + size_t(reflect_index(y + dy, h)) * w;
                const double* rr = ratio.data() + size_t(y) * w;
                const int x_lo = std::max(0, -dx);
                const int x_hi = std::min(w, w - dx);
                for (int xx = 0; xx < x_lo; ++xx) {
                    const double xv = xr[reflect_index(xx + dx, w)];
                    num += xv * rr[xx];
                    den += xv;
                }
                for (int xx = x_lo; xx < x_hi; ++xx) {
                    const double xv = xr[xx + dx];
                    num += xv * rr[xx];
                    den += xv;
                }
                for (int xx = std::max(x_lo, x_hi); xx < w; ++xx) {
                    const double xv = xr[reflect_index(xx + dx, w)];
                    num += xv * rr[xx];
                    den += xv;
                }
            }
            k[size_t(ay) * kg + ax] *= num / std::max(den, kRlEps);
        }
    }
}

}  // namespace

void DeconvConfig::validate() const {
    if (iterations < 1) throw ConfigError("deconv: iterations must be >= 1");
    if (kernel_size_guess < 3 || kernel_size_guess % 2 == 0) {
        throw ConfigError("deconv: kernel_size_guess must be odd and >= 3");
    }
}

Image richardson_lucy(const Image& image, const BlurKernel& kernel,
                      const DeconvConfig& cfg) {
    cfg.validate();
    image.validate();
    kernel.validate();
    bool any = false;
    for (float v : image.data)
        if (v != 0.0f) { any = true; break; }
    if (!any) return image;

    Image out = image;
    const ConvPlan fwd(image.h, image.w, kernel.m.data(), kernel.kh, kernel.kw, false);
    const ConvPlan adj(image.h, image.w, kernel.m.data(), kernel.kh, kernel.kw, true);
    std::vector<double> est, corr;
    for (int ch = 0; ch < image.c; ++ch) {
        const std::vector<double> obs = plane_as_double(image, ch);
        std::vector<double> x = obs;
        for (int it = 0; it < cfg.iterations; ++it) {
            rl_update(x, obs, fwd, adj, cfg.clip_negatives, est, corr);
        }
        if (!all_finite(x)) {
            throw NumericError("richardson_lucy produced non-finite values");
        }
        float* dst = out.plane(ch);
        for (size_t i = 0; i < x.size(); ++i) {
            dst[i] = float(std::clamp(x[i], 0.0, 1.0));
        }
    }
    return out;
}

std::pair<Image, BlurKernel> blind_deconvolve(const Image& image,
                                              const DeconvConfig& cfg) {
    cfg.validate();
    image.validate();
    const int kg = cfg.kernel_size_guess;
    if (image.h < 2 * kg || image.w < 2 * kg) {
        throw ArgumentError("blind_deconvolve: image must be at least twice the kernel guess");
    }

    BlurKernel kernel = initial_guess(cfg);
    const auto [lo, hi] = std::minmax_element(image.data.begin(), image.data.end());
    if (*hi - *lo < 1e-12) return {image, kernel};

    const Image lum = luminance(image);
    const std::vector<double> obs = plane_as_double(lum, 0);
    std::vector<double> x = obs;
    std::vector<double> est, corr, ratio(obs.size());
    const int h = image.h, w = image.w;

    for (int it = 1; it <= cfg.iterations; ++it) {
        const ConvPlan fwd(h, w, kernel.m.data(), kg, kg, false);
        const ConvPlan adj(h, w, kernel.m.data(), kg, kg, true);
        rl_update(x, obs, fwd, adj, cfg.clip_negatives, est, corr);

        fwd.apply(x, est);
        for (size_t i = 0; i < est.size(); ++i) {
            ratio[i] = obs[i] / std::max(est[i], kRlEps);
        }
        kernel_update(kernel.m, kg, x, ratio, h, w);

        double ks = 0.0;
        for (double& v : kernel.m) {
            if (v < 0.0) v = 0.0;
            ks += v;
        }
        if (!std::isfinite(ks) || ks <= 0.0 || !all_finite(x)) {
            throw NumericError("blind deconvolution diverged at iteration " +
                               std::to_string(it));
        }
        for (double& v : kernel.m) v /= ks;
    }

    // Exact renormalization so the estimate satisfies the kernel invariants.
    double ks = kernel.sum();
    for (double& v : kernel.m) v /= ks;
    kernel.validate();

    return {richardson_lucy(image, kernel, cfg), kernel};
}

}  // namespace dbmid
