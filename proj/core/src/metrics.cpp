#include "dbmid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "dbmid/errors.hpp"

namespace dbmid {

namespace {

std::vector<double> gaussian_window(int n, double sigma) {
    std::vector<double> w(static_cast<size_t>(n));
    const double c = (n - 1) / 2.0;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        w[size_t(i)] = std::exp(-0.5 * (i - c) * (i - c) / (sigma * sigma));
        s += w[size_t(i)];
    }
    for (double& v : w) v /= s;
    return w;
}

// Valid-mode separable weighting: rows first then columns. in is h x w,
// result is (h - n + 1) x (w - n + 1).
std::vector<double> valid_smooth(const std::vector<double>& in, int h, int w,
                                 const std::vector<double>& taps) {
    const int n = int(taps.size());
    const int wo = w - n + 1;
    const int ho = h - n + 1;
    std::vector<double> mid(size_t(h) * wo);
    for (int y = 0; y < h; ++y) {
        const double* row = in.data() + size_t(y) * w;
        for (int x = 0; x < wo; ++x) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += taps[size_t(k)] * row[x + k];
            mid[size_t(y) * wo + x] = acc;
        }
    }
    std::vector<double> out(size_t(ho) * wo);
    for (int y = 0; y < ho; ++y) {
        for (int x = 0; x < wo; ++x) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += taps[size_t(k)] * mid[size_t(y + k) * wo + x];
            out[size_t(y) * wo + x] = acc;
        }
    }
    return out;
}

}  // namespace

double ssim(const Image& a, const Image& b, const SsimParams& p) {
    if (!a.same_shape(b)) throw ArgumentError("ssim inputs must share dimensions");
    if (a.h < p.window || a.w < p.window) {
        throw ArgumentError("image smaller than ssim window");
    }
    if (p.window < 3 || p.window % 2 == 0) throw ArgumentError("ssim window must be odd >= 3");

    const std::vector<double> taps = gaussian_window(p.window, p.sigma);
    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
    const size_t npx = size_t(a.h) * a.w;

    double total = 0.0;
    for (int c = 0; c < a.c; ++c) {
        std::vector<double> pa(npx), pb(npx), paa(npx), pbb(npx), pab(npx);
        const float* fa = a.plane(c);
        const float* fb = b.plane(c);
        for (size_t i = 0; i < npx; ++i) {
            const double va = fa[i], vb = fb[i];
            pa[i] = va;
            pb[i] = vb;
            paa[i] = va * va;
            pbb[i] = vb * vb;
            pab[i] = va * vb;
        }
        const auto mu_a = valid_smooth(pa, a.h, a.w, taps);
        const auto mu_b = valid_smooth(pb, a.h, a.w, taps);
        const auto m_aa = valid_smooth(paa, a.h, a.w, taps);
        const auto m_bb = valid_smooth(pbb, a.h, a.w, taps);
        const auto m_ab = valid_smooth(pab, a.h, a.w, taps);

        double acc = 0.0;
        for (size_t i = 0; i < mu_a.size(); ++i) {
            const double ma = mu_a[i], mb = mu_b[i];
            const double va = m_aa[i] - ma * ma;
            const double vb = m_bb[i] - mb * mb;
            const double cov = m_ab[i] - ma * mb;
            const double num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
            const double den = (ma * ma + mb * mb + c1) * (va + vb + c2);
            acc += num / den;
        }
        total += acc / double(mu_a.size());
    }
    return total / a.c;
}

double psnr(const Image& a, const Image& b, double dynamic_range) {
    if (!a.same_shape(b)) throw ArgumentError("psnr inputs must share dimensions");
    double mse = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = double(a.data[i]) - double(b.data[i]);
        mse += d * d;
    }
    mse /= double(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(dynamic_range * dynamic_range / mse);
}

std::optional<double> fwhm(const Profile& profile) {
    const auto& s = profile.samples;
    if (s.size() < 5 || profile.spacing <= 0.0) return std::nullopt;

    size_t peak = 0;
    double lo = s[0], hi = s[0];
    for (size_t i = 1; i < s.size(); ++i) {
        if (s[i] > s[peak]) peak = i;
        lo = std::min(lo, s[i]);
        hi = std::max(hi, s[i]);
    }
    if (hi - lo < 1e-12) return std::nullopt;
    const double half = lo + 0.5 * (hi - lo);

    // Walk outward from the peak to the first crossing on each side.
    double left = -1.0, right = -1.0;
    for (size_t i = peak; i > 0; --i) {
        if (s[i - 1] <= half) {
            left = double(i - 1) + (half - s[i - 1]) / (s[i] - s[i - 1]);
            break;
        }
    }
    for (size_t i = peak; i + 1 < s.size(); ++i) {
        if (s[i + 1] <= half) {
            right = double(i) + (s[i] - half) / (s[i] - s[i + 1]);
            break;
        }
    }
    if (left < 0.0 || right < 0.0) return std::nullopt;
    return (right - left) * profile.spacing;
}

std::optional<double> measure_feature_fwhm(const Image& img, int y, int x,
                                           bool horizontal, int half_window) {
    img.validate();
    if (y < 0 || y >= img.h || x < 0 || x >= img.w) {
        throw ArgumentError("feature position out of bounds");
    }
    const Image lum = img.c == 1 ? img : luminance(img);
    Profile p;
    if (horizontal) {
        const int x0 = std::max(0, x - half_window);
        const int x1 = std::min(img.w - 1, x + half_window);
        for (int i = x0; i <= x1; ++i) p.samples.push_back(lum.at(y, i, 0));
    } else {
        const int y0 = std::max(0, y - half_window);
        const int y1 = std::min(img.h - 1, y + half_window);
        for (int i = y0; i <= y1; ++i) p.samples.push_back(lum.at(i, x, 0));
    }
    return fwhm(p);
}

double usaf_group_contrast(const Image& img, const UsafGroup& g) {
    const Image lum = img.c == 1 ? img : luminance(img);
    const int wb = g.width_px;
    // Bar centres sit at offsets wb/2, 2wb + wb/2, 4wb + wb/2 from the group
    // edge; gap centres between them.
    const double bar_off[3] = {0.5 * wb, 2.5 * wb, 4.5 * wb};
    const double gap_off[2] = {1.5 * wb, 3.5 * wb};
    auto sample = [&](double off) {
        if (g.vertical_bars) {
            const int xx = std::clamp(g.x0 + int(std::lround(off - 0.5)), 0, img.w - 1);
            return double(lum.at(g.probe_fixed, xx, 0));
        }
        const int yy = std::clamp(g.y0 + int(std::lround(off - 0.5)), 0, img.h - 1);
        return double(lum.at(yy, g.probe_fixed, 0));
    };
    double bars = 0.0, gaps = 0.0;
    for (double off : bar_off) bars += sample(off);
    for (double off : gap_off) gaps += sample(off);
    bars /= 3.0;
    gaps /= 2.0;
    if (gaps + bars <= 0.0 || gaps <= bars) return 0.0;
    return (gaps - bars) / (gaps + bars);
}

std::optional<int> usaf_resolution_limit(const Image& img, const UsafScene& scene,
                                         double threshold) {
    std::map<int, std::pair<double, double>> by_width;  // width -> (vert, horiz)
    for (const UsafGroup& g : scene.groups) {
        auto& e = by_width[g.width_px];
        (g.vertical_bars ? e.first : e.second) = usaf_group_contrast(img, g);
    }
    std::optional<int> best;
    for (const auto& [width, contrast] : by_width) {
        if (contrast.first >= threshold && contrast.second >= threshold) {
            if (!best || width < *best) best = width;
        }
    }
    return best;
}

}  // namespace dbmid
