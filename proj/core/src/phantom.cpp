#include "dbmid/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "dbmid/convolve.hpp"
#include "dbmid/errors.hpp"
#include "dbmid/rng.hpp"

namespace dbmid {

const char* to_string(PhantomKind k) {
    switch (k) {
        case PhantomKind::Cells: return "cells";
        case PhantomKind::Usaf: return "usaf";
        case PhantomKind::Texture: return "texture";
        case PhantomKind::Spots: return "spots";
    }
    return "?";
}

PhantomKind phantom_kind_from_string(const std::string& s) {
    if (s == "cells") return PhantomKind::Cells;
    if (s == "usaf") return PhantomKind::Usaf;
    if (s == "texture") return PhantomKind::Texture;
    if (s == "spots") return PhantomKind::Spots;
    throw ArgumentError("unknown phantom kind: " + s);
}

namespace {

std::vector<double> gaussian_taps(double sigma) {
    const int r = std::max(1, int(std::ceil(3.0 * sigma)));
    std::vector<double> taps(size_t(2 * r + 1));
    double s = 0.0;
    for (int i = -r; i <= r; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        taps[size_t(i + r)] = v;
        s += v;
    }
    for (double& v : taps) v /= s;
    return taps;
}

// Separable Gaussian smoothing of a single plane, reflect boundary.
void smooth_plane(std::vector<float>& plane, int h, int w, double sigma) {
    const std::vector<double> taps = gaussian_taps(sigma);
    std::vector<float> tmp(plane.size());
    convolve_plane(plane.data(), h, w, taps.data(), 1, int(taps.size()),
                   Boundary::Reflect, tmp.data());
    convolve_plane(tmp.data(), h, w, taps.data(), int(taps.size()), 1,
                   Boundary::Reflect, plane.data());
}

std::vector<float> noise_plane(int h, int w, Rng& rng) {
    std::vector<float> p(size_t(h) * w);
    for (float& v : p) v = float(rng.gaussian());
    return p;
}

double smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

}  // namespace

CellsScene make_cells_scene(int h, int w, std::uint64_t seed) {
    if (h < 32 || w < 32) throw ArgumentError("cells scene needs at least 32x32");
    Rng rng(seed);
    CellsScene scene;
    Image& img = scene.image;
    img.h = h;
    img.w = w;
    img.c = 3;
    img.data.assign(size_t(3) * h * w, 0.0f);
    scene.mask.h = h;
    scene.mask.w = w;
    scene.mask.c = 1;
    scene.mask.data.assign(size_t(h) * w, 0.0f);

    // Bright background with a gentle illumination gradient and faint grain.
    const double bg[3] = {0.93, 0.90, 0.94};
    std::vector<float> grain = noise_plane(h, w, rng);
    smooth_plane(grain, h, w, 2.5);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double grad = 0.03 * (double(y) / h - 0.5) + 0.02 * (double(x) / w - 0.5);
            const double g = 0.015 * grain[size_t(y) * w + x];
            for (int c = 0; c < 3; ++c) {
                img.at(y, x, c) = float(std::clamp(bg[c] - grad + g, 0.0, 1.0));
            }
        }
    }

    // Chromatin texture shared by all nuclei.
    std::vector<float> chroma = noise_plane(h, w, rng);
    smooth_plane(chroma, h, w, 1.0);

    const int target = std::max(10, (h * w) / 4000);
    const double rmin = 0.035 * std::min(h, w);
    const double rmax = 0.085 * std::min(h, w);
    for (int attempt = 0; attempt < target * 12 && int(scene.blobs.size()) < target; ++attempt) {
        CellBlob b;
        b.ry = rng.uniform(rmin, rmax);
        b.rx = rng.uniform(rmin, rmax);
        b.angle = rng.uniform(0.0, 3.14159265358979);
        const double margin = std::max(b.ry, b.rx) + 2.0;
        b.cy = rng.uniform(margin, h - margin);
        b.cx = rng.uniform(margin, w - margin);
        bool crowded = false;
        for (const CellBlob& o : scene.blobs) {
            const double dy = b.cy - o.cy, dx = b.cx - o.cx;
            const double lim = 0.8 * (std::max(b.ry, b.rx) + std::max(o.ry, o.rx));
            if (dy * dy + dx * dx < lim * lim) {
                crowded = true;
                break;
            }
        }
        if (crowded && attempt < target * 8) continue;  // relax once placements get tight
        scene.blobs.push_back(b);
    }
    if (int(scene.blobs.size()) < target) {
        throw NumericError("cell placement failed to reach target blob count");
    }

    for (const CellBlob& b : scene.blobs) {
        const double cyto[3] = {0.78 + rng.uniform(-0.04, 0.04), 0.52 + rng.uniform(-0.05, 0.05),
                                0.68 + rng.uniform(-0.04, 0.04)};
        const double nuc[3] = {0.42 + rng.uniform(-0.05, 0.05), 0.27 + rng.uniform(-0.04, 0.04),
                               0.56 + rng.uniform(-0.05, 0.05)};
        const double ca = std::cos(b.angle), sa = std::sin(b.angle);
        const double rext = std::max(b.ry, b.rx) + 2.0;
        const int y0 = std::max(0, int(b.cy - rext)), y1 = std::min(h - 1, int(b.cy + rext));
        const int x0 = std::max(0, int(b.cx - rext)), x1 = std::min(w - 1, int(b.cx + rext));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double dy = y - b.cy, dx = x - b.cx;
                const double u = (ca * dx + sa * dy) / b.rx;
                const double v = (-sa * dx + ca * dy) / b.ry;
                const double d = std::sqrt(u * u + v * v);
                if (d >= 1.0) continue;
                scene.mask.at(y, x, 0) = 1.0f;
                // ~1.5 px anti-aliased rim, nucleus at 55% of the radius.
                const double edge = smoothstep((1.0 - d) * std::min(b.ry, b.rx) / 1.5);
                const double nd = d / 0.55;
                const double nmix = nd < 1.0 ? smoothstep((1.0 - nd) * 3.0) : 0.0;
                const double tex = nmix > 0.0 ? 0.10 * chroma[size_t(y) * w + x] : 0.0;
                for (int c = 0; c < 3; ++c) {
                    const double cell = cyto[c] * (1.0 - nmix) + (nuc[c] + tex) * nmix;
                    const double base = img.at(y, x, c);
                    img.at(y, x, c) = float(std::clamp(base * (1.0 - edge) + cell * edge, 0.0, 1.0));
                }
            }
        }
    }
    return scene;
}

UsafScene make_usaf_scene(int h, int w) {
    static const int widths[] = {8, 6, 4, 3, 2, 1};
    UsafScene scene;
    Image& img = scene.image;
    img.h = h;
    img.w = w;
    img.c = 1;
    img.data.assign(size_t(h) * w, 1.0f);

    auto draw_rect = [&](int y0, int x0, int rh, int rw) {
        for (int y = y0; y < y0 + rh; ++y)
            for (int x = x0; x < x0 + rw; ++x) img.at(y, x, 0) = 0.0f;
    };

    // Each width gets a vertical-bar group and a horizontal-bar group side by
    // side: three bars of width wb, gaps wb, length 5*wb.
    const int margin = 12;
    int cy = margin;
    int cx = margin;
    int row_h = 0;
    for (int wb : widths) {
        const int len = 5 * wb;
        const int gw = 5 * wb;  // group width: 3 bars + 2 gaps
        const int pair_w = gw + wb * 2 + len;
        const int pair_h = std::max(len, gw);
        if (cx + pair_w + margin > w) {
            cx = margin;
            cy += row_h + margin;
            row_h = 0;
        }
        if (cy + pair_h + margin > h) throw ArgumentError("image too small for usaf layout");

        UsafGroup gv;
        gv.width_px = wb;
        gv.vertical_bars = true;
        gv.y0 = cy;
        gv.x0 = cx;
        for (int i = 0; i < 3; ++i) draw_rect(cy, cx + i * 2 * wb, len, wb);
        gv.probe_fixed = cy + len / 2;
        gv.probe_lo = cx - wb;
        gv.probe_hi = cx + gw - 1 + wb;
        scene.groups.push_back(gv);

        UsafGroup gh;
        gh.width_px = wb;
        gh.vertical_bars = false;
        gh.y0 = cy;
        gh.x0 = cx + gw + 2 * wb;
        for (int i = 0; i < 3; ++i) draw_rect(cy + i * 2 * wb, gh.x0, wb, len);
        gh.probe_fixed = gh.x0 + len / 2;
        gh.probe_lo = cy - wb;
        gh.probe_hi = cy + gw - 1 + wb;
        scene.groups.push_back(gh);

        cx += pair_w + margin;
        row_h = std::max(row_h, pair_h);
    }
    // Clamp probe spans to the canvas.
    for (UsafGroup& g : scene.groups) {
        g.probe_lo = std::max(g.probe_lo, 0);
        g.probe_hi = std::min(g.probe_hi, g.vertical_bars ? w - 1 : h - 1);
    }
    return scene;
}

Image make_texture(int h, int w, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<float> a = noise_plane(h, w, rng);
    std::vector<float> b = a;
    smooth_plane(a, h, w, 1.5);
    smooth_plane(b, h, w, 5.0);
    std::vector<float> band(a.size());
    double mean = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        band[i] = a[i] - b[i];
        mean += band[i];
    }
    mean /= double(band.size());
    double var = 0.0;
    for (float v : band) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / double(band.size()));
    const double gain = sd > 1e-12 ? 0.16 / sd : 0.0;

    Image img;
    img.h = h;
    img.w = w;
    img.c = 3;
    img.data.resize(size_t(3) * h * w);
    const double tint[3] = {1.05, 1.0, 0.95};
    for (int c = 0; c < 3; ++c) {
        float* p = img.plane(c);
        for (size_t i = 0; i < band.size(); ++i) {
            p[i] = float(std::clamp(0.5 + gain * tint[c] * (band[i] - mean), 0.02, 0.98));
        }
    }
    return img;
}

SpotField make_spot_field(int h, int w, std::uint64_t seed, int spacing) {
    if (h < 64 || w < 64) throw ArgumentError("spot field needs at least 64x64");
    if (spacing < 8) throw ArgumentError("spot spacing must be >= 8");
    Rng rng(seed);
    SpotField field;
    Image& img = field.image;
    img.h = h;
    img.w = w;
    img.c = 1;
    img.data.assign(size_t(h) * w, 0.05f);

    const int margin = 10;
    for (int gy = margin; gy + margin <= h - spacing / 2; gy += spacing) {
        for (int gx = margin; gx + margin <= w - spacing / 2; gx += spacing) {
            const double cy = gy + rng.uniform(-2.0, 2.0);
            const double cx = gx + rng.uniform(-2.0, 2.0);
            field.centers.emplace_back(cy, cx);
        }
    }
    const double amp = 0.85;
    const double s2 = 2.0 * field.sigma * field.sigma;
    const int rad = int(std::ceil(5.0 * field.sigma));
    for (auto [cy, cx] : field.centers) {
        const int y0 = std::max(0, int(cy) - rad), y1 = std::min(h - 1, int(cy) + rad);
        const int x0 = std::max(0, int(cx) - rad), x1 = std::min(w - 1, int(cx) + rad);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double d2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
                float& px = img.at(y, x, 0);
                px = float(std::min(1.0, px + amp * std::exp(-d2 / s2)));
            }
        }
    }
    return field;
}

Image make_phantom(PhantomKind kind, int h, int w, std::uint64_t seed) {
    switch (kind) {
        case PhantomKind::Cells: return make_cells_scene(h, w, seed).image;
        case PhantomKind::Usaf: return make_usaf_scene(h, w).image;
        case PhantomKind::Texture: return make_texture(h, w, seed);
        case PhantomKind::Spots: return make_spot_field(h, w, seed).image;
    }
    throw ArgumentError("unknown phantom kind");
}

}  // namespace dbmid
