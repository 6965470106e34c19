#include <doctest.h>

#include <set>
#include <vector>

#include "dbmid/phantom.hpp"
#include "helpers.hpp"

using namespace dbmid;

TEST_SUITE_BEGIN("phantom");

namespace {

// 4-connected component count on mask > 0.5; independent of the generator's
// own blob bookkeeping.
int count_components(const Image& mask) {
    const int h = mask.h, w = mask.w;
    std::vector<char> seen(size_t(h) * w, 0);
    int components = 0;
    std::vector<int> stack;
    for (int start = 0; start < h * w; ++start) {
        if (seen[size_t(start)] || mask.data[size_t(start)] <= 0.5f) continue;
        ++components;
        stack.push_back(start);
        seen[size_t(start)] = 1;
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            const int y = p / w, x = p % w;
            const int nbrs[4] = {p - w, p + w, p - 1, p + 1};
            const bool ok[4] = {y > 0, y + 1 < h, x > 0, x + 1 < w};
            for (int i = 0; i < 4; ++i) {
                if (!ok[i]) continue;
                const int q = nbrs[i];
                if (!seen[size_t(q)] && mask.data[size_t(q)] > 0.5f) {
                    seen[size_t(q)] = 1;
                    stack.push_back(q);
                }
            }
        }
    }
    return components;
}

}  // namespace

TEST_CASE("phantoms are deterministic per (kind, size, seed)") {
    for (PhantomKind kind :
         {PhantomKind::Cells, PhantomKind::Usaf, PhantomKind::Texture, PhantomKind::Spots}) {
        const int side = kind == PhantomKind::Usaf ? 256 : 128;  // usaf layout needs room
        const Image a = make_phantom(kind, side, side, 42);
        const Image b = make_phantom(kind, side, side, 42);
        CHECK(a.data == b.data);
    }
    const Image c = make_phantom(PhantomKind::Cells, 128, 128, 42);
    const Image d = make_phantom(PhantomKind::Cells, 128, 128, 43);
    CHECK(c.data != d.data);
}

TEST_CASE("usaf bars are exactly 0 on an exactly 1 background") {
    const UsafScene scene = make_usaf_scene(256, 256);
    REQUIRE(scene.image.c == 1);
    std::set<float> values(scene.image.data.begin(), scene.image.data.end());
    REQUIRE(values.size() == 2);
    CHECK(*values.begin() == 0.0f);
    CHECK(*values.rbegin() == 1.0f);
}

TEST_CASE("usaf groups span widths 8 down to 1 in both orientations") {
    const UsafScene scene = make_usaf_scene(256, 256);
    std::set<int> widths_v, widths_h;
    for (const auto& g : scene.groups) {
        (g.vertical_bars ? widths_v : widths_h).insert(g.width_px);
        // The probe crosses the bars inside the image.
        CHECK(g.probe_lo >= 0);
        CHECK(g.probe_hi < 256);
        CHECK(g.probe_lo < g.probe_hi);
    }
    for (auto* widths : {&widths_v, &widths_h}) {
        CHECK(widths->count(8) == 1);
        CHECK(widths->count(1) == 1);
        CHECK(widths->size() >= 4);
    }
}

TEST_CASE("cells scene has at least 10 separated blobs at 256") {
    const CellsScene scene = make_cells_scene(256, 256, 7);
    CHECK(scene.blobs.size() >= 10);
    CHECK(count_components(scene.mask) >= 10);
    // Blob centres really carry cell-like (darker) content vs background.
    const Image lum = luminance(scene.image);
    double bg = 0.0;
    int nbg = 0;
    for (int i = 0; i < 256 * 256; ++i) {
        if (scene.mask.data[size_t(i)] < 0.5f) {
            bg += lum.data[size_t(i)];
            ++nbg;
        }
    }
    bg /= nbg;
    int darker = 0;
    for (const auto& blob : scene.blobs) {
        if (lum.at(int(blob.cy), int(blob.cx)) < bg) ++darker;
    }
    CHECK(darker >= int(scene.blobs.size() * 3 / 4));
}

TEST_CASE("spot field yields at least 60 measurable spots at 256") {
    const SpotField field = make_spot_field(256, 256, 11);
    CHECK(field.centers.size() >= 60);
    CHECK(field.sigma == doctest::Approx(1.2));
    for (const auto& [cy, cx] : field.centers) {
        CHECK(cy >= 0.0);
        CHECK(cy < 256.0);
        CHECK(cx >= 0.0);
        CHECK(cx < 256.0);
    }
    // Spots sit on a dark background and peak near their centres.
    int bright = 0;
    for (const auto& [cy, cx] : field.centers) {
        if (field.image.at(int(std::lround(cy)), int(std::lround(cx))) > 0.5f) ++bright;
    }
    CHECK(bright == int(field.centers.size()));
}

TEST_CASE("wider spacing separates spots for streak sweeps") {
    const SpotField field = make_spot_field(256, 256, 12, 64);
    CHECK(field.centers.size() >= 9);
    double min_d2 = 1e18;
    for (size_t i = 0; i < field.centers.size(); ++i)
        for (size_t j = i + 1; j < field.centers.size(); ++j) {
            const double dy = field.centers[i].first - field.centers[j].first;
            const double dx = field.centers[i].second - field.centers[j].second;
            min_d2 = std::min(min_d2, dy * dy + dx * dx);
        }
    CHECK(std::sqrt(min_d2) >= 64.0 - 2 * 2.0 - 1e-9);  // spacing minus jitter
}

TEST_CASE("make_phantom dispatch produces the advertised shapes") {
    CHECK(make_phantom(PhantomKind::Cells, 96, 96, 1).c == 3);
    CHECK(make_phantom(PhantomKind::Texture, 96, 96, 1).c == 3);
    CHECK(make_phantom(PhantomKind::Usaf, 256, 256, 1).c == 1);
    CHECK(make_phantom(PhantomKind::Spots, 96, 96, 1).c == 1);
    CHECK(make_phantom(PhantomKind::Cells, 96, 128, 2).w == 128);
}

TEST_CASE("phantom kind names round trip") {
    for (PhantomKind k : {PhantomKind::Cells, PhantomKind::Usaf, PhantomKind::Texture,
                          PhantomKind::Spots}) {
        CHECK(phantom_kind_from_string(to_string(k)) == k);
    }
}

TEST_SUITE_END();
