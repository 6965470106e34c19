#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbmid/image.hpp"

namespace dbmid {

enum class PhantomKind { Cells, Usaf, Texture, Spots };

const char* to_string(PhantomKind k);
PhantomKind phantom_kind_from_string(const std::string& s);

struct CellBlob {
    double cy = 0, cx = 0;   // centre
    double ry = 0, rx = 0;   // semi-axes
    double angle = 0;        // radians
};

struct CellsScene {
    Image image;  // 3-channel, stain-like palette on a bright background
    Image mask;   // 1-channel, 1 inside any blob
    std::vector<CellBlob> blobs;
};

// Synthetic stained-tissue field: elliptical cells with darker nuclei and
// chromatin texture on a bright background. Blob count grows with area and
// never drops below 10.
CellsScene make_cells_scene(int h, int w, std::uint64_t seed);

struct UsafGroup {
    int width_px = 0;      // bar width; gaps match, length is 5x
    bool vertical_bars = false;
    int y0 = 0, x0 = 0;    // top-left of the group's bounding box
    // Probe segment crossing all three bars at right angles, used for
    // contrast measurements. Runs along x for vertical bars, along y
    // otherwise.
    int probe_fixed = 0;   // the constant coordinate
    int probe_lo = 0, probe_hi = 0;  // inclusive span of the varying coordinate
};

struct UsafScene {
    Image image;  // 1-channel, bars exactly 0 on background exactly 1
    std::vector<UsafGroup> groups;
};

// Three-bar resolution target. Bar widths follow a rounded geometric series
// from 8 px down to 1 px, each width in both orientations. Requires an image
// large enough to hold the layout (256x256 fits).
UsafScene make_usaf_scene(int h, int w);

// Band-limited noise texture: difference of two Gaussian smoothings of white
// noise, rescaled around mid-grey. 3 channels with slight tint variation.
Image make_texture(int h, int w, std::uint64_t seed);

struct SpotField {
    Image image;                 // 1-channel, dark background
    std::vector<std::pair<double, double>> centers;  // (cy, cx)
    double sigma = 1.2;          // Gaussian spot width
};

// Jittered grid of bright Gaussian point-like spots for width measurements.
// Yields at least 60 spots at 256x256 with the default spacing; sweeps that
// smear spots into long streaks pass a wider spacing to keep them separable.
SpotField make_spot_field(int h, int w, std::uint64_t seed, int spacing = 16);

// Uniform entry point used by the synthesizer CLI. Usaf ignores the seed.
Image make_phantom(PhantomKind kind, int h, int w, std::uint64_t seed);

}  // namespace dbmid
