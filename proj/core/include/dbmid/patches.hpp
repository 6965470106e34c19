#pragma once

#include <vector>

#include "dbmid/image.hpp"

namespace dbmid {

// Top-left offsets of a patch grid covering [0, dim): multiples of `stride`,
// plus a final edge-aligned position so the last patch ends at dim.
std::vector<int> patch_positions(int dim, int size, int stride);

// Crop of `img` at (y0, x0) with the given side length.
Image crop_patch(const Image& img, int y0, int x0, int size);

// All patches of the grid in row-major position order. size must not exceed
// either image dimension.
std::vector<Image> extract_patches(const Image& img, int size, int stride);

}  // namespace dbmid
