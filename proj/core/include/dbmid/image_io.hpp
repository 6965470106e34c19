#pragma once

#include <string>

#include "dbmid/image.hpp"

namespace dbmid {

// PNG and TIFF, 8- or 16-bit, 1 or 3 channels. Values are scaled to [0,1]
// by the format's max integer value. Format is chosen by file extension
// (.png / .tif / .tiff, case-insensitive).
Image load_image(const std::string& path);

void save_image(const Image& img, const std::string& path, int bit_depth = 8);

}  // namespace dbmid
