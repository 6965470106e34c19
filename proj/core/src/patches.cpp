#include "dbmid/patches.hpp"

#include "dbmid/errors.hpp"

namespace dbmid {

std::vector<int> patch_positions(int dim, int size, int stride) {
    if (size <= 0 || stride <= 0) throw ArgumentError("patch size and stride must be positive");
    if (size > dim) throw ArgumentError("patch size exceeds image dimension");
    std::vector<int> pos;
    for (int p = 0; p + size <= dim; p += stride) pos.push_back(p);
    if (pos.empty() || pos.back() + size < dim) pos.push_back(dim - size);
    return pos;
}

Image crop_patch(const Image& img, int y0, int x0, int size) {
    if (y0 < 0 || x0 < 0 || y0 + size > img.h || x0 + size > img.w) {
        throw ArgumentError("patch crop out of bounds");
    }
    Image out;
    out.h = size;
    out.w = size;
    out.c = img.c;
    out.data.resize(size_t(size) * size * img.c);
    out.z_offset_um = img.z_offset_um;
    out.stain = img.stain;
    for (int c = 0; c < img.c; ++c) {
        const float* src = img.plane(c);
        float* dst = out.plane(c);
        for (int y = 0; y < size; ++y) {
            const float* row = src + size_t(y0 + y) * img.w + x0;
            std::copy(row, row + size, dst + size_t(y) * size);
        }
    }
    return out;
}

std::vector<Image> extract_patches(const Image& img, int size, int stride) {
    img.validate();
    const std::vector<int> ys = patch_positions(img.h, size, stride);
    const std::vector<int> xs = patch_positions(img.w, size, stride);
    std::vector<Image> patches;
    patches.reserve(ys.size() * xs.size());
    for (int y0 : ys)
        for (int x0 : xs) patches.push_back(crop_patch(img, y0, x0, size));
    return patches;
}

}  // namespace dbmid
