#include "dbmid/image.hpp"

#include <algorithm>
#include <cmath>

#include "dbmid/errors.hpp"

namespace dbmid {

const char* to_string(BlurClass c) {
    switch (c) {
        case BlurClass::InFocus: return "in_focus";
        case BlurClass::Defocus: return "defocus";
        case BlurClass::Motion: return "motion";
        case BlurClass::Mixed: return "mixed";
    }
    return "?";
}

BlurClass blur_class_from_string(const std::string& s) {
    if (s == "in_focus") return BlurClass::InFocus;
    if (s == "defocus") return BlurClass::Defocus;
    if (s == "motion") return BlurClass::Motion;
    if (s == "mixed") return BlurClass::Mixed;
    throw ArgumentError("unknown blur class: '" + s + "'");
}

void Image::validate() const {
    if (h < 8 || w < 8) throw ArgumentError("image too small: needs H,W >= 8");
    if (c != 1 && c != 3) throw ArgumentError("image channels must be 1 or 3");
    if (data.size() != size_t(h) * w * c) throw ArgumentError("image buffer size mismatch");
}

void clamp01(Image& img) {
    for (auto& v : img.data) v = std::clamp(v, 0.0f, 1.0f);
}

Image to_3_channels(const Image& img) {
    if (img.c == 3) return img;
    Image out(img.h, img.w, 3);
    out.source_path = img.source_path;
    out.z_offset_um = img.z_offset_um;
    out.stain = img.stain;
    for (int ch = 0; ch < 3; ++ch)
        std::copy(img.plane(0), img.plane(0) + img.pixel_count(), out.plane(ch));
    return out;
}

Image luminance(const Image& img) {
    if (img.c == 1) return img;
    Image out(img.h, img.w, 1);
    const float* r = img.plane(0);
    const float* g = img.plane(1);
    const float* b = img.plane(2);
    for (size_t i = 0; i < img.pixel_count(); ++i)
        out.data[i] = 0.299f * r[i] + 0.587f * g[i] + 0.114f * b[i];
    return out;
}

Image center_crop(const Image& img, int size) {
    if (size > img.h || size > img.w) throw ArgumentError("crop size exceeds image");
    const int y0 = (img.h - size) / 2;
    const int x0 = (img.w - size) / 2;
    Image out(size, size, img.c);
    for (int ch = 0; ch < img.c; ++ch)
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                out.at(y, x, ch) = img.at(y0 + y, x0 + x, ch);
    return out;
}

Image resize_bilinear(const Image& img, int out_h, int out_w) {
    Image out(out_h, out_w, img.c);
    const double sy = double(img.h) / out_h;
    const double sx = double(img.w) / out_w;
    for (int ch = 0; ch < img.c; ++ch) {
        for (int y = 0; y < out_h; ++y) {
            const double fy = std::max(0.0, (y + 0.5) * sy - 0.5);
            const int y0 = std::min(int(fy), img.h - 1);
            const int y1 = std::min(y0 + 1, img.h - 1);
            const double wy = fy - y0;
            for (int x = 0; x < out_w; ++x) {
                const double fx = std::max(0.0, (x + 0.5) * sx - 0.5);
                const int x0 = std::min(int(fx), img.w - 1);
                const int x1 = std::min(x0 + 1, img.w - 1);
                const double wx = fx - x0;
                const double top = img.at(y0, x0, ch) * (1 - wx) + img.at(y0, x1, ch) * wx;
                const double bot = img.at(y1, x0, ch) * (1 - wx) + img.at(y1, x1, ch) * wx;
                out.at(y, x, ch) = float(top * (1 - wy) + bot * wy);
            }
        }
    }
    return out;
}

Image rotate90_ccw(const Image& img) {
    Image out(img.w, img.h, img.c);
    for (int ch = 0; ch < img.c; ++ch)
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x < img.w; ++x)
                out.at(img.w - 1 - x, y, ch) = img.at(y, x, ch);
    return out;
}

Image scale_contrast(const Image& img, double scale) {
    Image out = img;
    for (auto& v : out.data)
        v = float(std::clamp(0.5 + scale * (double(v) - 0.5), 0.0, 1.0));
    return out;
}

double mean_intensity(const Image& img) {
    double s = 0.0;
    for (float v : img.data) s += v;
    return img.data.empty() ? 0.0 : s / double(img.data.size());
}

void FocalStack::validate() const {
    if (images.empty()) throw ArgumentError("focal stack is empty");
    if (images.size() != z_offsets_um.size())
        throw ArgumentError("focal stack images/z_offsets length mismatch");
    if (in_focus_index < 0 || size_t(in_focus_index) >= images.size())
        throw ArgumentError("focal stack in_focus_index out of range");
    for (size_t i = 1; i < z_offsets_um.size(); ++i)
        if (!(z_offsets_um[i] > z_offsets_um[i - 1]))
            throw ArgumentError("focal stack z_offsets must be strictly increasing");
    for (const auto& im : images)
        if (!im.same_shape(images.front()))
            throw ArgumentError("focal stack images must share one shape");
}

}  // namespace dbmid
