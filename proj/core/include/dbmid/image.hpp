#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dbmid {

// Four-way blur category driving pipeline routing. Order is fixed: it is the
// tie-break order for classification and the column order of confusion
// matrices.
enum class BlurClass : int { InFocus = 0, Defocus = 1, Motion = 2, Mixed = 3 };

constexpr int kNumBlurClasses = 4;

const char* to_string(BlurClass c);
BlurClass blur_class_from_string(const std::string& s);  // throws ArgumentError

// Planar floating-point raster, values in [0,1]. Layout is channel-major:
// data[c * h * w + y * w + x]. C is 1 (grayscale) or 3.
struct Image {
    int h = 0;
    int w = 0;
    int c = 0;
    std::vector<float> data;

    // Optional provenance carried through loads and synthesis.
    std::string source_path;
    std::optional<double> z_offset_um;
    std::string stain;  // TCT/HE/IHC/target/phantom, free-form

    Image() = default;
    Image(int height, int width, int channels, float fill = 0.0f)
        : h(height), w(width), c(channels),
          data(size_t(height) * width * channels, fill) {}

    float& at(int y, int x, int ch = 0) { return data[(size_t(ch) * h + y) * w + x]; }
    float at(int y, int x, int ch = 0) const { return data[(size_t(ch) * h + y) * w + x]; }

    float* plane(int ch) { return data.data() + size_t(ch) * h * w; }
    const float* plane(int ch) const { return data.data() + size_t(ch) * h * w; }

    size_t pixel_count() const { return size_t(h) * w; }
    bool same_shape(const Image& o) const { return h == o.h && w == o.w && c == o.c; }

    // Throws ArgumentError when the H>=8, W>=8, C in {1,3} invariant fails.
    void validate() const;
};

// Clamp every value into [0,1] in place.
void clamp01(Image& img);

// Replicate a grayscale image to 3 channels; 3-channel input is returned
// unchanged. The networks always consume 3 channels.
Image to_3_channels(const Image& img);

// BT.601 luminance; 1-channel output. Grayscale input is copied.
Image luminance(const Image& img);

Image center_crop(const Image& img, int size);
Image resize_bilinear(const Image& img, int out_h, int out_w);
Image rotate90_ccw(const Image& img);

// x -> 0.5 + scale * (x - 0.5), clamped. Stands in for acquisition-chain
// contrast differences between instruments.
Image scale_contrast(const Image& img, double scale);

double mean_intensity(const Image& img);

// Series of images of one field at different focus offsets.
struct FocalStack {
    std::vector<Image> images;
    std::vector<double> z_offsets_um;
    int in_focus_index = 0;

    // Enforces: z strictly increasing, matching lengths, uniform shapes,
    // in_focus_index in range. Throws ArgumentError.
    void validate() const;
};

}  // namespace dbmid
