#include "dbmid/image_io.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "dbmid/errors.hpp"

namespace dbmid {

namespace {

std::string lower_ext(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    return ext;
}

float scale_of(int bit_depth) { return bit_depth == 16 ? 65535.0f : 255.0f; }

struct FileCloser {
    void operator()(FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

// ---- PNG ----

Image load_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open '" + path + "' for reading");

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw FormatError("'" + path + "' is not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw IoError("libpng allocation failed");

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("libpng failed to decode '" + path + "'");
    }

    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int w = int(png_get_image_width(png, info));
    const int h = int(png_get_image_height(png, info));
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (bit_depth == 16) png_set_swap(png);  // PNG stores 16-bit big-endian
    png_read_update_info(png, info);

    bit_depth = png_get_bit_depth(png, info);
    color_type = png_get_color_type(png, info);
    const int channels = (color_type == PNG_COLOR_TYPE_GRAY) ? 1 : 3;
    if (bit_depth != 8 && bit_depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG bit depth in '" + path + "'");
    }
    if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG color type in '" + path + "'");
    }

    const size_t row_bytes = png_get_rowbytes(png, info);
    std::vector<png_byte> raster(row_bytes * h);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = raster.data() + row_bytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Image img(h, w, channels);
    const float inv = 1.0f / scale_of(bit_depth);
    for (int y = 0; y < h; ++y) {
        if (bit_depth == 8) {
            const png_byte* r = raster.data() + row_bytes * y;
            for (int x = 0; x < w; ++x)
                for (int ch = 0; ch < channels; ++ch)
                    img.at(y, x, ch) = float(r[x * channels + ch]) * inv;
        } else {
            const uint16_t* r = reinterpret_cast<const uint16_t*>(raster.data() + row_bytes * y);
            for (int x = 0; x < w; ++x)
                for (int ch = 0; ch < channels; ++ch)
                    img.at(y, x, ch) = float(r[x * channels + ch]) * inv;
        }
    }
    return img;
}

void save_png(const Image& img, const std::string& path, int bit_depth) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open '" + path + "' for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw IoError("libpng allocation failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng failed to write '" + path + "'");
    }

    png_init_io(png, fp.get());
    const int color_type = img.c == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, img.w, img.h, bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);

    const float scale = scale_of(bit_depth);
    const size_t row_elems = size_t(img.w) * img.c;
    if (bit_depth == 8) {
        std::vector<png_byte> row(row_elems);
        for (int y = 0; y < img.h; ++y) {
            for (int x = 0; x < img.w; ++x)
                for (int ch = 0; ch < img.c; ++ch)
                    row[x * img.c + ch] = png_byte(std::lround(std::clamp(img.at(y, x, ch), 0.0f, 1.0f) * scale));
            png_write_row(png, row.data());
        }
    } else {
        std::vector<uint16_t> row(row_elems);
        for (int y = 0; y < img.h; ++y) {
            for (int x = 0; x < img.w; ++x)
                for (int ch = 0; ch < img.c; ++ch)
                    row[x * img.c + ch] = uint16_t(std::lround(std::clamp(img.at(y, x, ch), 0.0f, 1.0f) * scale));
            png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
        }
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// ---- TIFF ----

Image load_tiff(const std::string& path) {
    TIFFSetWarningHandler(nullptr);
    TIFF* tif = TIFFOpen(path.c_str(), "r");
    if (!tif) throw IoError("cannot open '" + path + "' for reading");

    uint32_t w = 0, h = 0;
    uint16_t bits = 0, samples = 1, sample_format = SAMPLEFORMAT_UINT;
    TIFFGetField(tif, TIFFTAG_IMAGEWIDTH, &w);
    TIFFGetField(tif, TIFFTAG_IMAGELENGTH, &h);
    TIFFGetField(tif, TIFFTAG_BITSPERSAMPLE, &bits);
    TIFFGetFieldDefaulted(tif, TIFFTAG_SAMPLESPERPIXEL, &samples);
    TIFFGetFieldDefaulted(tif, TIFFTAG_SAMPLEFORMAT, &sample_format);

    if ((bits != 8 && bits != 16) || sample_format != SAMPLEFORMAT_UINT) {
        TIFFClose(tif);
        throw FormatError("unsupported TIFF sample format in '" + path + "'");
    }
    if (samples != 1 && samples != 3) {
        TIFFClose(tif);
        throw FormatError("unsupported TIFF channel count in '" + path + "'");
    }

    Image img{int(h), int(w), int(samples)};
    const float inv = 1.0f / scale_of(bits);
    std::vector<uint8_t> scanline(TIFFScanlineSize(tif));
    for (uint32_t y = 0; y < h; ++y) {
        if (TIFFReadScanline(tif, scanline.data(), y) < 0) {
            TIFFClose(tif);
            throw FormatError("TIFF scanline read failed in '" + path + "'");
        }
        if (bits == 8) {
            for (uint32_t x = 0; x < w; ++x)
                for (int ch = 0; ch < int(samples); ++ch)
                    img.at(int(y), int(x), ch) = float(scanline[x * samples + ch]) * inv;
        } else {
            const uint16_t* r = reinterpret_cast<const uint16_t*>(scanline.data());
            for (uint32_t x = 0; x < w; ++x)
                for (int ch = 0; ch < int(samples); ++ch)
                    img.at(int(y), int(x), ch) = float(r[x * samples + ch]) * inv;
        }
    }
    TIFFClose(tif);
    return img;
}

void save_tiff(const Image& img, const std::string& path, int bit_depth) {
    TIFF* tif = TIFFOpen(path.c_str(), "w");
    if (!tif) throw IoError("cannot open '" + path + "' for writing");

    TIFFSetField(tif, TIFFTAG_IMAGEWIDTH, uint32_t(img.w));
    TIFFSetField(tif, TIFFTAG_IMAGELENGTH, uint32_t(img.h));
    TIFFSetField(tif, TIFFTAG_BITSPERSAMPLE, uint16_t(bit_depth));
    TIFFSetField(tif, TIFFTAG_SAMPLESPERPIXEL, uint16_t(img.c));
    TIFFSetField(tif, TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_UINT);
    TIFFSetField(tif, TIFFTAG_PHOTOMETRIC, img.c == 1 ? PHOTOMETRIC_MINISBLACK : PHOTOMETRIC_RGB);
    TIFFSetField(tif, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
    TIFFSetField(tif, TIFFTAG_COMPRESSION, COMPRESSION_NONE);
    TIFFSetField(tif, TIFFTAG_ROWSPERSTRIP, uint32_t(1));

    const float scale = scale_of(bit_depth);
    const size_t row_elems = size_t(img.w) * img.c;
    std::vector<uint8_t> row8(row_elems);
    std::vector<uint16_t> row16(row_elems);
    for (int y = 0; y < img.h; ++y) {
        void* buf;
        if (bit_depth == 8) {
            for (int x = 0; x < img.w; ++x)
                for (int ch = 0; ch < img.c; ++ch)
                    row8[x * img.c + ch] = uint8_t(std::lround(std::clamp(img.at(y, x, ch), 0.0f, 1.0f) * scale));
            buf = row8.data();
        } else {
            for (int x = 0; x < img.w; ++x)
                for (int ch = 0; ch < img.c; ++ch)
                    row16[x * img.c + ch] = uint16_t(std::lround(std::clamp(img.at(y, x, ch), 0.0f, 1.0f) * scale));
            buf = row16.data();
        }
        if (TIFFWriteScanline(tif, buf, uint32_t(y)) < 0) {
            TIFFClose(tif);
            throw IoError("TIFF scanline write failed in '" + path + "'");
        }
    }
    TIFFClose(tif);
}

}  // namespace

Image load_image(const std::string& path) {
    const std::string ext = lower_ext(path);
    Image img;
    if (ext == "png") img = load_png(path);
    else if (ext == "tif" || ext == "tiff") img = load_tiff(path);
    else throw FormatError("unsupported image format: '" + path + "'");
    img.source_path = path;
    img.validate();
    return img;
}

void save_image(const Image& img, const std::string& path, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        throw ArgumentError("bit depth must be 8 or 16");
    img.validate();
    const std::string ext = lower_ext(path);
    if (ext == "png") save_png(img, path, bit_depth);
    else if (ext == "tif" || ext == "tiff") save_tiff(img, path, bit_depth);
    else throw FormatError("unsupported image format: '" + path + "'");
}

}  // namespace dbmid
