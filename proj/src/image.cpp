// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#include "delight/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>

namespace delight {

Raster quantize8(const Raster& img) {
    Raster out(img.c, img.h, img.w);
    for (std::size_t i = 0; i < img.v.size(); ++i) {
        real x = std::min(1.0, std::max(0.0, img.v[i]));
        out.v[i] = std::round(x * 255.0) / 255.0;
    }
    return out;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

void write_png(const std::string& path, const Raster& img) {
    check(img.c == 1 || img.c == 3, "write_png: only 1- or 3-channel rasters");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    check(fp != nullptr, "write_png: cannot open " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    check(png != nullptr, "write_png: png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("write_png: png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("write_png: libpng error writing " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.w), static_cast<png_uint_32>(img.h), 8,
                 img.c == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(static_cast<std::size_t>(img.w) * img.c);
    for (int i = 0; i < img.h; ++i) {
        for (int j = 0; j < img.w; ++j)
            for (int ch = 0; ch < img.c; ++ch) {
                real x = std::min(1.0, std::max(0.0, img.at(ch, i, j)));
                row[static_cast<std::size_t>(j) * img.c + ch] =
                    static_cast<png_byte>(std::lround(x * 255.0));
            }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Raster read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    check(fp != nullptr, "read_png: cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    check(png != nullptr, "read_png: png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("read_png: png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("read_png: libpng error reading " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);

    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    int channels = png_get_channels(png, info);
    check(channels == 1 || channels == 3, "read_png: unsupported channel count in " + path);

    std::vector<png_byte> row(static_cast<std::size_t>(w) * channels);
    Raster img(channels, static_cast<int>(h), static_cast<int>(w));
    for (png_uint_32 i = 0; i < h; ++i) {
        png_read_row(png, row.data(), nullptr);
        for (png_uint_32 j = 0; j < w; ++j)
            for (int ch = 0; ch < channels; ++ch)
                img.at(ch, static_cast<int>(i), static_cast<int>(j)) =
                    static_cast<real>(row[static_cast<std::size_t>(j) * channels + ch]) / 255.0;
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

} // namespace delight
