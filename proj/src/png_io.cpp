/**
 * @file png_io.cpp
 * @brief libpng front-end. Reads 8-bit gray/RGB, writes gray/RGB, and keeps
 *        output atomic by writing to a temporary file and renaming.
 */

#include "qops/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "qops/error.hpp"

namespace qops {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors through longjmp; this handler converts the jump
// target into an exception once control returns to the caller frame.
void png_error_fn(png_structp png, png_const_charp msg) {
    (void)msg;
    longjmp(png_jmpbuf(png), 1);
}

void png_warn_fn(png_structp, png_const_charp) {}

}  // namespace

Raster read_png(const std::string& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) raise(Errc::io_failure, "cannot open " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
        raise(Errc::io_failure, path + " is not a PNG file");

    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warn_fn);
    if (!png) raise(Errc::io_failure, "libpng initialization failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        raise(Errc::io_failure, "libpng initialization failed");
    }

    Raster out;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(Errc::io_failure, "failed to decode " + path);
    }

    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(Errc::unsupported_format, path + " is 16-bit; only 8-bit images are supported");
    }
    if ((color_type & PNG_COLOR_MASK_ALPHA) != 0 ||
        png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(Errc::alpha_unsupported, path + " carries an alpha channel");
    }

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = static_cast<int>(png_get_channels(png, info));
    if (out.channels != 1 && out.channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(Errc::unsupported_format, path + " decodes to an unsupported channel count");
    }

    out.data.resize(static_cast<std::size_t>(out.width) * out.height * out.channels);
    const std::size_t stride = static_cast<std::size_t>(out.width) * out.channels;
    rows.resize(static_cast<std::size_t>(out.height));
    for (int y = 0; y < out.height; ++y) rows[static_cast<std::size_t>(y)] = out.data.data() + y * stride;

    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_png(const std::string& path, const Raster& image) {
    if (image.channels != 1 && image.channels != 3)
        raise(Errc::unsupported_format, "only 1- or 3-channel rasters can be written");
    if (image.width <= 0 || image.height <= 0)
        raise(Errc::invalid_argument, "cannot write an empty raster");
    if (image.data.size() !=
        static_cast<std::size_t>(image.width) * image.height * image.channels)
        raise(Errc::dimension_mismatch, "raster buffer does not match its dimensions");

    const std::string tmp = path + ".tmp";
    FilePtr file(std::fopen(tmp.c_str(), "wb"));
    if (!file) raise(Errc::io_failure, "cannot create " + tmp);

    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warn_fn);
    if (!png) raise(Errc::io_failure, "libpng initialization failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        raise(Errc::io_failure, "libpng initialization failed");
    }

    std::vector<png_const_bytep> rows(static_cast<std::size_t>(image.height));
    const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
    for (int y = 0; y < image.height; ++y)
        rows[static_cast<std::size_t>(y)] = image.data.data() + y * stride;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        file.reset();
        std::remove(tmp.c_str());
        raise(Errc::io_failure, "failed to encode " + path);
    }

    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8,
                 image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);

    if (std::fflush(file.get()) != 0) {
        file.reset();
        std::remove(tmp.c_str());
        raise(Errc::io_failure, "failed to flush " + tmp);
    }
    file.reset();
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        raise(Errc::io_failure, "failed to move " + tmp + " into place");
    }
}

}  // namespace qops
