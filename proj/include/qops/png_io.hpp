/**
 * @file png_io.hpp
 * @brief PNG front-end for 8-bit grayscale and 24-bit RGB rasters.
 */

#pragma once

#include <string>

#include "qops/image.hpp"

namespace qops {

/// Reads an 8-bit gray or RGB PNG. Palette images are expanded to RGB and
/// sub-8-bit gray is widened. Images with an alpha channel (including a
/// tRNS chunk) are rejected, as are 16-bit images.
Raster read_png(const std::string& path);

/// Writes a 1- or 3-channel raster. The file is written to a temporary name
/// in the same directory and renamed into place, so a failed write never
/// leaves a partial output behind.
void write_png(const std::string& path, const Raster& image);

}  // namespace qops
