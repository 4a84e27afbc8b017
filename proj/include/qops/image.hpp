/**
 * @file image.hpp
 * @brief Raster and quaternion-image containers plus the channel
 *        normalization and encoding rules shared by every workflow.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qops/quat.hpp"
#include "qops/split.hpp"

namespace qops {

/// 8-bit raster, row-major, interleaved. channels is 1 (gray) or 3 (RGB).
struct Raster {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
};

/// Row-major grid of quaternions. Built from RGB with zero scalar parts and
/// channels in [0,1]; mid-pipeline values may leave both constraints.
struct QuaternionImage {
    int width = 0;
    int height = 0;
    std::vector<Quaternion> data;
};

/// One real-valued channel grid; values are unbounded mid-pipeline.
struct ChannelImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;
};

/// How to_rgb maps channel values into [0,1] before quantization.
enum class RangeMode {
    per_channel,  ///< min-max over each channel of the image separately
    joint,        ///< one min-max over all three channels together
    truncate,     ///< clamp to [0,1], no rescale
    exemplar,     ///< affine map by stored per-channel ranges, then clamp
};

/// Encoding ranges. min/max are only read in exemplar mode; the other modes
/// derive them from the image (or ignore them entirely).
struct NormalizationRange {
    RangeMode mode = RangeMode::per_channel;
    double min[3] = {0.0, 0.0, 0.0};
    double max[3] = {1.0, 1.0, 1.0};
};

/// When a channel's span is below this, min-max rescale would divide by
/// (nearly) zero; the encoder falls back to clamping the raw values, which
/// keeps constant images stable and grayscale inputs a fixed point.
inline constexpr double kDegenerateSpan = 1e-12;

/// Epsilon floor applied to channels before logarithms or divisions in the
/// workflows; black pixels would otherwise hit ln(0).
inline constexpr double kChannelFloor = 1e-6;

/// Clamp to [0,1] and quantize to 8 bits, rounding half away from zero.
std::uint8_t quantize_unit(double v);

/// Lifts (r,g,b) to (0, r/255, g/255, b/255) per pixel. Requires 3 channels.
QuaternionImage from_rgb(const Raster& image);

/// Drops scalar parts, maps channels per the range mode, clamps, quantizes.
Raster to_rgb(const QuaternionImage& q, const NormalizationRange& range);

/// The i, j, k coefficient grids; the scalar grid is dropped.
struct Channels {
    ChannelImage c1;  ///< i coefficients (red pathway)
    ChannelImage c2;  ///< j coefficients (green pathway)
    ChannelImage c3;  ///< k coefficients (blue pathway)
};
Channels extract_channels(const QuaternionImage& q);

/// Rebuilds a pure quaternion image from three channel grids.
QuaternionImage compose_channels(const ChannelImage& c1, const ChannelImage& c2,
                                 const ChannelImage& c3);

/// Per-channel (min,max) of split(from_rgb(exemplar), spec), stored as an
/// exemplar-mode range for batch-stable encoding.
NormalizationRange exemplar_ranges(const Raster& exemplar, const SplitSpec& spec);

/// Returns a copy with every channel coefficient floored at eps.
QuaternionImage floor_channels(const QuaternionImage& q, double eps = kChannelFloor);

/// Expands a 1-channel raster to identical RGB channels; RGB passes through.
Raster expand_gray(const Raster& image);

enum class GamutSpace { rgb, hsv };

/// Point-cloud table of the image's distinct 24-bit colors: CSV text with
/// header c1,c2,c3,count, one row per color, sorted by packed RGB value.
/// RGB coordinates are channel values / 255; HSV uses the hexcone transform
/// with H in [0,360) and S,V in [0,1].
std::string export_gamut(const Raster& image, GamutSpace space);

}  // namespace qops
