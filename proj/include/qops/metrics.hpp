/**
 * @file metrics.hpp
 * @brief Channel statistics for the adaptive decolorization encoding and
 *        reference image-quality metrics (MSE, PSNR, SSIM).
 */

#pragma once

#include "qops/image.hpp"

namespace qops {

/// The four per-channel statistics, each divided by 255 so an all-white
/// channel has mean 1. norm1 is the maximum absolute column sum of the
/// stored grid (columns run along the width axis), norm2 the largest
/// singular value, frobenius the entrywise 2-norm.
struct ChannelStats {
    double norm1 = 0.0;
    double norm2 = 0.0;
    double frobenius = 0.0;
    double mean = 0.0;
};

/// Statistics of a channel holding 8-bit values (0..255 stored as double).
/// The spectral norm uses deterministic power iteration on A^T A with an
/// all-ones start vector, so results are reproducible bit for bit.
ChannelStats channel_stats(const ChannelImage& cc);

/// Mean squared error over all channels, on [0,1]-scaled values.
double mse(const Raster& a, const Raster& b);

/// 10*log10(1/MSE); identical images report +infinity.
double psnr(const Raster& a, const Raster& b);

/// Structural similarity with an 11x11 Gaussian window (sigma 1.5),
/// K1=0.01, K2=0.03, dynamic range 1.0, averaged over the valid region
/// (no padding). Multi-channel rasters average the per-channel scores.
double ssim(const Raster& a, const Raster& b);

}  // namespace qops
