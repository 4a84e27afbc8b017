/**
 * @file stain.hpp
 * @brief Stain-vector estimation from the optical-density point cloud and
 *        the Beer-Lambert forward model used as its test oracle.
 */

#pragma once

#include "qops/image.hpp"
#include "qops/workflows.hpp"

namespace qops {

/// Optical density per channel: OD = -ln((v + eps) / 1) for v in [0,1].
struct OpticalDensityImage {
    int width = 0;
    int height = 0;
    std::vector<double> od;  ///< interleaved r,g,b OD values, all finite and >= 0
};

OpticalDensityImage optical_density(const Raster& image, double eps = kChannelFloor);

/// Estimates the two stain vectors by principal directions of the OD cloud.
///
/// Pixels with OD length below od_threshold are discarded as near
/// transparent. The dominant plane comes from a deterministic eigen
/// decomposition of the second-moment matrix of the surviving OD vectors,
/// with the sign convention that each eigenvector's largest-magnitude
/// component is positive. Robust extreme directions are taken at the given
/// angular percentile and its complement (default 1 and 99). The result is
/// ordered so s1 carries the larger red-OD component; set swap to flip.
/// Raises DegenerateStains when fewer than two pixels survive or the cloud
/// has fewer than two significant principal directions.
StainBasis estimate_macenko(const Raster& image, double od_threshold = 0.15,
                            double percentile = 1.0, bool swap = false);

/// Beer-Lambert synthesis: pixel channel = round(255 * exp(-(c1*v1 + c2*v2))).
/// Concentration grids must be the same size and nonnegative.
Raster forward_model(const Direction& v1, const Direction& v2,
                     const ChannelImage& c1, const ChannelImage& c2);

}  // namespace qops
