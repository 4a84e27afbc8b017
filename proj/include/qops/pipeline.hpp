/**
 * @file pipeline.hpp
 * @brief Direction-pair enumeration, batch dataset transformation with
 *        exemplar-anchored encoding, tiled execution, and the linear
 *        time-complexity benchmark.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qops/image.hpp"
#include "qops/split.hpp"

namespace qops {

// ============================================================================
// Combination enumeration
// ============================================================================

/// One direction-pair combination (mu_i, mu_j) with i <= j plus the sign.
struct ComboSpec {
    Sign sign;
    int i_index;
    int j_index;
};

/// All 91 combinations for one sign: the 13 diagonal f()f maps plus the 78
/// pairs with i < j, in lexicographic (i, j) order.
std::vector<ComboSpec> enumerate_combinations(Sign sign);

// ============================================================================
// Batch transformation
// ============================================================================

/// One emitted output in a batch run.
struct ManifestRow {
    std::string input;
    Sign sign;
    int i_index;
    int j_index;
    std::string output;
    double min_r, max_r, min_g, max_g, min_b, max_b;
};

struct BatchResult {
    std::vector<ManifestRow> rows;
    std::vector<std::string> errors;  ///< per-file failures; the run continues
};

/// Applies every combination to every PNG in dataset_dir, encoding with
/// ranges precomputed once per combination from the exemplar so all outputs
/// share one scale. keep_fraction < 1 randomly drops outputs under the
/// given seed (deterministic across runs). Inputs are processed in sorted
/// filename order.
BatchResult batch_transform(const std::string& dataset_dir, const Raster& exemplar,
                            const std::vector<Sign>& signs, const std::string& out_dir,
                            double keep_fraction = 1.0, std::uint64_t seed = 0);

/// The manifest as CSV: header plus one row per emitted output.
std::string manifest_csv(const BatchResult& result);

// ============================================================================
// Tiled execution
// ============================================================================

/// A raster-to-raster transform that preserves pixel positions, safe to
/// evaluate on any sub-rectangle (i.e. pixelwise once ranges are fixed).
using TileWorkflow = std::function<Raster(const Raster&)>;

/// Runs the workflow over square tiles and stitches the result. With a
/// fixed encoding range the output is bit-identical to the untiled call for
/// any tile size. threads <= 0 picks the hardware concurrency.
Raster tile_apply(const Raster& image, const TileWorkflow& workflow, int tile_size,
                  int threads = 0);

/// Per-channel min/max of the split image computed tile by tile and merged,
/// for verifying that the merged reduction equals the single-pass range.
NormalizationRange merged_tile_ranges(const QuaternionImage& image, const SplitSpec& spec,
                                      int tile_size);

// ============================================================================
// Time-complexity benchmark
// ============================================================================

/// One timing sample: the split evaluated over `pixels` pixels.
struct BenchRecord {
    std::size_t pixels = 0;
    double seconds = 0.0;   ///< best-of-3 per sign, averaged over both signs
    std::string image_id;
};

struct BenchResult {
    std::vector<BenchRecord> records;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Shrinks the image by 5% of the original size per step with bicubic
/// resampling and times only the split evaluation at each size, single
/// threaded. Raises ImageTooSmall if any step would drop below 64x64.
/// The fit is least squares of seconds against pixel count.
BenchResult bench_time_complexity(const Raster& image, int steps, const Direction& f,
                                  const Direction& g);

/// Bench records as CSV (`pixels,seconds` rows) plus the one-line fit
/// summary `slope,intercept,r2`.
std::string bench_csv(const BenchResult& result);

/// Separable Catmull-Rom bicubic resize with edge clamping.
Raster resize_bicubic(const Raster& image, int new_width, int new_height);

}  // namespace qops
