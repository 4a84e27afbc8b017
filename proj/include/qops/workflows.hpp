/**
 * @file workflows.hpp
 * @brief The seven end-to-end image procedures built on the planes split:
 *        re-colorization, re-staining (2 and 3 colors), de-colorization
 *        (P1, P2a, P2b), contrast enhancement, and stain separation
 *        (2 and 3 colors).
 *
 * Every workflow is a deterministic pure function: identical inputs and
 * parameters produce bit-identical rasters.
 */

#pragma once

#include <vector>

#include "qops/image.hpp"
#include "qops/split.hpp"

namespace qops {

// ============================================================================
// Parameter types
// ============================================================================

/// Contrast map parameters. c_u and c_l are fixed pure quaternions.
struct ContrastParams {
    double alpha = 10.0;
    double beta = 1.0;
    double gamma = -1.0;
    double delta = 1.0;
    Direction c_u = direction(1.0, 1.0, 1.0);
    Direction c_l = direction(0.01, 0.01, 0.01);
};

/// Preset for natural and histology images.
ContrastParams contrast_preset_natural();
/// Preset for low-dose CT style grayscale images.
ContrastParams contrast_preset_ct();

/// Fixed factors of the adaptive decolorization encoding.
struct DecolorP2bParams {
    double f_a = 0.68;  ///< linear mixing weight
    double f_b = 1.80;  ///< encoding exponent
    double f_1 = 0.36;  ///< red channel factor
    double f_2 = 1.30;  ///< green channel factor
    double f_3 = 0.07;  ///< blue channel factor
};

/// Re-staining parameters. target_colors are the user colors (raw channel
/// triples, typically hex/255); channels picks which split channel carries
/// each stain (0=red pathway, 1=green, 2=blue), one entry per color;
/// recolor_steps configures the extra passes needed when n_c = 3.
struct RestainParams {
    std::vector<Direction> target_colors;
    std::vector<int> channels;
    double x_scale = 0.30;  ///< histogram ceiling X; values map v -> clamp(v/X, 0, 1)
    std::vector<SplitSpec> recolor_steps;
    bool use_max_merge = false;  ///< per-pixel max instead of bitwise OR
};

/// Two (optionally three) stain direction vectors and where they came from.
struct StainBasis {
    enum class Source { mu7, macenko, manual };
    Direction s1;
    Direction s2;
    Source source = Source::mu7;
};

// ============================================================================
// Workflows
// ============================================================================

/// Re-colorization: split, extract channels, normalize per the supplied
/// range (per-channel by default, exemplar for batch-stable encoding).
Raster recolorize(const QuaternionImage& image, const SplitSpec& spec,
                  const NormalizationRange& range);

/// De-colorization: minus split with g = f, arithmetic mean of the three
/// channels, min-max normalization, 8-bit encoding.
Raster decolorize(const QuaternionImage& image, const Direction& f);

/// Gray-line variant; grayscale inputs pass through bit-exactly.
Raster decolorize_p1(const QuaternionImage& image);

/// Fixed-weight variant with p = 0.30i + 0.50j + 0.05k normalized.
Raster decolorize_p2a(const QuaternionImage& image);

/// Adaptive variant: per-image channel statistics are mixed and encoded
/// into the weight vector (ev1, ev2, ev3).
Raster decolorize_p2b(const QuaternionImage& image,
                      const DecolorP2bParams& params = {});

/// The encoding values used by decolorize_p2b, exposed for inspection.
/// Raises ZeroEncoding when all three vanish.
void decolor_p2b_encoding(const QuaternionImage& image, const DecolorP2bParams& params,
                          double out_ev[3]);

/// Radial pre-processing TI = ln(q) * exp(q) per pixel. Channels must be
/// floored (see floor_channels) before calling; black pixels would hit
/// ln(0). Scalar parts of the result are generally nonzero and retained.
QuaternionImage preprocess_transform(const QuaternionImage& image);

/// Two-color re-staining. See RestainParams for knobs.
Raster restain_two(const QuaternionImage& image, const RestainParams& params);

/// Three-color re-staining with (n_c - 1) = 2 configured recolor steps.
Raster restain_multi(const QuaternionImage& image, const RestainParams& params);

/// Contrast enhancement via the modular map h plus the c_u () c_l term.
/// Channels must be floored beforehand.
Raster contrast_enhance(const QuaternionImage& image, const ContrastParams& params);

/// Two-color stain separation. The split runs with (f,g) = (mu7, mu7) when
/// the basis source is mu7, otherwise (s1, s2). `keep` selects which of the
/// three channels are emitted, one grayscale raster per entry.
std::vector<Raster> stain_separate_two(const QuaternionImage& image,
                                       const StainBasis& basis,
                                       const std::vector<int>& keep);

/// Three-color stain separation: the counterstain channel comes from the
/// direct pass, the remaining stains from passes run after each configured
/// re-colorization of the original image. keep[0] applies to the direct
/// pass, keep[1] and keep[2] to the two recolored passes.
std::vector<Raster> stain_separate_multi(const QuaternionImage& image,
                                         const StainBasis& basis,
                                         const std::vector<SplitSpec>& recolor_steps,
                                         const std::vector<int>& keep);

}  // namespace qops
