/**
 * @file workflows.cpp
 * @brief End-to-end image procedures built on the orthogonal planes split.
 */

#include "qops/workflows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qops/error.hpp"
#include "qops/metrics.hpp"

namespace qops {

namespace {

// ============================================================================
// Shared helpers
// ============================================================================

QuaternionImage split_image(const QuaternionImage& image, const SplitSpec& spec) {
    QuaternionImage out;
    out.width = image.width;
    out.height = image.height;
    out.data.resize(image.data.size());
    for (std::size_t i = 0; i < image.data.size(); ++i)
        out.data[i] = split(image.data[i], spec);
    return out;
}

/// Min-max to [0,1] in place; a degenerate span falls back to clamping so
/// constant inputs stay stable.
void minmax_normalize(std::vector<double>& values) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo;
    if (span < kDegenerateSpan) {
        for (double& v : values) v = std::clamp(v, 0.0, 1.0);
    } else {
        for (double& v : values) v = std::clamp((v - lo) / span, 0.0, 1.0);
    }
}

/// Joint min-max over all three channels, same degenerate fallback.
void joint_normalize(Channels& ch) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const ChannelImage* c : {&ch.c1, &ch.c2, &ch.c3}) {
        for (double v : c->values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double span = hi - lo;
    for (ChannelImage* c : {&ch.c1, &ch.c2, &ch.c3}) {
        if (span < kDegenerateSpan) {
            for (double& v : c->values) v = std::clamp(v, 0.0, 1.0);
        } else {
            for (double& v : c->values) v = std::clamp((v - lo) / span, 0.0, 1.0);
        }
    }
}

Raster encode_gray(const ChannelImage& c) {
    Raster out;
    out.width = c.width;
    out.height = c.height;
    out.channels = 1;
    out.data.resize(c.values.size());
    for (std::size_t i = 0; i < c.values.size(); ++i) out.data[i] = quantize_unit(c.values[i]);
    return out;
}

Raster encode_rgb_truncate(const Channels& ch) {
    Raster out;
    out.width = ch.c1.width;
    out.height = ch.c1.height;
    out.channels = 3;
    out.data.resize(ch.c1.values.size() * 3);
    for (std::size_t i = 0; i < ch.c1.values.size(); ++i) {
        out.data[3 * i + 0] = quantize_unit(ch.c1.values[i]);
        out.data[3 * i + 1] = quantize_unit(ch.c2.values[i]);
        out.data[3 * i + 2] = quantize_unit(ch.c3.values[i]);
    }
    return out;
}

/// The shared front half of the re-staining and stain-separation flows:
/// preprocess, drop scalars, jointly normalize, rebuild as a pure image.
/// `with_preprocess` false skips the transform (re-colorized passes).
QuaternionImage normalized_transform(const QuaternionImage& image, bool with_preprocess) {
    QuaternionImage stage =
        with_preprocess ? preprocess_transform(floor_channels(image)) : image;
    Channels ch = extract_channels(stage);
    joint_normalize(ch);
    return compose_channels(ch.c1, ch.c2, ch.c3);
}

const ChannelImage& select_channel(const Channels& ch, int index) {
    switch (index) {
        case 0: return ch.c1;
        case 1: return ch.c2;
        case 2: return ch.c3;
        default:
            raise(Errc::bad_channel_selection, "channel index must be 0, 1, or 2");
    }
}

/// Histogram ceiling: values in [0, X] stretch to [0, 1], the rest clamp.
void scale_histogram(ChannelImage& c, double x_scale) {
    for (double& v : c.values) v = std::clamp(v / x_scale, 0.0, 1.0);
}

/// Places one channel threefold into the imaginary parts: v -> vi + vj + vk.
QuaternionImage lift_gray(const ChannelImage& c) {
    return compose_channels(c, c, c);
}

/// The targeted coloring pass shared by both re-staining flows: lift the
/// stain channel to a gray quaternion image, take the minus split against
/// the raw user color, truncate, and quantize.
Raster colorize_stain_channel(const ChannelImage& c, const Direction& target) {
    const SplitSpec spec(Sign::minus, target, target);
    const QuaternionImage lifted = lift_gray(c);
    const QuaternionImage qm = split_image(lifted, spec);
    Channels ch = extract_channels(qm);
    for (ChannelImage* ci : {&ch.c1, &ch.c2, &ch.c3})
        for (double& v : ci->values) v = std::clamp(v, 0.0, 1.0);
    return encode_rgb_truncate(ch);
}

Raster merge_rasters(const Raster& a, const Raster& b, bool use_max) {
    Raster out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = use_max ? std::max(a.data[i], b.data[i])
                              : static_cast<std::uint8_t>(a.data[i] | b.data[i]);
    }
    return out;
}

void validate_restain(const RestainParams& params, std::size_t n_colors, bool same_pass) {
    if (params.target_colors.size() != n_colors)
        raise(Errc::invalid_argument, "expected " + std::to_string(n_colors) + " target colors");
    if (params.channels.size() != n_colors)
        raise(Errc::bad_channel_selection,
              "expected one stain channel per target color");
    for (int c : params.channels)
        if (c < 0 || c > 2) raise(Errc::bad_channel_selection, "channel index must be 0, 1, or 2");
    if (same_pass) {
        for (std::size_t a = 0; a < params.channels.size(); ++a)
            for (std::size_t b = a + 1; b < params.channels.size(); ++b)
                if (params.channels[a] == params.channels[b])
                    raise(Errc::bad_channel_selection, "duplicate channel index");
    }
    if (!(params.x_scale > 0.0 && params.x_scale <= 1.0))
        raise(Errc::invalid_argument, "x_scale must lie in (0, 1]");
}

}  // namespace

// ============================================================================
// Presets
// ============================================================================

ContrastParams contrast_preset_natural() {
    return ContrastParams{};  // alpha 10, beta 1, gamma -1, delta 1
}

ContrastParams contrast_preset_ct() {
    ContrastParams p;
    p.alpha = 1.0;
    p.beta = 1e5;
    p.gamma = 1e4;
    p.delta = 1e4;
    return p;
}

// ============================================================================
// Re-colorization
// ============================================================================

Raster recolorize(const QuaternionImage& image, const SplitSpec& spec,
                  const NormalizationRange& range) {
    return to_rgb(split_image(image, spec), range);
}

// ============================================================================
// De-colorization
// ============================================================================

Raster decolorize(const QuaternionImage& image, const Direction& f) {
    const SplitSpec spec(Sign::minus, f, f);
    const QuaternionImage qm = split_image(image, spec);

    ChannelImage mean;
    mean.width = qm.width;
    mean.height = qm.height;
    mean.values.resize(qm.data.size());
    for (std::size_t i = 0; i < qm.data.size(); ++i) {
        const Quaternion& p = qm.data[i];
        mean.values[i] = (p.x + p.y + p.z) / 3.0;
    }
    minmax_normalize(mean.values);
    return encode_gray(mean);
}

Raster decolorize_p1(const QuaternionImage& image) { return decolorize(image, mu(7)); }

Raster decolorize_p2a(const QuaternionImage& image) {
    return decolorize(image, unit_direction(0.30, 0.50, 0.05));
}

void decolor_p2b_encoding(const QuaternionImage& image, const DecolorP2bParams& params,
                          double out_ev[3]) {
    if (image.data.empty()) raise(Errc::invalid_argument, "empty image");

    // Statistics run on the 8-bit scale the channels came from.
    Channels ch = extract_channels(image);
    for (ChannelImage* c : {&ch.c1, &ch.c2, &ch.c3})
        for (double& v : c->values) v *= 255.0;

    const ChannelStats st[3] = {channel_stats(ch.c1), channel_stats(ch.c2),
                                channel_stats(ch.c3)};

    // Each statistic is remixed from the originals simultaneously:
    // f_a times its own value plus the product across the three channels.
    const double pm = st[0].mean * st[1].mean * st[2].mean;
    const double p1 = st[0].norm1 * st[1].norm1 * st[2].norm1;
    const double p2 = st[0].norm2 * st[1].norm2 * st[2].norm2;
    const double pf = st[0].frobenius * st[1].frobenius * st[2].frobenius;

    const double factors[3] = {params.f_1, params.f_2, params.f_3};
    for (int c = 0; c < 3; ++c) {
        const double mn = params.f_a * st[c].mean + pm;
        const double n1 = params.f_a * st[c].norm1 + p1;
        const double n2 = params.f_a * st[c].norm2 + p2;
        const double fr = params.f_a * st[c].frobenius + pf;
        out_ev[c] = factors[c] * std::pow(mn * n1 + n2 * fr, params.f_b);
    }
    if (out_ev[0] == 0.0 && out_ev[1] == 0.0 && out_ev[2] == 0.0)
        raise(Errc::zero_encoding, "all encoding values vanished");
}

Raster decolorize_p2b(const QuaternionImage& image, const DecolorP2bParams& params) {
    double ev[3];
    decolor_p2b_encoding(image, params, ev);
    return decolorize(image, unit_direction(ev[0], ev[1], ev[2]));
}

// ============================================================================
// Pre-processing transform
// ============================================================================

QuaternionImage preprocess_transform(const QuaternionImage& image) {
    QuaternionImage out;
    out.width = image.width;
    out.height = image.height;
    out.data.resize(image.data.size());
    for (std::size_t i = 0; i < image.data.size(); ++i) {
        const Quaternion& q = image.data[i];
        out.data[i] = hamilton(ln(q), exp(q));
    }
    return out;
}

// ============================================================================
// Re-staining
// ============================================================================

Raster restain_two(const QuaternionImage& image, const RestainParams& params) {
    validate_restain(params, 2, true);

    const QuaternionImage tinq = normalized_transform(image, true);
    const SplitSpec gray_split(Sign::plus, mu(7), mu(7));
    const Channels ch = extract_channels(split_image(tinq, gray_split));

    Raster merged;
    for (std::size_t s = 0; s < 2; ++s) {
        ChannelImage c = select_channel(ch, params.channels[s]);
        scale_histogram(c, params.x_scale);
        const Raster colored = colorize_stain_channel(c, params.target_colors[s]);
        merged = (s == 0) ? colored : merge_rasters(merged, colored, params.use_max_merge);
    }
    return merged;
}

Raster restain_multi(const QuaternionImage& image, const RestainParams& params) {
    validate_restain(params, 3, false);
    if (params.recolor_steps.size() != 2)
        raise(Errc::invalid_argument, "three-color re-staining needs exactly 2 recolor steps");

    const SplitSpec gray_split(Sign::plus, mu(7), mu(7));

    // Counterstain channel from the direct pre-processed pass.
    std::vector<ChannelImage> stains;
    {
        const QuaternionImage tinq = normalized_transform(image, true);
        const Channels ch = extract_channels(split_image(tinq, gray_split));
        stains.push_back(select_channel(ch, params.channels[0]));
    }

    // Remaining stains from re-colorized renditions of the original image;
    // those passes run without the pre-processing transform.
    NormalizationRange per_channel;
    for (std::size_t s = 0; s < params.recolor_steps.size(); ++s) {
        const Raster recolored = recolorize(image, params.recolor_steps[s], per_channel);
        const QuaternionImage tinq = normalized_transform(from_rgb(recolored), false);
        const Channels ch = extract_channels(split_image(tinq, gray_split));
        stains.push_back(select_channel(ch, params.channels[s + 1]));
    }

    Raster merged;
    for (std::size_t s = 0; s < 3; ++s) {
        scale_histogram(stains[s], params.x_scale);
        const Raster colored = colorize_stain_channel(stains[s], params.target_colors[s]);
        merged = (s == 0) ? colored : merge_rasters(merged, colored, params.use_max_merge);
    }
    return merged;
}

// ============================================================================
// Contrast enhancement
// ============================================================================

Raster contrast_enhance(const QuaternionImage& image, const ContrastParams& params) {
    QuaternionImage out;
    out.width = image.width;
    out.height = image.height;
    out.data.resize(image.data.size());

    for (std::size_t i = 0; i < image.data.size(); ++i) {
        const Quaternion& q = image.data[i];
        const Quaternion eq = exp(q);
        // For a pure q the vector part of q + e^q cannot vanish where the
        // scalar part does, so the inverse below is always defined.
        const Quaternion inv_sum = inverse(add(q, eq));

        Quaternion h = scale(params.alpha * 0.5, q);
        h = sub(h, scale(params.beta, inverse(eq)));
        h = add(h, scale(params.gamma, hamilton(eq, inv_sum)));
        h = add(h, scale(params.delta, hamilton(pow(q, 0.5), inv_sum)));

        out.data[i] = scale(0.5, add(h, apply_map(q, params.c_u, params.c_l)));
    }

    NormalizationRange per_channel;
    return to_rgb(out, per_channel);
}

// ============================================================================
// Stain separation
// ============================================================================

namespace {

/// Duplicates are rejected only when `same_pass` is set: picking one channel
/// twice from a single pass would emit the same raster twice, while the
/// multi-color flows legitimately reuse an index across different passes.
void validate_keep(const std::vector<int>& keep, std::size_t expected, bool same_pass) {
    if (keep.empty() || (expected != 0 && keep.size() != expected))
        raise(Errc::bad_channel_selection, "wrong number of channels to keep");
    for (int c : keep)
        if (c < 0 || c > 2) raise(Errc::bad_channel_selection, "channel index must be 0, 1, or 2");
    if (!same_pass) return;
    for (std::size_t a = 0; a < keep.size(); ++a)
        for (std::size_t b = a + 1; b < keep.size(); ++b)
            if (keep[a] == keep[b]) raise(Errc::bad_channel_selection, "duplicate channel index");
}

SplitSpec basis_split(const StainBasis& basis) {
    if (basis.source == StainBasis::Source::mu7) return SplitSpec(Sign::plus, mu(7), mu(7));
    return SplitSpec(Sign::plus, basis.s1, basis.s2);
}

/// One full separation pass: preprocess (optional), joint normalization,
/// plus split against the basis, truncation to [0,1].
Channels separation_pass(const QuaternionImage& image, const StainBasis& basis,
                         bool with_preprocess) {
    const QuaternionImage tinq = normalized_transform(image, with_preprocess);
    Channels ch = extract_channels(split_image(tinq, basis_split(basis)));
    for (ChannelImage* c : {&ch.c1, &ch.c2, &ch.c3})
        for (double& v : c->values) v = std::clamp(v, 0.0, 1.0);
    return ch;
}

}  // namespace

std::vector<Raster> stain_separate_two(const QuaternionImage& image, const StainBasis& basis,
                                       const std::vector<int>& keep) {
    validate_keep(keep, 0, true);  // one or two channels, caller's choice
    if (keep.size() > 2) raise(Errc::bad_channel_selection, "two-color separation emits at most 2 channels");
    const Channels ch = separation_pass(image, basis, true);
    std::vector<Raster> out;
    out.reserve(keep.size());
    for (int c : keep) out.push_back(encode_gray(select_channel(ch, c)));
    return out;
}

std::vector<Raster> stain_separate_multi(const QuaternionImage& image, const StainBasis& basis,
                                         const std::vector<SplitSpec>& recolor_steps,
                                         const std::vector<int>& keep) {
    validate_keep(keep, 3, false);
    if (recolor_steps.size() != 2)
        raise(Errc::invalid_argument, "three-color separation needs exactly 2 recolor steps");

    std::vector<Raster> out;
    out.reserve(3);

    // Counterstain from the direct pass.
    {
        const Channels ch = separation_pass(image, basis, true);
        out.push_back(encode_gray(select_channel(ch, keep[0])));
    }

    // Each remaining stain: re-colorize the original, then run the full
    // pass (including pre-processing) on the rendition.
    NormalizationRange per_channel;
    for (std::size_t s = 0; s < recolor_steps.size(); ++s) {
        const Raster recolored = recolorize(image, recolor_steps[s], per_channel);
        const Channels ch = separation_pass(from_rgb(recolored), basis, true);
        out.push_back(encode_gray(select_channel(ch, keep[s + 1])));
    }
    return out;
}

}  // namespace qops
