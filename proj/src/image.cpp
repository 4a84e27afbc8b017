/**
 * @file image.cpp
 * @brief Raster/quaternion-image conversions, normalization, gamut export.
 */

#include "qops/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "qops/error.hpp"

namespace qops {

namespace {

struct MinMax {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();

    void feed(double v) {
        min = std::min(min, v);
        max = std::max(max, v);
    }
};

/// Affine map to [0,1] by (min,max), falling back to a plain clamp when the
/// span is degenerate. Every encoder path funnels through here.
inline double encode_value(double v, double lo, double hi) {
    const double span = hi - lo;
    if (span < kDegenerateSpan) return std::clamp(v, 0.0, 1.0);
    return std::clamp((v - lo) / span, 0.0, 1.0);
}

}  // namespace

std::uint8_t quantize_unit(double v) {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * c));
}

QuaternionImage from_rgb(const Raster& image) {
    if (image.channels != 3)
        raise(Errc::invalid_argument, "from_rgb needs a 3-channel raster");
    QuaternionImage q;
    q.width = image.width;
    q.height = image.height;
    q.data.resize(image.pixel_count());
    const std::uint8_t* p = image.data.data();
    for (std::size_t i = 0; i < q.data.size(); ++i, p += 3) {
        q.data[i] = Quaternion{0.0, p[0] / 255.0, p[1] / 255.0, p[2] / 255.0};
    }
    return q;
}

Raster to_rgb(const QuaternionImage& q, const NormalizationRange& range) {
    Raster out;
    out.width = q.width;
    out.height = q.height;
    out.channels = 3;
    out.data.resize(q.data.size() * 3);

    double lo[3] = {0.0, 0.0, 0.0};
    double hi[3] = {1.0, 1.0, 1.0};

    switch (range.mode) {
        case RangeMode::truncate:
            // lo/hi of (0,1) make encode_value a plain clamp
            break;
        case RangeMode::exemplar:
            for (int c = 0; c < 3; ++c) {
                lo[c] = range.min[c];
                hi[c] = range.max[c];
            }
            break;
        case RangeMode::per_channel: {
            MinMax mm[3];
            for (const Quaternion& p : q.data) {
                mm[0].feed(p.x);
                mm[1].feed(p.y);
                mm[2].feed(p.z);
            }
            for (int c = 0; c < 3; ++c) {
                lo[c] = mm[c].min;
                hi[c] = mm[c].max;
            }
            break;
        }
        case RangeMode::joint: {
            MinMax mm;
            for (const Quaternion& p : q.data) {
                mm.feed(p.x);
                mm.feed(p.y);
                mm.feed(p.z);
            }
            for (int c = 0; c < 3; ++c) {
                lo[c] = mm.min;
                hi[c] = mm.max;
            }
            break;
        }
    }

    std::uint8_t* o = out.data.data();
    for (const Quaternion& p : q.data) {
        *o++ = quantize_unit(encode_value(p.x, lo[0], hi[0]));
        *o++ = quantize_unit(encode_value(p.y, lo[1], hi[1]));
        *o++ = quantize_unit(encode_value(p.z, lo[2], hi[2]));
    }
    return out;
}

Channels extract_channels(const QuaternionImage& q) {
    Channels ch;
    for (ChannelImage* c : {&ch.c1, &ch.c2, &ch.c3}) {
        c->width = q.width;
        c->height = q.height;
        c->values.resize(q.data.size());
    }
    for (std::size_t i = 0; i < q.data.size(); ++i) {
        ch.c1.values[i] = q.data[i].x;
        ch.c2.values[i] = q.data[i].y;
        ch.c3.values[i] = q.data[i].z;
    }
    return ch;
}

QuaternionImage compose_channels(const ChannelImage& c1, const ChannelImage& c2,
                                 const ChannelImage& c3) {
    if (c1.width != c2.width || c1.width != c3.width || c1.height != c2.height ||
        c1.height != c3.height)
        raise(Errc::dimension_mismatch, "channel grids disagree in shape");
    QuaternionImage q;
    q.width = c1.width;
    q.height = c1.height;
    q.data.resize(c1.values.size());
    for (std::size_t i = 0; i < q.data.size(); ++i) {
        q.data[i] = Quaternion{0.0, c1.values[i], c2.values[i], c3.values[i]};
    }
    return q;
}

NormalizationRange exemplar_ranges(const Raster& exemplar, const SplitSpec& spec) {
    if (exemplar.pixel_count() == 0)
        raise(Errc::invalid_argument, "exemplar image is empty");
    const QuaternionImage q = from_rgb(expand_gray(exemplar));
    MinMax mm[3];
    for (const Quaternion& p : q.data) {
        const Quaternion s = split(p, spec);
        mm[0].feed(s.x);
        mm[1].feed(s.y);
        mm[2].feed(s.z);
    }
    NormalizationRange r;
    r.mode = RangeMode::exemplar;
    for (int c = 0; c < 3; ++c) {
        r.min[c] = mm[c].min;
        r.max[c] = mm[c].max;
    }
    return r;
}

QuaternionImage floor_channels(const QuaternionImage& q, double eps) {
    QuaternionImage out = q;
    for (Quaternion& p : out.data) {
        p.x = std::max(p.x, eps);
        p.y = std::max(p.y, eps);
        p.z = std::max(p.z, eps);
    }
    return out;
}

Raster expand_gray(const Raster& image) {
    if (image.channels == 3) return image;
    if (image.channels != 1)
        raise(Errc::unsupported_format, "raster must have 1 or 3 channels");
    Raster out;
    out.width = image.width;
    out.height = image.height;
    out.channels = 3;
    out.data.resize(image.pixel_count() * 3);
    for (std::size_t i = 0; i < image.pixel_count(); ++i) {
        const std::uint8_t v = image.data[i];
        out.data[3 * i + 0] = v;
        out.data[3 * i + 1] = v;
        out.data[3 * i + 2] = v;
    }
    return out;
}

std::string export_gamut(const Raster& image, GamutSpace space) {
    const Raster rgb = expand_gray(image);

    // Count distinct 24-bit colors; the map keys are packed RGB so rows
    // come out sorted by packed value.
    std::map<std::uint32_t, std::size_t> counts;
    const std::uint8_t* p = rgb.data.data();
    for (std::size_t i = 0; i < rgb.pixel_count(); ++i, p += 3) {
        const std::uint32_t key = (static_cast<std::uint32_t>(p[0]) << 16) |
                                  (static_cast<std::uint32_t>(p[1]) << 8) |
                                  static_cast<std::uint32_t>(p[2]);
        ++counts[key];
    }

    std::string out = "c1,c2,c3,count\n";
    char line[128];
    for (const auto& [key, count] : counts) {
        const double r = ((key >> 16) & 0xFF) / 255.0;
        const double g = ((key >> 8) & 0xFF) / 255.0;
        const double b = (key & 0xFF) / 255.0;
        double c1 = r, c2 = g, c3 = b;
        if (space == GamutSpace::hsv) {
            const double mx = std::max({r, g, b});
            const double mn = std::min({r, g, b});
            const double d = mx - mn;
            double h = 0.0;
            if (d > 0.0) {
                if (mx == r) h = 60.0 * std::fmod((g - b) / d, 6.0);
                else if (mx == g) h = 60.0 * ((b - r) / d + 2.0);
                else h = 60.0 * ((r - g) / d + 4.0);
                if (h < 0.0) h += 360.0;
            }
            c1 = h;
            c2 = (mx > 0.0) ? d / mx : 0.0;
            c3 = mx;
        }
        std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g,%zu\n", c1, c2, c3, count);
        out += line;
    }
    return out;
}

}  // namespace qops
