/**
 * @file metrics.cpp
 * @brief Channel statistics and reference image-quality metrics.
 */

#include "qops/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qops/error.hpp"

namespace qops {

namespace {

constexpr int kPowerIterMax = 10000;
// Stagnation threshold for the power iteration. Tighter than the accuracy
// actually needed so the brute-force oracle comparison has headroom.
constexpr double kPowerIterTol = 1e-15;

/// Largest singular value by power iteration on A^T A, matrix free. The
/// all-ones start vector always overlaps the top singular vector of a
/// nonnegative matrix, which channel grids are.
double spectral_norm(const ChannelImage& cc) {
    const int h = cc.height;
    const int w = cc.width;
    if (w == 0 || h == 0) return 0.0;

    std::vector<double> v(static_cast<std::size_t>(w), 1.0 / std::sqrt(static_cast<double>(w)));
    std::vector<double> u(static_cast<std::size_t>(h));
    std::vector<double> t(static_cast<std::size_t>(w));

    double sigma = 0.0;
    for (int iter = 0; iter < kPowerIterMax; ++iter) {
        // u = A v
        for (int r = 0; r < h; ++r) {
            const double* row = cc.values.data() + static_cast<std::size_t>(r) * w;
            double acc = 0.0;
            for (int c = 0; c < w; ++c) acc += row[c] * v[static_cast<std::size_t>(c)];
            u[static_cast<std::size_t>(r)] = acc;
        }
        // t = A^T u
        std::fill(t.begin(), t.end(), 0.0);
        for (int r = 0; r < h; ++r) {
            const double* row = cc.values.data() + static_cast<std::size_t>(r) * w;
            const double ur = u[static_cast<std::size_t>(r)];
            for (int c = 0; c < w; ++c) t[static_cast<std::size_t>(c)] += row[c] * ur;
        }
        // Rayleigh quotient with |v| = 1 gives |A v|^2, so sigma = sqrt of it.
        double lam = 0.0;
        for (int c = 0; c < w; ++c) lam += v[static_cast<std::size_t>(c)] * t[static_cast<std::size_t>(c)];
        const double next = std::sqrt(std::max(lam, 0.0));

        double tn = 0.0;
        for (double x : t) tn += x * x;
        tn = std::sqrt(tn);
        if (tn == 0.0) return 0.0;  // A^T A v vanished; matrix is zero on v's support
        for (int c = 0; c < w; ++c) v[static_cast<std::size_t>(c)] = t[static_cast<std::size_t>(c)] / tn;

        if (std::abs(next - sigma) <= kPowerIterTol * std::max(1.0, next)) {
            sigma = next;
            break;
        }
        sigma = next;
    }
    return sigma;
}

void require_same_shape(const Raster& a, const Raster& b) {
    if (a.width != b.width || a.height != b.height || a.channels != b.channels)
        raise(Errc::dimension_mismatch, "rasters disagree in shape");
}

/// SSIM over one channel plane with an 11x11 Gaussian window, sigma 1.5,
/// averaged over window positions that lie fully inside the image.
double ssim_plane(const std::vector<double>& a, const std::vector<double>& b, int w, int h) {
    constexpr int kWin = 11;
    constexpr int kHalf = kWin / 2;
    constexpr double kC1 = 0.01 * 0.01;
    constexpr double kC2 = 0.03 * 0.03;

    double weights[kWin][kWin];
    double wsum = 0.0;
    for (int dy = 0; dy < kWin; ++dy) {
        for (int dx = 0; dx < kWin; ++dx) {
            const double ry = dy - kHalf, rx = dx - kHalf;
            weights[dy][dx] = std::exp(-(rx * rx + ry * ry) / (2.0 * 1.5 * 1.5));
            wsum += weights[dy][dx];
        }
    }
    for (int dy = 0; dy < kWin; ++dy)
        for (int dx = 0; dx < kWin; ++dx) weights[dy][dx] /= wsum;

    double total = 0.0;
    std::size_t count = 0;
    for (int y = kHalf; y < h - kHalf; ++y) {
        for (int x = kHalf; x < w - kHalf; ++x) {
            double ma = 0.0, mb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
            for (int dy = 0; dy < kWin; ++dy) {
                const int yy = y + dy - kHalf;
                for (int dx = 0; dx < kWin; ++dx) {
                    const int xx = x + dx - kHalf;
                    const double wv = weights[dy][dx];
                    const double av = a[static_cast<std::size_t>(yy) * w + xx];
                    const double bv = b[static_cast<std::size_t>(yy) * w + xx];
                    ma += wv * av;
                    mb += wv * bv;
                    saa += wv * av * av;
                    sbb += wv * bv * bv;
                    sab += wv * av * bv;
                }
            }
            const double va = saa - ma * ma;
            const double vb = sbb - mb * mb;
            const double cab = sab - ma * mb;
            const double num = (2.0 * ma * mb + kC1) * (2.0 * cab + kC2);
            const double den = (ma * ma + mb * mb + kC1) * (va + vb + kC2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

}  // namespace

ChannelStats channel_stats(const ChannelImage& cc) {
    if (cc.values.empty()) raise(Errc::invalid_argument, "channel_stats of an empty channel");

    const int h = cc.height;
    const int w = cc.width;
    ChannelStats s;

    // Maximum absolute column sum; columns run along the width axis.
    std::vector<double> colsum(static_cast<std::size_t>(w), 0.0);
    double sq = 0.0;
    double sum = 0.0;
    for (int r = 0; r < h; ++r) {
        const double* row = cc.values.data() + static_cast<std::size_t>(r) * w;
        for (int c = 0; c < w; ++c) {
            const double v = row[c];
            colsum[static_cast<std::size_t>(c)] += std::abs(v);
            sq += v * v;
            sum += v;
        }
    }
    s.norm1 = *std::max_element(colsum.begin(), colsum.end()) / 255.0;
    s.frobenius = std::sqrt(sq) / 255.0;
    s.mean = sum / (static_cast<double>(w) * h) / 255.0;
    s.norm2 = spectral_norm(cc) / 255.0;
    return s;
}

double mse(const Raster& a, const Raster& b) {
    require_same_shape(a, b);
    if (a.data.empty()) raise(Errc::invalid_argument, "mse of empty rasters");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = (static_cast<double>(a.data[i]) - static_cast<double>(b.data[i])) / 255.0;
        acc += d * d;
    }
    return acc / static_cast<double>(a.data.size());
}

double psnr(const Raster& a, const Raster& b) {
    const double m = mse(a, b);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / m);
}

double ssim(const Raster& a, const Raster& b) {
    require_same_shape(a, b);
    if (a.width < 11 || a.height < 11)
        raise(Errc::image_too_small, "ssim needs at least an 11x11 image");

    const std::size_t n = a.pixel_count();
    std::vector<double> pa(n), pb(n);
    double total = 0.0;
    for (int c = 0; c < a.channels; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            pa[i] = a.data[i * a.channels + c] / 255.0;
            pb[i] = b.data[i * b.channels + c] / 255.0;
        }
        total += ssim_plane(pa, pb, a.width, a.height);
    }
    return total / a.channels;
}

}  // namespace qops
