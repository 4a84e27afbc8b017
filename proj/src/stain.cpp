/**
 * @file stain.cpp
 * @brief Optical density, principal-directions stain estimation, and the
 *        Beer-Lambert forward model.
 */

#include "qops/stain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "qops/error.hpp"

namespace qops {

namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

/// Cyclic Jacobi eigen decomposition of a symmetric 3x3 matrix. Returns
/// eigenvalues in `values` and matching unit eigenvectors in the columns of
/// `vectors`, both sorted by descending eigenvalue. Deterministic: fixed
/// sweep order, fixed convergence test, no pivot search.
void jacobi_eigen(Mat3 a, Vec3& values, Mat3& vectors) {
    Mat3 v = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

    double fro = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) fro += a[r][c] * a[r][c];
    fro = std::sqrt(fro);
    const double tol = 1e-14 * std::max(fro, 1.0);

    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = std::sqrt(a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]);
        if (off <= tol) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(a[p][q]) <= tol * 1e-2) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::array<int, 3> order = {0, 1, 2};
    const Vec3 diag = {a[0][0], a[1][1], a[2][2]};
    std::sort(order.begin(), order.end(), [&](int x, int y) { return diag[x] > diag[y]; });

    for (int c = 0; c < 3; ++c) {
        values[c] = diag[order[c]];
        for (int r = 0; r < 3; ++r) vectors[r][c] = v[r][order[c]];
    }

    // Sign convention: largest-magnitude component positive. Ties cannot
    // occur for the clouds we feed this (distinct magnitudes after
    // normalization), and an exact tie would just pick the first index.
    for (int c = 0; c < 3; ++c) {
        int arg = 0;
        for (int r = 1; r < 3; ++r)
            if (std::abs(vectors[r][c]) > std::abs(vectors[arg][c])) arg = r;
        if (vectors[arg][c] < 0.0)
            for (int r = 0; r < 3; ++r) vectors[r][c] = -vectors[r][c];
    }
}

/// Linear-interpolation percentile of a sorted vector, p in [0,100].
double percentile_sorted(const std::vector<double>& sorted, double p) {
    const double pos = (p / 100.0) * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

OpticalDensityImage optical_density(const Raster& image, double eps) {
    if (image.channels != 3) raise(Errc::invalid_argument, "optical density needs an RGB image");
    OpticalDensityImage out;
    out.width = image.width;
    out.height = image.height;
    out.od.resize(image.data.size());
    for (std::size_t i = 0; i < image.data.size(); ++i) {
        const double v = static_cast<double>(image.data[i]) / 255.0;
        out.od[i] = std::max(0.0, -std::log(v + eps));
    }
    return out;
}

StainBasis estimate_macenko(const Raster& image, double od_threshold, double percentile,
                            bool swap) {
    const OpticalDensityImage od = optical_density(image);

    std::vector<Vec3> cloud;
    cloud.reserve(od.od.size() / 3);
    for (std::size_t i = 0; i + 2 < od.od.size(); i += 3) {
        const Vec3 p = {od.od[i], od.od[i + 1], od.od[i + 2]};
        if (norm3(p) >= od_threshold) cloud.push_back(p);
    }
    if (cloud.size() < 2)
        raise(Errc::degenerate_stains, "fewer than two pixels above the OD threshold");

    // Second-moment matrix about the origin; OD vectors live in the
    // positive octant, so no centering.
    Mat3 scatter = {};
    for (const Vec3& p : cloud)
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) scatter[r][c] += p[r] * p[c];
    const double inv_n = 1.0 / static_cast<double>(cloud.size());
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) scatter[r][c] *= inv_n;

    Vec3 lam;
    Mat3 evec;
    jacobi_eigen(scatter, lam, evec);
    if (lam[1] <= 1e-12 * lam[0])
        raise(Errc::degenerate_stains, "optical density cloud is effectively 1-dimensional");

    const Vec3 e1 = {evec[0][0], evec[1][0], evec[2][0]};
    const Vec3 e2 = {evec[0][1], evec[1][1], evec[2][1]};

    // Project onto the dominant plane and find the angular extremes at the
    // requested percentile and its complement.
    std::vector<double> angles;
    angles.reserve(cloud.size());
    for (const Vec3& p : cloud) angles.push_back(std::atan2(dot3(p, e2), dot3(p, e1)));
    std::sort(angles.begin(), angles.end());
    const double phi_lo = percentile_sorted(angles, percentile);
    const double phi_hi = percentile_sorted(angles, 100.0 - percentile);

    const auto plane_dir = [&](double phi) {
        const double c = std::cos(phi), s = std::sin(phi);
        return unit_direction(c * e1[0] + s * e2[0], c * e1[1] + s * e2[1], c * e1[2] + s * e2[2]);
    };
    Direction a = plane_dir(phi_lo);
    Direction b = plane_dir(phi_hi);

    // s1 is the vector with the larger red-OD component (hematoxylin-first
    // ordering for H&E style images); swap flips the assignment.
    if (b.x > a.x) std::swap(a, b);
    if (swap) std::swap(a, b);

    StainBasis basis;
    basis.s1 = a;
    basis.s2 = b;
    basis.source = StainBasis::Source::macenko;
    return basis;
}

Raster forward_model(const Direction& v1, const Direction& v2, const ChannelImage& c1,
                     const ChannelImage& c2) {
    if (c1.width != c2.width || c1.height != c2.height || c1.values.size() != c2.values.size())
        raise(Errc::dimension_mismatch, "concentration grids differ in shape");
    for (const ChannelImage* c : {&c1, &c2})
        for (double v : c->values)
            if (v < 0.0) raise(Errc::invalid_argument, "concentrations must be nonnegative");

    Raster out;
    out.width = c1.width;
    out.height = c1.height;
    out.channels = 3;
    out.data.resize(c1.values.size() * 3);

    const double s1[3] = {v1.x, v1.y, v1.z};
    const double s2[3] = {v2.x, v2.y, v2.z};
    for (std::size_t i = 0; i < c1.values.size(); ++i) {
        for (int ch = 0; ch < 3; ++ch) {
            const double od = c1.values[i] * s1[ch] + c2.values[i] * s2[ch];
            const double v = 255.0 * std::exp(-od);
            out.data[3 * i + ch] =
                static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
        }
    }
    return out;
}

}  // namespace qops
