/**
 * @file quat.hpp
 * @brief Real quaternion arithmetic and transcendental functions.
 *
 * Values are plain structs of doubles and every operation is a pure
 * function, so concurrent use needs no synchronization. Tolerances used by
 * callers assume IEEE double semantics: algebraic identities hold to about
 * 1e-12 and transcendental round trips to about 1e-9.
 */

#pragma once

#include <algorithm>
#include <cmath>

#include "qops/error.hpp"

namespace qops {

/// Below this vector-part length the trigonometric factors in exp/ln/pow
/// collapse to their real-axis limits (sin t / t handled as 1).
inline constexpr double kVectorEps = 1e-12;

/// q = w + x i + y j + z k with the usual non-commutative product.
struct Quaternion {
    double w = 0.0;  ///< scalar part
    double x = 0.0;  ///< i coefficient
    double y = 0.0;  ///< j coefficient
    double z = 0.0;  ///< k coefficient
};

/// A pure quaternion x i + y j + z k used as an axis or color direction.
/// The `unit` flag records whether the coefficients are normalized.
struct Direction {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    bool unit = false;
};

// ============================================================================
// Coefficient-wise operations
// ============================================================================

inline Quaternion add(const Quaternion& p, const Quaternion& q) {
    return {p.w + q.w, p.x + q.x, p.y + q.y, p.z + q.z};
}

inline Quaternion sub(const Quaternion& p, const Quaternion& q) {
    return {p.w - q.w, p.x - q.x, p.y - q.y, p.z - q.z};
}

inline Quaternion scale(double lambda, const Quaternion& q) {
    return {lambda * q.w, lambda * q.x, lambda * q.y, lambda * q.z};
}

inline Quaternion conjugate(const Quaternion& q) {
    return {q.w, -q.x, -q.y, -q.z};
}

inline double dot(const Quaternion& p, const Quaternion& q) {
    return p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z;
}

inline double norm(const Quaternion& q) {
    return std::sqrt(dot(q, q));
}

inline bool operator==(const Quaternion& p, const Quaternion& q) {
    return p.w == q.w && p.x == q.x && p.y == q.y && p.z == q.z;
}

inline bool operator!=(const Quaternion& p, const Quaternion& q) {
    return !(p == q);
}

// ============================================================================
// Hamilton product and inverse
// ============================================================================

/// Non-commutative quaternion product. The four-term expansions are written
/// out in a fixed order so results are reproducible across call sites.
inline Quaternion hamilton(const Quaternion& p, const Quaternion& q) {
    return {
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    };
}

/// Two-sided inverse conj(q)/|q|^2; hamilton(q, inverse(q)) = 1 to ~1e-12.
inline Quaternion inverse(const Quaternion& q) {
    const double n2 = dot(q, q);
    if (n2 == 0.0) raise(Errc::zero_quaternion, "inverse of the zero quaternion");
    return {q.w / n2, -q.x / n2, -q.y / n2, -q.z / n2};
}

// ============================================================================
// Transcendental functions
// ============================================================================

/// exp(q) = e^w (cos|v| + (v/|v|) sin|v|) with v the vector part. The
/// real-axis limit sin|v|/|v| -> 1 is taken explicitly for tiny |v|.
inline Quaternion exp(const Quaternion& q) {
    const double vn = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
    const double ew = std::exp(q.w);
    const double s = (vn < kVectorEps) ? ew : ew * std::sin(vn) / vn;
    return {ew * std::cos(vn), s * q.x, s * q.y, s * q.z};
}

/// ln(q) = ln|q| + (arccos(w/|q|)/|v|) v, the principal branch with the
/// rotation angle in [0, pi].
inline Quaternion ln(const Quaternion& q) {
    const double n = norm(q);
    if (n == 0.0) raise(Errc::zero_quaternion, "logarithm of the zero quaternion");
    const double vn = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
    if (vn < kVectorEps) {
        if (q.w < 0.0)
            raise(Errc::undefined_log, "negative real axis has no principal logarithm");
        return {std::log(n), 0.0, 0.0, 0.0};
    }
    const double theta = std::acos(std::clamp(q.w / n, -1.0, 1.0));
    const double t = theta / vn;
    return {std::log(n), t * q.x, t * q.y, t * q.z};
}

/// Polar decomposition q = |q| (cos(angle) + axis sin(angle)).
struct PolarForm {
    double magnitude = 0.0;    ///< |q|
    double angle = 0.0;        ///< arccos(w/|q|), in [0, pi]
    Direction axis;            ///< unit vector part; meaningless unless defined
    bool axis_defined = false; ///< false when the vector part vanishes
};

inline PolarForm polar(const Quaternion& q) {
    const double n = norm(q);
    if (n == 0.0) raise(Errc::zero_quaternion, "polar form of the zero quaternion");
    const double vn = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
    PolarForm p;
    p.magnitude = n;
    p.angle = std::acos(std::clamp(q.w / n, -1.0, 1.0));
    if (vn >= kVectorEps) {
        p.axis = Direction{q.x / vn, q.y / vn, q.z / vn, true};
        p.axis_defined = true;
    }
    return p;
}

/// pow(q, n) = |q|^n (cos(n theta) + axis sin(n theta)) via the principal
/// polar form. Zero base: 0^n = 0 for n > 0, otherwise an error. A base on
/// the negative real axis only has a principal power when n theta lands
/// back on the real axis (integer exponents).
inline Quaternion pow(const Quaternion& q, double n) {
    const double qn = norm(q);
    if (qn == 0.0) {
        if (n > 0.0) return {};
        raise(Errc::zero_quaternion, "pow of zero base with non-positive exponent");
    }
    const double vn = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
    const double theta = std::acos(std::clamp(q.w / qn, -1.0, 1.0));
    const double mag = std::pow(qn, n);
    if (vn < kVectorEps) {
        const double s = std::sin(n * theta);
        if (std::abs(s) < kVectorEps) return {mag * std::cos(n * theta), 0.0, 0.0, 0.0};
        raise(Errc::undefined_log, "negative real base with non-integer exponent");
    }
    const double c = std::cos(n * theta);
    const double s = std::sin(n * theta) / vn;
    return {mag * c, mag * s * q.x, mag * s * q.y, mag * s * q.z};
}

// ============================================================================
// Direction helpers
// ============================================================================

inline double norm(const Direction& d) {
    return std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
}

inline double dot(const Direction& a, const Direction& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

/// Builds a direction and detects unit length within 1e-12.
inline Direction direction(double x, double y, double z) {
    Direction d{x, y, z, false};
    d.unit = std::abs(norm(d) - 1.0) <= 1e-12;
    return d;
}

/// Normalizes to unit length; a zero vector has no direction.
inline Direction normalized(const Direction& d) {
    const double n = norm(d);
    if (n == 0.0) raise(Errc::zero_direction, "cannot normalize a zero direction");
    return Direction{d.x / n, d.y / n, d.z / n, true};
}

inline Direction unit_direction(double x, double y, double z) {
    return normalized(Direction{x, y, z, false});
}

inline Quaternion to_quaternion(const Direction& d) {
    return {0.0, d.x, d.y, d.z};
}

}  // namespace qops
