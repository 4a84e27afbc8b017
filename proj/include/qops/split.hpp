/**
 * @file split.hpp
 * @brief Orthogonal planes split q = q+ + q- parameterized by two pure
 *        quaternion directions, plus the standard direction catalog.
 *
 * The map f()g sends q to f*q*g. Its +1 eigenplane holds q+ and its -1
 * eigenplane holds q-, and the two planes are completely orthogonal, so the
 * split behaves like a pair of complementary projections. All functions are
 * pure and safe for unrestricted concurrent use.
 */

#pragma once

#include <array>
#include <utility>

#include "qops/error.hpp"
#include "qops/quat.hpp"

namespace qops {

enum class Sign { plus, minus };

/// One half of the split: which sign to keep and the two directions.
/// Directions must be nonzero; g may equal f (the common f()f map).
/// Non-unit directions are accepted for the stain and user-color pathways,
/// but the involution/orthogonality identities only hold for unit inputs.
struct SplitSpec {
    Sign sign;
    Direction f;
    Direction g;

    SplitSpec(Sign sign_, const Direction& f_, const Direction& g_)
        : sign(sign_), f(f_), g(g_) {
        if (norm(f) == 0.0 || norm(g) == 0.0)
            raise(Errc::zero_direction, "split directions must be nonzero");
    }
};

// ============================================================================
// Direction catalog
// ============================================================================

/// The thirteen catalog directions: the three axes, the six diagonal
/// two-axis mixes, and the four three-axis diagonals. Index 7 is the gray
/// line (i+j+k)/sqrt(3), which corresponds to luminance in RGB space.
inline Direction mu(int index) {
    static const double s2 = 1.0 / std::sqrt(2.0);
    static const double s3 = 1.0 / std::sqrt(3.0);
    static const std::array<Direction, 13> catalog = {{
        {1.0, 0.0, 0.0, true},   // mu1  = i
        {0.0, 1.0, 0.0, true},   // mu2  = j
        {0.0, 0.0, 1.0, true},   // mu3  = k
        {s2, s2, 0.0, true},     // mu4  = (i+j)/sqrt(2)
        {s2, 0.0, s2, true},     // mu5  = (i+k)/sqrt(2)
        {0.0, s2, s2, true},     // mu6  = (j+k)/sqrt(2)
        {s3, s3, s3, true},      // mu7  = (i+j+k)/sqrt(3)
        {-s2, s2, 0.0, true},    // mu8  = (-i+j)/sqrt(2)
        {-s2, 0.0, s2, true},    // mu9  = (-i+k)/sqrt(2)
        {0.0, -s2, s2, true},    // mu10 = (-j+k)/sqrt(2)
        {-s3, s3, s3, true},     // mu11 = (-i+j+k)/sqrt(3)
        {s3, -s3, s3, true},     // mu12 = (i-j+k)/sqrt(3)
        {s3, s3, -s3, true},     // mu13 = (i+j-k)/sqrt(3)
    }};
    if (index < 1 || index > 13)
        raise(Errc::index_out_of_range, "direction catalog index must be in 1..13");
    return catalog[static_cast<std::size_t>(index - 1)];
}

// ============================================================================
// The map and the split
// ============================================================================

/// The sandwich map f()g: q -> f*q*g. Fixes q+ and negates q-.
inline Quaternion apply_map(const Quaternion& q, const Direction& f, const Direction& g) {
    return hamilton(to_quaternion(f), hamilton(q, to_quaternion(g)));
}

/// Both halves from one evaluation of f*q*g.
///
/// The minus half is taken as the exact floating-point complement q - q+
/// rather than 0.5*(q - m). The two forms agree to one ulp, but only the
/// complement guarantees that the decomposition carries no rounding
/// residue: sub(sub(q, plus), minus) is identically zero, coefficient for
/// coefficient, for every input.
inline std::pair<Quaternion, Quaternion> split_pair(const Quaternion& q,
                                                    const Direction& f,
                                                    const Direction& g) {
    const Quaternion m = apply_map(q, f, g);
    const Quaternion plus = scale(0.5, add(q, m));
    const Quaternion minus = sub(q, plus);
    return {plus, minus};
}

/// One half of the split. Delegates to split_pair so a standalone call and
/// a paired call return bit-identical values.
inline Quaternion split(const Quaternion& q, const SplitSpec& spec) {
    const auto halves = split_pair(q, spec.f, spec.g);
    return spec.sign == Sign::plus ? halves.first : halves.second;
}

}  // namespace qops
