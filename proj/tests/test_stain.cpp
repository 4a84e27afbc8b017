#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "qops/error.hpp"
#include "qops/stain.hpp"

using namespace qops;

namespace {

constexpr double kPi = 3.14159265358979323846;

Raster solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    Raster img;
    img.width = w;
    img.height = h;
    img.channels = 3;
    img.data.resize(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
        img.data[3 * p + 0] = r;
        img.data[3 * p + 1] = g;
        img.data[3 * p + 2] = b;
    }
    return img;
}

double angle_deg(const Direction& a, const Direction& b) {
    const double c = dot(normalized(a), normalized(b));
    return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / kPi;
}

/// Two-stain Beer-Lambert phantom: an 8x8-cell checkerboard where each cell
/// holds exactly one stain at one of four concentration levels, wrapped in a
/// white border that the OD filter must discard.
struct Phantom {
    Direction v1 = unit_direction(0.80, 0.55, 0.22);
    Direction v2 = unit_direction(0.12, 0.75, 0.65);
    Raster image;

    explicit Phantom(double strength = 1.0) {
        const int n = 64;
        const int border = 4;
        ChannelImage c1, c2;
        c1.width = c2.width = n;
        c1.height = c2.height = n;
        c1.values.assign(static_cast<std::size_t>(n) * n, 0.0);
        c2.values.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int y = 0; y < n; ++y) {
            for (int x = 0; x < n; ++x) {
                const std::size_t at = static_cast<std::size_t>(y) * n + x;
                if (x < border || y < border || x >= n - border || y >= n - border)
                    continue;  // white margin
                const int cx = x / 8;
                const int cy = y / 8;
                const double amp = (1 + (cx + 2 * cy) % 4) / 4.0;
                if ((cx + cy) % 2 == 0)
                    c1.values[at] = strength * 1.4 * amp;
                else
                    c2.values[at] = strength * 1.1 * amp;
            }
        }
        image = forward_model(v1, v2, c1, c2);
    }
};

}  // namespace

// ============================================================================
// Optical density
// ============================================================================

TEST_CASE("optical density is zero on white and grows as pixels darken") {
    OpticalDensityImage white = optical_density(solid(2, 2, 255, 255, 255));
    REQUIRE(white.od.size() == 12);
    for (double v : white.od) CHECK(v == 0.0);

    OpticalDensityImage black = optical_density(solid(1, 1, 0, 0, 0));
    for (double v : black.od)
        CHECK(v == doctest::Approx(-std::log(kChannelFloor)).epsilon(1e-12));

    OpticalDensityImage gray = optical_density(solid(1, 1, 128, 128, 128));
    const double expected = -std::log(128.0 / 255.0 + kChannelFloor);
    for (double v : gray.od) CHECK(v == doctest::Approx(expected).epsilon(1e-12));

    // Darker means denser, channel by channel.
    OpticalDensityImage a = optical_density(solid(1, 1, 200, 100, 50));
    CHECK(a.od[0] < a.od[1]);
    CHECK(a.od[1] < a.od[2]);

    Raster gray1 = solid(1, 1, 0, 0, 0);
    gray1.channels = 1;
    gray1.data.resize(1);
    CHECK_THROWS_AS(optical_density(gray1), Error);
}

// ============================================================================
// Beer-Lambert forward model
// ============================================================================

TEST_CASE("forward model with zero concentrations yields white") {
    ChannelImage c;
    c.width = 3;
    c.height = 2;
    c.values.assign(6, 0.0);
    Raster out = forward_model(mu(1), mu(2), c, c);
    REQUIRE(out.channels == 3);
    for (std::uint8_t v : out.data) CHECK(v == 255);
}

TEST_CASE("forward model attenuates along the stain vector") {
    ChannelImage on, off;
    on.width = off.width = 1;
    on.height = off.height = 1;
    on.values = {std::log(2.0)};
    off.values = {0.0};

    // Red absorber at concentration ln 2 halves the red channel only.
    Raster out = forward_model(direction(1, 0, 0), direction(0, 0, 1), on, off);
    CHECK(out.data[0] == 128);  // round(255 / 2)
    CHECK(out.data[1] == 255);
    CHECK(out.data[2] == 255);
}

TEST_CASE("forward model validates its grids") {
    ChannelImage a, b;
    a.width = 2;
    a.height = 1;
    a.values = {0.0, 0.0};
    b.width = 1;
    b.height = 1;
    b.values = {0.0};
    CHECK_THROWS_AS(forward_model(mu(1), mu(2), a, b), Error);

    b = a;
    b.values[0] = -0.5;
    CHECK_THROWS_AS(forward_model(mu(1), mu(2), a, b), Error);
}

// ============================================================================
// Stain estimation
// ============================================================================

TEST_CASE("estimated stain vectors land on the synthesis vectors") {
    Phantom ph;
    StainBasis basis = estimate_macenko(ph.image);
    CHECK(basis.source == StainBasis::Source::macenko);

    // s1 is ordered to carry the larger red component, which is v1 here.
    CHECK(angle_deg(basis.s1, ph.v1) < 1.0);
    CHECK(angle_deg(basis.s2, ph.v2) < 1.0);
}

TEST_CASE("stain estimation is insensitive to concentration scale") {
    StainBasis full = estimate_macenko(Phantom(1.0).image);
    StainBasis weak = estimate_macenko(Phantom(0.6).image);
    CHECK(angle_deg(full.s1, weak.s1) < 1.0);
    CHECK(angle_deg(full.s2, weak.s2) < 1.0);
}

TEST_CASE("the swap flag exchanges the two stains") {
    Phantom ph;
    StainBasis plain = estimate_macenko(ph.image, 0.15, 1.0, false);
    StainBasis flipped = estimate_macenko(ph.image, 0.15, 1.0, true);
    CHECK(plain.s1.x == flipped.s2.x);
    CHECK(plain.s1.y == flipped.s2.y);
    CHECK(plain.s1.z == flipped.s2.z);
    CHECK(plain.s2.x == flipped.s1.x);
    CHECK(plain.s2.y == flipped.s1.y);
    CHECK(plain.s2.z == flipped.s1.z);
}

TEST_CASE("estimation is deterministic") {
    Phantom ph;
    StainBasis a = estimate_macenko(ph.image);
    StainBasis b = estimate_macenko(ph.image);
    CHECK(a.s1.x == b.s1.x);
    CHECK(a.s1.y == b.s1.y);
    CHECK(a.s1.z == b.s1.z);
    CHECK(a.s2.x == b.s2.x);
    CHECK(a.s2.y == b.s2.y);
    CHECK(a.s2.z == b.s2.z);
}

TEST_CASE("degenerate inputs are rejected") {
    // All white: nothing survives the OD filter.
    CHECK_THROWS_AS(estimate_macenko(solid(8, 8, 255, 255, 255)), Error);

    // One stained pixel is still fewer than two.
    Raster lone = solid(8, 8, 255, 255, 255);
    lone.data[0] = 40;
    lone.data[1] = 100;
    lone.data[2] = 60;
    CHECK_THROWS_AS(estimate_macenko(lone), Error);

    // A single color makes the OD cloud a line, not a plane.
    try {
        estimate_macenko(solid(8, 8, 200, 80, 40));
        FAIL("expected DegenerateStains");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_stains);
    }
}
