#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "qops/image.hpp"
#include "qops/error.hpp"

using namespace qops;

namespace {

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

}  // namespace

TEST_CASE("from_rgb lifts channels onto the imaginary axes") {
    Raster img = solid(1, 1, 255, 0, 0);
    QuaternionImage q = from_rgb(img);
    CHECK(q.data[0] == Quaternion{0, 1, 0, 0});

    img = solid(1, 1, 0, 0, 0);
    CHECK(from_rgb(img).data[0] == Quaternion{0, 0, 0, 0});

    img = solid(1, 1, 128, 128, 128);
    q = from_rgb(img);
    CHECK(q.data[0].w == 0.0);
    CHECK(q.data[0].x == 128.0 / 255.0);
    CHECK(q.data[0].y == 128.0 / 255.0);
    CHECK(q.data[0].z == 128.0 / 255.0);

    Raster gray = solid(1, 1, 0, 0, 0);
    gray.channels = 1;
    gray.data.resize(1);
    CHECK_THROWS_AS(from_rgb(gray), Error);
}

TEST_CASE("to_rgb truncate round-trips every 24-bit value") {
    std::mt19937_64 rng(53);
    std::uniform_int_distribution<int> byte(0, 255);
    Raster img;
    img.width = 64;
    img.height = 3;
    img.channels = 3;
    img.data.resize(img.pixel_count() * 3);
    for (std::uint8_t& v : img.data) v = static_cast<std::uint8_t>(byte(rng));
    // Force the extremes in as well.
    img.data[0] = 0;
    img.data[1] = 255;

    NormalizationRange truncate;
    truncate.mode = RangeMode::truncate;
    const Raster back = to_rgb(from_rgb(img), truncate);
    CHECK(back.data == img.data);
}

TEST_CASE("per-channel normalization") {
    // Values {-1, 0, 1} map affinely onto {0, 128, 255}.
    QuaternionImage q;
    q.width = 3;
    q.height = 1;
    q.data = {{0, -1, -1, -1}, {0, 0, 0, 0}, {0, 1, 1, 1}};
    NormalizationRange per_channel;
    const Raster out = to_rgb(q, per_channel);
    CHECK(out.data[0] == 0);
    CHECK(out.data[3] == 128);
    CHECK(out.data[6] == 255);

    // A constant channel has a degenerate range: raw values are clamped.
    QuaternionImage flat;
    flat.width = 2;
    flat.height = 1;
    flat.data = {{0, 7, 0.25, -3}, {0, 7, 0.25, -3}};
    const Raster clamped = to_rgb(flat, per_channel);
    CHECK(clamped.data[0] == 255);  // 7 clamps to 1
    CHECK(clamped.data[1] == 64);   // 0.25 stays
    CHECK(clamped.data[2] == 0);    // -3 clamps to 0
}

TEST_CASE("joint normalization uses one range for all channels") {
    QuaternionImage q;
    q.width = 2;
    q.height = 1;
    q.data = {{0, 0, 1, 2}, {0, 4, 3, 2}};
    NormalizationRange joint;
    joint.mode = RangeMode::joint;
    const Raster out = to_rgb(q, joint);
    // Joint range is [0, 4]: 0->0, 1->64, 2->128, 3->191, 4->255.
    CHECK(out.data[0] == 0);
    CHECK(out.data[1] == 64);
    CHECK(out.data[2] == 128);
    CHECK(out.data[3] == 255);
    CHECK(out.data[4] == 191);
    CHECK(out.data[5] == 128);
}

TEST_CASE("quantization stays in range for wild inputs") {
    CHECK(quantize_unit(-1e300) == 0);
    CHECK(quantize_unit(1e300) == 255);
    CHECK(quantize_unit(0.0) == 0);
    CHECK(quantize_unit(1.0) == 255);
    CHECK(quantize_unit(0.5) == 128);
}

TEST_CASE("channel extraction and recomposition") {
    QuaternionImage q;
    q.width = 2;
    q.height = 2;
    q.data = {{0, 1, 2, 3}, {0.5, 4, 5, 6}, {0, 7, 8, 9}, {0, 10, 11, 12}};
    const Channels ch = extract_channels(q);
    CHECK(ch.c1.values == std::vector<double>{1, 4, 7, 10});
    CHECK(ch.c2.values == std::vector<double>{2, 5, 8, 11});
    CHECK(ch.c3.values == std::vector<double>{3, 6, 9, 12});

    const QuaternionImage re = compose_channels(ch.c1, ch.c2, ch.c3);
    for (std::size_t p = 0; p < 4; ++p) {
        CHECK(re.data[p].w == 0.0);  // scalar part dropped
        CHECK(re.data[p].x == q.data[p].x);
        CHECK(re.data[p].y == q.data[p].y);
        CHECK(re.data[p].z == q.data[p].z);
    }

    ChannelImage wrong = ch.c1;
    wrong.width = 1;
    CHECK_THROWS_AS(compose_channels(wrong, ch.c2, ch.c3), Error);
}

TEST_CASE("exemplar ranges") {
    // Two-pixel exemplar {red, blue} under (q-, mu7()mu7): both pixels
    // project onto the gray line at (1/3, 1/3, 1/3), so every channel range
    // is the single point 1/3 (hand evaluation over the two pixels).
    Raster two;
    two.width = 2;
    two.height = 1;
    two.channels = 3;
    two.data = {255, 0, 0, 0, 0, 255};
    const SplitSpec spec(Sign::minus, mu(7), mu(7));
    const NormalizationRange r = exemplar_ranges(two, spec);
    CHECK(r.mode == RangeMode::exemplar);
    for (int c = 0; c < 3; ++c) {
        CHECK(r.min[c] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
        CHECK(r.max[c] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }

    // Self-exemplar encoding equals per-channel encoding of the same image.
    std::mt19937_64 rng(59);
    std::uniform_int_distribution<int> byte(0, 255);
    Raster img;
    img.width = 8;
    img.height = 8;
    img.channels = 3;
    img.data.resize(img.pixel_count() * 3);
    for (std::uint8_t& v : img.data) v = static_cast<std::uint8_t>(byte(rng));

    const SplitSpec spec2(Sign::minus, mu(7), mu(8));
    const QuaternionImage q = from_rgb(img);
    QuaternionImage halves;
    halves.width = q.width;
    halves.height = q.height;
    for (const Quaternion& p : q.data) halves.data.push_back(split(p, spec2));

    NormalizationRange per_channel;
    const Raster direct = to_rgb(halves, per_channel);
    const Raster via_exemplar = to_rgb(halves, exemplar_ranges(img, spec2));
    CHECK(direct.data == via_exemplar.data);
}

TEST_CASE("floor and gray expansion") {
    QuaternionImage q;
    q.width = 1;
    q.height = 1;
    q.data = {{0.25, 0, 1e-9, 0.5}};
    const QuaternionImage floored = floor_channels(q);
    CHECK(floored.data[0].w == 0.25);  // scalar part untouched
    CHECK(floored.data[0].x == kChannelFloor);
    CHECK(floored.data[0].y == kChannelFloor);
    CHECK(floored.data[0].z == 0.5);

    Raster gray;
    gray.width = 2;
    gray.height = 1;
    gray.channels = 1;
    gray.data = {10, 200};
    const Raster rgb = expand_gray(gray);
    CHECK(rgb.channels == 3);
    CHECK(rgb.data == std::vector<std::uint8_t>{10, 10, 10, 200, 200, 200});
    CHECK(expand_gray(rgb).data == rgb.data);

    Raster bad = rgb;
    bad.channels = 2;
    CHECK_THROWS_AS(expand_gray(bad), Error);
}

TEST_CASE("gamut export") {
    const Raster one = solid(4, 4, 10, 20, 30);
    const std::string csv = export_gamut(one, GamutSpace::rgb);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "c1,c2,c3,count");
    int rows = 0;
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 1);

    // Eight distinct colors give eight rows.
    Raster eight;
    eight.width = 8;
    eight.height = 1;
    eight.channels = 3;
    for (int p = 0; p < 8; ++p) {
        eight.data.push_back(static_cast<std::uint8_t>(p * 30));
        eight.data.push_back(static_cast<std::uint8_t>(255 - p * 30));
        eight.data.push_back(static_cast<std::uint8_t>(p));
    }
    std::istringstream lines8(export_gamut(eight, GamutSpace::rgb));
    rows = 0;
    std::getline(lines8, line);
    while (std::getline(lines8, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 8);

    // RGB coordinates are channel values / 255.
    std::istringstream first(export_gamut(solid(1, 1, 51, 102, 255), GamutSpace::rgb));
    std::getline(first, line);
    std::getline(first, line);
    CHECK(line == "0.2,0.4,1,1");

    // HSV: pure green is H=120, S=1, V=1.
    std::istringstream hsv(export_gamut(solid(1, 1, 0, 255, 0), GamutSpace::hsv));
    std::getline(hsv, line);
    std::getline(hsv, line);
    CHECK(line == "120,1,1,1");
}
