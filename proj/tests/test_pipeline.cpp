#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "qops/error.hpp"
#include "qops/pipeline.hpp"
#include "qops/png_io.hpp"
#include "qops/workflows.hpp"

using namespace qops;
namespace fs = std::filesystem;

namespace {

Raster random_rgb(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> byte(0, 255);
    Raster img;
    img.width = w;
    img.height = h;
    img.channels = 3;
    img.data.resize(static_cast<std::size_t>(w) * h * 3);
    for (std::uint8_t& v : img.data) v = static_cast<std::uint8_t>(byte(rng));
    return img;
}

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

/// Fresh scratch directory, removed when the guard goes out of scope.
struct TempDir {
    fs::path path;

    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("qops_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int count_pngs(const fs::path& dir) {
    int n = 0;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".png") ++n;
    return n;
}

}  // namespace

// ============================================================================
// Combination enumeration
// ============================================================================

TEST_CASE("each sign enumerates the 91 unordered direction pairs") {
    for (Sign sign : {Sign::plus, Sign::minus}) {
        std::vector<ComboSpec> combos = enumerate_combinations(sign);
        REQUIRE(combos.size() == 91);

        std::set<std::pair<int, int>> seen;
        int diagonal = 0;
        for (const ComboSpec& c : combos) {
            CHECK(c.sign == sign);
            CHECK(c.i_index >= 1);
            CHECK(c.j_index <= 13);
            CHECK(c.i_index <= c.j_index);
            seen.insert({c.i_index, c.j_index});
            if (c.i_index == c.j_index) ++diagonal;
        }
        CHECK(seen.size() == 91);  // no duplicates
        CHECK(diagonal == 13);

        CHECK(seen.count({3, 3}) == 1);
        CHECK(seen.count({3, 4}) == 1);
        CHECK(seen.count({3, 2}) == 0);  // only i <= j is listed

        CHECK(combos.front().i_index == 1);
        CHECK(combos.front().j_index == 1);
        CHECK(combos.back().i_index == 13);
        CHECK(combos.back().j_index == 13);
    }
}

// ============================================================================
// Batch transformation
// ============================================================================

TEST_CASE("batch emits every combination for every input") {
    TempDir dataset("batch_ds");
    TempDir out("batch_out");
    write_png((dataset.path / "a.png").string(), random_rgb(6, 6, 1));
    write_png((dataset.path / "b.png").string(), random_rgb(6, 6, 2));

    Raster exemplar = random_rgb(6, 6, 3);
    BatchResult result = batch_transform(dataset.path.string(), exemplar,
                                         {Sign::plus, Sign::minus}, out.path.string());
    CHECK(result.errors.empty());
    CHECK(result.rows.size() == 2 * 2 * 91);
    CHECK(count_pngs(out.path) == 2 * 2 * 91);

    // Inputs are visited in sorted order, plus before minus per input.
    CHECK(result.rows.front().input.find("a.png") != std::string::npos);
    CHECK(result.rows.front().sign == Sign::plus);
    CHECK(result.rows.back().input.find("b.png") != std::string::npos);
    CHECK(result.rows.back().sign == Sign::minus);

    // Rows carry bare filenames so manifests stay valid when the output
    // directory moves.
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(fs::exists(out.path / result.rows[i].output));
        CHECK(result.rows[i].min_r <= result.rows[i].max_r);
    }
}

TEST_CASE("the keep fraction drops outputs reproducibly") {
    TempDir dataset("keep_ds");
    write_png((dataset.path / "img.png").string(), random_rgb(5, 5, 9));
    Raster exemplar = random_rgb(5, 5, 10);

    TempDir out_a("keep_a");
    TempDir out_b("keep_b");
    BatchResult a = batch_transform(dataset.path.string(), exemplar,
                                    {Sign::plus, Sign::minus}, out_a.path.string(), 0.5, 99);
    BatchResult b = batch_transform(dataset.path.string(), exemplar,
                                    {Sign::plus, Sign::minus}, out_b.path.string(), 0.5, 99);

    CHECK(a.rows.size() < 182);
    CHECK(a.rows.size() > 0);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].sign == b.rows[i].sign);
        CHECK(a.rows[i].i_index == b.rows[i].i_index);
        CHECK(a.rows[i].j_index == b.rows[i].j_index);
        CHECK(a.rows[i].min_r == b.rows[i].min_r);
        CHECK(a.rows[i].max_b == b.rows[i].max_b);
    }

    // A different seed keeps a different subset.
    TempDir out_c("keep_c");
    BatchResult c = batch_transform(dataset.path.string(), exemplar,
                                    {Sign::plus, Sign::minus}, out_c.path.string(), 0.5, 100);
    bool same = a.rows.size() == c.rows.size();
    if (same) {
        for (std::size_t i = 0; i < a.rows.size(); ++i)
            same = same && a.rows[i].i_index == c.rows[i].i_index &&
                   a.rows[i].j_index == c.rows[i].j_index && a.rows[i].sign == c.rows[i].sign;
    }
    CHECK(!same);

    CHECK_THROWS_AS(batch_transform(dataset.path.string(), exemplar, {Sign::plus},
                                    out_a.path.string(), 0.0, 1),
                    Error);
    CHECK_THROWS_AS(batch_transform(dataset.path.string(), exemplar, {Sign::plus},
                                    out_a.path.string(), 1.5, 1),
                    Error);
}

TEST_CASE("a broken input is reported and the batch continues") {
    TempDir dataset("broken_ds");
    TempDir out("broken_out");
    std::ofstream(dataset.path / "aa_broken.png") << "this is not a png";
    write_png((dataset.path / "ok.png").string(), random_rgb(4, 4, 21));

    BatchResult result = batch_transform(dataset.path.string(), random_rgb(4, 4, 22),
                                         {Sign::minus}, out.path.string());
    CHECK(result.errors.size() == 1);
    CHECK(result.rows.size() == 91);
    for (const ManifestRow& row : result.rows)
        CHECK(row.input.find("ok.png") != std::string::npos);
}

TEST_CASE("the manifest is valid CSV with one line per output") {
    TempDir dataset("csv_ds");
    TempDir out("csv_out");
    write_png((dataset.path / "x.png").string(), random_rgb(4, 4, 31));

    BatchResult result = batch_transform(dataset.path.string(), random_rgb(4, 4, 32),
                                         {Sign::plus}, out.path.string());
    std::string csv = manifest_csv(result);

    REQUIRE(csv.rfind("input,sign,f,g,output,min_r,max_r,min_g,max_g,min_b,max_b\n", 0) == 0);
    const std::size_t lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(lines == result.rows.size() + 1);
    CHECK(csv.find(",plus,mu1,mu1,") != std::string::npos);
    CHECK(csv.find(",plus,mu13,mu13,") != std::string::npos);
    CHECK(csv.find("mu0") == std::string::npos);
}

// ============================================================================
// Tiled execution
// ============================================================================

TEST_CASE("tiling is invisible once the encoding range is fixed") {
    Raster img = random_rgb(20, 14, 77);
    SplitSpec spec(Sign::minus, mu(7), mu(7));
    NormalizationRange range = exemplar_ranges(img, spec);

    TileWorkflow workflow = [&](const Raster& tile) {
        return recolorize(from_rgb(tile), spec, range);
    };
    Raster direct = workflow(img);

    for (int tile_size : {5, 7, 13, 64}) {
        Raster tiled = tile_apply(img, workflow, tile_size);
        CHECK(tiled.data == direct.data);
    }

    // Thread count must not affect bytes.
    CHECK(tile_apply(img, workflow, 5, 1).data == direct.data);
    CHECK(tile_apply(img, workflow, 5, 4).data == direct.data);

    CHECK_THROWS_AS(tile_apply(img, workflow, 0), Error);
}

TEST_CASE("tile failures surface as a single error") {
    Raster img = random_rgb(8, 8, 45);
    TileWorkflow broken = [](const Raster&) -> Raster {
        throw Error(Errc::invalid_argument, "boom");
    };
    CHECK_THROWS_AS(tile_apply(img, broken, 4), Error);

    TileWorkflow wrong_shape = [](const Raster& tile) {
        Raster out = tile;
        out.width += 1;
        out.data.resize(out.data.size() + 3 * static_cast<std::size_t>(out.height));
        return out;
    };
    CHECK_THROWS_AS(tile_apply(img, wrong_shape, 4), Error);
}

TEST_CASE("tile-merged ranges equal the single-pass ranges") {
    Raster img = random_rgb(19, 11, 83);
    for (int idx : {1, 7, 12}) {
        SplitSpec spec(Sign::minus, mu(idx), mu(idx));
        NormalizationRange whole = exemplar_ranges(img, spec);
        for (int tile_size : {4, 6, 32}) {
            NormalizationRange merged = merged_tile_ranges(from_rgb(img), spec, tile_size);
            for (int c = 0; c < 3; ++c) {
                CHECK(merged.min[c] == whole.min[c]);
                CHECK(merged.max[c] == whole.max[c]);
            }
        }
    }
}

// ============================================================================
// Bicubic resize
// ============================================================================

TEST_CASE("bicubic resize preserves constants and hits the requested size") {
    Raster img = solid(10, 8, 180, 90, 30);
    Raster small = resize_bicubic(img, 7, 5);
    CHECK(small.width == 7);
    CHECK(small.height == 5);
    CHECK(small.channels == 3);
    for (std::size_t p = 0; p < small.pixel_count(); ++p) {
        CHECK(small.data[3 * p + 0] == 180);
        CHECK(small.data[3 * p + 1] == 90);
        CHECK(small.data[3 * p + 2] == 30);
    }

    Raster big = resize_bicubic(img, 16, 16);
    CHECK(big.width == 16);
    CHECK(big.height == 16);

    CHECK_THROWS_AS(resize_bicubic(img, 0, 5), Error);
}

TEST_CASE("bicubic resize reproduces a linear ramp") {
    // data[y*16+x] = 16y + x is linear, which the Catmull-Rom kernel
    // interpolates exactly away from the clamped border.
    Raster ramp;
    ramp.width = 16;
    ramp.height = 16;
    ramp.channels = 1;
    ramp.data.resize(256);
    for (int i = 0; i < 256; ++i) ramp.data[i] = static_cast<std::uint8_t>(i);

    Raster half = resize_bicubic(ramp, 8, 8);
    // Interior sample (3,3) maps to source (6.5, 6.5), value 110.5.
    const double got = half.data[3 * 8 + 3];
    CHECK(got == doctest::Approx(110.5).epsilon(0.02));
}

// ============================================================================
// Benchmark
// ============================================================================

TEST_CASE("benchmark validates the shrink schedule upfront") {
    Raster img = random_rgb(100, 100, 7);
    CHECK_THROWS_AS(bench_time_complexity(img, 4, mu(7), mu(7)), Error);

    // Step 9 would shrink 100 to 55, below the 64 pixel floor.
    try {
        bench_time_complexity(img, 10, mu(7), mu(7));
        FAIL("expected ImageTooSmall");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::image_too_small);
    }
}

TEST_CASE("benchmark records shrink monotonically and fit fields are set") {
    Raster img = random_rgb(160, 120, 8);
    BenchResult result = bench_time_complexity(img, 5, mu(7), mu(7));
    REQUIRE(result.records.size() == 5);
    CHECK(result.records[0].pixels == 160u * 120u);
    for (std::size_t i = 1; i < result.records.size(); ++i)
        CHECK(result.records[i].pixels < result.records[i - 1].pixels);
    for (const BenchRecord& r : result.records) CHECK(r.seconds >= 0.0);

    std::string csv = bench_csv(result);
    CHECK(csv.rfind("pixels,seconds\n", 0) == 0);
    CHECK(csv.find("slope,intercept,r2\n") != std::string::npos);
    const std::size_t lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(lines == result.records.size() + 3);
}
