/**
 * @file pipeline.cpp
 * @brief Combination enumeration, batch runs, tiling, and the benchmark.
 */

#include "qops/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "qops/error.hpp"
#include "qops/png_io.hpp"
#include "qops/workflows.hpp"

namespace fs = std::filesystem;

namespace qops {

namespace {

const char* sign_token(Sign s) { return s == Sign::plus ? "plus" : "minus"; }

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

// ============================================================================
// Combination enumeration
// ============================================================================

std::vector<ComboSpec> enumerate_combinations(Sign sign) {
    std::vector<ComboSpec> out;
    out.reserve(91);
    for (int i = 1; i <= 13; ++i)
        for (int j = i; j <= 13; ++j) out.push_back(ComboSpec{sign, i, j});
    return out;
}

// ============================================================================
// Batch transformation
// ============================================================================

BatchResult batch_transform(const std::string& dataset_dir, const Raster& exemplar,
                            const std::vector<Sign>& signs, const std::string& out_dir,
                            double keep_fraction, std::uint64_t seed) {
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
        raise(Errc::invalid_argument, "keep_fraction must lie in (0, 1]");

    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(dataset_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            inputs.push_back(entry.path());
    }
    std::sort(inputs.begin(), inputs.end());

    fs::create_directories(out_dir);

    // Exemplar ranges are computed once per (sign, combination) and reused
    // for every input, so the whole batch shares one encoding scale.
    struct ComboRange {
        ComboSpec combo;
        SplitSpec spec;
        NormalizationRange range;
    };
    std::vector<ComboRange> plans;
    for (Sign sign : signs) {
        for (const ComboSpec& combo : enumerate_combinations(sign)) {
            SplitSpec spec(sign, mu(combo.i_index), mu(combo.j_index));
            plans.push_back(ComboRange{combo, spec, exemplar_ranges(exemplar, spec)});
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    BatchResult result;
    for (const fs::path& input : inputs) {
        Raster raster;
        try {
            raster = expand_gray(read_png(input.string()));
        } catch (const Error& e) {
            result.errors.push_back(input.filename().string() + ": " + e.what());
            continue;
        }
        const QuaternionImage qimg = from_rgb(raster);

        for (const ComboRange& plan : plans) {
            // Draw before any work so the kept subset is a fixed function
            // of (seed, input order, combination order).
            const double draw = unit(rng);
            if (draw >= keep_fraction) continue;

            const std::string name = input.stem().string() + "_" +
                                     sign_token(plan.combo.sign) + "_mu" +
                                     std::to_string(plan.combo.i_index) + "_mu" +
                                     std::to_string(plan.combo.j_index) + ".png";
            const fs::path out_path = fs::path(out_dir) / name;
            try {
                const Raster out = recolorize(qimg, plan.spec, plan.range);
                write_png(out_path.string(), out);
            } catch (const Error& e) {
                result.errors.push_back(name + ": " + e.what());
                continue;
            }

            ManifestRow row;
            row.input = input.filename().string();
            row.sign = plan.combo.sign;
            row.i_index = plan.combo.i_index;
            row.j_index = plan.combo.j_index;
            row.output = name;
            row.min_r = plan.range.min[0];
            row.max_r = plan.range.max[0];
            row.min_g = plan.range.min[1];
            row.max_g = plan.range.max[1];
            row.min_b = plan.range.min[2];
            row.max_b = plan.range.max[2];
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

std::string manifest_csv(const BatchResult& result) {
    std::string csv = "input,sign,f,g,output,min_r,max_r,min_g,max_g,min_b,max_b\n";
    for (const ManifestRow& row : result.rows) {
        csv += row.input;
        csv += ',';
        csv += sign_token(row.sign);
        csv += ",mu" + std::to_string(row.i_index);
        csv += ",mu" + std::to_string(row.j_index);
        csv += ',';
        csv += row.output;
        for (double v : {row.min_r, row.max_r, row.min_g, row.max_g, row.min_b, row.max_b}) {
            csv += ',';
            csv += format_double(v);
        }
        csv += '\n';
    }
    return csv;
}

// ============================================================================
// Tiled execution
// ============================================================================

Raster tile_apply(const Raster& image, const TileWorkflow& workflow, int tile_size,
                  int threads) {
    if (tile_size < 1) raise(Errc::invalid_argument, "tile size must be positive");
    if (image.width < 1 || image.height < 1) raise(Errc::invalid_argument, "empty image");

    const int tiles_x = (image.width + tile_size - 1) / tile_size;
    const int tiles_y = (image.height + tile_size - 1) / tile_size;
    const int tile_count = tiles_x * tiles_y;

    Raster out;
    out.width = image.width;
    out.height = image.height;
    out.channels = 0;  // set from the first finished tile
    std::atomic<int> out_channels{0};

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;
    std::mutex init_mutex;

    const auto worker = [&]() {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= tile_count || failed.load()) return;
            const int tx = t % tiles_x;
            const int ty = t / tiles_x;
            const int x0 = tx * tile_size;
            const int y0 = ty * tile_size;
            const int w = std::min(tile_size, image.width - x0);
            const int h = std::min(tile_size, image.height - y0);

            Raster tile;
            tile.width = w;
            tile.height = h;
            tile.channels = image.channels;
            tile.data.resize(static_cast<std::size_t>(w) * h * image.channels);
            for (int y = 0; y < h; ++y) {
                const std::uint8_t* src =
                    image.data.data() +
                    (static_cast<std::size_t>(y0 + y) * image.width + x0) * image.channels;
                std::copy(src, src + static_cast<std::size_t>(w) * image.channels,
                          tile.data.begin() + static_cast<std::size_t>(y) * w * image.channels);
            }

            try {
                const Raster done = workflow(tile);
                if (done.width != w || done.height != h)
                    raise(Errc::dimension_mismatch, "tile workflow changed the tile size");
                {
                    std::lock_guard<std::mutex> lock(init_mutex);
                    if (out_channels.load() == 0) {
                        out_channels.store(done.channels);
                        out.channels = done.channels;
                        out.data.resize(static_cast<std::size_t>(out.width) * out.height *
                                        done.channels);
                    } else if (out_channels.load() != done.channels) {
                        raise(Errc::dimension_mismatch,
                              "tile workflow produced inconsistent channel counts");
                    }
                }
                for (int y = 0; y < h; ++y) {
                    const std::uint8_t* src =
                        done.data.data() + static_cast<std::size_t>(y) * w * done.channels;
                    std::uint8_t* dst =
                        out.data.data() +
                        (static_cast<std::size_t>(y0 + y) * out.width + x0) * done.channels;
                    std::copy(src, src + static_cast<std::size_t>(w) * done.channels, dst);
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) error_message = e.what();
                return;
            }
        }
    };

    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = std::min(n_threads, tile_count);

    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    if (failed.load()) raise(Errc::invalid_argument, "tile failed: " + error_message);
    return out;
}

NormalizationRange merged_tile_ranges(const QuaternionImage& image, const SplitSpec& spec,
                                      int tile_size) {
    if (tile_size < 1) raise(Errc::invalid_argument, "tile size must be positive");

    NormalizationRange range;
    range.mode = RangeMode::exemplar;
    for (int c = 0; c < 3; ++c) {
        range.min[c] = std::numeric_limits<double>::infinity();
        range.max[c] = -std::numeric_limits<double>::infinity();
    }

    for (int y0 = 0; y0 < image.height; y0 += tile_size) {
        for (int x0 = 0; x0 < image.width; x0 += tile_size) {
            const int w = std::min(tile_size, image.width - x0);
            const int h = std::min(tile_size, image.height - y0);
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    const Quaternion q = split(
                        image.data[static_cast<std::size_t>(y0 + y) * image.width + (x0 + x)],
                        spec);
                    const double ch[3] = {q.x, q.y, q.z};
                    for (int c = 0; c < 3; ++c) {
                        range.min[c] = std::min(range.min[c], ch[c]);
                        range.max[c] = std::max(range.max[c], ch[c]);
                    }
                }
            }
        }
    }
    return range;
}

// ============================================================================
// Bicubic resize
// ============================================================================

namespace {

/// Catmull-Rom cubic kernel weights for fractional offset t.
void catmull_rom_weights(double t, double w[4]) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
    w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
    w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
}

}  // namespace

Raster resize_bicubic(const Raster& image, int new_width, int new_height) {
    if (new_width < 1 || new_height < 1)
        raise(Errc::invalid_argument, "resize target must be at least 1x1");
    if (image.width < 1 || image.height < 1) raise(Errc::invalid_argument, "empty image");

    const int ch = image.channels;

    // Horizontal pass into a double buffer, then vertical pass.
    std::vector<double> mid(static_cast<std::size_t>(new_width) * image.height * ch);
    const double sx = static_cast<double>(image.width) / new_width;
    for (int x = 0; x < new_width; ++x) {
        const double src = (x + 0.5) * sx - 0.5;
        const int base = static_cast<int>(std::floor(src));
        double w[4];
        catmull_rom_weights(src - base, w);
        int idx[4];
        for (int k = 0; k < 4; ++k) idx[k] = std::clamp(base - 1 + k, 0, image.width - 1);
        for (int y = 0; y < image.height; ++y) {
            const std::uint8_t* row =
                image.data.data() + static_cast<std::size_t>(y) * image.width * ch;
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) acc += w[k] * row[idx[k] * ch + c];
                mid[(static_cast<std::size_t>(y) * new_width + x) * ch + c] = acc;
            }
        }
    }

    Raster out;
    out.width = new_width;
    out.height = new_height;
    out.channels = ch;
    out.data.resize(static_cast<std::size_t>(new_width) * new_height * ch);
    const double sy = static_cast<double>(image.height) / new_height;
    for (int y = 0; y < new_height; ++y) {
        const double src = (y + 0.5) * sy - 0.5;
        const int base = static_cast<int>(std::floor(src));
        double w[4];
        catmull_rom_weights(src - base, w);
        int idx[4];
        for (int k = 0; k < 4; ++k) idx[k] = std::clamp(base - 1 + k, 0, image.height - 1);
        for (int x = 0; x < new_width; ++x) {
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k)
                    acc += w[k] * mid[(static_cast<std::size_t>(idx[k]) * new_width + x) * ch + c];
                out.data[(static_cast<std::size_t>(y) * new_width + x) * ch + c] =
                    static_cast<std::uint8_t>(std::lround(std::clamp(acc, 0.0, 255.0)));
            }
        }
    }
    return out;
}

// ============================================================================
// Time-complexity benchmark
// ============================================================================

BenchResult bench_time_complexity(const Raster& image, int steps, const Direction& f,
                                  const Direction& g) {
    if (steps < 5) raise(Errc::invalid_argument, "need at least 5 benchmark sizes");

    // Validate the whole shrink schedule before timing anything.
    struct Size {
        int w, h;
    };
    std::vector<Size> sizes;
    for (int t = 0; t < steps; ++t) {
        const double scale = 1.0 - 0.05 * t;
        const int w = static_cast<int>(std::lround(image.width * scale));
        const int h = static_cast<int>(std::lround(image.height * scale));
        if (w < 64 || h < 64)
            raise(Errc::image_too_small,
                  "step " + std::to_string(t) + " shrinks below 64x64; use a larger image");
        sizes.push_back(Size{w, h});
    }

    BenchResult result;
    for (int t = 0; t < steps; ++t) {
        const Raster sized =
            (t == 0) ? image : resize_bicubic(image, sizes[t].w, sizes[t].h);
        const QuaternionImage qimg = from_rgb(expand_gray(sized));

        double best[2];
        const Sign both[2] = {Sign::plus, Sign::minus};
        for (int s = 0; s < 2; ++s) {
            const SplitSpec spec(both[s], f, g);
            best[s] = std::numeric_limits<double>::infinity();
            for (int rep = 0; rep < 3; ++rep) {
                volatile double sink = 0.0;
                const auto t0 = std::chrono::steady_clock::now();
                for (const Quaternion& q : qimg.data) {
                    const Quaternion r = split(q, spec);
                    sink = sink + r.x + r.y + r.z;
                }
                const auto t1 = std::chrono::steady_clock::now();
                (void)sink;
                best[s] = std::min(best[s], std::chrono::duration<double>(t1 - t0).count());
            }
        }

        BenchRecord rec;
        rec.pixels = qimg.data.size();
        rec.seconds = 0.5 * (best[0] + best[1]);
        rec.image_id = std::to_string(sizes[t].w) + "x" + std::to_string(sizes[t].h);
        result.records.push_back(std::move(rec));
    }

    // Least squares of seconds against pixels.
    const double n = static_cast<double>(result.records.size());
    double sum_x = 0.0, sum_y = 0.0;
    for (const BenchRecord& r : result.records) {
        sum_x += static_cast<double>(r.pixels);
        sum_y += r.seconds;
    }
    const double mean_x = sum_x / n;
    const double mean_y = sum_y / n;
    double sxx = 0.0, sxy = 0.0, sstot = 0.0;
    for (const BenchRecord& r : result.records) {
        const double dx = static_cast<double>(r.pixels) - mean_x;
        const double dy = r.seconds - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        sstot += dy * dy;
    }
    result.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    result.intercept = mean_y - result.slope * mean_x;
    double ssres = 0.0;
    for (const BenchRecord& r : result.records) {
        const double fit = result.slope * static_cast<double>(r.pixels) + result.intercept;
        const double d = r.seconds - fit;
        ssres += d * d;
    }
    result.r_squared = sstot > 0.0 ? 1.0 - ssres / sstot : 1.0;
    return result;
}

std::string bench_csv(const BenchResult& result) {
    std::string csv = "pixels,seconds\n";
    for (const BenchRecord& r : result.records) {
        csv += std::to_string(r.pixels);
        csv += ',';
        csv += format_double(r.seconds);
        csv += '\n';
    }
    csv += "slope,intercept,r2\n";
    csv += format_double(result.slope);
    csv += ',';
    csv += format_double(result.intercept);
    csv += ',';
    csv += format_double(result.r_squared);
    csv += '\n';
    return csv;
}

}  // namespace qops
