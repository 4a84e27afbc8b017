/**
 * @file cli.cpp
 * @brief Direction grammar and the qops subcommand dispatcher.
 */

#include "qops/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qops/error.hpp"
#include "qops/metrics.hpp"
#include "qops/pipeline.hpp"
#include "qops/png_io.hpp"
#include "qops/stain.hpp"
#include "qops/workflows.hpp"

namespace fs = std::filesystem;

namespace qops {

// ============================================================================
// Direction grammar
// ============================================================================

namespace {

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](unsigned char c) { return std::isdigit(c); });
}

double parse_number(const std::string& token) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &pos);
    } catch (const std::exception&) {
        raise(Errc::invalid_argument, "not a number: '" + token + "'");
    }
    if (pos != token.size()) raise(Errc::invalid_argument, "not a number: '" + token + "'");
    return v;
}

std::vector<std::string> split_on(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t at = text.find(sep, start);
        if (at == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, at - start));
        start = at + 1;
    }
}

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    raise(Errc::invalid_argument, std::string("bad hex digit '") + c + "'");
}

/// Reads one pixel as an RGB triple in [0,255]; grayscale replicates.
void pixel_rgb(const Raster& image, int x, int y, double out[3]) {
    if (x < 0 || y < 0 || x >= image.width || y >= image.height)
        raise(Errc::index_out_of_range, "sample point outside the image");
    const std::size_t base =
        (static_cast<std::size_t>(y) * image.width + x) * image.channels;
    for (int c = 0; c < 3; ++c)
        out[c] = image.data[base + (image.channels == 3 ? c : 0)];
}

}  // namespace

Direction parse_direction(const std::string& text, const Raster* source, bool normalize) {
    if (text.rfind("mu", 0) == 0 && all_digits(text.substr(2))) {
        // Catalog entries are returned as stored; they are already unit.
        return mu(std::stoi(text.substr(2)));
    }

    if (!text.empty() && text.front() == '#') {
        if (text.size() != 7) raise(Errc::invalid_argument, "hex color must be #RRGGBB");
        double ch[3];
        for (int c = 0; c < 3; ++c)
            ch[c] = (hex_nibble(text[1 + 2 * c]) * 16 + hex_nibble(text[2 + 2 * c])) / 255.0;
        const Direction d = direction(ch[0], ch[1], ch[2]);
        return normalize ? normalized(d) : d;
    }

    if (text.rfind("sample:", 0) == 0) {
        if (source == nullptr)
            raise(Errc::invalid_argument, "pixel sampling needs an input image");
        const std::vector<std::string> points = split_on(text.substr(7), ':');
        if (points.empty() || points.size() > 2)
            raise(Errc::invalid_argument, "expected sample:X,Y or sample:X,Y:X2,Y2");
        double acc[3] = {0.0, 0.0, 0.0};
        for (const std::string& point : points) {
            const std::vector<std::string> xy = split_on(point, ',');
            if (xy.size() != 2) raise(Errc::invalid_argument, "sample point must be X,Y");
            const double x = parse_number(xy[0]);
            const double y = parse_number(xy[1]);
            double rgb[3];
            pixel_rgb(*source, static_cast<int>(x), static_cast<int>(y), rgb);
            for (int c = 0; c < 3; ++c) acc[c] += rgb[c];
        }
        const double n255 = 255.0 * static_cast<double>(points.size());
        const Direction d = direction(acc[0] / n255, acc[1] / n255, acc[2] / n255);
        return normalize ? normalized(d) : d;
    }

    const std::vector<std::string> parts = split_on(text, ',');
    if (parts.size() != 3)
        raise(Errc::invalid_argument, "direction must be muN, x,y,z, #RRGGBB, or sample:X,Y");
    const Direction d =
        direction(parse_number(parts[0]), parse_number(parts[1]), parse_number(parts[2]));
    return normalize ? normalized(d) : d;
}

std::string format_direction(const Direction& d) {
    for (int n = 1; n <= 13; ++n) {
        const Direction m = mu(n);
        if (d.x == m.x && d.y == m.y && d.z == m.z) return "mu" + std::to_string(n);
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", d.x, d.y, d.z);
    return buf;
}

// ============================================================================
// Dispatch
// ============================================================================

namespace {

Raster load_rgb(const std::string& path) { return expand_gray(read_png(path)); }

/// Writes text the same way write_png writes pixels: to a temporary file
/// first, renamed into place only after a clean flush.
void write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            raise(Errc::io_failure, "cannot write " + path);
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        raise(Errc::io_failure, "cannot rename into " + path);
    }
}

Sign parse_sign(const std::string& text) {
    if (text == "plus") return Sign::plus;
    if (text == "minus") return Sign::minus;
    raise(Errc::invalid_argument, "sign must be plus or minus");
}

std::vector<Sign> parse_sign_set(const std::string& text) {
    if (text == "both") return {Sign::plus, Sign::minus};
    return {parse_sign(text)};
}

RangeMode parse_range_mode(const std::string& text) {
    if (text == "per_channel") return RangeMode::per_channel;
    if (text == "joint") return RangeMode::joint;
    if (text == "truncate") return RangeMode::truncate;
    raise(Errc::invalid_argument, "range must be per_channel, joint, or truncate");
}

/// Resolves any range mode to fixed per-channel bounds over the given image
/// so tiles can encode independently yet bit-identically to a single pass.
NormalizationRange fixed_encoding_range(const QuaternionImage& image, const SplitSpec& spec,
                                        const NormalizationRange& requested) {
    if (requested.mode == RangeMode::exemplar) return requested;

    NormalizationRange fixed;
    fixed.mode = RangeMode::exemplar;
    if (requested.mode == RangeMode::truncate) {
        for (int c = 0; c < 3; ++c) {
            fixed.min[c] = 0.0;
            fixed.max[c] = 1.0;
        }
        return fixed;
    }

    const int span_tile = std::max({image.width, image.height, 1});
    fixed = merged_tile_ranges(image, spec, span_tile);
    if (requested.mode == RangeMode::joint) {
        const double lo = std::min({fixed.min[0], fixed.min[1], fixed.min[2]});
        const double hi = std::max({fixed.max[0], fixed.max[1], fixed.max[2]});
        for (int c = 0; c < 3; ++c) {
            fixed.min[c] = lo;
            fixed.max[c] = hi;
        }
    }
    return fixed;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"qops: quaternion orthogonal-planes-split image toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read defaults from a key = value config file");

    // ---- recolor -----------------------------------------------------------
    struct {
        std::string input, output, sign = "minus", f = "mu7", g = "mu7";
        std::string range = "per_channel", exemplar;
        int tile_size = 0, threads = 0;
        bool raw = false;
    } rc;
    CLI::App* recolor = app.add_subcommand("recolor", "Alternative color rendition via one split half");
    recolor->configurable(true);
    recolor->add_option("-i,--input", rc.input, "Input PNG")->required();
    recolor->add_option("-o,--output", rc.output, "Output PNG")->required();
    recolor->add_option("--sign", rc.sign, "Split half to keep")->check(CLI::IsMember({"plus", "minus"}));
    recolor->add_option("--f", rc.f, "Left direction (muN, x,y,z, #RRGGBB, sample:X,Y)");
    recolor->add_option("--g", rc.g, "Right direction");
    recolor->add_option("--range", rc.range, "Encoding range mode")
        ->check(CLI::IsMember({"per_channel", "joint", "truncate"}));
    recolor->add_option("--exemplar", rc.exemplar, "Exemplar PNG fixing the encoding ranges");
    recolor->add_option("--tile-size", rc.tile_size, "Process in square tiles (0 = whole image)")
        ->check(CLI::NonNegativeNumber);
    recolor->add_option("--threads", rc.threads, "Worker threads for tiled runs (0 = auto)")
        ->check(CLI::NonNegativeNumber)
        ->envname("QOPS_THREADS");
    recolor->add_flag("--raw", rc.raw, "Keep direction triples unnormalized");
    recolor->callback([&]() {
        const Raster input = load_rgb(rc.input);
        const SplitSpec spec(parse_sign(rc.sign), parse_direction(rc.f, &input, !rc.raw),
                             parse_direction(rc.g, &input, !rc.raw));
        NormalizationRange range;
        range.mode = parse_range_mode(rc.range);
        if (!rc.exemplar.empty()) range = exemplar_ranges(load_rgb(rc.exemplar), spec);

        Raster out;
        if (rc.tile_size > 0) {
            const NormalizationRange fixed =
                fixed_encoding_range(from_rgb(input), spec, range);
            out = tile_apply(
                input,
                [&](const Raster& tile) { return recolorize(from_rgb(tile), spec, fixed); },
                rc.tile_size, rc.threads);
        } else {
            out = recolorize(from_rgb(input), spec, range);
        }
        write_png(rc.output, out);
    });

    // ---- decolor ------------------------------------------------------------
    struct {
        std::string input, output, method = "p1", f;
    } dc;
    CLI::App* decolor = app.add_subcommand("decolor", "Color-to-gray conversion");
    decolor->configurable(true);
    decolor->add_option("-i,--input", dc.input, "Input PNG")->required();
    decolor->add_option("-o,--output", dc.output, "Output PNG (grayscale)")->required();
    decolor->add_option("--method", dc.method, "Weight selection")
        ->check(CLI::IsMember({"p1", "p2a", "p2b", "custom"}));
    decolor->add_option("--f", dc.f, "Axis direction for --method custom");
    decolor->callback([&]() {
        const Raster input = load_rgb(dc.input);
        const QuaternionImage qimg = from_rgb(input);
        Raster out;
        if (dc.method == "p1") {
            out = decolorize_p1(qimg);
        } else if (dc.method == "p2a") {
            out = decolorize_p2a(qimg);
        } else if (dc.method == "p2b") {
            out = decolorize_p2b(qimg);
        } else {
            if (dc.f.empty())
                raise(Errc::invalid_argument, "--method custom needs --f");
            out = decolorize(qimg, parse_direction(dc.f, &input, true));
        }
        write_png(dc.output, out);
    });

    // ---- contrast -----------------------------------------------------------
    struct {
        std::string input, output, preset = "natural";
        std::optional<double> alpha, beta, gamma, delta;
    } ct;
    CLI::App* contrast = app.add_subcommand("contrast", "Contrast enhancement");
    contrast->configurable(true);
    contrast->add_option("-i,--input", ct.input, "Input PNG")->required();
    contrast->add_option("-o,--output", ct.output, "Output PNG")->required();
    contrast->add_option("--preset", ct.preset, "Parameter preset")
        ->check(CLI::IsMember({"natural", "ct"}));
    contrast->add_option("--alpha", ct.alpha, "Override preset alpha");
    contrast->add_option("--beta", ct.beta, "Override preset beta");
    contrast->add_option("--gamma", ct.gamma, "Override preset gamma");
    contrast->add_option("--delta", ct.delta, "Override preset delta");
    contrast->callback([&]() {
        const Raster input = load_rgb(ct.input);
        ContrastParams params =
            ct.preset == "ct" ? contrast_preset_ct() : contrast_preset_natural();
        if (ct.alpha) params.alpha = *ct.alpha;
        if (ct.beta) params.beta = *ct.beta;
        if (ct.gamma) params.gamma = *ct.gamma;
        if (ct.delta) params.delta = *ct.delta;
        const Raster out = contrast_enhance(floor_channels(from_rgb(input)), params);
        write_png(ct.output, out);
    });

    // ---- restain ------------------------------------------------------------
    struct {
        std::string input, output;
        std::vector<std::string> targets;
        std::vector<int> channels;
        double x_scale = 0.30;
        std::string step1_f = "mu10", step1_g = "mu11", step2_f = "mu7", step2_g = "mu8";
        bool max_merge = false;
    } rs;
    CLI::App* restain = app.add_subcommand("restain", "Assign chosen colors to stain channels");
    restain->configurable(true);
    restain->add_option("-i,--input", rs.input, "Input PNG")->required();
    restain->add_option("-o,--output", rs.output, "Output PNG")->required();
    restain->add_option("--targets", rs.targets, "Target colors, 2 or 3 (raw triples or #RRGGBB)")
        ->required()
        ->expected(2, 3);
    restain->add_option("--channels", rs.channels, "Stain channel per target (0, 1, or 2)")
        ->required()
        ->expected(2, 3);
    restain->add_option("--x-scale", rs.x_scale, "Histogram ceiling X: v -> clamp(v/X, 0, 1)")
        ->check(CLI::Range(1e-9, 1.0));
    restain->add_option("--step1-f", rs.step1_f, "Recolor step 1 left direction (3 colors)");
    restain->add_option("--step1-g", rs.step1_g, "Recolor step 1 right direction");
    restain->add_option("--step2-f", rs.step2_f, "Recolor step 2 left direction");
    restain->add_option("--step2-g", rs.step2_g, "Recolor step 2 right direction");
    restain->add_flag("--max-merge", rs.max_merge, "Merge stains by per-pixel max instead of bitwise OR");
    restain->callback([&]() {
        const Raster input = load_rgb(rs.input);
        RestainParams params;
        for (const std::string& t : rs.targets)
            params.target_colors.push_back(parse_direction(t, &input, false));
        params.channels = rs.channels;
        params.x_scale = rs.x_scale;
        params.use_max_merge = rs.max_merge;
        const QuaternionImage qimg = from_rgb(input);
        Raster out;
        if (rs.targets.size() == 2) {
            out = restain_two(qimg, params);
        } else {
            params.recolor_steps.emplace_back(Sign::plus, parse_direction(rs.step1_f, &input, true),
                                              parse_direction(rs.step1_g, &input, true));
            params.recolor_steps.emplace_back(Sign::plus, parse_direction(rs.step2_f, &input, true),
                                              parse_direction(rs.step2_g, &input, true));
            out = restain_multi(qimg, params);
        }
        write_png(rs.output, out);
    });

    // ---- stainsep -----------------------------------------------------------
    struct {
        std::string input, out_prefix, basis = "mu7", s1, s2;
        std::vector<int> keep = {0, 1};
        bool swap = false, multi = false;
        double od_threshold = 0.15, percentile = 1.0;
        std::string step1_f = "mu3", step1_g = "mu8", step2_f = "mu8", step2_g = "mu10";
    } ss;
    CLI::App* stainsep = app.add_subcommand("stainsep", "Per-stain grayscale maps");
    stainsep->configurable(true);
    stainsep->add_option("-i,--input", ss.input, "Input PNG")->required();
    stainsep->add_option("-o,--out-prefix", ss.out_prefix,
                         "Output prefix; writes <prefix>_s<n>_c<channel>.png")
        ->required();
    stainsep->add_option("--basis", ss.basis, "Stain vector source")
        ->check(CLI::IsMember({"mu7", "macenko", "manual"}));
    stainsep->add_option("--s1", ss.s1, "First stain direction for --basis manual");
    stainsep->add_option("--s2", ss.s2, "Second stain direction for --basis manual");
    stainsep->add_option("--keep", ss.keep, "Channels to emit (2-color: up to 2; 3-color: 3)")
        ->expected(1, 3);
    stainsep->add_flag("--swap", ss.swap, "Swap the estimated stain order");
    stainsep->add_option("--od-threshold", ss.od_threshold,
                         "Discard pixels with optical density below this")
        ->check(CLI::NonNegativeNumber);
    stainsep->add_option("--percentile", ss.percentile, "Robust angular percentile")
        ->check(CLI::Range(0.0, 50.0));
    stainsep->add_flag("--multi", ss.multi, "Three-color separation with recolor passes");
    stainsep->add_option("--step1-f", ss.step1_f, "Recolor step 1 left direction (--multi)");
    stainsep->add_option("--step1-g", ss.step1_g, "Recolor step 1 right direction");
    stainsep->add_option("--step2-f", ss.step2_f, "Recolor step 2 left direction");
    stainsep->add_option("--step2-g", ss.step2_g, "Recolor step 2 right direction");
    stainsep->callback([&]() {
        const Raster input = load_rgb(ss.input);
        StainBasis basis;
        if (ss.basis == "macenko") {
            basis = estimate_macenko(input, ss.od_threshold, ss.percentile, ss.swap);
        } else if (ss.basis == "manual") {
            if (ss.s1.empty() || ss.s2.empty())
                raise(Errc::invalid_argument, "--basis manual needs --s1 and --s2");
            basis.s1 = parse_direction(ss.s1, &input, true);
            basis.s2 = parse_direction(ss.s2, &input, true);
            basis.source = StainBasis::Source::manual;
        }
        const QuaternionImage qimg = from_rgb(input);
        std::vector<Raster> maps;
        if (ss.multi) {
            std::vector<SplitSpec> steps;
            steps.emplace_back(Sign::plus, parse_direction(ss.step1_f, &input, true),
                               parse_direction(ss.step1_g, &input, true));
            steps.emplace_back(Sign::plus, parse_direction(ss.step2_f, &input, true),
                               parse_direction(ss.step2_g, &input, true));
            maps = stain_separate_multi(qimg, basis, steps, ss.keep);
        } else {
            maps = stain_separate_two(qimg, basis, ss.keep);
        }
        for (std::size_t n = 0; n < maps.size(); ++n) {
            write_png(ss.out_prefix + "_s" + std::to_string(n + 1) + "_c" +
                          std::to_string(ss.keep[n]) + ".png",
                      maps[n]);
        }
    });

    // ---- enumerate ----------------------------------------------------------
    struct {
        std::string sign = "both", out;
    } en;
    CLI::App* enumerate_cmd = app.add_subcommand("enumerate", "List all direction-pair combinations");
    enumerate_cmd->configurable(true);
    enumerate_cmd->add_option("--sign", en.sign, "Which signs to list")
        ->check(CLI::IsMember({"plus", "minus", "both"}));
    enumerate_cmd->add_option("--out", en.out, "Output CSV")->required();
    enumerate_cmd->callback([&]() {
        std::string csv = "sign,f,g\n";
        for (Sign sign : parse_sign_set(en.sign)) {
            for (const ComboSpec& combo : enumerate_combinations(sign)) {
                csv += sign == Sign::plus ? "plus" : "minus";
                csv += ",mu" + std::to_string(combo.i_index);
                csv += ",mu" + std::to_string(combo.j_index);
                csv += '\n';
            }
        }
        write_text(en.out, csv);
    });

    // ---- batch --------------------------------------------------------------
    struct {
        std::string dataset, exemplar, signs = "both", out_dir, manifest;
        double keep_fraction = 1.0;
        std::uint64_t seed = 0;
    } bt;
    CLI::App* batch = app.add_subcommand("batch", "Run every combination over a dataset");
    batch->configurable(true);
    batch->add_option("--dataset", bt.dataset, "Directory of input PNGs")->required();
    batch->add_option("--exemplar", bt.exemplar, "Exemplar PNG fixing the encoding ranges")
        ->required();
    batch->add_option("--signs", bt.signs, "Which signs to run")
        ->check(CLI::IsMember({"plus", "minus", "both"}));
    batch->add_option("--out-dir", bt.out_dir, "Output directory")->required();
    batch->add_option("--keep-fraction", bt.keep_fraction, "Randomly keep this fraction of outputs")
        ->check(CLI::Range(1e-9, 1.0));
    batch->add_option("--seed", bt.seed, "Seed for the keep-fraction subsample");
    batch->add_option("--manifest", bt.manifest, "Manifest CSV path (default <out-dir>/manifest.csv)");
    batch->callback([&]() {
        const Raster exemplar = load_rgb(bt.exemplar);
        const BatchResult result = batch_transform(bt.dataset, exemplar, parse_sign_set(bt.signs),
                                                   bt.out_dir, bt.keep_fraction, bt.seed);
        const std::string manifest_path =
            bt.manifest.empty() ? (fs::path(bt.out_dir) / "manifest.csv").string() : bt.manifest;
        write_text(manifest_path, manifest_csv(result));
        for (const std::string& err : result.errors)
            std::fprintf(stderr, "qops: batch: %s\n", err.c_str());
    });

    // ---- bench --------------------------------------------------------------
    struct {
        std::string input, f = "mu7", g = "mu7", out;
        int steps = 20;
    } bn;
    CLI::App* bench = app.add_subcommand("bench", "Time the split across shrinking image sizes");
    bench->configurable(true);
    bench->add_option("-i,--input", bn.input, "Input PNG (4 megapixels or larger recommended)")
        ->required();
    bench->add_option("--steps", bn.steps, "Number of sizes to time")->check(CLI::Range(5, 20));
    bench->add_option("--f", bn.f, "Left direction");
    bench->add_option("--g", bn.g, "Right direction");
    bench->add_option("--out", bn.out, "Output CSV")->required();
    bench->callback([&]() {
        const Raster input = load_rgb(bn.input);
        const BenchResult result =
            bench_time_complexity(input, bn.steps, parse_direction(bn.f, &input, true),
                                  parse_direction(bn.g, &input, true));
        write_text(bn.out, bench_csv(result));
    });

    // ---- gamut --------------------------------------------------------------
    struct {
        std::string input, space = "rgb", out;
    } gm;
    CLI::App* gamut = app.add_subcommand("gamut", "Export the image's color point cloud");
    gamut->configurable(true);
    gamut->add_option("-i,--input", gm.input, "Input PNG")->required();
    gamut->add_option("--space", gm.space, "Coordinate space")
        ->check(CLI::IsMember({"rgb", "hsv"}));
    gamut->add_option("--out", gm.out, "Output CSV")->required();
    gamut->callback([&]() {
        const Raster input = load_rgb(gm.input);
        write_text(gm.out,
                   export_gamut(input, gm.space == "hsv" ? GamutSpace::hsv : GamutSpace::rgb));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "qops: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "qops: %s\n", e.what());
        return 2;
    }
    return 0;
}

}  // namespace qops
