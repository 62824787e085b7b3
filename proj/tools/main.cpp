#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "polypuzzle/components.hpp"
#include "polypuzzle/config.hpp"
#include "polypuzzle/cycles.hpp"
#include "polypuzzle/errors.hpp"
#include "polypuzzle/grid.hpp"
#include "polypuzzle/io.hpp"
#include "polypuzzle/pieces.hpp"
#include "polypuzzle/polynomial.hpp"
#include "polypuzzle/potential.hpp"
#include "polypuzzle/puzzle.hpp"
#include "polypuzzle/ray.hpp"
#include "polypuzzle/verify.hpp"

namespace {

using namespace polypuzzle;

// Raw flag values; each subcommand folds the ones that were actually given
// over the config file, which in turn overrides the defaults.
struct FlagBag {
    std::string poly;
    std::string angle;
    int depth = 0;
    std::vector<std::string> res;
    std::string box;
    std::string eps;
    double level = 0.0;
    int max_iter = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string config_path;
    std::string kind = "fatou";
    std::string drop_angle;
    bool emit_neutral_c = false;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) return parts;
        start = pos + 1;
    }
}

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ConfigError("bad " + what + " value: " + text);
    }
}

Box parse_box_flag(const std::string& text) {
    const std::vector<std::string> parts = split(text, ',');
    if (parts.size() != 4) throw ConfigError("--box must be x0,y0,x1,y1");
    return {parse_number(parts[0], "box"), parse_number(parts[1], "box"),
            parse_number(parts[2], "box"), parse_number(parts[3], "box")};
}

std::vector<double> parse_eps_flag(const std::string& text) {
    std::vector<double> eps;
    if (text.empty()) return eps;
    for (const std::string& part : split(text, ','))
        eps.push_back(parse_number(part, "eps"));
    return eps;
}

// "N" or "NxM"; most commands require square.
std::pair<int, int> parse_res_token(const std::string& text) {
    const std::size_t x = text.find('x');
    try {
        if (x == std::string::npos) {
            const int n = std::stoi(text);
            return {n, n};
        }
        return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
    } catch (const std::exception&) {
        throw ConfigError("bad res value: " + text);
    }
}

Polynomial parse_poly_arg(const std::string& text) { return parse_polynomial(text); }

// Largest screened period: at most 6, keeping degree^period within the
// cycle finder's cap.
int cycle_period_cap(int degree) {
    int cap = 6;
    while (cap > 1 && std::pow(static_cast<double>(degree), cap) > 6561.0) --cap;
    return cap;
}

bool given(const CLI::App* cmd, const std::string& name) {
    const CLI::Option* option = cmd->get_option_no_throw(name);
    return option && option->count() > 0;
}

RunConfig merge_config(const CLI::App* cmd, const FlagBag& flags) {
    RunConfig config =
        flags.config_path.empty() ? RunConfig{} : load_config_file(flags.config_path);
    if (given(cmd, "--poly")) config.poly = flags.poly;
    if (given(cmd, "--depth")) config.depth = flags.depth;
    if (given(cmd, "--level")) config.level = flags.level;
    if (given(cmd, "--max-iter")) config.max_iter = flags.max_iter;
    if (given(cmd, "--seed")) config.seed = flags.seed;
    if (given(cmd, "--out")) config.out_dir = flags.out;
    if (given(cmd, "--box")) config.box = parse_box_flag(flags.box);
    if (given(cmd, "--eps")) config.epsilons = parse_eps_flag(flags.eps);
    if (given(cmd, "--res")) {
        config.resolutions.clear();
        for (const std::string& entry : flags.res)
            for (const std::string& token : split(entry, ',')) {
                const auto [nx, ny] = parse_res_token(token);
                config.resolutions.push_back(nx);
                if (ny != nx) config.resolutions.push_back(ny);
            }
    }
    return config;
}

// Collects the files of one run; stdout when no --out was given.
struct OutputBatch {
    explicit OutputBatch(const RunConfig& config) : config_(config) {
        if (!config.out_dir.empty()) std::filesystem::create_directories(config.out_dir);
    }
    void add(const std::string& name, const std::string& content) {
        if (config_.out_dir.empty()) {
            std::cout << content;
            return;
        }
        write_text_file(config_.out_dir + "/" + name, content);
        files_.push_back(name);
    }
    void add_raster(const std::string& stem, int width, int height,
                    const std::vector<std::uint8_t>& pixels) {
        write_pgm(config_.out_dir + "/" + stem + ".pgm", width, height, pixels);
        write_png(config_.out_dir + "/" + stem + ".png", width, height, pixels);
        files_.push_back(stem + ".pgm");
        files_.push_back(stem + ".png");
    }
    void finish() {
        if (config_.out_dir.empty() || files_.empty()) return;
        write_text_file(config_.out_dir + "/manifest.json",
                        manifest_json(config_json(config_), files_));
    }

private:
    RunConfig config_;
    std::vector<std::string> files_;
};

std::string format_point(Complex z) {
    return "(" + format_double(z.real()) + ", " + format_double(z.imag()) + ")";
}

int cmd_cycles(const CLI::App* cmd, const FlagBag& flags) {
    if (flags.emit_neutral_c) {
        // lambda = e^{2 pi i (sqrt 5 - 1) / 2}; the fixed point with this
        // multiplier sits at lambda / 2, so c = lambda / 2 - lambda^2 / 4.
        const double theta = (std::sqrt(5.0) - 1.0) / 2.0;
        const Complex lambda = std::polar(1.0, 2.0 * M_PI * theta);
        const Complex c = lambda / 2.0 - lambda * lambda / 4.0;
        char buf[80];
        std::snprintf(buf, sizeof(buf), "%+.17g%+.17gi\n", c.real(), c.imag());
        std::cout << buf;
        return 0;
    }
    const RunConfig config = merge_config(cmd, flags);
    const Polynomial poly = parse_poly_arg(config.poly);
    const std::vector<Cycle> cycles =
        find_cycles(poly, cycle_period_cap(poly.degree()), config.seed);

    std::string table;
    const Cycle* neutral = nullptr;
    for (const Cycle& cycle : cycles) {
        table += "period " + std::to_string(cycle.period) + "  " +
                 to_string(cycle.type) + "  multiplier " + format_point(cycle.multiplier) +
                 "  points";
        for (const Complex& z : cycle.points) table += " " + format_point(z);
        table += "\n";
        if (cycle.type == CycleType::IrrationallyNeutral && !neutral) neutral = &cycle;
    }
    std::cout << table;
    OutputBatch batch(config);
    if (!config.out_dir.empty()) {
        batch.add("cycles.txt", table);
        batch.finish();
    }
    if (neutral) {
        std::cout << "irrationally-neutral detected: period " +
                         std::to_string(neutral->period) + " at " +
                         format_point(neutral->points.front()) + "\n";
        return 1;
    }
    return 0;
}

int cmd_ray(const CLI::App* cmd, const FlagBag& flags) {
    const RunConfig config = merge_config(cmd, flags);
    const Polynomial poly = parse_poly_arg(config.poly);
    const PotentialField field = PotentialField::make(poly);
    const Angle angle = Angle::parse(flags.angle);
    ExternalRay ray = trace_external_ray(field, angle);
    try {
        land_periodic_ray(field, ray);
    } catch (const Error& e) {
        std::cerr << "note: ray did not land: " << e.what() << "\n";
    }
    std::string name = "ray_" + angle.str() + ".json";
    std::replace(name.begin(), name.end(), '/', '_');
    OutputBatch batch(config);
    batch.add(name, ray_json(ray));
    batch.finish();
    return 0;
}

int cmd_potential(const CLI::App* cmd, const FlagBag& flags) {
    const RunConfig config = merge_config(cmd, flags);
    const Polynomial poly = parse_poly_arg(config.poly);
    const PotentialField field = PotentialField::make(poly);
    const std::vector<Complex> points = trace_equipotential(field, config.level, 1024);
    OutputBatch batch(config);
    batch.add("equipotential.csv", polyline_csv(points));
    batch.add("equipotential.json", equipotential_json(config.level, points));
    batch.finish();
    return 0;
}

GridClassification classify_for(const RunConfig& config, int nx, int ny) {
    const Polynomial poly = parse_poly_arg(config.poly);
    const std::vector<Cycle> cycles =
        find_cycles(poly, cycle_period_cap(poly.degree()), config.seed);
    GridClassification grid =
        classify_grid(poly, config.box, nx, ny, config.max_iter, cycles);
    if (!grid.warning.empty()) std::cerr << "warning: " << grid.warning << "\n";
    return grid;
}

int cmd_render(const CLI::App* cmd, const FlagBag& flags) {
    const RunConfig config = merge_config(cmd, flags);
    if (config.out_dir.empty()) throw ConfigError("render needs --out");
    const auto [nx, ny] = flags.res.empty()
                              ? std::pair<int, int>{config.resolutions.front(),
                                                    config.resolutions.front()}
                              : parse_res_token(flags.res.front());
    const GridClassification grid = classify_for(config, nx, ny);

    // Top image row is the top of the box.
    std::vector<std::uint8_t> escape(static_cast<std::size_t>(nx) * ny, 0);
    std::vector<std::uint8_t> basins(static_cast<std::size_t>(nx) * ny, 0);
    for (int row = 0; row < ny; ++row) {
        for (int ix = 0; ix < nx; ++ix) {
            const PixelLabel& label = grid.at(ix, ny - 1 - row);
            const std::size_t at = static_cast<std::size_t>(row) * nx + ix;
            switch (label.kind) {
                case PixelKind::Escaping:
                    escape[at] = static_cast<std::uint8_t>(
                        16 + std::lround(239.0 * std::exp(-label.index / 24.0)));
                    basins[at] = 255;
                    break;
                case PixelKind::Basin:
                    basins[at] = static_cast<std::uint8_t>(
                        40 + (label.cycle * 16 + label.phase) * 73 % 176);
                    break;
                case PixelKind::Unresolved:
                    escape[at] = 8;
                    break;
            }
        }
    }
    OutputBatch batch(config);
    batch.add_raster("escape", nx, ny, escape);
    batch.add_raster("basins", nx, ny, basins);
    batch.finish();
    return 0;
}

int cmd_components(const CLI::App* cmd, const FlagBag& flags) {
    const RunConfig config = merge_config(cmd, flags);
    const int n = config.resolutions.front();
    const GridClassification grid = classify_for(config, n, n);
    std::vector<ComponentRecord> records =
        extract_components(grid, ComponentKind::FilledJulia);
    const std::vector<ComponentRecord> fatou =
        extract_components(grid, ComponentKind::Fatou);
    records.insert(records.end(), fatou.begin(), fatou.end());
    OutputBatch batch(config);
    batch.add("components.csv", components_csv(records));
    batch.finish();
    return 0;
}

int cmd_puzzle(const CLI::App* cmd, const FlagBag& flags) {
    const RunConfig config = merge_config(cmd, flags);
    const Polynomial poly = parse_poly_arg(config.poly);
    PuzzleConfig puzzle_config;
    puzzle_config.equipotential_level = config.level;
    puzzle_config.depth_cap = std::max(puzzle_config.depth_cap, config.depth);
    const PuzzleGraph graph = build_puzzle_graph(poly, puzzle_config);
    const std::vector<PuzzlePiece> pieces = pieces_at_depth(graph, config.depth);
    if (config.out_dir.empty()) {
        nlohmann::ordered_json all = nlohmann::ordered_json::array();
        for (const PuzzlePiece& piece : pieces)
            all.push_back(nlohmann::ordered_json::parse(piece_json(piece)));
        std::cout << all.dump(2) << "\n";
        return 0;
    }
    OutputBatch batch(config);
    for (const PuzzlePiece& piece : pieces)
        batch.add("piece_" + std::to_string(piece.depth) + "_" +
                      std::to_string(piece.index) + ".json",
                  piece_json(piece));
    batch.finish();
    return 0;
}

int cmd_shrink(const CLI::App* cmd, const FlagBag& flags) {
    const RunConfig config = merge_config(cmd, flags);
    ComponentKind kind;
    if (flags.kind == "fatou") {
        kind = ComponentKind::Fatou;
    } else if (flags.kind == "julia") {
        kind = ComponentKind::FilledJulia;
    } else {
        throw ConfigError("--kind must be fatou or julia");
    }
    if (config.resolutions.empty()) throw ConfigError("shrink needs a resolution");
    const Polynomial poly = parse_poly_arg(config.poly);
    const StabilityReport report = shrink_stability(
        poly, config.box, kind, config.resolutions, config.epsilons, config.max_iter,
        cycle_period_cap(poly.degree()));

    OutputBatch batch(config);
    for (std::size_t r = 0; r < report.resolutions.size(); ++r) {
        std::vector<ShrinkRow> rows;
        for (std::size_t e = 0; e < report.epsilons.size(); ++e)
            rows.push_back({report.epsilons[e], report.counts[r][e]});
        batch.add("shrink_" + std::to_string(report.resolutions[r]) + ".csv",
                  shrink_csv(rows));
        std::cout << "resolution " << report.resolutions[r] << ": excluded "
                  << report.excluded[r] << " boundary-touching components\n";
    }
    batch.finish();

    const std::size_t n = report.resolutions.size();
    for (std::size_t e = 0; e < report.epsilons.size(); ++e) {
        std::cout << "epsilon " << format_double(report.epsilons[e]) << ": ";
        if (n < 2) {
            std::cout << "count " << report.counts.front()[e] << " (single resolution, no verdict)\n";
            continue;
        }
        const int a = report.counts[n - 2][e];
        const int b = report.counts[n - 1][e];
        if (a == b)
            std::cout << "STABLE (count " << b << ")\n";
        else
            std::cout << "UNSTABLE (counts " << a << ", " << b << ")\n";
    }
    return 0;
}

int cmd_verify(const CLI::App* cmd, const FlagBag& flags) {
    const RunConfig config = merge_config(cmd, flags);
    const Polynomial poly = parse_poly_arg(config.poly);
    VerifyOptions options;
    options.depth = config.depth;
    options.seed = config.seed;
    options.drop_angle = flags.drop_angle;
    const VerifyReport report = run_verify_suite(poly, options);
    const std::string json = verify_report_json(report);
    std::cout << json;
    if (!config.out_dir.empty()) {
        OutputBatch batch(config);
        batch.add("verify.json", json);
        batch.finish();
    }
    if (!report.all_pass()) {
        std::string failed;
        for (const VerifyCheck& check : report.checks)
            if (!check.pass) failed += (failed.empty() ? "" : ", ") + check.name;
        std::cerr << "verify failed: " << failed << "\n";
        return 3;
    }
    return 0;
}

void apply_thread_cap() {
    const char* env = std::getenv("POLYPUZZLE_THREADS");
    if (!env) return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n <= 0) {
        std::cerr << "warning: ignoring POLYPUZZLE_THREADS=" << env << "\n";
        return;
    }
    omp_set_num_threads(static_cast<int>(std::min<long>(n, omp_get_max_threads())));
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_cap();

    CLI::App app{"puzzle piece construction and component shrinkage for polynomial Julia sets"};
    app.require_subcommand(1);
    FlagBag flags;

    const auto add_common = [&flags](CLI::App* cmd) {
        cmd->add_option("--poly", flags.poly, "polynomial, e.g. \"z^2-1\"");
        cmd->add_option("--config", flags.config_path, "JSON config file");
        cmd->add_option("--seed", flags.seed, "root finder seed");
        cmd->add_option("--out", flags.out, "output directory");
        cmd->add_option("--max-iter", flags.max_iter, "iteration budget");
    };

    CLI::App* cycles = app.add_subcommand("cycles", "find and classify periodic cycles");
    add_common(cycles);
    cycles->add_flag("--emit-neutral-c", flags.emit_neutral_c,
                     "print the quadratic constant whose fixed point has the "
                     "golden rotation multiplier");

    CLI::App* ray = app.add_subcommand("ray", "trace one external ray");
    add_common(ray);
    ray->add_option("--angle", flags.angle, "external angle p/q")->required();

    CLI::App* potential = app.add_subcommand("potential", "trace one equipotential");
    add_common(potential);
    potential->add_option("--level", flags.level, "potential level");

    CLI::App* render = app.add_subcommand("render", "escape and basin rasters");
    add_common(render);
    render->add_option("--res", flags.res, "resolution NxN");
    render->add_option("--box", flags.box, "plane window x0,y0,x1,y1");

    CLI::App* components = app.add_subcommand("components", "connected component table");
    add_common(components);
    components->add_option("--res", flags.res, "resolution NxN");
    components->add_option("--box", flags.box, "plane window x0,y0,x1,y1");

    CLI::App* puzzle = app.add_subcommand("puzzle", "emit puzzle pieces at a depth");
    add_common(puzzle);
    puzzle->add_option("--depth", flags.depth, "subdivision depth");
    puzzle->add_option("--level", flags.level, "equipotential level");

    CLI::App* shrink = app.add_subcommand("shrink", "component shrinkage across resolutions");
    add_common(shrink);
    shrink->add_option("--res", flags.res, "resolutions, e.g. 512,1024");
    shrink->add_option("--box", flags.box, "plane window x0,y0,x1,y1");
    shrink->add_option("--eps", flags.eps, "diameter thresholds, e.g. 0.4,0.2,0.1");
    shrink->add_option("--kind", flags.kind, "fatou (default) or julia");

    CLI::App* verify = app.add_subcommand("verify", "run the invariant suite");
    add_common(verify);
    verify->add_option("--depth", flags.depth, "sweep depth");
    verify->add_option("--drop-angle", flags.drop_angle,
                       "remove this angle from the cut system first");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto guard = [](auto&& fn) {
        try {
            return fn();
        } catch (const ParseError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        } catch (const ConfigError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        } catch (const BuildError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 3;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 3;
        }
    };

    if (cycles->parsed()) return guard([&] { return cmd_cycles(cycles, flags); });
    if (ray->parsed()) return guard([&] { return cmd_ray(ray, flags); });
    if (potential->parsed()) return guard([&] { return cmd_potential(potential, flags); });
    if (render->parsed()) return guard([&] { return cmd_render(render, flags); });
    if (components->parsed()) return guard([&] { return cmd_components(components, flags); });
    if (puzzle->parsed()) return guard([&] { return cmd_puzzle(puzzle, flags); });
    if (shrink->parsed()) return guard([&] { return cmd_shrink(shrink, flags); });
    if (verify->parsed()) return guard([&] { return cmd_verify(verify, flags); });
    return 2;
}
