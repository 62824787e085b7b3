#include "polypuzzle/verify.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "json.hpp"
#include "polypuzzle/errors.hpp"
#include "polypuzzle/fixed_count.hpp"
#include "polypuzzle/io.hpp"
#include "polypuzzle/pieces.hpp"
#include "polypuzzle/potential.hpp"
#include "polypuzzle/puzzle.hpp"
#include "polypuzzle/ray.hpp"
#include "polypuzzle/satellite.hpp"

namespace polypuzzle {

namespace {

double circular_distance(double a, double b) {
    double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
}

VerifyCheck functional_equation_check(const Polynomial& poly, std::uint64_t seed) {
    VerifyCheck check{"functional-equation", false, 0.0, ""};
    const PotentialField field = PotentialField::make(poly);
    const double d = poly.degree();
    const double half = field.escape_radius + 1.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-half, half);
    int kept = 0;
    for (int tries = 0; kept < 1000 && tries < 200000; ++tries) {
        const Complex z(coord(rng), coord(rng));
        const double g = green_potential(field, z);
        if (g < 1e-6) continue;
        ++kept;
        const double err =
            std::abs(green_potential(field, poly(z)) - d * g) / std::max(1.0, g);
        check.residual = std::max(check.residual, err);
    }
    check.pass = kept == 1000 && check.residual < 1e-9;
    check.detail = std::to_string(kept) +
                   " escaping samples, worst |G(f(z)) - d G(z)| / max(1, G) = " +
                   format_double(check.residual);
    return check;
}

VerifyCheck ray_round_trip_check(const PuzzleGraph& graph) {
    VerifyCheck check{"ray-round-trip", false, 0.0, ""};
    const PotentialField field = PotentialField::make(graph.poly);
    double worst_arg = 0.0;
    int landed = 0;
    for (const FixedPointEntry& entry : graph.fixed_point_set) {
        for (const Angle& angle : entry.angles) {
            ExternalRay ray = trace_external_ray(field, angle);
            try {
                land_periodic_ray(field, ray);
            } catch (const Error& e) {
                check.detail = "ray " + angle.str() + " failed to land: " + e.what();
                return check;
            }
            check.residual = std::max(check.residual, std::abs(*ray.landing - entry.point));
            worst_arg = std::max(
                worst_arg, circular_distance(external_argument(field, ray.points.front()),
                                             angle.value()));
            ++landed;
        }
    }
    check.pass = check.residual < 1e-8 && worst_arg < 1e-6;
    check.detail = std::to_string(landed) + " rays landed, worst landing error " +
                   format_double(check.residual) + ", worst recovered angle error " +
                   format_double(worst_arg);
    return check;
}

VerifyCheck markov_check(const PuzzleGraph& graph, const VerifyOptions& options) {
    VerifyCheck check{"markov", false, 0.0, ""};
    const int d = graph.poly.degree();

    std::vector<Angle> angles = graph.ray_angles;
    if (!options.drop_angle.empty()) {
        const Angle dropped = Angle::parse(options.drop_angle);
        angles.erase(std::remove(angles.begin(), angles.end(), dropped), angles.end());
    }
    for (const Angle& a : angles) {
        const Angle image = a.map_forward(d);
        if (std::find(angles.begin(), angles.end(), image) == angles.end()) {
            check.detail = "cut angle " + a.str() + " maps to " + image.str() +
                           " which is missing from the angle set";
            return check;
        }
    }

    for (int n = 1; n <= options.depth; ++n) {
        const std::vector<PuzzlePiece> deep = pieces_at_depth(graph, n);
        const std::vector<PuzzlePiece> up = pieces_at_depth(graph, n - 1);
        std::vector<int> degree_over(up.size(), 0);
        for (const PuzzlePiece& p : deep) {
            PieceImage image;
            try {
                image = piece_image(p);
            } catch (const Error& e) {
                check.detail = "depth " + std::to_string(n) + " piece " +
                               std::to_string(p.index) + ": " + e.what();
                return check;
            }
            if (image.index < 0 || image.index >= static_cast<int>(up.size())) {
                check.detail = "depth " + std::to_string(n) + " piece " +
                               std::to_string(p.index) + " has no image piece";
                return check;
            }
            degree_over[image.index] += image.degree;
        }
        for (std::size_t i = 0; i < degree_over.size(); ++i) {
            if (degree_over[i] != d) {
                check.detail = "depth " + std::to_string(n - 1) + " piece " +
                               std::to_string(i) + " is covered with degree " +
                               std::to_string(degree_over[i]) + ", expected " +
                               std::to_string(d);
                return check;
            }
        }
    }
    check.pass = true;
    check.detail = "depths 1.." + std::to_string(options.depth) +
                   ": every piece image is a coarser piece and every coarser piece "
                   "is covered with the full degree";
    return check;
}

Complex interior_point(const std::vector<PuzzlePiece>& pieces, const PuzzlePiece& p) {
    const std::vector<Complex>& poly = p.polygon;
    const std::size_t sz = poly.size();
    for (std::size_t off = 0; off < sz; off += 1 + sz / 64) {
        for (double t : {0.5, 0.35, 0.65, 0.25}) {
            const Complex a = poly[off];
            const Complex b = poly[(off + sz / 2) % sz];
            const Complex mid = a + (b - a) * t;
            try {
                const PieceLocation loc = locate_piece(pieces, mid);
                if (loc.index == p.index && !loc.on_boundary) return mid;
            } catch (const Error&) {
            }
        }
    }
    return poly.front();
}

VerifyCheck fixed_count_check(const PuzzleGraph& graph, const VerifyOptions& options) {
    VerifyCheck check{"fixed-point-count", false, 0.0, ""};
    const int m = graph.iterate_power;
    const int deepest = std::max(m, std::min(options.depth, 4));
    int candidates = 0;
    for (int fdepth = m; fdepth <= deepest; ++fdepth) {
        std::vector<std::vector<PuzzlePiece>> levels;
        for (int k = 0; k <= m; ++k) levels.push_back(pieces_at_depth(graph, fdepth - k));
        const std::vector<PuzzlePiece>& deep = levels.front();
        const std::vector<PuzzlePiece>& top = levels.back();
        for (const PuzzlePiece& p : deep) {
            int idx = p.index;
            int degree = 1;
            for (int k = 0; k < m; ++k) {
                const PieceImage image = piece_image(levels[k][idx]);
                degree *= image.degree;
                idx = image.index;
            }
            const Complex zin = interior_point(deep, p);
            if (locate_piece(top, zin).index != idx) continue;
            ++candidates;
            FixedPointCount count;
            try {
                count = count_fixed_points_in_piece(graph.poly, p, m);
            } catch (const Error& e) {
                check.detail = "depth " + std::to_string(fdepth) + " piece " +
                               std::to_string(p.index) + ": " + e.what();
                return check;
            }
            check.residual = std::max(check.residual, count.residual);
            if (count.total != degree) {
                check.detail = "depth " + std::to_string(fdepth) + " piece " +
                               std::to_string(p.index) + " contains " +
                               std::to_string(count.total) + " fixed points of f^" +
                               std::to_string(m) + ", covering degree is " +
                               std::to_string(degree);
                return check;
            }
        }
    }
    check.pass = candidates > 0;
    check.detail = std::to_string(candidates) +
                   " self-covering pieces, every fixed point count equals the "
                   "covering degree";
    if (candidates == 0) check.detail = "no self-covering piece found";
    return check;
}

VerifyCheck shrinkage_check(const PuzzleGraph& graph, const VerifyOptions& options) {
    VerifyCheck check{"shrinkage", false, 0.0, ""};
    const Complex alpha = graph.fixed_point_set.front().point;
    std::string diameters;
    double prev = 0.0;
    for (int n = 0; n <= options.depth; ++n) {
        SatelliteNeighborhood sn;
        try {
            sn = satellite_neighborhood(graph, alpha, n);
        } catch (const Error& e) {
            check.detail = "satellite depth " + std::to_string(n) + ": " + e.what();
            return check;
        }
        if (n > 0 && sn.diameter >= prev) {
            check.detail = "diameter did not shrink at depth " + std::to_string(n) +
                           ": " + format_double(prev) + " then " +
                           format_double(sn.diameter);
            return check;
        }
        if (!diameters.empty()) diameters += ", ";
        diameters += format_double(sn.diameter);
        prev = sn.diameter;
        check.residual = sn.diameter;
    }
    check.pass = true;
    check.detail = "cut point neighborhood diameters strictly decrease: " + diameters;
    return check;
}

}  // namespace

bool VerifyReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const VerifyCheck& c) { return c.pass; });
}

VerifyReport run_verify_suite(const Polynomial& poly, const VerifyOptions& options) {
    VerifyReport report;
    report.polynomial = poly.source();
    report.checks.push_back(functional_equation_check(poly, options.seed));

    std::optional<PuzzleGraph> graph;
    try {
        graph.emplace(build_puzzle_graph(poly));
    } catch (const Error& e) {
        for (const char* name :
             {"ray-round-trip", "markov", "fixed-point-count", "shrinkage"})
            report.checks.push_back(
                {name, false, 0.0, std::string("puzzle graph unavailable: ") + e.what()});
        return report;
    }

    report.checks.push_back(ray_round_trip_check(*graph));
    report.checks.push_back(markov_check(*graph, options));
    report.checks.push_back(fixed_count_check(*graph, options));
    report.checks.push_back(shrinkage_check(*graph, options));
    return report;
}

std::string verify_report_json(const VerifyReport& report) {
    nlohmann::ordered_json j;
    j["polynomial"] = report.polynomial;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const VerifyCheck& check : report.checks) {
        nlohmann::ordered_json c;
        c["name"] = check.name;
        c["pass"] = check.pass;
        c["residual"] = check.residual;
        c["detail"] = check.detail;
        checks.push_back(c);
    }
    j["checks"] = checks;
    j["pass"] = report.all_pass();
    return j.dump(2) + "\n";
}

}  // namespace polypuzzle
