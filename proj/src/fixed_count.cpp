#include "polypuzzle/fixed_count.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "polypuzzle/cycles.hpp"
#include "polypuzzle/errors.hpp"
#include "polypuzzle/geometry.hpp"
#include "subdivision.hpp"

namespace polypuzzle {

namespace {

constexpr double kMatchTol = 1e-8;
constexpr double kArcStep = 3.14159265358979323846 / 18.0;  // 10 degrees
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

std::string fmt(Complex z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", z.real(), z.imag());
    return buf;
}

double signed_area(const std::vector<Complex>& pts) {
    double a = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const Complex& p = pts[i];
        const Complex& q = pts[(i + 1) % pts.size()];
        a += p.real() * q.imag() - q.real() * p.imag();
    }
    return 0.5 * a;
}

// Replaces every run of the contour inside the disk (center, radius) with a
// circular arc between the exact entry and exit crossings, on the side whose
// midpoint lies inside the reference polygon.
std::vector<Complex> indent_contour(const std::vector<Complex>& contour,
                                    const std::vector<Complex>& reference,
                                    Complex center, double radius) {
    const size_t k = contour.size();
    size_t start = k;
    for (size_t i = 0; i < k; ++i)
        if (std::abs(contour[i] - center) >= radius) {
            start = i;
            break;
        }
    if (start == k)
        throw NumericError(
            "inconclusive count: cannot indent boundary fixed point at " +
            fmt(center));

    auto emit_arc = [&](std::vector<Complex>& out, Complex entry,
                        Complex exit) {
        const double ta = std::arg(entry - center);
        const double tb = std::arg(exit - center);
        double ccw = tb - ta;
        while (ccw <= 0.0) ccw += kTwoPi;
        const double cw = ccw - kTwoPi;
        const Complex mid_ccw =
            center + std::polar(radius, ta + 0.5 * ccw);
        const Complex mid_cw = center + std::polar(radius, ta + 0.5 * cw);
        const bool in_ccw =
            locate_in_polygon(reference, mid_ccw, 1e-12) ==
            PointLocation::Inside;
        const bool in_cw =
            locate_in_polygon(reference, mid_cw, 1e-12) ==
            PointLocation::Inside;
        if (in_ccw == in_cw)
            throw NumericError(
                "inconclusive count: cannot indent boundary fixed point at " +
                fmt(center));
        const double span = in_ccw ? ccw : cw;
        const int steps =
            std::max(2, static_cast<int>(std::ceil(std::abs(span) / kArcStep)));
        for (int s = 0; s <= steps; ++s)
            out.push_back(center +
                          std::polar(radius, ta + span * s / steps));
    };

    std::vector<Complex> out;
    out.reserve(k + 64);
    bool inside = false;
    bool touched = false;
    Complex entry{};
    for (size_t off = 0; off < k; ++off) {
        const Complex p = contour[(start + off) % k];
        const Complex q = contour[(start + off + 1) % k];
        if (!inside) out.push_back(p);
        // Circle crossings along p + t (q - p), t in (0, 1).
        const Complex d = q - p;
        const Complex e = p - center;
        const double a = std::norm(d);
        const double b = 2.0 * (e.real() * d.real() + e.imag() * d.imag());
        const double c = std::norm(e) - radius * radius;
        std::vector<double> ts;
        if (a > 0.0) {
            const double disc = b * b - 4.0 * a * c;
            if (disc > 0.0) {
                const double sq = std::sqrt(disc);
                for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)})
                    if (t > 1e-12 && t < 1.0 - 1e-12) ts.push_back(t);
            }
        }
        std::sort(ts.begin(), ts.end());
        for (double t : ts) {
            const Complex x = p + t * d;
            if (!inside) {
                entry = x;
                inside = true;
            } else {
                emit_arc(out, entry, x);
                inside = false;
                touched = true;
            }
        }
        if ((std::abs(q - center) < radius) != inside)
            throw NumericError(
                "inconclusive count: cannot indent boundary fixed point at " +
                fmt(center));
    }
    if (inside || !touched)
        throw NumericError(
            "inconclusive count: cannot indent boundary fixed point at " +
            fmt(center));
    return out;
}

}  // namespace

FixedPointCount count_fixed_points_in_piece(const Polynomial& poly,
                                            const PuzzlePiece& piece,
                                            int iterate_power) {
    if (iterate_power < 1)
        throw ConfigError("fixed point count needs iterate power at least 1");
    if (iterate_power > 8)
        throw ConfigError(
            "fixed point count supports iterate power at most 8");
    if (piece.polygon.size() < 3)
        throw ConfigError(
            "fixed point count needs a polygon with at least 3 vertices");

    std::vector<Complex> pts = piece.polygon;
    if (signed_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());

    // Solutions of f^m(z) = z are exactly the points on cycles whose period
    // divides m.
    std::vector<Complex> candidates;
    for (const Cycle& cyc : find_cycles(poly, iterate_power))
        if (iterate_power % cyc.period == 0)
            for (const Complex& p : cyc.points) candidates.push_back(p);

    std::vector<Complex> targets = pts;
    targets.insert(targets.end(), piece.vertex_points.begin(),
                   piece.vertex_points.end());

    FixedPointCount out;
    for (const Complex& cand : candidates) {
        double best = 1e18;
        for (const Complex& t : targets)
            best = std::min(best, std::abs(cand - t));
        if (best <= kMatchTol) out.boundary_points.push_back(cand);
    }
    out.boundary_matched = static_cast<int>(out.boundary_points.size());

    double lo_x = 1e18, hi_x = -1e18, lo_y = 1e18, hi_y = -1e18;
    for (const Complex& p : pts) {
        lo_x = std::min(lo_x, p.real());
        hi_x = std::max(hi_x, p.real());
        lo_y = std::min(lo_y, p.imag());
        hi_y = std::max(hi_y, p.imag());
    }
    double radius =
        std::min(1e-3, 0.2 * std::hypot(hi_x - lo_x, hi_y - lo_y));
    for (const Complex& b : out.boundary_points)
        for (const Complex& cand : candidates)
            if (std::abs(cand - b) > kMatchTol)
                radius = std::min(radius, 0.4 * std::abs(cand - b));
    if (radius < 1e-12)
        throw NumericError(
            "inconclusive count: cannot indent boundary fixed point");

    std::vector<Complex> contour = pts;
    for (const Complex& b : out.boundary_points)
        contour = indent_contour(contour, pts, b, radius);

    // Winding of g(z) - z around the indented contour, one segment at a
    // time, bisecting until each argument step is unambiguous.
    auto w = [&](Complex z) {
        return detail::iterate_with_derivative(poly, z, iterate_power).first -
               z;
    };
    auto seg = [&](auto&& self, Complex u, Complex wu, Complex v, Complex wv,
                   int depth) -> double {
        if (std::abs(wu) < 1e-10 || std::abs(wv) < 1e-10)
            throw NumericError(
                "inconclusive count: map fixed point on the contour near " +
                fmt(u));
        const double d = std::arg(wv / wu);
        if (std::abs(d) < 1.5707963267948966) return d;
        if (depth >= 48)
            throw NumericError("inconclusive count: winding did not converge");
        const Complex mid = 0.5 * (u + v);
        const Complex wm = w(mid);
        return self(self, u, wu, mid, wm, depth + 1) +
               self(self, mid, wm, v, wv, depth + 1);
    };
    double total_arg = 0.0;
    Complex prev = contour.back();
    Complex wprev = w(prev);
    for (const Complex& cur : contour) {
        const Complex wcur = w(cur);
        total_arg += seg(seg, prev, wprev, cur, wcur, 0);
        prev = cur;
        wprev = wcur;
    }

    const double nu = total_arg / kTwoPi;
    out.residual = std::abs(nu - std::nearbyint(nu));
    if (out.residual >= 0.2) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", out.residual);
        throw NumericError(std::string("inconclusive count: residual ") + buf);
    }
    const long long rounded = std::llround(nu);
    if (rounded < 0)
        throw NumericError("inconclusive count: negative winding");
    out.interior = static_cast<int>(rounded);
    out.total = out.interior + out.boundary_matched;
    return out;
}

}  // namespace polypuzzle
