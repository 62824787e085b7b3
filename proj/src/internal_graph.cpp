#include "polypuzzle/internal_graph.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "polypuzzle/errors.hpp"
#include "polypuzzle/root_finding.hpp"
#include "subdivision.hpp"

namespace polypuzzle {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string fmt(Complex z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", z.real(), z.imag());
    return buf;
}

double wrap_pi(double a) {
    while (a > 3.14159265358979323846) a -= kTwoPi;
    while (a < -3.14159265358979323846) a += kTwoPi;
    return a;
}

// All solutions of g(zeta) = target for the composed iterate coefficients.
std::vector<Complex> iterate_preimages(const std::vector<Complex>& gcoeffs,
                                       Complex target) {
    std::vector<Complex> coeffs = gcoeffs;
    coeffs[0] -= target;
    return polynomial_roots(coeffs);
}

}  // namespace

InternalGraph build_internal_graph(const Polynomial& poly, const Cycle& cycle,
                                   int point_index) {
    if (cycle.type == CycleType::Attracting)
        throw BuildError("unsupported internal graph: attracting cycle at " +
                         fmt(cycle.points.front()) +
                         " needs linearizer arcs");
    if (cycle.type == CycleType::Parabolic)
        throw BuildError("unsupported internal graph: parabolic cycle at " +
                         fmt(cycle.points.front()) + " needs petal arcs");
    if (cycle.type != CycleType::Superattracting)
        throw Error("internal graph needs a superattracting cycle");
    if (point_index < 0 || point_index >= cycle.period)
        throw ConfigError("internal graph point index out of range");

    const Complex z0 = cycle.points[point_index];
    const int p = cycle.period;
    auto g = [&](Complex z) {
        return detail::iterate_with_derivative(poly, z, p).first;
    };

    // Local degree k at the fixed center from a Fourier probe on a small
    // circle: the first significant Taylor mode at or above order 2.
    const int probe = 32;
    const double h = 1e-3;
    std::vector<Complex> sample(probe);
    for (int j = 0; j < probe; ++j) {
        Complex w = z0 + std::polar(h, kTwoPi * j / probe);
        sample[j] = g(w) - z0;
    }
    std::vector<Complex> mode(probe / 2, Complex{0.0, 0.0});
    for (int k = 0; k < probe / 2; ++k) {
        for (int j = 0; j < probe; ++j)
            mode[k] += sample[j] * std::polar(1.0, -kTwoPi * k * j / probe);
        mode[k] /= static_cast<double>(probe);
    }
    double peak = 0;
    for (const Complex& m : mode) peak = std::max(peak, std::abs(m));
    int k = 0;
    for (int j = 2; j < probe / 2; ++j)
        if (std::abs(mode[j]) > 1e-4 * peak) {
            k = j;
            break;
        }
    if (k < 2)
        throw NumericError("internal graph local degree undetected at " +
                           fmt(z0));
    const Complex a_k = mode[k] / std::pow(h, k);
    const Complex c = std::pow(a_k, 1.0 / (k - 1));

    // Seed circle at conjugacy radius 0.5^(k^s), small enough that the
    // linear chart z = z0 + phi / c is exact to working precision, then s
    // pullback rounds lift it to the half-radius circle.
    int s = 1;
    while (std::pow(0.5, std::pow(double(k), s)) > 1e-4) ++s;
    const std::vector<Complex> gcoeffs = detail::iterate_coefficients(poly, p);

    int count = 16;
    double radius = std::pow(0.5, std::pow(double(k), s));
    std::vector<Complex> circle(count);
    for (int j = 0; j < count; ++j)
        circle[j] = z0 + std::polar(radius, kTwoPi * j / count) / c;

    for (int round = 1; round <= s; ++round) {
        int next_count = count * k;
        std::vector<Complex> next(next_count);
        for (int j = 0; j < next_count; ++j) {
            const Complex target = circle[j % count];
            std::vector<Complex> roots = iterate_preimages(gcoeffs, target);
            Complex pred;
            if (j == 0) {
                // Stay on the zero internal ray: smallest angular deviation
                // seen from the center.
                double best = 1e18;
                for (const Complex& r : roots) {
                    double dev = std::abs(wrap_pi(
                        std::arg((r - z0) / (circle[0] - z0))));
                    if (dev < best) {
                        best = dev;
                        pred = r;
                    }
                }
            } else {
                const Complex guess =
                    z0 + (next[j - 1] - z0) *
                             std::polar(1.0, kTwoPi / next_count);
                double best = 1e18;
                for (const Complex& r : roots) {
                    double dist = std::abs(r - guess);
                    if (dist < best) {
                        best = dist;
                        pred = r;
                    }
                }
            }
            detail::BranchSolve polish =
                detail::solve_iterate_preimage(poly, p, target, pred);
            next[j] = polish.ok ? polish.point : pred;
            if (std::abs(g(next[j]) - target) > 1e-9 * (1.0 + std::abs(target)))
                throw NumericError("internal graph circle lift failed at " +
                                   fmt(target));
        }
        circle = std::move(next);
        count = next_count;
    }

    InternalGraph graph;
    graph.center = z0;
    graph.return_period = p;
    graph.return_degree = k;
    graph.radius = 0.5;
    graph.circle = circle;

    // Arms follow the k internal rays whose angles map to angle zero: each
    // stage pulls the previous stage of the zero ray back through g. The
    // zero arm converges to the g-fixed boundary point, the others to its
    // preimages on the boundary.
    std::vector<std::vector<Complex>> stages(k);
    std::vector<Complex> arm0;
    {
        std::vector<Complex> x;
        x.push_back(circle[0]);
        for (int t = 0; t < 300; ++t) {
            const Complex target = x.back();
            std::vector<Complex> roots = iterate_preimages(gcoeffs, target);
            Complex pred = x.back();
            if (x.size() >= 3) {
                const Complex s1 = x[x.size() - 2] - x[x.size() - 3];
                const Complex s2 = x[x.size() - 1] - x[x.size() - 2];
                if (std::abs(s2) > 0 && std::abs(s1) > 0)
                    pred = x.back() + s2 * (s2 / s1);
            }
            Complex chosen;
            double best = 1e18;
            for (const Complex& r : roots) {
                double dist = std::abs(r - pred);
                if (dist < best) {
                    best = dist;
                    chosen = r;
                }
            }
            detail::BranchSolve polish =
                detail::solve_iterate_preimage(poly, p, target, chosen);
            if (polish.ok) chosen = polish.point;
            x.push_back(chosen);
            if (std::abs(x[x.size() - 1] - x[x.size() - 2]) <
                1e-9 * (1.0 + std::abs(chosen)))
                break;
        }
        if (std::abs(x[x.size() - 1] - x[x.size() - 2]) >=
            1e-6 * (1.0 + std::abs(x.back())))
            throw NumericError("internal graph arm did not converge at " +
                               fmt(z0));
        arm0 = std::move(x);
    }
    // Newton-polish the zero landing against the fixed point equation.
    Complex xi0 = arm0.back();
    for (int it = 0; it < 50; ++it) {
        auto [v, dv] = detail::iterate_with_derivative(poly, xi0, p);
        Complex err = v - xi0;
        if (std::abs(err) < 1e-13 * (1.0 + std::abs(xi0))) break;
        Complex denom = dv - Complex{1.0, 0.0};
        if (std::abs(denom) < 1e-300) break;
        xi0 -= err / denom;
    }
    if (std::abs(xi0 - arm0.back()) < 1e-5 * (1.0 + std::abs(xi0)))
        arm0.back() = xi0;

    stages[0] = arm0;
    for (int a = 1; a < k; ++a) {
        std::vector<Complex> x;
        x.push_back(circle[(static_cast<long long>(a) * count) / k]);
        for (size_t t = 0; t + 1 < arm0.size(); ++t) {
            const Complex target = arm0[t];
            std::vector<Complex> roots = iterate_preimages(gcoeffs, target);
            Complex pred = x.back();
            if (x.size() >= 3) {
                const Complex s1 = x[x.size() - 2] - x[x.size() - 3];
                const Complex s2 = x[x.size() - 1] - x[x.size() - 2];
                if (std::abs(s2) > 0 && std::abs(s1) > 0)
                    pred = x.back() + s2 * (s2 / s1);
            }
            Complex chosen;
            double best = 1e18;
            for (const Complex& r : roots) {
                double dist = std::abs(r - pred);
                if (dist < best) {
                    best = dist;
                    chosen = r;
                }
            }
            detail::BranchSolve polish =
                detail::solve_iterate_preimage(poly, p, target, chosen);
            if (polish.ok) chosen = polish.point;
            x.push_back(chosen);
        }
        // Land exactly on a preimage of the zero landing point.
        detail::BranchSolve fin =
            detail::solve_iterate_preimage(poly, p, arm0.back(), x.back());
        if (fin.ok &&
            std::abs(fin.point - x.back()) < 1e-3 * (1.0 + std::abs(x.back())))
            x.push_back(fin.point);
        stages[a] = std::move(x);
    }

    for (int a = 0; a < k; ++a) {
        graph.arms.push_back(stages[a]);
        graph.landings.push_back(stages[a].back());
    }
    return graph;
}

}  // namespace polypuzzle
