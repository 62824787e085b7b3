#include "polypuzzle/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ladder.hpp"
#include "polypuzzle/errors.hpp"

namespace polypuzzle {

namespace {

using detail::kTau;

double circ_dist(double a, double b) {
    const double diff = a - b;
    return std::abs(diff - std::round(diff));
}

double wrap_turn(double x) {
    const double f = x - std::floor(x);
    return f < 1.0 ? f : 0.0;
}

// Far-field argument estimate in turns: arg(A (z + b)) / tau. Reliable well
// outside the filled set, ambiguous near it; callers must branch-check.
double crude_argument(const detail::FarField& far, Complex z) {
    const Complex w = far.A * (z + far.b);
    return wrap_turn(std::arg(w) / kTau);
}

// Trace the ray of (double precision) angle theta down to potential t and
// return the endpoint, stalled or not. Used to disambiguate pullback
// branches close to the filled set.
Complex ray_probe(const Polynomial& f, double theta, double t) {
    const int d = f.degree();
    const auto angle_at = [theta, d](int m) {
        double a = theta;
        for (int k = 0; k < m; ++k) a = wrap_turn(a * d);
        return a;
    };
    const detail::DescentResult r = detail::descend_ray(f, angle_at, std::max(t, 1e-9), nullptr);
    return r.endpoint;
}

}  // namespace

double green_potential(const PotentialField& field, Complex z) {
    const Polynomial& f = *field.poly;
    const int d = f.degree();
    const double R = field.escape_radius;

    int escape_index = -1;
    Complex w = z;
    for (int k = 0; k <= field.iter_budget; ++k) {
        if (!is_finite(w)) break;
        if (std::abs(w) > R) {
            escape_index = k;
            break;
        }
        w = f(w);
    }
    if (escape_index < 0) return 0.0;  // not proven bounded within budget

    // Eight extra iterations shrink the Böttcher truncation error by d^-8.
    int n = escape_index;
    for (int j = 0; j < 8; ++j) {
        if (std::abs(w) > 1e100) break;
        const Complex next = f(w);
        if (!is_finite(next)) break;
        w = next;
        ++n;
    }
    const double correction = std::log(std::abs(f.leading())) / (d - 1);
    return (std::log(std::abs(w)) + correction) / std::pow(static_cast<double>(d), n);
}

double external_argument(const PotentialField& field, Complex z) {
    const Polynomial& f = *field.poly;
    const int d = f.degree();
    const double g = green_potential(field, z);
    if (!(g > field.green_tol) || g <= 0.0) {
        throw NumericError("undefined argument: point not demonstrably escaping");
    }

    // March to the far field where the argument of phi is readable directly.
    std::vector<Complex> orbit{z};
    std::vector<double> potentials{g};
    while (std::abs(orbit.back()) <= 1e8) {
        if (static_cast<int>(orbit.size()) > field.iter_budget) {
            throw NumericError("undefined argument: escape exceeded the iteration budget");
        }
        const Complex next = f(orbit.back());
        if (!is_finite(next)) break;
        orbit.push_back(next);
        potentials.push_back(potentials.back() * d);
    }

    const detail::FarField far(f);
    double theta = crude_argument(far, orbit.back());
    for (size_t k = orbit.size() - 1; k-- > 0;) {
        const double crude = crude_argument(far, orbit[k]);
        int best = 0;
        double best_dist = 2.0;
        for (int j = 0; j < d; ++j) {
            const double candidate = wrap_turn((theta + j) / d);
            const double dist = circ_dist(candidate, crude);
            if (dist < best_dist) {
                best_dist = dist;
                best = j;
            }
        }
        if (best_dist < 0.3 / d) {
            theta = wrap_turn((theta + best) / d);
            continue;
        }
        // Ambiguous far-field estimate: land each candidate ray at this
        // point's potential and keep the branch that actually reaches it.
        int chosen = 0;
        double chosen_dist = std::numeric_limits<double>::infinity();
        for (int j = 0; j < d; ++j) {
            const double candidate = wrap_turn((theta + j) / d);
            const Complex probe = ray_probe(f, candidate, potentials[k]);
            const double dist = std::abs(probe - orbit[k]);
            if (dist < chosen_dist) {
                chosen_dist = dist;
                chosen = j;
            }
        }
        theta = wrap_turn((theta + chosen) / d);
    }
    return theta;
}

std::vector<Complex> trace_equipotential(const PotentialField& field, double level, int samples) {
    if (!(level > 0.0)) throw Error("equipotential level must be positive");
    if (samples < 4) throw Error("equipotential needs at least 4 samples");
    const Polynomial& f = *field.poly;
    const int d = f.degree();

    std::vector<Complex> points;
    points.reserve(samples);
    for (int k = 0; k < samples; ++k) {
        const double theta = static_cast<double>(k) / samples;
        const auto angle_at = [theta, d](int m) {
            double a = theta;
            for (int i = 0; i < m; ++i) a = wrap_turn(a * d);
            return a;
        };
        if (level >= detail::kTBig) {
            const detail::FarField far(f);
            points.push_back(std::exp(Complex{level, kTau * theta}) / far.A - far.b);
            continue;
        }
        const detail::DescentResult r = detail::descend_ray(f, angle_at, level, nullptr);
        if (r.stalled) {
            throw NumericError("equipotential refinement stalled at argument " +
                               std::to_string(k) + "/" + std::to_string(samples));
        }
        points.push_back(r.endpoint);
    }
    return points;
}

}  // namespace polypuzzle
