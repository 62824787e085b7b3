#include "polypuzzle/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polypuzzle/errors.hpp"
#include "polypuzzle/root_finding.hpp"

namespace polypuzzle {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;
constexpr double kPeriodMatchTol = 1e-9;
constexpr double kResidualTol = 1e-10;
constexpr double kDedupTol = 1e-8;

bool lex_less(Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}

// f^p(z) and its derivative by orbit product; overflow yields non-finite
// values which the root finder treats as a reseed signal.
Complex iterate_value(const Polynomial& f, Complex z, int p) {
    for (int k = 0; k < p; ++k) z = f(z);
    return z;
}

Complex iterate_derivative(const Polynomial& f, Complex z, int p) {
    Complex d{1.0, 0.0};
    for (int k = 0; k < p; ++k) {
        d *= f.derivative(z);
        z = f(z);
    }
    return d;
}

}  // namespace

const char* to_string(CycleType type) {
    switch (type) {
        case CycleType::Superattracting: return "superattracting";
        case CycleType::Attracting: return "attracting";
        case CycleType::Parabolic: return "parabolic";
        case CycleType::IrrationallyNeutral: return "irrationally-neutral";
        case CycleType::Repelling: return "repelling";
    }
    return "unknown";
}

MultiplierClass classify_multiplier(Complex multiplier) {
    const double m = std::abs(multiplier);
    if (m < 1e-9) return {CycleType::Superattracting, 0};
    if (m < 1.0 - 1e-6) return {CycleType::Attracting, 0};
    if (m > 1.0 + 1e-6) return {CycleType::Repelling, 0};
    for (int q = 1; q <= 64; ++q) {
        for (int j = 0; j < q; ++j) {
            if (std::gcd(j == 0 ? q : j, q) != 1) continue;
            const Complex root{std::cos(kTau * j / q), std::sin(kTau * j / q)};
            if (std::abs(multiplier - root) < 1e-6) return {CycleType::Parabolic, q};
        }
    }
    return {CycleType::IrrationallyNeutral, 0};
}

std::vector<Cycle> find_cycles(const Polynomial& poly, int max_period, std::uint64_t seed) {
    if (max_period < 1) throw Error("period must be at least 1");
    const int d = poly.degree();
    double count = 1.0;
    for (int k = 0; k < max_period; ++k) count *= d;
    if (max_period > 8 || count > 6561.0) {
        throw Error("period cap exceeded: max_period <= 8 and degree^max_period <= 6561");
    }

    std::vector<Cycle> cycles;
    for (int p = 1; p <= max_period; ++p) {
        int n = 1;
        for (int k = 0; k < p; ++k) n *= d;

        const auto value = [&poly, p](Complex z) { return iterate_value(poly, z, p) - z; };
        const auto deriv = [&poly, p](Complex z) {
            return iterate_derivative(poly, z, p) - Complex{1.0, 0.0};
        };
        RootOptions opt;
        opt.seed = seed + static_cast<std::uint64_t>(p);
        // Periodic points live inside the bounding disk; seeding close to it
        // keeps Newton steps of f^p - z usefully large.
        std::vector<Complex> roots =
            functional_roots(n, value, deriv, 1.05 * poly.bounding_radius(), opt);

        for (Complex z : roots) {
            if (!is_finite(z)) throw NumericError("cycle root finder lost an iterate");
            const double residual = std::abs(value(z));
            if (residual > kResidualTol) {
                throw NumericError("cycle root residual " + std::to_string(residual) +
                                   " above 1e-10 at period " + std::to_string(p));
            }
            // Exact period is the smallest divisor of p that already returns z.
            int exact = p;
            for (int q = 1; q < p; ++q) {
                if (p % q != 0) continue;
                if (std::abs(iterate_value(poly, z, q) - z) < kPeriodMatchTol) {
                    exact = q;
                    break;
                }
            }
            if (exact != p) continue;

            std::vector<Complex> orbit{z};
            for (int k = 1; k < p; ++k) orbit.push_back(poly(orbit.back()));
            size_t start = 0;
            for (size_t k = 1; k < orbit.size(); ++k) {
                if (lex_less(orbit[k], orbit[start])) start = k;
            }
            std::rotate(orbit.begin(), orbit.begin() + start, orbit.end());

            bool known = false;
            for (const Cycle& c : cycles) {
                if (std::abs(c.points.front() - orbit.front()) < kDedupTol) {
                    known = true;
                    break;
                }
            }
            if (known) continue;

            Cycle c;
            c.points = orbit;
            c.period = p;
            c.multiplier = iterate_derivative(poly, orbit.front(), p);
            const MultiplierClass cls = classify_multiplier(c.multiplier);
            c.type = cls.type;
            c.parabolic_q = cls.parabolic_q;
            cycles.push_back(std::move(c));
        }
    }

    std::sort(cycles.begin(), cycles.end(), [](const Cycle& a, const Cycle& b) {
        return lex_less(a.points.front(), b.points.front());
    });
    return cycles;
}

}  // namespace polypuzzle
