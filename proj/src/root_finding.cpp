#include "polypuzzle/root_finding.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "polypuzzle/errors.hpp"

namespace polypuzzle {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

std::vector<Complex> seed_circle(int n, double radius, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    std::vector<Complex> z(n);
    for (int j = 0; j < n; ++j) {
        // Offset angle breaks symmetry traps on real-coefficient inputs.
        const double angle = kTau * (j + 0.3618) / n;
        const double r = radius * (1.0 + jitter(rng));
        z[j] = Complex{r * std::cos(angle) + 0.01 * radius * jitter(rng),
                       r * std::sin(angle) + 0.01 * radius * jitter(rng)};
    }
    return z;
}

// Simultaneous Jacobi-style Aberth sweeps; returns max relative correction
// of the final sweep. Non-finite or repulsion-degenerate entries are reseeded
// inside the disk.
double aberth_sweeps(std::vector<Complex>& z,
                     const std::function<Complex(Complex)>& value,
                     const std::function<Complex(Complex)>& deriv,
                     double radius,
                     const RootOptions& opt,
                     std::mt19937_64& rng) {
    const int n = static_cast<int>(z.size());
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Complex> step(n);
    double worst = 0.0;
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        worst = 0.0;
        for (int i = 0; i < n; ++i) {
            Complex v = value(z[i]);
            Complex dv = deriv(z[i]);
            if (!is_finite(v) || !is_finite(dv)) {
                z[i] = Complex{radius * unit(rng), radius * unit(rng)};
                v = value(z[i]);
                dv = deriv(z[i]);
            }
            if (std::abs(dv) == 0.0) {
                // Exactly critical start; nudge off and retry next sweep.
                z[i] += Complex{1e-9 * (1.0 + radius), 1e-9 * (1.0 + radius)};
                step[i] = Complex{0.0, 0.0};
                worst = 1.0;
                continue;
            }
            const Complex newton = v / dv;
            Complex repulsion{0.0, 0.0};
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const Complex diff = z[i] - z[j];
                if (std::abs(diff) < 1e-300) continue;
                repulsion += 1.0 / diff;
            }
            const Complex denom = Complex{1.0, 0.0} - newton * repulsion;
            const Complex w = std::abs(denom) < 1e-300 ? newton : newton / denom;
            step[i] = w;
            worst = std::max(worst, std::abs(w) / std::max(1.0, std::abs(z[i])));
        }
        for (int i = 0; i < n; ++i) {
            const Complex next = z[i] - step[i];
            if (is_finite(next)) z[i] = next;
        }
        if (worst < opt.tol) break;
    }
    return worst;
}

void newton_polish(std::vector<Complex>& z,
                   const std::function<Complex(Complex)>& value,
                   const std::function<Complex(Complex)>& deriv) {
    for (Complex& r : z) {
        for (int it = 0; it < 60; ++it) {
            const Complex v = value(r);
            const Complex dv = deriv(r);
            if (!is_finite(v) || !is_finite(dv) || std::abs(dv) == 0.0) break;
            const Complex step = v / dv;
            if (!is_finite(r - step)) break;
            r -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
        }
    }
}

}  // namespace

std::vector<Complex> polynomial_roots(const std::vector<Complex>& coefficients,
                                      const RootOptions& options) {
    std::vector<Complex> coeffs = coefficients;
    while (coeffs.size() > 1 && coeffs.back() == Complex{0.0, 0.0}) coeffs.pop_back();
    if (coeffs.size() < 2) throw Error("root finding needs degree >= 1");
    const int n = static_cast<int>(coeffs.size()) - 1;
    if (n == 1) return {-coeffs[0] / coeffs[1]};

    const auto value = [&coeffs](Complex z) {
        Complex acc = coeffs.back();
        for (size_t k = coeffs.size() - 1; k-- > 0;) acc = acc * z + coeffs[k];
        return acc;
    };
    const auto deriv = [&coeffs](Complex z) {
        Complex acc = static_cast<double>(coeffs.size() - 1) * coeffs.back();
        for (size_t k = coeffs.size() - 1; k-- > 1;) acc = acc * z + static_cast<double>(k) * coeffs[k];
        return acc;
    };

    double radius = options.seed_radius;
    if (radius <= 0.0) {
        double top = 0.0;
        for (size_t k = 0; k + 1 < coeffs.size(); ++k)
            top = std::max(top, std::abs(coeffs[k]) / std::abs(coeffs.back()));
        radius = 1.0 + top;  // Cauchy bound: all roots inside this disk
    }

    std::mt19937_64 rng(options.seed);
    std::vector<Complex> z = seed_circle(n, radius, rng);
    aberth_sweeps(z, value, deriv, radius, options, rng);
    newton_polish(z, value, deriv);

    double scale = 0.0;
    for (Complex a : coeffs) scale += std::abs(a);
    for (Complex r : z) {
        const double residual = std::abs(value(r));
        const double bound =
            1e-8 * std::max(1.0, scale * std::pow(std::max(1.0, std::abs(r)), static_cast<double>(n)));
        if (!is_finite(r) || residual > bound) {
            throw NumericError("root finder did not converge, residual " + std::to_string(residual));
        }
    }
    std::sort(z.begin(), z.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return z;
}

std::vector<Complex> functional_roots(int degree,
                                      const std::function<Complex(Complex)>& value,
                                      const std::function<Complex(Complex)>& deriv,
                                      double seed_radius,
                                      const RootOptions& options) {
    if (degree < 1) throw Error("root finding needs degree >= 1");
    std::mt19937_64 rng(options.seed);
    std::vector<Complex> z = seed_circle(degree, seed_radius, rng);
    // High iterates have tiny Newton steps far from their roots, so half the
    // seeds start uniformly inside the disk instead of on the circle.
    std::uniform_real_distribution<double> inner(-0.75, 0.75);
    for (int i = 1; i < degree; i += 2) {
        z[i] = Complex{seed_radius * inner(rng), seed_radius * inner(rng)};
    }
    aberth_sweeps(z, value, deriv, seed_radius, options, rng);
    newton_polish(z, value, deriv);
    return z;
}

}  // namespace polypuzzle
