#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace polypuzzle {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Outcome of iterating f on one seed. `value` is f^steps(z); `steps` equals
// the requested count unless a non-finite intermediate stopped the orbit
// early, in which case `value` is the last finite iterate. `escape_index` is
// the first k with |f^k(z)| beyond the escape radius (k = 0 tests the seed
// itself), or -1 if the computed orbit never left the escape disk.
struct IterateResult {
    Complex value{0.0, 0.0};
    int steps = 0;
    bool escaped = false;
    int escape_index = -1;
};

// Complex-coefficient polynomial of degree >= 2, kept exactly as given
// (not normalized to monic). Coefficients are stored low to high.
class Polynomial {
public:
    explicit Polynomial(std::vector<Complex> coefficients, std::string source = "");

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    Complex leading() const { return coeffs_.back(); }
    const std::vector<Complex>& coefficients() const { return coeffs_; }
    const std::vector<Complex>& derivative_coefficients() const { return dcoeffs_; }
    // Literal this polynomial was parsed from; empty when built from raw coefficients.
    const std::string& source() const { return source_; }

    Complex operator()(Complex z) const;
    Complex derivative(Complex z) const;

    // |z| > escape_radius() implies |f(z)| > 2|z|, so the orbit runs to
    // infinity with at least doubling modulus.
    double escape_radius() const { return escape_radius_; }
    // Every bounded orbit stays inside the closed disk of this radius; it is
    // the box requirement for grid classification.
    double bounding_radius() const { return bounding_radius_; }

    IterateResult iterate(Complex z, int n) const;

private:
    std::vector<Complex> coeffs_;
    std::vector<Complex> dcoeffs_;
    std::string source_;
    double escape_radius_ = 0.0;
    double bounding_radius_ = 0.0;
};

// f^n(z) with escape bookkeeping; n >= 0.
IterateResult eval_iterate(const Polynomial& poly, Complex z, int n);

// All degree-1 roots of f', polished until |f'(root)| is at the numeric
// floor. Multiple roots appear as (nearly) repeated entries.
std::vector<Complex> critical_points(const Polynomial& poly, std::uint64_t seed = 2026);

// Accepts `z^2 - 1`-style expressions (variable z, complex literals such as
// 1+2i or 0.75i, + - * ^ and parentheses, juxtaposition like 3z) and
// low-to-high coefficient lists like `[-1, 0, 1]`. Anything else, division
// included, raises ParseError.
Polynomial parse_polynomial(const std::string& text);

}  // namespace polypuzzle
