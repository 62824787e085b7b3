#include "polypuzzle/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <utility>

#include "polypuzzle/errors.hpp"
#include "polypuzzle/root_finding.hpp"

namespace polypuzzle {

Polynomial::Polynomial(std::vector<Complex> coefficients, std::string source)
    : coeffs_(std::move(coefficients)), source_(std::move(source)) {
    while (coeffs_.size() > 1 && coeffs_.back() == Complex{0.0, 0.0}) coeffs_.pop_back();
    if (coeffs_.size() < 3) throw Error("polynomial degree must be at least 2");
    for (Complex a : coeffs_) {
        if (!is_finite(a)) throw Error("polynomial coefficients must be finite");
    }

    dcoeffs_.resize(coeffs_.size() - 1);
    for (size_t k = 1; k < coeffs_.size(); ++k) {
        dcoeffs_[k - 1] = static_cast<double>(k) * coeffs_[k];
    }

    double lower_sum = 0.0;
    for (size_t k = 0; k + 1 < coeffs_.size(); ++k) lower_sum += std::abs(coeffs_[k]);
    const double growth = (1.0 + lower_sum) / std::abs(leading());
    escape_radius_ = 2.0 * std::max(2.0, growth);

    // K_f lies in the closed disk of the unique positive root of
    // |a_d| r^d = r + sum_{k<d} |a_k| r^k: beyond it |f(z)| > |z| with a
    // growing margin, so orbits escape. The root is at most `growth`.
    const auto defect = [&](double r) {
        double acc = std::abs(leading());
        for (size_t k = coeffs_.size() - 1; k-- > 0;) {
            acc = acc * r - std::abs(coeffs_[k]);
        }
        return acc - r;
    };
    double hi = std::max(1e-12, growth);
    while (defect(hi) <= 0.0) hi *= 2.0;
    double lo = 0.0;
    for (int step = 0; step < 200; ++step) {
        const double mid = 0.5 * (lo + hi);
        (defect(mid) > 0.0 ? hi : lo) = mid;
    }
    bounding_radius_ = hi;
}

Complex Polynomial::operator()(Complex z) const {
    Complex acc = coeffs_.back();
    for (size_t k = coeffs_.size() - 1; k-- > 0;) acc = acc * z + coeffs_[k];
    return acc;
}

Complex Polynomial::derivative(Complex z) const {
    Complex acc = dcoeffs_.back();
    for (size_t k = dcoeffs_.size() - 1; k-- > 0;) acc = acc * z + dcoeffs_[k];
    return acc;
}

IterateResult Polynomial::iterate(Complex z, int n) const {
    IterateResult r;
    r.value = z;
    if (std::abs(z) > escape_radius_) {
        r.escaped = true;
        r.escape_index = 0;
    }
    for (int k = 1; k <= n; ++k) {
        const Complex next = (*this)(r.value);
        if (!is_finite(next)) {
            // Overflow certifies escape; keep the last finite iterate as value.
            r.escaped = true;
            if (r.escape_index < 0) r.escape_index = k - 1;
            return r;
        }
        r.value = next;
        r.steps = k;
        if (r.escape_index < 0 && std::abs(next) > escape_radius_) {
            r.escaped = true;
            r.escape_index = k;
        }
    }
    return r;
}

IterateResult eval_iterate(const Polynomial& poly, Complex z, int n) {
    return poly.iterate(z, n);
}

std::vector<Complex> critical_points(const Polynomial& poly, std::uint64_t seed) {
    const std::vector<Complex>& dc = poly.derivative_coefficients();
    if (dc.size() == 2) return {-dc[0] / dc[1]};
    RootOptions opt;
    opt.seed = seed;
    std::vector<Complex> roots = polynomial_roots(dc, opt);
    for (Complex& r : roots) {
        // Newton on f' sharpens each critical point to the numeric floor.
        for (int it = 0; it < 60; ++it) {
            Complex v = 0.0, dv = 0.0;
            for (size_t k = dc.size(); k-- > 0;) {
                dv = dv * r + v;
                v = v * r + dc[k];
            }
            if (std::abs(dv) == 0.0) break;
            const Complex step = v / dv;
            r -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
        }
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    double scale = 0.0;
    for (Complex a : dc) scale += std::abs(a);
    for (Complex r : roots) {
        const double bound = 1e-9 * std::max(1.0, scale * std::pow(std::max(1.0, std::abs(r)),
                                                                   static_cast<double>(dc.size() - 1)));
        Complex v = dc.back();
        for (size_t k = dc.size() - 1; k-- > 0;) v = v * r + dc[k];
        if (std::abs(v) > bound) {
            throw NumericError("critical point refinement stalled, derivative residual " +
                               std::to_string(std::abs(v)));
        }
    }
    return roots;
}

namespace {

// Recursive-descent parser over dense coefficient vectors (low to high).
// Grammar:
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor (('*' factor) | factor-starting-with-z-or-paren)*
//   factor := atom ['^' uint]
//   atom   := 'z' | number | '(' expr ')'
// Numbers are decimal literals with an optional trailing 'i'.
class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    std::vector<Complex> parse() {
        skip_ws();
        if (peek() == '[') return parse_coefficient_list();
        std::vector<Complex> value = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected character");
        return value;
    }

private:
    static constexpr int kDegreeCap = 64;

    const std::string& text_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("not a polynomial: " + what, pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static void trim(std::vector<Complex>& v) {
        while (v.size() > 1 && v.back() == Complex{0.0, 0.0}) v.pop_back();
    }

    static std::vector<Complex> add(std::vector<Complex> a, const std::vector<Complex>& b, double sign) {
        if (a.size() < b.size()) a.resize(b.size(), Complex{0.0, 0.0});
        for (size_t k = 0; k < b.size(); ++k) a[k] += sign * b[k];
        trim(a);
        return a;
    }

    std::vector<Complex> mul(const std::vector<Complex>& a, const std::vector<Complex>& b) {
        if (a.size() + b.size() - 2 > kDegreeCap) fail("degree cap of 64 exceeded");
        std::vector<Complex> out(a.size() + b.size() - 1, Complex{0.0, 0.0});
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
        trim(out);
        return out;
    }

    std::vector<Complex> parse_expr() {
        skip_ws();
        double sign = 1.0;
        if (consume('-')) sign = -1.0;
        else consume('+');
        std::vector<Complex> value = parse_term();
        if (sign < 0.0)
            for (Complex& c : value) c = -c;
        for (;;) {
            skip_ws();
            if (consume('+')) value = add(std::move(value), parse_term(), 1.0);
            else if (consume('-')) value = add(std::move(value), parse_term(), -1.0);
            else return value;
        }
    }

    std::vector<Complex> parse_term() {
        std::vector<Complex> value = parse_factor();
        for (;;) {
            skip_ws();
            if (consume('*')) {
                value = mul(value, parse_factor());
            } else if (peek() == 'z' || peek() == '(') {
                // Juxtaposition: 3z, 2(z+1), (z+1)(z-1).
                value = mul(value, parse_factor());
            } else if (peek() == '/') {
                fail("division is not allowed");
            } else {
                return value;
            }
        }
    }

    std::vector<Complex> parse_factor() {
        std::vector<Complex> base = parse_atom();
        skip_ws();
        if (!consume('^')) return base;
        skip_ws();
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("exponent must be a nonnegative integer");
        long exponent = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            exponent = exponent * 10 + (text_[pos_++] - '0');
            if (exponent > kDegreeCap) fail("degree cap of 64 exceeded");
        }
        std::vector<Complex> value{Complex{1.0, 0.0}};
        for (long k = 0; k < exponent; ++k) value = mul(value, base);
        return value;
    }

    std::vector<Complex> parse_atom() {
        skip_ws();
        if (consume('z')) return {Complex{0.0, 0.0}, Complex{1.0, 0.0}};
        if (consume('(')) {
            std::vector<Complex> inner = parse_expr();
            skip_ws();
            if (!consume(')')) fail("missing ')'");
            return inner;
        }
        if (consume('i')) return {Complex{0.0, 1.0}};
        if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') return parse_number();
        if (peek() == '\0') fail("unexpected end of input");
        if (peek() == '/') fail("division is not allowed");
        fail(std::string("unexpected character '") + peek() + "'");
    }

    std::vector<Complex> parse_number() {
        const size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (consume('.'))
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (pos_ == start || (pos_ == start + 1 && text_[start] == '.')) fail("malformed number");
        if (peek() == 'e' || peek() == 'E') {
            const size_t mark = pos_++;
            if (peek() == '+' || peek() == '-') ++pos_;
            if (!std::isdigit(static_cast<unsigned char>(peek()))) {
                pos_ = mark;  // `e` was not an exponent; leave it for the caller to reject
            } else {
                while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            }
        }
        double magnitude = 0.0;
        try {
            magnitude = std::stod(text_.substr(start, pos_ - start));
        } catch (const std::exception&) {
            fail("malformed number");
        }
        if (consume('i')) return {Complex{0.0, magnitude}};
        return {Complex{magnitude, 0.0}};
    }

    std::vector<Complex> parse_coefficient_list() {
        consume('[');
        std::vector<Complex> coeffs;
        skip_ws();
        if (consume(']')) fail("empty coefficient list");
        for (;;) {
            coeffs.push_back(parse_list_entry());
            skip_ws();
            if (consume(',')) continue;
            if (consume(']')) break;
            fail("expected ',' or ']'");
        }
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected character after ']'");
        if (coeffs.size() > kDegreeCap + 1) fail("degree cap of 64 exceeded");
        return coeffs;
    }

    // List entries are constant expressions: no z allowed.
    Complex parse_list_entry() {
        skip_ws();
        const size_t entry_start = pos_;
        std::vector<Complex> value = parse_entry_expr();
        if (value.size() != 1) {
            throw ParseError("not a polynomial: coefficient entries must be constants", entry_start);
        }
        return value[0];
    }

    std::vector<Complex> parse_entry_expr() {
        skip_ws();
        double sign = 1.0;
        if (consume('-')) sign = -1.0;
        else consume('+');
        std::vector<Complex> value = parse_entry_atom();
        if (sign < 0.0)
            for (Complex& c : value) c = -c;
        for (;;) {
            skip_ws();
            if (consume('+')) value = add(std::move(value), parse_entry_atom(), 1.0);
            else if (consume('-')) value = add(std::move(value), parse_entry_atom(), -1.0);
            else return value;
        }
    }

    std::vector<Complex> parse_entry_atom() {
        skip_ws();
        if (consume('i')) return {Complex{0.0, 1.0}};
        if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') return parse_number();
        if (peek() == 'z') fail("coefficient entries must be constants");
        fail(std::string("unexpected character '") + (peek() ? std::string(1, peek()) : "end") + "'");
    }
};

}  // namespace

Polynomial parse_polynomial(const std::string& text) {
    Parser parser(text);
    std::vector<Complex> coeffs = parser.parse();
    if (coeffs.size() < 3 ||
        (coeffs.size() >= 3 && coeffs.back() == Complex{0.0, 0.0})) {
        // Re-trim to report degree honestly for inputs like `z^2 - z^2 + 1`.
        while (coeffs.size() > 1 && coeffs.back() == Complex{0.0, 0.0}) coeffs.pop_back();
    }
    if (coeffs.size() < 3) throw ParseError("not a polynomial: degree must be at least 2", 0);
    return Polynomial(std::move(coeffs), text);
}

}  // namespace polypuzzle
