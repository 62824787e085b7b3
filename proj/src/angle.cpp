#include "polypuzzle/angle.hpp"

#include <map>

#include "polypuzzle/errors.hpp"

namespace polypuzzle {

namespace {

BigRat wrap_unit(BigRat v) {
    // v - floor(v): cpp_rational keeps canonical sign on the numerator.
    BigInt n = boost::multiprecision::numerator(v);
    BigInt d = boost::multiprecision::denominator(v);
    BigInt q = n / d;
    if (n < 0 && q * d != n) q -= 1;
    return v - BigRat(q);
}

BigInt pow_int(int base, int exponent) {
    BigInt out = 1;
    for (int k = 0; k < exponent; ++k) out *= base;
    return out;
}

}  // namespace

Angle::Angle(BigRat value) : value_(wrap_unit(std::move(value))) {}

Angle::Angle(unsigned long long numerator, unsigned long long denominator) {
    if (denominator == 0) throw Error("angle denominator must be positive");
    value_ = wrap_unit(BigRat(BigInt(numerator), BigInt(denominator)));
}

Angle Angle::parse(const std::string& text) {
    size_t slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            return Angle(BigRat(BigInt(text)));
        }
        const BigInt num(text.substr(0, slash));
        const BigInt den(text.substr(slash + 1));
        if (den <= 0) throw Error("angle denominator must be positive");
        return Angle(BigRat(num, den));
    } catch (const std::runtime_error&) {
        throw Error("angle must be an integer or p/q fraction: " + text);
    }
}

Angle Angle::map_forward(int d) const {
    if (d < 2) throw Error("angle map needs degree >= 2");
    return Angle(value_ * d);
}

Angle Angle::preimage(int d, int branch) const {
    if (d < 2) throw Error("angle map needs degree >= 2");
    if (branch < 0 || branch >= d) throw Error("preimage branch out of range");
    Angle out((value_ + branch) / d);
    if (out.denominator() > pow_int(d, 32)) {
        throw Error("angle denominator exceeds the d^32 cap");
    }
    return out;
}

std::vector<Angle> Angle::preimages(int d) const {
    std::vector<Angle> out;
    out.reserve(d);
    for (int j = 0; j < d; ++j) out.push_back(preimage(d, j));
    // (theta + j)/d is already increasing in j for theta in [0, 1).
    return out;
}

std::string Angle::str() const {
    return numerator().str() + "/" + denominator().str();
}

AngleOrbit angle_orbit(const Angle& angle, int d) {
    if (d < 2) throw Error("angle map needs degree >= 2");
    AngleOrbit report;
    std::map<Angle, int> seen;
    Angle current = angle;
    for (;;) {
        auto it = seen.find(current);
        if (it != seen.end()) {
            report.preperiod = it->second;
            report.period = static_cast<int>(report.orbit.size()) - it->second;
            return report;
        }
        seen.emplace(current, static_cast<int>(report.orbit.size()));
        report.orbit.push_back(current);
        current = current.map_forward(d);
    }
}

bool in_ccw_arc(const Angle& x, const Angle& from, const Angle& to) {
    if (from == to) return false;
    if (from < to) return from < x && x < to;
    return from < x || x < to;  // arc wraps through 0
}

}  // namespace polypuzzle
