#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

namespace polypuzzle {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// Exact external angle in [0, 1): a reduced rational of a full turn.
// Denominators are capped at d^32 under pullback.
class Angle {
public:
    Angle() : value_(0) {}
    Angle(unsigned long long numerator, unsigned long long denominator);

    // Accepts "p/q" or a bare integer (which reduces to 0 mod 1).
    static Angle parse(const std::string& text);

    // theta * d mod 1.
    Angle map_forward(int d) const;
    // (theta + j) / d; selecting j = branch recovers map_forward's preimages.
    Angle preimage(int d, int branch) const;
    // All d preimages, sorted increasingly.
    std::vector<Angle> preimages(int d) const;

    double value() const { return value_.convert_to<double>(); }
    BigInt numerator() const { return boost::multiprecision::numerator(value_); }
    BigInt denominator() const { return boost::multiprecision::denominator(value_); }
    std::string str() const;

    bool operator==(const Angle& o) const { return value_ == o.value_; }
    bool operator!=(const Angle& o) const { return value_ != o.value_; }
    bool operator<(const Angle& o) const { return value_ < o.value_; }

private:
    explicit Angle(BigRat value);

    BigRat value_;  // reduced, in [0, 1)
};

struct AngleOrbit {
    int preperiod = 0;
    int period = 0;
    std::vector<Angle> orbit;  // the preperiod + period distinct angles, in orbit order
};

// Exact preperiod and period of theta under t -> d*t mod 1.
AngleOrbit angle_orbit(const Angle& angle, int d);

// Whether x lies strictly inside the arc swept counterclockwise from `from`
// to `to`; the empty arc (from == to) contains nothing.
bool in_ccw_arc(const Angle& x, const Angle& from, const Angle& to);

}  // namespace polypuzzle
