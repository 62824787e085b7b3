#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polypuzzle/polynomial.hpp"

namespace polypuzzle {

struct VerifyOptions {
    // Markov sweep depth, satellite neighborhood depth, and (capped at 4)
    // the deepest level screened for self-covering pieces.
    int depth = 4;
    std::uint64_t seed = 2026;
    // Fault injection: this angle ("p/q") is removed from the cut system
    // before the Markov check, which must then fail and say why.
    std::string drop_angle;
};

struct VerifyCheck {
    std::string name;
    bool pass = false;
    double residual = 0.0;  // worst measured residual, units per check
    std::string detail;
};

// The cross-module invariant suite: the potential functional equation, ray
// round trips through the cut point, the Markov property of the piece
// images, fixed point counts against covering degrees on self-covering
// pieces, and shrinking satellite neighborhoods of the cut point.
struct VerifyReport {
    std::string polynomial;
    std::vector<VerifyCheck> checks;
    bool all_pass() const;
};

VerifyReport run_verify_suite(const Polynomial& poly, const VerifyOptions& options = {});

std::string verify_report_json(const VerifyReport& report);

}  // namespace polypuzzle
