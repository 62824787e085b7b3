#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polypuzzle/grid.hpp"

namespace polypuzzle {

// One reproducible experiment: everything the subcommands read. The same
// config and seed produce byte-identical CSV and JSON outputs.
struct RunConfig {
    std::string poly = "z^2-1";
    Box box = Box::centered_square(2.0);
    std::vector<int> resolutions = {512, 1024};
    int max_iter = 2000;
    double level = 1.0;  // equipotential level of the puzzle boundary
    int depth = 3;       // puzzle and satellite depth
    std::vector<double> epsilons = {0.4, 0.2, 0.1};
    std::string out_dir;  // empty: write to stdout only
    std::uint64_t seed = 2026;  // root finder perturbations
};

// JSON object keyed like the command line flags: poly, box, res, max_iter,
// level, depth, eps, out, seed. Unknown keys, malformed JSON, and wrong
// value shapes throw ConfigError naming the problem.
RunConfig config_from_json(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Canonical bytes for the manifest hash: fixed key order, shortest digits.
std::string config_json(const RunConfig& config);

}  // namespace polypuzzle
