#pragma once

namespace polypuzzle {

// Library version, recorded in output manifests so result files can be
// traced back to the code that produced them.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace polypuzzle
