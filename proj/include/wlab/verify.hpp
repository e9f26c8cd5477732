#pragma once

// The invariant suite behind `wlab verify`: one check per stated invariant of
// every module.

#include <cstdint>
#include <string>
#include <vector>

namespace wlab {

struct CheckResult {
    std::string module;
    std::string name;
    bool pass = false;
    double value = 0.0;      ///< measured quantity
    double threshold = 0.0;  ///< what it was compared against
    std::string detail;
    double seconds = 0.0;
};

std::vector<CheckResult> run_verify_suite(std::uint64_t seed);

}  // namespace wlab
