#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mixwit::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<int> all_ids(); // 1..9

/// Runs one acceptance criterion; all tolerances are pinned in code.
CriterionResult run_criterion(int id, std::uint64_t seed);

} // namespace mixwit::acceptance
