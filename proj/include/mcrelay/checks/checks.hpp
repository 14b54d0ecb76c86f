#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace mcrelay::checks {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

enum class VerifyLevel { Fast, Full };

/// Signature of an S_x implementation under test: (K, s, q, x) -> value.
using SxFunction = std::function<double(int, double, int, int)>;

/// The library's S_x.
SxFunction library_sx();

// Acceptance criteria. Each runs at the tolerance fixed in its body.
CheckResult exact_oracle_agreement(std::uint64_t trials = 1'000'000);
CheckResult approximation_accuracy(std::uint64_t trials = 10'000'000);
CheckResult diversity_slopes();
CheckResult laplace_engine();
CheckResult sx_oracle(const SxFunction& sx = library_sx());
CheckResult structural_properties(std::uint64_t trials = 1'000'000);
CheckResult protocol_ordering(std::uint64_t links = 1'000'000);

/// Module invariants that need no large simulation.
std::vector<CheckResult> module_invariants();

/// fast: module invariants plus the closed-form and moderate-size Monte
/// Carlo criteria; full: adds the 10^7-trial approximation accuracy sweep.
std::vector<CheckResult> run_verification(VerifyLevel level);

nlohmann::json to_json(const std::vector<CheckResult>& results);

}  // namespace mcrelay::checks
