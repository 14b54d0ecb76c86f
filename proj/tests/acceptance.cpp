// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <cstdio>
#include <vector>

#include "mcrelay/checks/checks.hpp"

int main() {
    using namespace mcrelay::checks;
    int failures = 0;
    const auto report = [&](int id, const CheckResult& r) {
        std::printf("criterion %d: %s  %s (%.1f s)\n", id, r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds);
        std::printf("    %s\n", r.detail.c_str());
        std::fflush(stdout);
        if (!r.passed) ++failures;
    };
    report(1, exact_oracle_agreement(1'000'000));
    report(2, approximation_accuracy(10'000'000));
    report(3, diversity_slopes());
    report(4, laplace_engine());
    report(5, sx_oracle());
    report(6, structural_properties(1'000'000));
    report(7, protocol_ordering(1'000'000));
    std::printf("%s: %d of 7 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
