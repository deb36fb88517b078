#pragma once

// Brute-force references for the statistical tests.

#include <cstdint>
#include <vector>

namespace fixture {

/// Two-sided Fisher p by enumerating every table with the observed margins;
/// probabilities from exact binomial coefficients.
double fisher_two_sided_oracle(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);
double fisher_one_sided_oracle(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d, bool greater);

/// Exact rank-sum p for tie-free samples by enumerating every assignment of
/// ranks 1..n to the first sample. Returns {U of x, p}. `alternative`:
/// 0 two-sided, -1 less, +1 greater.
struct ExactRankSum {
    double u;
    double p;
};
ExactRankSum rank_sum_oracle(const std::vector<double>& x, const std::vector<double>& y, int alternative);

/// U of x by pairwise comparison (ties count one half).
double mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fixture
