#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace socbench::stats {

enum class Alternative { two_sided, less, greater };

std::string to_string(Alternative alt);
Alternative alternative_from_string(const std::string& text);

/// 2x2 table; rows are conditions, columns outcome yes/no.
///
///            yes   no
///   row 1     a     b
///   row 2     c     d
struct ContingencyTable {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    std::uint64_t c = 0;
    std::uint64_t d = 0;

    std::uint64_t total() const { return a + b + c + d; }
    /// Swaps the two rows.
    ContingencyTable swapped_rows() const { return {c, d, a, b}; }
    bool operator==(const ContingencyTable&) const = default;
};

struct TestResult {
    std::string method;
    /// Mann-Whitney U of the first sample for the rank-sum test; the point
    /// probability of the observed table for Fisher's test.
    double statistic = 0.0;
    double p_value = 1.0;
    /// Fisher only: conditional maximum-likelihood estimate of ad/bc. May be
    /// 0 or +inf at the boundary of the support; absent for degenerate margins.
    std::optional<double> odds_ratio;
    std::string details;
};

/// Fisher's exact test. The two-sided p-value sums every table with the
/// observed margins whose probability does not exceed the observed one
/// (relative tolerance 1e-7). One-sided alternatives refer to the odds ratio
/// ad/bc: `greater` sums P(A >= a), `less` sums P(A <= a).
TestResult fisher_exact(const ContingencyTable& table,
                        Alternative alternative = Alternative::two_sided);

/// Conditional MLE of the odds ratio under the noncentral hypergeometric
/// model. Returns 0 / +inf when `a` sits at the lower / upper end of its
/// support, nullopt when a row or column sum is zero.
std::optional<double> conditional_mle_odds_ratio(const ContingencyTable& table);

/// Wilcoxon rank-sum / Mann-Whitney test. The statistic is U of `x`, i.e.
/// rank sum of x (midranks) minus n_x(n_x+1)/2. The exact null distribution
/// is used without ties when n_x + n_y <= 20; otherwise a normal
/// approximation with tie-corrected variance and continuity correction.
/// `less` means x tends to be smaller than y.
TestResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y,
                             Alternative alternative = Alternative::two_sided,
                             bool continuity_correction = true);

/// Number of n_x-subsets of {1..n} with each possible rank sum, indexed by
/// U = rank_sum - n_x(n_x+1)/2. Exact counts; n is at most 60.
std::vector<std::uint64_t> rank_sum_null_counts(int n_x, int n_y);

double normal_cdf(double z);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> values);

}  // namespace socbench::stats
