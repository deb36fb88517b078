#include "socbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "socbench/error.hpp"

namespace socbench::stats {

std::string to_string(Alternative alt) {
    switch (alt) {
        case Alternative::two_sided: return "two_sided";
        case Alternative::less: return "less";
        case Alternative::greater: return "greater";
    }
    return "two_sided";
}

Alternative alternative_from_string(const std::string& text) {
    if (text == "two_sided" || text == "two-sided" || text == "two.sided") return Alternative::two_sided;
    if (text == "less") return Alternative::less;
    if (text == "greater") return Alternative::greater;
    fail(ErrorCode::invalid_argument, "unknown alternative '" + text + "'");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

namespace {

double log_choose(std::uint64_t n, std::uint64_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

/// Hypergeometric support of cell `a` given the table margins, with
/// log-probabilities (unnormalized) for each support point.
struct Support {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    std::vector<double> log_weight;  // index x - lo
};

Support hypergeometric_support(const ContingencyTable& t) {
    const std::uint64_t r1 = t.a + t.b;
    const std::uint64_t r2 = t.c + t.d;
    const std::uint64_t c1 = t.a + t.c;
    Support s;
    s.lo = c1 > r2 ? c1 - r2 : 0;
    s.hi = std::min(r1, c1);
    s.log_weight.reserve(s.hi - s.lo + 1);
    for (std::uint64_t x = s.lo; x <= s.hi; ++x)
        s.log_weight.push_back(log_choose(r1, x) + log_choose(r2, c1 - x));
    return s;
}

bool degenerate(const ContingencyTable& t) {
    return t.a + t.b == 0 || t.c + t.d == 0 || t.a + t.c == 0 || t.b + t.d == 0;
}

/// E[A] under the noncentral hypergeometric distribution with log odds `theta`.
double conditional_mean(const Support& s, double theta) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.log_weight.size(); ++i)
        peak = std::max(peak, s.log_weight[i] + theta * static_cast<double>(s.lo + i));
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < s.log_weight.size(); ++i) {
        const double x = static_cast<double>(s.lo + i);
        const double w = std::exp(s.log_weight[i] + theta * x - peak);
        num += x * w;
        den += w;
    }
    return num / den;
}

}  // namespace

std::optional<double> conditional_mle_odds_ratio(const ContingencyTable& table) {
    if (degenerate(table)) return std::nullopt;
    const Support s = hypergeometric_support(table);
    if (table.a == s.lo) return 0.0;
    if (table.a == s.hi) return std::numeric_limits<double>::infinity();

    const double target = static_cast<double>(table.a);
    double lo = -1.0;
    double hi = 1.0;
    while (conditional_mean(s, lo) > target) lo *= 2.0;
    while (conditional_mean(s, hi) < target) hi *= 2.0;
    // Bisection on the log odds; the mean is strictly increasing in theta.
    for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (conditional_mean(s, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

TestResult fisher_exact(const ContingencyTable& table, Alternative alternative) {
    if (table.total() == 0) fail(ErrorCode::invalid_argument, "contingency table is all zero");

    TestResult result;
    result.method = "fisher_exact";
    if (degenerate(table)) {
        result.statistic = 1.0;
        result.p_value = 1.0;
        result.details = "degenerate margins: odds ratio undefined";
        return result;
    }

    const Support s = hypergeometric_support(table);
    const double peak = *std::max_element(s.log_weight.begin(), s.log_weight.end());
    std::vector<double> prob(s.log_weight.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        prob[i] = std::exp(s.log_weight[i] - peak);
        norm += prob[i];
    }
    for (double& p : prob) p /= norm;

    const std::size_t obs = table.a - s.lo;
    double p = 0.0;
    switch (alternative) {
        case Alternative::two_sided: {
            const double cutoff = prob[obs] * (1.0 + 1e-7);
            for (double q : prob)
                if (q <= cutoff) p += q;
            break;
        }
        case Alternative::less:
            for (std::size_t i = 0; i <= obs; ++i) p += prob[i];
            break;
        case Alternative::greater:
            for (std::size_t i = obs; i < prob.size(); ++i) p += prob[i];
            break;
    }
    result.statistic = prob[obs];
    result.p_value = std::clamp(p, 0.0, 1.0);
    result.odds_ratio = conditional_mle_odds_ratio(table);
    result.details = "alternative=" + to_string(alternative);
    return result;
}

std::vector<std::uint64_t> rank_sum_null_counts(int n_x, int n_y) {
    if (n_x < 0 || n_y < 0 || n_x + n_y > 60)
        fail(ErrorCode::invalid_argument, "exact rank-sum distribution limited to 60 observations");
    const int n = n_x + n_y;
    const int max_sum = n * (n + 1) / 2;
    // ways[k][s]: k-subsets of {1..i} with element sum s
    std::vector<std::vector<std::uint64_t>> ways(n_x + 1, std::vector<std::uint64_t>(max_sum + 1));
    ways[0][0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int k = std::min(i, n_x); k >= 1; --k)
            for (int s = max_sum; s >= i; --s) ways[k][s] += ways[k - 1][s - i];

    const int offset = n_x * (n_x + 1) / 2;
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(n_x) * n_y + 1);
    for (std::size_t u = 0; u < counts.size(); ++u) counts[u] = ways[n_x][offset + u];
    return counts;
}

TestResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y,
                             Alternative alternative, bool continuity_correction) {
    if (x.empty() || y.empty()) fail(ErrorCode::empty_sample, "both samples must be nonempty");

    const std::size_t nx = x.size();
    const std::size_t ny = y.size();
    const std::size_t n = nx + ny;
    struct Obs {
        double value;
        bool from_x;
    };
    std::vector<Obs> pooled;
    pooled.reserve(n);
    for (double v : x) pooled.push_back({v, true});
    for (double v : y) pooled.push_back({v, false});
    std::sort(pooled.begin(), pooled.end(),
              [](const Obs& l, const Obs& r) { return l.value < r.value; });

    double rank_sum_x = 0.0;
    double tie_term = 0.0;
    bool ties = false;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[j + 1].value == pooled[i].value) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j + 1);
        const double t = static_cast<double>(j - i + 1);
        if (j > i) ties = true;
        tie_term += t * t * t - t;
        for (std::size_t k = i; k <= j; ++k)
            if (pooled[k].from_x) rank_sum_x += midrank;
        i = j + 1;
    }

    TestResult result;
    result.method = "wilcoxon_rank_sum";
    const double u = rank_sum_x - static_cast<double>(nx) * static_cast<double>(nx + 1) / 2.0;
    result.statistic = u;

    if (!ties && n <= 20) {
        const auto counts = rank_sum_null_counts(static_cast<int>(nx), static_cast<int>(ny));
        const auto u_int = static_cast<std::size_t>(u);
        std::uint64_t total = 0;
        std::uint64_t le = 0;
        std::uint64_t ge = 0;
        for (std::size_t k = 0; k < counts.size(); ++k) {
            total += counts[k];
            if (k <= u_int) le += counts[k];
            if (k >= u_int) ge += counts[k];
        }
        double p = 0.0;
        switch (alternative) {
            case Alternative::two_sided:
                p = std::min(1.0, static_cast<double>(2 * std::min(le, ge)) / static_cast<double>(total));
                break;
            case Alternative::less: p = static_cast<double>(le) / static_cast<double>(total); break;
            case Alternative::greater: p = static_cast<double>(ge) / static_cast<double>(total); break;
        }
        result.p_value = p;
        result.details = "exact null distribution, alternative=" + to_string(alternative);
        return result;
    }

    const double nxd = static_cast<double>(nx);
    const double nyd = static_cast<double>(ny);
    const double nd = static_cast<double>(n);
    const double mu = nxd * nyd / 2.0;
    const double variance = nxd * nyd / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
    if (!(variance > 0.0)) {
        result.p_value = 1.0;
        result.details = "all observations tied";
        return result;
    }
    double z = u - mu;
    double correction = 0.0;
    if (continuity_correction) {
        switch (alternative) {
            case Alternative::two_sided: correction = z > 0 ? 0.5 : (z < 0 ? -0.5 : 0.0); break;
            case Alternative::greater: correction = 0.5; break;
            case Alternative::less: correction = -0.5; break;
        }
    }
    z = (z - correction) / std::sqrt(variance);
    double p = 0.0;
    switch (alternative) {
        case Alternative::two_sided: p = 2.0 * std::min(normal_cdf(z), normal_cdf(-z)); break;
        case Alternative::greater: p = normal_cdf(-z); break;
        case Alternative::less: p = normal_cdf(z); break;
    }
    result.p_value = std::clamp(p, 0.0, 1.0);
    result.details = std::string("normal approximation") + (ties ? ", tie-corrected variance" : "") +
                     (continuity_correction ? ", continuity correction" : "") +
                     ", alternative=" + to_string(alternative) + ", z=" + std::to_string(z);
    return result;
}

}  // namespace socbench::stats
