#pragma once

// Two-sample tests: Welch's unequal-variance t-test and the Wilcoxon rank
// sum test (exact null distribution or tie-corrected normal approximation).
//
// One-sided p-values are reported for both directions. `p_one_sided` tests
// the alternative "sample a tends to be larger", `p_one_sided_lower` the
// alternative "sample a tends to be smaller".

#include "fc/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace fc::stats {

enum class Method { Welch, Wilcoxon };

inline const char* to_string(Method m) { return m == Method::Welch ? "welch" : "wilcoxon"; }

struct TestResult {
    Method method = Method::Welch;
    double statistic = 0.0;
    /// Welch-Satterthwaite degrees of freedom; NaN for rank tests.
    double degrees_of_freedom = std::numeric_limits<double>::quiet_NaN();
    double p_one_sided = 1.0;
    double p_one_sided_lower = 1.0;
    double p_two_sided = 1.0;
    /// Set when the Wilcoxon p-values come from the exact null distribution.
    bool exact = false;
};

inline double mean(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Unbiased (n - 1) sample variance.
inline double sample_variance(std::span<const double> x) {
    const double mu = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - mu) * (v - mu);
    return ss / static_cast<double>(x.size() - 1);
}

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr int max_iter = 10000;
    constexpr double eps = 1e-15;
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(T >= t) for Student's t with `df` degrees of freedom.
inline double student_t_upper(double t, double df) {
    if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
    const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
    return t >= 0.0 ? tail : 1.0 - tail;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline TestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw Error(ErrorKind::InsufficientSamples, "Welch t-test needs at least two values per sample");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = sample_variance(a) / na;
    const double vb = sample_variance(b) / nb;
    if (va + vb == 0.0) {
        throw Error(ErrorKind::DegenerateSample, "both samples have zero variance");
    }
    TestResult r;
    r.method = Method::Welch;
    r.statistic = (mean(a) - mean(b)) / std::sqrt(va + vb);
    r.degrees_of_freedom = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    // Evaluate each tail directly so neither loses precision to 1 - p.
    r.p_one_sided = student_t_upper(r.statistic, r.degrees_of_freedom);
    r.p_one_sided_lower = student_t_upper(-r.statistic, r.degrees_of_freedom);
    r.p_two_sided = std::min(1.0, 2.0 * std::min(r.p_one_sided, r.p_one_sided_lower));
    return r;
}

/// Midranks (1-based) of the pooled sample; ties share the average rank.
inline std::vector<double> midranks(std::span<const double> pooled) {
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
    std::vector<double> ranks(pooled.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

enum class WilcoxonMode { Auto, Exact, NormalApprox };

inline constexpr std::size_t wilcoxon_exact_limit = 24;

inline TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                                    WilcoxonMode mode = WilcoxonMode::Auto) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::InsufficientSamples, "rank sum test needs non-empty samples");
    const std::size_t na = a.size();
    const std::size_t n = a.size() + b.size();
    if (mode == WilcoxonMode::Auto) mode = n <= wilcoxon_exact_limit ? WilcoxonMode::Exact : WilcoxonMode::NormalApprox;
    if (mode == WilcoxonMode::Exact && n > wilcoxon_exact_limit) {
        throw Error(ErrorKind::TooLarge, "exact rank sum limited to n_a + n_b <= 24, got " + std::to_string(n));
    }

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = midranks(pooled);
    const double w = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(na), 0.0);

    TestResult r;
    r.method = Method::Wilcoxon;
    r.statistic = w;

    if (mode == WilcoxonMode::Exact) {
        // Midranks are multiples of 1/2, so doubled ranks are integers and the
        // null distribution of the doubled rank sum can be counted exactly.
        std::vector<std::size_t> doubled(n);
        for (std::size_t i = 0; i < n; ++i) doubled[i] = static_cast<std::size_t>(std::lround(2.0 * ranks[i]));
        const std::size_t max_sum = std::accumulate(doubled.begin(), doubled.end(), std::size_t{0});
        // ways[k][s]: number of k-subsets with doubled rank sum s.
        std::vector<std::vector<std::uint64_t>> ways(na + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
        ways[0][0] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = std::min(na, i + 1); k >= 1; --k) {
                for (std::size_t s = max_sum; s >= doubled[i]; --s) ways[k][s] += ways[k - 1][s - doubled[i]];
            }
        }
        const auto observed = static_cast<std::size_t>(std::lround(2.0 * w));
        std::uint64_t total = 0;
        std::uint64_t ge = 0;
        std::uint64_t le = 0;
        for (std::size_t s = 0; s <= max_sum; ++s) {
            total += ways[na][s];
            if (s >= observed) ge += ways[na][s];
            if (s <= observed) le += ways[na][s];
        }
        r.exact = true;
        r.p_one_sided = static_cast<double>(ge) / static_cast<double>(total);
        r.p_one_sided_lower = static_cast<double>(le) / static_cast<double>(total);
    } else {
        const double nad = static_cast<double>(na);
        const double nbd = static_cast<double>(b.size());
        const double nd = static_cast<double>(n);
        const double expected = nad * (nd + 1.0) / 2.0;
        std::vector<double> sorted = pooled;
        std::sort(sorted.begin(), sorted.end());
        double tie_term = 0.0;
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i);
            tie_term += t * t * t - t;
            i = j;
        }
        const double var = nad * nbd / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
        if (var <= 0.0) {
            r.p_one_sided = 1.0;
            r.p_one_sided_lower = 1.0;
        } else {
            const double sd = std::sqrt(var);
            // Continuity-corrected tails.
            r.p_one_sided = std::min(1.0, normal_cdf(-(w - expected - 0.5) / sd));
            r.p_one_sided_lower = std::min(1.0, normal_cdf((w - expected + 0.5) / sd));
        }
    }
    r.p_two_sided = std::min(1.0, 2.0 * std::min(r.p_one_sided, r.p_one_sided_lower));
    return r;
}

} // namespace fc::stats
