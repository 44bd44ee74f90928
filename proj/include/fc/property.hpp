#pragma once

// Label-free resemblance between the descriptive statistics of two segments.
//
// Each segment is summarised by seven statistics. An entry of the reference
// set counts as shared when any entry of the other set lies within an absolute
// tolerance of it, regardless of which statistic that entry represents.

#include "fc/error.hpp"
#include "fc/series.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string_view>
#include <vector>

namespace fc {

enum class Property : std::size_t { Mean, StdDev, Min, Max, P25, P50, P75 };

inline constexpr std::size_t property_count = 7;

inline constexpr std::array<std::string_view, property_count> property_labels = {
    "mean", "std_dev", "min", "max", "p25", "p50", "p75"};

enum class PercentileMode {
    /// min + (max - min) * q, linear in the value range.
    ValueRange,
    /// Order-statistic percentile with linear interpolation between closest ranks.
    DataPercentile,
};

enum class StdDevConvention { Population, Sample };

enum class MatchStrategy {
    /// Independent membership test per reference entry; one entry of the other
    /// set may serve several reference entries.
    Membership,
    /// Maximum one-to-one assignment between the two sets.
    OneToOne,
};

struct MatchConfig {
    double tolerance = 0.3;
    PercentileMode percentile_mode = PercentileMode::ValueRange;
    StdDevConvention std_dev = StdDevConvention::Population;
    MatchStrategy strategy = MatchStrategy::Membership;

    void validate() const {
        if (!(tolerance >= 0.0) || !std::isfinite(tolerance)) {
            throw Error(ErrorKind::InvalidArgument, "tolerance must be a finite non-negative number");
        }
    }
};

struct PropertySet {
    std::array<double, property_count> values{};

    double operator[](Property p) const { return values[static_cast<std::size_t>(p)]; }
    double operator[](std::size_t i) const { return values[i]; }

    bool operator==(const PropertySet&) const = default;
};

namespace detail {

inline double data_percentile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

} // namespace detail

inline PropertySet property_set(std::span<const double> values, const MatchConfig& config = {}) {
    if (values.empty()) throw Error(ErrorKind::EmptySegment, "cannot summarise an empty segment");
    const auto n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;

    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double sd = 0.0;
    if (config.std_dev == StdDevConvention::Population) {
        sd = std::sqrt(ss / n);
    } else if (values.size() > 1) {
        sd = std::sqrt(ss / (n - 1.0));
    }

    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    const double mn = *mn_it;
    const double mx = *mx_it;

    PropertySet out;
    out.values[0] = mean;
    out.values[1] = sd;
    out.values[2] = mn;
    out.values[3] = mx;
    constexpr std::array<double, 3> qs = {0.25, 0.50, 0.75};
    if (config.percentile_mode == PercentileMode::ValueRange) {
        for (std::size_t i = 0; i < qs.size(); ++i) out.values[4 + i] = mn + (mx - mn) * qs[i];
    } else {
        std::vector<double> sorted(values.begin(), values.end());
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < qs.size(); ++i) out.values[4 + i] = detail::data_percentile(sorted, qs[i]);
    }
    return out;
}

inline PropertySet property_set(const Segment& segment, const MatchConfig& config = {}) {
    return property_set(std::span<const double>(segment.values), config);
}

struct PropertyMatch {
    std::size_t k_index = 0;
    std::size_t l_index = 0;
    double difference = 0.0;
};

struct PropertyMatchReport {
    int matched_count = 0;
    double g_value = 0.0;
    std::vector<PropertyMatch> matches;
    int same_property_count = 0;
};

inline double g_value_for(int matched_count) {
    return round_hundredth(100.0 * matched_count / static_cast<double>(property_count));
}

namespace detail {

inline PropertyMatchReport membership_match(const PropertySet& k, const PropertySet& l, double tol) {
    PropertyMatchReport r;
    for (std::size_t i = 0; i < property_count; ++i) {
        std::size_t best = property_count;
        double best_diff = 0.0;
        for (std::size_t j = 0; j < property_count; ++j) {
            const double d = std::abs(k[i] - l[j]);
            if (d > tol) continue;
            // Closest wins; on a tie the same property is preferred, then the lowest index.
            if (best == property_count || d < best_diff || (d == best_diff && j == i)) {
                best = j;
                best_diff = d;
            }
        }
        if (best != property_count) r.matches.push_back({i, best, best_diff});
    }
    return r;
}

// Exhaustive search over all 7! assignments: maximise the number of pairs
// within tolerance, then same-property pairs, then minimise total difference.
inline PropertyMatchReport one_to_one_match(const PropertySet& k, const PropertySet& l, double tol) {
    std::array<std::size_t, property_count> perm{};
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    int best_count = -1;
    int best_same = -1;
    double best_total = 0.0;
    std::array<std::size_t, property_count> best_perm = perm;
    do {
        int count = 0;
        int same = 0;
        double total = 0.0;
        for (std::size_t i = 0; i < property_count; ++i) {
            const double d = std::abs(k[i] - l[perm[i]]);
            if (d <= tol) {
                ++count;
                total += d;
                if (perm[i] == i) ++same;
            }
        }
        if (count > best_count || (count == best_count && same > best_same) ||
            (count == best_count && same == best_same && total < best_total)) {
            best_count = count;
            best_same = same;
            best_total = total;
            best_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    PropertyMatchReport r;
    for (std::size_t i = 0; i < property_count; ++i) {
        const double d = std::abs(k[i] - l[best_perm[i]]);
        if (d <= tol) r.matches.push_back({i, best_perm[i], d});
    }
    return r;
}

} // namespace detail

/// Share of the reference set `k` found in `l` within the configured tolerance.
/// Directional: g_measure(k, l) and g_measure(l, k) may differ.
inline PropertyMatchReport g_measure(const PropertySet& k, const PropertySet& l, const MatchConfig& config = {}) {
    config.validate();
    auto r = config.strategy == MatchStrategy::Membership ? detail::membership_match(k, l, config.tolerance)
                                                          : detail::one_to_one_match(k, l, config.tolerance);
    r.matched_count = static_cast<int>(r.matches.size());
    r.same_property_count = static_cast<int>(
        std::count_if(r.matches.begin(), r.matches.end(), [](const PropertyMatch& m) { return m.k_index == m.l_index; }));
    r.g_value = g_value_for(r.matched_count);
    return r;
}

struct Attribution {
    double percent = 0.0;
    /// False when no report contained any match; percent is then 0.
    bool defined = false;
};

/// Percentage of matched entries whose partner is the same statistic.
inline Attribution attribution_fraction(std::span<const PropertyMatchReport> reports) {
    if (reports.empty()) throw Error(ErrorKind::InvalidArgument, "attribution needs at least one report");
    long same = 0;
    long matched = 0;
    for (const auto& r : reports) {
        same += r.same_property_count;
        matched += r.matched_count;
    }
    if (matched == 0) return {0.0, false};
    return {100.0 * static_cast<double>(same) / static_cast<double>(matched), true};
}

} // namespace fc
