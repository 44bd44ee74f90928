#pragma once

// Coverage of one fluctuation sequence by contiguous runs shared with another.
//
// A run of the target sequence `a` qualifies when it is at least two values
// long and occurs in the comparison sequence `o` at least as often as it
// occurs in `a` itself. Selected runs never overlap in `a`; the result is the
// covered share of `a` in percent.

#include "fc/error.hpp"
#include "fc/series.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace fc {

enum class FMode { Greedy, Exact };

inline const char* to_string(FMode m) { return m == FMode::Greedy ? "greedy" : "exact"; }

struct SubsequenceMatch {
    std::size_t start = 0;
    std::size_t length = 0;
    std::size_t occurrences_in_a = 0;
    std::size_t occurrences_in_o = 0;

    bool operator==(const SubsequenceMatch&) const = default;
};

struct FluctuationMatchReport {
    std::vector<SubsequenceMatch> matches;
    std::size_t covered_length = 0;
    std::size_t sequence_length = 0;
    double f_value = 0.0;
    FMode mode_used = FMode::Greedy;
    /// Covered length the other selection mode reaches on the same input.
    std::size_t alternate_covered_length = 0;
};

/// Number of (possibly overlapping) positions where `pattern` occurs in `haystack`.
inline std::size_t count_occurrences(std::span<const std::int64_t> pattern, std::span<const std::int64_t> haystack) {
    if (pattern.empty()) throw Error(ErrorKind::InvalidArgument, "pattern must be non-empty");
    if (pattern.size() > haystack.size()) return 0;
    std::size_t count = 0;
    for (std::size_t p = 0; p + pattern.size() <= haystack.size(); ++p) {
        if (std::equal(pattern.begin(), pattern.end(), haystack.begin() + static_cast<std::ptrdiff_t>(p))) ++count;
    }
    return count;
}

inline std::size_t count_occurrences(const FluctuationSequence& pattern, const FluctuationSequence& haystack) {
    return count_occurrences(pattern.hundredths(), haystack.hundredths());
}

namespace detail {

/// All qualifying runs of `a`, indexed by start position; runs[s] holds every
/// qualifying run beginning at s in increasing length.
inline std::vector<std::vector<SubsequenceMatch>> qualifying_runs(std::span<const std::int64_t> a,
                                                                  std::span<const std::int64_t> o) {
    const std::size_t n = a.size();
    const std::size_t m = o.size();
    std::vector<std::vector<SubsequenceMatch>> runs(n);
    std::vector<std::size_t> in_o;
    std::vector<std::size_t> in_a;
    for (std::size_t s = 0; s + 1 < n; ++s) {
        // Positions whose prefix still agrees with a[s, s + len); shrunk as len grows.
        in_o.clear();
        in_a.clear();
        for (std::size_t p = 0; p < m; ++p)
            if (o[p] == a[s]) in_o.push_back(p);
        for (std::size_t p = 0; p < n; ++p)
            if (a[p] == a[s]) in_a.push_back(p);
        for (std::size_t len = 2; s + len <= n; ++len) {
            const auto want = a[s + len - 1];
            const auto keep = [&](std::vector<std::size_t>& pos, std::span<const std::int64_t> seq) {
                std::erase_if(pos, [&](std::size_t p) { return p + len > seq.size() || seq[p + len - 1] != want; });
            };
            keep(in_o, o);
            if (in_o.empty()) break;
            keep(in_a, a);
            if (in_o.size() >= in_a.size()) runs[s].push_back({s, len, in_a.size(), in_o.size()});
        }
    }
    return runs;
}

/// Longest first, then leftmost; a run is taken when it overlaps nothing taken so far.
inline std::vector<SubsequenceMatch> select_greedy(const std::vector<std::vector<SubsequenceMatch>>& runs,
                                                   std::size_t n) {
    std::vector<const SubsequenceMatch*> all;
    for (const auto& bucket : runs)
        for (const auto& r : bucket) all.push_back(&r);
    std::stable_sort(all.begin(), all.end(), [](const SubsequenceMatch* x, const SubsequenceMatch* y) {
        return x->length != y->length ? x->length > y->length : x->start < y->start;
    });
    std::vector<bool> used(n, false);
    std::vector<SubsequenceMatch> picked;
    for (const auto* r : all) {
        const auto first = used.begin() + static_cast<std::ptrdiff_t>(r->start);
        const auto last = first + static_cast<std::ptrdiff_t>(r->length);
        if (std::any_of(first, last, [](bool b) { return b; })) continue;
        std::fill(first, last, true);
        picked.push_back(*r);
    }
    std::sort(picked.begin(), picked.end(), [](const auto& x, const auto& y) { return x.start < y.start; });
    return picked;
}

/// Maximum total coverage by non-overlapping runs (weighted interval scheduling).
/// Among optimal selections, prefers leaving later positions uncovered and then
/// the longest run ending at each position, scanning from the right.
inline std::vector<SubsequenceMatch> select_exact(const std::vector<std::vector<SubsequenceMatch>>& runs,
                                                  std::size_t n) {
    // ending[e] lists runs whose last index is e - 1.
    std::vector<std::vector<const SubsequenceMatch*>> ending(n + 1);
    for (const auto& bucket : runs)
        for (const auto& r : bucket) ending[r.start + r.length].push_back(&r);

    std::vector<std::size_t> best(n + 1, 0);
    for (std::size_t e = 1; e <= n; ++e) {
        best[e] = best[e - 1];
        for (const auto* r : ending[e]) best[e] = std::max(best[e], best[r->start] + r->length);
    }

    std::vector<SubsequenceMatch> picked;
    std::size_t e = n;
    while (e > 0) {
        if (best[e] == best[e - 1]) {
            --e;
            continue;
        }
        const SubsequenceMatch* chosen = nullptr;
        for (const auto* r : ending[e]) {
            if (best[r->start] + r->length == best[e] && (chosen == nullptr || r->length > chosen->length)) chosen = r;
        }
        picked.push_back(*chosen);
        e = chosen->start;
    }
    std::reverse(picked.begin(), picked.end());
    return picked;
}

inline std::size_t covered(const std::vector<SubsequenceMatch>& ms) {
    std::size_t c = 0;
    for (const auto& m : ms) c += m.length;
    return c;
}

} // namespace detail

/// Coverage of `a` (the target) by runs shared with `o` (the comparison).
inline FluctuationMatchReport f_measure(const FluctuationSequence& a, const FluctuationSequence& o,
                                        FMode mode = FMode::Greedy) {
    if (a.empty() || o.empty()) throw Error(ErrorKind::InvalidArgument, "fluctuation sequences must be non-empty");
    const auto runs = detail::qualifying_runs(a.hundredths(), o.hundredths());
    auto greedy = detail::select_greedy(runs, a.size());
    auto exact = detail::select_exact(runs, a.size());

    FluctuationMatchReport r;
    r.mode_used = mode;
    r.sequence_length = a.size();
    if (mode == FMode::Greedy) {
        r.matches = std::move(greedy);
        r.alternate_covered_length = detail::covered(exact);
    } else {
        r.matches = std::move(exact);
        r.alternate_covered_length = detail::covered(greedy);
    }
    r.covered_length = detail::covered(r.matches);
    r.f_value = round_hundredth(100.0 * static_cast<double>(r.covered_length) / static_cast<double>(a.size()));
    return r;
}

} // namespace fc
