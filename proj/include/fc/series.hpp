#pragma once

#include "fc/error.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fc {

/// Calendar year plus the fraction of the year elapsed, carried as an integer
/// number of ten-thousandths so that year boundaries never drift.
class FractionDate {
public:
    static constexpr int ticks_per_year = 10000;

    constexpr FractionDate() = default;

    FractionDate(int year, int ticks) : year_(year), ticks_(ticks) {
        if (ticks < 0 || ticks >= ticks_per_year) {
            throw Error(ErrorKind::InvalidArgument,
                        "fraction ticks out of range [0, 9999]: " + std::to_string(ticks));
        }
    }

    static FractionDate start_of(int year) { return FractionDate(year, 0); }

    constexpr int year() const noexcept { return year_; }
    constexpr int ticks() const noexcept { return ticks_; }
    constexpr double fraction() const noexcept { return ticks_ / static_cast<double>(ticks_per_year); }

    /// Decimal form, e.g. 2019.4973.
    constexpr double as_decimal() const noexcept { return year_ + fraction(); }

    /// Canonical text form "YYYY.FFFF".
    std::string to_string() const {
        std::string frac = std::to_string(ticks_);
        frac.insert(0, 4 - frac.size(), '0');
        return std::to_string(year_) + "." + frac;
    }

    constexpr auto operator<=>(const FractionDate&) const = default;

private:
    int year_ = 0;
    int ticks_ = 0;
};

struct SeriesPoint {
    FractionDate date;
    double value = 0.0;
};

/// Ordered, strictly increasing sequence of dated non-negative values.
class TimeSeries {
public:
    TimeSeries() = default;

    explicit TimeSeries(std::vector<SeriesPoint> points) : points_(std::move(points)) {
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const double v = points_[i].value;
            if (!std::isfinite(v) || v < 0.0) {
                throw Error(ErrorKind::InvalidArgument,
                            "series value at index " + std::to_string(i) + " is negative or not finite");
            }
            if (i > 0 && !(points_[i - 1].date < points_[i].date)) {
                throw Error(ErrorKind::OrderError,
                            "series dates not strictly increasing at index " + std::to_string(i));
            }
        }
    }

    std::span<const SeriesPoint> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }

    std::vector<double> values() const {
        std::vector<double> out;
        out.reserve(points_.size());
        for (const auto& p : points_) out.push_back(p.value);
        return out;
    }

    /// Distinct years in ascending order.
    std::vector<int> years() const {
        std::vector<int> out;
        for (const auto& p : points_) {
            if (out.empty() || out.back() != p.date.year()) out.push_back(p.date.year());
        }
        return out;
    }

    bool has_year(int year) const {
        return std::any_of(points_.begin(), points_.end(),
                           [year](const SeriesPoint& p) { return p.date.year() == year; });
    }

private:
    std::vector<SeriesPoint> points_;
};

/// Contiguous slice of a series covering the half-open range [start, end).
struct Segment {
    std::string label;
    FractionDate start;
    FractionDate end;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
};

/// Builds a segment directly from values; used for ad-hoc comparisons and tests.
inline Segment make_segment(std::vector<double> values, std::string label = {}) {
    if (values.empty()) throw Error(ErrorKind::EmptySegment, "segment has no values");
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "segment value is not finite");
    }
    return Segment{std::move(label), FractionDate::start_of(0), FractionDate::start_of(1), std::move(values)};
}

/// Round half away from zero to a multiple of 1/100, returned as an integer
/// count of hundredths.
inline std::int64_t to_hundredths(double x) { return std::llround(x * 100.0); }

inline double round_hundredth(double x) { return std::round(x * 100.0) / 100.0; }

/// Value-to-value absolute percent changes, each rounded to the nearest
/// hundredth. Elements are stored as exact integer hundredths so that
/// equality comparisons are exact.
class FluctuationSequence {
public:
    FluctuationSequence() = default;
    explicit FluctuationSequence(std::vector<std::int64_t> hundredths) : hundredths_(std::move(hundredths)) {
        for (auto h : hundredths_) {
            if (h < 0) throw Error(ErrorKind::InvalidArgument, "fluctuation magnitudes must be non-negative");
        }
    }

    static FluctuationSequence from_percents(std::span<const double> percents) {
        std::vector<std::int64_t> h;
        h.reserve(percents.size());
        for (double p : percents) h.push_back(to_hundredths(p));
        return FluctuationSequence(std::move(h));
    }

    std::span<const std::int64_t> hundredths() const noexcept { return hundredths_; }
    std::size_t size() const noexcept { return hundredths_.size(); }
    bool empty() const noexcept { return hundredths_.empty(); }
    double operator[](std::size_t i) const { return hundredths_[i] / 100.0; }

    std::vector<double> values() const {
        std::vector<double> out;
        out.reserve(hundredths_.size());
        for (auto h : hundredths_) out.push_back(h / 100.0);
        return out;
    }

    bool operator==(const FluctuationSequence&) const = default;

private:
    std::vector<std::int64_t> hundredths_;
};

inline Segment segment_by_year(const TimeSeries& series, int year) {
    Segment seg;
    seg.label = std::to_string(year);
    seg.start = FractionDate::start_of(year);
    seg.end = FractionDate::start_of(year + 1);
    for (const auto& p : series.points()) {
        if (p.date >= seg.start && p.date < seg.end) seg.values.push_back(p.value);
    }
    if (seg.values.empty()) {
        throw Error(ErrorKind::EmptySegment, "no points fall in year " + std::to_string(year));
    }
    return seg;
}

enum class Trend { Decline, Rise };

inline const char* to_string(Trend t) { return t == Trend::Decline ? "decline" : "rise"; }

struct YearClassification {
    Trend trend;
    double change_pct;
};

/// Compares the running total of a year against the previous year's.
/// A zero change counts as a rise; a decline needs a strict decrease.
inline YearClassification classify_year(const TimeSeries& series, int year) {
    for (int y : {year - 1, year}) {
        if (!series.has_year(y)) throw Error(ErrorKind::MissingYear, "year " + std::to_string(y) + " not in series");
    }
    const auto sum_of = [&](int y) {
        const auto v = segment_by_year(series, y).values;
        return std::accumulate(v.begin(), v.end(), 0.0);
    };
    const double prev = sum_of(year - 1);
    const double cur = sum_of(year);
    if (prev == 0.0) {
        throw Error(ErrorKind::ZeroBaseline, "sum of year " + std::to_string(year - 1) + " is zero");
    }
    const double change = 100.0 * (cur - prev) / prev;
    return {change < 0.0 ? Trend::Decline : Trend::Rise, change};
}

inline FluctuationSequence fluctuation_sequence(std::span<const double> values) {
    if (values.size() < 2) {
        throw Error(ErrorKind::InvalidArgument, "fluctuation sequence needs at least two values");
    }
    std::vector<std::int64_t> out;
    out.reserve(values.size() - 1);
    for (std::size_t n = 0; n + 1 < values.size(); ++n) {
        if (values[n] == 0.0) {
            throw Error(ErrorKind::DivisionByZero, "zero value at index " + std::to_string(n) +
                                                       " used as a percent-change denominator");
        }
        out.push_back(to_hundredths(100.0 * std::abs(values[n + 1] - values[n]) / values[n]));
    }
    return FluctuationSequence(std::move(out));
}

inline FluctuationSequence fluctuation_sequence(const Segment& segment) {
    return fluctuation_sequence(std::span<const double>(segment.values));
}

enum class AlignMode { Strict, Truncate };

inline std::pair<Segment, Segment> align_lengths(Segment a, Segment b, AlignMode mode) {
    if (a.values.empty() || b.values.empty()) throw Error(ErrorKind::EmptySegment, "cannot align an empty segment");
    if (a.size() == b.size()) return {std::move(a), std::move(b)};
    if (mode == AlignMode::Strict) {
        throw Error(ErrorKind::LengthMismatch, "segment lengths differ: " + a.label + " has " +
                                                   std::to_string(a.size()) + ", " + b.label + " has " +
                                                   std::to_string(b.size()));
    }
    const auto n = std::min(a.size(), b.size());
    a.values.resize(n);
    b.values.resize(n);
    return {std::move(a), std::move(b)};
}

} // namespace fc
