#pragma once

// CSV ingestion and export, compiled-in reference tables, and a seeded
// synthetic series generator.
//
// Input CSV: header `fractiondate,value` or `fractiondate,value,total`.
// When a total column is present each value is normalised to a percent of
// its row total.

#include "fc/error.hpp"
#include "fc/series.hpp"

#include <algorithm>
#include <limits>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace fc::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(sep, pos);
        out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

inline bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline double parse_real(std::string_view text, std::size_t line, std::string_view column) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw Error(ErrorKind::ParseError,
                    "line " + std::to_string(line) + ": invalid " + std::string(column) + " '" + std::string(text) + "'",
                    line);
    }
    return v;
}

} // namespace detail

/// Parses "YYYY" or "YYYY.F" .. "YYYY.FFFF" by splitting at the decimal point.
inline FractionDate parse_fraction_date(std::string_view text, std::size_t line = 0) {
    const auto fail = [&] {
        return Error(ErrorKind::ParseError,
                     "line " + std::to_string(line) + ": invalid fractiondate '" + std::string(text) + "'", line);
    };
    const auto dot = text.find('.');
    const auto year_part = text.substr(0, dot);
    const auto frac_part = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (!detail::all_digits(year_part) || year_part.size() > 6) throw fail();
    if (dot != std::string_view::npos && (!detail::all_digits(frac_part) || frac_part.size() > 4)) throw fail();
    int year = 0;
    std::from_chars(year_part.data(), year_part.data() + year_part.size(), year);
    int ticks = 0;
    for (std::size_t i = 0; i < 4; ++i) ticks = ticks * 10 + (i < frac_part.size() ? frac_part[i] - '0' : 0);
    return FractionDate(year, ticks);
}

inline TimeSeries read_csv(std::istream& in) {
    std::string raw;
    std::size_t line_no = 0;
    bool have_total = false;
    bool header_seen = false;
    std::vector<SeriesPoint> points;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = detail::trim(raw);
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line = detail::trim(line.substr(3));
        if (line.empty()) continue;
        const auto cols = detail::split(line, ',');
        if (!header_seen) {
            header_seen = true;
            if (cols.size() == 2 && cols[0] == "fractiondate" && cols[1] == "value") continue;
            if (cols.size() == 3 && cols[0] == "fractiondate" && cols[1] == "value" && cols[2] == "total") {
                have_total = true;
                continue;
            }
            throw Error(ErrorKind::ParseError,
                        "line " + std::to_string(line_no) +
                            ": expected header 'fractiondate,value' or 'fractiondate,value,total'",
                        line_no);
        }
        const std::size_t want = have_total ? 3 : 2;
        if (cols.size() != want) {
            throw Error(ErrorKind::ParseError,
                        "line " + std::to_string(line_no) + ": expected " + std::to_string(want) + " columns, got " +
                            std::to_string(cols.size()),
                        line_no);
        }
        const auto date = parse_fraction_date(cols[0], line_no);
        double value = detail::parse_real(cols[1], line_no, "value");
        if (value < 0.0) {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": negative value", line_no);
        }
        if (have_total) {
            const double total = detail::parse_real(cols[2], line_no, "total");
            if (total <= 0.0) {
                throw Error(ErrorKind::ZeroTotal, "line " + std::to_string(line_no) + ": total must be positive",
                            line_no);
            }
            value = 100.0 * value / total;
        }
        if (!points.empty() && !(points.back().date < date)) {
            throw Error(ErrorKind::OrderError,
                        "line " + std::to_string(line_no) + ": fractiondate " + date.to_string() +
                            " does not increase",
                        line_no);
        }
        points.push_back({date, value});
    }
    if (!header_seen) throw Error(ErrorKind::ParseError, "empty input: missing header", std::size_t{1});
    return TimeSeries(std::move(points));
}

inline TimeSeries read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    return read_csv(in);
}

/// Shortest decimal form that parses back to exactly the same double.
inline std::string format_real(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

inline void write_csv(std::ostream& out, const TimeSeries& series) {
    out << "fractiondate,value\n";
    for (const auto& p : series.points()) out << p.date.to_string() << ',' << format_real(p.value) << '\n';
}

// ---------------------------------------------------------------------------
// Reference tables

enum class TableId { Table1, Table3 };

struct FixtureRow {
    std::string_view x_label;
    std::string_view y_label;
    std::string_view f_text;
    std::string_view g_text;
    std::string_view dtw_text;

    double f() const { return detail::parse_real(f_text, 0, "f"); }
    double g() const { return detail::parse_real(g_text, 0, "g"); }
    double dtw() const { return detail::parse_real(dtw_text, 0, "dtw"); }
};

struct ReportedAggregates {
    double mean_f;
    double mean_g;
    double mean_dtw;
};

struct FixtureTable {
    TableId id;
    std::string_view title;
    std::vector<FixtureRow> rows;
    /// Column means as originally published alongside the table.
    ReportedAggregates reported;
};

/// Published p-values for the set-one vs set-two comparisons.
struct ReportedPValues {
    double g = 0.01;
    double dtw = 0.04;
    double f = 0.4;
};

inline FixtureTable load_fixture(TableId id) {
    if (id == TableId::Table1) {
        return {id,
                "decline years vs 2019",
                {
                    {"2002", "2019", "0.28", "28.57", "28.12"},
                    {"2004", "2019", "1.12", "28.57", "23.52"},
                    {"2005", "2019", "0", "57.14", "21.62"},
                    {"2007", "2019", "1.68", "57.14", "17.21"},
                    {"2008", "2019", "0.84", "57.14", "13.1"},
                    {"2011", "2019", "1.68", "71.43", "14.98"},
                    {"2012", "2019", "0.84", "71.43", "12.66"},
                    {"2014", "2019", "1.4", "85.71", "12.05"},
                    {"2016", "2019", "1.12", "42.86", "30.69"},
                    {"2017", "2019", "1.4", "71.43", "11.79"},
                },
                {1.036, 51.742, 18.574}};
    }
    return {id,
            "rise years vs 2019",
            {
                {"1992", "2019", "0.84", "14.29", "53.04"},
                {"1994", "2019", "0", "14.29", "51.74"},
                {"1996", "2019", "0.84", "0", "44.69"},
                {"1997", "2019", "0", "14.29", "56.36"},
                {"2003", "2019", "0.28", "0", "29.20"},
                {"2006", "2019", "1.4", "28.57", "21.17"},
                {"2009", "2019", "1.4", "42.86", "16.9"},
                {"2010", "2019", "3.35", "42.86", "17.36"},
                {"2013", "2019", "0.84", "57.14", "12.6"},
                {"2015", "2019", "1.12", "42.86", "14.01"},
            },
            {0.995, 25.716, 32.307}};
}

inline void write_fixture_csv(std::ostream& out, const FixtureTable& table) {
    out << "x_year,y_year,f,g,dtw\n";
    for (const auto& r : table.rows) {
        out << r.x_label << ',' << r.y_label << ',' << r.f_text << ',' << r.g_text << ',' << r.dtw_text << '\n';
    }
}

// ---------------------------------------------------------------------------
// Synthetic series

struct SyntheticSpec {
    std::size_t length = 365;
    std::uint64_t seed = 0;
    double drift = 0.0;
    double volatility = 0.0;
    double base = 1.0;
    int start_year = 2000;
    /// Points per calendar year; 0 puts every point into `start_year`.
    std::size_t points_per_year = 0;

    void validate() const {
        if (length < 2) throw Error(ErrorKind::InvalidArgument, "synthetic length must be at least 2");
        if (!(base > 0.0) || !std::isfinite(base)) throw Error(ErrorKind::InvalidArgument, "base must be positive");
        if (!(volatility >= 0.0) || !std::isfinite(volatility)) {
            throw Error(ErrorKind::InvalidArgument, "volatility must be non-negative");
        }
        if (!std::isfinite(drift)) throw Error(ErrorKind::InvalidArgument, "drift must be finite");
        const auto per_year = points_per_year == 0 ? length : points_per_year;
        if (per_year > static_cast<std::size_t>(FractionDate::ticks_per_year)) {
            throw Error(ErrorKind::InvalidArgument, "at most 10000 points fit in one year");
        }
    }
};

/// Smallest step factor; keeps the multiplicative walk strictly positive.
inline constexpr double min_step_factor = 0.01;

/// Multiplicative random walk: v[n+1] = v[n] * (1 + drift + volatility * u), u uniform in [-1, 1).
inline TimeSeries generate(const SyntheticSpec& spec) {
    spec.validate();
    const auto per_year = spec.points_per_year == 0 ? spec.length : spec.points_per_year;
    std::mt19937_64 rng(spec.seed);
    std::vector<SeriesPoint> points;
    points.reserve(spec.length);
    double value = spec.base;
    for (std::size_t i = 0; i < spec.length; ++i) {
        const auto year = spec.start_year + static_cast<int>(i / per_year);
        const auto ticks = static_cast<int>((i % per_year) * FractionDate::ticks_per_year / per_year);
        points.push_back({FractionDate(year, ticks), value});
        // Top 53 bits give a uniform double independent of the standard library's distributions.
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
        const double factor = 1.0 + spec.drift + spec.volatility * u;
        value = std::max(value * std::max(factor, min_step_factor), std::numeric_limits<double>::min());
    }
    return TimeSeries(std::move(points));
}

} // namespace fc::io
