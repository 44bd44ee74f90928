#pragma once

// Experiment harness: pairwise F/G/DTW comparisons of yearly segments
// against a fixed reference year, aggregation into per-set means, and
// two-sample tests between the sets. Series-driven and fixture-driven runs
// share the aggregation path.

#include "fc/error.hpp"
#include "fc/fluctuation.hpp"
#include "fc/io.hpp"
#include "fc/property.hpp"
#include "fc/series.hpp"
#include "fc/stats.hpp"
#include "fc/warping.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fc {

enum class DtwAlgorithm { Exact, Fast };

struct HarnessConfig {
    MatchConfig match;
    FMode f_mode = FMode::Greedy;
    DtwAlgorithm dtw = DtwAlgorithm::Exact;
    std::size_t radius = 1;
    CostModel cost = CostModel::AbsoluteDifference;
    AlignMode align = AlignMode::Strict;
    stats::WilcoxonMode wilcoxon = stats::WilcoxonMode::Auto;
    /// Worker threads for pairwise comparisons; 0 uses the hardware concurrency.
    unsigned threads = 0;
};

struct PairReport {
    std::string x_label;
    std::string y_label;
    std::size_t length = 0;
    PropertySet k; // reference (y) statistics
    PropertySet l; // compared (x) statistics
    PropertyMatchReport g;
    FluctuationMatchReport f;
    DtwResult dtw;
    std::optional<YearClassification> x_trend;
};

/// One row of a results table.
struct PairSummary {
    std::string x_label;
    std::string y_label;
    double f = 0.0;
    double g = 0.0;
    double dtw = 0.0;
};

inline PairSummary summarize(const PairReport& r) { return {r.x_label, r.y_label, r.f.f_value, r.g.g_value, r.dtw.distance}; }

/// Compares x against the reference y. Statistics of y form the reference
/// property set and y's fluctuations are the sequence whose coverage is measured.
inline PairReport compare_segments(Segment x, Segment y, const HarnessConfig& config) {
    auto [xa, ya] = align_lengths(std::move(x), std::move(y), config.align);
    PairReport r;
    r.x_label = xa.label;
    r.y_label = ya.label;
    r.length = xa.size();
    r.k = property_set(ya, config.match);
    r.l = property_set(xa, config.match);
    r.g = g_measure(r.k, r.l, config.match);
    if (ya.size() >= 2) {
        r.f = f_measure(fluctuation_sequence(ya), fluctuation_sequence(xa), config.f_mode);
    } else {
        r.f.mode_used = config.f_mode;
    }
    r.dtw = config.dtw == DtwAlgorithm::Exact ? dtw_exact(xa, ya, config.cost)
                                              : dtw_fast(xa, ya, config.cost, config.radius);
    return r;
}

inline PairReport compare_years(const TimeSeries& series, int x_year, int y_year, const HarnessConfig& config) {
    for (int year : {x_year, y_year}) {
        if (!series.has_year(year)) {
            throw Error(ErrorKind::MissingYear, "year " + std::to_string(year) + " not in series");
        }
    }
    auto r = compare_segments(segment_by_year(series, x_year), segment_by_year(series, y_year), config);
    if (series.has_year(x_year - 1)) {
        try {
            r.x_trend = classify_year(series, x_year);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ZeroBaseline) throw;
        }
    }
    return r;
}

struct MeasureMeans {
    double f = 0.0;
    double g = 0.0;
    double dtw = 0.0;
};

struct MeasureTest {
    std::string measure;
    std::optional<stats::TestResult> result;
    /// Why the test could not be computed (e.g. both samples constant).
    std::string unavailable;
    std::optional<double> reported_p;
    /// "two_sided", "one_sided" or "none": which convention rounds to the reported p-value.
    std::string matching_convention;
};

struct ExperimentReport {
    std::string mode; // "series" or "fixture"
    std::string y_label;
    std::vector<PairSummary> set_one;
    std::vector<PairSummary> set_two;
    std::vector<PairReport> set_one_details;
    std::vector<PairReport> set_two_details;
    MeasureMeans means_one;
    MeasureMeans means_two;
    std::vector<MeasureTest> tests; // f, g, dtw
    std::optional<Attribution> attribution;
    std::vector<std::string> notes;
};

/// Round to `digits` significant figures.
inline double round_significant(double x, int digits) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    const double scale = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(x)))));
    return std::round(x * scale) / scale;
}

/// Which sidedness convention, if any, reproduces `reported` to one significant figure.
inline std::string matching_convention(const stats::TestResult& r, double reported) {
    const auto same = [&](double p) { return std::abs(round_significant(p, 1) - reported) < 1e-12; };
    if (same(r.p_two_sided)) return "two_sided";
    if (same(std::min(r.p_one_sided, r.p_one_sided_lower))) return "one_sided";
    return "none";
}

namespace detail {

inline MeasureMeans column_means(const std::vector<PairSummary>& rows) {
    MeasureMeans m;
    if (rows.empty()) return m;
    for (const auto& r : rows) {
        m.f += r.f;
        m.g += r.g;
        m.dtw += r.dtw;
    }
    const auto n = static_cast<double>(rows.size());
    return {m.f / n, m.g / n, m.dtw / n};
}

inline std::vector<double> column(const std::vector<PairSummary>& rows, double PairSummary::*field) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.*field);
    return out;
}

template <typename Fn>
MeasureTest run_test(std::string measure, Fn&& fn) {
    MeasureTest t;
    t.measure = std::move(measure);
    try {
        t.result = fn();
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateSample) throw;
        t.unavailable = std::string(to_string(e.kind())) + ": " + e.what();
    }
    return t;
}

/// Runs `work(i)` for i in [0, count) on up to `threads` workers. Results land
/// at their input position; the first failure by position is rethrown.
template <typename T, typename Work>
std::vector<T> parallel_map(std::size_t count, unsigned threads, Work&& work) {
    std::vector<std::optional<T>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    const auto drain = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(work(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        drain();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(drain);
    }
    std::vector<T> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

} // namespace detail

/// Means and tests over two result sets: Welch for G and DTW, Wilcoxon for F.
inline void aggregate(ExperimentReport& report, const HarnessConfig& config,
                      const std::optional<io::ReportedPValues>& reported = std::nullopt) {
    const auto& one = report.set_one;
    const auto& two = report.set_two;
    if (one.size() < 2 || two.size() < 2) {
        throw Error(ErrorKind::InsufficientSamples, "each test set needs at least two pairs for hypothesis tests");
    }
    report.means_one = detail::column_means(one);
    report.means_two = detail::column_means(two);

    const auto f1 = detail::column(one, &PairSummary::f);
    const auto f2 = detail::column(two, &PairSummary::f);
    const auto g1 = detail::column(one, &PairSummary::g);
    const auto g2 = detail::column(two, &PairSummary::g);
    const auto d1 = detail::column(one, &PairSummary::dtw);
    const auto d2 = detail::column(two, &PairSummary::dtw);

    report.tests.clear();
    report.tests.push_back(detail::run_test("f", [&] { return stats::wilcoxon_rank_sum(f1, f2, config.wilcoxon); }));
    report.tests.push_back(detail::run_test("g", [&] { return stats::welch_t_test(g1, g2); }));
    report.tests.push_back(detail::run_test("dtw", [&] { return stats::welch_t_test(d1, d2); }));

    if (reported) {
        const double ps[] = {reported->f, reported->g, reported->dtw};
        for (std::size_t i = 0; i < report.tests.size(); ++i) {
            auto& t = report.tests[i];
            t.reported_p = ps[i];
            t.matching_convention = t.result ? matching_convention(*t.result, ps[i]) : "none";
        }
    }
}

struct ExperimentPlan {
    int y_year = 0;
    std::vector<int> set_one_years;
    std::vector<int> set_two_years;
};

inline ExperimentReport run_experiment(const TimeSeries& series, const ExperimentPlan& plan,
                                       const HarnessConfig& config) {
    config.match.validate();
    std::vector<int> xs = plan.set_one_years;
    xs.insert(xs.end(), plan.set_two_years.begin(), plan.set_two_years.end());
    for (int year : xs) {
        if (!series.has_year(year)) throw Error(ErrorKind::MissingYear, "year " + std::to_string(year) + " not in series");
    }
    if (!series.has_year(plan.y_year)) {
        throw Error(ErrorKind::MissingYear, "year " + std::to_string(plan.y_year) + " not in series");
    }

    auto pairs = detail::parallel_map<PairReport>(
        xs.size(), config.threads, [&](std::size_t i) { return compare_years(series, xs[i], plan.y_year, config); });

    ExperimentReport report;
    report.mode = "series";
    report.y_label = std::to_string(plan.y_year);
    const auto split = plan.set_one_years.size();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto& rows = i < split ? report.set_one : report.set_two;
        auto& details = i < split ? report.set_one_details : report.set_two_details;
        rows.push_back(summarize(pairs[i]));
        details.push_back(std::move(pairs[i]));
    }
    aggregate(report, config);

    std::vector<PropertyMatchReport> gs;
    for (const auto* set : {&report.set_one_details, &report.set_two_details})
        for (const auto& p : *set) gs.push_back(p.g);
    report.attribution = attribution_fraction(gs);
    return report;
}

/// Aggregation and tests over the bundled reference tables instead of recomputed measures.
inline ExperimentReport run_fixture_experiment(const HarnessConfig& config = {}) {
    const auto t1 = io::load_fixture(io::TableId::Table1);
    const auto t3 = io::load_fixture(io::TableId::Table3);
    ExperimentReport report;
    report.mode = "fixture";
    report.y_label = std::string(t1.rows.front().y_label);
    const auto to_rows = [](const io::FixtureTable& t) {
        std::vector<PairSummary> rows;
        for (const auto& r : t.rows) rows.push_back({std::string(r.x_label), std::string(r.y_label), r.f(), r.g(), r.dtw()});
        return rows;
    };
    report.set_one = to_rows(t1);
    report.set_two = to_rows(t3);
    aggregate(report, config, io::ReportedPValues{});

    const auto check = [&](const char* set, const char* measure, double reported, double recomputed) {
        // Reported means carry three decimals.
        if (std::abs(std::round(recomputed * 1000.0) / 1000.0 - reported) > 1e-9) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s mean %s: reported %.3f, recomputed from rows %.3f", set, measure,
                          reported, recomputed);
            report.notes.emplace_back(buf);
        }
    };
    check("set_one", "f", t1.reported.mean_f, report.means_one.f);
    check("set_one", "g", t1.reported.mean_g, report.means_one.g);
    check("set_one", "dtw", t1.reported.mean_dtw, report.means_one.dtw);
    check("set_two", "f", t3.reported.mean_f, report.means_two.f);
    check("set_two", "g", t3.reported.mean_g, report.means_two.g);
    check("set_two", "dtw", t3.reported.mean_dtw, report.means_two.dtw);
    for (const auto& t : report.tests) {
        if (t.matching_convention == "none" && t.reported_p) {
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "%s test: reported p %.2g not reproduced (two-sided %.4f, one-sided %.4f)", t.measure.c_str(),
                          *t.reported_p, t.result ? t.result->p_two_sided : 1.0,
                          t.result ? std::min(t.result->p_one_sided, t.result->p_one_sided_lower) : 1.0);
            report.notes.emplace_back(buf);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace json_out {

using Json = nlohmann::ordered_json;

inline double fixed(double x, int places) {
    const double scale = std::pow(10.0, places);
    const double r = std::round(x * scale) / scale;
    return r == 0.0 ? 0.0 : r; // no negative zero
}

inline Json property_set(const PropertySet& p) {
    Json j = Json::object();
    for (std::size_t i = 0; i < property_count; ++i) j[std::string(property_labels[i])] = fixed(p[i], 4);
    return j;
}

inline Json test(const MeasureTest& t) {
    Json j = Json::object();
    if (t.result) {
        const auto& r = *t.result;
        j["method"] = stats::to_string(r.method);
        j["statistic"] = fixed(r.statistic, 4);
        if (r.method == stats::Method::Welch) j["degrees_of_freedom"] = fixed(r.degrees_of_freedom, 4);
        if (r.method == stats::Method::Wilcoxon) j["exact"] = r.exact;
        j["p_one_sided"] = fixed(r.p_one_sided, 4);
        j["p_one_sided_lower"] = fixed(r.p_one_sided_lower, 4);
        j["p_two_sided"] = fixed(r.p_two_sided, 4);
    } else {
        j["unavailable"] = t.unavailable;
    }
    if (t.reported_p) {
        j["reported_p"] = *t.reported_p;
        j["matching_convention"] = t.matching_convention;
    }
    return j;
}

inline Json pair(const PairReport& r) {
    Json j = Json::object();
    j["x_year"] = r.x_label;
    j["y_year"] = r.y_label;
    j["length"] = r.length;
    if (r.x_trend) {
        j["x_trend"] = to_string(r.x_trend->trend);
        j["x_change_pct"] = fixed(r.x_trend->change_pct, 2);
    }

    Json f = Json::object();
    f["value"] = fixed(r.f.f_value, 2);
    f["mode"] = to_string(r.f.mode_used);
    f["covered_length"] = r.f.covered_length;
    f["sequence_length"] = r.f.sequence_length;
    f["alternate_covered_length"] = r.f.alternate_covered_length;
    Json fm = Json::array();
    for (const auto& m : r.f.matches) {
        fm.push_back(Json{{"start", m.start},
                          {"length", m.length},
                          {"occurrences_in_y", m.occurrences_in_a},
                          {"occurrences_in_x", m.occurrences_in_o}});
    }
    f["matches"] = std::move(fm);
    j["f"] = std::move(f);

    Json g = Json::object();
    g["value"] = fixed(r.g.g_value, 2);
    g["matched_count"] = r.g.matched_count;
    g["same_property_count"] = r.g.same_property_count;
    Json gm = Json::array();
    for (const auto& m : r.g.matches) {
        gm.push_back(Json{{"y_property", property_labels[m.k_index]},
                          {"x_property", property_labels[m.l_index]},
                          {"difference", fixed(m.difference, 4)}});
    }
    g["matches"] = std::move(gm);
    g["y_properties"] = property_set(r.k);
    g["x_properties"] = property_set(r.l);
    j["g"] = std::move(g);

    Json d = Json::object();
    d["distance"] = fixed(r.dtw.distance, 2);
    d["exact"] = r.dtw.exact;
    if (!r.dtw.exact) d["radius"] = r.dtw.radius;
    d["path_length"] = r.dtw.path.size();
    j["dtw"] = std::move(d);
    return j;
}

inline Json summary(const PairSummary& r) {
    return Json{{"x_year", r.x_label}, {"y_year", r.y_label}, {"f", fixed(r.f, 2)}, {"g", fixed(r.g, 2)},
                {"dtw", fixed(r.dtw, 2)}};
}

inline Json means(const MeasureMeans& m) {
    return Json{{"f", fixed(m.f, 2)}, {"g", fixed(m.g, 2)}, {"dtw", fixed(m.dtw, 2)}};
}

inline Json experiment(const ExperimentReport& r) {
    Json j = Json::object();
    j["mode"] = r.mode;
    j["y_year"] = r.y_label;
    const auto rows = [](const std::vector<PairSummary>& set, const std::vector<PairReport>& details) {
        Json a = Json::array();
        for (std::size_t i = 0; i < set.size(); ++i) a.push_back(details.empty() ? summary(set[i]) : pair(details[i]));
        return a;
    };
    j["set_one"] = rows(r.set_one, r.set_one_details);
    j["set_two"] = rows(r.set_two, r.set_two_details);
    j["means"] = Json{{"set_one", means(r.means_one)}, {"set_two", means(r.means_two)}};
    Json tests = Json::object();
    for (const auto& t : r.tests) tests[t.measure] = test(t);
    j["tests"] = std::move(tests);
    if (r.attribution) {
        j["attribution"] = Json{{"percent", fixed(r.attribution->percent, 2)}, {"defined", r.attribution->defined}};
    } else {
        j["attribution"] = nullptr;
    }
    j["notes"] = r.notes;
    return j;
}

} // namespace json_out

/// Plain-text layout: one row per pair, then per-set means and test results.
inline std::string format_table(const ExperimentReport& r) {
    std::ostringstream out;
    char buf[256];
    const auto set = [&](const char* title, const std::vector<PairSummary>& rows, const MeasureMeans& m) {
        out << title << '\n';
        std::snprintf(buf, sizeof buf, "%-8s %-8s %10s %10s %12s\n", "X", "Y", "F (%)", "G (%)", "DTW");
        out << buf;
        for (const auto& row : rows) {
            std::snprintf(buf, sizeof buf, "%-8s %-8s %10.2f %10.2f %12.2f\n", row.x_label.c_str(), row.y_label.c_str(),
                          row.f, row.g, row.dtw);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "%-17s %10.3f %10.3f %12.3f\n\n", "mean", m.f, m.g, m.dtw);
        out << buf;
    };
    set("Test set one", r.set_one, r.means_one);
    set("Test set two", r.set_two, r.means_two);
    for (const auto& t : r.tests) {
        if (!t.result) {
            out << t.measure << ": unavailable (" << t.unavailable << ")\n";
            continue;
        }
        std::snprintf(buf, sizeof buf, "%-4s %-9s statistic %9.4f  p(one-sided) %.4f  p(two-sided) %.4f\n",
                      t.measure.c_str(), stats::to_string(t.result->method), t.result->statistic,
                      std::min(t.result->p_one_sided, t.result->p_one_sided_lower), t.result->p_two_sided);
        out << buf;
    }
    if (r.attribution) {
        std::snprintf(buf, sizeof buf, "same-property share of G matches: %.2f%%\n", r.attribution->percent);
        out << buf;
    }
    for (const auto& n : r.notes) out << "note: " << n << '\n';
    return out.str();
}

} // namespace fc
