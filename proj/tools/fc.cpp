// fc: command-line front end for the free-congruence similarity measures.
//
//   fc compare    --input a.csv --x-year N --y-year M [options]
//   fc experiment --input a.csv --y-year M --set-one y1,y2 --set-two y3,y4 [options]
//   fc experiment --fixtures
//   fc fixtures   --table 1|3
//   fc classify   --input a.csv --year N
//   fc generate   --length L --seed S --drift D --volatility V
//
// Exit codes: 0 success, 1 computational error, 2 input error. Errors are
// printed to stderr as a single JSON line.

#include "fc/fc.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;

void report_error(std::string_view kind, const std::string& message, std::optional<std::size_t> line = std::nullopt) {
    Json j{{"error", kind}, {"message", message}};
    if (line) j["line"] = *line;
    std::cerr << j.dump() << '\n';
}

struct MeasureOptions {
    double tolerance = 0.3;
    fc::DtwAlgorithm dtw = fc::DtwAlgorithm::Exact;
    std::size_t radius = 1;
    fc::FMode f_mode = fc::FMode::Greedy;
    fc::PercentileMode percentile = fc::PercentileMode::ValueRange;
    fc::StdDevConvention std_dev = fc::StdDevConvention::Population;
    fc::MatchStrategy strategy = fc::MatchStrategy::Membership;
    fc::CostModel cost = fc::CostModel::AbsoluteDifference;
    fc::AlignMode align = fc::AlignMode::Strict;

    fc::HarnessConfig config() const {
        fc::HarnessConfig c;
        c.match.tolerance = tolerance;
        c.match.percentile_mode = percentile;
        c.match.std_dev = std_dev;
        c.match.strategy = strategy;
        c.f_mode = f_mode;
        c.dtw = dtw;
        c.radius = radius;
        c.cost = cost;
        c.align = align;
        return c;
    }
};

void add_measure_options(CLI::App& cmd, MeasureOptions& o) {
    cmd.add_option("--tolerance", o.tolerance, "Absolute neighborhood for G matching")->check(CLI::NonNegativeNumber);
    cmd.add_option("--dtw", o.dtw, "DTW algorithm")
        ->transform(CLI::CheckedTransformer(std::map<std::string, fc::DtwAlgorithm>{
            {"exact", fc::DtwAlgorithm::Exact}, {"fast", fc::DtwAlgorithm::Fast}}));
    cmd.add_option("--radius", o.radius, "FastDTW refinement radius");
    cmd.add_option("--f-mode", o.f_mode, "Subsequence selection for F")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, fc::FMode>{{"greedy", fc::FMode::Greedy}, {"exact", fc::FMode::Exact}}));
    cmd.add_option("--percentile-mode", o.percentile, "Percentile definition")
        ->transform(CLI::CheckedTransformer(std::map<std::string, fc::PercentileMode>{
            {"range", fc::PercentileMode::ValueRange}, {"data", fc::PercentileMode::DataPercentile}}));
    cmd.add_option("--std-dev", o.std_dev, "Standard deviation convention")
        ->transform(CLI::CheckedTransformer(std::map<std::string, fc::StdDevConvention>{
            {"population", fc::StdDevConvention::Population}, {"sample", fc::StdDevConvention::Sample}}));
    cmd.add_option("--match", o.strategy, "G matching strategy")
        ->transform(CLI::CheckedTransformer(std::map<std::string, fc::MatchStrategy>{
            {"membership", fc::MatchStrategy::Membership}, {"one-to-one", fc::MatchStrategy::OneToOne}}));
    cmd.add_option("--cost", o.cost, "DTW local cost")
        ->transform(CLI::CheckedTransformer(std::map<std::string, fc::CostModel>{
            {"abs", fc::CostModel::AbsoluteDifference}, {"squared", fc::CostModel::SquaredDifference}}));
    cmd.add_option("--align", o.align, "Length alignment of segments")
        ->transform(CLI::CheckedTransformer(std::map<std::string, fc::AlignMode>{
            {"strict", fc::AlignMode::Strict}, {"truncate", fc::AlignMode::Truncate}}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free-congruence time series similarity: F, G and DTW measures"};
    app.require_subcommand(1);

    // compare
    auto* compare = app.add_subcommand("compare", "Compare one year against a reference year");
    std::string compare_input;
    int x_year = 0;
    int y_year = 0;
    MeasureOptions compare_opts;
    compare->add_option("--input", compare_input, "CSV time series")->required();
    compare->add_option("--x-year", x_year, "Compared year")->required();
    compare->add_option("--y-year", y_year, "Reference year")->required();
    add_measure_options(*compare, compare_opts);

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Run both test sets against a reference year");
    std::string exp_input;
    int exp_y = 0;
    std::vector<int> set_one;
    std::vector<int> set_two;
    unsigned threads = 0;
    bool use_fixtures = false;
    std::string format = "json";
    MeasureOptions exp_opts;
    experiment->add_option("--input", exp_input, "CSV time series");
    experiment->add_option("--y-year", exp_y, "Reference year");
    experiment->add_option("--set-one", set_one, "Comma-separated years of the first test set")->delimiter(',');
    experiment->add_option("--set-two", set_two, "Comma-separated years of the second test set")->delimiter(',');
    experiment->add_option("--threads", threads, "Worker threads (0 = all cores, 1 = sequential)");
    experiment->add_flag("--fixtures", use_fixtures, "Aggregate the bundled reference tables instead of a series");
    experiment->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}));
    add_measure_options(*experiment, exp_opts);

    // fixtures
    auto* fixtures = app.add_subcommand("fixtures", "Print a bundled reference table as CSV");
    int table = 1;
    fixtures->add_option("--table", table, "Table number")->required()->check(CLI::IsMember({1, 3}));

    // classify
    auto* classify = app.add_subcommand("classify", "Classify a year as decline or rise");
    std::string classify_input;
    int classify_year = 0;
    classify->add_option("--input", classify_input, "CSV time series")->required();
    classify->add_option("--year", classify_year, "Year to classify")->required();

    // generate
    auto* generate = app.add_subcommand("generate", "Emit a seeded synthetic series as CSV");
    fc::io::SyntheticSpec spec;
    generate->add_option("--length", spec.length, "Number of points")->required();
    generate->add_option("--seed", spec.seed, "Random seed")->required();
    generate->add_option("--drift", spec.drift, "Mean step change")->default_val(0.0);
    generate->add_option("--volatility", spec.volatility, "Step noise amplitude")->default_val(0.0);
    generate->add_option("--base", spec.base, "Starting value")->default_val(1.0);
    generate->add_option("--start-year", spec.start_year, "First year")->default_val(2000);
    generate->add_option("--per-year", spec.points_per_year, "Points per year (0 = all in one year)")->default_val(0);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("UsageError", e.what());
        return 2;
    }

    try {
        if (*compare) {
            const auto series = fc::io::read_csv(compare_input);
            const auto report = fc::compare_years(series, x_year, y_year, compare_opts.config());
            std::cout << fc::json_out::pair(report).dump(2) << '\n';
        } else if (*experiment) {
            auto config = exp_opts.config();
            config.threads = threads;
            fc::ExperimentReport report;
            if (use_fixtures) {
                report = fc::run_fixture_experiment(config);
            } else {
                if (exp_input.empty() || set_one.empty() || set_two.empty() || experiment->count("--y-year") == 0) {
                    report_error("UsageError", "experiment needs --input, --y-year, --set-one and --set-two (or --fixtures)");
                    return 2;
                }
                const auto series = fc::io::read_csv(exp_input);
                report = fc::run_experiment(series, {exp_y, set_one, set_two}, config);
            }
            if (format == "table") {
                std::cout << fc::format_table(report);
            } else {
                std::cout << fc::json_out::experiment(report).dump(2) << '\n';
            }
        } else if (*fixtures) {
            fc::io::write_fixture_csv(std::cout, fc::io::load_fixture(table == 1 ? fc::io::TableId::Table1
                                                                                 : fc::io::TableId::Table3));
        } else if (*classify) {
            const auto series = fc::io::read_csv(classify_input);
            const auto c = fc::classify_year(series, classify_year);
            Json j{{"year", classify_year},
                   {"trend", fc::to_string(c.trend)},
                   {"change_pct", fc::json_out::fixed(c.change_pct, 2)}};
            std::cout << j.dump() << '\n';
        } else if (*generate) {
            fc::io::write_csv(std::cout, fc::io::generate(spec));
        }
    } catch (const fc::Error& e) {
        report_error(fc::to_string(e.kind()), e.what(), e.line());
        return fc::is_input_error(e.kind()) ? 2 : 1;
    } catch (const std::exception& e) {
        report_error("InternalError", e.what());
        return 1;
    }
    return 0;
}
