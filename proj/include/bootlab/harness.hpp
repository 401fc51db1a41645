#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bootlab/distributions.hpp"
#include "bootlab/intervals.hpp"
#include "bootlab/statistics.hpp"

namespace bootlab {

// Invalid or unreadable configuration (CLI exit code 1).
class ConfigError : public Error {
public:
    using Error::Error;
};

inline constexpr int kSchemaVersion = 1;

struct MethodConfig {
    CiMethod::Kind kind = CiMethod::Kind::PlainQuantile;
    double alpha = 0.05;
    std::optional<std::vector<double>> known_mean;  // Centered; defaults to the population mean
    bool anchor_population = false;                 // Centered: anchor at g evaluated on the population mean
    double holder_C = 0.0, holder_alpha = 1.0;
    std::size_t gauss_draws = 10000;
    std::optional<double> gamma;     // ShiftedSup radius; empty means log(n)/sqrt(n)
    std::size_t grid_points = 41;    // ShiftedSup grid size (d = 1)
    double robust_radius = 2.0;      // Robust: candidate means within robust_radius/sqrt(n) of the mean
    std::size_t robust_points = 11;
};

struct StabilityConfig {
    bool enabled = false;
    std::size_t trials = 1000;
    double radius = 1.0;
    std::size_t grid = 11;
    std::size_t inner = 200;
};

struct StackedConfig {
    double split = 0.5;             // m = floor(split * n) rows are held out
    std::string beta_rule = "sqrt";  // sqrt | quarter | value
    double beta = 1.0;
    bool closed_form_limit = false;
    bool single_compare = false;     // double bootstrap: also compare with the single bootstrap law
};

struct ScenarioConfig {
    enum class Kind { Coverage, KernelTest, Stacked, DoubleStacked };
    std::string name;
    Kind kind = Kind::Coverage;
    DistributionSpec distribution;
    StatisticSpec statistic;
    std::vector<std::size_t> n_grid;
    std::size_t B = 1000;
    std::size_t outer_reps = 100;
    std::size_t law_reps = 10;        // reps that also compare the bootstrap law with a fresh law
    std::string estimand = "population";  // population | conditional | none
    std::size_t oracle_min = 20000;   // minimum replications of the estimand oracle
    bool mean_gap = false;
    bool isolated_oracle = true;      // IsolatedCount: centering_c from an MC oracle per n
    MethodConfig method;
    StabilityConfig stability;
    StackedConfig stacked;
    std::vector<double> kernel_deltas{0.0};
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::string out_dir = ".";
};

struct Row {
    std::size_t n = 0, rep = 0;
    std::string method;
    std::optional<double> delta, center, lo, hi, estimand, covered, boot_mean, below_count, df_lower,
        ks, ks_limit, ks_limit_free, ks_single, mean_gap, gap_se, pvalue;
};

struct NSummary {
    std::size_t n = 0;
    std::optional<double> delta;
    nlohmann::json fields = nlohmann::json::object();
};

struct ScenarioReport {
    ScenarioConfig config;
    std::vector<Row> rows;
    std::vector<NSummary> per_n;
    nlohmann::json extra = nlohmann::json::object();
    double wall_time = 0.0;

    // Aggregate lookup: field of the summary for (n, delta); throws if absent.
    double get(std::size_t n, const std::string& field, std::optional<double> delta = std::nullopt) const;
};

ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& c);
ScenarioConfig load_config(const std::string& toml_path);

ScenarioReport run_scenario(const ScenarioConfig& config);
ScenarioReport run_kernel_test_scenario(const ScenarioConfig& config);
ScenarioReport run_stacked_scenario(const ScenarioConfig& config);
ScenarioReport run_double_bootstrap_stacked(const ScenarioConfig& config);
// Dispatches on config.kind.
ScenarioReport run(const ScenarioConfig& config);

std::string report_csv(const ScenarioReport& report);
nlohmann::json report_summary(const ScenarioReport& report);
// Writes <out_dir>/<name>.csv and <out_dir>/<name>.summary.json.
void write_report(const ScenarioReport& report);

// MC oracle for P(min_{i != 1} |X_1 - X_i| > 1/n) under the given law.
double isolation_probability_mc(const DistributionSpec& dist, std::size_t n, std::size_t datasets,
                                RngSeed seed);

// Built-in scenarios.
std::vector<std::string> builtin_names();
ScenarioConfig builtin_scenario(const std::string& name, const std::string& profile = "smoke");

int cli_main(int argc, char** argv);

}  // namespace bootlab
