#include <functional>
#include <map>

#include "bootlab/harness.hpp"

namespace bootlab {

namespace {

using Kind = DistributionSpec::Kind;
using M = CiMethod::Kind;

struct Profile {
    std::vector<std::size_t> n_grid;
    std::size_t B, outer_reps, law_reps;
};

// Each entry sets everything except the scale, which comes from its two profiles.
struct Builtin {
    std::function<void(ScenarioConfig&)> setup;
    Profile smoke, desk;
};

DistributionSpec dist(Kind k, std::size_t d = 1) {
    DistributionSpec s;
    s.kind = k;
    s.d = d;
    return s;
}

StatisticSpec stat(StatKind k) {
    StatisticSpec s;
    s.kind = k;
    return s;
}

const Profile kSmoke{{100}, 200, 20, 3};

const std::map<std::string, Builtin>& registry() {
    static const std::map<std::string, Builtin> r = {
        {"example1_min",
         {[](ScenarioConfig& c) {
              c.distribution = dist(Kind::UniformUnit);
              c.statistic = stat(StatKind::ScaledMin);
              c.method.kind = M::PlainQuantile;
              c.stability.enabled = true;
              c.stability.trials = 2000;
          },
          kSmoke, {{250, 500, 1000, 2000}, 1000, 400, 10}}},
        {"example22_isolated",
         {[](ScenarioConfig& c) {
              c.distribution = dist(Kind::UniformUnit);
              c.statistic = stat(StatKind::IsolatedCount);
              c.method.kind = M::PlainQuantile;
              c.mean_gap = true;
          },
          kSmoke, {{2000}, 1000, 200, 5}}},
        {"ex33_invariant_pair",
         {[](ScenarioConfig& c) {
              c.distribution = dist(Kind::StdNormal);
              c.distribution.lattice_bits = 20;  // dyadic data keeps the shift invariance exact
              c.statistic = stat(StatKind::PairedDiffSq);
              c.method.kind = M::Centered;
              c.stability.enabled = true;
              c.stability.trials = 200;
              c.stability.inner = 50;
          },
          kSmoke, {{250, 1000}, 1000, 200, 5}}},
        {"ex34_squared_mean",
         {[](ScenarioConfig& c) {
              c.distribution = dist(Kind::StdNormal);
              c.statistic = stat(StatKind::ScaledMeanPower);
              c.statistic.p = 2;
              c.method.kind = M::PlainQuantile;
          },
          kSmoke, {{1000}, 4000, 1000, 5}}},
        {"ex36_corrected",
         {[](ScenarioConfig& c) {
              c.distribution = dist(Kind::StdNormal);
              c.statistic = stat(StatKind::ScaledMeanPower);
              c.statistic.p = 2;
              c.method.kind = M::Corrected;
              c.method.holder_C = 1.0;
              c.method.holder_alpha = 2.0;
              c.law_reps = 0;
          },
          kSmoke, {{500}, 2000, 2000, 0}}},
        {"ex37_shifted_sup",
         {[](ScenarioConfig& c) {
              c.distribution = dist(Kind::StdNormal);
              c.statistic = stat(StatKind::ScaledMeanPower);
              c.statistic.p = 2;
              c.method.kind = M::ShiftedSup;
              c.law_reps = 0;
          },
          kSmoke, {{500}, 2000, 2000, 0}}},
        {"ex41_power",
         {[](ScenarioConfig& c) {
              c.distribution = dist(Kind::StdNormal);
              c.statistic = stat(StatKind::ScaledMeanPower);
              c.statistic.p = 1;
              c.method.kind = M::PlainQuantile;
          },
          kSmoke, {{500}, 2000, 2000, 5}}},
        {"ex42_product",
         {[](ScenarioConfig& c) {
              c.distribution = dist(Kind::BoundedCentered);
              c.distribution.c = 1.0;
              c.statistic = stat(StatKind::ProductStatistic);
              c.method.kind = M::Centered;
          },
          kSmoke, {{500}, 4000, 10, 10}}},
        {"ex43_positive_part",
         {[](ScenarioConfig& c) {
              c.distribution = dist(Kind::StdNormal);
              c.statistic = stat(StatKind::PositivePartMean);
              c.method.kind = M::Centered;
          },
          kSmoke, {{1000}, 2000, 200, 10}}},
        {"ex44_spin_glass",
         {[](ScenarioConfig& c) {
              c.distribution = dist(Kind::GaussianMatrix);
              c.statistic = stat(StatKind::SpinGlassEntropy);
              c.statistic.spins = 10;  // n = spins^2 = 100
              c.method.kind = M::Centered;
              c.oracle_min = 4000;
          },
          kSmoke, {{100}, 1000, 100, 5}}},
        {"prop51_bands",
         {[](ScenarioConfig& c) {
              c.distribution = dist(Kind::StdNormal, 50);
              c.statistic = stat(StatKind::MaxCoordMean);
              c.statistic.beta = kInf;
              c.method.kind = M::Centered;
          },
          kSmoke, {{1000}, 4000, 10, 10}}},
        {"prop61_minmax",
         {[](ScenarioConfig& c) {
              c.distribution = dist(Kind::StdNormal, 100);
              c.statistic = stat(StatKind::MinMaxCoordMean);
              c.statistic.p = 10;
              c.statistic.beta = kInf;
              c.method.kind = M::Centered;
              c.method.anchor_population = true;
          },
          kSmoke, {{1000}, 2000, 400, 5}}},
        {"prop71_kernel",
         {[](ScenarioConfig& c) {
              c.kind = ScenarioConfig::Kind::KernelTest;
              c.distribution = dist(Kind::TwoSampleGaussian, 2);
              c.statistic = stat(StatKind::KernelSoftmaxMMD);
              for (double bw : {0.5, 1.0, 2.0}) {
                  KernelSpec k;
                  k.bandwidth = bw;
                  c.statistic.kernels.push_back(k);
              }
              c.statistic.beta = 5.0;
              c.statistic.lambda = 1e-3;
              c.kernel_deltas = {0.0, 1.0};
          },
          kSmoke, {{200}, 400, 200, 0}}},
        {"prop81_stacked",
         {[](ScenarioConfig& c) {
              c.kind = ScenarioConfig::Kind::Stacked;
              c.distribution = dist(Kind::StdNormal);
              c.statistic = stat(StatKind::StackedRisk);
              c.statistic.base_predictions = {-1.0, 1.0};
              c.stacked.beta_rule = "quarter";
          },
          kSmoke, {{2000}, 4000, 10, 10}}},
        {"example82_tanh",
         {[](ScenarioConfig& c) {
              c.kind = ScenarioConfig::Kind::Stacked;
              c.distribution = dist(Kind::StdNormal);
              c.statistic = stat(StatKind::StackedRisk);
              c.statistic.base_predictions = {-1.0, 1.0};
              c.stacked.beta_rule = "sqrt";
              c.stacked.closed_form_limit = true;
          },
          kSmoke, {{2000}, 4000, 10, 10}}},
        {"prop83_double",
         {[](ScenarioConfig& c) {
              c.kind = ScenarioConfig::Kind::DoubleStacked;
              c.distribution = dist(Kind::StdNormal);
              c.statistic = stat(StatKind::StackedRisk);
              c.statistic.base_predictions = {-1.0, 1.0};
              c.stacked.beta_rule = "quarter";
              c.stacked.single_compare = true;
          },
          kSmoke, {{2000}, 2000, 10, 10}}},
    };
    return r;
}

}  // namespace

std::vector<std::string> builtin_names() {
    std::vector<std::string> out;
    for (const auto& [name, b] : registry()) out.push_back(name);
    return out;
}

ScenarioConfig builtin_scenario(const std::string& name, const std::string& profile) {
    const auto it = registry().find(name);
    if (it == registry().end()) throw ConfigError("unknown built-in scenario '" + name + "'");
    if (profile != "smoke" && profile != "desk") throw ConfigError("profile must be smoke or desk");
    ScenarioConfig c;
    c.name = name;
    it->second.setup(c);
    const Profile& p = profile == "smoke" ? it->second.smoke : it->second.desk;
    c.n_grid = p.n_grid;
    c.B = p.B;
    c.outer_reps = p.outer_reps;
    c.law_reps = std::min(p.law_reps, p.outer_reps);
    if (profile == "smoke") {
        c.oracle_min = std::min<std::size_t>(c.oracle_min, 2000);
        c.stability.trials = std::min<std::size_t>(c.stability.trials, 100);
        c.stability.inner = std::min<std::size_t>(c.stability.inner, 50);
        c.method.gauss_draws = 2000;
    }
    return c;
}

}  // namespace bootlab
