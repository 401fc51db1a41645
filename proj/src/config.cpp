#include <filesystem>
#include <initializer_list>
#include <string_view>

#include <toml.hpp>

#include "bootlab/harness.hpp"

namespace bootlab {

namespace {

void check_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a table");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (auto a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

const std::pair<CiMethod::Kind, const char*> kMethods[] = {
    {CiMethod::Kind::PlainQuantile, "plain"}, {CiMethod::Kind::Centered, "centered"},
    {CiMethod::Kind::Corrected, "corrected"}, {CiMethod::Kind::ShiftedSup, "shifted_sup"},
    {CiMethod::Kind::Robust, "robust"},
};

const std::pair<ScenarioConfig::Kind, const char*> kKinds[] = {
    {ScenarioConfig::Kind::Coverage, "coverage"},
    {ScenarioConfig::Kind::KernelTest, "kernel_test"},
    {ScenarioConfig::Kind::Stacked, "stacked"},
    {ScenarioConfig::Kind::DoubleStacked, "double_stacked"},
};

template <class E, std::size_t N>
E lookup(const std::pair<E, const char*> (&table)[N], const std::string& s, const std::string& what) {
    for (const auto& [k, name] : table)
        if (s == name) return k;
    throw ConfigError("unknown " + what + " '" + s + "'");
}

template <class E, std::size_t N>
std::string name_of(const std::pair<E, const char*> (&table)[N], E k) {
    for (const auto& [kk, name] : table)
        if (kk == k) return name;
    return "?";
}

std::size_t positive(const nlohmann::json& j, const std::string& key) {
    const auto v = j.get<std::int64_t>();
    if (v < 1) throw ConfigError(key + " must be >= 1");
    return std::size_t(v);
}

MethodConfig method_from_json(const nlohmann::json& j) {
    check_keys(j, {"kind", "alpha", "known_mean", "anchor", "holder_C", "holder_alpha", "gauss_draws", "gamma",
                   "grid_points", "robust_radius", "robust_points"},
               "[method]");
    MethodConfig m;
    if (j.contains("kind")) m.kind = lookup(kMethods, j["kind"].get<std::string>(), "method");
    if (j.contains("alpha")) m.alpha = j["alpha"].get<double>();
    if (!(m.alpha > 0.0 && m.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (j.contains("known_mean")) m.known_mean = j["known_mean"].get<std::vector<double>>();
    if (j.contains("anchor")) {
        const auto a = j["anchor"].get<std::string>();
        if (a != "none" && a != "population") throw ConfigError("anchor must be \"none\" or \"population\"");
        m.anchor_population = a == "population";
    }
    if (j.contains("holder_C")) m.holder_C = j["holder_C"].get<double>();
    if (j.contains("holder_alpha")) m.holder_alpha = j["holder_alpha"].get<double>();
    if (j.contains("gauss_draws")) m.gauss_draws = positive(j["gauss_draws"], "gauss_draws");
    if (j.contains("gamma")) {
        if (j["gamma"].is_string()) {
            if (j["gamma"].get<std::string>() != "default") throw ConfigError("gamma must be a number or \"default\"");
        } else {
            m.gamma = j["gamma"].get<double>();
            if (*m.gamma < 0.0) throw ConfigError("gamma must be non-negative");
        }
    }
    if (j.contains("grid_points")) m.grid_points = positive(j["grid_points"], "grid_points");
    if (j.contains("robust_radius")) m.robust_radius = j["robust_radius"].get<double>();
    if (j.contains("robust_points")) m.robust_points = positive(j["robust_points"], "robust_points");
    return m;
}

nlohmann::json method_to_json(const MethodConfig& m) {
    nlohmann::json j = {{"kind", name_of(kMethods, m.kind)},
                        {"alpha", m.alpha},
                        {"anchor", m.anchor_population ? "population" : "none"},
                        {"holder_C", m.holder_C},
                        {"holder_alpha", m.holder_alpha},
                        {"gauss_draws", m.gauss_draws},
                        {"grid_points", m.grid_points},
                        {"robust_radius", m.robust_radius},
                        {"robust_points", m.robust_points}};
    if (m.known_mean) j["known_mean"] = *m.known_mean;
    if (m.gamma) j["gamma"] = *m.gamma;
    else j["gamma"] = "default";
    return j;
}

nlohmann::json from_toml(const toml::node& n) {
    if (const auto* t = n.as_table()) {
        nlohmann::json o = nlohmann::json::object();
        for (auto&& [k, v] : *t) o[std::string(k.str())] = from_toml(v);
        return o;
    }
    if (const auto* a = n.as_array()) {
        nlohmann::json o = nlohmann::json::array();
        for (auto&& v : *a) o.push_back(from_toml(v));
        return o;
    }
    if (const auto* s = n.as_string()) return s->get();
    if (const auto* i = n.as_integer()) return i->get();
    if (const auto* f = n.as_floating_point()) return f->get();
    if (const auto* b = n.as_boolean()) return b->get();
    throw ConfigError("unsupported TOML value type");
}

}  // namespace

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    try {
        check_keys(j, {"name", "kind", "distribution", "statistic", "n_grid", "B", "outer_reps", "law_reps",
                       "estimand", "oracle_min", "mean_gap", "isolated_oracle", "method", "stability",
                       "stacked", "kernel", "seed", "threads", "out_dir"},
                   "config");
        ScenarioConfig c;
        if (!j.contains("name")) throw ConfigError("config needs a 'name'");
        c.name = j["name"].get<std::string>();
        if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos)
            throw ConfigError("name must be a non-empty file stem");
        if (j.contains("kind")) c.kind = lookup(kKinds, j["kind"].get<std::string>(), "scenario kind");
        if (!j.contains("distribution")) throw ConfigError("config needs a [distribution] table");
        if (!j.contains("statistic")) throw ConfigError("config needs a [statistic] table");
        try {
            c.distribution = distribution_from_json(j["distribution"]);
            c.statistic = statistic_from_json(j["statistic"]);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        if (!j.contains("n_grid")) throw ConfigError("config needs n_grid");
        for (const auto& v : j["n_grid"]) {
            const auto n = v.get<std::int64_t>();
            if (n < 2) throw ConfigError("every n in n_grid must be >= 2");
            c.n_grid.push_back(std::size_t(n));
        }
        if (c.n_grid.empty()) throw ConfigError("n_grid must be non-empty");
        if (j.contains("B")) c.B = positive(j["B"], "B");
        if (j.contains("outer_reps")) c.outer_reps = positive(j["outer_reps"], "outer_reps");
        if (j.contains("law_reps")) {
            const auto v = j["law_reps"].get<std::int64_t>();
            if (v < 0) throw ConfigError("law_reps must be >= 0");
            c.law_reps = std::size_t(v);
        }
        if (j.contains("estimand")) c.estimand = j["estimand"].get<std::string>();
        if (c.estimand != "population" && c.estimand != "conditional" && c.estimand != "none")
            throw ConfigError("estimand must be population, conditional or none");
        if (j.contains("oracle_min")) c.oracle_min = positive(j["oracle_min"], "oracle_min");
        if (j.contains("mean_gap")) c.mean_gap = j["mean_gap"].get<bool>();
        if (j.contains("isolated_oracle")) c.isolated_oracle = j["isolated_oracle"].get<bool>();
        if (j.contains("method")) c.method = method_from_json(j["method"]);
        if (j.contains("stability")) {
            const auto& s = j["stability"];
            check_keys(s, {"enabled", "trials", "radius", "grid", "inner"}, "[stability]");
            c.stability.enabled = s.value("enabled", true);
            if (s.contains("trials")) c.stability.trials = positive(s["trials"], "stability.trials");
            if (s.contains("radius")) c.stability.radius = s["radius"].get<double>();
            if (s.contains("grid")) c.stability.grid = positive(s["grid"], "stability.grid");
            if (s.contains("inner")) c.stability.inner = positive(s["inner"], "stability.inner");
        }
        if (j.contains("stacked")) {
            const auto& s = j["stacked"];
            check_keys(s, {"split", "beta_rule", "beta", "closed_form_limit", "single_compare"}, "[stacked]");
            c.stacked.split = s.value("split", 0.5);
            if (!(c.stacked.split >= 0.0 && c.stacked.split < 1.0)) throw ConfigError("stacked.split must lie in [0, 1)");
            c.stacked.beta_rule = s.value("beta_rule", std::string("sqrt"));
            if (c.stacked.beta_rule != "sqrt" && c.stacked.beta_rule != "quarter" && c.stacked.beta_rule != "value")
                throw ConfigError("stacked.beta_rule must be sqrt, quarter or value");
            c.stacked.beta = s.value("beta", 1.0);
            c.stacked.closed_form_limit = s.value("closed_form_limit", false);
            c.stacked.single_compare = s.value("single_compare", false);
        }
        if (j.contains("kernel")) {
            check_keys(j["kernel"], {"deltas"}, "[kernel]");
            c.kernel_deltas = j["kernel"].at("deltas").get<std::vector<double>>();
            if (c.kernel_deltas.empty()) throw ConfigError("kernel.deltas must be non-empty");
        }
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("threads")) c.threads = positive(j["threads"], "threads");
        if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
        if (c.kind == ScenarioConfig::Kind::Coverage && c.B < 100) throw ConfigError("B must be >= 100");
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

nlohmann::json to_json(const ScenarioConfig& c) {
    nlohmann::json j = {{"name", c.name},
                        {"kind", name_of(kKinds, c.kind)},
                        {"distribution", to_json(c.distribution)},
                        {"statistic", to_json(c.statistic)},
                        {"n_grid", c.n_grid},
                        {"B", c.B},
                        {"outer_reps", c.outer_reps},
                        {"law_reps", c.law_reps},
                        {"estimand", c.estimand},
                        {"oracle_min", c.oracle_min},
                        {"mean_gap", c.mean_gap},
                        {"isolated_oracle", c.isolated_oracle},
                        {"method", method_to_json(c.method)},
                        {"seed", c.seed},
                        {"threads", c.threads},
                        {"out_dir", c.out_dir}};
    if (c.stability.enabled)
        j["stability"] = {{"enabled", true},
                          {"trials", c.stability.trials},
                          {"radius", c.stability.radius},
                          {"grid", c.stability.grid},
                          {"inner", c.stability.inner}};
    if (c.kind == ScenarioConfig::Kind::Stacked || c.kind == ScenarioConfig::Kind::DoubleStacked)
        j["stacked"] = {{"split", c.stacked.split},
                        {"beta_rule", c.stacked.beta_rule},
                        {"beta", c.stacked.beta},
                        {"closed_form_limit", c.stacked.closed_form_limit},
                        {"single_compare", c.stacked.single_compare}};
    if (c.kind == ScenarioConfig::Kind::KernelTest) j["kernel"] = {{"deltas", c.kernel_deltas}};
    return j;
}

ScenarioConfig load_config(const std::string& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path);
    try {
        const toml::table t = toml::parse_file(path);
        return scenario_from_json(from_toml(t));
    } catch (const toml::parse_error& e) {
        throw ConfigError("cannot parse " + path + ": " + std::string(e.description()));
    }
}

}  // namespace bootlab
