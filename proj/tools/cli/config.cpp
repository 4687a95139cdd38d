#include "cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "cli/hash.hpp"
#include "gpsup/csv.hpp"
#include "gpsup/errors.hpp"

namespace gpsup::cli {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kSchema{
    {"model", {"family", "alpha", "c_coef", "table"}},
    {"horizon", {"kind", "t0", "mean", "lambda", "t_cap", "table", "regime"}},
    {"experiment",
     {"seed", "u_values", "n_trials", "x_values", "memory_budget", "truncation_bound", "out_dir"}},
    {"grid", {"a_coef", "step_cap"}},
    {"pickands", {"s_ladder", "steps", "n_paths", "tolerance", "cache"}},
    {"check", {"t_max", "n_probe"}},
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return trim(*v);
  }

  double number(const std::string& section, const std::string& key, double fallback) const {
    const auto v = raw(section, key);
    return v ? parse_number(*v, section + "." + key) : fallback;
  }

  std::optional<double> maybe_number(const std::string& section, const std::string& key) const {
    const auto v = raw(section, key);
    if (!v) return std::nullopt;
    return parse_number(*v, section + "." + key);
  }

  std::uint64_t count(const std::string& section, const std::string& key,
                      std::uint64_t fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size())
      throw ConfigError(section + "." + key, "expected a nonnegative integer, got '" + *v + "'");
    return out;
  }

  std::optional<std::vector<double>> list(const std::string& section,
                                          const std::string& key) const {
    const auto v = raw(section, key);
    if (!v) return std::nullopt;
    const std::string field = section + "." + key;
    std::vector<double> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      out.push_back(parse_number(item, field));
    }
    if (out.empty()) throw ConfigError(field, "must list at least one value");
    return out;
  }

  std::string text(const std::string& section, const std::string& key,
                   const std::string& fallback) const {
    const auto v = raw(section, key);
    return v ? *v : fallback;
  }

 private:
  static double parse_number(const std::string& text, const std::string& field) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || ptr != text.data() + text.size())
      throw ConfigError(field, "expected a number, got '" + text + "'");
    if (std::isnan(out)) throw ConfigError(field, "must not be NaN");
    return out;
  }

  const pt::ptree& tree_;
};

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

Regime parse_regime(const std::string& text) {
  if (text == "D1") return Regime::D1;
  if (text == "D2") return Regime::D2;
  if (text == "D3") return Regime::D3;
  throw ConfigError("horizon.regime", "expected D1, D2 or D3, got '" + text + "'");
}

// Rethrows construction errors from the library under the config field path.
template <typename F>
auto with_section(const std::string& section, F&& build) {
  try {
    return build();
  } catch (const ConfigError& e) {
    const std::string& field = e.field();
    const std::string prefix = section + ".";
    if (field.rfind(prefix, 0) == 0 || field.empty()) throw;
    const auto dot = field.find('.');
    throw ConfigError(prefix + (dot == std::string::npos ? field : field.substr(dot + 1)),
                      std::string(e.what()).substr(field.size() + 2));
  }
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto known = kSchema.find(section);
    if (known == kSchema.end()) {
      if (body.empty()) throw ConfigError(section, "settings must live inside a [section]");
      throw ConfigError(section, "unknown section");
    }
    for (const auto& [key, value] : body)
      if (!known->second.count(key)) throw ConfigError(section + "." + key, "unknown key");
  }

  const Reader in(tree);
  ExperimentConfig cfg;
  cfg.source = path;
  const std::filesystem::path base = path.parent_path();
  std::map<std::string, std::string> eff;

  // [model]
  {
    const std::string family = in.text("model", "family", "stable_exp");
    const double c = in.number("model", "c_coef", 1.0);
    eff["model.family"] = family;
    eff["model.c_coef"] = format_number(c);
    if (family == "stable_exp") {
      const auto alpha = in.maybe_number("model", "alpha");
      if (!alpha) throw ConfigError("model.alpha", "required for stable_exp");
      cfg.model = with_section("model", [&] { return CovarianceModel::stable_exp(*alpha, c); });
    } else if (family == "ou") {
      if (in.raw("model", "alpha") && in.number("model", "alpha", 1.0) != 1.0)
        throw ConfigError("model.alpha", "the ou family has alpha = 1");
      cfg.model = with_section("model", [&] { return CovarianceModel::ornstein_uhlenbeck(c); });
    } else if (family == "custom") {
      const auto alpha = in.maybe_number("model", "alpha");
      const auto table = in.raw("model", "table");
      if (!alpha) throw ConfigError("model.alpha", "required for custom models");
      if (!table) throw ConfigError("model.table", "required for custom models");
      const auto file = resolve(base, *table);
      cfg.model = with_section("model", [&] {
        return CovarianceModel::custom_from_csv(file.string(), *alpha, c);
      });
      eff["model.table_sha1"] = file_sha1(file.string(), "model.table");
    } else {
      throw ConfigError("model.family", "expected stable_exp, ou or custom, got '" + family + "'");
    }
    eff["model.alpha"] = format_number(cfg.model.alpha());
  }

  // [horizon]
  {
    const std::string kind = in.text("horizon", "kind", "");
    if (kind.empty() && tree.get_child_optional("horizon"))
      throw ConfigError("horizon.kind", "required");
    if (!kind.empty()) eff["horizon.kind"] = kind;
    auto need = [&](const char* key) {
      const auto v = in.maybe_number("horizon", key);
      if (!v) throw ConfigError(std::string("horizon.") + key, "required for " + kind + " horizons");
      eff[std::string("horizon.") + key] = format_number(*v);
      return *v;
    };
    if (kind.empty()) {
      // No horizon configured.
    } else if (kind == "deterministic") {
      const double t0 = need("t0");
      cfg.horizon = with_section("horizon", [&] { return HorizonDistribution::deterministic(t0); });
    } else if (kind == "exponential") {
      const double mean = need("mean");
      cfg.horizon = with_section("horizon", [&] { return HorizonDistribution::exponential(mean); });
    } else if (kind == "pareto") {
      const double lambda = need("lambda");
      cfg.horizon = with_section("horizon", [&] { return HorizonDistribution::pareto(lambda); });
    } else if (kind == "log_pareto") {
      cfg.horizon = HorizonDistribution::log_pareto();
    } else if (kind == "custom") {
      const auto table = in.raw("horizon", "table");
      if (!table) throw ConfigError("horizon.table", "required for custom horizons");
      const std::string regime_text = in.text("horizon", "regime", "");
      if (regime_text.empty()) throw ConfigError("horizon.regime", "required for custom horizons");
      const Regime regime = parse_regime(regime_text);
      const double lambda = regime == Regime::D2 ? need("lambda") : 0.0;
      const auto file = resolve(base, *table);
      cfg.horizon = with_section("horizon", [&] {
        return HorizonDistribution::custom_tail_from_csv(file.string(), regime, lambda);
      });
      eff["horizon.regime"] = regime_text;
      eff["horizon.table_sha1"] = file_sha1(file.string(), "horizon.table");
    } else {
      throw ConfigError("horizon.kind",
                        "expected deterministic, exponential, pareto, log_pareto or custom, got '" +
                            kind + "'");
    }
    if (const auto cap = in.maybe_number("horizon", "t_cap")) {
      if (!(*cap > 0.0)) throw ConfigError("horizon.t_cap", "must be positive");
      cfg.t_cap = *cap;
    }
    if (!kind.empty()) eff["horizon.t_cap"] = format_number(cfg.t_cap);
  }

  // [experiment]
  {
    if (in.raw("experiment", "seed")) cfg.seed = in.count("experiment", "seed", 0);
    if (const auto u = in.list("experiment", "u_values")) {
      for (double v : *u)
        if (!std::isfinite(v)) throw ConfigError("experiment.u_values", "values must be finite");
      cfg.u_values = *u;
      cfg.u_values_set = true;
    } else if (in.raw("experiment", "u_values")) {
      throw ConfigError("experiment.u_values", "must list at least one value");
    }
    cfg.n_trials = in.count("experiment", "n_trials", cfg.n_trials);
    if (cfg.n_trials < kMinTrials)
      throw ConfigError("experiment.n_trials", "must be at least " + std::to_string(kMinTrials));
    if (const auto x = in.list("experiment", "x_values")) cfg.x_values = *x;
    cfg.memory_budget = in.count("experiment", "memory_budget", cfg.memory_budget);
    if (cfg.memory_budget < 2) throw ConfigError("experiment.memory_budget", "must be at least 2");
    cfg.truncation_bound = in.number("experiment", "truncation_bound", cfg.truncation_bound);
    if (!(cfg.truncation_bound >= 0.0 && cfg.truncation_bound <= 1.0))
      throw ConfigError("experiment.truncation_bound", "must lie in [0, 1]");
    if (const auto out = in.raw("experiment", "out_dir")) cfg.out_dir = resolve(base, *out);

    if (cfg.u_values_set) eff["experiment.u_values"] = join(cfg.u_values);
    eff["experiment.n_trials"] = std::to_string(cfg.n_trials);
    eff["experiment.x_values"] = join(cfg.x_values);
    eff["experiment.memory_budget"] = std::to_string(cfg.memory_budget);
    eff["experiment.truncation_bound"] = format_number(cfg.truncation_bound);
  }

  // [grid]
  {
    cfg.grid.a_coef = in.number("grid", "a_coef", cfg.grid.a_coef);
    cfg.grid.step_cap = in.number("grid", "step_cap", cfg.grid.step_cap);
    with_section("grid", [&] {
      cfg.grid.validate();
      return 0;
    });
    eff["grid.a_coef"] = format_number(cfg.grid.a_coef);
    eff["grid.step_cap"] = format_number(cfg.grid.step_cap);
  }

  // [pickands]
  {
    if (const auto s = in.list("pickands", "s_ladder")) cfg.pickands.s_ladder = *s;
    if (const auto s = in.list("pickands", "steps")) cfg.pickands.steps = *s;
    cfg.pickands.n_paths = in.count("pickands", "n_paths", cfg.pickands.n_paths);
    cfg.pickands.tolerance = in.number("pickands", "tolerance", cfg.pickands.tolerance);
    cfg.pickands_cache = resolve(base, in.text("pickands", "cache", "pickands_cache.csv"));
    eff["pickands.s_ladder"] = join(cfg.pickands.s_ladder);
    eff["pickands.steps"] = join(cfg.pickands.steps);
    eff["pickands.n_paths"] = std::to_string(cfg.pickands.n_paths);
    eff["pickands.tolerance"] = format_number(cfg.pickands.tolerance);
  }

  // [check]
  {
    cfg.check_t_max = in.number("check", "t_max", cfg.check_t_max);
    const auto n_probe = in.count("check", "n_probe", static_cast<std::uint64_t>(cfg.check_n_probe));
    if (n_probe > 100000) throw ConfigError("check.n_probe", "must not exceed 100000");
    cfg.check_n_probe = static_cast<int>(n_probe);
    if (!(cfg.check_t_max > 1.0)) throw ConfigError("check.t_max", "must exceed 1");
    if (cfg.check_n_probe < 10) throw ConfigError("check.n_probe", "must be at least 10");
    eff["check.t_max"] = format_number(cfg.check_t_max);
    eff["check.n_probe"] = std::to_string(cfg.check_n_probe);
  }

  for (const auto& [key, value] : eff) cfg.canonical += key + "=" + value + "\n";
  return cfg;
}

}  // namespace gpsup::cli
