#include "cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cli/config.hpp"
#include "cli/hash.hpp"
#include "gpsup/asymptotics.hpp"
#include "gpsup/covmodel.hpp"
#include "gpsup/csv.hpp"
#include "gpsup/errors.hpp"
#include "gpsup/mc_engine.hpp"
#include "gpsup/pickands.hpp"

namespace gpsup::cli {

namespace {

namespace fs = std::filesystem;

struct Context {
  std::string subcommand;
  ExperimentConfig cfg;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  fs::path out_dir;
  std::string config_sha1;
  std::vector<fs::path> written;

  McOptions mc_options() const {
    McOptions o;
    o.run = RunOptions{seed, threads};
    o.memory_budget = cfg.memory_budget;
    o.t_cap = cfg.t_cap;
    o.truncation_bound = cfg.truncation_bound;
    return o;
  }

  const HorizonDistribution& horizon() const {
    if (!cfg.horizon) throw ConfigError("horizon", subcommand + " needs a [horizon] section");
    return *cfg.horizon;
  }

  const std::vector<double>& u_values() const {
    if (!cfg.u_values_set) throw ConfigError("experiment.u_values", subcommand + " needs u_values");
    return cfg.u_values;
  }

  double h_alpha() const {
    const auto cache = PickandsCache::load(cfg.pickands_cache.string());
    return resolve_h_alpha(cfg.model.alpha(), &cache);
  }
};

class Output {
 public:
  Output(Context& ctx, const std::string& name) : path_(ctx.out_dir / name), file_(path_) {
    if (!file_) throw ConfigError("experiment.out_dir", "cannot write " + path_.string());
    ctx.written.push_back(path_);
  }
  std::ofstream& stream() { return file_; }

 private:
  fs::path path_;
  std::ofstream file_;
};

void stamp(CsvWriter& csv, const Context& ctx) {
  const auto& cfg = ctx.cfg;
  csv.comment("gpsup " + ctx.subcommand);
  csv.comment("config_sha1=" + ctx.config_sha1);
  csv.comment("seed=" + std::to_string(ctx.seed));
  csv.comment("grid a_coef=" + format_number(cfg.grid.a_coef) +
              " step_cap=" + format_number(cfg.grid.step_cap));
  csv.comment("t_cap=" + format_number(cfg.t_cap) +
              " memory_budget=" + std::to_string(cfg.memory_budget));
  csv.comment("model=" + cfg.model.describe() +
              " horizon=" + (cfg.horizon ? cfg.horizon->describe() : std::string("none")));
}

void run_check_model(Context& ctx) {
  const auto report = check_assumptions(ctx.cfg.model, ctx.cfg.check_t_max, ctx.cfg.check_n_probe);
  Output out(ctx, "check_model.csv");
  CsvWriter csv(out.stream());
  stamp(csv, ctx);
  csv.header({"check", "consistent", "diagnostic"});
  csv.cell("A1_local_shape").cell(report.a1.consistent).cell(report.a1.diagnostic).end_row();
  csv.cell("A2_non_degenerate").cell(report.a2.consistent).cell(report.a2.diagnostic).end_row();
  csv.cell("A3_long_range_decay").cell(report.a3.consistent).cell(report.a3.diagnostic).end_row();
}

void write_ladder(Context& ctx, const PickandsResult& r) {
  Output out(ctx, "pickands_ladder.csv");
  CsvWriter csv(out.stream());
  stamp(csv, ctx);
  csv.header({"kind", "s_horizon", "step", "n_paths", "h_of_s", "h_rate", "std_error"});
  for (const auto& rung : r.ladder) {
    for (const auto& cell : rung.by_step)
      csv.cell("cell").cell(cell.s_horizon).cell(cell.grid_step).cell(cell.n_paths)
          .cell(cell.h_of_s).cell(cell.h_rate).cell(cell.std_error).end_row();
    csv.cell("extrapolated").cell(rung.s_horizon).cell(0.0).cell(r.n_paths).cell(rung.h_of_s)
        .cell(rung.h_rate).cell(rung.h_of_s_se).end_row();
  }
  for (std::size_t k = 0; k < r.increments.size(); ++k)
    csv.cell("increment").cell(r.ladder[k + 1].s_horizon).cell(0.0).cell(r.n_paths)
        .cell(r.increments[k]).cell(r.increments[k]).cell(r.increment_se[k]).end_row();
}

void run_pickands(Context& ctx) {
  const double alpha = ctx.cfg.model.alpha();
  PickandsResult r;
  try {
    r = estimate_pickands(alpha, ctx.cfg.pickands, RunOptions{ctx.seed, ctx.threads});
  } catch (const PickandsConvergenceError& e) {
    write_ladder(ctx, e.result());
    throw;
  }
  write_ladder(ctx, r);

  Output out(ctx, "pickands_result.csv");
  CsvWriter csv(out.stream());
  stamp(csv, ctx);
  csv.header({"alpha", "constant", "std_error", "converged", "richardson_applied",
              "monotone_trend", "single_point_ladder", "closed_form", "relative_error",
              "n_paths"});
  const double closed = pickands_closed_form(alpha);
  csv.cell(alpha).cell(r.constant).cell(r.std_error).cell(r.converged).cell(r.richardson_applied)
      .cell(r.monotone_trend).cell(r.single_point_ladder).cell(closed)
      .cell(std::isnan(closed) ? closed : (r.constant - closed) / closed).cell(r.n_paths)
      .end_row();

  const auto cache_path = ctx.cfg.pickands_cache.string();
  auto cache = PickandsCache::load(cache_path);
  cache.upsert(PickandsCache::from_result(r, ctx.cfg.pickands));
  cache.save(cache_path);
}

void run_asymptotics(Context& ctx) {
  const auto& horizon = ctx.horizon();
  const auto& us = ctx.u_values();
  const double h = ctx.h_alpha();
  Output out(ctx, "asymptotics.csv");
  CsvWriter csv(out.stream());
  stamp(csv, ctx);
  csv.header({"u", "regime", "formula", "value", "log_value", "remark_form_value", "ratio",
              "m_scale", "h_alpha"});
  for (double u : us) {
    const auto closed = dispatch(u, ctx.cfg.model, horizon, h);
    const auto remark = dispatch_remark_form(u, ctx.cfg.model, horizon, h);
    csv.cell(u).cell(to_string(closed.regime)).cell(to_string(closed.formula)).cell(closed.value)
        .cell(closed.log_value).cell(remark.value)
        .cell(std::exp(closed.log_value - remark.log_value))
        .cell(std::exp(log_m_scale(u, ctx.cfg.model, h))).cell(h).end_row();
  }
}

void estimate_cells(CsvWriter& csv, const McEstimate& e) {
  csv.cell(e.probability).cell(e.hits).cell(e.n_trials).cell(e.ci95_half_width).cell(e.ci_low)
      .cell(e.ci_high).cell(e.grid_step_used).cell(e.truncated_mass).cell(e.capped_draws);
}

const std::vector<std::string> kEstimateColumns{
    "probability", "hits",      "n_trials",       "ci95_half_width", "ci_low",
    "ci_high",     "grid_step", "truncated_mass", "capped_draws"};

void run_simulate(Context& ctx) {
  const auto& horizon = ctx.horizon();
  const auto& us = ctx.u_values();
  const double h = ctx.h_alpha();
  const auto options = ctx.mc_options();
  Output out(ctx, "simulate.csv");
  CsvWriter csv(out.stream());
  stamp(csv, ctx);
  auto columns = std::vector<std::string>{"u"};
  columns.insert(columns.end(), kEstimateColumns.begin(), kEstimateColumns.end());
  columns.insert(columns.end(), {"formula", "asymptotic", "ratio"});
  csv.header(columns);
  for (double u : us) {
    const auto e = estimate_sup_tail(ctx.cfg.model, horizon, u, ctx.cfg.n_trials, ctx.cfg.grid,
                                     options);
    const auto a = dispatch(u, ctx.cfg.model, horizon, h);
    csv.cell(u);
    estimate_cells(csv, e);
    csv.cell(to_string(a.formula)).cell(a.value).cell(e.probability / a.value).end_row();
  }
}

void run_lemma43(Context& ctx) {
  const auto& us = ctx.u_values();
  const double h = ctx.h_alpha();
  const auto options = ctx.mc_options();

  Output out(ctx, "lemma43.csv");
  CsvWriter csv(out.stream());
  stamp(csv, ctx);
  csv.header({"u", "x", "interval", "non_exceedance", "hits", "n_trials", "ci95_half_width",
              "grid_step", "target", "deviation", "tolerance", "within_tolerance"});

  struct Summary {
    double u;
    double max_deviation;
    bool all_within;
  };
  std::vector<Summary> summary;
  for (double u : us) {
    const auto rows = lemma43_check(ctx.cfg.model, u, ctx.cfg.x_values, ctx.cfg.n_trials,
                                    ctx.cfg.grid, options, h);
    Summary s{u, 0.0, true};
    for (const auto& row : rows) {
      const auto& e = row.non_exceedance;
      const double deviation = std::fabs(e.probability - row.target);
      const double tolerance = std::max(3.0 * e.ci95_half_width, 0.05);
      const bool within = deviation <= tolerance;
      if (row.x > 0.0) {
        s.max_deviation = std::max(s.max_deviation, deviation);
        s.all_within = s.all_within && within;
      }
      csv.cell(u).cell(row.x).cell(row.interval).cell(e.probability).cell(e.hits)
          .cell(e.n_trials).cell(e.ci95_half_width).cell(e.grid_step_used).cell(row.target)
          .cell(deviation).cell(tolerance).cell(within).end_row();
    }
    summary.push_back(s);
  }

  Output sout(ctx, "lemma43_summary.csv");
  CsvWriter scsv(sout.stream());
  stamp(scsv, ctx);
  scsv.header({"u", "max_deviation", "all_within_tolerance", "deviation_decreased"});
  for (std::size_t i = 0; i < summary.size(); ++i) {
    const bool decreased = i == 0 || summary[i].max_deviation < summary[i - 1].max_deviation;
    scsv.cell(summary[i].u).cell(summary[i].max_deviation).cell(summary[i].all_within)
        .cell(decreased).end_row();
  }
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void run_report(Context& ctx) {
  const auto& horizon = ctx.horizon();
  const auto& us = ctx.u_values();
  const double h = ctx.h_alpha();
  const auto rows = regime_sweep(ctx.cfg.model, horizon, us, ctx.cfg.n_trials, ctx.cfg.grid,
                                 ctx.mc_options(), h);

  {
    Output out(ctx, "regime_sweep.csv");
    CsvWriter csv(out.stream());
    stamp(csv, ctx);
    auto columns = std::vector<std::string>{"u"};
    columns.insert(columns.end(), kEstimateColumns.begin(), kEstimateColumns.end());
    columns.insert(columns.end(), {"closed_form", "remark_form", "target_formula", "target",
                                   "ratio", "bracket_low", "bracket_high", "contains"});
    csv.header(columns);
    for (const auto& r : rows) {
      csv.cell(r.u);
      estimate_cells(csv, r.mc);
      csv.cell(r.asymptotic.value).cell(r.remark_form.value).cell(to_string(r.target_formula))
          .cell(r.target).cell(r.ratio).cell(r.p_lower).cell(r.p_upper)
          .cell(r.target >= r.mc.ci_low && r.target <= std::min(1.0, r.mc.ci_high + r.mc.truncated_mass))
          .end_row();
    }
  }

  Output md(ctx, "report.md");
  auto& os = md.stream();
  const bool heavy = horizon.regime() != Regime::D1;
  os << "# gpsup report\n\n"
     << "Generated " << utc_now() << ".\n\n"
     << "- config: `" << ctx.cfg.source.filename().string() << "` (sha1 " << ctx.config_sha1
     << ")\n"
     << "- seed: " << ctx.seed << "\n"
     << "- model: " << ctx.cfg.model.describe() << "\n"
     << "- horizon: " << horizon.describe() << " (regime " << to_string(horizon.regime())
     << ")\n"
     << "- Pickands constant: " << format_number(h) << "\n"
     << "- trials per level: " << ctx.cfg.n_trials << "\n"
     << "- table: `regime_sweep.csv`\n\n";
  os << "## Monte Carlo against the asymptotic\n\n";
  if (heavy)
    os << "Heavy-tailed horizons are simulated with T capped; the Monte Carlo value is a lower "
          "bound and the bracket adds the truncated tail mass P(T > cap).\n\n";
  os << "| u | MC | 95% CI | bracket | target | formula | ratio | closed form | m(u) form |\n"
     << "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    os << "| " << format_number(r.u) << " | " << format_number(r.mc.probability) << " | ["
       << format_number(r.mc.ci_low) << ", " << format_number(r.mc.ci_high) << "] | ["
       << format_number(r.p_lower) << ", " << format_number(r.p_upper) << "] | "
       << format_number(r.target) << " | " << to_string(r.target_formula) << " | "
       << format_number(r.ratio) << " | " << format_number(r.asymptotic.value) << " | "
       << format_number(r.remark_form.value) << " |\n";
  }
  os << "\nThe ratio is MC / target. Asymptotic agreement means ratios drifting toward 1 as u "
        "grows, not equality at any single level.\n";
}

}  // namespace

std::vector<fs::path> run(const RunRequest& request) {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), request.subcommand) ==
      kSubcommands.end())
    throw ConfigError("subcommand", "unknown subcommand '" + request.subcommand + "'");
  if (request.threads < 1) throw ConfigError("threads", "must be at least 1");

  Context ctx;
  ctx.subcommand = request.subcommand;
  ctx.cfg = load_config(request.config);
  if (request.seed) ctx.seed = *request.seed;
  else if (ctx.cfg.seed) ctx.seed = *ctx.cfg.seed;
  else throw ConfigError("experiment.seed", "a seed is required (config or --seed)");
  ctx.threads = request.threads;
  ctx.out_dir = request.out_dir ? *request.out_dir : ctx.cfg.out_dir.value_or(fs::path("."));
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec) throw ConfigError("experiment.out_dir", "cannot create " + ctx.out_dir.string());
  ctx.config_sha1 =
      git_blob_sha1(ctx.cfg.canonical + "experiment.seed=" + std::to_string(ctx.seed) + "\n");

  const auto& sub = ctx.subcommand;
  if (sub == "check-model") run_check_model(ctx);
  else if (sub == "pickands") run_pickands(ctx);
  else if (sub == "asymptotics") run_asymptotics(ctx);
  else if (sub == "simulate") run_simulate(ctx);
  else if (sub == "lemma43") run_lemma43(ctx);
  else run_report(ctx);
  return ctx.written;
}

}  // namespace gpsup::cli
