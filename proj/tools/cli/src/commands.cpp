#include "housim_cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "housim/market_sim.hpp"
#include "housim/oracle.hpp"
#include "housim/stochastic.hpp"
#include "housim_cli/csv.hpp"

namespace housim::cli {

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw UsageError("invalid number \"" + std::string(text) + "\" in " + std::string(what));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::size_t parse_steps(std::string_view text, std::string_view what) {
  const double steps = parse_number(text, what);
  if (!(steps >= 0.0) || steps != std::floor(steps)) throw UsageError("step count must be a non-negative integer");
  return static_cast<std::size_t>(steps);
}

std::string hex(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::ofstream open_output(const CommonOptions& common, std::string_view name) {
  std::error_code ec;
  std::filesystem::create_directories(common.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + common.out_dir.string() + ": " + ec.message());
  const auto file = common.out_dir / std::string(name);
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  return out;
}

void finish(std::ofstream& out, std::string_view name) {
  out.flush();
  if (!out) throw IoError("failed writing " + std::string(name));
}

void preamble(CsvWriter& csv, std::string_view command, const ScenarioConfig& config) {
  csv.comment("housim " + std::string(command) + " config_hash=" + hex(config_hash(config)) +
              " seed=" + std::to_string(config.seed));
}

closed_form::ListedFormula parse_listed_formula(const std::string& text) {
  if (text == "printed") return closed_form::ListedFormula::printed;
  if (text == "exact") return closed_form::ListedFormula::exact;
  throw UsageError("formula must be printed or exact");
}

std::string_view boundary_name(owt::Boundary b) {
  switch (b) {
    case owt::Boundary::interior: return "interior";
    case owt::Boundary::left: return "left";
    case owt::Boundary::right: return "right";
  }
  return "unknown";
}

market_sim::SimulationConfig simulation_of(const CommonOptions& common) {
  auto sim = common.config.simulation;
  sim.threads = common.threads;
  return sim;
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("grid must be min:max:steps");
  const double lo = parse_number(parts[0], "grid");
  const double hi = parse_number(parts[1], "grid");
  const std::size_t steps = parse_steps(parts[2], "grid");
  if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) throw UsageError("grid needs finite min <= max");
  std::vector<double> grid;
  if (steps == 0) return grid;
  if (steps == 1) {
    if (lo != hi) throw UsageError("a one-point grid needs min == max");
    return {lo};
  }
  for (std::size_t i = 0; i < steps; ++i) {
    grid.push_back(i + 1 == steps ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  return grid;
}

owt::SweepAxis parse_axis(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw UsageError("axis must be name:min:max:steps");
  const auto parameter = owt::parse_sweep_parameter(text.substr(0, colon));
  if (!parameter) throw UsageError("unknown sweep parameter \"" + std::string(text.substr(0, colon)) + "\"");
  const auto parts = split(text.substr(colon + 1), ':');
  if (parts.size() != 3) throw UsageError("axis must be name:min:max:steps");
  owt::SweepAxis axis;
  axis.parameter = *parameter;
  axis.min = parse_number(parts[0], "axis");
  axis.max = parse_number(parts[1], "axis");
  axis.steps = parse_steps(parts[2], "axis");
  try {
    (void)axis.grid();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return axis;
}

std::vector<double> parse_times(std::string_view text) {
  if (text.find(':') != std::string_view::npos) return parse_grid(text);
  std::vector<double> times;
  if (text.empty()) return times;
  for (auto part : split(text, ',')) times.push_back(parse_number(part, "times"));
  return times;
}

int cmd_owt(const CommonOptions& common, const OwtOptions& options) {
  const auto& cfg = common.config;
  const auto& market = cfg.market;
  const auto& policy = cfg.policy;
  std::function<double(double)> utility;
  if (options.mode == OwtCurve::listed) {
    utility = [&](double T) { return closed_form::expected_utility(T, market, policy, options.formula); };
  } else {
    utility = [&](double T) {
      return std::exp(-policy.gamma * T) * closed_form::thinned_payoff(T, market, policy.reservation);
    };
  }
  const auto best = owt::optimal_waiting_time(utility, cfg.simulation.t_max, cfg.simulation.tol);

  auto out = open_output(common, "owt.csv");
  CsvWriter csv(out);
  preamble(csv, "owt", cfg);
  csv.comment(std::string("mode=") + (options.mode == OwtCurve::listed ? "listed" : "no-list") + " t_star=" +
              format_double(best.t_star) + " utility_at_t_star=" + format_double(best.utility_at_t_star) +
              " boundary=" + std::string(boundary_name(best.boundary)));
  csv.header({"T", "payoff", "payoff_exact", "utility"});
  for (double T : options.t_grid) {
    double payoff = 0.0;
    double exact = 0.0;
    if (options.mode == OwtCurve::listed) {
      payoff = closed_form::listed_payoff(T, market, policy.reservation, policy.list);
      exact = closed_form::listed_payoff_exact(T, market, policy.reservation, policy.list);
    } else {
      payoff = closed_form::thinned_payoff(T, market, policy.reservation);
      exact = payoff;
    }
    csv.field(T).field(payoff).field(exact).field(utility(T)).end_row();
  }
  finish(out, "owt.csv");
  return kExitOk;
}

int cmd_sweep(const CommonOptions& common, const SweepOptions& options) {
  owt::SweepSpec spec;
  spec.x = options.x;
  spec.y = options.y;
  spec.market = common.config.market;
  spec.policy = common.config.policy;
  spec.formula = options.formula;
  spec.t_max = common.config.simulation.t_max;
  spec.tol = common.config.simulation.tol;
  spec.threads = common.threads;
  const auto surface = owt::sweep_owt(spec);

  auto out = open_output(common, "sweep.csv");
  CsvWriter csv(out);
  preamble(csv, "sweep", common.config);
  csv.comment("x=" + std::string(owt::to_string(options.x.parameter)) + " y=" +
              std::string(owt::to_string(options.y.parameter)) +
              " formula=" + (options.formula == closed_form::ListedFormula::exact ? "exact" : "printed"));
  csv.header({"x", "y", "t_star"});
  for (std::size_t iy = 0; iy < surface.y.size(); ++iy) {
    for (std::size_t ix = 0; ix < surface.x.size(); ++ix) {
      csv.field(surface.x[ix]).field(surface.y[iy]).field(surface.at(iy, ix)).end_row();
    }
  }
  finish(out, "sweep.csv");
  return kExitOk;
}

int cmd_evolve(const CommonOptions& common) {
  const auto sim = simulation_of(common);
  const auto log = market_sim::run_evolution(sim, sim.horizon, common.config.seed);

  auto out = open_output(common, "evolution.csv");
  CsvWriter csv(out);
  preamble(csv, "evolve", common.config);
  csv.header({"time", "event_type", "price", "rate", "demand_intensity", "owner_index", "attempt_index"});
  for (const auto& e : log.events) {
    csv.field(e.time).field(market_sim::to_string(e.type)).field(e.price).field(e.rate).field(e.demand);
    csv.field(static_cast<std::uint64_t>(e.owner));
    if (e.attempt == market_sim::kNoAttempt) {
      csv.field(std::string_view{});
    } else {
      csv.field(static_cast<std::uint64_t>(e.attempt));
    }
    csv.end_row();
  }
  finish(out, "evolution.csv");

  auto events = open_output(common, "evolution.events");
  events << "# housim evolve config_hash=" << hex(config_hash(common.config)) << " seed=" << common.config.seed << "\n";
  for (const auto& e : log.events) {
    events << "time=" << format_double(e.time) << " type=" << market_sim::to_string(e.type)
           << " price=" << format_double(e.price) << " list=" << format_double(e.list_price)
           << " rate=" << format_double(e.rate) << " demand=" << format_double(e.demand) << " owner=" << e.owner
           << " attempt=";
    if (e.attempt == market_sim::kNoAttempt) {
      events << "none";
    } else {
      events << e.attempt;
    }
    events << "\n";
  }
  finish(events, "evolution.events");

  auto rates = open_output(common, "rate_path.csv");
  CsvWriter rate_csv(rates);
  preamble(rate_csv, "evolve", common.config);
  rate_csv.header({"time", "rate"});
  for (std::size_t i = 0; i < log.path.size(); ++i) {
    rate_csv.field(log.path.time_at(i)).field(log.path.values()[i]).end_row();
  }
  finish(rates, "rate_path.csv");
  return kExitOk;
}

int cmd_expected_price(const CommonOptions& common, const ExpectedPriceOptions& options) {
  const auto sim = simulation_of(common);
  const std::size_t reps = options.reps.value_or(common.config.n_reps);
  if (reps < 1) throw UsageError("--reps must be >= 1");
  double last = 0.0;
  for (double t : options.times) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw UsageError("query times must be finite and >= 0");
    last = std::max(last, t);
  }
  const auto path = stochastic::simulate_cir(sim.cir, std::max(last + sim.t_max, sim.dt), sim.dt, common.config.seed);
  const auto curve = market_sim::expected_price_curve(sim, path, options.times, reps, common.config.seed);

  auto out = open_output(common, "expected_price.csv");
  CsvWriter csv(out);
  preamble(csv, "expected-price", common.config);
  csv.header({"time", "mean_price", "stderr", "no_sale_fraction", "sales", "replications", "t_star"});
  for (const auto& p : curve) {
    csv.field(p.time).field(p.mean_price).field(p.std_error).field(p.no_sale_fraction);
    csv.field(static_cast<std::uint64_t>(p.sales)).field(static_cast<std::uint64_t>(p.replications)).field(p.t_star);
    csv.end_row();
  }
  finish(out, "expected_price.csv");
  return kExitOk;
}

int cmd_payoff_path(const CommonOptions& common, const PayoffPathOptions& options) {
  const auto& sim = common.config.simulation;
  path_payoff::PathModel model;
  model.cir = sim.cir;
  model.dt = sim.dt;
  model.list = market_sim::list_schedule(sim.initial_reservation, sim.initial_list, sim.zeta);
  model.offers = path_payoff::OfferDistribution::uniform(sim.p_min, sim.p_max);
  model.withdrawal = path_payoff::WithdrawalDistribution::exponential(sim.mu);
  model.reservation = sim.initial_reservation;
  model.demand = sim.demand;
  const std::size_t paths = options.paths.value_or(common.config.n_paths);
  if (paths < 2) throw UsageError("--paths must be >= 2");
  const bool deterministic = sim.cir.sigma == 0.0;

  auto out = open_output(common, "payoff_path.csv");
  CsvWriter csv(out);
  preamble(csv, "payoff-path", common.config);
  csv.header({"t", "payoff", "stderr", "n_paths"});
  double last = 0.0;
  for (double t : options.t_grid) last = std::max(last, t);
  std::optional<path_payoff::PathContext> fixed;
  if (deterministic) {
    fixed = model.context_for(stochastic::simulate_cir(sim.cir, std::max(last, sim.dt), sim.dt, common.config.seed));
  }
  for (double t : options.t_grid) {
    McEstimate est;
    if (fixed) {
      est = {path_payoff::conditional_payoff(*fixed, t, options.mode, options.formula), 0.0, 1};
    } else {
      est = path_payoff::expected_payoff(model, t, options.mode, options.formula, paths, common.config.seed,
                                         common.threads);
    }
    csv.field(t).field(est.mean).field(est.std_error).field(static_cast<std::uint64_t>(est.n)).end_row();
  }
  finish(out, "payoff_path.csv");
  return kExitOk;
}

int cmd_validate(const CommonOptions& common, const ValidateOptions& options, std::ostream& report) {
  oracle::ValidationOptions v;
  v.sigmas = options.sigmas;
  v.n = options.n.value_or(common.config.mc_replications);
  v.seed = common.config.seed;
  v.lambda_perturbation = options.perturb_lambda;
  v.threads = common.threads;
  v.market = common.config.market;
  v.policy = common.config.policy;
  v.simulation = common.config.simulation;
  const auto result = oracle::validate_all(v);

  auto out = open_output(common, "validation.csv");
  CsvWriter csv(out);
  preamble(csv, "validate", common.config);
  csv.header({"check_name", "analytic", "mc_mean", "mc_stderr", "z", "verdict"});
  for (const auto& row : result.rows) {
    csv.field(row.check).field(row.analytic).field(row.mc_mean).field(row.mc_stderr).field(row.z);
    csv.field(oracle::to_string(row.verdict)).end_row();
  }
  finish(out, "validation.csv");

  report << std::left << std::setw(36) << "check" << std::right << std::setw(14) << "analytic" << std::setw(14)
         << "mc_mean" << std::setw(12) << "mc_stderr" << std::setw(10) << "z"
         << "  verdict\n";
  for (const auto& row : result.rows) {
    report << std::left << std::setw(36) << row.check << std::right << std::fixed << std::setprecision(6)
           << std::setw(14) << row.analytic << std::setw(14) << row.mc_mean << std::setw(12) << row.mc_stderr
           << std::setprecision(2) << std::setw(10) << row.z << "  " << oracle::to_string(row.verdict) << "\n";
  }
  report.unsetf(std::ios::floatfield);
  report << result.count(oracle::Verdict::pass) << " pass, " << result.count(oracle::Verdict::fail) << " fail, "
         << result.count(oracle::Verdict::low_power) << " low power, " << result.count(oracle::Verdict::reported)
         << " reported\n";
  return result.passed() ? kExitOk : kExitValidationFailed;
}

int run(int argc, char** argv) {
  CLI::App app{"Optimal waiting time and housing price evolution"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  unsigned threads = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Flat JSON scenario file");
    sub->add_option("--seed", seed, "Root seed (overrides the config)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads, 0 = hardware concurrency");
  };

  std::string owt_mode = "listed";
  std::string t_grid = "0:10:201";
  std::string owt_formula = "printed";
  auto* owt_cmd = app.add_subcommand("owt", "Payoff and utility curves with the optimal waiting time");
  owt_cmd->add_option("--mode", owt_mode, "listed or no-list");
  owt_cmd->add_option("--t-grid", t_grid, "min:max:steps");
  owt_cmd->add_option("--formula", owt_formula, "printed or exact, used for the utility column");
  add_common(owt_cmd);

  std::string x_axis = "lambda:1:10:10";
  std::string y_axis = "r:0.02:0.3:15";
  std::string sweep_formula = "exact";
  auto* sweep_cmd = app.add_subcommand("sweep", "Optimal waiting time over a two-parameter grid");
  sweep_cmd->add_option("--x", x_axis, "name:min:max:steps");
  sweep_cmd->add_option("--y", y_axis, "name:min:max:steps");
  sweep_cmd->add_option("--formula", sweep_formula, "printed or exact");
  add_common(sweep_cmd);

  auto* evolve_cmd = app.add_subcommand("evolve", "Single multi-owner price evolution");
  add_common(evolve_cmd);

  std::string times = "0:20:21";
  std::optional<std::size_t> reps;
  auto* price_cmd = app.add_subcommand("expected-price", "Mean sale price by posting time");
  price_cmd->add_option("--times", times, "t1,t2,... or min:max:steps");
  price_cmd->add_option("--reps", reps, "Sale attempts per query time");
  add_common(price_cmd);

  std::string path_grid = "0.25:3:12";
  std::string path_mode = "changing";
  std::string path_formula = "exact";
  std::optional<std::size_t> paths;
  auto* path_cmd = app.add_subcommand("payoff-path", "Expected payoff under stochastic rates");
  path_cmd->add_option("--t-grid", path_grid, "min:max:steps");
  path_cmd->add_option("--mode", path_mode, "changing, constant or none");
  path_cmd->add_option("--formula", path_formula, "printed or exact");
  path_cmd->add_option("--paths", paths, "Number of CIR paths");
  add_common(path_cmd);

  std::optional<std::size_t> n;
  double sigmas = 3.0;
  double perturb = 1.0;
  auto* validate_cmd = app.add_subcommand("validate", "Monte Carlo oracle against the closed forms");
  validate_cmd->add_option("--n", n, "Replications per check");
  validate_cmd->add_option("--sigmas", sigmas, "Acceptance band in standard errors");
  validate_cmd->add_option("--perturb-lambda", perturb, "Scale the analytic intensities (harness check)");
  add_common(validate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CommonOptions common;
    common.config = config_path.empty() ? default_config() : load_config(config_path);
    if (seed) common.config.seed = *seed;
    common.out_dir = out_dir;
    common.threads = threads;

    if (*owt_cmd) {
      OwtOptions o;
      if (owt_mode == "listed") {
        o.mode = OwtCurve::listed;
      } else if (owt_mode == "no-list") {
        o.mode = OwtCurve::no_list;
      } else {
        throw UsageError("--mode must be listed or no-list");
      }
      o.t_grid = parse_grid(t_grid);
      o.formula = parse_listed_formula(owt_formula);
      return cmd_owt(common, o);
    }
    if (*sweep_cmd) {
      SweepOptions o;
      o.x = parse_axis(x_axis);
      o.y = parse_axis(y_axis);
      o.formula = parse_listed_formula(sweep_formula);
      return cmd_sweep(common, o);
    }
    if (*evolve_cmd) return cmd_evolve(common);
    if (*price_cmd) {
      ExpectedPriceOptions o;
      o.times = parse_times(times);
      o.reps = reps;
      return cmd_expected_price(common, o);
    }
    if (*path_cmd) {
      PayoffPathOptions o;
      o.t_grid = parse_grid(path_grid);
      if (path_mode == "changing") {
        o.mode = path_payoff::ListMode::changing;
      } else if (path_mode == "constant") {
        o.mode = path_payoff::ListMode::constant;
      } else if (path_mode == "none") {
        o.mode = path_payoff::ListMode::none;
      } else {
        throw UsageError("--mode must be changing, constant or none");
      }
      o.formula = parse_listed_formula(path_formula) == closed_form::ListedFormula::exact
                      ? path_payoff::PayoffFormula::exact
                      : path_payoff::PayoffFormula::printed;
      o.paths = paths;
      return cmd_payoff_path(common, o);
    }
    if (*validate_cmd) {
      ValidateOptions o;
      o.n = n;
      o.sigmas = sigmas;
      o.perturb_lambda = perturb;
      return cmd_validate(common, o, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "housim: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace housim::cli
