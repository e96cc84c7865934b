#include "housim_cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "housim_cli/csv.hpp"

namespace housim::cli {

namespace {

using Json = nlohmann::json;

enum class Kind { real, count, text };

struct Key {
  std::string_view name;
  Kind kind;
  std::function<double&(ScenarioConfig&)> real;
  std::function<std::uint64_t(const ScenarioConfig&)> get_count;
  std::function<void(ScenarioConfig&, std::uint64_t)> set_count;
  std::function<std::string(const ScenarioConfig&)> get_text;
  std::function<void(ScenarioConfig&, const std::string&)> set_text;
};

Key real(std::string_view name, std::function<double&(ScenarioConfig&)> access) {
  return Key{name, Kind::real, std::move(access), {}, {}, {}, {}};
}

template <class T>
Key count(std::string_view name, T ScenarioConfig::*member) {
  return Key{name,
             Kind::count,
             {},
             [member](const ScenarioConfig& c) { return static_cast<std::uint64_t>(c.*member); },
             [member](ScenarioConfig& c, std::uint64_t v) { c.*member = static_cast<T>(v); },
             {},
             {}};
}

const std::vector<Key>& keys() {
  using C = ScenarioConfig;
  static const std::vector<Key> table = {
      real("lambda", [](C& c) -> double& { return c.market.lambda; }),
      real("mu", [](C& c) -> double& { return c.market.mu; }),
      real("r", [](C& c) -> double& { return c.market.r; }),
      real("reservation_price", [](C& c) -> double& { return c.policy.reservation; }),
      real("list_price", [](C& c) -> double& { return c.policy.list; }),
      real("gamma", [](C& c) -> double& { return c.policy.gamma; }),
      real("p_min", [](C& c) -> double& { return c.market.p_min; }),
      real("p_max", [](C& c) -> double& { return c.market.p_max; }),
      real("sim_mu", [](C& c) -> double& { return c.simulation.mu; }),
      real("occupation_min", [](C& c) -> double& { return c.simulation.occupation_min; }),
      real("occupation_max", [](C& c) -> double& { return c.simulation.occupation_max; }),
      real("crisis_mean", [](C& c) -> double& { return c.simulation.crisis_mean; }),
      real("initial_reservation_price", [](C& c) -> double& { return c.simulation.initial_reservation; }),
      real("initial_list_price", [](C& c) -> double& { return c.simulation.initial_list; }),
      real("sim_gamma", [](C& c) -> double& { return c.simulation.gamma; }),
      real("rate_threshold", [](C& c) -> double& { return c.simulation.rate_threshold; }),
      real("sim_p_min", [](C& c) -> double& { return c.simulation.p_min; }),
      real("sim_p_max", [](C& c) -> double& { return c.simulation.p_max; }),
      real("k1", [](C& c) -> double& { return c.simulation.demand.k1; }),
      real("k2", [](C& c) -> double& { return c.simulation.demand.k2; }),
      real("theta", [](C& c) -> double& { return c.simulation.cir.theta; }),
      real("sigma", [](C& c) -> double& { return c.simulation.cir.sigma; }),
      real("kappa", [](C& c) -> double& { return c.simulation.cir.kappa; }),
      real("r0", [](C& c) -> double& { return c.simulation.cir.r0; }),
      real("zeta", [](C& c) -> double& { return c.simulation.zeta; }),
      real("dt", [](C& c) -> double& { return c.simulation.dt; }),
      real("horizon", [](C& c) -> double& { return c.simulation.horizon; }),
      real("t_max", [](C& c) -> double& { return c.simulation.t_max; }),
      real("tol", [](C& c) -> double& { return c.simulation.tol; }),
      count("seed", &C::seed),
      count("n_paths", &C::n_paths),
      count("n_reps", &C::n_reps),
      count("mc_replications", &C::mc_replications),
      Key{"owt_mode",
          Kind::text,
          {},
          {},
          {},
          [](const C& c) { return std::string(c.simulation.owt_mode == market_sim::OwtMode::frozen ? "frozen" : "mean_path"); },
          [](C& c, const std::string& v) {
            if (v == "frozen") {
              c.simulation.owt_mode = market_sim::OwtMode::frozen;
            } else if (v == "mean_path") {
              c.simulation.owt_mode = market_sim::OwtMode::mean_path;
            } else {
              throw ConfigError("owt_mode must be \"frozen\" or \"mean_path\"");
            }
          }},
      Key{"owt_formula",
          Kind::text,
          {},
          {},
          {},
          [](const C& c) {
            return std::string(c.simulation.formula == closed_form::ListedFormula::printed ? "printed" : "exact");
          },
          [](C& c, const std::string& v) {
            if (v == "printed") {
              c.simulation.formula = closed_form::ListedFormula::printed;
            } else if (v == "exact") {
              c.simulation.formula = closed_form::ListedFormula::exact;
            } else {
              throw ConfigError("owt_formula must be \"printed\" or \"exact\"");
            }
          }},
  };
  return table;
}

}  // namespace

void ScenarioConfig::validate() const {
  try {
    market.validate();
    policy.validate(market);
    simulation.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (n_paths < 2) throw ConfigError("n_paths must be >= 2");
  if (n_reps < 1) throw ConfigError("n_reps must be >= 1");
  if (mc_replications < 2) throw ConfigError("mc_replications must be >= 2");
}

ScenarioConfig default_config() { return ScenarioConfig{}; }

ScenarioConfig parse_config(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ScenarioConfig config = default_config();
  for (const auto& [name, value] : doc.items()) {
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == name; });
    if (it == table.end()) throw ConfigError("unknown config key \"" + name + "\"");
    switch (it->kind) {
      case Kind::real:
        if (!value.is_number()) throw ConfigError("config key \"" + name + "\" must be a number");
        it->real(config) = value.get<double>();
        break;
      case Kind::count:
        if (!value.is_number_unsigned()) throw ConfigError("config key \"" + name + "\" must be a non-negative integer");
        it->set_count(config, value.get<std::uint64_t>());
        break;
      case Kind::text:
        if (!value.is_string()) throw ConfigError("config key \"" + name + "\" must be a string");
        it->set_text(config, value.get<std::string>());
        break;
    }
  }
  config.validate();
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string canonical_form(const ScenarioConfig& config) {
  ScenarioConfig copy = config;
  std::vector<std::string> lines;
  for (const auto& key : keys()) {
    std::string value;
    switch (key.kind) {
      case Kind::real: value = format_double(key.real(copy)); break;
      case Kind::count: value = std::to_string(key.get_count(copy)); break;
      case Kind::text: value = key.get_text(copy); break;
    }
    lines.push_back(std::string(key.name) + "=" + value);
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& line : lines) out += line + "\n";
  return out;
}

std::uint64_t config_hash(const ScenarioConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_form(config)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace housim::cli
