#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "housim/closed_form.hpp"
#include "housim/market_sim.hpp"

namespace housim::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a command needs. The OWT analysis and the simulation keep
/// separate parameter sets because their defaults differ.
struct ScenarioConfig {
  closed_form::MarketParams market;
  closed_form::SellerPolicy policy;
  market_sim::SimulationConfig simulation;
  std::uint64_t seed = 20240611;
  std::size_t n_paths = 200;
  std::size_t n_reps = 2000;
  std::size_t mc_replications = 1'000'000;

  void validate() const;
};

ScenarioConfig default_config();

/// Flat JSON object; unknown keys and wrongly typed values raise ConfigError.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& file);

/// key=value lines, sorted by key, numbers at 17 significant digits.
std::string canonical_form(const ScenarioConfig& config);

/// 64-bit FNV-1a of canonical_form.
std::uint64_t config_hash(const ScenarioConfig& config);

}  // namespace housim::cli
