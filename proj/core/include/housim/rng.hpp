#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace housim {

// Each consumer of randomness gets its own substream keyed by
// (root seed, purpose, index). Adding replications or purposes never shifts
// the draws of existing ones.
enum class StreamPurpose : std::uint64_t {
  cir_path = 1,
  offers = 2,
  occupation = 3,
  crisis = 4,
  sale_attempt = 5,
  expected_price = 6,
  oracle_auxiliary = 7,
  oracle_listed = 8,
  oracle_path = 9,
  path_payoff_mc = 10,
  sampler = 11,
};

std::uint64_t derive_seed(std::uint64_t root, StreamPurpose purpose, std::uint64_t index) noexcept;

class RandomStream {
 public:
  RandomStream(std::uint64_t root, StreamPurpose purpose, std::uint64_t index = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Exponential with the given rate; rate 0 yields +inf, an infinite rate yields 0.
  double exponential(double rate);
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace housim
