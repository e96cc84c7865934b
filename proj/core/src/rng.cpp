#include "housim/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace housim {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, StreamPurpose purpose, std::uint64_t index) noexcept {
  std::uint64_t h = splitmix64(root);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  return splitmix64(h ^ index);
}

RandomStream::RandomStream(std::uint64_t root, StreamPurpose purpose, std::uint64_t index)
    : engine_(derive_seed(root, purpose, index)) {}

double RandomStream::uniform() {
  // 53 random mantissa bits, shifted by half an ulp so 0 is never produced.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential(double rate) {
  if (rate == 0.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(rate)) return 0.0;
  return -std::log(uniform()) / rate;
}

double RandomStream::normal() {
  if (spare_normal_) {
    double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  // Box-Muller on our own uniforms keeps the stream portable across standard libraries.
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_normal_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

}  // namespace housim
