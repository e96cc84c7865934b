#pragma once

#include <cstddef>
#include <stdexcept>

namespace housim {

inline constexpr std::size_t kDefaultQuadratureNodes = 201;

/// Composite Simpson rule on `nodes` equally spaced points (odd, >= 3).
/// A zero-width interval integrates to 0.
template <class F>
double simpson(F&& f, double a, double b, std::size_t nodes = kDefaultQuadratureNodes) {
  if (nodes < 3 || nodes % 2 == 0) throw std::invalid_argument("simpson: node count must be odd and >= 3");
  if (a == b) return 0.0;
  const std::size_t panels = nodes - 1;
  const double h = (b - a) / static_cast<double>(panels);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < panels; ++i) {
    const double v = f(a + h * static_cast<double>(i));
    if (i % 2 == 1) {
      odd += v;
    } else {
      even += v;
    }
  }
  return h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b));
}

}  // namespace housim
