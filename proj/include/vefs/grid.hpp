#pragma once

#include <cstddef>
#include <numbers>
#include <string>

#include "vefs/errors.hpp"

namespace vefs {

/// Uniform periodic grid on [-pi, pi)^2 with N points per dimension.
/// Wavenumbers per dimension run over {-N/2+1, ..., N/2}.
struct Grid2 {
  int n = 0;

  Grid2() = default;
  explicit Grid2(int points) : n(points) {
    if (n <= 0 || n % 2 != 0)
      throw ConfigError("grid size must be a positive even integer, got " +
                        std::to_string(n));
  }

  double spacing() const { return 2.0 * std::numbers::pi / n; }
  double x(int i) const { return -std::numbers::pi + i * spacing(); }
  double y(int j) const { return x(j); }

  /// Signed wavenumber for a full-dimension mode index in [0, n).
  int wavenumber(int m) const { return m <= n / 2 ? m : m - n; }

  /// Number of retained modes along the half (x) spectral dimension.
  int nkx() const { return n / 2 + 1; }

  std::size_t phys_size() const { return static_cast<std::size_t>(n) * n; }
  std::size_t spec_size() const { return static_cast<std::size_t>(n) * nkx(); }

  bool operator==(const Grid2&) const = default;
};

}  // namespace vefs
