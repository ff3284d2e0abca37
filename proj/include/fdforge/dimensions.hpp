#pragma once

#include <compare>
#include <optional>
#include <string>

#include "fdforge/errors.hpp"

namespace fdforge {

/// Default upper bound on k; larger values need an explicit override.
inline constexpr int kDefaultMaxK = 8;

/// Problem size of a look-ahead formula: k eliminated derivative columns and a
/// seed (null-space) dimension s.
struct Dimensions {
  int k = 1;
  int s = 1;

  /// Offset of the earliest past state x_{j-ell}.
  [[nodiscard]] constexpr int ell() const { return k + s - 1; }
  /// Highest eliminated derivative order.
  [[nodiscard]] constexpr int m() const { return k + 1; }
  /// Degree of the characteristic polynomial, also the number of Taylor rows.
  [[nodiscard]] constexpr int degree() const { return k + s; }
  /// Nominal truncation error order O(tau^(k+2)).
  [[nodiscard]] constexpr int order() const { return k + 2; }

  friend constexpr auto operator<=>(const Dimensions&, const Dimensions&) = default;

  /// Throws InvalidDimensions unless 1 <= k <= max_k and s >= 1.
  static Dimensions create(int k, int s, int max_k = kDefaultMaxK) {
    if (k < 1 || s < 1) {
      throw InvalidDimensions("dimensions require k >= 1 and s >= 1 (got k=" + std::to_string(k) +
                              ", s=" + std::to_string(s) + ")");
    }
    if (k > max_k) {
      throw InvalidDimensions("k=" + std::to_string(k) + " exceeds the limit " + std::to_string(max_k) +
                              "; pass an explicit override to go beyond it");
    }
    return Dimensions{k, s};
  }
};

/// Advisory message when s < k. Such sizes are valid but tend to yield few convergent formulas.
inline std::optional<std::string> dimension_warning(const Dimensions& dims) {
  if (dims.s < dims.k) {
    return "s=" + std::to_string(dims.s) + " is smaller than k=" + std::to_string(dims.k) +
           "; s >= k is recommended";
  }
  return std::nullopt;
}

inline std::string to_string(const Dimensions& dims) {
  return "k=" + std::to_string(dims.k) + ", s=" + std::to_string(dims.s);
}

}  // namespace fdforge
