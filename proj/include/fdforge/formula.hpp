#pragma once

#include <vector>

#include "fdforge/dimensions.hpp"
#include "fdforge/rational.hpp"

namespace fdforge {

/// A look-ahead difference formula
///
///   p[0] x_{j+1} + p[1] x_j + ... + p[d] x_{j-d+1} = c * tau * xdot_j,   d = dims.degree(),
///
/// stored by its characteristic polynomial p (highest power first, p[0] == 1)
/// and the derivative coefficient c.
template <typename Scalar>
struct BasicFormula {
  Dimensions dims;
  std::vector<Scalar> p;
  Scalar c{};

  [[nodiscard]] int degree() const { return static_cast<int>(p.size()) - 1; }
};

using DifferenceFormula = BasicFormula<double>;
using ExactFormula = BasicFormula<Rational>;

inline DifferenceFormula to_float(const ExactFormula& exact) {
  DifferenceFormula out{exact.dims, {}, to_double(exact.c)};
  out.p.reserve(exact.p.size());
  for (const auto& v : exact.p) out.p.push_back(to_double(v));
  return out;
}

/// p(1), zero for every formula built from a Taylor null vector.
template <typename Scalar>
Scalar value_at_one(const BasicFormula<Scalar>& f) {
  Scalar sum{};
  for (const auto& v : f.p) sum += v;
  return sum;
}

/// p'(1), which equals c for every consistent formula.
template <typename Scalar>
Scalar derivative_at_one(const BasicFormula<Scalar>& f) {
  Scalar sum{};
  const int d = f.degree();
  for (int i = 0; i < d; ++i) sum += f.p[static_cast<std::size_t>(i)] * Scalar(d - i);
  return sum;
}

/// Divides integer (or otherwise unnormalized) coefficients by the leading one.
inline std::vector<Rational> normalize_leading(const std::vector<Rational>& coeffs) {
  if (coeffs.empty() || coeffs.front() == 0) throw DegenerateInput("leading coefficient is zero");
  std::vector<Rational> out;
  out.reserve(coeffs.size());
  for (const auto& v : coeffs) out.push_back(v / coeffs.front());
  return out;
}

}  // namespace fdforge
