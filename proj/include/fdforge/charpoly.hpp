#pragma once

// Roots and root-condition analysis of characteristic polynomials.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "fdforge/dimensions.hpp"
#include "fdforge/errors.hpp"
#include "fdforge/formula.hpp"
#include "fdforge/taylor_system.hpp"

namespace fdforge {

using Complex = std::complex<double>;

struct RootTolerances {
  double circle = 1e-9;   // |1 - |z|| at or below this counts as on the unit circle
  double accept = 1e-9;   // max |z| <= 1 + accept
  double cluster = 1e-6;  // two on-circle roots closer than this are a repeated root
};

struct RootReport {
  std::vector<Complex> roots;  // descending magnitude
  double max_magnitude = 0.0;
  double max_deviation = 0.0;  // max_magnitude - 1
  double second_magnitude = 0.0;
  std::vector<std::size_t> on_circle;
  bool convergent = false;
};

/// Objective value assigned to seeds that do not produce a formula.
inline constexpr double kSeedPenalty = 1e6;

namespace detail {

struct HornerResult {
  Complex value;
  Complex derivative;
  double bound;  // running-error style bound for the rounding in value
};

// Coefficients are monic and highest power first.
inline HornerResult horner(std::span<const double> a, Complex z) {
  Complex p = a[0];
  Complex dp = 0.0;
  const double az = std::abs(z);
  double bound = std::abs(a[0]);
  for (std::size_t i = 1; i < a.size(); ++i) {
    dp = dp * z + p;
    p = p * z + a[i];
    bound = bound * az + std::abs(a[i]);
  }
  return {p, dp, bound};
}

}  // namespace detail

/// All complex roots of p (highest power first) by Aberth-Ehrlich simultaneous iteration.
inline std::vector<Complex> find_roots(std::span<const double> p) {
  if (p.size() < 2) throw DegenerateInput("polynomial must have degree >= 1");
  if (p.front() == 0.0) throw DegenerateInput("leading coefficient is zero");
  for (double v : p)
    if (!std::isfinite(v)) throw DegenerateInput("polynomial has non-finite coefficients");

  std::vector<double> a(p.begin(), p.end());
  const double lead = a.front();
  for (auto& v : a) v /= lead;

  // Trailing zeros are exact roots at the origin.
  std::vector<Complex> roots;
  while (a.size() > 1 && a.back() == 0.0) {
    a.pop_back();
    roots.emplace_back(0.0, 0.0);
  }
  const std::size_t n = a.size() - 1;
  if (n == 0) return roots;
  if (n == 1) {
    roots.emplace_back(-a[1], 0.0);
    return roots;
  }

  // Start on a circle whose radius is the geometric mean of the root magnitudes.
  const double radius = std::pow(std::abs(a.back()), 1.0 / static_cast<double>(n));
  std::vector<Complex> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n) + 0.4;
    z[i] = std::polar(radius, angle);
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_iter = 500;
  std::vector<char> done(n, 0);
  std::size_t remaining = n;
  for (int iter = 0; iter < max_iter && remaining > 0; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      const auto h = detail::horner(a, z[i]);
      if (std::abs(h.value) <= 4.0 * eps * h.bound) {
        done[i] = 1;
        --remaining;
        continue;
      }
      Complex sum = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      const Complex ratio = h.value / h.derivative;
      const Complex step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
        // Perturb off a critical point or a coincident approximation.
        z[i] += Complex(eps, eps) * (1.0 + std::abs(z[i]));
        continue;
      }
      z[i] -= step;
      if (std::abs(step) <= eps * std::abs(z[i])) {
        done[i] = 1;
        --remaining;
      }
    }
  }
  roots.insert(roots.end(), z.begin(), z.end());
  return roots;
}

inline std::vector<Complex> find_roots(const std::vector<double>& p) { return find_roots(std::span<const double>(p)); }

/// Sorts roots by descending magnitude, ties broken by real then imaginary part.
inline void sort_by_magnitude(std::vector<Complex>& roots) {
  std::stable_sort(roots.begin(), roots.end(), [](const Complex& lhs, const Complex& rhs) {
    const double la = std::abs(lhs);
    const double ra = std::abs(rhs);
    if (la != ra) return la > ra;
    if (lhs.real() != rhs.real()) return lhs.real() > rhs.real();
    return lhs.imag() > rhs.imag();
  });
}

/// Root-condition classification: all roots in the closed unit disk and none repeated on its boundary.
inline RootReport analyze(std::span<const double> p, const RootTolerances& tol = {}) {
  RootReport report;
  report.roots = find_roots(p);
  sort_by_magnitude(report.roots);
  report.max_magnitude = std::abs(report.roots.front());
  report.max_deviation = report.max_magnitude - 1.0;
  report.second_magnitude = report.roots.size() > 1 ? std::abs(report.roots[1]) : 0.0;

  for (std::size_t i = 0; i < report.roots.size(); ++i)
    if (std::abs(1.0 - std::abs(report.roots[i])) <= tol.circle) report.on_circle.push_back(i);

  bool repeated = false;
  for (std::size_t a = 0; a < report.on_circle.size() && !repeated; ++a)
    for (std::size_t b = a + 1; b < report.on_circle.size(); ++b)
      if (std::abs(report.roots[report.on_circle[a]] - report.roots[report.on_circle[b]]) < tol.cluster) {
        repeated = true;
        break;
      }
  report.convergent = report.max_magnitude <= 1.0 + tol.accept && !repeated;
  return report;
}

inline RootReport analyze(const std::vector<double>& p, const RootTolerances& tol = {}) {
  return analyze(std::span<const double>(p), tol);
}

template <typename Scalar>
RootReport analyze(const BasicFormula<Scalar>& f, const RootTolerances& tol = {}) {
  std::vector<double> p;
  p.reserve(f.p.size());
  for (const auto& v : f.p) p.push_back(to_double(v));
  return analyze(p, tol);
}

/// Largest root magnitude of the polynomial in p.
inline double max_root_magnitude(std::span<const double> p) {
  double best = 0.0;
  for (const auto& z : find_roots(p)) best = std::max(best, std::abs(z));
  return best;
}

/// Search objective over seeds: max |root| of the spawned formula, or the penalty when
/// the seed spawns no formula.
inline double objective(const EchelonBlock& block, std::span<const double> y, double penalty = kSeedPenalty) {
  try {
    const auto f = seed_to_formula<double>(block, y);
    for (double v : f.p)
      if (!std::isfinite(v)) return penalty;
    const double value = max_root_magnitude(f.p);
    return std::isfinite(value) ? value : penalty;
  } catch (const NonNormalizableSeed&) {
    return penalty;
  } catch (const InvalidSeed&) {
    return penalty;
  } catch (const DegenerateInput&) {
    return penalty;
  }
}

inline double objective(const Dimensions& dims, std::span<const double> y, double penalty = kSeedPenalty) {
  return objective(*echelon_block(dims), y, penalty);
}

}  // namespace fdforge
