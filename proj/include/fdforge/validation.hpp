#pragma once

// Known-formula catalog, empirical truncation order, and a recurrence simulator
// that drives a formula with exact samples and exact derivatives.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fdforge/charpoly.hpp"
#include "fdforge/formula.hpp"
#include "fdforge/rational.hpp"

namespace fdforge {

struct KnownFormula {
  char label = 'A';
  std::vector<long> char_poly;  // unnormalized integer coefficients, highest power first
  Rational c;                    // tau * xdot coefficient of the normalized formula
  int claimed_order = 2;
  std::string source_note;

  /// Size whose Taylor system produces a formula of this degree and order.
  [[nodiscard]] Dimensions dims() const {
    const int k = claimed_order - 2;
    return Dimensions{k, static_cast<int>(char_poly.size()) - 1 - k};
  }

  [[nodiscard]] ExactFormula formula() const {
    std::vector<Rational> coeffs(char_poly.begin(), char_poly.end());
    return ExactFormula{dims(), normalize_leading(coeffs), c};
  }
};

/// The six convergent look-ahead formulas known before the Taylor-seed construction.
inline const std::vector<KnownFormula>& catalog() {
  static const std::vector<KnownFormula> entries = {
      {'A', {1, 0, -1}, Rational(2), 2, "symmetric Euler, y_{j+1} = y_{j-1} + 2 tau ydot_j"},
      {'B', {2, -3, 2, -1}, Rational(1), 3, "4-IFD, y_{j+1} = 3/2 y_j - y_{j-1} + 1/2 y_{j-2}"},
      {'C', {6, -3, -2, -1}, Rational(5, 3), 3, "4-IFD, y_{j+1} = 1/2 y_j + 1/3 y_{j-1} + 1/6 y_{j-2}"},
      {'D', {5, -3, -1, -1}, Rational(8, 5), 3, "FIFD, y_{j+1} = 3/5 y_j + 1/5 y_{j-1} + 1/5 y_{j-2}"},
      {'E', {8, 1, -6, -5, 2}, Rational(9, 4), 4, "5-IFD, y_{j+1} = -1/8 y_j + 3/4 y_{j-1} + 5/8 y_{j-2} - 1/4 y_{j-3}"},
      {'F', {13, -6, -2, -4, -3, 2}, Rational(24, 13), 4,
       "6NtauCD, y_{j+1} = 6/13 y_j + 2/13 y_{j-1} + 4/13 y_{j-2} + 3/13 y_{j-3} - 2/13 y_{j-4}"},
  };
  return entries;
}

inline const KnownFormula& known_formula(char label) {
  for (const auto& e : catalog())
    if (e.label == label) return e;
  throw std::invalid_argument(std::string("no catalog formula labelled ") + label);
}

/// A smooth scalar test signal with its analytic derivative.
struct TestFunction {
  std::string name;
  std::function<long double(long double)> value;
  std::function<long double(long double)> derivative;
};

inline TestFunction exp_function() {
  return {"exp", [](long double t) { return std::exp(t); }, [](long double t) { return std::exp(t); }};
}

inline TestFunction sin_function() {
  return {"sin", [](long double t) { return std::sin(t); }, [](long double t) { return std::cos(t); }};
}

inline TestFunction monomial(int r) {
  return {"t^" + std::to_string(r), [r](long double t) { return std::pow(t, static_cast<long double>(r)); },
          [r](long double t) { return r == 0 ? 0.0L : r * std::pow(t, static_cast<long double>(r - 1)); }};
}

/// Defect sum_i p_i x(t + (1-i) tau) - c tau xdot(t) of exact samples.
template <typename Scalar>
double residual(const BasicFormula<Scalar>& f, const TestFunction& x, double t, double tau) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < f.p.size(); ++i) {
    const long double ti = static_cast<long double>(t) + (1.0L - static_cast<long double>(i)) * tau;
    sum += to_long_double(f.p[i]) * x.value(ti);
  }
  sum -= to_long_double(f.c) * static_cast<long double>(tau) * x.derivative(t);
  return static_cast<double>(sum);
}

struct OrderCheckResult {
  std::string formula_id;
  std::vector<double> taus;
  std::vector<double> residuals;
  double fitted_slope = 0.0;
  int claimed_order = 0;
  int points_used = 0;
  bool underflow = false;  // too few residuals above the noise floor to fit a slope
  bool pass = false;
};

inline constexpr double kSlopeTolerance = 0.3;

/// Least-squares slope of log|residual| against log tau for x = e^t at t = 0,
/// tau = 2^-3 .. 2^-10. Residuals are evaluated in 50-digit arithmetic; exact
/// coefficients keep the noise floor far below the smallest truncation error.
template <typename Scalar>
OrderCheckResult empirical_order(const BasicFormula<Scalar>& f, int claimed, std::string id = {}) {
  if (claimed < 2) throw std::invalid_argument("claimed order must be at least 2");
  OrderCheckResult out;
  out.formula_id = std::move(id);
  out.claimed_order = claimed;

  std::vector<Extended> coeffs;
  for (const auto& v : f.p) coeffs.push_back(to_extended(v));
  const Extended c = to_extended(f.c);
  // Coefficients rounded to double carry ~1e-16 relative error into the residual.
  const double floor = std::is_same_v<Scalar, Rational> ? 1e-40 : 1e-14;

  std::vector<double> xs;
  std::vector<double> ys;
  bool below = false;
  for (int e = 3; e <= 10; ++e) {
    const double tau = std::ldexp(1.0, -e);
    Extended sum = 0;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      sum += coeffs[i] * boost::multiprecision::exp(Extended(1 - static_cast<int>(i)) * Extended(tau));
    sum -= c * Extended(tau);
    const double r = boost::multiprecision::abs(sum).convert_to<double>();
    out.taus.push_back(tau);
    out.residuals.push_back(r);
    if (r < floor) below = true;
    if (!below) {
      xs.push_back(std::log(tau));
      ys.push_back(std::log(r));
    }
  }
  out.points_used = static_cast<int>(xs.size());
  if (xs.size() < 2) {
    out.underflow = true;
    out.pass = true;
    return out;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  out.fitted_slope = sxy / sxx;
  out.pass = out.fitted_slope >= claimed - kSlopeTolerance;
  return out;
}

struct RecurrenceRun {
  std::string function_name;
  double tau = 0.0;
  int steps = 0;
  double max_error = 0.0;
  bool diverged = false;
};

inline constexpr double kBlowupThreshold = 1e10;

/// Runs x_{j+1} = -(p_1 x_j + ... + p_d x_{j-d+1}) + c tau xdot(t_j) from d exact
/// starting samples at t = 0, tau, ..., (d-1) tau, for `steps` new iterates.
template <typename Scalar>
RecurrenceRun simulate(const BasicFormula<Scalar>& f, const TestFunction& x, double tau, int steps,
                       double blowup = kBlowupThreshold) {
  RecurrenceRun run{x.name, tau, steps, 0.0, false};
  if (steps <= 0) return run;
  const std::size_t d = f.p.size() - 1;
  std::vector<long double> p;
  for (const auto& v : f.p) p.push_back(to_long_double(v) / to_long_double(f.p.front()));
  const long double c = to_long_double(f.c) / to_long_double(f.p.front());
  const long double h = tau;

  // Ring buffer of the last d iterates; history[(j) % d] holds x_j.
  std::vector<long double> history(d);
  for (std::size_t j = 0; j < d; ++j) history[j] = x.value(static_cast<long double>(j) * h);

  long double max_error = 0.0L;
  for (int step = 0; step < steps; ++step) {
    const std::size_t j = d - 1 + static_cast<std::size_t>(step);  // index of the current iterate
    long double next = c * h * x.derivative(static_cast<long double>(j) * h);
    for (std::size_t i = 1; i <= d; ++i) next -= p[i] * history[(j + 1 - i) % d];
    history[(j + 1) % d] = next;
    const long double err = std::abs(next - x.value(static_cast<long double>(j + 1) * h));
    if (!std::isfinite(next) || std::abs(next) > blowup) {
      run.diverged = true;
      run.max_error = std::isfinite(err) ? static_cast<double>(err) : INFINITY;
      return run;
    }
    max_error = std::max(max_error, err);
  }
  run.max_error = static_cast<double>(max_error);
  return run;
}

/// Outcome of the full self-check on one catalog entry.
struct KnownFormulaCheck {
  char label = 'A';
  bool root_at_one = false;
  bool consistent = false;  // p'(1) == c exactly
  bool convergent = false;
  OrderCheckResult order;
  RecurrenceRun coarse;
  RecurrenceRun fine;
  bool simulation_pass = false;
  [[nodiscard]] bool pass() const { return root_at_one && consistent && convergent && order.pass && simulation_pass; }
};

inline KnownFormulaCheck check_known_formula(const KnownFormula& entry, double tau = 0.01, int steps = 1000) {
  KnownFormulaCheck check;
  check.label = entry.label;
  long sum = 0;
  for (long v : entry.char_poly) sum += v;
  check.root_at_one = sum == 0;
  const ExactFormula f = entry.formula();
  check.consistent = derivative_at_one(f) == f.c;
  check.convergent = analyze(f).convergent;
  check.order = empirical_order(f, entry.claimed_order, std::string(1, entry.label));
  const auto sine = sin_function();
  check.coarse = simulate(f, sine, tau, steps);
  check.fine = simulate(f, sine, tau / 2, 2 * steps);
  check.simulation_pass = !check.coarse.diverged && !check.fine.diverged && check.fine.max_error < check.coarse.max_error;
  return check;
}

}  // namespace fdforge
