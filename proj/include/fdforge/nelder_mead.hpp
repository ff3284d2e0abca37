#pragma once

// Nelder-Mead downhill simplex minimizer with the fminsearch conventions:
// reflection 1, expansion 2, contraction 1/2, shrink 1/2, and an initial
// simplex that displaces each coordinate by 5% (0.00025 for zero entries).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace fdforge {

struct NelderMeadOptions {
  double tol_x = 1e-8;
  double tol_f = 1e-10;
  int max_iter = 2000;
  /// Called after every iteration with the best value seen so far.
  std::function<void(int iteration, double best)> on_iteration;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

template <typename Objective>
NelderMeadResult nelder_mead(Objective&& f, std::vector<double> x0, const NelderMeadOptions& opts = {}) {
  const std::size_t n = x0.size();
  NelderMeadResult result;
  if (n == 0) {
    result.f = f(x0);
    result.evaluations = 1;
    result.x = std::move(x0);
    return result;
  }

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    double& v = simplex[i + 1][i];
    v = v != 0.0 ? 1.05 * v : 0.00025;
  }
  int evaluations = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evaluations;
    return f(x);
  };
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s(n + 1);
    std::vector<double> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s[i] = std::move(simplex[order[i]]);
      v[i] = values[order[i]];
    }
    simplex = std::move(s);
    values = std::move(v);
  };
  sort_simplex();

  auto converged = [&] {
    double spread_f = 0.0;
    double spread_x = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      spread_f = std::max(spread_f, std::abs(values[i] - values[0]));
      for (std::size_t j = 0; j < n; ++j) spread_x = std::max(spread_x, std::abs(simplex[i][j] - simplex[0][j]));
    }
    return spread_f <= opts.tol_f && spread_x <= opts.tol_x;
  };

  // Point along the line through the centroid and the worst vertex.
  auto along = [&](const std::vector<double>& centroid, double t) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (simplex[n][j] - centroid[j]);
    return x;
  };

  int iter = 0;
  std::vector<double> centroid(n);
  while (iter < opts.max_iter && !converged()) {
    ++iter;
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    for (auto& c : centroid) c /= static_cast<double>(n);

    auto xr = along(centroid, -1.0);
    const double fr = eval(xr);
    bool shrink = false;
    if (fr < values[0]) {
      auto xe = along(centroid, -2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[n] = std::move(xe);
        values[n] = fe;
      } else {
        simplex[n] = std::move(xr);
        values[n] = fr;
      }
    } else if (fr < values[n - 1]) {
      simplex[n] = std::move(xr);
      values[n] = fr;
    } else if (fr < values[n]) {
      auto xc = along(centroid, -0.5);
      const double fc = eval(xc);
      if (fc <= fr) {
        simplex[n] = std::move(xc);
        values[n] = fc;
      } else {
        shrink = true;
      }
    } else {
      auto xcc = along(centroid, 0.5);
      const double fcc = eval(xcc);
      if (fcc < values[n]) {
        simplex[n] = std::move(xcc);
        values[n] = fcc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
        values[i] = eval(simplex[i]);
      }
    }
    sort_simplex();
    if (opts.on_iteration) opts.on_iteration(iter, values[0]);
  }

  result.x = simplex[0];
  result.f = values[0];
  result.iterations = iter;
  result.evaluations = evaluations;
  return result;
}

}  // namespace fdforge
