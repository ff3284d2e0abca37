#pragma once

// Randomized double-loop discovery of convergent look-ahead formulas.
//
// Each outer run starts from a fresh standard-normal seed and performs
// `restarts` Nelder-Mead minimizations of the max-root objective. After a
// failed minimization the next one restarts from a perturbation of the best
// seed seen in the run; after a success it restarts from a perturbation of
// the successful seed, so one outer run can yield several distinct formulas.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "fdforge/charpoly.hpp"
#include "fdforge/dimensions.hpp"
#include "fdforge/formula.hpp"
#include "fdforge/nelder_mead.hpp"
#include "fdforge/taylor_system.hpp"

namespace fdforge {

using Rng = std::mt19937_64;

struct SearchConfig {
  int runs = 1;
  int restarts = 1;
  Dimensions dims;
  std::uint64_t rng_seed = 0;
  double nm_tol_x = 1e-8;
  double nm_tol_f = 1e-10;
  int nm_max_iter = 2000;
  double perturb_scale = 0.1;
  double penalty = kSeedPenalty;
  /// Replaces the random start of outer run 0.
  std::optional<std::vector<double>> init_seed;
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
  unsigned threads = 1;
  RootTolerances tolerances;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

struct Candidate {
  std::vector<double> seed_initial;
  std::vector<double> seed_final;
  DifferenceFormula formula;
  ExactFormula exact;  // computed from the exact binary value of seed_final
  RootReport report;
  int outer_index = 0;
  int inner_index = 0;
  int nm_iterations = 0;
};

struct SearchResult {
  SearchConfig config;
  std::vector<Candidate> candidates;
  int attempts = 0;
  /// Best objective of every outer run that found nothing.
  std::vector<double> failure_plateaus;
};

inline void SearchConfig::validate() const {
  if (runs < 1 || restarts < 1) throw std::invalid_argument("runs and restarts must be at least 1");
  if (!(nm_tol_x > 0.0) || !(nm_tol_f > 0.0)) throw std::invalid_argument("minimizer tolerances must be positive");
  if (nm_max_iter < 1) throw std::invalid_argument("nm_max_iter must be at least 1");
  if (!(perturb_scale >= 0.0)) throw std::invalid_argument("perturb_scale must be non-negative");
  if (!(penalty > 1.0)) throw std::invalid_argument("penalty must exceed 1");
  if (dims.k < 1 || dims.s < 1) throw InvalidDimensions("search dimensions require k, s >= 1");
  if (init_seed && init_seed->size() != static_cast<std::size_t>(dims.s))
    throw std::invalid_argument("init seed length must equal s");
}

/// I.i.d. standard-normal seed; the zero vector is redrawn.
inline std::vector<double> random_seed(int s, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> y(static_cast<std::size_t>(s));
  do {
    for (auto& v : y) v = normal(rng);
  } while (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; }));
  return y;
}

/// y + scale * ||y||_inf * g with g standard normal.
inline std::vector<double> perturb(const std::vector<double>& y, Rng& rng, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  double norm = 0.0;
  for (double v : y) norm = std::max(norm, std::abs(v));
  std::vector<double> out(y.size());
  do {
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + scale * norm * normal(rng);
  } while (std::all_of(out.begin(), out.end(), [](double v) { return v == 0.0; }));
  return out;
}

/// Independent generator for one outer run.
inline Rng outer_run_rng(std::uint64_t rng_seed, int outer_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(rng_seed), static_cast<std::uint32_t>(rng_seed >> 32),
                    static_cast<std::uint32_t>(outer_index), 0x5eedu};
  return Rng(seq);
}

/// True when the two polynomials agree component-wise within tol.
inline bool same_polynomial(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-8) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(std::abs(a[i] - b[i]) <= tol)) return false;
  return true;
}

namespace detail {

struct OuterRunOutcome {
  std::vector<Candidate> candidates;
  int attempts = 0;
  double best_failure = 0.0;
};

inline Candidate make_candidate(const EchelonBlock& block, std::vector<double> start, std::vector<double> final_seed,
                                const RootTolerances& tol, int outer, int inner, int iterations) {
  Candidate c;
  c.formula = seed_to_formula<double>(block, final_seed);
  c.exact = seed_to_exact_formula(block.dims, final_seed);
  c.report = analyze(c.formula, tol);
  c.seed_initial = std::move(start);
  c.seed_final = std::move(final_seed);
  c.outer_index = outer;
  c.inner_index = inner;
  c.nm_iterations = iterations;
  return c;
}

inline bool is_convergent_seed(const EchelonBlock& block, const std::vector<double>& y, const RootTolerances& tol) {
  try {
    return analyze(seed_to_formula<double>(block, y), tol).convergent;
  } catch (const Error&) {
    return false;
  }
}

inline OuterRunOutcome run_outer(const SearchConfig& cfg, const EchelonBlock& block, int outer) {
  OuterRunOutcome out;
  Rng rng = outer_run_rng(cfg.rng_seed, outer);
  auto f = [&](const std::vector<double>& y) { return objective(block, y, cfg.penalty); };
  NelderMeadOptions opts{cfg.nm_tol_x, cfg.nm_tol_f, cfg.nm_max_iter, {}};

  std::vector<double> best_seed;
  double best_value = cfg.penalty;
  std::optional<std::vector<double>> last_success;
  for (int inner = 0; inner < cfg.restarts; ++inner) {
    std::vector<double> start;
    if (inner == 0) {
      start = (outer == 0 && cfg.init_seed) ? *cfg.init_seed : random_seed(cfg.dims.s, rng);
    } else {
      start = perturb(last_success ? *last_success : best_seed, rng, cfg.perturb_scale);
    }
    ++out.attempts;

    // The objective never drops below 1, so a convergent start is already a minimizer.
    NelderMeadResult nm;
    if (is_convergent_seed(block, start, cfg.tolerances)) {
      nm = {start, f(start), 0, 1};
    } else {
      nm = nelder_mead(f, start, opts);
    }

    bool success = false;
    if (nm.f < cfg.penalty) {
      try {
        auto cand = make_candidate(block, start, nm.x, cfg.tolerances, outer, inner, nm.iterations);
        if (cand.report.convergent) {
          success = true;
          out.candidates.push_back(std::move(cand));
        }
      } catch (const Error&) {
      }
    }
    if (success) {
      last_success = nm.x;
    } else {
      last_success.reset();
      if (best_seed.empty() || nm.f < best_value) {
        best_value = nm.f;
        best_seed = nm.x;
      }
    }
  }
  out.best_failure = best_value;
  return out;
}

}  // namespace detail

/// Runs the randomized search. Output is a pure function of the configuration,
/// independent of the thread count.
inline SearchResult discover(const SearchConfig& config) {
  config.validate();
  const auto block = echelon_block(config.dims);

  std::vector<detail::OuterRunOutcome> outcomes(static_cast<std::size_t>(config.runs));
  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(config.runs));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < config.runs; i = next++) outcomes[static_cast<std::size_t>(i)] = detail::run_outer(config, *block, i);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  SearchResult result;
  result.config = config;
  for (auto& outcome : outcomes) {
    result.attempts += outcome.attempts;
    if (outcome.candidates.empty()) result.failure_plateaus.push_back(outcome.best_failure);
    for (auto& cand : outcome.candidates) {
      const bool duplicate = std::any_of(result.candidates.begin(), result.candidates.end(), [&](const Candidate& c) {
        return same_polynomial(c.formula.p, cand.formula.p);
      });
      if (!duplicate) result.candidates.push_back(std::move(cand));
    }
  }
  return result;
}

}  // namespace fdforge
