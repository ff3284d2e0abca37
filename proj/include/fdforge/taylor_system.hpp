#pragma once

// Taylor-coefficient system behind look-ahead difference formulas.
//
// Row u of A holds the scaled Taylor coefficients of x_{j+1} (u = 0) and of
// x_{j-u} (u >= 1) for the derivatives of order 2 .. k+1. Any left null vector
// q of A combines the k+s expansions so that all of those derivatives cancel,
// leaving a relation between x_{j+1}, x_j, ..., x_{j-ell} and tau * xdot_j.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "fdforge/dimensions.hpp"
#include "fdforge/errors.hpp"
#include "fdforge/formula.hpp"
#include "fdforge/rational.hpp"

namespace fdforge {

/// Dense row-major matrix.
template <typename T>
class Grid {
public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  [[nodiscard]] Grid transposed() const {
    Grid t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

struct TaylorMatrix {
  Dimensions dims;
  Grid<Rational> entries;  // (k+s) x k
};

/// Non-identity block B of RREF(A^T) = [I_k, B], plus its double image for the hot path.
struct EchelonBlock {
  Dimensions dims;
  Grid<Rational> b;  // k x s
  Grid<double> b_float;
};

/// Closed-form Taylor matrix entry, 0-based row u and column v.
inline Rational taylor_entry(int u, int v) {
  const unsigned power = static_cast<unsigned>(v + 2);
  const BigInt denom = factorial(power);
  if (u == 0) return make_rational(1, denom);
  BigInt num = boost::multiprecision::pow(BigInt(u), power);
  if (power % 2 == 1) num = -num;
  return make_rational(num, denom);
}

inline TaylorMatrix build_taylor_matrix(const Dimensions& dims) {
  if (dims.k < 1 || dims.s < 1) throw InvalidDimensions("build_taylor_matrix: k and s must be positive");
  TaylorMatrix a{dims, Grid<Rational>(static_cast<std::size_t>(dims.degree()), static_cast<std::size_t>(dims.k))};
  for (int u = 0; u < dims.degree(); ++u)
    for (int v = 0; v < dims.k; ++v) a.entries(static_cast<std::size_t>(u), static_cast<std::size_t>(v)) = taylor_entry(u, v);
  return a;
}

struct RrefResult {
  Grid<Rational> reduced;
  std::vector<std::size_t> pivots;
};

/// Exact Gauss-Jordan reduction to reduced row echelon form.
inline RrefResult rref(Grid<Rational> m) {
  RrefResult out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t pivot = row;
    while (pivot < m.rows() && m(pivot, col) == 0) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != row)
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(pivot, c), m(row, c));
    const Rational inv = 1 / m(row, col);
    for (std::size_t c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col) == 0) continue;
      const Rational factor = m(r, col);
      for (std::size_t c = col; c < m.cols(); ++c) m(r, c) -= factor * m(row, c);
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = std::move(m);
  return out;
}

/// Reduces A^T and extracts B from [I_k, B], verifying rank and pivot placement.
inline EchelonBlock reduce_to_echelon(const TaylorMatrix& a) {
  const std::size_t k = a.entries.cols();
  const std::size_t n = a.entries.rows();
  if (k == 0 || n <= k) throw InvalidDimensions("reduce_to_echelon: matrix must have more rows than columns");

  RrefResult r = rref(a.entries.transposed());
  if (r.pivots.size() < k) {
    throw RankDeficient("Taylor matrix has rank " + std::to_string(r.pivots.size()) + " < k=" + std::to_string(k));
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (r.pivots[i] != i) {
      throw PivotDisplacement("RREF pivot " + std::to_string(i) + " lies in column " + std::to_string(r.pivots[i]));
    }
  }

  const std::size_t s = n - k;
  EchelonBlock block{a.dims, Grid<Rational>(k, s), Grid<double>(k, s)};
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      block.b(i, j) = r.reduced(i, k + j);
      block.b_float(i, j) = to_double(block.b(i, j));
    }
  }
  return block;
}

/// Per-dims cache of echelon blocks. Safe for concurrent use.
inline std::shared_ptr<const EchelonBlock> echelon_block(const Dimensions& dims) {
  static std::mutex mutex;
  static std::map<Dimensions, std::shared_ptr<const EchelonBlock>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(dims); it != cache.end()) return it->second;
  }
  // Built outside the lock; a racing duplicate build is discarded below.
  auto block = std::make_shared<const EchelonBlock>(reduce_to_echelon(build_taylor_matrix(dims)));
  std::lock_guard lock(mutex);
  auto [it, inserted] = cache.emplace(dims, std::move(block));
  return it->second;
}

namespace detail {

inline const Grid<double>& block_entries(const EchelonBlock& block, double) { return block.b_float; }
inline const Grid<Rational>& block_entries(const EchelonBlock& block, const Rational&) { return block.b; }

inline bool is_zero_vector(std::span<const double> y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; });
}
inline bool is_zero_vector(std::span<const Rational> y) {
  return std::all_of(y.begin(), y.end(), [](const Rational& v) { return v == 0; });
}

inline bool first_entry_vanishes(const std::vector<double>& q) {
  double norm = 0.0;
  for (double v : q) norm = std::max(norm, std::abs(v));
  return !(std::abs(q.front()) >= 1e-12 * norm);
}
inline bool first_entry_vanishes(const std::vector<Rational>& q) { return q.front() == 0; }

}  // namespace detail

/// Normalized left null vector q = (-B y, y) / q_0 of A.
template <typename Scalar>
std::vector<Scalar> seed_to_nullvector(const EchelonBlock& block, std::span<const Scalar> y) {
  const auto& b = detail::block_entries(block, Scalar{});
  if (y.size() != b.cols()) {
    throw InvalidSeed("seed length " + std::to_string(y.size()) + " does not match s=" + std::to_string(b.cols()));
  }
  if (detail::is_zero_vector(y)) throw InvalidSeed("seed must be nonzero");

  std::vector<Scalar> q(b.rows() + b.cols());
  for (std::size_t i = 0; i < b.rows(); ++i) {
    Scalar acc{};
    for (std::size_t j = 0; j < b.cols(); ++j) acc += b(i, j) * y[j];
    q[i] = -acc;
  }
  std::copy(y.begin(), y.end(), q.begin() + static_cast<std::ptrdiff_t>(b.rows()));

  if (detail::first_entry_vanishes(q)) throw NonNormalizableSeed("seed yields a null vector with zero first entry");
  const Scalar lead = q.front();
  for (auto& v : q) v /= lead;
  return q;
}

/// p = (1, -sum q, q_1, ..., q_{n-1}) and c = 1 - sum_i i * q_i.
template <typename Scalar>
BasicFormula<Scalar> nullvector_to_formula(std::span<const Scalar> q, const Dimensions& dims) {
  if (q.size() != static_cast<std::size_t>(dims.degree())) {
    throw InvalidSeed("null vector length does not match k+s");
  }
  BasicFormula<Scalar> f{dims, std::vector<Scalar>(q.size() + 1), Scalar(1)};
  Scalar sum{};
  for (const auto& v : q) sum += v;
  f.p[0] = Scalar(1);
  f.p[1] = -sum;
  for (std::size_t i = 1; i < q.size(); ++i) {
    f.p[i + 1] = q[i];
    f.c -= Scalar(static_cast<int>(i)) * q[i];
  }
  return f;
}

template <typename Scalar>
BasicFormula<Scalar> seed_to_formula(const EchelonBlock& block, std::span<const Scalar> y) {
  const auto q = seed_to_nullvector<Scalar>(block, y);
  return nullvector_to_formula<Scalar>(std::span<const Scalar>(q), block.dims);
}

inline DifferenceFormula seed_to_formula(const Dimensions& dims, std::span<const double> y) {
  return seed_to_formula<double>(*echelon_block(dims), y);
}

inline ExactFormula seed_to_formula(const Dimensions& dims, std::span<const Rational> y) {
  return seed_to_formula<Rational>(*echelon_block(dims), y);
}

/// Exact formula for a floating seed, using the exact binary value of each entry.
inline ExactFormula seed_to_exact_formula(const Dimensions& dims, std::span<const double> y) {
  std::vector<Rational> exact;
  exact.reserve(y.size());
  for (double v : y) exact.push_back(exact_rational(v));
  return seed_to_formula(dims, std::span<const Rational>(exact));
}

/// Row vector q^T A; zero for every valid null vector.
template <typename Scalar>
std::vector<Scalar> left_product(std::span<const Scalar> q, const TaylorMatrix& a) {
  std::vector<Scalar> out(a.entries.cols());
  for (std::size_t v = 0; v < a.entries.cols(); ++v) {
    Scalar acc{};
    for (std::size_t u = 0; u < a.entries.rows(); ++u) {
      if constexpr (std::is_same_v<Scalar, Rational>) {
        acc += q[u] * a.entries(u, v);
      } else {
        acc += q[u] * static_cast<Scalar>(to_double(a.entries(u, v)));
      }
    }
    out[v] = acc;
  }
  return out;
}

}  // namespace fdforge
