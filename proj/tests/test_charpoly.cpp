#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "fdforge/charpoly.hpp"
#include "fdforge/validation.hpp"

using namespace fdforge;

namespace {

// Independent route: eigenvalues of the companion matrix.
std::vector<Complex> companion_roots(const std::vector<double>& p) {
  const int n = static_cast<int>(p.size()) - 1;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) c(0, j) = -p[static_cast<std::size_t>(j + 1)] / p[0];
  for (int i = 1; i < n; ++i) c(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(c, false);
  std::vector<Complex> out;
  for (int i = 0; i < n; ++i) out.push_back(solver.eigenvalues()[i]);
  return out;
}

std::vector<double> expand(const std::vector<Complex>& roots, double lead) {
  std::vector<Complex> c{lead};
  for (const auto& z : roots) {
    std::vector<Complex> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= c[i] * z;
    }
    c = std::move(next);
  }
  std::vector<double> out;
  for (const auto& v : c) out.push_back(v.real());
  return out;
}

double norm1(const std::vector<double>& p) {
  double s = 0.0;
  for (double v : p) s += std::abs(v);
  return s;
}

Complex eval(const std::vector<double>& p, Complex z) {
  Complex acc = 0.0;
  for (double v : p) acc = acc * z + v;
  return acc;
}

}  // namespace

TEST(FindRoots, EulerPolynomial) {
  auto roots = find_roots(std::vector<double>{1, 0, -1});
  sort_by_magnitude(roots);
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0].real(), 1.0, 1e-14);
  EXPECT_NEAR(roots[1].real(), -1.0, 1e-14);
  EXPECT_NEAR(roots[0].imag(), 0.0, 1e-14);
  EXPECT_NEAR(roots[1].imag(), 0.0, 1e-14);
}

TEST(FindRoots, DoubleRootAtOne) {
  const auto roots = find_roots(std::vector<double>{1, -2, 1});
  ASSERT_EQ(roots.size(), 2u);
  for (const auto& z : roots) EXPECT_LT(std::abs(z - 1.0), 1e-7);
}

TEST(FindRoots, FormulaEPolynomial) {
  const auto report = analyze(std::vector<double>{1, 0.125, -0.75, -0.625, 0.25});
  EXPECT_NEAR(report.max_magnitude, 1.0, 1e-12);
  EXPECT_NEAR(report.second_magnitude, 0.9025, 5e-4);
}

TEST(FindRoots, ZeroRootsAndLinear) {
  auto roots = find_roots(std::vector<double>{2, -6, 0, 0});
  sort_by_magnitude(roots);
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NEAR(roots[0].real(), 3.0, 1e-14);
  EXPECT_EQ(roots[1], Complex(0, 0));
  EXPECT_EQ(roots[2], Complex(0, 0));
}

TEST(FindRoots, DegenerateInput) {
  EXPECT_THROW(find_roots(std::vector<double>{0, 1, 2}), DegenerateInput);
  EXPECT_THROW(find_roots(std::vector<double>{3}), DegenerateInput);
  EXPECT_THROW(find_roots(std::vector<double>{}), DegenerateInput);
  EXPECT_THROW(find_roots(std::vector<double>{1, NAN}), DegenerateInput);
}

TEST(FindRoots, ResidualBoundAndReconstruction) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 300; ++trial) {
    const int degree = 2 + trial % 13;
    std::vector<double> p(static_cast<std::size_t>(degree + 1));
    for (auto& v : p) v = normal(rng);
    const auto roots = find_roots(p);
    ASSERT_EQ(roots.size(), static_cast<std::size_t>(degree));
    for (const auto& z : roots) {
      const double bound = 1e-8 * norm1(p) * std::pow(std::max(1.0, std::abs(z)), degree);
      EXPECT_LE(std::abs(eval(p, z)), bound);
    }
    const auto back = expand(roots, p[0]);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(back[i], p[i], 1e-6 * norm1(p));
  }
}

TEST(FindRoots, AgreesWithCompanionEigenvalues) {
  std::mt19937_64 rng(5);
  for (int k = 1; k <= 6; ++k) {
    for (int s = k; s <= k + 2; ++s) {
      for (int trial = 0; trial < 10; ++trial) {
        std::normal_distribution<double> normal;
        std::vector<double> y(static_cast<std::size_t>(s));
        for (auto& v : y) v = normal(rng);
        const auto f = seed_to_formula(Dimensions{k, s}, y);
        auto ours = find_roots(f.p);
        auto theirs = companion_roots(f.p);
        sort_by_magnitude(ours);
        sort_by_magnitude(theirs);
        // Compare magnitudes; those carry the convergence decision.
        for (std::size_t i = 0; i < ours.size(); ++i)
          EXPECT_NEAR(std::abs(ours[i]), std::abs(theirs[i]), 1e-6 * std::max(1.0, std::abs(theirs[i])));
      }
    }
  }
}

TEST(Analyze, KnownVerdicts) {
  EXPECT_TRUE(analyze(std::vector<double>{2, -3, 2, -1}).convergent);
  const auto euler = analyze(std::vector<double>{1, 0, -1});
  EXPECT_TRUE(euler.convergent);
  EXPECT_EQ(euler.on_circle.size(), 2u);
  EXPECT_FALSE(analyze(std::vector<double>{1, -2, 1}).convergent);
  // Root 1.1 outside the disk.
  const auto outside = analyze(std::vector<double>{1, -2.1, 1.1});
  EXPECT_FALSE(outside.convergent);
  EXPECT_NEAR(outside.max_magnitude, 1.1, 1e-12);
}

TEST(Analyze, ReportFields) {
  const auto r = analyze(std::vector<double>{1, 0.125, -0.75, -0.625, 0.25});
  ASSERT_EQ(r.roots.size(), 4u);
  for (std::size_t i = 1; i < r.roots.size(); ++i) EXPECT_GE(std::abs(r.roots[i - 1]), std::abs(r.roots[i]));
  EXPECT_EQ(r.max_magnitude, std::abs(r.roots.front()));
  EXPECT_EQ(r.max_deviation, r.max_magnitude - 1.0);
  EXPECT_EQ(r.on_circle, (std::vector<std::size_t>{0}));
  EXPECT_TRUE(r.convergent);
}

TEST(Analyze, RepeatedCircleRootWithinCluster) {
  // (x^2 + 1)^2: repeated roots at +-i on the circle.
  const auto r = analyze(std::vector<double>{1, 0, 2, 0, 1});
  EXPECT_FALSE(r.convergent);
}

TEST(Analyze, ScalingInvariance) {
  std::mt19937_64 rng(17);
  for (const auto& e : catalog()) {
    std::vector<double> p(e.char_poly.begin(), e.char_poly.end());
    const auto base = analyze(p);
    for (double alpha : {-2.5, 0.001, 37.0}) {
      std::vector<double> q;
      for (double v : p) q.push_back(alpha * v);
      const auto scaled = analyze(q);
      EXPECT_EQ(scaled.convergent, base.convergent);
      EXPECT_NEAR(scaled.max_magnitude, base.max_magnitude, 1e-12);
      EXPECT_NEAR(scaled.second_magnitude, base.second_magnitude, 1e-12);
      EXPECT_EQ(scaled.on_circle.size(), base.on_circle.size());
    }
  }
}

TEST(Objective, ConvergentSeeds) {
  EXPECT_NEAR(objective(Dimensions{2, 2}, std::vector<double>{-5, 2}), 1.0, 1e-9);
  EXPECT_NEAR(objective(Dimensions{3, 3}, std::vector<double>{1, 110, -40}), 1.0, 1e-9);
}

TEST(Objective, PenaltyForUnusableSeeds) {
  EXPECT_EQ(objective(Dimensions{2, 2}, std::vector<double>{-9, 2}), kSeedPenalty);
  EXPECT_EQ(objective(Dimensions{2, 2}, std::vector<double>{0, 0}), kSeedPenalty);
  EXPECT_EQ(objective(Dimensions{2, 2}, std::vector<double>{-9, 2}, 42.0), 42.0);
}

TEST(Objective, FloorAtOne) {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> normal;
  int evaluated = 0;
  for (int k = 1; k <= 6; ++k) {
    for (int s = k; s <= k + 2; ++s) {
      for (int trial = 0; trial < 56; ++trial) {
        std::vector<double> y(static_cast<std::size_t>(s));
        for (auto& v : y) v = normal(rng);
        EXPECT_GE(objective(Dimensions{k, s}, y), 1.0 - 1e-9);
        ++evaluated;
      }
    }
  }
  EXPECT_GE(evaluated, 1000);
}
