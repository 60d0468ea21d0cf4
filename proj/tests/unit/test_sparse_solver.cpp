#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <set>

#include "genresrc/error.hpp"
#include "genresrc/sparse_solver.hpp"

using namespace genresrc;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a genresrc::Error";
  return ErrorCode::UsageError;
}

Eigen::MatrixXd unit_gaussian(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) a(i, j) = g(rng);
    a.col(j).normalize();
  }
  return a;
}

Eigen::MatrixXd orthonormal_columns(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  const Eigen::MatrixXd q = unit_gaussian(m, n, seed).householderQr().householderQ();
  return q.leftCols(n);
}

struct Planted {
  Eigen::VectorXd x;
  std::vector<Eigen::Index> support;
};

Planted plant(Eigen::Index n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  Planted p{Eigen::VectorXd::Zero(n), idx};
  for (auto i : idx) p.x(i) = g(rng);
  return p;
}

std::vector<Eigen::Index> sorted(std::vector<Eigen::Index> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(Gaussian, DeterministicPerSeed) {
  const auto a = gaussian_matrix(35, 513, 7);
  const auto b = gaussian_matrix(35, 513, 7);
  const auto c = gaussian_matrix(35, 513, 8);
  EXPECT_EQ(a.entries, b.entries);
  EXPECT_NE(a.entries, c.entries);
  EXPECT_EQ(a.rows(), 35);
  EXPECT_EQ(a.cols(), 513);
  EXPECT_EQ(a.seed, 7u);
}

TEST(Gaussian, SampleStatistics) {
  const auto phi = gaussian_matrix(64, 4096, 3);
  const double count = 64.0 * 4096.0;
  const double mean = phi.entries.sum() / count;
  const double var = (phi.entries.array() - mean).square().sum() / (count - 1);
  EXPECT_LT(std::abs(mean), 0.005);
  EXPECT_NEAR(var / (1.0 / 64.0), 1.0, 0.05);
}

TEST(Gaussian, Shapes) {
  EXPECT_EQ(gaussian_matrix(2, 3, 1).entries.size(), 6);
  EXPECT_EQ(code_of([] { gaussian_matrix(3, 3, 1); }), ErrorCode::BadShape);
  EXPECT_EQ(code_of([] { gaussian_matrix(0, 3, 1); }), ErrorCode::BadShape);
  EXPECT_EQ(code_of([] { gaussian_matrix(5, 3, 1); }), ErrorCode::BadShape);
}

TEST(CoordinateSubsample, PicksDistinctCoordinates) {
  const auto phi = coordinate_subsample_matrix(10, 50, 4);
  std::set<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    EXPECT_DOUBLE_EQ(phi.entries.row(i).sum(), 1.0);
    EXPECT_DOUBLE_EQ(phi.entries.row(i).cwiseAbs().maxCoeff(), 1.0);
    Eigen::Index j = 0;
    phi.entries.row(i).maxCoeff(&j);
    cols.insert(j);
  }
  EXPECT_EQ(cols.size(), 10u);
  EXPECT_EQ(code_of([] { coordinate_subsample_matrix(50, 50, 1); }), ErrorCode::BadShape);
}

TEST(Project, Linearity) {
  const auto phi = gaussian_matrix(5, 12, 2);
  EXPECT_EQ(project(phi, Eigen::VectorXd::Zero(12)), Eigen::VectorXd::Zero(5));
  Eigen::VectorXd a = Eigen::VectorXd::Random(12), b = Eigen::VectorXd::Random(12);
  EXPECT_LT((project(phi, Eigen::VectorXd(a + b)) - project(phi, a) - project(phi, b)).norm(), 1e-12);
  for (Eigen::Index j = 0; j < 12; ++j) {
    EXPECT_EQ(project(phi, Eigen::VectorXd::Unit(12, j)), phi.entries.col(j));
  }
  const std::vector<double> v(a.data(), a.data() + a.size());
  EXPECT_EQ(project(phi, v), project(phi, a));
  EXPECT_EQ(code_of([&] { project(phi, Eigen::VectorXd::Zero(11)); }), ErrorCode::DimensionMismatch);
}

TEST(NormalizeL2, Examples) {
  const auto u = normalize_l2(Eigen::Vector2d(3, 4));
  EXPECT_NEAR(u(0), 0.6, 1e-15);
  EXPECT_NEAR(u(1), 0.8, 1e-15);
  Eigen::VectorXd unit = Eigen::VectorXd::Random(9).normalized();
  EXPECT_LT((normalize_l2(unit) - unit).norm(), 1e-12);
  EXPECT_NEAR(normalize_l2(Eigen::VectorXd::Random(100) * 1e5).norm(), 1.0, 1e-12);
  EXPECT_EQ(code_of([] { normalize_l2(Eigen::Vector2d(0, 0)); }), ErrorCode::ZeroVector);
}

TEST(Omp, IdentityAtoms) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
  const auto sol = omp(a, Eigen::Vector4d(0, 3, 0, -2), 2);
  EXPECT_EQ(sol.coefficients, Eigen::Vector4d(0, 3, 0, -2));
  EXPECT_EQ(sol.residual_norm, 0.0);
  EXPECT_EQ(sol.support, (std::vector<Eigen::Index>{1, 3}));
}

TEST(Omp, ExactTwoSparseOnOrthonormalAtoms) {
  const auto a = orthonormal_columns(12, 8, 1);
  const Eigen::VectorXd y = 2.0 * a.col(1) - a.col(5);
  const auto sol = omp(a, y, 2);
  EXPECT_EQ(sorted(sol.support), (std::vector<Eigen::Index>{1, 5}));
  EXPECT_NEAR(sol.coefficients(1), 2.0, 1e-10);
  EXPECT_NEAR(sol.coefficients(5), -1.0, 1e-10);
  EXPECT_LT(sol.residual_norm, 1e-10);
}

TEST(Omp, SingleColumnRecoversItself) {
  const auto a = unit_gaussian(20, 60, 2);
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const auto sol = omp(a, a.col(j), 1);
    ASSERT_EQ(sol.support, std::vector<Eigen::Index>{j});
    EXPECT_NEAR(sol.coefficients(j), 1.0, 1e-10);
  }
}

TEST(Omp, TiesGoToLowestIndex) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  const auto sol = omp(a, Eigen::Vector3d(1, 1, 1), 1);
  EXPECT_EQ(sol.support, std::vector<Eigen::Index>{0});
}

TEST(Omp, PlantedRecovery) {
  int exact = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto a = unit_gaussian(64, 256, 1000 + t);
    const auto p = plant(256, 5, 2000 + t);
    const auto sol = omp(a, a * p.x, 5);
    exact += sorted(sol.support) == p.support;
  }
  EXPECT_GE(exact, 95);
}

TEST(Omp, StopsAtTolerance) {
  const auto a = unit_gaussian(30, 80, 3);
  const Eigen::VectorXd y = 0.7 * a.col(4) + 0.2 * a.col(9);
  const auto sol = omp(a, y, 10, 1e-6);
  EXPECT_LE(sol.support.size(), 3u);
  EXPECT_LE(sol.residual_norm, 1e-6 * y.norm());
  EXPECT_EQ(sol.iterations, sol.support.size());
}

TEST(Omp, IterationInvariants) {
  std::size_t violations = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    std::mt19937_64 rng(t);
    const Eigen::Index m = 8 + static_cast<Eigen::Index>(rng() % 30);
    const Eigen::Index n = m + 1 + static_cast<Eigen::Index>(rng() % 60);
    const auto a = unit_gaussian(m, n, 50 + t);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    std::normal_distribution<double> g;
    for (Eigen::Index i = 0; i < m; ++i) y(i) = g(rng);
    double prev = y.norm();
    std::set<Eigen::Index> seen;
    const auto sol = omp(a, y, static_cast<std::size_t>(std::min<Eigen::Index>(m, 12)), 1e-12,
                         [&](const OmpStep& step) {
                           const double r = step.residual.norm();
                           if (r > prev * (1 + 1e-12)) ++violations;
                           prev = r;
                           if (!seen.insert(step.support.back()).second) ++violations;
                           for (auto j : step.support) {
                             if (std::abs(step.residual.dot(a.col(j))) >= 1e-8) ++violations;
                           }
                         });
    EXPECT_EQ(sol.support.size(), seen.size());
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!seen.count(j)) {
        EXPECT_EQ(sol.coefficients(j), 0.0);
      }
    }
  }
  EXPECT_EQ(violations, 0u);
}

TEST(Omp, BruteForceComparisonAtTinyScale) {
  // Exhaustive best 2-column least-squares fit versus OMP's greedy pick.
  int same_support = 0, trials = 300;
  for (int t = 0; t < trials; ++t) {
    const auto a = unit_gaussian(6, 10, 700 + static_cast<std::uint64_t>(t));
    const Eigen::VectorXd y = Eigen::VectorXd::Random(6);
    double best = std::numeric_limits<double>::infinity();
    std::vector<Eigen::Index> best_s;
    for (Eigen::Index i = 0; i < 10; ++i) {
      for (Eigen::Index j = i + 1; j < 10; ++j) {
        Eigen::MatrixXd sub(6, 2);
        sub << a.col(i), a.col(j);
        const Eigen::VectorXd x = sub.colPivHouseholderQr().solve(y);
        const double r = (y - sub * x).norm();
        if (r < best) {
          best = r;
          best_s = {i, j};
        }
      }
    }
    const auto sol = omp(a, y, 2, 0.0);
    EXPECT_GE(sol.residual_norm, best - 1e-9);
    if (sorted(sol.support) == best_s) {
      ++same_support;
      EXPECT_NEAR(sol.residual_norm, best, 1e-9);
    }
  }
  RecordProperty("omp_matches_exhaustive", same_support);
  std::printf("OMP picked the exhaustive-optimal support in %d/%d instances\n", same_support, trials);
}

TEST(Omp, NearDuplicateColumnsFallBackToMinimumNorm) {
  // Column 0 is e1 tilted by 1e-9; it wins the first pick, then e1 itself is
  // the only atom left, and the 2x2 Gram matrix is numerically singular.
  Eigen::MatrixXd a(2, 2);
  a.col(0) = Eigen::Vector2d(1, 1e-9).normalized();
  a.col(1) = Eigen::Vector2d(1, 0);
  const Eigen::Vector2d y(1, 1);
  const auto sol = omp(a, y, 2, 0.0);
  EXPECT_EQ(sol.support.size(), 2u);
  EXPECT_TRUE(sol.rank_deficient);
  EXPECT_TRUE(std::isfinite(sol.residual_norm));
  EXPECT_LE(sol.residual_norm, y.norm());
  EXPECT_TRUE(sol.coefficients.allFinite());
}

TEST(Omp, Errors) {
  const auto a = unit_gaussian(5, 10, 1);
  EXPECT_EQ(code_of([&] { omp(a, Eigen::VectorXd::Ones(5), 0); }), ErrorCode::BadShape);
  EXPECT_EQ(code_of([&] { omp(a, Eigen::VectorXd::Ones(5), 6); }), ErrorCode::BadShape);
  EXPECT_EQ(code_of([&] { omp(a, Eigen::VectorXd::Ones(4), 2); }), ErrorCode::DimensionMismatch);
  Eigen::MatrixXd scaled = a;
  scaled.col(3) *= 1.01;
  EXPECT_EQ(code_of([&] { omp(scaled, Eigen::VectorXd::Ones(5), 2); }), ErrorCode::BadColumns);
}

TEST(Omp, ZeroMeasurement) {
  const auto a = unit_gaussian(5, 10, 1);
  const auto sol = omp(a, Eigen::VectorXd::Zero(5), 3);
  EXPECT_TRUE(sol.support.empty());
  EXPECT_EQ(sol.residual_norm, 0.0);
}

TEST(Ista, SoftThresholdWithUnitStep) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  const auto sol = ista_l1(a, Eigen::Vector2d(3, 0.5), 1.0, 1000, 1e-12);
  EXPECT_NEAR(sol.coefficients(0), 2.0, 1e-9);
  EXPECT_EQ(sol.coefficients(1), 0.0);
  EXPECT_EQ(sol.support, std::vector<Eigen::Index>{0});
}

TEST(Ista, SmallLambdaApproachesLeastSquares) {
  Eigen::MatrixXd a = unit_gaussian(40, 6, 5);
  const Eigen::VectorXd y = Eigen::VectorXd::Random(40);
  const Eigen::VectorXd ls = a.colPivHouseholderQr().solve(y);
  const auto sol = ista_l1(a, y, 1e-9, 20000, 1e-14);
  EXPECT_LT((sol.coefficients - ls).norm(), 1e-5 * (1 + ls.norm()));
}

TEST(Ista, ObjectiveNonIncreasing) {
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto a = unit_gaussian(20, 50, 300 + t);
    const Eigen::VectorXd y = Eigen::VectorXd::Random(20);
    const auto sol = ista_l1(a, y, 0.05, 500, 0.0);
    ASSERT_FALSE(sol.trace.empty());
    for (std::size_t i = 1; i < sol.trace.size(); ++i) {
      ASSERT_LE(sol.trace[i], sol.trace[i - 1] * (1 + 1e-12)) << "trial " << t << " iter " << i;
    }
    EXPECT_FALSE(sol.converged);
    EXPECT_EQ(sol.iterations, 500u);
  }
}

TEST(Ista, PlantedSupportSuperset) {
  int ok = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto a = unit_gaussian(64, 256, 1000 + t);
    const auto p = plant(256, 5, 2000 + t);
    const auto sol = ista_l1(a, a * p.x, 0.01, 5000, 1e-10);
    bool superset = true;
    for (auto i : p.support) superset = superset && std::abs(sol.coefficients(i)) > 1e-3;
    ok += superset;
  }
  EXPECT_GE(ok, 90);
}

TEST(Ista, LipschitzBoundIsUpperBound) {
  for (std::uint64_t t = 0; t < 10; ++t) {
    const auto a = unit_gaussian(15, 40, t);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const double s = svd.singularValues()(0);
    EXPECT_GE(lipschitz_bound(a), s * s);
    EXPECT_LE(lipschitz_bound(a), a.squaredNorm() + 1e-12);
  }
}

TEST(Ista, Errors) {
  const auto a = unit_gaussian(5, 10, 1);
  EXPECT_EQ(code_of([&] { ista_l1(a, Eigen::VectorXd::Ones(5), 0.0); }), ErrorCode::BadConfig);
  Eigen::MatrixXd scaled = a;
  scaled.col(0) *= 2.0;
  EXPECT_EQ(code_of([&] { ista_l1(scaled, Eigen::VectorXd::Ones(5), 0.1); }), ErrorCode::BadColumns);
}
