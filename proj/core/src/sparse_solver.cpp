#include "genresrc/sparse_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "genresrc/error.hpp"

namespace genresrc {

namespace {

void check_shape(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0 || m >= n) {
    throw Error(ErrorCode::BadShape, "measurement shape " + std::to_string(m) + "x" +
                                         std::to_string(n) + " requires 1 <= m < n");
  }
}

}  // namespace

MeasurementMatrix gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  check_shape(m, n);
  MeasurementMatrix phi;
  phi.seed = seed;
  phi.entries.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
  // Row-major fill so the stream order matches the persisted layout.
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    for (Eigen::Index j = 0; j < phi.cols(); ++j) phi.entries(i, j) = gauss(rng);
  }
  return phi;
}

MeasurementMatrix coordinate_subsample_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  check_shape(m, n);
  std::vector<Eigen::Index> coords(n);
  std::iota(coords.begin(), coords.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(coords.begin(), coords.end(), rng);
  coords.resize(m);
  std::sort(coords.begin(), coords.end());

  MeasurementMatrix phi;
  phi.seed = seed;
  phi.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) phi.entries(static_cast<Eigen::Index>(i), coords[i]) = 1.0;
  return phi;
}

Eigen::VectorXd project(const MeasurementMatrix& phi, std::span<const double> v) {
  if (static_cast<Eigen::Index>(v.size()) != phi.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "vector length " + std::to_string(v.size()) +
                                                  " != measurement columns " +
                                                  std::to_string(phi.cols()));
  }
  return phi.entries * Eigen::Map<const Eigen::VectorXd>(v.data(), phi.cols());
}

Eigen::VectorXd project(const MeasurementMatrix& phi, const Eigen::VectorXd& v) {
  return project(phi, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

Eigen::VectorXd normalize_l2(const Eigen::VectorXd& v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::ZeroVector, "cannot normalise a zero vector");
  return v / norm;
}

void check_unit_columns(const Eigen::MatrixXd& a, double tol) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double norm = a.col(j).norm();
    if (std::abs(norm - 1.0) > tol) {
      throw Error(ErrorCode::BadColumns, "column " + std::to_string(j) + " has norm " +
                                             std::to_string(norm) + ", expected 1");
    }
  }
}

SparseSolution omp(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, std::size_t k_max,
                   double tol, const OmpObserver& observer) {
  if (y.size() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "measurement length " + std::to_string(y.size()) +
                                                  " != dictionary rows " + std::to_string(a.rows()));
  }
  if (k_max < 1 || static_cast<Eigen::Index>(k_max) > a.rows()) {
    throw Error(ErrorCode::BadShape, "k_max must lie in [1, " + std::to_string(a.rows()) + "]");
  }
  check_unit_columns(a);

  const Eigen::Index n = a.cols();
  const auto budget = std::min<Eigen::Index>(static_cast<Eigen::Index>(k_max), n);
  const double y_norm = y.norm();
  const double stop = tol * y_norm;

  SparseSolution sol;
  sol.coefficients = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd residual = y;
  sol.residual_norm = y_norm;

  std::vector<char> selected(static_cast<std::size_t>(n), 0);
  Eigen::MatrixXd gram(budget, budget);
  Eigen::VectorXd rhs(budget);
  Eigen::VectorXd x_s;

  while (static_cast<Eigen::Index>(sol.support.size()) < budget && sol.residual_norm > stop) {
    const Eigen::VectorXd corr = a.transpose() * residual;
    Eigen::Index best = -1;
    double best_val = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (selected[static_cast<std::size_t>(j)]) continue;
      const double c = std::abs(corr(j));
      if (best < 0 || c > best_val) {
        best = j;
        best_val = c;
      }
    }
    // Residual orthogonal to every remaining atom: nothing left to explain.
    if (best < 0 || best_val == 0.0) break;

    const auto s = static_cast<Eigen::Index>(sol.support.size());
    sol.support.push_back(best);
    selected[static_cast<std::size_t>(best)] = 1;
    for (Eigen::Index i = 0; i < s; ++i) {
      const double g = a.col(sol.support[static_cast<std::size_t>(i)]).dot(a.col(best));
      gram(i, s) = g;
      gram(s, i) = g;
    }
    gram(s, s) = a.col(best).squaredNorm();
    rhs(s) = a.col(best).dot(y);

    const auto k = s + 1;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram.topLeftCorner(k, k));
    const auto d = ldlt.vectorD().cwiseAbs();
    const bool singular = ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
                          d.minCoeff() <= 1e-12 * d.maxCoeff();
    Eigen::MatrixXd a_s(a.rows(), k);
    for (Eigen::Index i = 0; i < k; ++i) a_s.col(i) = a.col(sol.support[static_cast<std::size_t>(i)]);
    if (singular) {
      x_s = a_s.completeOrthogonalDecomposition().solve(y);
      sol.rank_deficient = true;
    } else {
      x_s = ldlt.solve(rhs.head(k));
    }

    residual = y - a_s * x_s;
    sol.residual_norm = residual.norm();
    sol.trace.push_back(sol.residual_norm);
    ++sol.iterations;
    if (observer) observer(OmpStep{sol.iterations, sol.support, residual});
  }

  for (std::size_t i = 0; i < sol.support.size(); ++i) {
    sol.coefficients(sol.support[i]) = x_s(static_cast<Eigen::Index>(i));
  }
  return sol;
}

double lipschitz_bound(const Eigen::MatrixXd& a) {
  const double frob_sq = a.squaredNorm();
  if (a.cols() == 0 || frob_sq == 0.0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.cols()).normalized();
  double estimate = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd w = a.transpose() * (a * v);
    const double norm = w.norm();
    if (norm == 0.0) break;
    const double next = v.dot(w);
    v = w / norm;
    if (std::abs(next - estimate) <= 1e-10 * next) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return std::min(1.05 * estimate, frob_sq);
}

SparseSolution ista_l1(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double lambda,
                       std::size_t max_iter, double tol) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::BadConfig, "ISTA lambda must be positive");
  if (y.size() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "measurement length " + std::to_string(y.size()) +
                                                  " != dictionary rows " + std::to_string(a.rows()));
  }
  check_unit_columns(a);

  const double lip = lipschitz_bound(a);
  const double step = 1.0 / lip;
  const double shrink = lambda * step;

  SparseSolution sol;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  Eigen::VectorXd r = -y;  // A x - y
  sol.converged = false;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd z = x - step * (a.transpose() * r);
    const Eigen::VectorXd next = z.unaryExpr([shrink](double v) {
      return v > shrink ? v - shrink : (v < -shrink ? v + shrink : 0.0);
    });
    const double change = (next - x).cwiseAbs().maxCoeff();
    x = next;
    r = a * x - y;
    sol.trace.push_back(0.5 * r.squaredNorm() + lambda * x.lpNorm<1>());
    sol.iterations = it + 1;
    if (change < tol) {
      sol.converged = true;
      break;
    }
  }

  sol.coefficients = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) > 1e-8) {
      sol.support.push_back(i);
      sol.coefficients(i) = x(i);
    }
  }
  sol.residual_norm = r.norm();
  return sol;
}

}  // namespace genresrc
