#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace genresrc {

// Random projection R^n -> R^m. Fully determined by (m, n, seed, kind).
struct MeasurementMatrix {
  Eigen::MatrixXd entries;
  std::uint64_t seed = 0;

  Eigen::Index rows() const noexcept { return entries.rows(); }
  Eigen::Index cols() const noexcept { return entries.cols(); }
};

// Entries i.i.d. N(0, 1/m). Requires 1 <= m < n.
MeasurementMatrix gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed);

// Each row selects one distinct coordinate, chosen uniformly without
// replacement.
MeasurementMatrix coordinate_subsample_matrix(std::size_t m, std::size_t n, std::uint64_t seed);

Eigen::VectorXd project(const MeasurementMatrix& phi, std::span<const double> v);
Eigen::VectorXd project(const MeasurementMatrix& phi, const Eigen::VectorXd& v);

// v / ||v||_2; throws ZeroVector when ||v||_2 == 0.
Eigen::VectorXd normalize_l2(const Eigen::VectorXd& v);

struct SparseSolution {
  Eigen::VectorXd coefficients;
  std::vector<Eigen::Index> support;  // selection order for OMP, ascending for ISTA
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  // OMP: a least-squares step was singular and the minimum-norm solution
  // was used instead.
  bool rank_deficient = false;
  // ISTA: false when max_iter was reached before the tolerance.
  bool converged = true;
  // OMP: residual norm after each iteration. ISTA: objective after each
  // iteration.
  std::vector<double> trace;
};

// Throws BadColumns unless every column has unit l2 norm within `tol`.
void check_unit_columns(const Eigen::MatrixXd& a, double tol = 1e-9);

struct OmpStep {
  std::size_t iteration;
  const std::vector<Eigen::Index>& support;
  const Eigen::VectorXd& residual;
};
using OmpObserver = std::function<void(const OmpStep&)>;

// Orthogonal Matching Pursuit. Greedy selection of argmax |<r, A_j>| (lowest
// index on ties), least-squares refit on the support, stop after k_max atoms
// or once ||r|| <= tol * ||y||.
SparseSolution omp(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, std::size_t k_max,
                   double tol = 1e-6, const OmpObserver& observer = {});

// Upper bound on sigma_max(A)^2 from power iteration, capped by ||A||_F^2.
double lipschitz_bound(const Eigen::MatrixXd& a);

// Iterative shrinkage-thresholding on 0.5 ||y - Ax||^2 + lambda ||x||_1 with
// step 1 / lipschitz_bound(A).
SparseSolution ista_l1(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double lambda,
                       std::size_t max_iter = 1000, double tol = 1e-8);

}  // namespace genresrc
