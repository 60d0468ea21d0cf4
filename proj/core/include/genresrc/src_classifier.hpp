#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genresrc/feature_pipeline.hpp"
#include "genresrc/sparse_solver.hpp"

namespace genresrc {

enum class SolverKind { Omp, Ista };
enum class MeasurementMode { Gaussian, CoordinateSubsample };

std::string_view to_string(SolverKind kind) noexcept;
std::string_view to_string(MeasurementMode mode) noexcept;
SolverKind parse_solver_kind(std::string_view text);
MeasurementMode parse_measurement_mode(std::string_view text);

struct ClassifierConfig {
  std::size_t m = 35;       // measured dimension
  std::size_t k_max = 10;   // OMP sparsity budget
  double tol = 1e-6;        // OMP stop: ||r|| <= tol * ||y||
  SolverKind solver = SolverKind::Omp;
  double lambda = 0.01;     // ISTA only
  std::size_t max_iter = 2000;  // ISTA only
  MeasurementMode measurement = MeasurementMode::Gaussian;
  std::uint64_t seed = 1;
};

struct ClassBlock {
  Eigen::Index begin = 0;
  Eigen::Index count = 0;
};

// Measured, unit-normalised training features stacked column-wise. Columns
// of one class are contiguous and classes appear in `classes` order.
struct Dictionary {
  Eigen::MatrixXd atoms;
  std::vector<int> labels;
  std::vector<ClassBlock> class_offsets;
  MeasurementMatrix phi;
  MeasurementMode measurement = MeasurementMode::Gaussian;
  std::string config_fingerprint;
  std::vector<std::string> classes;
  std::vector<std::string> atom_ids;

  std::size_t n_classes() const noexcept { return classes.size(); }
  Eigen::Index n_atoms() const noexcept { return atoms.cols(); }
};

// labels[i] indexes `classes`. Every class needs at least one feature.
Dictionary build_dictionary(std::span<const FeatureVector> features, std::span<const int> labels,
                            std::vector<std::string> classes, std::size_t m, std::uint64_t seed,
                            MeasurementMode measurement = MeasurementMode::Gaussian,
                            std::string config_fingerprint = {});

// normalize_l2(project(phi, feature)).
Eigen::VectorXd measure(const Dictionary& dict, const FeatureVector& feature);

SparseSolution sparse_code(const Dictionary& dict, const Eigen::VectorXd& y,
                           const ClassifierConfig& cfg);
SparseSolution sparse_code(const Dictionary& dict, const FeatureVector& feature,
                           const ClassifierConfig& cfg);

// r_i = ||y - atoms * delta_i(x)||, delta_i keeping class-i coefficients only.
std::vector<double> class_residuals(const Dictionary& dict, const Eigen::VectorXd& y,
                                    const SparseSolution& sol);

struct ClassificationResult {
  int predicted = -1;
  std::string predicted_label;
  std::vector<double> residuals;
  SparseSolution solution;
  double margin = 0.0;  // second-smallest minus smallest residual
};

ClassificationResult classify(const Dictionary& dict, const FeatureVector& feature,
                              const ClassifierConfig& cfg);

// ---- model persistence (.srcm) -----------------------------------------------

struct SrcModel {
  Dictionary dict;
  ClassifierConfig classifier;
  FeatureConfig feature;
};

inline constexpr int kModelFormatVersion = 1;

void save_model(std::ostream& out, const SrcModel& model);
SrcModel load_model(std::istream& in);

}  // namespace genresrc
