#include "genresrc/src_classifier.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "genresrc/csv.hpp"
#include "genresrc/error.hpp"

namespace genresrc {

std::string_view to_string(SolverKind kind) noexcept {
  return kind == SolverKind::Omp ? "omp" : "ista";
}

std::string_view to_string(MeasurementMode mode) noexcept {
  return mode == MeasurementMode::Gaussian ? "gaussian" : "coordinate_subsample";
}

SolverKind parse_solver_kind(std::string_view text) {
  if (text == "omp") return SolverKind::Omp;
  if (text == "ista") return SolverKind::Ista;
  throw Error(ErrorCode::BadConfig, "unknown solver '" + std::string(text) + "'");
}

MeasurementMode parse_measurement_mode(std::string_view text) {
  if (text == "gaussian") return MeasurementMode::Gaussian;
  if (text == "coordinate_subsample") return MeasurementMode::CoordinateSubsample;
  throw Error(ErrorCode::BadConfig, "unknown measurement mode '" + std::string(text) + "'");
}

Dictionary build_dictionary(std::span<const FeatureVector> features, std::span<const int> labels,
                            std::vector<std::string> classes, std::size_t m, std::uint64_t seed,
                            MeasurementMode measurement, std::string config_fingerprint) {
  if (features.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "features and labels differ in length");
  }
  if (classes.empty()) throw Error(ErrorCode::EmptyClass, "no classes");
  const int n_classes = static_cast<int>(classes.size());

  std::vector<std::vector<std::size_t>> members(classes.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes) {
      throw Error(ErrorCode::UnknownLabel, features[i].clip_id + ": label index " +
                                               std::to_string(labels[i]) + " out of range");
    }
    members[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (members[c].empty()) {
      throw Error(ErrorCode::EmptyClass, "class '" + classes[c] + "' has no training samples");
    }
  }
  const std::size_t n = features.front().values.size();
  for (const auto& f : features) {
    if (f.values.size() != n) {
      throw Error(ErrorCode::DimensionMismatch, f.clip_id + ": feature dimension " +
                                                    std::to_string(f.values.size()) + " != " +
                                                    std::to_string(n));
    }
  }

  Dictionary dict;
  dict.measurement = measurement;
  dict.phi = measurement == MeasurementMode::Gaussian ? gaussian_matrix(m, n, seed)
                                                      : coordinate_subsample_matrix(m, n, seed);
  dict.config_fingerprint = std::move(config_fingerprint);
  dict.classes = std::move(classes);
  dict.atoms.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(features.size()));
  dict.labels.reserve(features.size());
  dict.atom_ids.reserve(features.size());

  Eigen::Index col = 0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    dict.class_offsets.push_back({col, static_cast<Eigen::Index>(members[c].size())});
    for (std::size_t i : members[c]) {
      const Eigen::VectorXd measured = project(dict.phi, features[i].values);
      if (!(measured.norm() > 0.0)) {
        throw Error(ErrorCode::ZeroVector, features[i].clip_id + ": feature measures to zero");
      }
      dict.atoms.col(col++) = normalize_l2(measured);
      dict.labels.push_back(static_cast<int>(c));
      dict.atom_ids.push_back(features[i].clip_id);
    }
  }
  return dict;
}

Eigen::VectorXd measure(const Dictionary& dict, const FeatureVector& feature) {
  const Eigen::VectorXd measured = project(dict.phi, feature.values);
  if (!(measured.norm() > 0.0)) {
    throw Error(ErrorCode::ZeroVector, feature.clip_id + ": feature measures to zero");
  }
  return normalize_l2(measured);
}

SparseSolution sparse_code(const Dictionary& dict, const Eigen::VectorXd& y,
                           const ClassifierConfig& cfg) {
  if (cfg.solver == SolverKind::Ista) return ista_l1(dict.atoms, y, cfg.lambda, cfg.max_iter);
  return omp(dict.atoms, y, cfg.k_max, cfg.tol);
}

SparseSolution sparse_code(const Dictionary& dict, const FeatureVector& feature,
                           const ClassifierConfig& cfg) {
  return sparse_code(dict, measure(dict, feature), cfg);
}

std::vector<double> class_residuals(const Dictionary& dict, const Eigen::VectorXd& y,
                                    const SparseSolution& sol) {
  if (sol.coefficients.size() != dict.n_atoms()) {
    throw Error(ErrorCode::DimensionMismatch, "solution has " + std::to_string(sol.coefficients.size()) +
                                                  " coefficients, dictionary has " +
                                                  std::to_string(dict.n_atoms()) + " atoms");
  }
  if (y.size() != dict.atoms.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "measured vector length mismatch");
  }
  std::vector<double> residuals;
  residuals.reserve(dict.class_offsets.size());
  for (const auto& block : dict.class_offsets) {
    const Eigen::VectorXd approx = dict.atoms.middleCols(block.begin, block.count) *
                                   sol.coefficients.segment(block.begin, block.count);
    residuals.push_back((y - approx).norm());
  }
  return residuals;
}

ClassificationResult classify(const Dictionary& dict, const FeatureVector& feature,
                              const ClassifierConfig& cfg) {
  const Eigen::VectorXd y = measure(dict, feature);
  ClassificationResult result;
  result.solution = sparse_code(dict, y, cfg);
  result.residuals = class_residuals(dict, y, result.solution);

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.residuals.size(); ++i) {
    if (result.residuals[i] < result.residuals[best]) best = i;
  }
  double runner_up = result.residuals[best];
  bool have_runner_up = false;
  for (std::size_t i = 0; i < result.residuals.size(); ++i) {
    if (i == best) continue;
    if (!have_runner_up || result.residuals[i] < runner_up) runner_up = result.residuals[i];
    have_runner_up = true;
  }
  result.predicted = static_cast<int>(best);
  result.predicted_label = dict.classes[best];
  result.margin = have_runner_up ? runner_up - result.residuals[best] : 0.0;
  return result;
}

// ---- persistence ----------------------------------------------------------------

namespace {

void write_matrix(std::ostream& out, const Eigen::MatrixXd& mat) {
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j) {
      if (j) out << ',';
      out << csv::format_double17(mat(i, j));
    }
    out << '\n';
  }
}

std::string join_csv(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += csv::escape(items[i]);
  }
  return out;
}

[[noreturn]] void bad_model(const std::string& what) {
  throw Error(ErrorCode::BadModel, "model file: " + what);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t parse_count(const std::string& text, const char* key) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(text, &pos);
    if (pos != text.size()) bad_model(std::string("bad integer for ") + key);
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    bad_model(std::string("bad integer for ") + key);
  }
}

bool parse_bool(const std::string& text, const char* key) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  bad_model(std::string("bad boolean for ") + key);
}

Eigen::MatrixXd read_matrix(std::istream& in, Eigen::Index rows, Eigen::Index cols, const char* what) {
  Eigen::MatrixXd mat(rows, cols);
  std::string line;
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) bad_model(std::string("truncated ") + what + " block");
    const auto fields = csv::split(line);
    if (static_cast<Eigen::Index>(fields.size()) != cols) {
      bad_model(std::string(what) + " row " + std::to_string(i) + " has " +
                std::to_string(fields.size()) + " values, expected " + std::to_string(cols));
    }
    for (Eigen::Index j = 0; j < cols; ++j) mat(i, j) = csv::parse_double(fields[static_cast<std::size_t>(j)]);
  }
  return mat;
}

void expect_line(std::istream& in, const char* expected) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != expected) {
    bad_model(std::string("expected '") + expected + "'");
  }
}

}  // namespace

void save_model(std::ostream& out, const SrcModel& model) {
  const auto& d = model.dict;
  const auto& c = model.classifier;
  const auto& f = model.feature;
  out << "srcm " << kModelFormatVersion << '\n';
  out << "m = " << d.atoms.rows() << '\n';
  out << "n = " << d.phi.cols() << '\n';
  out << "n_atoms = " << d.atoms.cols() << '\n';
  out << "classes = " << join_csv(d.classes) << '\n';
  out << "seed = " << d.phi.seed << '\n';
  out << "k_max = " << c.k_max << '\n';
  out << "tol = " << csv::format_double(c.tol) << '\n';
  out << "solver = " << to_string(c.solver) << '\n';
  out << "lambda = " << csv::format_double(c.lambda) << '\n';
  out << "max_iter = " << c.max_iter << '\n';
  out << "measurement_mode = " << to_string(d.measurement) << '\n';
  out << "config_fingerprint = " << d.config_fingerprint << '\n';
  out << "feature.window_len_s = " << csv::format_double(f.frame.window_len_s) << '\n';
  out << "feature.hop_fraction = " << csv::format_double(f.frame.hop_fraction) << '\n';
  out << "feature.second_fft_len = " << f.second_fft_len << '\n';
  out << "feature.keep_k = " << f.keep_k << '\n';
  out << "feature.drop_dc = " << (f.drop_dc ? "true" : "false") << '\n';
  out << "feature.concat_short_term = " << (f.concat_short_term ? "true" : "false") << '\n';
  out << "feature.mode = " << to_string(f.mode) << '\n';
  out << "[phi]\n";
  write_matrix(out, d.phi.entries);
  out << "[atoms]\n";
  write_matrix(out, d.atoms);
  out << "[labels]\n";
  out << "column,label,clip_id\n";
  for (Eigen::Index j = 0; j < d.atoms.cols(); ++j) {
    const auto i = static_cast<std::size_t>(j);
    out << j << ',' << csv::escape(d.classes[static_cast<std::size_t>(d.labels[i])]) << ','
        << csv::escape(d.atom_ids[i]) << '\n';
  }
}

SrcModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "srcm " + std::to_string(kModelFormatVersion)) {
    bad_model("missing 'srcm " + std::to_string(kModelFormatVersion) + "' header");
  }
  std::map<std::string, std::string> kv;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t == "[phi]") break;
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) bad_model("malformed header line '" + t + "'");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  auto get = [&kv](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) bad_model(std::string("missing key '") + key + "'");
    return it->second;
  };

  SrcModel model;
  auto& c = model.classifier;
  auto& f = model.feature;
  auto& d = model.dict;
  const auto m = static_cast<Eigen::Index>(parse_count(get("m"), "m"));
  const auto n = static_cast<Eigen::Index>(parse_count(get("n"), "n"));
  const auto n_atoms = static_cast<Eigen::Index>(parse_count(get("n_atoms"), "n_atoms"));
  d.classes = csv::split(get("classes"));
  c.seed = parse_count(get("seed"), "seed");
  c.m = static_cast<std::size_t>(m);
  c.k_max = parse_count(get("k_max"), "k_max");
  c.tol = csv::parse_double(get("tol"));
  c.solver = parse_solver_kind(get("solver"));
  c.lambda = csv::parse_double(get("lambda"));
  c.max_iter = parse_count(get("max_iter"), "max_iter");
  c.measurement = parse_measurement_mode(get("measurement_mode"));
  d.measurement = c.measurement;
  d.config_fingerprint = get("config_fingerprint");
  f.frame.window_len_s = csv::parse_double(get("feature.window_len_s"));
  f.frame.hop_fraction = csv::parse_double(get("feature.hop_fraction"));
  f.second_fft_len = parse_count(get("feature.second_fft_len"), "feature.second_fft_len");
  f.keep_k = parse_count(get("feature.keep_k"), "feature.keep_k");
  f.drop_dc = parse_bool(get("feature.drop_dc"), "feature.drop_dc");
  f.concat_short_term = parse_bool(get("feature.concat_short_term"), "feature.concat_short_term");
  f.mode = parse_feature_mode(get("feature.mode"));
  if (fingerprint(f) != d.config_fingerprint) {
    bad_model("config_fingerprint does not match the stored feature settings");
  }
  if (trim(line) != "[phi]") bad_model("missing [phi] block");

  d.phi.seed = c.seed;
  d.phi.entries = read_matrix(in, m, n, "phi");
  expect_line(in, "[atoms]");
  d.atoms = read_matrix(in, m, n_atoms, "atoms");
  expect_line(in, "[labels]");
  expect_line(in, "column,label,clip_id");
  for (Eigen::Index j = 0; j < n_atoms; ++j) {
    if (!std::getline(in, line)) bad_model("truncated labels block");
    const auto fields = csv::split(line);
    if (fields.size() != 3 || fields[0] != std::to_string(j)) {
      bad_model("labels row " + std::to_string(j) + " malformed");
    }
    const auto it = std::find(d.classes.begin(), d.classes.end(), fields[1]);
    if (it == d.classes.end()) bad_model("unknown label '" + fields[1] + "'");
    const int label = static_cast<int>(it - d.classes.begin());
    if (!d.labels.empty() && label < d.labels.back()) bad_model("class columns are not contiguous");
    d.labels.push_back(label);
    d.atom_ids.push_back(fields[2]);
  }
  for (std::size_t cls = 0; cls < d.classes.size(); ++cls) {
    const auto first = std::find(d.labels.begin(), d.labels.end(), static_cast<int>(cls));
    const auto count = std::count(d.labels.begin(), d.labels.end(), static_cast<int>(cls));
    if (count == 0) bad_model("class '" + d.classes[cls] + "' has no atoms");
    d.class_offsets.push_back({static_cast<Eigen::Index>(first - d.labels.begin()),
                               static_cast<Eigen::Index>(count)});
  }
  try {
    check_unit_columns(d.atoms);
  } catch (const Error& e) {
    bad_model(e.what());
  }
  return model;
}

}  // namespace genresrc
