#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "genresrc/csv.hpp"
#include "genresrc/error.hpp"
#include "genresrc/parallel.hpp"
#include "run_config.hpp"

namespace genresrc::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kFeatureKeys{"window_len_s", "hop_fraction",      "second_fft_len",
                                            "keep_k",       "drop_dc",           "concat_short_term",
                                            "feature_mode"};
const std::vector<std::string> kClassifierKeys{"dim",    "k_max",    "tol",
                                               "solver", "lambda",   "max_iter",
                                               "measurement_mode", "seed"};

const std::map<std::string, std::string>& key_help() {
  static const std::map<std::string, std::string> help{
      {"window_len_s", "analysis window length in seconds"},
      {"hop_fraction", "hop as a fraction of the window"},
      {"second_fft_len", "padded length of the frame-sum transform (power of two)"},
      {"keep_k", "bins kept by the amplitude filter"},
      {"drop_dc", "zero bin 0 of the frame-sum spectrum"},
      {"concat_short_term", "append the filtered mean short-term spectrum"},
      {"feature_mode", "second_fft | stage2_only"},
      {"dim", "measured dimension m of the random projection"},
      {"k_max", "OMP sparsity budget"},
      {"tol", "OMP relative residual tolerance"},
      {"solver", "omp | ista"},
      {"lambda", "ISTA l1 weight"},
      {"max_iter", "ISTA iteration cap"},
      {"measurement_mode", "gaussian | coordinate_subsample"},
      {"seed", "seed for projection, folds, trials, and synthesis"},
      {"folds", "cross-validation folds"},
      {"trials", "random trials per training size"},
      {"jobs", "worker threads (results do not depend on it)"},
      {"snr", "comma-separated SNR list in dB"},
      {"sizes", "comma-separated training clips per class"},
      {"mode", "both | second_fft | stage2_only"},
      {"classes", "number of synthetic classes"},
      {"clips", "clips per synthetic class"},
      {"duration", "synthetic clip duration in seconds"},
      {"sample_rate", "synthetic sample rate in Hz"},
      {"corpus_snr", "noise floor of synthetic clips in dB SNR"},
  };
  return help;
}

std::string flag_name(const std::string& key) {
  std::string flag = "--" + key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  return flag;
}

// Registers one string-valued flag per config key; values are applied after
// the config file so that flags win.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void add(CLI::App* sub, const std::vector<std::string>& keys) {
    static const RunConfig defaults;
    for (const auto& key : keys) {
      auto* opt = sub->add_option(flag_name(key), values[key], key_help().at(key));
      opt->default_str(defaults.get(key));
      options[key] = opt;
    }
  }

  RunConfig resolve() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) cfg.set(key, values.at(key));
    }
    return cfg;
  }
};

std::vector<std::string> concat(std::initializer_list<std::vector<std::string>> parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::ofstream open_out(const std::string& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, path + ": cannot open for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, path + ": cannot open");
  return in;
}

// A directory is read as a dataset tree; a single file gets its parent
// directory name as label.
ClipSet input_clips(const std::string& input) {
  if (fs::is_directory(input)) return clip_set(scan_dataset(input));
  if (!fs::exists(input)) throw Error(ErrorCode::IoError, input + ": no such file or directory");
  ClipSet set;
  set.size = 1;
  set.classes = {fs::path(input).parent_path().filename().string()};
  set.labels = {0};
  set.load = [input](std::size_t) { return load_clip(input); };
  return set;
}

// ---- subcommands -------------------------------------------------------------------

int cmd_extract(const std::string& input, const std::string& out_path, const RunConfig& cfg,
                std::ostream& out) {
  const ClipSet clips = input_clips(input);
  const LabeledCorpus corpus = extract_corpus(clips, cfg.feature, cfg.harness.jobs);
  std::vector<LabeledFeature> rows;
  rows.reserve(corpus.features.size());
  for (std::size_t i = 0; i < corpus.features.size(); ++i) {
    rows.push_back({corpus.features[i], corpus.classes[static_cast<std::size_t>(corpus.labels[i])]});
  }
  auto file = open_out(out_path);
  write_feature_csv(file, rows);
  out << "extracted " << rows.size() << " feature vectors (dimension "
      << (rows.empty() ? 0 : rows.front().feature.values.size()) << ") to " << out_path << '\n';
  return 0;
}

int cmd_train(const std::string& features_path, const std::string& out_path, const RunConfig& cfg,
              std::ostream& out) {
  auto in = open_in(features_path);
  const auto rows = read_feature_csv(in);
  if (rows.empty()) throw Error(ErrorCode::EmptyDataset, features_path + ": no feature rows");
  const std::size_t dim = rows.front().feature.values.size();
  if (cfg.feature.mode == FeatureMode::SecondFft && !cfg.feature.concat_short_term &&
      dim != cfg.feature.second_fft_len / 2 + 1) {
    throw Error(ErrorCode::DimensionMismatch,
                features_path + ": feature dimension " + std::to_string(dim) +
                    " does not match second_fft_len " + std::to_string(cfg.feature.second_fft_len) +
                    "; pass the config used for extraction");
  }

  std::set<std::string> label_set;
  for (const auto& r : rows) label_set.insert(r.label);
  std::vector<std::string> classes(label_set.begin(), label_set.end());
  std::vector<FeatureVector> features;
  std::vector<int> labels;
  for (const auto& r : rows) {
    features.push_back(r.feature);
    labels.push_back(static_cast<int>(std::lower_bound(classes.begin(), classes.end(), r.label) -
                                      classes.begin()));
  }

  SrcModel model;
  model.feature = cfg.feature;
  model.classifier = cfg.classifier;
  model.dict = build_dictionary(features, labels, classes, cfg.classifier.m, cfg.classifier.seed,
                                cfg.classifier.measurement, fingerprint(cfg.feature));
  auto file = open_out(out_path);
  save_model(file, model);
  out << "trained " << model.dict.atoms.rows() << "x" << model.dict.atoms.cols() << " dictionary over "
      << classes.size() << " classes to " << out_path << '\n';
  return 0;
}

int cmd_classify(const std::string& model_path, const std::string& input, const std::string& out_path,
                 const RunConfig& cfg, std::ostream& out) {
  auto in = open_in(model_path);
  const SrcModel model = load_model(in);
  const ClipSet clips = input_clips(input);
  const bool labelled = fs::is_directory(input);

  std::vector<ClassificationResult> results(clips.size);
  std::vector<std::string> ids(clips.size);
  parallel_for(clips.size, cfg.harness.jobs, [&](std::size_t i) {
    const AudioClip clip = clips.load(i);
    ids[i] = clip.source_id;
    const FeatureVector fv = extract_features(clip, model.feature);
    if (static_cast<Eigen::Index>(fv.values.size()) != model.dict.phi.cols()) {
      throw Error(ErrorCode::DimensionMismatch,
                  clip.source_id + ": feature dimension " + std::to_string(fv.values.size()) +
                      " != model input dimension " + std::to_string(model.dict.phi.cols()) +
                      " (sample rate differs from training?)");
    }
    results[i] = classify(model.dict, fv, model.classifier);
  });

  std::ostringstream table;
  table << "clip_id,truth,predicted,margin";
  for (const auto& c : model.dict.classes) table << ",r_" << csv::escape(c);
  table << '\n';
  std::size_t correct = 0;
  for (std::size_t i = 0; i < clips.size; ++i) {
    const auto& r = results[i];
    const std::string truth =
        labelled ? clips.classes[static_cast<std::size_t>(clips.labels[i])] : std::string();
    if (labelled && truth == r.predicted_label) ++correct;
    table << csv::escape(ids[i]) << ',' << csv::escape(truth) << ',' << csv::escape(r.predicted_label)
          << ',' << csv::format_double(r.margin);
    for (double v : r.residuals) table << ',' << csv::format_double(v);
    table << '\n';

    out << ids[i] << ": predicted " << r.predicted_label << "  residuals";
    for (std::size_t c = 0; c < r.residuals.size(); ++c) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%.6f", r.residuals[c]);
      out << ' ' << model.dict.classes[c] << '=' << buf;
    }
    out << '\n';
  }
  if (labelled && clips.size > 0) {
    out << "accuracy against directory labels: " << correct << '/' << clips.size << '\n';
  }
  if (!out_path.empty()) {
    auto file = open_out(out_path);
    file << table.str();
  }
  return 0;
}

int cmd_evaluate(const std::string& dataset, const std::string& out_path, const RunConfig& cfg,
                 std::ostream& out) {
  const ClipSet clips = clip_set(scan_dataset(dataset));
  FeatureCache cache;
  const EvalReport report = cross_validate(clips, cfg.feature, cfg.classifier, cfg.harness, &cache);
  auto file = open_out(out_path);
  write_report_csv(file, report);
  out << summarize(report);
  return 0;
}

int cmd_learning_curve(const std::string& dataset, const std::string& out_path, const RunConfig& cfg,
                       std::ostream& out) {
  const ClipSet clips = clip_set(scan_dataset(dataset));
  std::vector<FeatureMode> modes;
  if (cfg.curve_mode == "both" || cfg.curve_mode == "second_fft") modes.push_back(FeatureMode::SecondFft);
  if (cfg.curve_mode == "both" || cfg.curve_mode == "stage2_only") modes.push_back(FeatureMode::Stage2Only);

  std::vector<LearningCurve> curves;
  for (FeatureMode mode : modes) {
    curves.push_back(learning_curve(clips, cfg.sizes, mode, cfg.feature, cfg.classifier, cfg.harness));
  }
  auto file = open_out(out_path);
  write_curve_csv(file, curves, config_snapshot(cfg.feature, cfg.classifier, cfg.harness));
  for (const auto& curve : curves) {
    out << to_string(curve.mode) << " error % by training clips per class:\n";
    for (const auto& p : curve.points) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "  %4zu  %6.2f +- %.2f\n", p.train_per_class, p.mean_error_pct,
                    p.stddev_error_pct);
      out << buf;
    }
  }
  return 0;
}

int cmd_noise_sweep(const std::string& dataset, const std::string& out_path, const RunConfig& cfg,
                    std::ostream& out) {
  const ClipSet clips = clip_set(scan_dataset(dataset));
  const NoiseReport report =
      noise_sweep(clips, cfg.snr_list, cfg.feature, cfg.classifier, cfg.harness);
  auto file = open_out(out_path);
  write_noise_csv(file, report, config_snapshot(cfg.feature, cfg.classifier, cfg.harness));
  char buf[128];
  std::snprintf(buf, sizeof(buf), "clean accuracy: %.2f%%\n", 100.0 * report.clean_accuracy);
  out << buf;
  for (const auto& p : report.points) {
    std::snprintf(buf, sizeof(buf), "  %6.1f dB  accuracy %6.2f%%  feature cosine %.4f\n", p.snr_db,
                  100.0 * p.accuracy_mean, p.cosine_mean);
    out << buf;
  }
  return 0;
}

int cmd_synth_corpus(const std::string& out_dir, const RunConfig& cfg, std::ostream& out) {
  const SyntheticCorpus corpus = synth_corpus(cfg.corpus);
  const auto written = write_corpus(corpus, out_dir);
  out << "wrote " << written.size() << " clips in " << corpus.classes.size() << " classes to "
      << out_dir << '\n';
  return 0;
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse second-FFT features and compressive-sampling sparse-representation "
               "classification for audio genre recognition"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "genresrc 0.1.0");

  std::string input, out_path, features_path, model_path, dataset;
  std::map<std::string, ConfigFlags> flags;

  auto add_config = [&](CLI::App* sub, const std::string& name, const std::vector<std::string>& keys) {
    auto& f = flags[name];
    sub->add_option("--config", f.config_path, "flat key = value config file")
        ->check(CLI::ExistingFile)
        ->default_str("none");
    f.add(sub, keys);
  };

  auto* extract = app.add_subcommand("extract", "extract feature vectors to CSV");
  extract->add_option("--input", input, "audio file or dataset directory")->required();
  extract->add_option("--out", out_path, "features CSV to write")->required();
  add_config(extract, "extract", concat({kFeatureKeys, {"jobs"}}));

  auto* train = app.add_subcommand("train", "build a dictionary model from a features CSV");
  train->add_option("--features", features_path, "features CSV from `extract`")->required();
  train->add_option("--out", out_path, "model file (.srcm) to write")->required();
  add_config(train, "train", concat({kFeatureKeys, kClassifierKeys}));

  auto* classify_cmd = app.add_subcommand("classify", "classify clips with a trained model");
  classify_cmd->add_option("--model", model_path, "model file (.srcm)")->required();
  classify_cmd->add_option("--input", input, "audio file or dataset directory")->required();
  classify_cmd->add_option("--out", out_path, "optional predictions CSV")->default_str("none");
  add_config(classify_cmd, "classify", {"jobs"});

  auto* evaluate = app.add_subcommand("evaluate", "stratified k-fold cross-validation");
  evaluate->add_option("--dataset", dataset, "dataset root (<root>/<class>/<file>)")->required();
  evaluate->add_option("--out", out_path, "report CSV to write")->default_str("report.csv");
  add_config(evaluate, "evaluate", concat({kFeatureKeys, kClassifierKeys, {"folds", "jobs"}}));

  auto* curve = app.add_subcommand("learning-curve", "error versus training clips per class");
  curve->add_option("--dataset", dataset, "dataset root")->required();
  curve->add_option("--out", out_path, "curve CSV to write")->default_str("curve.csv");
  add_config(curve, "learning-curve",
             concat({kFeatureKeys, kClassifierKeys, {"sizes", "mode", "trials", "jobs"}}));

  auto* noise = app.add_subcommand("noise-sweep", "accuracy and feature similarity under additive noise");
  noise->add_option("--dataset", dataset, "dataset root")->required();
  noise->add_option("--out", out_path, "noise CSV to write")->default_str("noise.csv");
  add_config(noise, "noise-sweep", concat({kFeatureKeys, kClassifierKeys, {"snr", "folds", "jobs"}}));

  auto* synth = app.add_subcommand("synth-corpus", "write the synthetic AM-tone test corpus");
  synth->add_option("--out", out_path, "output directory")->required();
  add_config(synth, "synth-corpus", {"classes", "clips", "seed", "duration", "sample_rate", "corpus_snr"});

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  if (!args.empty()) args.pop_back();  // program name
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << code_name(ErrorCode::UsageError) << ": " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const RunConfig cfg = flags.at(name).resolve();
    if (out_path.empty() && name != "classify") {
      out_path = name == "evaluate" ? "report.csv" : name == "learning-curve" ? "curve.csv" : "noise.csv";
    }
    if (name == "extract") return cmd_extract(input, out_path, cfg, out);
    if (name == "train") return cmd_train(features_path, out_path, cfg, out);
    if (name == "classify") return cmd_classify(model_path, input, out_path, cfg, out);
    if (name == "evaluate") return cmd_evaluate(dataset, out_path, cfg, out);
    if (name == "learning-curve") return cmd_learning_curve(dataset, out_path, cfg, out);
    if (name == "noise-sweep") return cmd_noise_sweep(dataset, out_path, cfg, out);
    if (name == "synth-corpus") return cmd_synth_corpus(out_path, cfg, out);
    err << "error: " << code_name(ErrorCode::UsageError) << ": unknown subcommand " << name << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << code_name(e.code()) << ": " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << code_name(ErrorCode::IoError) << ": " << one_line(e.what()) << '\n';
    return 1;
  }
}

}  // namespace genresrc::cli
