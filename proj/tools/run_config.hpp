#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "genresrc/audio_io.hpp"
#include "genresrc/eval_harness.hpp"
#include "genresrc/feature_pipeline.hpp"
#include "genresrc/src_classifier.hpp"

namespace genresrc::cli {

// Every tunable of a run. Resolution order: defaults, then the config file,
// then command-line flags.
struct RunConfig {
  FeatureConfig feature;
  ClassifierConfig classifier;
  HarnessConfig harness;
  std::vector<double> snr_list{40, 20, 10, 0, -10};
  std::vector<std::size_t> sizes{1, 10, 20, 30, 40, 50, 70, 80, 99};
  std::string curve_mode = "both";  // both | second_fft | stage2_only
  CorpusSpec corpus;

  // Keys in emit order. Flags use the same names with '-' for '_'.
  static const std::vector<std::string>& keys();

  // Throws BadConfig for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  // Flat `key = value` lines; `#` starts a comment.
  std::string emit() const;
  static RunConfig parse(std::string_view text);
  void apply(std::string_view text);
  static RunConfig load(const std::string& path);

  bool operator==(const RunConfig& other) const { return emit() == other.emit(); }
};

}  // namespace genresrc::cli
