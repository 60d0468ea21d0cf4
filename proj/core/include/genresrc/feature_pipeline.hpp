#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "genresrc/audio_io.hpp"
#include "genresrc/dsp_core.hpp"

namespace genresrc {

enum class FeatureMode {
  SecondFft,   // long-term feature: spectrum of the per-frame sum sequence
  Stage2Only,  // mean normalised short-term spectrum, amplitude-filtered
};

std::string_view to_string(FeatureMode mode) noexcept;
FeatureMode parse_feature_mode(std::string_view text);

struct FeatureConfig {
  FrameConfig frame;
  std::size_t second_fft_len = 1024;
  std::size_t keep_k = 64;
  bool drop_dc = true;
  // Appends the amplitude-filtered mean short-term spectrum after the
  // second-FFT block. Off by default.
  bool concat_short_term = false;
  FeatureMode mode = FeatureMode::SecondFft;

  void validate() const;
};

// Stable hex digest of every field that affects extracted values.
std::string fingerprint(const FeatureConfig& cfg);

// Dimension of FeatureVector::values for clips at `sample_rate`.
std::size_t feature_dimension(const FeatureConfig& cfg, int sample_rate);

struct FeatureVector {
  std::vector<double> values;
  std::vector<std::size_t> support;  // sorted indices of non-zero entries
  std::string clip_id;
};

// Minimum frame count accepted by extract_features.
inline constexpr std::size_t kMinFrames = 8;

// mags / max(mags); an all-zero frame stays all zero.
std::vector<double> normalize_frame_spectrum(std::span<const double> mags);
void normalize_rows(Spectrogram& spec);

std::vector<double> frame_sum_vector(const Spectrogram& normalized);
std::vector<double> mean_frame_spectrum(const Spectrogram& normalized);

// Zero-pads to second_fft_len and returns the half-spectrum magnitudes.
// Bin 0 is forced to zero when drop_dc is set.
std::vector<double> second_fft(std::span<const double> frame_sums, const FeatureConfig& cfg);

// Keeps the keep_k largest entries in place (ties go to the lower index),
// zeroes the rest.
std::vector<double> amplitude_filter(std::span<const double> mags, std::size_t keep_k);

std::vector<std::size_t> nonzero_support(std::span<const double> values);

FeatureVector extract_features(const AudioClip& clip, const FeatureConfig& cfg);

// ---- features.csv ------------------------------------------------------------

struct LabeledFeature {
  FeatureVector feature;
  std::string label;
};

// Header `clip_id,label,v_0,...,v_{D-1}`; values with 17 significant digits.
void write_feature_csv(std::ostream& out, std::span<const LabeledFeature> rows);
std::vector<LabeledFeature> read_feature_csv(std::istream& in);

}  // namespace genresrc
