#include "genresrc/feature_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "genresrc/csv.hpp"
#include "genresrc/error.hpp"
#include "genresrc/hashing.hpp"

namespace genresrc {

std::string_view to_string(FeatureMode mode) noexcept {
  return mode == FeatureMode::SecondFft ? "second_fft" : "stage2_only";
}

FeatureMode parse_feature_mode(std::string_view text) {
  if (text == "second_fft") return FeatureMode::SecondFft;
  if (text == "stage2_only") return FeatureMode::Stage2Only;
  throw Error(ErrorCode::BadConfig, "unknown feature mode '" + std::string(text) + "'");
}

void FeatureConfig::validate() const {
  if (!is_power_of_two(second_fft_len) || second_fft_len < 2) {
    throw Error(ErrorCode::BadConfig, "second_fft_len must be a power of two >= 2");
  }
  if (keep_k < 1 || keep_k > second_fft_len / 2) {
    throw Error(ErrorCode::BadConfig, "keep_k must lie in [1, second_fft_len/2]");
  }
  if (!(frame.window_len_s > 0.0)) throw Error(ErrorCode::BadConfig, "window_len_s must be positive");
  if (!(frame.hop_fraction > 0.0 && frame.hop_fraction <= 1.0)) {
    throw Error(ErrorCode::BadConfig, "hop_fraction must lie in (0, 1]");
  }
}

std::string fingerprint(const FeatureConfig& cfg) {
  std::ostringstream os;
  os << "window_len_s=" << csv::format_double(cfg.frame.window_len_s)
     << ";hop_fraction=" << csv::format_double(cfg.frame.hop_fraction)
     << ";fft_len_policy=next_pow2"
     << ";second_fft_len=" << cfg.second_fft_len << ";keep_k=" << cfg.keep_k
     << ";drop_dc=" << cfg.drop_dc << ";concat_short_term=" << cfg.concat_short_term
     << ";mode=" << to_string(cfg.mode);
  return hex64(fnv1a(os.str()));
}

std::size_t feature_dimension(const FeatureConfig& cfg, int sample_rate) {
  const std::size_t short_term = cfg.frame.fft_len(sample_rate) / 2 + 1;
  if (cfg.mode == FeatureMode::Stage2Only) return short_term;
  const std::size_t long_term = cfg.second_fft_len / 2 + 1;
  return cfg.concat_short_term ? long_term + short_term : long_term;
}

std::vector<double> normalize_frame_spectrum(std::span<const double> mags) {
  std::vector<double> out(mags.begin(), mags.end());
  const double peak = out.empty() ? 0.0 : *std::max_element(out.begin(), out.end());
  if (peak > 0.0) {
    for (double& v : out) v /= peak;
  } else {
    std::fill(out.begin(), out.end(), 0.0);
  }
  return out;
}

void normalize_rows(Spectrogram& spec) {
  for (std::size_t t = 0; t < spec.n_frames; ++t) {
    auto row = spec.row(t);
    const double peak = *std::max_element(row.begin(), row.end());
    if (peak > 0.0) {
      for (double& v : row) v /= peak;
    } else {
      std::fill(row.begin(), row.end(), 0.0);
    }
  }
}

std::vector<double> frame_sum_vector(const Spectrogram& normalized) {
  std::vector<double> sums(normalized.n_frames);
  for (std::size_t t = 0; t < normalized.n_frames; ++t) {
    const auto row = normalized.row(t);
    sums[t] = std::accumulate(row.begin(), row.end(), 0.0);
  }
  return sums;
}

std::vector<double> mean_frame_spectrum(const Spectrogram& normalized) {
  std::vector<double> mean(normalized.n_bins, 0.0);
  if (normalized.n_frames == 0) return mean;
  for (std::size_t t = 0; t < normalized.n_frames; ++t) {
    const auto row = normalized.row(t);
    for (std::size_t k = 0; k < normalized.n_bins; ++k) mean[k] += row[k];
  }
  for (double& v : mean) v /= static_cast<double>(normalized.n_frames);
  return mean;
}

std::vector<double> second_fft(std::span<const double> frame_sums, const FeatureConfig& cfg) {
  if (frame_sums.size() > cfg.second_fft_len) {
    throw Error(ErrorCode::TooManyFrames, std::to_string(frame_sums.size()) +
                                              " frames exceed second_fft_len " +
                                              std::to_string(cfg.second_fft_len));
  }
  auto mags = dft_magnitude(frame_sums, cfg.second_fft_len);
  if (cfg.drop_dc) mags[0] = 0.0;
  return mags;
}

std::vector<double> amplitude_filter(std::span<const double> mags, std::size_t keep_k) {
  std::vector<std::size_t> order;
  order.reserve(mags.size());
  for (std::size_t i = 0; i < mags.size(); ++i) {
    if (mags[i] != 0.0) order.push_back(i);
  }
  if (order.size() > keep_k) {
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep_k), order.end(),
                      [&mags](std::size_t a, std::size_t b) {
                        const double ma = std::abs(mags[a]);
                        const double mb = std::abs(mags[b]);
                        return ma > mb || (ma == mb && a < b);
                      });
    order.resize(keep_k);
  }
  std::vector<double> out(mags.size(), 0.0);
  for (std::size_t i : order) out[i] = mags[i];
  return out;
}

std::vector<std::size_t> nonzero_support(std::span<const double> values) {
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) support.push_back(i);
  }
  return support;
}

FeatureVector extract_features(const AudioClip& clip, const FeatureConfig& cfg) {
  cfg.validate();
  if (clip.samples.empty()) throw Error(ErrorCode::EmptyAudio, clip.source_id + ": no samples");

  Spectrogram spec = magnitude_spectrogram(clip, cfg.frame);
  if (spec.n_frames < kMinFrames) {
    throw Error(ErrorCode::ClipTooShort, clip.source_id + ": " + std::to_string(spec.n_frames) +
                                             " frames, need at least " + std::to_string(kMinFrames));
  }
  normalize_rows(spec);

  FeatureVector fv;
  fv.clip_id = clip.source_id;
  if (cfg.mode == FeatureMode::Stage2Only) {
    fv.values = amplitude_filter(mean_frame_spectrum(spec), cfg.keep_k);
  } else {
    if (spec.n_frames > cfg.second_fft_len) {
      throw Error(ErrorCode::TooManyFrames, clip.source_id + ": " + std::to_string(spec.n_frames) +
                                                " frames exceed second_fft_len " +
                                                std::to_string(cfg.second_fft_len));
    }
    fv.values = amplitude_filter(second_fft(frame_sum_vector(spec), cfg), cfg.keep_k);
    if (cfg.concat_short_term) {
      const auto short_term = amplitude_filter(mean_frame_spectrum(spec), cfg.keep_k);
      fv.values.insert(fv.values.end(), short_term.begin(), short_term.end());
    }
  }
  fv.support = nonzero_support(fv.values);
  return fv;
}

void write_feature_csv(std::ostream& out, std::span<const LabeledFeature> rows) {
  const std::size_t dim = rows.empty() ? 0 : rows.front().feature.values.size();
  out << "clip_id,label";
  for (std::size_t i = 0; i < dim; ++i) out << ",v_" << i;
  out << '\n';
  for (const auto& row : rows) {
    if (row.feature.values.size() != dim) {
      throw Error(ErrorCode::DimensionMismatch, row.feature.clip_id + ": feature dimension " +
                                                    std::to_string(row.feature.values.size()) +
                                                    " != " + std::to_string(dim));
    }
    out << csv::escape(row.feature.clip_id) << ',' << csv::escape(row.label);
    for (double v : row.feature.values) out << ',' << csv::format_double(v);
    out << '\n';
  }
}

std::vector<LabeledFeature> read_feature_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::BadConfig, "features CSV: missing header row");
  const auto header = csv::split(line);
  if (header.size() < 3 || header[0] != "clip_id" || header[1] != "label") {
    throw Error(ErrorCode::BadConfig, "features CSV: header must start with clip_id,label,v_0");
  }
  const std::size_t dim = header.size() - 2;

  std::vector<LabeledFeature> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = csv::split(line);
    if (fields.size() != dim + 2) {
      throw Error(ErrorCode::DimensionMismatch, "features CSV line " + std::to_string(line_no) +
                                                    ": expected " + std::to_string(dim + 2) +
                                                    " fields, got " + std::to_string(fields.size()));
    }
    LabeledFeature row;
    row.feature.clip_id = std::move(fields[0]);
    row.label = std::move(fields[1]);
    row.feature.values.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) row.feature.values[i] = csv::parse_double(fields[i + 2]);
    row.feature.support = nonzero_support(row.feature.values);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace genresrc
