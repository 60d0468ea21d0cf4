#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "genresrc/error.hpp"
#include "genresrc/feature_pipeline.hpp"
#include "test_support.hpp"

using namespace genresrc;
using genresrc::testing::cosine;
using genresrc::testing::naive_half_magnitude;
using genresrc::testing::random_vector;

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

// Top-k by sorting (magnitude desc, index asc) over the nonzero entries.
std::vector<std::size_t> sort_oracle_topk(const std::vector<double>& mags, std::size_t k) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < mags.size(); ++i) {
    if (mags[i] != 0.0) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(mags[a]) > std::abs(mags[b]); });
  idx.resize(std::min(k, idx.size()));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Spectrogram rows_to_spec(const std::vector<std::vector<double>>& rows) {
  Spectrogram s;
  s.n_frames = rows.size();
  s.n_bins = rows.empty() ? 0 : rows.front().size();
  for (const auto& r : rows) s.data.insert(s.data.end(), r.begin(), r.end());
  return s;
}

}  // namespace

TEST(Normalize, DivideByMax) {
  EXPECT_EQ(normalize_frame_spectrum(std::vector<double>{2, 4, 8}), (std::vector<double>{0.25, 0.5, 1.0}));
  EXPECT_EQ(normalize_frame_spectrum(std::vector<double>{0, 0, 0}), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(normalize_frame_spectrum(std::vector<double>{5}), (std::vector<double>{1.0}));
}

TEST(Normalize, RowsMatchSingleFrameVersion) {
  auto spec = rows_to_spec({{1, 3, 2}, {0, 0, 0}, {7, 7, 14}});
  normalize_rows(spec);
  EXPECT_EQ(std::vector<double>(spec.row(0).begin(), spec.row(0).end()),
            normalize_frame_spectrum(std::vector<double>{1, 3, 2}));
  EXPECT_EQ(std::vector<double>(spec.row(1).begin(), spec.row(1).end()), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(std::vector<double>(spec.row(2).begin(), spec.row(2).end()), (std::vector<double>{0.5, 0.5, 1}));
}

TEST(FrameSums, RowSums) {
  const auto spec = rows_to_spec({{1, 0, 0}, {0.5, 1, 0}, {1, 1, 1}});
  EXPECT_EQ(frame_sum_vector(spec), (std::vector<double>{1, 1.5, 3}));
  const auto silent = rows_to_spec({{0, 0}, {0, 0}});
  EXPECT_EQ(frame_sum_vector(silent), (std::vector<double>{0, 0}));
}

TEST(FrameSums, StationaryToneIsConstant) {
  // 400 Hz at 8 kHz repeats every 20 samples and the hop is 400 samples, so
  // every frame holds the same windowed waveform.
  const auto clip = synth_clip(PureTone{400.0}, 3.0, 8000, 0);
  auto spec = magnitude_spectrogram(clip, FrameConfig{});
  normalize_rows(spec);
  const auto sums = frame_sum_vector(spec);
  ASSERT_GT(sums.size(), 4u);
  const auto inner = std::span<const double>(sums).subspan(1, sums.size() - 2);
  const auto [lo, hi] = std::minmax_element(inner.begin(), inner.end());
  const double mean = std::accumulate(inner.begin(), inner.end(), 0.0) / static_cast<double>(inner.size());
  EXPECT_LT(*hi - *lo, 1e-6 * mean);
}

TEST(SecondFft, ConstantHasOnlyDc) {
  FeatureConfig cfg;
  cfg.second_fft_len = 16;
  cfg.keep_k = 8;
  const std::vector<double> constant(16, 2.5);
  for (double m : second_fft(constant, cfg)) EXPECT_NEAR(m, 0.0, 1e-12);

  const std::vector<double> padded(8, 2.5);
  const auto mags = second_fft(padded, cfg);
  EXPECT_EQ(mags[0], 0.0);
  const auto oracle = naive_half_magnitude(padded, 16);
  for (std::size_t k = 1; k < mags.size(); ++k) EXPECT_NEAR(mags[k], oracle[k], 1e-12);
}

TEST(SecondFft, AlternatingIsNyquist) {
  FeatureConfig cfg;
  cfg.second_fft_len = 16;
  cfg.keep_k = 8;
  std::vector<double> alt(16);
  for (std::size_t i = 0; i < 16; ++i) alt[i] = i % 2 ? -1.0 : 1.0;
  const auto mags = second_fft(alt, cfg);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(mags[k], 0.0, 1e-12);
  EXPECT_NEAR(mags[8], 16.0, 1e-12);
}

TEST(SecondFft, KeepsDcWhenAsked) {
  FeatureConfig cfg;
  cfg.second_fft_len = 16;
  cfg.keep_k = 8;
  cfg.drop_dc = false;
  EXPECT_NEAR(second_fft(std::vector<double>(16, 1.0), cfg)[0], 16.0, 1e-12);
}

TEST(SecondFft, TooManyFrames) {
  FeatureConfig cfg;
  cfg.second_fft_len = 16;
  cfg.keep_k = 8;
  EXPECT_EQ(code_of([&] { second_fft(std::vector<double>(17, 1.0), cfg); }), ErrorCode::TooManyFrames);
}

TEST(SecondFft, CircularShiftInvariance) {
  FeatureConfig cfg;
  const auto v = random_vector(cfg.second_fft_len, 21);
  const auto base = second_fft(v, cfg);
  for (std::size_t s : {1u, 17u, 500u, 1023u}) {
    std::vector<double> rotated(v);
    std::rotate(rotated.begin(), rotated.begin() + static_cast<std::ptrdiff_t>(s), rotated.end());
    const auto m = second_fft(rotated, cfg);
    for (std::size_t k = 0; k < m.size(); ++k) EXPECT_NEAR(m[k], base[k], 1e-9);
  }
}

TEST(SecondFft, AmEnvelopeMatchesBruteForce) {
  // Frame rate 20 Hz (hop 50 ms at 8 kHz), 4 Hz envelope -> bin near
  // 4/20 * 1024. The search skips the mean term's leakage lobe at low bins.
  const auto clip = synth_clip(AmTone{440.0, 4.0, 1.0}, 5.0, 8000, 0);
  FeatureConfig cfg;
  auto spec = magnitude_spectrogram(clip, cfg.frame);
  normalize_rows(spec);
  const auto sums = frame_sum_vector(spec);
  const auto mags = second_fft(sums, cfg);
  const auto oracle = naive_half_magnitude(sums, cfg.second_fft_len);
  for (std::size_t k = 1; k < mags.size(); ++k) ASSERT_NEAR(mags[k], oracle[k], 1e-9 * (1 + oracle[k]));
  const std::size_t skip = 2 * cfg.second_fft_len / sums.size() + 1;
  const auto peak = std::max_element(mags.begin() + static_cast<std::ptrdiff_t>(skip), mags.end());
  EXPECT_NEAR(static_cast<double>(peak - mags.begin()), 204.8, 3.0);
}

TEST(AmplitudeFilter, Examples) {
  EXPECT_EQ(amplitude_filter(std::vector<double>{0.1, 0.9, 0.5, 0.05}, 2),
            (std::vector<double>{0, 0.9, 0.5, 0}));
  EXPECT_EQ(amplitude_filter(std::vector<double>(6, 0.0), 5), std::vector<double>(6, 0.0));
  EXPECT_EQ(amplitude_filter(std::vector<double>{0.5, 0.5, 0.5}, 2), (std::vector<double>{0.5, 0.5, 0}));
  EXPECT_EQ(amplitude_filter(std::vector<double>{0, 3, 0, 1}, 10), (std::vector<double>{0, 3, 0, 1}));
}

TEST(AmplitudeFilter, MatchesSortOracle) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 200;
    const std::size_t k = 1 + rng() % (n + 5);
    std::vector<double> mags(n);
    // Coarse quantisation forces plenty of ties; some exact zeros too.
    for (double& m : mags) m = static_cast<double>(rng() % 6) * 0.25;
    const auto out = amplitude_filter(mags, k);
    const auto support = nonzero_support(out);
    ASSERT_EQ(support, sort_oracle_topk(mags, k));
    for (std::size_t i : support) ASSERT_EQ(out[i], mags[i]);
  }
}

TEST(Extract, DefaultShapeAndSparsity) {
  const auto clip = synth_clip(AmTone{700.0, 3.0, 0.8}, 5.0, 22050, 0);
  FeatureConfig cfg;
  const auto fv = extract_features(clip, cfg);
  EXPECT_EQ(fv.values.size(), 513u);
  EXPECT_EQ(fv.values.size(), feature_dimension(cfg, 22050));
  EXPECT_EQ(fv.support.size(), 64u);
  EXPECT_TRUE(std::is_sorted(fv.support.begin(), fv.support.end()));
  for (std::size_t i = 0; i < fv.values.size(); ++i) {
    EXPECT_GE(fv.values[i], 0.0);
    const bool on = std::binary_search(fv.support.begin(), fv.support.end(), i);
    EXPECT_EQ(on, fv.values[i] != 0.0);
  }
  EXPECT_EQ(fv.values[0], 0.0);
}

TEST(Extract, ComposesTheStages) {
  const auto clip = synth_clip(WhiteNoise{}, 3.0, 8000, 2);
  FeatureConfig cfg;
  cfg.keep_k = 20;
  auto spec = magnitude_spectrogram(clip, cfg.frame);
  normalize_rows(spec);
  const auto want = amplitude_filter(second_fft(frame_sum_vector(spec), cfg), cfg.keep_k);
  EXPECT_EQ(extract_features(clip, cfg).values, want);
}

TEST(Extract, ScaleInvariance) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto clip = synth_clip(AmTone{300.0 + 100.0 * static_cast<double>(seed), 5.0, 0.7}, 3.0, 16000, seed);
    const auto base = extract_features(clip, FeatureConfig{});
    for (double c : {0.01, 0.5, 10.0, 1024.0}) {
      AudioClip scaled = clip;
      for (double& v : scaled.samples) v *= c;
      const auto fv = extract_features(scaled, FeatureConfig{});
      for (std::size_t i = 0; i < fv.values.size(); ++i) {
        EXPECT_NEAR(fv.values[i], base.values[i], 1e-12 * std::max(1.0, base.values[i]));
      }
    }
  }
}

TEST(Extract, PowerOfTwoGainIsBitwiseExact) {
  const auto clip = synth_clip(WhiteNoise{}, 2.0, 16000, 9);
  AudioClip scaled = clip;
  for (double& v : scaled.samples) v *= 8.0;
  EXPECT_EQ(extract_features(clip, FeatureConfig{}).values, extract_features(scaled, FeatureConfig{}).values);
}

TEST(Extract, DifferentNoiseSeedsDiffer) {
  const auto a = extract_features(synth_clip(WhiteNoise{}, 3.0, 16000, 1), FeatureConfig{});
  const auto b = extract_features(synth_clip(WhiteNoise{}, 3.0, 16000, 2), FeatureConfig{});
  EXPECT_NE(a.values, b.values);
}

TEST(Extract, NoisyCopyStaysSimilar) {
  CorpusSpec spec;
  spec.clips_per_class = 3;
  spec.duration_s = 5.0;
  const auto corpus = synth_corpus(spec);
  double total = 0.0;
  for (std::size_t i = 0; i < corpus.clips.size(); ++i) {
    const auto clean = extract_features(corpus.clips[i], FeatureConfig{});
    const auto noisy = extract_features(add_awgn(corpus.clips[i], 10.0, 100 + i), FeatureConfig{});
    total += cosine(clean.values, noisy.values);
  }
  EXPECT_GE(total / static_cast<double>(corpus.clips.size()), 0.9);
}

TEST(Extract, WithinClassMoreSimilarThanBetween) {
  CorpusSpec spec;
  spec.clips_per_class = 6;
  spec.duration_s = 3.0;
  spec.sample_rate = 16000;
  const auto corpus = synth_corpus(spec);
  std::vector<FeatureVector> fv;
  for (const auto& c : corpus.clips) fv.push_back(extract_features(c, FeatureConfig{}));
  double within = 0.0, between = 0.0;
  std::size_t nw = 0, nb = 0;
  for (std::size_t i = 0; i < fv.size(); ++i) {
    for (std::size_t j = i + 1; j < fv.size(); ++j) {
      const double c = cosine(fv[i].values, fv[j].values);
      if (corpus.labels[i] == corpus.labels[j]) {
        within += c;
        ++nw;
      } else {
        between += c;
        ++nb;
      }
    }
  }
  EXPECT_GT(within / static_cast<double>(nw), between / static_cast<double>(nb));
}

TEST(Extract, TooFewFrames) {
  // 8 kHz, W = 800, H = 400: 7 frames need 3200 samples, 8 need 3600.
  AudioClip seven{random_vector(3599, 1), 8000, "short.wav"};
  try {
    extract_features(seven, FeatureConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ClipTooShort);
    EXPECT_NE(std::string(e.what()).find("short.wav"), std::string::npos);
  }
  AudioClip eight{random_vector(3600, 1), 8000, "ok"};
  EXPECT_NO_THROW(extract_features(eight, FeatureConfig{}));
  AudioClip empty{{}, 8000, "empty"};
  EXPECT_EQ(code_of([&] { extract_features(empty, FeatureConfig{}); }), ErrorCode::EmptyAudio);
}

TEST(Extract, LongClipExceedsSecondFftLen) {
  FeatureConfig cfg;
  cfg.second_fft_len = 64;
  cfg.keep_k = 16;
  AudioClip clip{random_vector(8000 * 4, 1), 8000, "long"};  // 79 frames
  EXPECT_EQ(code_of([&] { extract_features(clip, cfg); }), ErrorCode::TooManyFrames);
}

TEST(Extract, Stage2OnlyAndConcatModes) {
  const auto clip = synth_clip(AmTone{600.0, 6.0, 0.8}, 3.0, 16000, 0);
  FeatureConfig s2;
  s2.mode = FeatureMode::Stage2Only;
  const auto a = extract_features(clip, s2);
  EXPECT_EQ(a.values.size(), feature_dimension(s2, 16000));
  EXPECT_EQ(a.values.size(), 2048u / 2 + 1);
  EXPECT_LE(a.support.size(), s2.keep_k);

  FeatureConfig cat;
  cat.concat_short_term = true;
  const auto b = extract_features(clip, cat);
  EXPECT_EQ(b.values.size(), 513u + 1025u);
  const auto plain = extract_features(clip, FeatureConfig{});
  EXPECT_TRUE(std::equal(plain.values.begin(), plain.values.end(), b.values.begin()));
  EXPECT_TRUE(std::equal(a.values.begin(), a.values.end(), b.values.begin() + 513));
}

TEST(Config, ValidationAndFingerprint) {
  FeatureConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  auto bad = cfg;
  bad.second_fft_len = 1000;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::BadConfig);
  bad = cfg;
  bad.keep_k = 513;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::BadConfig);
  bad.keep_k = 0;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::BadConfig);

  auto other = cfg;
  EXPECT_EQ(fingerprint(cfg), fingerprint(other));
  other.keep_k = 32;
  EXPECT_NE(fingerprint(cfg), fingerprint(other));
  other = cfg;
  other.mode = FeatureMode::Stage2Only;
  EXPECT_NE(fingerprint(cfg), fingerprint(other));
  EXPECT_EQ(parse_feature_mode(to_string(FeatureMode::Stage2Only)), FeatureMode::Stage2Only);
  EXPECT_EQ(code_of([] { parse_feature_mode("mfcc"); }), ErrorCode::BadConfig);
}

TEST(FeatureCsv, RoundTripIsExact) {
  std::vector<LabeledFeature> rows;
  for (int i = 0; i < 3; ++i) {
    FeatureVector fv;
    fv.values = amplitude_filter(random_vector(20, static_cast<std::uint64_t>(i)), 5);
    for (double& v : fv.values) v = std::abs(v) * 1e-3;
    fv.support = nonzero_support(fv.values);
    fv.clip_id = i == 1 ? "dir with, comma/clip \"q\".wav" : "clip" + std::to_string(i);
    rows.push_back({fv, i == 2 ? "b" : "a"});
  }
  std::stringstream ss;
  write_feature_csv(ss, rows);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')).substr(0, 20), "clip_id,label,v_0,v_");
  const auto back = read_feature_csv(ss);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].label, rows[i].label);
    EXPECT_EQ(back[i].feature.clip_id, rows[i].feature.clip_id);
    EXPECT_EQ(back[i].feature.values, rows[i].feature.values);
    EXPECT_EQ(back[i].feature.support, rows[i].feature.support);
  }
}

TEST(FeatureCsv, RejectsBadInput) {
  std::stringstream no_header;
  EXPECT_EQ(code_of([&] { read_feature_csv(no_header); }), ErrorCode::BadConfig);
  std::stringstream ragged("clip_id,label,v_0,v_1\na,x,1,2\nb,x,1\n");
  EXPECT_EQ(code_of([&] { read_feature_csv(ragged); }), ErrorCode::DimensionMismatch);
}
