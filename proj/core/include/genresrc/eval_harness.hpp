#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genresrc/audio_io.hpp"
#include "genresrc/feature_pipeline.hpp"
#include "genresrc/src_classifier.hpp"

namespace genresrc {

struct HarnessConfig {
  std::size_t folds = 5;
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;  // never affects results
};

// Canonical "key=value;..." text of every parameter that affects results.
std::string config_snapshot(const FeatureConfig& feature, const ClassifierConfig& classifier,
                            const HarnessConfig& harness);

// ---- clip sources --------------------------------------------------------------

// A labelled set of clips, loaded lazily by index.
struct ClipSet {
  std::size_t size = 0;
  std::function<AudioClip(std::size_t)> load;
  std::vector<int> labels;
  std::vector<std::string> classes;
};

ClipSet clip_set(const DatasetIndex& index);
ClipSet clip_set(std::vector<AudioClip> clips, std::vector<int> labels,
                 std::vector<std::string> classes);

// ---- feature cache ---------------------------------------------------------------

std::uint64_t content_hash(const AudioClip& clip);

// Keyed by (clip content hash, feature-config fingerprint). Thread-safe.
class FeatureCache {
 public:
  FeatureVector get_or_compute(const AudioClip& clip, const FeatureConfig& cfg);
  std::size_t size() const;
  std::size_t hits() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::pair<std::uint64_t, std::string>, FeatureVector> entries_;
  std::size_t hits_ = 0;
};

struct LabeledCorpus {
  std::vector<FeatureVector> features;
  std::vector<int> labels;
  std::vector<std::string> classes;
  int sample_rate = 0;
};

// Loads and extracts every clip. Throws MixedSampleRates naming the clips
// whose rate differs from the first clip's.
LabeledCorpus extract_corpus(const ClipSet& clips, const FeatureConfig& cfg, std::size_t jobs,
                             FeatureCache* cache = nullptr);

// ---- folds ----------------------------------------------------------------------

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // per clip
  std::uint64_t seed = 0;

  std::vector<std::size_t> members(std::size_t fold) const;
};

// Per-class seeded shuffle, then round-robin assignment.
FoldPlan kfold_split(std::span<const int> labels, std::size_t n_classes, std::size_t k,
                     std::uint64_t seed);
FoldPlan kfold_split(const DatasetIndex& index, std::size_t k, std::uint64_t seed);

// ---- confusion / reports -----------------------------------------------------------

struct ConfusionMatrix {
  std::size_t n_classes = 0;
  std::vector<std::size_t> counts;  // row-major, rows = truth

  std::size_t at(std::size_t truth, std::size_t predicted) const {
    return counts[truth * n_classes + predicted];
  }
  std::size_t total() const;
  std::size_t trace() const;
  // nullopt when the matrix is empty.
  std::optional<double> accuracy() const;
};

ConfusionMatrix confusion_matrix(std::span<const int> truths, std::span<const int> predictions,
                                 std::size_t n_classes);

struct EvalReport {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  std::vector<double> per_fold_accuracy;
  std::vector<std::size_t> per_fold_count;
  std::vector<std::string> classes;
  std::string config_snapshot;
  double wall_time_s = 0.0;
};

// Builds a dictionary from every fold but f and classifies fold f.
EvalReport cross_validate(const LabeledCorpus& corpus, const ClassifierConfig& classifier,
                          const HarnessConfig& harness);
EvalReport cross_validate(const ClipSet& clips, const FeatureConfig& feature,
                          const ClassifierConfig& classifier, const HarnessConfig& harness,
                          FeatureCache* cache = nullptr);

// ---- learning curve ---------------------------------------------------------------

struct CurvePoint {
  std::size_t train_per_class = 0;
  double mean_error_pct = 0.0;
  double stddev_error_pct = 0.0;
  std::vector<double> trial_error_pct;
};

struct LearningCurve {
  FeatureMode mode = FeatureMode::SecondFft;
  std::size_t test_per_class = 0;
  std::vector<CurvePoint> points;
};

// Per class, a seeded shuffle fixes a held-out test set of (count - max
// size) clips; each trial draws `size` training clips per class from the
// remaining pool.
LearningCurve learning_curve(const LabeledCorpus& corpus, std::span<const std::size_t> sizes,
                             const ClassifierConfig& classifier, const HarnessConfig& harness);
LearningCurve learning_curve(const ClipSet& clips, std::span<const std::size_t> sizes,
                             FeatureMode mode, FeatureConfig feature,
                             const ClassifierConfig& classifier, const HarnessConfig& harness,
                             FeatureCache* cache = nullptr);

// ---- noise robustness ---------------------------------------------------------------

struct NoisePoint {
  double snr_db = 0.0;
  double accuracy_mean = 0.0;   // over folds
  double accuracy_stddev = 0.0;
  double cosine_mean = 0.0;     // clean vs noisy feature, over clips
  double cosine_stddev = 0.0;
};

struct NoiseReport {
  double clean_accuracy = 0.0;
  std::vector<NoisePoint> points;
};

// Cosine similarity; 0 when either vector is all zero.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// k-fold: dictionaries are built from clean training features, test clips
// are corrupted at each SNR before extraction.
NoiseReport noise_sweep(const ClipSet& clips, std::span<const double> snr_db,
                        const FeatureConfig& feature, const ClassifierConfig& classifier,
                        const HarnessConfig& harness);

// ---- emitters -----------------------------------------------------------------------

inline constexpr double kPublishedGtzanAccuracy = 0.957;
inline constexpr std::size_t kPublishedFeatureDimension = 35;

void write_report_csv(std::ostream& out, const EvalReport& report);
void write_curve_csv(std::ostream& out, std::span<const LearningCurve> curves,
                     const std::string& snapshot);
void write_noise_csv(std::ostream& out, const NoiseReport& report, const std::string& snapshot);
std::string summarize(const EvalReport& report);

}  // namespace genresrc
