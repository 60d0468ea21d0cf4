#include "genresrc/eval_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "genresrc/csv.hpp"
#include "genresrc/error.hpp"
#include "genresrc/hashing.hpp"
#include "genresrc/parallel.hpp"

namespace genresrc {

std::string config_snapshot(const FeatureConfig& feature, const ClassifierConfig& classifier,
                            const HarnessConfig& harness) {
  std::ostringstream os;
  os << "window_len_s=" << csv::format_double(feature.frame.window_len_s)
     << ";hop_fraction=" << csv::format_double(feature.frame.hop_fraction)
     << ";second_fft_len=" << feature.second_fft_len << ";keep_k=" << feature.keep_k
     << ";drop_dc=" << (feature.drop_dc ? "true" : "false")
     << ";concat_short_term=" << (feature.concat_short_term ? "true" : "false")
     << ";feature_mode=" << to_string(feature.mode) << ";m=" << classifier.m
     << ";k_max=" << classifier.k_max << ";tol=" << csv::format_double(classifier.tol)
     << ";solver=" << to_string(classifier.solver)
     << ";lambda=" << csv::format_double(classifier.lambda) << ";max_iter=" << classifier.max_iter
     << ";measurement_mode=" << to_string(classifier.measurement)
     << ";classifier_seed=" << classifier.seed << ";folds=" << harness.folds
     << ";trials=" << harness.trials << ";harness_seed=" << harness.seed;
  return os.str();
}

// ---- clip sources ----------------------------------------------------------------

ClipSet clip_set(const DatasetIndex& index) {
  ClipSet set;
  set.size = index.entries.size();
  set.classes = index.classes;
  set.labels.reserve(set.size);
  for (const auto& e : index.entries) set.labels.push_back(index.class_index(e.label));
  auto entries = std::make_shared<std::vector<DatasetEntry>>(index.entries);
  set.load = [entries](std::size_t i) { return load_clip((*entries)[i].clip_path); };
  return set;
}

ClipSet clip_set(std::vector<AudioClip> clips, std::vector<int> labels,
                 std::vector<std::string> classes) {
  if (clips.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "clips and labels differ in length");
  }
  ClipSet set;
  set.size = clips.size();
  set.labels = std::move(labels);
  set.classes = std::move(classes);
  auto shared = std::make_shared<const std::vector<AudioClip>>(std::move(clips));
  set.load = [shared](std::size_t i) { return (*shared)[i]; };
  return set;
}

// ---- feature cache ------------------------------------------------------------------

std::uint64_t content_hash(const AudioClip& clip) {
  Fnv1a h;
  h.update_pod(clip.sample_rate);
  h.update_pod(clip.samples.size());
  h.update({reinterpret_cast<const std::uint8_t*>(clip.samples.data()),
            clip.samples.size() * sizeof(double)});
  return h.digest();
}

FeatureVector FeatureCache::get_or_compute(const AudioClip& clip, const FeatureConfig& cfg) {
  auto key = std::make_pair(content_hash(clip), fingerprint(cfg));
  {
    std::lock_guard lock(mutex_);
    if (const auto it = entries_.find(key); it != entries_.end()) {
      ++hits_;
      FeatureVector fv = it->second;
      fv.clip_id = clip.source_id;
      return fv;
    }
  }
  FeatureVector fv = extract_features(clip, cfg);
  std::lock_guard lock(mutex_);
  entries_.emplace(std::move(key), fv);
  return fv;
}

std::size_t FeatureCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t FeatureCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

namespace {

void check_uniform_rates(std::span<const int> rates, std::span<const std::string> ids) {
  if (rates.empty()) return;
  std::string offenders;
  std::size_t count = 0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] == rates[0]) continue;
    if (count < 10) offenders += (count ? ", " : "") + ids[i] + " (" + std::to_string(rates[i]) + " Hz)";
    ++count;
  }
  if (count > 0) {
    throw Error(ErrorCode::MixedSampleRates,
                std::to_string(count) + " clip(s) differ from " + ids[0] + " (" +
                    std::to_string(rates[0]) + " Hz): " + offenders);
  }
}

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::vector<std::vector<std::size_t>> members_by_class(std::span<const int> labels,
                                                       std::size_t n_classes) {
  std::vector<std::vector<std::size_t>> members(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_classes) {
      throw Error(ErrorCode::UnknownLabel, "label index " + std::to_string(labels[i]) + " out of range");
    }
    members[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  return members;
}

Dictionary dictionary_for(const LabeledCorpus& corpus, std::span<const std::size_t> train,
                          const ClassifierConfig& classifier, std::uint64_t seed) {
  std::vector<FeatureVector> features;
  std::vector<int> labels;
  features.reserve(train.size());
  labels.reserve(train.size());
  for (std::size_t i : train) {
    features.push_back(corpus.features[i]);
    labels.push_back(corpus.labels[i]);
  }
  return build_dictionary(features, labels, corpus.classes, classifier.m, seed,
                          classifier.measurement);
}

}  // namespace

LabeledCorpus extract_corpus(const ClipSet& clips, const FeatureConfig& cfg, std::size_t jobs,
                             FeatureCache* cache) {
  LabeledCorpus corpus;
  corpus.features.resize(clips.size);
  corpus.labels = clips.labels;
  corpus.classes = clips.classes;
  std::vector<int> rates(clips.size);
  std::vector<std::string> ids(clips.size);

  parallel_for(clips.size, jobs, [&](std::size_t i) {
    const AudioClip clip = clips.load(i);
    rates[i] = clip.sample_rate;
    ids[i] = clip.source_id;
    corpus.features[i] = cache ? cache->get_or_compute(clip, cfg) : extract_features(clip, cfg);
  });
  check_uniform_rates(rates, ids);
  corpus.sample_rate = rates.empty() ? 0 : rates.front();
  return corpus;
}

// ---- folds ----------------------------------------------------------------------------

std::vector<std::size_t> FoldPlan::members(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

FoldPlan kfold_split(std::span<const int> labels, std::size_t n_classes, std::size_t k,
                     std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::BadConfig, "fold count must be at least 2");
  auto members = members_by_class(labels, n_classes);
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(labels.size(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < n_classes; ++c) {
    auto& list = members[c];
    if (list.size() < k) {
      throw Error(ErrorCode::TooFewSamples, "class " + std::to_string(c) + " has " +
                                                std::to_string(list.size()) + " clips, fewer than " +
                                                std::to_string(k) + " folds");
    }
    std::shuffle(list.begin(), list.end(), rng);
    for (std::size_t p = 0; p < list.size(); ++p) plan.assignments[list[p]] = p % k;
  }
  return plan;
}

FoldPlan kfold_split(const DatasetIndex& index, std::size_t k, std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(index.entries.size());
  for (const auto& e : index.entries) labels.push_back(index.class_index(e.label));
  return kfold_split(labels, index.classes.size(), k, seed);
}

// ---- confusion --------------------------------------------------------------------------

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < n_classes; ++i) t += at(i, i);
  return t;
}

std::optional<double> ConfusionMatrix::accuracy() const {
  const std::size_t n = total();
  if (n == 0) return std::nullopt;
  return static_cast<double>(trace()) / static_cast<double>(n);
}

ConfusionMatrix confusion_matrix(std::span<const int> truths, std::span<const int> predictions,
                                 std::size_t n_classes) {
  if (truths.size() != predictions.size()) {
    throw Error(ErrorCode::DimensionMismatch, "truth and prediction sequences differ in length");
  }
  ConfusionMatrix cm;
  cm.n_classes = n_classes;
  cm.counts.assign(n_classes * n_classes, 0);
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const int t = truths[i];
    const int p = predictions[i];
    if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= n_classes ||
        static_cast<std::size_t>(p) >= n_classes) {
      throw Error(ErrorCode::UnknownLabel, "label outside the known classes at position " +
                                               std::to_string(i));
    }
    ++cm.counts[static_cast<std::size_t>(t) * n_classes + static_cast<std::size_t>(p)];
  }
  return cm;
}

// ---- cross-validation -------------------------------------------------------------------

EvalReport cross_validate(const LabeledCorpus& corpus, const ClassifierConfig& classifier,
                          const HarnessConfig& harness) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = corpus.features.size();
  const FoldPlan plan = kfold_split(corpus.labels, corpus.classes.size(), harness.folds, harness.seed);

  std::vector<Dictionary> dicts(plan.k);
  parallel_for(plan.k, harness.jobs, [&](std::size_t f) {
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < n; ++i) {
      if (plan.assignments[i] != f) train.push_back(i);
    }
    dicts[f] = dictionary_for(corpus, train, classifier, classifier.seed);
  });

  std::vector<int> predictions(n);
  parallel_for(n, harness.jobs, [&](std::size_t i) {
    predictions[i] = classify(dicts[plan.assignments[i]], corpus.features[i], classifier).predicted;
  });

  EvalReport report;
  report.classes = corpus.classes;
  report.confusion = confusion_matrix(corpus.labels, predictions, corpus.classes.size());
  report.accuracy = report.confusion.accuracy().value_or(0.0);
  report.per_fold_accuracy.assign(plan.k, 0.0);
  report.per_fold_count.assign(plan.k, 0);
  std::vector<std::size_t> correct(plan.k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t f = plan.assignments[i];
    ++report.per_fold_count[f];
    if (predictions[i] == corpus.labels[i]) ++correct[f];
  }
  for (std::size_t f = 0; f < plan.k; ++f) {
    report.per_fold_accuracy[f] =
        static_cast<double>(correct[f]) / static_cast<double>(report.per_fold_count[f]);
  }
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

EvalReport cross_validate(const ClipSet& clips, const FeatureConfig& feature,
                          const ClassifierConfig& classifier, const HarnessConfig& harness,
                          FeatureCache* cache) {
  const auto start = std::chrono::steady_clock::now();
  const LabeledCorpus corpus = extract_corpus(clips, feature, harness.jobs, cache);
  EvalReport report = cross_validate(corpus, classifier, harness);
  report.config_snapshot = config_snapshot(feature, classifier, harness);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---- learning curve ---------------------------------------------------------------------

LearningCurve learning_curve(const LabeledCorpus& corpus, std::span<const std::size_t> sizes,
                             const ClassifierConfig& classifier, const HarnessConfig& harness) {
  if (sizes.empty()) throw Error(ErrorCode::BadSizes, "no training sizes given");
  if (harness.trials < 1) throw Error(ErrorCode::BadConfig, "trials must be at least 1");
  auto members = members_by_class(corpus.labels, corpus.classes.size());
  std::size_t min_count = corpus.labels.size();
  for (const auto& m : members) min_count = std::min(min_count, m.size());
  const std::size_t max_size = *std::max_element(sizes.begin(), sizes.end());
  if (*std::min_element(sizes.begin(), sizes.end()) < 1 || max_size >= min_count) {
    throw Error(ErrorCode::BadSizes, "training sizes must lie in [1, " +
                                         std::to_string(min_count == 0 ? 0 : min_count - 1) +
                                         "] (smallest class has " + std::to_string(min_count) +
                                         " clips)");
  }

  // Fixed split: per class, the first max_size shuffled clips form the
  // training pool and the rest are held out.
  std::mt19937_64 split_rng(harness.seed);
  std::vector<std::vector<std::size_t>> pools(members.size());
  std::vector<std::size_t> test;
  for (std::size_t c = 0; c < members.size(); ++c) {
    auto list = members[c];
    std::shuffle(list.begin(), list.end(), split_rng);
    pools[c].assign(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(max_size));
    test.insert(test.end(), list.begin() + static_cast<std::ptrdiff_t>(max_size), list.end());
  }
  std::sort(test.begin(), test.end());

  LearningCurve curve;
  curve.mode = FeatureMode::SecondFft;
  curve.test_per_class = min_count - max_size;
  curve.points.resize(sizes.size());
  const std::size_t tasks = sizes.size() * harness.trials;
  std::vector<double> errors(tasks);

  parallel_for(tasks, harness.jobs, [&](std::size_t task) {
    const std::size_t si = task / harness.trials;
    const std::size_t trial = task % harness.trials;
    const std::size_t size = sizes[si];
    std::mt19937_64 rng(mix_seed(harness.seed, size, trial));
    std::vector<std::size_t> train;
    for (const auto& pool : pools) {
      auto draw = pool;
      std::shuffle(draw.begin(), draw.end(), rng);
      train.insert(train.end(), draw.begin(), draw.begin() + static_cast<std::ptrdiff_t>(size));
    }
    const Dictionary dict = dictionary_for(corpus, train, classifier, mix_seed(classifier.seed, trial));
    std::size_t wrong = 0;
    for (std::size_t i : test) {
      if (classify(dict, corpus.features[i], classifier).predicted != corpus.labels[i]) ++wrong;
    }
    errors[task] = 100.0 * static_cast<double>(wrong) / static_cast<double>(test.size());
  });

  for (std::size_t si = 0; si < sizes.size(); ++si) {
    auto& p = curve.points[si];
    p.train_per_class = sizes[si];
    p.trial_error_pct.assign(errors.begin() + static_cast<std::ptrdiff_t>(si * harness.trials),
                             errors.begin() + static_cast<std::ptrdiff_t>((si + 1) * harness.trials));
    p.mean_error_pct = mean_of(p.trial_error_pct);
    p.stddev_error_pct = stddev_of(p.trial_error_pct);
  }
  return curve;
}

LearningCurve learning_curve(const ClipSet& clips, std::span<const std::size_t> sizes,
                             FeatureMode mode, FeatureConfig feature,
                             const ClassifierConfig& classifier, const HarnessConfig& harness,
                             FeatureCache* cache) {
  feature.mode = mode;
  const LabeledCorpus corpus = extract_corpus(clips, feature, harness.jobs, cache);
  LearningCurve curve = learning_curve(corpus, sizes, classifier, harness);
  curve.mode = mode;
  return curve;
}

// ---- noise sweep ---------------------------------------------------------------------------

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "cosine of unequal lengths");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

NoiseReport noise_sweep(const ClipSet& clips, std::span<const double> snr_db,
                        const FeatureConfig& feature, const ClassifierConfig& classifier,
                        const HarnessConfig& harness) {
  const std::size_t n = clips.size;
  const std::size_t n_snr = snr_db.size();
  LabeledCorpus clean;
  clean.features.resize(n);
  clean.labels = clips.labels;
  clean.classes = clips.classes;
  std::vector<std::vector<FeatureVector>> noisy(n_snr, std::vector<FeatureVector>(n));
  std::vector<int> rates(n);
  std::vector<std::string> ids(n);

  parallel_for(n, harness.jobs, [&](std::size_t i) {
    const AudioClip clip = clips.load(i);
    rates[i] = clip.sample_rate;
    ids[i] = clip.source_id;
    clean.features[i] = extract_features(clip, feature);
    for (std::size_t j = 0; j < n_snr; ++j) {
      noisy[j][i] = extract_features(add_awgn(clip, snr_db[j], mix_seed(harness.seed, i, j)), feature);
    }
  });
  check_uniform_rates(rates, ids);

  const FoldPlan plan = kfold_split(clean.labels, clean.classes.size(), harness.folds, harness.seed);
  std::vector<Dictionary> dicts(plan.k);
  parallel_for(plan.k, harness.jobs, [&](std::size_t f) {
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < n; ++i) {
      if (plan.assignments[i] != f) train.push_back(i);
    }
    dicts[f] = dictionary_for(clean, train, classifier, classifier.seed);
  });

  // Row 0 is the clean condition, rows 1..n_snr follow snr_db order.
  std::vector<std::vector<char>> correct(n_snr + 1, std::vector<char>(n, 0));
  parallel_for(n, harness.jobs, [&](std::size_t i) {
    const Dictionary& dict = dicts[plan.assignments[i]];
    correct[0][i] = classify(dict, clean.features[i], classifier).predicted == clean.labels[i];
    for (std::size_t j = 0; j < n_snr; ++j) {
      correct[j + 1][i] = classify(dict, noisy[j][i], classifier).predicted == clean.labels[i];
    }
  });

  auto fold_accuracies = [&](const std::vector<char>& row) {
    std::vector<double> hits(plan.k, 0.0), counts(plan.k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      counts[plan.assignments[i]] += 1.0;
      hits[plan.assignments[i]] += row[i] ? 1.0 : 0.0;
    }
    for (std::size_t f = 0; f < plan.k; ++f) hits[f] /= counts[f];
    return hits;
  };

  NoiseReport report;
  const auto total_clean = std::accumulate(correct[0].begin(), correct[0].end(), 0.0);
  report.clean_accuracy = total_clean / static_cast<double>(n);
  for (std::size_t j = 0; j < n_snr; ++j) {
    NoisePoint p;
    p.snr_db = snr_db[j];
    const auto folds = fold_accuracies(correct[j + 1]);
    p.accuracy_mean = std::accumulate(correct[j + 1].begin(), correct[j + 1].end(), 0.0) /
                      static_cast<double>(n);
    p.accuracy_stddev = stddev_of(folds);
    std::vector<double> cosines(n);
    for (std::size_t i = 0; i < n; ++i) {
      cosines[i] = cosine_similarity(clean.features[i].values, noisy[j][i].values);
    }
    p.cosine_mean = mean_of(cosines);
    p.cosine_stddev = stddev_of(cosines);
    report.points.push_back(p);
  }
  return report;
}

// ---- emitters --------------------------------------------------------------------------------

namespace {

void write_config_header(std::ostream& out, const std::string& snapshot) {
  out << "# config_hash=" << hex64(fnv1a(snapshot)) << '\n';
  out << "# config=" << snapshot << '\n';
}

}  // namespace

void write_report_csv(std::ostream& out, const EvalReport& report) {
  write_config_header(out, report.config_snapshot);
  const auto& cm = report.confusion;
  out << "confusion,truth\\predicted";
  for (const auto& c : report.classes) out << ',' << csv::escape(c);
  out << '\n';
  for (std::size_t i = 0; i < cm.n_classes; ++i) {
    out << "confusion," << csv::escape(report.classes[i]);
    for (std::size_t j = 0; j < cm.n_classes; ++j) out << ',' << cm.at(i, j);
    out << '\n';
  }
  const auto acc = cm.accuracy();
  out << "metric,accuracy," << (acc ? csv::format_double(*acc) : std::string("n/a")) << '\n';
  out << "metric,n_classified," << cm.total() << '\n';
  out << "metric,n_correct," << cm.trace() << '\n';
  for (std::size_t f = 0; f < report.per_fold_accuracy.size(); ++f) {
    out << "metric,fold_" << f << "_accuracy," << csv::format_double(report.per_fold_accuracy[f])
        << '\n';
    out << "metric,fold_" << f << "_count," << report.per_fold_count[f] << '\n';
  }
  out << "reference,published_gtzan_accuracy," << csv::format_double(kPublishedGtzanAccuracy) << '\n';
  out << "reference,published_feature_dimension," << kPublishedFeatureDimension << '\n';
}

void write_curve_csv(std::ostream& out, std::span<const LearningCurve> curves,
                     const std::string& snapshot) {
  write_config_header(out, snapshot);
  out << "# x = training clips per class; mean/stddev = classification error percent over trials\n";
  out << "# published error % (second_fft) at 1,10,20,30,40,50,70,80,100: "
         "19.4,10.5,8.5,6.9,4.9,2.7,1.4,1,0.8\n";
  out << "# published error % (stage2_only) at 1,10,20,30,40,50,70,80,100: "
         "95,45.3,23.6,18.1,14.8,12.3,10.4,9.2,8.5\n";
  out << "# note: the published table header reads 'test data number' but describes training "
         "samples per class; x here is training samples per class\n";
  for (const auto& curve : curves) {
    out << "# series=" << to_string(curve.mode) << " test_per_class=" << curve.test_per_class << '\n';
    out << "x,mean,stddev\n";
    for (const auto& p : curve.points) {
      out << p.train_per_class << ',' << csv::format_double(p.mean_error_pct) << ','
          << csv::format_double(p.stddev_error_pct) << '\n';
    }
  }
}

void write_noise_csv(std::ostream& out, const NoiseReport& report, const std::string& snapshot) {
  write_config_header(out, snapshot);
  out << "# clean_accuracy=" << csv::format_double(report.clean_accuracy) << '\n';
  out << "# series=accuracy (x = SNR dB; mean/stddev over folds)\n";
  out << "x,mean,stddev\n";
  for (const auto& p : report.points) {
    out << csv::format_double(p.snr_db) << ',' << csv::format_double(p.accuracy_mean) << ','
        << csv::format_double(p.accuracy_stddev) << '\n';
  }
  out << "# series=feature_cosine (x = SNR dB; clean vs noisy feature, mean/stddev over clips)\n";
  out << "x,mean,stddev\n";
  for (const auto& p : report.points) {
    out << csv::format_double(p.snr_db) << ',' << csv::format_double(p.cosine_mean) << ','
        << csv::format_double(p.cosine_stddev) << '\n';
  }
}

std::string summarize(const EvalReport& report) {
  std::ostringstream os;
  const auto acc = report.confusion.accuracy();
  os << "classified " << report.confusion.total() << " clips in " << report.per_fold_accuracy.size()
     << " folds\n";
  if (acc) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * *acc);
    os << "accuracy: " << buf << "  (published GTZAN figure: 95.7% at dimension 35)\n";
  } else {
    os << "accuracy: n/a\n";
  }
  for (std::size_t f = 0; f < report.per_fold_accuracy.size(); ++f) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * report.per_fold_accuracy[f]);
    os << "  fold " << f << ": " << buf << " of " << report.per_fold_count[f] << '\n';
  }
  os << "confusion (rows = truth):\n";
  for (std::size_t i = 0; i < report.confusion.n_classes; ++i) {
    os << "  " << report.classes[i] << ':';
    for (std::size_t j = 0; j < report.confusion.n_classes; ++j) os << ' ' << report.confusion.at(i, j);
    os << '\n';
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", report.wall_time_s);
  os << "wall time: " << buf << " s\n";
  return os.str();
}

}  // namespace genresrc
