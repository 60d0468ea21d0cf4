#include "run_config.hpp"

#include <fstream>
#include <sstream>

#include "genresrc/csv.hpp"
#include "genresrc/error.hpp"

namespace genresrc::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view why) {
  throw Error(ErrorCode::BadConfig, "config key '" + std::string(key) + "': '" + std::string(value) +
                                        "' " + std::string(why));
}

std::uint64_t to_u64(std::string_view key, std::string_view value) {
  const std::string s = trim(value);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    bad(key, value, "is not a non-negative integer");
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    bad(key, value, "is out of range");
  }
}

double to_double(std::string_view key, std::string_view value) {
  try {
    return csv::parse_double(trim(value));
  } catch (const Error&) {
    bad(key, value, "is not a number");
  }
}

bool to_bool(std::string_view key, std::string_view value) {
  const std::string s = trim(value);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad(key, value, "is not a boolean");
}

template <typename T, typename Parse>
std::vector<T> to_list(std::string_view key, std::string_view value, Parse parse) {
  std::vector<T> out;
  for (const auto& item : csv::split(trim(value))) {
    if (trim(item).empty()) bad(key, value, "contains an empty list item");
    out.push_back(static_cast<T>(parse(key, item)));
  }
  return out;
}

template <typename T, typename Format>
std::string join(const std::vector<T>& items, Format format) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += format(items[i]);
  }
  return out;
}

std::string canonical(std::string_view key) {
  std::string k = trim(key);
  for (char& c : k) {
    if (c == '-') c = '_';
  }
  return k;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k{
      "window_len_s", "hop_fraction", "second_fft_len", "keep_k", "drop_dc",
      "concat_short_term", "feature_mode", "dim", "k_max", "tol", "solver", "lambda",
      "max_iter", "measurement_mode", "seed", "folds", "trials", "jobs", "snr", "sizes",
      "mode", "classes", "clips", "duration", "sample_rate", "corpus_snr"};
  return k;
}

void RunConfig::set(std::string_view raw_key, std::string_view value) {
  const std::string key = canonical(raw_key);
  const std::string v = trim(value);
  if (key == "window_len_s") {
    feature.frame.window_len_s = to_double(key, v);
  } else if (key == "hop_fraction") {
    feature.frame.hop_fraction = to_double(key, v);
  } else if (key == "second_fft_len") {
    feature.second_fft_len = to_u64(key, v);
  } else if (key == "keep_k") {
    feature.keep_k = to_u64(key, v);
  } else if (key == "drop_dc") {
    feature.drop_dc = to_bool(key, v);
  } else if (key == "concat_short_term") {
    feature.concat_short_term = to_bool(key, v);
  } else if (key == "feature_mode") {
    feature.mode = parse_feature_mode(v);
  } else if (key == "dim") {
    classifier.m = to_u64(key, v);
  } else if (key == "k_max") {
    classifier.k_max = to_u64(key, v);
  } else if (key == "tol") {
    classifier.tol = to_double(key, v);
  } else if (key == "solver") {
    classifier.solver = parse_solver_kind(v);
  } else if (key == "lambda") {
    classifier.lambda = to_double(key, v);
  } else if (key == "max_iter") {
    classifier.max_iter = to_u64(key, v);
  } else if (key == "measurement_mode") {
    classifier.measurement = parse_measurement_mode(v);
  } else if (key == "seed") {
    classifier.seed = harness.seed = corpus.seed = to_u64(key, v);
  } else if (key == "folds") {
    harness.folds = to_u64(key, v);
  } else if (key == "trials") {
    harness.trials = to_u64(key, v);
  } else if (key == "jobs") {
    harness.jobs = to_u64(key, v);
    if (harness.jobs == 0) bad(key, v, "must be at least 1");
  } else if (key == "snr") {
    snr_list = to_list<double>(key, v, to_double);
  } else if (key == "sizes") {
    sizes = to_list<std::size_t>(key, v, to_u64);
  } else if (key == "mode") {
    if (v != "both" && v != "second_fft" && v != "stage2_only") bad(key, v, "is not both|second_fft|stage2_only");
    curve_mode = v;
  } else if (key == "classes") {
    corpus.classes = to_u64(key, v);
  } else if (key == "clips") {
    corpus.clips_per_class = to_u64(key, v);
  } else if (key == "duration") {
    corpus.duration_s = to_double(key, v);
  } else if (key == "sample_rate") {
    corpus.sample_rate = static_cast<int>(to_u64(key, v));
  } else if (key == "corpus_snr") {
    corpus.noise_snr_db = to_double(key, v);
  } else {
    throw Error(ErrorCode::BadConfig, "unknown config key '" + key + "'");
  }
}

std::string RunConfig::get(std::string_view raw_key) const {
  const std::string key = canonical(raw_key);
  const auto d = [](double x) { return csv::format_double(x); };
  const auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  if (key == "window_len_s") return d(feature.frame.window_len_s);
  if (key == "hop_fraction") return d(feature.frame.hop_fraction);
  if (key == "second_fft_len") return std::to_string(feature.second_fft_len);
  if (key == "keep_k") return std::to_string(feature.keep_k);
  if (key == "drop_dc") return b(feature.drop_dc);
  if (key == "concat_short_term") return b(feature.concat_short_term);
  if (key == "feature_mode") return std::string(to_string(feature.mode));
  if (key == "dim") return std::to_string(classifier.m);
  if (key == "k_max") return std::to_string(classifier.k_max);
  if (key == "tol") return d(classifier.tol);
  if (key == "solver") return std::string(to_string(classifier.solver));
  if (key == "lambda") return d(classifier.lambda);
  if (key == "max_iter") return std::to_string(classifier.max_iter);
  if (key == "measurement_mode") return std::string(to_string(classifier.measurement));
  if (key == "seed") return std::to_string(classifier.seed);
  if (key == "folds") return std::to_string(harness.folds);
  if (key == "trials") return std::to_string(harness.trials);
  if (key == "jobs") return std::to_string(harness.jobs);
  if (key == "snr") return join(snr_list, d);
  if (key == "sizes") return join(sizes, [](std::size_t x) { return std::to_string(x); });
  if (key == "mode") return curve_mode;
  if (key == "classes") return std::to_string(corpus.classes);
  if (key == "clips") return std::to_string(corpus.clips_per_class);
  if (key == "duration") return d(corpus.duration_s);
  if (key == "sample_rate") return std::to_string(corpus.sample_rate);
  if (key == "corpus_snr") return d(corpus.noise_snr_db);
  throw Error(ErrorCode::BadConfig, "unknown config key '" + key + "'");
}

std::string RunConfig::emit() const {
  std::ostringstream os;
  for (const auto& key : keys()) os << key << " = " << get(key) << '\n';
  return os.str();
}

void RunConfig::apply(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::BadConfig, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    set(t.substr(0, eq), t.substr(eq + 1));
  }
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig cfg;
  cfg.apply(text);
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace genresrc::cli
