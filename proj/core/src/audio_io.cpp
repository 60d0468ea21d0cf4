#include "genresrc/audio_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>

#include "genresrc/error.hpp"
#include "genresrc/hashing.hpp"

namespace genresrc {

namespace fs = std::filesystem;

namespace {

constexpr double kPcmScale = 32768.0;

std::uint16_t read_u16le(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint32_t read_u32le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint32_t read_u32be(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void put_u16le(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}
void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

[[noreturn]] void fail(ErrorCode code, const std::string& source_id, const std::string& what) {
  throw Error(code, source_id + ": " + what);
}

// Interleaved 16-bit frames -> mono by per-sample channel mean.
AudioClip downmix(std::span<const std::uint8_t> pcm, int channels, int sample_rate,
                  bool big_endian, const std::string& source_id) {
  const std::size_t frame_bytes = 2 * static_cast<std::size_t>(channels);
  if (pcm.size() % frame_bytes != 0) {
    fail(ErrorCode::CorruptFile, source_id, "sample data is not a whole number of frames");
  }
  const std::size_t n = pcm.size() / frame_bytes;
  if (n == 0) fail(ErrorCode::EmptyAudio, source_id, "no samples");

  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.source_id = source_id;
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      const std::uint8_t* p = pcm.data() + i * frame_bytes + 2 * static_cast<std::size_t>(c);
      const auto raw = big_endian ? static_cast<std::uint16_t>((p[0] << 8) | p[1]) : read_u16le(p);
      acc += static_cast<std::int16_t>(raw) / kPcmScale;
    }
    clip.samples[i] = acc / channels;
  }
  return clip;
}

AudioClip decode_wav(std::span<const std::uint8_t> bytes, const std::string& source_id) {
  if (bytes.size() < 12) fail(ErrorCode::CorruptFile, source_id, "truncated RIFF header");

  int channels = 0;
  int sample_rate = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t chunk_size = read_u32le(chunk + 4);
    const std::size_t body = pos + 8;
    if (chunk_size > bytes.size() - body) {
      fail(ErrorCode::CorruptFile, source_id, "chunk extends past end of file");
    }
    const std::string id(reinterpret_cast<const char*>(chunk), 4);
    if (id == "fmt ") {
      if (chunk_size < 16) fail(ErrorCode::CorruptFile, source_id, "short fmt chunk");
      const std::uint8_t* f = bytes.data() + body;
      std::uint16_t format = read_u16le(f);
      channels = read_u16le(f + 2);
      sample_rate = static_cast<int>(read_u32le(f + 4));
      const std::uint16_t bits = read_u16le(f + 14);
      if (format == 0xFFFE && chunk_size >= 40) {
        format = read_u16le(f + 24);  // first two bytes of the subformat GUID
      }
      if (format != 1) fail(ErrorCode::UnsupportedFormat, source_id, "WAV codec is not PCM");
      if (bits != 16) {
        fail(ErrorCode::UnsupportedFormat, source_id,
             "WAV bit depth " + std::to_string(bits) + " (only 16-bit supported)");
      }
      if (channels < 1) fail(ErrorCode::CorruptFile, source_id, "zero channels");
      if (sample_rate <= 0) fail(ErrorCode::CorruptFile, source_id, "zero sample rate");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) fail(ErrorCode::CorruptFile, source_id, "data chunk before fmt chunk");
      return downmix(bytes.subspan(body, chunk_size), channels, sample_rate, false, source_id);
    }
    pos = body + chunk_size + (chunk_size & 1U);
  }
  fail(ErrorCode::CorruptFile, source_id, have_fmt ? "missing data chunk" : "missing fmt chunk");
}

AudioClip decode_au(std::span<const std::uint8_t> bytes, const std::string& source_id) {
  if (bytes.size() < 24) fail(ErrorCode::CorruptFile, source_id, "truncated AU header");
  const std::uint32_t offset = read_u32be(bytes.data() + 4);
  const std::uint32_t data_size = read_u32be(bytes.data() + 8);
  const std::uint32_t encoding = read_u32be(bytes.data() + 12);
  const std::uint32_t sample_rate = read_u32be(bytes.data() + 16);
  const std::uint32_t channels = read_u32be(bytes.data() + 20);

  if (encoding != 3) {
    fail(ErrorCode::UnsupportedFormat, source_id,
         "AU encoding " + std::to_string(encoding) + " (only 16-bit linear PCM supported)");
  }
  if (offset < 24 || offset > bytes.size()) fail(ErrorCode::CorruptFile, source_id, "bad data offset");
  if (channels == 0 || channels > 1024) fail(ErrorCode::CorruptFile, source_id, "bad channel count");
  if (sample_rate == 0) fail(ErrorCode::CorruptFile, source_id, "zero sample rate");

  const std::size_t available = bytes.size() - offset;
  std::size_t size = available;
  if (data_size != 0xFFFFFFFFU) {
    if (data_size > available) fail(ErrorCode::CorruptFile, source_id, "data size exceeds file length");
    size = data_size;
  }
  return downmix(bytes.subspan(offset, size), static_cast<int>(channels),
                 static_cast<int>(sample_rate), true, source_id);
}

}  // namespace

int DatasetIndex::class_index(const std::string& label) const {
  const auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label) return -1;
  return static_cast<int>(it - classes.begin());
}

AudioClip decode_audio(std::span<const std::uint8_t> bytes, const std::string& source_id) {
  if (bytes.size() >= 12 && std::equal(bytes.begin(), bytes.begin() + 4, "RIFF") &&
      std::equal(bytes.begin() + 8, bytes.begin() + 12, "WAVE")) {
    return decode_wav(bytes, source_id);
  }
  if (bytes.size() >= 4 && read_u32be(bytes.data()) == 0x2E736E64U) {
    return decode_au(bytes, source_id);
  }
  fail(ErrorCode::UnsupportedFormat, source_id, "not a RIFF/WAVE or .snd file");
}

AudioClip load_clip(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, path.string() + ": cannot open");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_audio(bytes, path.string());
}

std::int16_t quantize_pcm16(double sample) noexcept {
  const double q = std::round(sample * kPcmScale);
  return static_cast<std::int16_t>(std::clamp(q, -32768.0, 32767.0));
}

std::vector<std::uint8_t> encode_wav(std::span<const std::int16_t> interleaved, int channels,
                                     int sample_rate) {
  const auto data_bytes = static_cast<std::uint32_t>(interleaved.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32le(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32le(out, 16);
  put_u16le(out, 1);
  put_u16le(out, static_cast<std::uint16_t>(channels));
  put_u32le(out, static_cast<std::uint32_t>(sample_rate));
  put_u32le(out, static_cast<std::uint32_t>(sample_rate * channels * 2));
  put_u16le(out, static_cast<std::uint16_t>(channels * 2));
  put_u16le(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32le(out, data_bytes);
  for (std::int16_t s : interleaved) put_u16le(out, static_cast<std::uint16_t>(s));
  return out;
}

std::vector<std::uint8_t> encode_au(std::span<const std::int16_t> interleaved, int channels,
                                    int sample_rate) {
  std::vector<std::uint8_t> out;
  out.reserve(24 + interleaved.size() * 2);
  put_u32be(out, 0x2E736E64U);
  put_u32be(out, 24);
  put_u32be(out, static_cast<std::uint32_t>(interleaved.size() * 2));
  put_u32be(out, 3);
  put_u32be(out, static_cast<std::uint32_t>(sample_rate));
  put_u32be(out, static_cast<std::uint32_t>(channels));
  for (std::int16_t s : interleaved) {
    const auto u = static_cast<std::uint16_t>(s);
    out.push_back(static_cast<std::uint8_t>(u >> 8));
    out.push_back(static_cast<std::uint8_t>(u & 0xFF));
  }
  return out;
}

void save_wav(const AudioClip& clip, const fs::path& path) {
  std::vector<std::int16_t> pcm(clip.samples.size());
  std::transform(clip.samples.begin(), clip.samples.end(), pcm.begin(), quantize_pcm16);
  const auto bytes = encode_wav(pcm, 1, clip.sample_rate);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, path.string() + ": write failed");
}

DatasetIndex scan_dataset(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::EmptyDataset, root.string() + ": not a directory");
  }
  std::vector<fs::path> class_dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) class_dirs.push_back(e.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());

  DatasetIndex index;
  for (const auto& dir : class_dirs) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (!e.is_regular_file()) continue;
      std::string ext = e.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (ext == ".wav" || ext == ".au") files.push_back(e.path());
    }
    if (files.empty()) continue;
    std::sort(files.begin(), files.end());
    const std::string label = dir.filename().string();
    index.classes.push_back(label);
    for (auto& f : files) index.entries.push_back({std::move(f), label});
  }
  if (index.entries.empty()) {
    throw Error(ErrorCode::EmptyDataset, root.string() + ": no class directories with audio files");
  }
  return index;
}

std::string describe(const SynthSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&os](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PureTone>) {
          os << "tone(f=" << s.frequency_hz << ")";
        } else if constexpr (std::is_same_v<T, AmTone>) {
          os << "am(f=" << s.carrier_hz << ",r=" << s.envelope_hz << ",d=" << s.depth << ")";
        } else {
          os << "noise()";
        }
      },
      spec);
  return os.str();
}

AudioClip synth_clip(const SynthSpec& spec, double duration_s, int sample_rate, std::uint64_t seed) {
  if (!(duration_s > 0.0)) throw Error(ErrorCode::InvalidSpec, "duration must be positive");
  if (sample_rate <= 0) throw Error(ErrorCode::InvalidSpec, "sample rate must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  if (n == 0) throw Error(ErrorCode::InvalidSpec, "duration shorter than one sample");

  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.source_id = "synth:" + describe(spec) + ":seed=" + std::to_string(seed);
  clip.samples.resize(n);
  const double fs = sample_rate;

  if (const auto* tone = std::get_if<PureTone>(&spec)) {
    if (!(tone->frequency_hz > 0.0)) throw Error(ErrorCode::InvalidSpec, "tone frequency must be positive");
    for (std::size_t i = 0; i < n; ++i) {
      clip.samples[i] = 0.9 * std::sin(kTwoPi * tone->frequency_hz * static_cast<double>(i) / fs);
    }
  } else if (const auto* am = std::get_if<AmTone>(&spec)) {
    if (!(am->carrier_hz > 0.0) || !(am->envelope_hz > 0.0)) {
      throw Error(ErrorCode::InvalidSpec, "AM carrier and envelope rate must be positive");
    }
    if (!(am->depth >= 0.0 && am->depth <= 1.0)) {
      throw Error(ErrorCode::InvalidSpec, "AM depth must lie in [0, 1]");
    }
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / fs;
      const double v = (1.0 + am->depth * std::sin(kTwoPi * am->envelope_hz * t)) *
                       std::sin(kTwoPi * am->carrier_hz * t);
      clip.samples[i] = v;
      peak = std::max(peak, std::abs(v));
    }
    if (peak > 0.0) {
      const double gain = 0.9 / peak;
      for (double& v : clip.samples) v *= gain;
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 0.25);
    for (double& v : clip.samples) v = gauss(rng);
  }
  return clip;
}

double signal_power(std::span<const double> samples) noexcept {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double v : samples) acc += v * v;
  return acc / static_cast<double>(samples.size());
}

AudioClip add_awgn(const AudioClip& clip, double snr_db, std::uint64_t seed) {
  if (clip.samples.empty()) throw Error(ErrorCode::EmptyAudio, clip.source_id + ": no samples");
  const double power = signal_power(clip.samples);
  if (!(power > 0.0)) {
    throw Error(ErrorCode::ZeroPowerSignal, clip.source_id + ": all-zero clip, SNR undefined");
  }
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));

  AudioClip noisy = clip;
  std::ostringstream id;
  id << clip.source_id << "+awgn(" << snr_db << "dB,seed=" << seed << ")";
  noisy.source_id = id.str();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (double& v : noisy.samples) v += gauss(rng);
  return noisy;
}

SyntheticCorpus synth_corpus(const CorpusSpec& spec) {
  if (spec.classes == 0 || spec.clips_per_class == 0) {
    throw Error(ErrorCode::InvalidSpec, "corpus needs at least one class and one clip per class");
  }
  SyntheticCorpus corpus;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    const double rate = spec.classes == 1
                            ? 4.0
                            : 2.0 + 6.0 * static_cast<double>(c) / static_cast<double>(spec.classes - 1);
    char name[32];
    std::snprintf(name, sizeof(name), "am%04.1fhz", rate);
    corpus.classes.emplace_back(name);
    corpus.envelope_hz.push_back(rate);
  }
  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t j = 0; j < spec.clips_per_class; ++j) {
      std::mt19937_64 rng(mix_seed(spec.seed, c, j));
      std::uniform_real_distribution<double> carrier(220.0, 1760.0);
      std::uniform_real_distribution<double> depth(0.6, 1.0);
      const AmTone tone{carrier(rng), corpus.envelope_hz[c], depth(rng)};
      AudioClip clip = synth_clip(tone, spec.duration_s, spec.sample_rate, rng());
      clip = add_awgn(clip, spec.noise_snr_db, rng());
      char id[64];
      std::snprintf(id, sizeof(id), "%s_%03zu", corpus.classes[c].c_str(), j);
      clip.source_id = id;
      corpus.clips.push_back(std::move(clip));
      corpus.labels.push_back(static_cast<int>(c));
    }
  }
  return corpus;
}

std::vector<fs::path> write_corpus(const SyntheticCorpus& corpus, const fs::path& root) {
  std::vector<fs::path> written;
  written.reserve(corpus.clips.size());
  for (const auto& label : corpus.classes) fs::create_directories(root / label);
  for (std::size_t i = 0; i < corpus.clips.size(); ++i) {
    const auto& label = corpus.classes[static_cast<std::size_t>(corpus.labels[i])];
    auto path = root / label / (corpus.clips[i].source_id + ".wav");
    save_wav(corpus.clips[i], path);
    written.push_back(std::move(path));
  }
  return written;
}

}  // namespace genresrc
