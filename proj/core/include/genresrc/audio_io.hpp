#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace genresrc {

// Mono sample buffer. Decoded 16-bit PCM is scaled so full scale maps to
// +/-1.0 (sample / 32768).
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string source_id;

  std::size_t size() const noexcept { return samples.size(); }
  double duration_s() const noexcept {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

struct DatasetEntry {
  std::filesystem::path clip_path;
  std::string label;
};

// entries are sorted by (label, filename); classes are sorted
// lexicographically, which fixes fold assignment and tie-breaking order.
struct DatasetIndex {
  std::vector<DatasetEntry> entries;
  std::vector<std::string> classes;

  // Position of `label` in `classes`, or -1.
  int class_index(const std::string& label) const;
};

// ---- decoding -------------------------------------------------------------

// Sniffs the container from its magic bytes (RIFF/WAVE or .snd).
AudioClip decode_audio(std::span<const std::uint8_t> bytes, const std::string& source_id);
AudioClip load_clip(const std::filesystem::path& path);

// ---- encoding (16-bit PCM) -------------------------------------------------

std::int16_t quantize_pcm16(double sample) noexcept;

std::vector<std::uint8_t> encode_wav(std::span<const std::int16_t> interleaved,
                                     int channels, int sample_rate);
std::vector<std::uint8_t> encode_au(std::span<const std::int16_t> interleaved,
                                    int channels, int sample_rate);

void save_wav(const AudioClip& clip, const std::filesystem::path& path);

// ---- dataset ---------------------------------------------------------------

// Layout: <root>/<class>/<file>.{wav,au}. Directories without audio files
// are ignored; no audio at all raises EmptyDataset.
DatasetIndex scan_dataset(const std::filesystem::path& root);

// ---- synthesis and perturbation -------------------------------------------

struct PureTone {
  double frequency_hz = 440.0;
};

// (1 + depth * sin(2 pi rate t)) * sin(2 pi carrier t), rescaled to peak 0.9.
struct AmTone {
  double carrier_hz = 440.0;
  double envelope_hz = 4.0;
  double depth = 1.0;
};

struct WhiteNoise {};

using SynthSpec = std::variant<PureTone, AmTone, WhiteNoise>;

std::string describe(const SynthSpec& spec);

AudioClip synth_clip(const SynthSpec& spec, double duration_s, int sample_rate,
                     std::uint64_t seed);

double signal_power(std::span<const double> samples) noexcept;

// Adds zero-mean Gaussian noise with power P_signal / 10^(snr_db / 10).
// No clipping or renormalisation is applied.
AudioClip add_awgn(const AudioClip& clip, double snr_db, std::uint64_t seed);

// ---- synthetic corpus --------------------------------------------------------

// One class per envelope rate. Rates are spread evenly over [2, 8] Hz (4
// classes give 2/4/6/8 Hz), below the 10 Hz frame-rate Nyquist of the
// default 50 ms hop. Each clip draws its carrier and depth at random and
// carries a light noise floor.
struct CorpusSpec {
  std::size_t classes = 4;
  std::size_t clips_per_class = 50;
  double duration_s = 5.0;
  int sample_rate = 22050;
  double noise_snr_db = 30.0;
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::vector<AudioClip> clips;
  std::vector<int> labels;
  std::vector<std::string> classes;
  std::vector<double> envelope_hz;  // per class
};

SyntheticCorpus synth_corpus(const CorpusSpec& spec);

// Writes <root>/<class>/<class>_<nnn>.wav and returns the written paths.
std::vector<std::filesystem::path> write_corpus(const SyntheticCorpus& corpus,
                                                const std::filesystem::path& root);

}  // namespace genresrc
