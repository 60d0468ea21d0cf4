#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "genresrc/audio_io.hpp"

namespace genresrc {

enum class FftLenPolicy {
  NextPowerOfTwo,  // smallest power of two >= window length
};

// Analysis window settings. Defaults are 100 ms Hamming windows with 50%
// overlap.
struct FrameConfig {
  double window_len_s = 0.1;
  double hop_fraction = 0.5;
  FftLenPolicy fft_len_policy = FftLenPolicy::NextPowerOfTwo;

  // Throws BadConfig if the fields are out of range or the window is
  // shorter than 2 samples at `sample_rate`.
  void validate(int sample_rate) const;

  std::size_t window_samples(int sample_rate) const;
  std::size_t hop_samples(int sample_rate) const;
  std::size_t fft_len(int sample_rate) const;
};

// Row-major magnitude matrix, one row per frame.
struct Spectrogram {
  std::vector<double> data;
  std::size_t n_frames = 0;
  std::size_t n_bins = 0;

  std::span<double> row(std::size_t t) { return {data.data() + t * n_bins, n_bins}; }
  std::span<const double> row(std::size_t t) const { return {data.data() + t * n_bins, n_bins}; }
};

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }
std::size_t next_power_of_two(std::size_t n) noexcept;

// Symmetric Hamming window, w[k] = 0.54 - 0.46 cos(2 pi k / (n - 1)).
std::vector<double> hamming_window(std::size_t n);

// floor((L - W) / H) + 1 full frames; trailing samples are dropped.
std::size_t frame_count(std::size_t length, std::size_t window, std::size_t hop);

// Each frame is the W-sample slice times the Hamming window.
std::vector<std::vector<double>> frame_signal(const AudioClip& clip, const FrameConfig& cfg);

// In-place iterative radix-2 FFT. data.size() must be a power of two.
void fft_inplace(std::span<std::complex<double>> data);

// |X[k]|, k = 0..fft_len/2, of the frame zero-padded to fft_len.
std::vector<double> dft_magnitude(std::span<const double> frame, std::size_t fft_len);

// Stage 1-2 in one pass: windowed frames -> half-spectrum magnitudes.
Spectrogram magnitude_spectrogram(const AudioClip& clip, const FrameConfig& cfg);

}  // namespace genresrc
