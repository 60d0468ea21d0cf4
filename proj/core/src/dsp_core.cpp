#include "genresrc/dsp_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "genresrc/error.hpp"

namespace genresrc {

void FrameConfig::validate(int sample_rate) const {
  if (!(window_len_s > 0.0)) throw Error(ErrorCode::BadConfig, "window_len_s must be positive");
  if (!(hop_fraction > 0.0 && hop_fraction <= 1.0)) {
    throw Error(ErrorCode::BadConfig, "hop_fraction must lie in (0, 1]");
  }
  if (sample_rate <= 0) throw Error(ErrorCode::BadConfig, "sample rate must be positive");
  if (std::llround(window_len_s * sample_rate) < 2) {
    throw Error(ErrorCode::BadConfig, "window shorter than 2 samples at " +
                                          std::to_string(sample_rate) + " Hz");
  }
}

std::size_t FrameConfig::window_samples(int sample_rate) const {
  validate(sample_rate);
  return static_cast<std::size_t>(std::llround(window_len_s * sample_rate));
}

std::size_t FrameConfig::hop_samples(int sample_rate) const {
  const auto w = static_cast<double>(window_samples(sample_rate));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(w * hop_fraction)));
}

std::size_t FrameConfig::fft_len(int sample_rate) const {
  return next_power_of_two(window_samples(sample_rate));
}

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> hamming_window(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::TooShort, "Hamming window needs n >= 2, got " + std::to_string(n));
  std::vector<double> w(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / denom);
  }
  return w;
}

std::size_t frame_count(std::size_t length, std::size_t window, std::size_t hop) {
  if (window == 0 || hop == 0) throw Error(ErrorCode::BadConfig, "window and hop must be positive");
  if (length < window) return 0;
  return (length - window) / hop + 1;
}

std::vector<std::vector<double>> frame_signal(const AudioClip& clip, const FrameConfig& cfg) {
  const std::size_t w = cfg.window_samples(clip.sample_rate);
  const std::size_t h = cfg.hop_samples(clip.sample_rate);
  if (clip.samples.size() < w) {
    throw Error(ErrorCode::ClipTooShort, clip.source_id + ": " + std::to_string(clip.samples.size()) +
                                             " samples, window needs " + std::to_string(w));
  }
  const auto window = hamming_window(w);
  const std::size_t n = frame_count(clip.samples.size(), w, h);
  std::vector<std::vector<double>> frames(n, std::vector<double>(w));
  for (std::size_t t = 0; t < n; ++t) {
    const double* src = clip.samples.data() + t * h;
    for (std::size_t i = 0; i < w; ++i) frames[t][i] = src[i] * window[i];
  }
  return frames;
}

void fft_inplace(std::span<std::complex<double>> data) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) {
    throw Error(ErrorCode::BadLength, "FFT length " + std::to_string(n) + " is not a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  // Twiddles are evaluated directly per index (no recurrence) and cached per
  // thread for the most recent length.
  thread_local std::vector<std::complex<double>> twiddle;
  if (twiddle.size() != n / 2) {
    twiddle.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        // Written out by hand: std::complex operator* carries NaN/Inf
        // recovery that dominates the runtime.
        const std::complex<double> w = twiddle[k * stride];
        const std::complex<double> b = data[i + k + half];
        const std::complex<double> v(b.real() * w.real() - b.imag() * w.imag(),
                                     b.real() * w.imag() + b.imag() * w.real());
        const std::complex<double> u = data[i + k];
        data[i + k] = u + v;
        data[i + k + half] = u - v;
      }
    }
  }
}

namespace {

void check_fft_len(std::size_t frame_len, std::size_t fft_len) {
  if (!is_power_of_two(fft_len)) {
    throw Error(ErrorCode::BadLength, "fft_len " + std::to_string(fft_len) + " is not a power of two");
  }
  if (fft_len < frame_len) {
    throw Error(ErrorCode::BadLength, "fft_len " + std::to_string(fft_len) +
                                          " shorter than frame length " + std::to_string(frame_len));
  }
}

const std::vector<std::complex<double>>& unit_roots(std::size_t n) {
  thread_local std::vector<std::complex<double>> roots;
  if (roots.size() != n / 2 + 1) {
    roots.resize(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) {
      roots[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    }
  }
  return roots;
}

// Half-spectrum magnitudes of a real frame zero-padded to n = 2 * scratch.size():
// even/odd samples are packed into one n/2-point complex transform and
// separated afterwards.
void magnitude_into(std::span<const double> frame, std::span<std::complex<double>> scratch,
                    std::span<double> out) {
  const std::size_t half = scratch.size();
  const std::size_t n = 2 * half;
  if (n == 2) {
    const double a = frame.size() > 0 ? frame[0] : 0.0;
    const double b = frame.size() > 1 ? frame[1] : 0.0;
    out[0] = std::abs(a + b);
    out[1] = std::abs(a - b);
    return;
  }
  std::fill(scratch.begin(), scratch.end(), std::complex<double>{});
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (i & 1U) {
      scratch[i / 2].imag(frame[i]);
    } else {
      scratch[i / 2].real(frame[i]);
    }
  }
  fft_inplace(scratch);
  const auto& roots = unit_roots(n);
  for (std::size_t k = 0; k <= half; ++k) {
    const std::complex<double> zk = scratch[k == half ? 0 : k];
    const std::complex<double> zc = std::conj(scratch[k == 0 ? 0 : half - k]);
    const std::complex<double> even = 0.5 * (zk + zc);
    const std::complex<double> diff = zk - zc;
    // odd = -i/2 * diff
    const std::complex<double> odd(0.5 * diff.imag(), -0.5 * diff.real());
    const std::complex<double> w = roots[k];
    const double re = even.real() + odd.real() * w.real() - odd.imag() * w.imag();
    const double im = even.imag() + odd.real() * w.imag() + odd.imag() * w.real();
    out[k] = std::sqrt(re * re + im * im);
  }
}

}  // namespace

std::vector<double> dft_magnitude(std::span<const double> frame, std::size_t fft_len) {
  check_fft_len(frame.size(), fft_len);
  if (fft_len == 1) return {frame.empty() ? 0.0 : std::abs(frame[0])};
  std::vector<std::complex<double>> scratch(fft_len / 2);
  std::vector<double> mags(fft_len / 2 + 1);
  magnitude_into(frame, scratch, mags);
  return mags;
}

Spectrogram magnitude_spectrogram(const AudioClip& clip, const FrameConfig& cfg) {
  const std::size_t w = cfg.window_samples(clip.sample_rate);
  const std::size_t h = cfg.hop_samples(clip.sample_rate);
  const std::size_t nfft = cfg.fft_len(clip.sample_rate);
  if (clip.samples.size() < w) {
    throw Error(ErrorCode::ClipTooShort, clip.source_id + ": " + std::to_string(clip.samples.size()) +
                                             " samples, window needs " + std::to_string(w));
  }
  const auto window = hamming_window(w);

  Spectrogram spec;
  spec.n_frames = frame_count(clip.samples.size(), w, h);
  spec.n_bins = nfft / 2 + 1;
  spec.data.resize(spec.n_frames * spec.n_bins);

  std::vector<double> frame(w);
  std::vector<std::complex<double>> scratch(nfft / 2);
  for (std::size_t t = 0; t < spec.n_frames; ++t) {
    const double* src = clip.samples.data() + t * h;
    for (std::size_t i = 0; i < w; ++i) frame[i] = src[i] * window[i];
    magnitude_into(frame, scratch, spec.row(t));
  }
  return spec;
}

}  // namespace genresrc
