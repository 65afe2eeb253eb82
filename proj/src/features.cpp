// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#include "yoho/features.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>

#include "yoho/error.hpp"

namespace yoho::features {

namespace {

constexpr double kPi = 3.14159265358979323846;

// In-place iterative radix-2 FFT. n must be a power of two.
void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Reflection index without edge duplication (period 2*(n-1)); a single
// sample reflects onto itself.
std::size_t reflect_index(long long i, long long n) {
  if (n == 1) return 0;
  const long long period = 2 * (n - 1);
  long long m = i % period;
  if (m < 0) m += period;
  if (m >= n) m = period - m;
  return static_cast<std::size_t>(m);
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Matrix power_spectrogram(const audio::AudioClip& clip, const FeatureConfig& cfg) {
  require(clip.sample_rate == cfg.sample_rate, "rate-mismatch",
          "clip rate " + std::to_string(clip.sample_rate) + " != configured " +
              std::to_string(cfg.sample_rate));
  require(!clip.samples.empty(), "empty-clip", "cannot compute a spectrogram of zero samples");

  const long long n = static_cast<long long>(clip.samples.size());
  const int pad = cfg.fft_size / 2;
  const int n_bins = cfg.fft_size / 2 + 1;
  const int n_frames = static_cast<int>(n / cfg.stft_hop) + 1;

  // periodic Hann
  std::vector<double> window(static_cast<std::size_t>(cfg.stft_frame));
  for (int i = 0; i < cfg.stft_frame; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / static_cast<double>(cfg.stft_frame));
  }

  Matrix out(n_bins, n_frames);
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(cfg.fft_size));

  for (int t = 0; t < n_frames; ++t) {
    const long long start = static_cast<long long>(t) * cfg.stft_hop - pad;
    for (int i = 0; i < cfg.stft_frame; ++i) {
      const double s = clip.samples[reflect_index(start + i, n)];
      buf[i] = std::complex<double>(s * window[i], 0.0);
    }
    for (int i = cfg.stft_frame; i < cfg.fft_size; ++i) buf[i] = {0.0, 0.0};
    fft(buf);
    for (int k = 0; k < n_bins; ++k) {
      out.at(k, t) = std::norm(buf[k]);
    }
  }
  return out;
}

Matrix mel_filterbank(const FeatureConfig& cfg) {
  const int n_bins = cfg.fft_size / 2 + 1;
  const double f_max = cfg.sample_rate / 2.0;
  const double mel_max = hz_to_mel(f_max);

  // n_mels + 2 equally spaced mel points define the triangle corners
  std::vector<double> corners_hz(static_cast<std::size_t>(cfg.n_mels) + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i) {
    corners_hz[i] = mel_to_hz(mel_max * i / static_cast<double>(cfg.n_mels + 1));
  }

  Matrix fb(cfg.n_mels, n_bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double lo = corners_hz[m];
    const double center = corners_hz[m + 1];
    const double hi = corners_hz[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / cfg.fft_size;
      double w = 0.0;
      if (f > lo && f < hi) {
        w = f <= center ? (f - lo) / (center - lo) : (hi - f) / (hi - center);
      }
      fb.at(m, k) = w;
    }
  }
  return fb;
}

Matrix log_mel(const Matrix& power, const Matrix& fb, const FeatureConfig& cfg) {
  require(fb.n_cols == power.n_rows, "shape-mismatch",
          "filterbank is " + std::to_string(fb.n_rows) + "x" + std::to_string(fb.n_cols) +
              " but power has " + std::to_string(power.n_rows) + " bins");

  Matrix out(fb.n_rows, power.n_cols);
  for (int m = 0; m < fb.n_rows; ++m) {
    double* dst = out.v.data() + static_cast<std::size_t>(m) * power.n_cols;
    for (int k = 0; k < fb.n_cols; ++k) {
      const double w = fb.at(m, k);
      if (w == 0.0) continue;
      const double* src = power.v.data() + static_cast<std::size_t>(k) * power.n_cols;
      for (int t = 0; t < power.n_cols; ++t) dst[t] += w * src[t];
    }
    for (int t = 0; t < power.n_cols; ++t) {
      dst[t] = std::log(std::max(dst[t], cfg.log_floor));
    }
  }
  return out;
}

std::vector<LogMelExample> window_examples(const audio::AudioClip& clip,
                                           const FeatureConfig& cfg) {
  require(clip.sample_rate == cfg.sample_rate, "rate-mismatch",
          "clip rate " + std::to_string(clip.sample_rate) + " != configured " +
              std::to_string(cfg.sample_rate));

  const double dur = clip.duration_s();
  const int last_k =
      std::max(0, static_cast<int>(std::ceil((dur - cfg.window_len_s) / cfg.hop_len_s)));
  const int win = cfg.window_samples();
  const long long hop = std::llround(cfg.hop_len_s * cfg.sample_rate);
  const Matrix fb = mel_filterbank(cfg);

  std::vector<LogMelExample> out;
  out.reserve(static_cast<std::size_t>(last_k) + 1);

  audio::AudioClip chunk;
  chunk.sample_rate = cfg.sample_rate;
  chunk.samples.resize(static_cast<std::size_t>(win));

  for (int k = 0; k <= last_k; ++k) {
    const long long start = hop * k;
    for (int i = 0; i < win; ++i) {
      const long long src = start + i;
      chunk.samples[i] =
          src < static_cast<long long>(clip.samples.size()) ? clip.samples[src] : 0.0;
    }
    const Matrix lm = log_mel(power_spectrogram(chunk, cfg), fb, cfg);

    LogMelExample ex;
    ex.n_mels = lm.n_rows;
    ex.n_frames = lm.n_cols;
    ex.offset_s = cfg.hop_len_s * k;
    ex.values.resize(lm.v.size());
    for (std::size_t i = 0; i < lm.v.size(); ++i) ex.values[i] = static_cast<float>(lm.v[i]);
    out.push_back(std::move(ex));
  }
  return out;
}

LogMelExample spec_augment(const LogMelExample& ex, Rng& rng, const SpecAugmentParams& params) {
  require(params.freq_max_width <= ex.n_mels, "mask-too-wide",
          "frequency mask width exceeds " + std::to_string(ex.n_mels) + " mel bins");
  require(params.time_max_width <= ex.n_frames, "mask-too-wide",
          "time mask width exceeds " + std::to_string(ex.n_frames) + " frames");

  LogMelExample out = ex;

  double mean = 0.0;
  for (float v : ex.values) mean += v;
  mean /= static_cast<double>(ex.values.size());
  const float fill = static_cast<float>(mean);

  for (int i = 0; i < params.freq_masks; ++i) {
    const int w = static_cast<int>(rng.range(0, params.freq_max_width));
    const int start = static_cast<int>(rng.range(0, ex.n_mels - w));
    for (int m = start; m < start + w; ++m) {
      for (int t = 0; t < ex.n_frames; ++t) out.at(m, t) = fill;
    }
  }
  for (int i = 0; i < params.time_masks; ++i) {
    const int w = static_cast<int>(rng.range(0, params.time_max_width));
    const int start = static_cast<int>(rng.range(0, ex.n_frames - w));
    for (int m = 0; m < ex.n_mels; ++m) {
      for (int t = start; t < start + w; ++t) out.at(m, t) = fill;
    }
  }
  return out;
}

namespace {

constexpr char kCacheMagic[4] = {'Y', 'M', 'E', 'L'};
constexpr std::uint32_t kCacheVersion = 1;

void put_u32_le(std::ofstream& f, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  f.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32_le(std::ifstream& f) {
  unsigned char b[4];
  f.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_feature_cache(const std::filesystem::path& path,
                         const std::vector<LogMelExample>& examples) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), "unwritable-path", "cannot open for writing: " + path.string());
  f.write(kCacheMagic, 4);
  put_u32_le(f, kCacheVersion);
  put_u32_le(f, static_cast<std::uint32_t>(examples.size()));
  for (const auto& ex : examples) {
    static_assert(sizeof(double) == 8 && sizeof(float) == 4);
    f.write(reinterpret_cast<const char*>(&ex.offset_s), 8);
    f.write(reinterpret_cast<const char*>(ex.values.data()),
            static_cast<std::streamsize>(ex.values.size() * 4));
  }
  f.flush();
  require(f.good(), "unwritable-path", "write failed: " + path.string());
}

std::vector<LogMelExample> read_feature_cache(const std::filesystem::path& path,
                                              const FeatureConfig& cfg) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "missing-file", "cannot open " + path.string());
  char magic[4];
  f.read(magic, 4);
  require(f.good() && std::memcmp(magic, kCacheMagic, 4) == 0, "bad-magic",
          "not a feature cache: " + path.string());
  const std::uint32_t version = get_u32_le(f);
  require(version == kCacheVersion, "version-mismatch",
          "cache version " + std::to_string(version));
  const std::uint32_t count = get_u32_le(f);
  require(f.good(), "truncated", "cache header incomplete: " + path.string());

  const std::size_t per = static_cast<std::size_t>(cfg.n_mels) * cfg.frames_per_window();
  std::vector<LogMelExample> out(count);
  for (auto& ex : out) {
    ex.n_mels = cfg.n_mels;
    ex.n_frames = cfg.frames_per_window();
    ex.values.resize(per);
    f.read(reinterpret_cast<char*>(&ex.offset_s), 8);
    f.read(reinterpret_cast<char*>(ex.values.data()), static_cast<std::streamsize>(per * 4));
    require(f.good(), "truncated", "cache payload incomplete: " + path.string());
  }
  return out;
}

}  // namespace yoho::features
