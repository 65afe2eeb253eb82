// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "yoho/audio_io.hpp"
#include "yoho/rng.hpp"

namespace yoho::features {

// STFT / mel parameters. The defaults reproduce a (40, 257) log-mel window
// for 2.56 s of audio at 44.1 kHz: floor(112896 / 441) + 1 == 257 frames.
struct FeatureConfig {
  double window_len_s = 2.56;
  double hop_len_s = 1.96;
  int sample_rate = 44100;
  int n_mels = 40;
  int stft_frame = 1024;
  int stft_hop = 441;
  int fft_size = 1024;
  double log_floor = 1e-10;

  int window_samples() const {
    return static_cast<int>(std::llround(window_len_s * sample_rate));
  }
  int frames_per_window() const { return window_samples() / stft_hop + 1; }
};

// Row-major real matrix; rows() x cols() with row stride cols().
struct Matrix {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<double> v;

  Matrix() = default;
  Matrix(int rows, int cols) : n_rows(rows), n_cols(cols), v(static_cast<std::size_t>(rows) * cols, 0.0) {}
  double& at(int r, int c) { return v[static_cast<std::size_t>(r) * n_cols + c]; }
  double at(int r, int c) const { return v[static_cast<std::size_t>(r) * n_cols + c]; }
};

// One feature window: n_mels x frames_per_window values (mel-bin major),
// narrowed to f32 so cached and freshly computed features are bit-identical.
struct LogMelExample {
  int n_mels = 0;
  int n_frames = 0;
  std::vector<float> values;  // [mel * n_frames + frame]
  double offset_s = 0.0;

  float& at(int mel, int frame) { return values[static_cast<std::size_t>(mel) * n_frames + frame]; }
  float at(int mel, int frame) const { return values[static_cast<std::size_t>(mel) * n_frames + frame]; }
};

struct SpecAugmentParams {
  int freq_masks = 2;
  int freq_max_width = 8;
  int time_masks = 2;
  int time_max_width = 25;
};

// HTK mel scale.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Centered magnitude-squared STFT: reflection padding of fft_size/2 on each
// side, periodic Hann window of stft_frame samples, hop stft_hop. Output is
// (fft_size/2 + 1) x T with T = floor(N / stft_hop) + 1.
// Errors: "rate-mismatch", "empty-clip".
Matrix power_spectrogram(const audio::AudioClip& clip, const FeatureConfig& cfg);

// n_mels x (fft_size/2 + 1) triangular filters, centers equally spaced in mel
// between 0 Hz and sample_rate/2, no area normalization.
Matrix mel_filterbank(const FeatureConfig& cfg);

// ln(max(fb * power, log_floor)). Errors: "shape-mismatch".
Matrix log_mel(const Matrix& power, const Matrix& fb, const FeatureConfig& cfg);

// Splits a clip into overlapping windows at offsets k * hop_len_s,
// k = 0..max(0, ceil((dur - window_len_s) / hop_len_s)); the final window is
// zero-padded in the sample domain. An empty clip yields one padded window.
// Errors: "rate-mismatch".
std::vector<LogMelExample> window_examples(const audio::AudioClip& clip, const FeatureConfig& cfg);

// Time/frequency masking. Masked bins are set to the example's pre-mask mean;
// mask widths are drawn uniformly in [0, max_width]. Returns a new example.
// Errors: "mask-too-wide".
LogMelExample spec_augment(const LogMelExample& ex, Rng& rng, const SpecAugmentParams& params);

// Feature cache: magic "YMEL", u32 version, u32 example count, then per
// example f64 offset_s and n_mels*n_frames f32 row-major values.
void write_feature_cache(const std::filesystem::path& path,
                         const std::vector<LogMelExample>& examples);
std::vector<LogMelExample> read_feature_cache(const std::filesystem::path& path,
                                              const FeatureConfig& cfg);

}  // namespace yoho::features
