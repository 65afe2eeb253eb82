// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace yoho::audio {

inline constexpr int kCanonicalSampleRate = 44100;

// Mono sample buffer, amplitudes in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kCanonicalSampleRate;

  double duration_s() const {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
  }
};

// Decodes a RIFF/WAVE file. Accepts 16-bit PCM (format tag 1) and 32-bit
// IEEE float (tag 3); multi-channel input is averaged to mono; the sample
// rate is preserved. Error codes: "missing-file", "bad-riff",
// "unsupported-codec", "truncated".
AudioClip read_wav(const std::filesystem::path& path);

// Writes 16-bit PCM mono little-endian. Samples are clipped to [-1, 1] and
// quantized round-to-nearest with saturation at 32767.
// Error codes: "unwritable-path", "non-finite-sample".
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

// Mean-square power (1/N) * sum(s_i^2). Errors with "empty-sequence".
double rms_power(std::span<const double> samples);

}  // namespace yoho::audio
