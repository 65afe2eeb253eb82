// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#include "yoho/audio_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "yoho/error.hpp"

namespace yoho::audio {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatIeeeFloat = 3;

}  // namespace

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "missing-file", "cannot open " + path.string());

  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  require(bytes.size() >= 12, "bad-riff", "file too small for a RIFF header: " + path.string());
  require(std::memcmp(bytes.data(), "RIFF", 4) == 0, "bad-riff",
          "missing RIFF tag: " + path.string());
  require(std::memcmp(bytes.data() + 8, "WAVE", 4) == 0, "bad-riff",
          "missing WAVE tag: " + path.string());

  std::uint16_t format_tag = 0;
  std::uint16_t channels = 0;
  std::uint16_t bits_per_sample = 0;
  std::uint32_t sample_rate = 0;
  bool have_fmt = false;

  const unsigned char* data_ptr = nullptr;
  std::size_t data_len = 0;

  // walk chunks; chunk payloads are word-aligned
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    std::uint32_t chunk_len = read_u32(hdr + 4);
    pos += 8;
    require(pos + chunk_len <= bytes.size(), "truncated",
            "chunk extends past end of file: " + path.string());
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      require(chunk_len >= 16, "bad-riff", "fmt chunk too small: " + path.string());
      const unsigned char* f = bytes.data() + pos;
      format_tag = read_u16(f);
      channels = read_u16(f + 2);
      sample_rate = read_u32(f + 4);
      bits_per_sample = read_u16(f + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data_ptr = bytes.data() + pos;
      data_len = chunk_len;
    }
    pos += chunk_len + (chunk_len & 1);
  }

  require(have_fmt, "bad-riff", "no fmt chunk: " + path.string());
  require(data_ptr != nullptr, "bad-riff", "no data chunk: " + path.string());
  require(channels >= 1, "bad-riff", "zero channels: " + path.string());
  require(sample_rate >= 1, "bad-riff", "zero sample rate: " + path.string());

  const bool pcm16 = format_tag == kFormatPcm && bits_per_sample == 16;
  const bool float32 = format_tag == kFormatIeeeFloat && bits_per_sample == 32;
  require(pcm16 || float32, "unsupported-codec",
          "format tag " + std::to_string(format_tag) + " with " +
              std::to_string(bits_per_sample) + " bits is not supported: " + path.string());

  const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::size_t frame_size = bytes_per_sample * channels;
  const std::size_t n_frames = data_len / frame_size;

  AudioClip clip;
  clip.sample_rate = static_cast<int>(sample_rate);
  clip.samples.resize(n_frames);
  const double inv_channels = 1.0 / static_cast<double>(channels);

  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* s = data_ptr + i * frame_size + c * bytes_per_sample;
      if (pcm16) {
        std::int16_t v = static_cast<std::int16_t>(read_u16(s));
        acc += static_cast<double>(v) / 32768.0;
      } else {
        float v;
        std::uint32_t raw = read_u32(s);
        std::memcpy(&v, &raw, sizeof v);
        acc += std::clamp(static_cast<double>(v), -1.0, 1.0);
      }
    }
    clip.samples[i] = acc * inv_channels;
  }
  return clip;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  for (double s : clip.samples) {
    require(std::isfinite(s), "non-finite-sample", "clip contains a non-finite sample");
  }

  const std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());
  const std::uint32_t data_bytes = n * 2;

  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put_u16(out, 2);   // block align
  put_u16(out, 16);  // bits per sample
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);

  for (double s : clip.samples) {
    double clipped = std::clamp(s, -1.0, 1.0);
    long q = std::lround(clipped * 32768.0);
    if (q > 32767) q = 32767;
    if (q < -32768) q = -32768;
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), "unwritable-path", "cannot open for writing: " + path.string());
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  f.flush();
  require(f.good(), "unwritable-path", "write failed: " + path.string());
}

double rms_power(std::span<const double> samples) {
  require(!samples.empty(), "empty-sequence", "rms_power of an empty sequence");
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return acc / static_cast<double>(samples.size());
}

}  // namespace yoho::audio
