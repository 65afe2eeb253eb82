// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "yoho/audio_io.hpp"
#include "yoho/codec.hpp"
#include "yoho/rng.hpp"

namespace yoho::synth {

// Dataset-level generation parameters. Events are placed uniformly at random
// without same-class overlap; the event timeline for a given (split, index)
// is shared by every domain so clean and noisy variants carry identical
// annotations.
struct SynthConfig {
  std::vector<std::string> scenes = {"vehicle", "outdoor", "indoor"};
  std::vector<double> snrs_db = {-3.0, -9.0};
  bool include_clean = true;
  int train_files = 2;
  int val_files = 1;
  int test_files = 1;
  double train_duration_s = 180.0;
  double val_duration_s = 60.0;
  double test_duration_s = 60.0;
  double event_density_per_min = 8.0;
  std::vector<std::string> classes = codec::default_classes();
  std::uint64_t seed = 1234;
  int sample_rate = audio::kCanonicalSampleRate;
};

struct ManifestEntry {
  std::string audio;       // relative to the dataset root
  std::string annotation;  // relative to the dataset root
  std::string scene;       // "vehicle" | "outdoor" | "indoor" | "clean"
  std::optional<double> snr_db;
  std::string split;  // "train" | "val" | "test"
  double duration_s = 0.0;
};

struct DatasetManifest {
  std::vector<std::string> classes;
  std::uint64_t seed = 0;
  int sample_rate = audio::kCanonicalSampleRate;
  std::vector<ManifestEntry> files;
};

// "clean" or "<scene>_<snr>dB", e.g. "vehicle_-9dB".
std::string domain_name(const std::string& scene, std::optional<double> snr_db);
std::string domain_of(const ManifestEntry& entry);
std::vector<std::string> list_domains(const DatasetManifest& manifest);
std::vector<const ManifestEntry*> entries_for(const DatasetManifest& manifest,
                                              const std::string& domain,
                                              const std::string& split);

// Synthetic stand-in event sources with class-distinct spectral signatures:
// class 0 an amplitude-modulated low tone, class 1 a broadband noise burst,
// class 2 a decaying impulse train. Peak amplitude is normalized to 0.5.
// Errors: "unknown-class".
audio::AudioClip gen_event_clip(int class_index, Rng& rng,
                                int sample_rate = audio::kCanonicalSampleRate);

// Stationary scene noise with a per-scene spectral tilt, exact duration.
// Errors: "clean-has-no-background", "unknown-scene".
audio::AudioClip gen_background(const std::string& scene, double duration_s, Rng& rng,
                                int sample_rate = audio::kCanonicalSampleRate);

// Random timeline of events summed into one track.
struct Timeline {
  audio::AudioClip track;
  codec::EventList events;
};
Timeline place_events(std::span<const std::string> classes, double duration_s,
                      double density_per_min, Rng& rng,
                      int sample_rate = audio::kCanonicalSampleRate);

// Scales the background so the event-active region hits the requested SNR:
// gain = sqrt(P_sig / (P_noise * 10^(snr/10))) with both powers measured over
// event-active samples; the sum is then peak-normalized to at most 0.99.
// An empty timeline returns the background alone. Errors: "silent-background".
struct MixResult {
  audio::AudioClip mixture;
  codec::EventList events;
  double background_gain = 1.0;
  double norm_gain = 1.0;
};
MixResult mix_at_snr(const Timeline& timeline, const audio::AudioClip& background,
                     double snr_db);

// Generates <out>/<domain>/{train,val,test}/ WAV + TSV pairs plus
// <out>/manifest.json; byte-identical for a fixed seed.
// Errors: "unwritable-path".
DatasetManifest build_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir);

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace yoho::synth
