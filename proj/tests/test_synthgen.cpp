// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "yoho/error.hpp"
#include "yoho/features.hpp"
#include "yoho/synthgen.hpp"

using namespace yoho;
namespace fs = std::filesystem;

namespace {

double spectral_centroid(const audio::AudioClip& clip) {
  features::FeatureConfig cfg;
  const auto p = features::power_spectrogram(clip, cfg);
  double num = 0.0, den = 0.0;
  for (int k = 0; k < p.n_rows; ++k) {
    const double f = static_cast<double>(k) * cfg.sample_rate / cfg.fft_size;
    for (int t = 0; t < p.n_cols; ++t) {
      num += f * p.at(k, t);
      den += p.at(k, t);
    }
  }
  return den > 0 ? num / den : 0.0;
}

// time-averaged log-mel profile; scene color makes these differ strongly
std::vector<double> mel_profile(const audio::AudioClip& clip) {
  features::FeatureConfig cfg;
  const auto p = features::power_spectrogram(clip, cfg);
  const auto fb = features::mel_filterbank(cfg);
  const auto lm = features::log_mel(p, fb, cfg);
  std::vector<double> prof(static_cast<std::size_t>(lm.n_rows), 0.0);
  for (int m = 0; m < lm.n_rows; ++m) {
    for (int t = 0; t < lm.n_cols; ++t) prof[m] += lm.at(m, t);
    prof[m] /= lm.n_cols;
  }
  return prof;
}

double profile_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double mx = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mx = std::max(mx, std::abs(a[i] - b[i]));
  return mx;
}

std::vector<unsigned char> slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::vector<unsigned char>((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("event clips are deterministic per seed with peak 0.5") {
  for (int cls = 0; cls < 3; ++cls) {
    Rng r1(1000 + cls), r2(1000 + cls);
    const auto a = synth::gen_event_clip(cls, r1);
    const auto b = synth::gen_event_clip(cls, r2);
    CHECK(a.samples == b.samples);

    double peak = 0.0;
    for (double s : a.samples) peak = std::max(peak, std::abs(s));
    CHECK(peak == doctest::Approx(0.5).epsilon(1e-6));
  }
  Rng rng(1);
  CHECK_THROWS_WITH_AS(synth::gen_event_clip(3, rng), doctest::Contains("unknown-class"),
                       Error);
}

TEST_CASE("class 0 sits below class 1 in spectral centroid across 50 seeds") {
  for (int seed = 0; seed < 50; ++seed) {
    Rng r0(7000 + seed), r1(9000 + seed);
    const double c0 = spectral_centroid(synth::gen_event_clip(0, r0));
    const double c1 = spectral_centroid(synth::gen_event_clip(1, r1));
    REQUIRE(c0 < c1);
  }
}

TEST_CASE("backgrounds have exact length, positive power, distinct spectra") {
  Rng rng(5);
  const auto v = synth::gen_background("vehicle", 60.0, rng);
  CHECK(v.samples.size() == 2646000u);
  CHECK(audio::rms_power(v.samples) > 0.0);

  // same seed, different scenes: the low-band color signatures stay far
  // apart in the mel profile (rumble+70 Hz hum / 105 Hz shoulder / 350 Hz
  // shoulder + 140 Hz hum)
  Rng ra(6), rb(6), rv(6);
  const auto pv = mel_profile(synth::gen_background("vehicle", 2.0, rv));
  const auto po = mel_profile(synth::gen_background("outdoor", 2.0, ra));
  const auto pi = mel_profile(synth::gen_background("indoor", 2.0, rb));
  CHECK(profile_gap(pv, po) > 1.5);
  CHECK(profile_gap(pv, pi) > 1.5);
  CHECK(profile_gap(po, pi) > 1.5);

  Rng rc(7);
  CHECK_THROWS_WITH_AS(synth::gen_background("clean", 1.0, rc),
                       doctest::Contains("clean-has-no-background"), Error);
  CHECK_THROWS_WITH_AS(synth::gen_background("space", 1.0, rc),
                       doctest::Contains("unknown-scene"), Error);
}

TEST_CASE("mixing gain: 0 dB with equal powers is exactly 1; -9 dB is sqrt(10^0.9)") {
  synth::Timeline tl;
  tl.track.sample_rate = 44100;
  tl.track.samples.assign(44100, 0.3);
  tl.events = {{0.0, 1.0, "babycry"}};

  audio::AudioClip bg;
  bg.sample_rate = 44100;
  bg.samples.assign(44100, 0.3);

  const auto zero_db = synth::mix_at_snr(tl, bg, 0.0);
  CHECK(zero_db.background_gain == 1.0);

  const auto minus9 = synth::mix_at_snr(tl, bg, -9.0);
  CHECK(minus9.background_gain == doctest::Approx(2.8183829).epsilon(1e-6));
  CHECK(minus9.events.size() == 1);

  audio::AudioClip silent;
  silent.sample_rate = 44100;
  silent.samples.assign(44100, 0.0);
  CHECK_THROWS_WITH_AS(synth::mix_at_snr(tl, silent, 0.0),
                       doctest::Contains("silent-background"), Error);
}

TEST_CASE("an empty timeline mixes to background only") {
  synth::Timeline tl;
  tl.track.sample_rate = 44100;
  tl.track.samples.assign(4410, 0.0);

  Rng rng(8);
  const auto bg = synth::gen_background("outdoor", 0.1, rng);
  const auto out = synth::mix_at_snr(tl, bg, -3.0);
  CHECK(out.events.empty());
  REQUIRE(out.mixture.samples.size() == bg.samples.size());
}

TEST_CASE("re-measured SNR stays within 0.05 dB of the request") {
  const auto& classes = codec::default_classes();
  for (int trial = 0; trial < 10; ++trial) {
    Rng rng(4000 + trial);
    auto tl = synth::place_events(classes, 8.0, 20.0, rng);
    REQUIRE_FALSE(tl.events.empty());
    Rng bg_rng(5000 + trial);
    const auto bg = synth::gen_background("outdoor", 8.0, bg_rng);
    const double target = trial % 2 == 0 ? -3.0 : -9.0;
    const auto mixed = synth::mix_at_snr(tl, bg, target);

    // recompute both active-region powers from the mixture and the known track
    std::vector<std::uint8_t> active(tl.track.samples.size(), 0);
    for (const auto& ev : tl.events) {
      const auto lo = static_cast<std::size_t>(std::floor(ev.onset_s * 44100));
      const auto hi =
          std::min(active.size(), static_cast<std::size_t>(std::ceil(ev.offset_s * 44100)));
      for (std::size_t i = lo; i < hi; ++i) active[i] = 1;
    }
    double sig = 0.0, noise = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (!active[i]) continue;
      const double ev = mixed.norm_gain * tl.track.samples[i];
      const double res = mixed.mixture.samples[i] - ev;
      sig += ev * ev;
      noise += res * res;
      ++n;
    }
    const double snr = 10.0 * std::log10(sig / noise);
    REQUIRE(std::abs(snr - target) <= 0.05);
  }
}

TEST_CASE("placed events never overlap within a class and stay in bounds") {
  const auto& classes = codec::default_classes();
  Rng rng(77);
  const auto tl = synth::place_events(classes, 30.0, 16.0, rng);
  REQUIRE_FALSE(tl.events.empty());
  for (const auto& ev : tl.events) {
    REQUIRE(ev.onset_s >= 0.0);
    REQUIRE(ev.offset_s <= 30.0);
  }
  for (std::size_t i = 0; i < tl.events.size(); ++i) {
    for (std::size_t j = i + 1; j < tl.events.size(); ++j) {
      if (tl.events[i].label != tl.events[j].label) continue;
      const bool overlap = tl.events[i].onset_s < tl.events[j].offset_s &&
                           tl.events[j].onset_s < tl.events[i].offset_s;
      REQUIRE_FALSE(overlap);
    }
  }
}

TEST_CASE("build_dataset is deterministic, aligned across domains") {
  synth::SynthConfig cfg;
  cfg.scenes = {"vehicle", "indoor"};
  cfg.snrs_db = {-9.0};
  cfg.train_files = 1;
  cfg.val_files = 1;
  cfg.test_files = 1;
  cfg.train_duration_s = 4.0;
  cfg.val_duration_s = 3.0;
  cfg.test_duration_s = 3.0;
  cfg.event_density_per_min = 45.0;
  cfg.seed = 22;

  const fs::path out1 = fs::temp_directory_path() / "yoho_ds_a";
  const fs::path out2 = fs::temp_directory_path() / "yoho_ds_b";
  fs::remove_all(out1);
  fs::remove_all(out2);
  const auto m1 = synth::build_dataset(cfg, out1);
  const auto m2 = synth::build_dataset(cfg, out2);

  REQUIRE(m1.files.size() == 9);  // 3 domains x 3 files
  CHECK(synth::list_domains(m1) ==
        std::vector<std::string>{"clean", "vehicle_-9dB", "indoor_-9dB"});

  for (std::size_t i = 0; i < m1.files.size(); ++i) {
    CHECK(slurp(out1 / m1.files[i].audio) == slurp(out2 / m2.files[i].audio));
    CHECK(slurp(out1 / m1.files[i].annotation) == slurp(out2 / m2.files[i].annotation));
  }
  CHECK(slurp(out1 / "manifest.json") == slurp(out2 / "manifest.json"));

  // the same (split, index) annotation is byte-identical in every domain
  const auto clean_train = synth::entries_for(m1, "clean", "train");
  const auto vehicle_train = synth::entries_for(m1, "vehicle_-9dB", "train");
  REQUIRE(clean_train.size() == 1);
  REQUIRE(vehicle_train.size() == 1);
  CHECK(slurp(out1 / clean_train[0]->annotation) == slurp(out1 / vehicle_train[0]->annotation));

  // manifest io round trip
  const auto back = synth::read_manifest(out1 / "manifest.json");
  CHECK(back.files.size() == m1.files.size());
  CHECK(back.classes == m1.classes);
  CHECK(back.files[3].scene == m1.files[3].scene);

  // annotated spans stay inside the file and never overlap within a class
  for (const auto& e : m1.files) {
    const auto events = codec::read_annotations(out1 / e.annotation);
    for (const auto& ev : events) {
      REQUIRE(ev.onset_s >= 0.0);
      REQUIRE(ev.offset_s <= e.duration_s + 1e-9);
    }
  }
}

TEST_CASE("density zero produces files with empty annotations") {
  synth::SynthConfig cfg;
  cfg.scenes = {"outdoor"};
  cfg.snrs_db = {-3.0};
  cfg.include_clean = false;
  cfg.train_files = 1;
  cfg.val_files = 1;
  cfg.test_files = 1;
  cfg.train_duration_s = 2.0;
  cfg.val_duration_s = 2.0;
  cfg.test_duration_s = 2.0;
  cfg.event_density_per_min = 0.0;
  cfg.seed = 9;

  const fs::path out = fs::temp_directory_path() / "yoho_ds_empty";
  fs::remove_all(out);
  const auto manifest = synth::build_dataset(cfg, out);
  for (const auto& e : manifest.files) {
    CHECK(codec::read_annotations(out / e.annotation).empty());
    CHECK(audio::read_wav(out / e.audio).samples.size() == 88200u);
  }
}
