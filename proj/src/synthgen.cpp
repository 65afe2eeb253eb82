// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#include "yoho/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "yoho/error.hpp"

namespace yoho::synth {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void normalize_peak(std::vector<double>& samples, double target) {
  double peak = 0.0;
  for (double s : samples) peak = std::max(peak, std::abs(s));
  if (peak <= 0.0) return;
  const double g = target / peak;
  for (double& s : samples) s *= g;
}

// trapezoid fade-in/out so clip boundaries stay click-free
double envelope(double t, double dur, double attack, double release) {
  double e = 1.0;
  if (t < attack) e = t / attack;
  const double tail = dur - t;
  if (tail < release) e = std::min(e, tail / release);
  return std::max(e, 0.0);
}

}  // namespace

std::string domain_name(const std::string& scene, std::optional<double> snr_db) {
  if (scene == "clean") return "clean";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", snr_db.value_or(0.0));
  return scene + "_" + buf + "dB";
}

std::string domain_of(const ManifestEntry& entry) { return domain_name(entry.scene, entry.snr_db); }

std::vector<std::string> list_domains(const DatasetManifest& manifest) {
  std::vector<std::string> out;
  for (const auto& e : manifest.files) {
    const std::string d = domain_of(e);
    if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
  }
  return out;
}

std::vector<const ManifestEntry*> entries_for(const DatasetManifest& manifest,
                                              const std::string& domain,
                                              const std::string& split) {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : manifest.files) {
    if (domain_of(e) == domain && e.split == split) out.push_back(&e);
  }
  return out;
}

audio::AudioClip gen_event_clip(int class_index, Rng& rng, int sample_rate) {
  require(class_index >= 0 && class_index < 3, "unknown-class",
          "event class index " + std::to_string(class_index));

  audio::AudioClip clip;
  clip.sample_rate = sample_rate;
  const double dt = 1.0 / sample_rate;

  // each class concentrates its energy in a band the scene beds leave
  // relatively empty, so events stay detectable at strongly negative SNRs
  if (class_index == 0) {
    // amplitude-modulated tone around 700-1000 Hz with slight vibrato
    const double dur = rng.uniform(0.8, 2.2);
    const double f0 = rng.uniform(700.0, 1000.0);
    const double am_rate = rng.uniform(2.0, 5.0);
    const double am_phase = rng.uniform(0.0, kTwoPi);
    const int n = static_cast<int>(std::llround(dur * sample_rate));
    clip.samples.resize(n);
    for (int i = 0; i < n; ++i) {
      const double t = i * dt;
      const double vib = 0.4 * std::sin(kTwoPi * 5.5 * t);
      const double carrier = std::sin(kTwoPi * f0 * t + vib);
      const double am = 0.55 + 0.45 * std::sin(kTwoPi * am_rate * t + am_phase);
      clip.samples[i] = carrier * am * envelope(t, dur, 0.05, 0.1);
    }
  } else if (class_index == 1) {
    // high-band noise burst: white noise through a resonator at 6-8 kHz
    const double dur = rng.uniform(0.5, 1.4);
    const double tau = rng.uniform(0.15, 0.35);
    const double center = rng.uniform(6000.0, 8000.0);
    const double r = 0.985;
    const double w0 = kTwoPi * center / sample_rate;
    const int n = static_cast<int>(std::llround(dur * sample_rate));
    clip.samples.resize(n);
    double y1 = 0.0, y2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = i * dt;
      const double x = rng.uniform(-1.0, 1.0);
      const double y = 2.0 * r * std::cos(w0) * y1 - r * r * y2 + x;
      y2 = y1;
      y1 = y;
      const double level = 0.35 + 0.65 * std::exp(-t / tau);
      clip.samples[i] = y * level * envelope(t, dur, 0.005, 0.08);
    }
  } else {
    // decaying impulse train ringing at 2-3.2 kHz
    const double dur = rng.uniform(0.6, 1.5);
    const double rate = rng.uniform(6.0, 10.0);
    const double ring = rng.uniform(2000.0, 3200.0);
    const int n = static_cast<int>(std::llround(dur * sample_rate));
    clip.samples.resize(n, 0.0);
    double impulse_t = rng.uniform(0.0, 0.05);
    while (impulse_t < dur) {
      const double strength = rng.uniform(0.6, 1.0);
      const int start = static_cast<int>(impulse_t * sample_rate);
      const int len = std::min(n - start, static_cast<int>(0.12 * sample_rate));
      for (int i = 0; i < len; ++i) {
        const double t = i * dt;
        clip.samples[start + i] +=
            strength * std::exp(-t / 0.035) * std::sin(kTwoPi * ring * t);
      }
      impulse_t += 1.0 / rate;
    }
    for (int i = 0; i < n; ++i) {
      clip.samples[i] *= envelope(i * dt, dur, 0.002, 0.05);
    }
  }

  normalize_peak(clip.samples, 0.5);
  return clip;
}

audio::AudioClip gen_background(const std::string& scene, double duration_s, Rng& rng,
                                int sample_rate) {
  require(scene != "clean", "clean-has-no-background",
          "the clean domain carries no background noise");

  // Each scene is a dominant low-frequency color (two-pole filtered noise
  // plus an optional hum, concentrated below ~350 Hz) over one shared
  // broadband floor. The steep rolloff keeps the colored tails out of the
  // event bands, and the matched floors mask those bands the same way in
  // every domain; what distinguishes the scenes is the low-band signature.
  double lowpass = 0.0, lp_gain = 1.0, hum_hz = 0.0, hum_level = 0.0;
  const double white_mix = 0.22;
  if (scene == "vehicle") {
    lowpass = 0.997;
    lp_gain = 2.0;
    hum_hz = 70.0;
    hum_level = 0.35;
  } else if (scene == "outdoor") {
    lowpass = 0.985;
    lp_gain = 9.0;
  } else if (scene == "indoor") {
    lowpass = 0.96;
    lp_gain = 3.0;
    hum_hz = 140.0;
    hum_level = 0.35;
  } else {
    fail("unknown-scene", "scene '" + scene + "'");
  }

  audio::AudioClip clip;
  clip.sample_rate = sample_rate;
  const int n = static_cast<int>(std::llround(duration_s * sample_rate));
  clip.samples.resize(n);

  double lp1 = 0.0, lp2 = 0.0;
  const double dt = 1.0 / sample_rate;
  for (int i = 0; i < n; ++i) {
    const double w = rng.uniform(-1.0, 1.0);
    lp1 = lowpass * lp1 + (1.0 - lowpass) * w;
    lp2 = lowpass * lp2 + (1.0 - lowpass) * lp1;
    double s = lp_gain * lp2 + white_mix * w;
    if (hum_level > 0.0) s += hum_level * std::sin(kTwoPi * hum_hz * i * dt);
    clip.samples[i] = s;
  }

  // fix the level so mixing gains stay in a sane range
  const double power = audio::rms_power(clip.samples);
  const double g = std::sqrt(0.01 / power);
  for (double& s : clip.samples) s *= g;
  return clip;
}

Timeline place_events(std::span<const std::string> classes, double duration_s,
                      double density_per_min, Rng& rng, int sample_rate) {
  Timeline tl;
  tl.track.sample_rate = sample_rate;
  tl.track.samples.assign(static_cast<std::size_t>(std::llround(duration_s * sample_rate)),
                          0.0);

  const int n_events = static_cast<int>(std::llround(density_per_min * duration_s / 60.0));
  const double margin = 0.25;
  const double same_class_gap = 0.5;

  for (int k = 0; k < n_events; ++k) {
    const int cls = k % static_cast<int>(classes.size());
    Rng clip_rng = rng.fork(hash_combine(0xc11fu, static_cast<std::uint64_t>(k)));
    const audio::AudioClip clip = gen_event_clip(cls, clip_rng, sample_rate);
    const double clip_dur = clip.duration_s();
    if (clip_dur + 2 * margin >= duration_s) continue;

    double onset = -1.0;
    for (int attempt = 0; attempt < 50; ++attempt) {
      const double candidate = rng.uniform(margin, duration_s - margin - clip_dur);
      bool clash = false;
      for (const codec::Event& ev : tl.events) {
        if (ev.label != classes[cls]) continue;
        if (candidate < ev.offset_s + same_class_gap &&
            ev.onset_s < candidate + clip_dur + same_class_gap) {
          clash = true;
          break;
        }
      }
      if (!clash) {
        onset = candidate;
        break;
      }
    }
    if (onset < 0.0) continue;  // file too crowded for this class

    const auto start = static_cast<std::size_t>(std::llround(onset * sample_rate));
    for (std::size_t i = 0; i < clip.samples.size() && start + i < tl.track.samples.size();
         ++i) {
      tl.track.samples[start + i] += clip.samples[i];
    }
    tl.events.push_back({onset, onset + clip_dur, std::string(classes[cls])});
  }

  std::sort(tl.events.begin(), tl.events.end(), [](const auto& a, const auto& b) {
    return a.onset_s != b.onset_s ? a.onset_s < b.onset_s : a.label < b.label;
  });
  return tl;
}

MixResult mix_at_snr(const Timeline& timeline, const audio::AudioClip& background,
                     double snr_db) {
  MixResult out;
  out.events = timeline.events;

  if (timeline.events.empty()) {
    double peak = 0.0;
    for (double s : background.samples) peak = std::max(peak, std::abs(s));
    out.norm_gain = peak > 0.99 ? 0.99 / peak : 1.0;
    out.mixture = background;
    if (out.norm_gain != 1.0) {
      for (double& s : out.mixture.samples) s *= out.norm_gain;
    }
    return out;
  }

  require(timeline.track.samples.size() <= background.samples.size(), "shape-mismatch",
          "background shorter than the event track");

  const int sr = timeline.track.sample_rate;
  std::vector<std::uint8_t> active(timeline.track.samples.size(), 0);
  for (const codec::Event& ev : timeline.events) {
    const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(ev.onset_s * sr)));
    const auto hi = std::min(active.size(),
                             static_cast<std::size_t>(std::ceil(ev.offset_s * sr)));
    for (std::size_t i = lo; i < hi; ++i) active[i] = 1;
  }

  double sig_power = 0.0, noise_power = 0.0;
  std::size_t n_active = 0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (!active[i]) continue;
    sig_power += timeline.track.samples[i] * timeline.track.samples[i];
    noise_power += background.samples[i] * background.samples[i];
    ++n_active;
  }
  require(n_active > 0 && noise_power > 0.0, "silent-background",
          "background power over the event region is zero");
  sig_power /= static_cast<double>(n_active);
  noise_power /= static_cast<double>(n_active);

  out.background_gain = std::sqrt(sig_power / (noise_power * std::pow(10.0, snr_db / 10.0)));

  out.mixture.sample_rate = timeline.track.sample_rate;
  out.mixture.samples.resize(timeline.track.samples.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < out.mixture.samples.size(); ++i) {
    out.mixture.samples[i] =
        timeline.track.samples[i] + out.background_gain * background.samples[i];
    peak = std::max(peak, std::abs(out.mixture.samples[i]));
  }
  out.norm_gain = peak > 0.99 ? 0.99 / peak : 1.0;
  if (out.norm_gain != 1.0) {
    for (double& s : out.mixture.samples) s *= out.norm_gain;
  }
  return out;
}

DatasetManifest build_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  require(!ec && fs::is_directory(out_dir), "unwritable-path",
          "cannot create dataset directory " + out_dir.string());

  DatasetManifest manifest;
  manifest.classes = cfg.classes;
  manifest.seed = cfg.seed;
  manifest.sample_rate = cfg.sample_rate;

  struct Domain {
    std::string scene;
    std::optional<double> snr_db;
  };
  std::vector<Domain> domains;
  if (cfg.include_clean) domains.push_back({"clean", std::nullopt});
  for (const auto& scene : cfg.scenes) {
    for (double snr : cfg.snrs_db) domains.push_back({scene, snr});
  }

  struct Split {
    const char* name;
    int count;
    double duration;
  };
  const Split splits[] = {{"train", cfg.train_files, cfg.train_duration_s},
                          {"val", cfg.val_files, cfg.val_duration_s},
                          {"test", cfg.test_files, cfg.test_duration_s}};

  const Rng root(cfg.seed);
  for (const Domain& dom : domains) {
    const std::string dname = domain_name(dom.scene, dom.snr_db);
    for (const Split& split : splits) {
      const fs::path dir = out_dir / dname / split.name;
      fs::create_directories(dir, ec);
      require(!ec, "unwritable-path", "cannot create " + dir.string());

      for (int i = 0; i < split.count; ++i) {
        // the timeline stream depends only on (seed, split, index) so every
        // domain carries the same annotations for a given file index
        Rng timeline_rng =
            root.fork(hash_combine(hash_combine(0x71u, split.name), static_cast<std::uint64_t>(i)));
        Timeline tl = place_events(cfg.classes, split.duration, cfg.event_density_per_min,
                                   timeline_rng, cfg.sample_rate);

        MixResult mixed;
        if (dom.scene == "clean") {
          mixed.mixture = tl.track;
          mixed.events = tl.events;
          double peak = 0.0;
          for (double s : mixed.mixture.samples) peak = std::max(peak, std::abs(s));
          if (peak > 0.99) {
            mixed.norm_gain = 0.99 / peak;
            for (double& s : mixed.mixture.samples) s *= mixed.norm_gain;
          }
        } else {
          Rng bg_rng = root.fork(
              hash_combine(hash_combine(hash_combine(0xb6u, dom.scene), split.name),
                           static_cast<std::uint64_t>(i)));
          const audio::AudioClip bg =
              gen_background(dom.scene, split.duration, bg_rng, cfg.sample_rate);
          mixed = mix_at_snr(tl, bg, *dom.snr_db);
        }

        char stem[64];
        std::snprintf(stem, sizeof stem, "%s_%03d", split.name, i);
        const fs::path wav = dir / (std::string(stem) + ".wav");
        const fs::path tsv = dir / (std::string(stem) + ".tsv");
        audio::write_wav(wav, mixed.mixture);
        codec::write_annotations(tsv, mixed.events);

        ManifestEntry entry;
        entry.audio = fs::relative(wav, out_dir).generic_string();
        entry.annotation = fs::relative(tsv, out_dir).generic_string();
        entry.scene = dom.scene;
        entry.snr_db = dom.snr_db;
        entry.split = split.name;
        entry.duration_s = split.duration;
        manifest.files.push_back(std::move(entry));
      }
    }
  }

  write_manifest(out_dir / "manifest.json", manifest);
  return manifest;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  nlohmann::json j;
  j["classes"] = manifest.classes;
  j["seed"] = manifest.seed;
  j["sample_rate"] = manifest.sample_rate;
  j["files"] = nlohmann::json::array();
  for (const auto& e : manifest.files) {
    nlohmann::json f;
    f["audio"] = e.audio;
    f["annotation"] = e.annotation;
    f["scene"] = e.scene;
    if (e.snr_db) {
      f["snr_db"] = *e.snr_db;
    } else {
      f["snr_db"] = nullptr;
    }
    f["split"] = e.split;
    f["duration_s"] = e.duration_s;
    j["files"].push_back(std::move(f));
  }

  std::ofstream f(path, std::ios::trunc);
  require(f.good(), "unwritable-path", "cannot open for writing: " + path.string());
  f << j.dump(2) << '\n';
  f.flush();
  require(f.good(), "unwritable-path", "write failed: " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  require(f.good(), "missing-file", "cannot open " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    fail("bad-json", path.string() + ": " + e.what());
  }

  DatasetManifest m;
  m.classes = j.at("classes").get<std::vector<std::string>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.sample_rate = j.at("sample_rate").get<int>();
  for (const auto& e : j.at("files")) {
    ManifestEntry entry;
    entry.audio = e.at("audio").get<std::string>();
    entry.annotation = e.at("annotation").get<std::string>();
    entry.scene = e.at("scene").get<std::string>();
    if (!e.at("snr_db").is_null()) entry.snr_db = e.at("snr_db").get<double>();
    entry.split = e.at("split").get<std::string>();
    entry.duration_s = e.at("duration_s").get<double>();
    m.files.push_back(std::move(entry));
  }
  return m;
}

}  // namespace yoho::synth
