// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#include "yoho/harness.hpp"

#include <algorithm>

#include "yoho/error.hpp"

namespace yoho::harness {

std::vector<features::LogMelExample> features_for(const std::filesystem::path& wav,
                                                  const features::FeatureConfig& cfg,
                                                  bool use_cache) {
  const std::filesystem::path cache = wav.string() + ".ymel";
  if (use_cache && std::filesystem::exists(cache)) {
    try {
      return features::read_feature_cache(cache, cfg);
    } catch (const Error&) {
      // stale or foreign cache; recompute below
    }
  }
  return features::window_examples(audio::read_wav(wav), cfg);
}

std::vector<train::Sample> load_split_samples(const synth::DatasetManifest& manifest,
                                              const std::filesystem::path& root,
                                              const std::string& domain,
                                              const std::string& split,
                                              const config::RunConfig& cfg) {
  const auto entries = synth::entries_for(manifest, domain, split);
  require(!entries.empty(), "missing-split",
          "domain '" + domain + "' has no '" + split + "' files");

  const features::FeatureConfig fcfg = cfg.feature_config();
  const codec::BinGeometry geom = cfg.bin_geometry();
  const std::vector<std::string> classes = cfg.classes();

  std::vector<train::Sample> out;
  for (const synth::ManifestEntry* e : entries) {
    const auto windows = features_for(root / e->audio, fcfg);
    const codec::EventList events = codec::read_annotations(root / e->annotation);
    for (const auto& w : windows) {
      train::Sample s;
      s.input = w;
      s.target = codec::encode_events(events, w.offset_s, geom, classes);
      out.push_back(std::move(s));
    }
  }
  return out;
}

codec::EventList predict_events(net::YohoModel<float>& model,
                                const std::vector<features::LogMelExample>& windows,
                                const config::RunConfig& cfg) {
  const codec::BinGeometry geom = cfg.bin_geometry();
  const codec::DecodeParams params = cfg.decode_params();
  const std::vector<std::string> classes = cfg.classes();

  model.train_mode = false;
  codec::EventList fragments;
  for (const auto& w : windows) {
    const OutputGrid grid = net::forward(model, w.values.data(), w.n_mels, w.n_frames);
    codec::EventList f = codec::decode_grid(grid, w.offset_s, geom, classes, params.threshold);
    fragments.insert(fragments.end(), f.begin(), f.end());
  }
  return codec::assemble_predictions(std::move(fragments), params.merge_gap_s, params.min_dur_s);
}

TrainOutput train_domain(const synth::DatasetManifest& manifest,
                         const std::filesystem::path& root, const std::string& domain,
                         const config::RunConfig& cfg, std::uint64_t seed) {
  const auto train_set = load_split_samples(manifest, root, domain, "train", cfg);
  const auto val_set = load_split_samples(manifest, root, domain, "val", cfg);

  train::TrainConfig tcfg = cfg.train_config();
  tcfg.seed = seed;

  TrainOutput out{net::build_yoho<float>(seed, cfg.network_options()), {}};
  out.history = train::train(out.model, train_set, val_set, tcfg);
  return out;
}

DomainEval evaluate_on_domain(net::YohoModel<float>& model,
                              const synth::DatasetManifest& manifest,
                              const std::filesystem::path& root, const std::string& domain,
                              const config::RunConfig& cfg) {
  const auto entries = synth::entries_for(manifest, domain, "test");
  require(!entries.empty(), "missing-split", "domain '" + domain + "' has no 'test' files");

  const features::FeatureConfig fcfg = cfg.feature_config();
  const std::vector<std::string> classes = cfg.classes();
  const double seg_len = cfg.metrics_segment_len_s();

  metrics::Accumulator acc;
  for (const synth::ManifestEntry* e : entries) {
    const auto windows = features_for(root / e->audio, fcfg);
    const codec::EventList predicted = predict_events(model, windows, cfg);
    const codec::EventList reference = codec::read_annotations(root / e->annotation);
    acc.add(metrics::events_to_roll(reference, e->duration_s, classes, seg_len),
            metrics::events_to_roll(predicted, e->duration_s, classes, seg_len));
  }
  const metrics::EvalReport report = acc.report();
  return {report.f1, report.error_rate, report.er_defined};
}

metrics::CrossDomainReport cross_domain(
    const synth::DatasetManifest& manifest, const std::filesystem::path& root,
    const config::RunConfig& cfg, const std::function<void(const std::string&)>& progress) {
  const std::vector<std::string> domains = synth::list_domains(manifest);
  require(!domains.empty(), "missing-split", "manifest lists no files");
  const std::vector<std::uint64_t> seeds = cfg.xdomain_seeds();
  require(!seeds.empty(), "bad-type", "xdomain.seeds must be non-empty");

  metrics::CrossDomainReport report;
  report.sources = domains;
  report.targets = domains;
  report.cells.resize(domains.size() * domains.size());
  for (std::size_t s = 0; s < domains.size(); ++s) {
    for (std::size_t t = 0; t < domains.size(); ++t) {
      report.cells[s * domains.size() + t].source = domains[s];
      report.cells[s * domains.size() + t].target = domains[t];
    }
  }

  for (std::size_t s = 0; s < domains.size(); ++s) {
    for (std::uint64_t seed : seeds) {
      if (progress) {
        progress("training on " + domains[s] + " (seed " + std::to_string(seed) + ")");
      }
      TrainOutput trained = train_domain(manifest, root, domains[s], cfg, seed);
      for (std::size_t t = 0; t < domains.size(); ++t) {
        const DomainEval eval =
            evaluate_on_domain(trained.model, manifest, root, domains[t], cfg);
        auto& cell = report.cells[s * domains.size() + t];
        cell.f1_runs.push_back(eval.f1);
        cell.er_runs.push_back(eval.er_defined ? eval.error_rate : 0.0);
        if (progress) {
          char buf[96];
          std::snprintf(buf, sizeof buf, "  %s -> %s: F1 %.4f", domains[s].c_str(),
                        domains[t].c_str(), eval.f1);
          progress(buf);
        }
      }
    }
  }
  return report;
}

}  // namespace yoho::harness
