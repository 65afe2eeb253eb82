// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "yoho/config.hpp"
#include "yoho/metrics.hpp"
#include "yoho/network.hpp"
#include "yoho/synthgen.hpp"
#include "yoho/training.hpp"

namespace yoho::harness {

// Feature windows for one audio file; reads <audio>.ymel when present and
// valid, otherwise computes from the waveform.
std::vector<features::LogMelExample> features_for(const std::filesystem::path& wav,
                                                  const features::FeatureConfig& cfg,
                                                  bool use_cache = true);

// (features, encoded target) pairs for every file of (domain, split).
// Errors: "missing-split" when the domain has no such files.
std::vector<train::Sample> load_split_samples(const synth::DatasetManifest& manifest,
                                              const std::filesystem::path& root,
                                              const std::string& domain,
                                              const std::string& split,
                                              const config::RunConfig& cfg);

// windows -> forward -> decode -> assemble
codec::EventList predict_events(net::YohoModel<float>& model,
                                const std::vector<features::LogMelExample>& windows,
                                const config::RunConfig& cfg);

struct TrainOutput {
  net::YohoModel<float> model;
  train::TrainHistory history;
};

// Trains on the domain's train split with early stopping on its val split.
TrainOutput train_domain(const synth::DatasetManifest& manifest,
                         const std::filesystem::path& root, const std::string& domain,
                         const config::RunConfig& cfg, std::uint64_t seed);

struct DomainEval {
  double f1 = 0.0;
  double error_rate = 0.0;
  bool er_defined = false;
};

// Pooled segment metrics of the model on the domain's test split.
DomainEval evaluate_on_domain(net::YohoModel<float>& model,
                              const synth::DatasetManifest& manifest,
                              const std::filesystem::path& root, const std::string& domain,
                              const config::RunConfig& cfg);

// Trains one model per (source domain, seed) and evaluates every model on
// every target domain's test split.
metrics::CrossDomainReport cross_domain(
    const synth::DatasetManifest& manifest, const std::filesystem::path& root,
    const config::RunConfig& cfg,
    const std::function<void(const std::string&)>& progress = nullptr);

}  // namespace yoho::harness
