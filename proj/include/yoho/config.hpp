// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "yoho/codec.hpp"
#include "yoho/features.hpp"
#include "yoho/network.hpp"
#include "yoho/synthgen.hpp"
#include "yoho/training.hpp"

namespace yoho::config {

// One nested document holding every tunable. Unknown keys and type changes
// are rejected so a typo cannot silently fall back to a default.
class RunConfig {
public:
  static const nlohmann::json& defaults();
  static RunConfig from_defaults();
  // merges the file over the defaults; errors: "missing-file", "bad-json",
  // "unknown-key", "bad-type"
  static RunConfig from_file(const std::filesystem::path& path);

  // dotted path override, e.g. ("train.learning_rate", "0.0005"); the value
  // is parsed as JSON when possible, otherwise treated as a string
  void set(const std::string& dotted_path, const std::string& value);

  const nlohmann::json& doc() const { return doc_; }

  std::uint64_t seed() const;
  std::vector<std::string> classes() const;
  features::FeatureConfig feature_config() const;
  features::SpecAugmentParams augment_params() const;
  net::BuildOptions network_options() const;
  train::TrainConfig train_config() const;
  codec::BinGeometry bin_geometry() const;
  codec::DecodeParams decode_params() const;
  double metrics_segment_len_s() const;
  synth::SynthConfig synth_config() const;
  std::vector<std::uint64_t> xdomain_seeds() const;

private:
  nlohmann::json doc_;
};

// All dotted leaf paths of the default document, for CLI flag generation.
std::vector<std::string> leaf_paths();

}  // namespace yoho::config
