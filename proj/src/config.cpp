// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#include "yoho/config.hpp"

#include <fstream>

#include "yoho/error.hpp"

namespace yoho::config {

namespace {

bool types_compatible(const nlohmann::json& value, const nlohmann::json& reference) {
  if (reference.is_number() && value.is_number()) return true;
  if (reference.is_array() && value.is_array()) return true;
  return value.type() == reference.type();
}

// every key present in `doc` must exist in `reference` with a compatible type
void validate_against(const nlohmann::json& doc, const nlohmann::json& reference,
                      const std::string& prefix) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    require(reference.contains(it.key()), "unknown-key", "unknown config key '" + path + "'");
    const nlohmann::json& ref = reference.at(it.key());
    require(types_compatible(it.value(), ref), "bad-type",
            "config key '" + path + "' has the wrong type");
    if (it->is_object()) validate_against(it.value(), ref, path);
  }
}

void merge_over(nlohmann::json& base, const nlohmann::json& overlay) {
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (it->is_object() && base.contains(it.key()) && base.at(it.key()).is_object()) {
      merge_over(base.at(it.key()), it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

void collect_leaves(const nlohmann::json& node, const std::string& prefix,
                    std::vector<std::string>& out) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      collect_leaves(it.value(), path, out);
    } else {
      out.push_back(path);
    }
  }
}

}  // namespace

const nlohmann::json& RunConfig::defaults() {
  static const nlohmann::json k = {
      {"seed", 1234},
      {"classes", {"babycry", "glassbreak", "gunshot"}},
      {"features",
       {{"window_len_s", 2.56},
        {"hop_len_s", 1.96},
        {"sample_rate", 44100},
        {"n_mels", 40},
        {"stft_frame", 1024},
        {"stft_hop", 441},
        {"fft_size", 1024},
        {"log_floor", 1e-10},
        {"augment_freq_masks", 2},
        {"augment_freq_width", 8},
        {"augment_time_masks", 2},
        {"augment_time_width", 25}}},
      {"network", {{"width_divisor", 1}, {"dropout_rate", 0.1}}},
      {"train",
       {{"learning_rate", 0.001},
        {"batch_size", 32},
        {"early_stop_min_delta", 0.1},
        {"early_stop_patience", 5},
        {"l2_lambda", 0.001},
        {"max_epochs", 100},
        {"augment", true},
        {"presence_weight", 1.0},
        {"regression_weight", 1.0}}},
      {"codec", {{"threshold", 0.5}, {"merge_gap_s", 0.3}, {"min_dur_s", 0.1}, {"n_bins", 9}}},
      {"metrics", {{"segment_len_s", 1.0}}},
      {"synth",
       {{"scenes", {"vehicle", "outdoor", "indoor"}},
        {"snrs_db", {-3.0, -9.0}},
        {"include_clean", true},
        {"train_files", 2},
        {"val_files", 1},
        {"test_files", 1},
        {"train_duration_s", 180.0},
        {"val_duration_s", 60.0},
        {"test_duration_s", 60.0},
        {"event_density_per_min", 8.0}}},
      {"xdomain", {{"seeds", {1}}}}};
  return k;
}

RunConfig RunConfig::from_defaults() {
  RunConfig cfg;
  cfg.doc_ = defaults();
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  require(f.good(), "missing-file", "cannot open config " + path.string());
  nlohmann::json overlay;
  try {
    f >> overlay;
  } catch (const nlohmann::json::exception& e) {
    fail("bad-json", path.string() + ": " + e.what());
  }
  require(overlay.is_object(), "bad-json", path.string() + ": config must be a JSON object");
  validate_against(overlay, defaults(), "");

  RunConfig cfg = from_defaults();
  merge_over(cfg.doc_, overlay);
  return cfg;
}

void RunConfig::set(const std::string& dotted_path, const std::string& value) {
  nlohmann::json parsed = nlohmann::json::parse(value, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) parsed = value;

  // walk to the leaf, validating each component against the defaults
  const nlohmann::json* ref = &defaults();
  nlohmann::json* node = &doc_;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = dotted_path.find('.', begin);
    const std::string key = dotted_path.substr(begin, dot - begin);
    require(ref->contains(key), "unknown-key", "unknown config key '" + dotted_path + "'");
    if (dot == std::string::npos) {
      require(types_compatible(parsed, ref->at(key)), "bad-type",
              "override for '" + dotted_path + "' has the wrong type");
      (*node)[key] = parsed;
      return;
    }
    ref = &ref->at(key);
    node = &(*node)[key];
    begin = dot + 1;
  }
}

std::uint64_t RunConfig::seed() const { return doc_.at("seed").get<std::uint64_t>(); }

std::vector<std::string> RunConfig::classes() const {
  return doc_.at("classes").get<std::vector<std::string>>();
}

features::FeatureConfig RunConfig::feature_config() const {
  const auto& f = doc_.at("features");
  features::FeatureConfig cfg;
  cfg.window_len_s = f.at("window_len_s").get<double>();
  cfg.hop_len_s = f.at("hop_len_s").get<double>();
  cfg.sample_rate = f.at("sample_rate").get<int>();
  cfg.n_mels = f.at("n_mels").get<int>();
  cfg.stft_frame = f.at("stft_frame").get<int>();
  cfg.stft_hop = f.at("stft_hop").get<int>();
  cfg.fft_size = f.at("fft_size").get<int>();
  cfg.log_floor = f.at("log_floor").get<double>();
  return cfg;
}

features::SpecAugmentParams RunConfig::augment_params() const {
  const auto& f = doc_.at("features");
  features::SpecAugmentParams p;
  p.freq_masks = f.at("augment_freq_masks").get<int>();
  p.freq_max_width = f.at("augment_freq_width").get<int>();
  p.time_masks = f.at("augment_time_masks").get<int>();
  p.time_max_width = f.at("augment_time_width").get<int>();
  return p;
}

net::BuildOptions RunConfig::network_options() const {
  const auto& n = doc_.at("network");
  net::BuildOptions opts;
  opts.width_divisor = n.at("width_divisor").get<int>();
  opts.dropout_rate = n.at("dropout_rate").get<double>();
  return opts;
}

train::TrainConfig RunConfig::train_config() const {
  const auto& t = doc_.at("train");
  train::TrainConfig cfg;
  cfg.learning_rate = t.at("learning_rate").get<double>();
  cfg.batch_size = t.at("batch_size").get<int>();
  cfg.early_stop_min_delta = t.at("early_stop_min_delta").get<double>();
  cfg.early_stop_patience = t.at("early_stop_patience").get<int>();
  cfg.l2_lambda = t.at("l2_lambda").get<double>();
  cfg.max_epochs = t.at("max_epochs").get<int>();
  cfg.seed = seed();
  cfg.augment = t.at("augment").get<bool>();
  cfg.augment_params = augment_params();
  cfg.presence_weight = t.at("presence_weight").get<double>();
  cfg.regression_weight = t.at("regression_weight").get<double>();

  require(cfg.learning_rate > 0 && cfg.batch_size > 0 && cfg.early_stop_patience > 0 &&
              cfg.max_epochs >= 0 && cfg.l2_lambda >= 0,
          "bad-type", "train rates and sizes must be positive");
  return cfg;
}

codec::BinGeometry RunConfig::bin_geometry() const {
  codec::BinGeometry geom;
  geom.n_bins = doc_.at("codec").at("n_bins").get<int>();
  geom.window_len_s = doc_.at("features").at("window_len_s").get<double>();
  return geom;
}

codec::DecodeParams RunConfig::decode_params() const {
  const auto& c = doc_.at("codec");
  codec::DecodeParams p;
  p.threshold = c.at("threshold").get<double>();
  p.merge_gap_s = c.at("merge_gap_s").get<double>();
  p.min_dur_s = c.at("min_dur_s").get<double>();
  return p;
}

double RunConfig::metrics_segment_len_s() const {
  return doc_.at("metrics").at("segment_len_s").get<double>();
}

synth::SynthConfig RunConfig::synth_config() const {
  const auto& s = doc_.at("synth");
  synth::SynthConfig cfg;
  cfg.scenes = s.at("scenes").get<std::vector<std::string>>();
  cfg.snrs_db = s.at("snrs_db").get<std::vector<double>>();
  cfg.include_clean = s.at("include_clean").get<bool>();
  cfg.train_files = s.at("train_files").get<int>();
  cfg.val_files = s.at("val_files").get<int>();
  cfg.test_files = s.at("test_files").get<int>();
  cfg.train_duration_s = s.at("train_duration_s").get<double>();
  cfg.val_duration_s = s.at("val_duration_s").get<double>();
  cfg.test_duration_s = s.at("test_duration_s").get<double>();
  cfg.event_density_per_min = s.at("event_density_per_min").get<double>();
  cfg.classes = classes();
  cfg.seed = seed();
  cfg.sample_rate = doc_.at("features").at("sample_rate").get<int>();
  return cfg;
}

std::vector<std::uint64_t> RunConfig::xdomain_seeds() const {
  return doc_.at("xdomain").at("seeds").get<std::vector<std::uint64_t>>();
}

std::vector<std::string> leaf_paths() {
  std::vector<std::string> out;
  collect_leaves(RunConfig::defaults(), "", out);
  return out;
}

}  // namespace yoho::config
