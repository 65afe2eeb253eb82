// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.
//
// Command-line front end: synth / featurize / train / predict / eval /
// xdomain, all driven by one JSON config. Every config leaf is exposed as a
// dotted flag (e.g. --train.learning_rate); flags win over the config file.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "yoho/config.hpp"
#include "yoho/error.hpp"
#include "yoho/harness.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string workdir = ".";
  std::map<std::string, std::string> overrides;  // dotted path -> raw value
};

void add_config_flags(CLI::App* cmd, GlobalArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--workdir", args.workdir, "base directory for relative paths");
  for (const std::string& path : yoho::config::leaf_paths()) {
    cmd->add_option_function<std::string>(
        "--" + path, [&args, path](const std::string& v) { args.overrides[path] = v; },
        "config override");
  }
}

yoho::config::RunConfig load_config(const GlobalArgs& args) {
  yoho::config::RunConfig cfg = args.config_path.empty()
                                    ? yoho::config::RunConfig::from_defaults()
                                    : yoho::config::RunConfig::from_file(args.config_path);
  for (const auto& [path, value] : args.overrides) cfg.set(path, value);
  return cfg;
}

fs::path resolve(const GlobalArgs& args, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : fs::path(args.workdir) / path;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  yoho::require(f.good(), "unwritable-path", "cannot open for writing: " + path.string());
  f << text;
  f.flush();
  yoho::require(f.good(), "unwritable-path", "write failed: " + path.string());
}

nlohmann::json report_json(const yoho::metrics::EvalReport& r) {
  nlohmann::json j;
  j["f1"] = r.f1;
  if (r.er_defined) {
    j["error_rate"] = r.error_rate;
  } else {
    j["error_rate"] = nullptr;  // no reference activity
  }
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["substitutions"] = r.substitutions;
  j["deletions"] = r.deletions;
  j["insertions"] = r.insertions;
  j["n_reference"] = r.n_reference;
  return j;
}

int cmd_synth(const GlobalArgs& args, const std::string& out) {
  const auto cfg = load_config(args);
  const fs::path out_dir = resolve(args, out);
  yoho::synth::build_dataset(cfg.synth_config(), out_dir);
  std::cout << "wrote " << (out_dir / "manifest.json").string() << "\n";
  return 0;
}

int cmd_featurize(const GlobalArgs& args, const std::string& manifest_path) {
  const auto cfg = load_config(args);
  const fs::path mpath = resolve(args, manifest_path);
  const auto manifest = yoho::synth::read_manifest(mpath);
  const fs::path root = mpath.parent_path();
  const auto fcfg = cfg.feature_config();

  for (const auto& e : manifest.files) {
    const fs::path wav = root / e.audio;
    const auto examples = yoho::features::window_examples(yoho::audio::read_wav(wav), fcfg);
    yoho::features::write_feature_cache(wav.string() + ".ymel", examples);
  }
  std::cout << "cached features for " << manifest.files.size() << " files\n";
  return 0;
}

int cmd_train(const GlobalArgs& args, const std::string& manifest_path,
              const std::string& domain, std::string out, std::string history_out) {
  const auto cfg = load_config(args);
  const fs::path mpath = resolve(args, manifest_path);
  const auto manifest = yoho::synth::read_manifest(mpath);

  if (out.empty()) out = "model_" + domain + ".yoho";
  if (history_out.empty()) history_out = "model_" + domain + ".history.json";

  auto trained =
      yoho::harness::train_domain(manifest, mpath.parent_path(), domain, cfg, cfg.seed());
  yoho::net::save_weights(trained.model, resolve(args, out));
  yoho::train::write_history(resolve(args, history_out), trained.history);

  std::cout << "trained on " << domain << ": " << trained.history.epochs.size() << " epochs ("
            << trained.history.stop_reason << "), checkpoint " << out << "\n";
  return 0;
}

int cmd_predict(const GlobalArgs& args, const std::string& checkpoint, const std::string& audio,
                const std::string& out) {
  const auto cfg = load_config(args);
  auto model = yoho::net::load_weights(resolve(args, checkpoint),
                                       cfg.network_options().dropout_rate);
  const auto clip = yoho::audio::read_wav(resolve(args, audio));
  const auto windows = yoho::features::window_examples(clip, cfg.feature_config());
  const auto events = yoho::harness::predict_events(model, windows, cfg);
  yoho::codec::write_annotations(resolve(args, out), events);
  std::cout << "wrote " << events.size() << " events to " << out << "\n";
  return 0;
}

int cmd_eval(const GlobalArgs& args, const std::string& reference, const std::string& system,
             const std::string& out) {
  const auto cfg = load_config(args);
  const fs::path ref_path = resolve(args, reference);
  const fs::path sys_path = resolve(args, system);

  std::vector<std::pair<fs::path, fs::path>> pairs;
  if (fs::is_directory(ref_path)) {
    yoho::require(fs::is_directory(sys_path), "file-mismatch",
                  "reference is a directory but system is not");
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(ref_path)) {
      if (e.path().extension() == ".tsv") names.push_back(e.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    yoho::require(!names.empty(), "file-mismatch",
                  "no .tsv files in " + ref_path.string());
    for (const auto& n : names) {
      yoho::require(fs::exists(sys_path / n), "file-mismatch",
                    "system output missing for " + n);
      pairs.emplace_back(ref_path / n, sys_path / n);
    }
  } else {
    pairs.emplace_back(ref_path, sys_path);
  }

  const auto classes = cfg.classes();
  const double seg_len = cfg.metrics_segment_len_s();
  yoho::metrics::Accumulator acc;
  for (const auto& [ref_file, sys_file] : pairs) {
    const auto ref_events = yoho::codec::read_annotations(ref_file);
    const auto sys_events = yoho::codec::read_annotations(sys_file);
    // without audio at hand the file length is the latest annotated offset
    double duration = 0.0;
    for (const auto& e : ref_events) duration = std::max(duration, e.offset_s);
    for (const auto& e : sys_events) duration = std::max(duration, e.offset_s);
    acc.add(yoho::metrics::events_to_roll(ref_events, duration, classes, seg_len),
            yoho::metrics::events_to_roll(sys_events, duration, classes, seg_len));
  }

  const auto report = acc.report();
  if (!out.empty()) write_text(resolve(args, out), report_json(report).dump(2) + "\n");
  std::cout << report_json(report).dump(2) << "\n";
  return 0;
}

int cmd_xdomain(const GlobalArgs& args, const std::string& manifest_path,
                const std::string& out) {
  const auto cfg = load_config(args);
  const fs::path mpath = resolve(args, manifest_path);
  const auto manifest = yoho::synth::read_manifest(mpath);

  const auto report = yoho::harness::cross_domain(
      manifest, mpath.parent_path(), cfg,
      [](const std::string& msg) { std::cerr << msg << "\n"; });

  const std::string json = yoho::metrics::report_to_json(report);
  if (!out.empty()) write_text(resolve(args, out), json);
  std::cout << yoho::metrics::format_table(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sound event detection with a single-shot regression network"};
  app.require_subcommand(1);

  GlobalArgs args;
  add_config_flags(&app, args);  // accepted before the subcommand too
  std::string out, manifest_path, domain, history_out, checkpoint, audio_path, reference,
      system_path;

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic noisy-mixture dataset");
  synth->add_option("--out", out, "dataset output directory")->default_val("dataset");
  add_config_flags(synth, args);

  CLI::App* featurize =
      app.add_subcommand("featurize", "build .ymel feature caches for a dataset");
  featurize->add_option("--manifest", manifest_path, "dataset manifest")->required();
  add_config_flags(featurize, args);

  CLI::App* train = app.add_subcommand("train", "train a model on one domain");
  train->add_option("--manifest", manifest_path, "dataset manifest")->required();
  train->add_option("--domain", domain, "source domain, e.g. clean or vehicle_-9dB")
      ->required();
  train->add_option("--out", out, "checkpoint output path");
  train->add_option("--history", history_out, "training history JSON path");
  add_config_flags(train, args);

  CLI::App* predict = app.add_subcommand("predict", "detect events in a WAV file");
  predict->add_option("--checkpoint", checkpoint, "trained model weights")->required();
  predict->add_option("--audio", audio_path, "input WAV")->required();
  predict->add_option("--out", out, "output event TSV")->required();
  add_config_flags(predict, args);

  CLI::App* eval = app.add_subcommand("eval", "segment-based F1 / error-rate scoring");
  eval->add_option("--reference", reference, "reference TSV file or directory")->required();
  eval->add_option("--system", system_path, "system TSV file or directory")->required();
  eval->add_option("--out", out, "report JSON path");
  add_config_flags(eval, args);

  CLI::App* xdomain =
      app.add_subcommand("xdomain", "train and evaluate across every domain pair");
  xdomain->add_option("--manifest", manifest_path, "dataset manifest")->required();
  xdomain->add_option("--out", out, "report JSON path");
  add_config_flags(xdomain, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(args, out);
    if (featurize->parsed()) return cmd_featurize(args, manifest_path);
    if (train->parsed()) return cmd_train(args, manifest_path, domain, out, history_out);
    if (predict->parsed()) return cmd_predict(args, checkpoint, audio_path, out);
    if (eval->parsed()) return cmd_eval(args, reference, system_path, out);
    if (xdomain->parsed()) return cmd_xdomain(args, manifest_path, out);
  } catch (const yoho::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
