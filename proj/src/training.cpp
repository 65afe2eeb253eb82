// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#include "yoho/training.hpp"

#include <fstream>

#include <json.hpp>

#include "yoho/error.hpp"

namespace yoho::train {

void write_history(const std::filesystem::path& path, const TrainHistory& history) {
  nlohmann::json j;
  j["epochs"] = nlohmann::json::array();
  for (const auto& e : history.epochs) {
    j["epochs"].push_back({{"train_loss", e.train_loss}, {"val_loss", e.val_loss}});
  }
  j["stop_reason"] = history.stop_reason;
  j["best_epoch"] = history.best_epoch;

  std::ofstream f(path, std::ios::trunc);
  require(f.good(), "unwritable-path", "cannot open for writing: " + path.string());
  f << j.dump(2) << '\n';
  f.flush();
  require(f.good(), "unwritable-path", "write failed: " + path.string());
}

TrainHistory read_history(const std::filesystem::path& path) {
  std::ifstream f(path);
  require(f.good(), "missing-file", "cannot open " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    fail("bad-json", path.string() + ": " + e.what());
  }

  TrainHistory h;
  for (const auto& e : j.at("epochs")) {
    h.epochs.push_back({e.at("train_loss").get<double>(), e.at("val_loss").get<double>()});
  }
  h.stop_reason = j.at("stop_reason").get<std::string>();
  h.best_epoch = j.at("best_epoch").get<int>();
  return h;
}

}  // namespace yoho::train
