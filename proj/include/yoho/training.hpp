// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "yoho/features.hpp"
#include "yoho/grid.hpp"
#include "yoho/network.hpp"
#include "yoho/rng.hpp"

namespace yoho::train {

struct TrainConfig {
  double learning_rate = 0.001;
  int batch_size = 32;
  double early_stop_min_delta = 0.1;
  int early_stop_patience = 5;
  double l2_lambda = 0.001;
  int max_epochs = 100;
  std::uint64_t seed = 1234;
  bool augment = false;
  features::SpecAugmentParams augment_params;
  double presence_weight = 1.0;
  double regression_weight = 1.0;
};

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  std::string stop_reason;  // "early-stop" | "max-epochs"
  int best_epoch = -1;      // index into epochs, -1 when no epoch ran
};

struct Sample {
  features::LogMelExample input;
  OutputGrid target;
};

// Presence-masked squared error over the 9x9 grid: the regression terms only
// count where the target marks an event present.
inline double yoho_loss(const OutputGrid& pred, const OutputGrid& target,
                        double presence_weight = 1.0, double regression_weight = 1.0) {
  double loss = 0.0;
  for (int b = 0; b < OutputGrid::kBins; ++b) {
    for (int c = 0; c < OutputGrid::kClasses; ++c) {
      const double p = target.presence(b, c);
      const double dp = pred.presence(b, c) - p;
      loss += presence_weight * dp * dp;
      const double ds = pred.start(b, c) - target.start(b, c);
      const double de = pred.end(b, c) - target.end(b, c);
      loss += regression_weight * p * (ds * ds + de * de);
    }
  }
  return loss;
}

inline OutputGrid yoho_loss_grad(const OutputGrid& pred, const OutputGrid& target,
                                 double presence_weight = 1.0,
                                 double regression_weight = 1.0) {
  OutputGrid g;
  for (int b = 0; b < OutputGrid::kBins; ++b) {
    for (int c = 0; c < OutputGrid::kClasses; ++c) {
      const double p = target.presence(b, c);
      g.presence(b, c) = 2.0 * presence_weight * (pred.presence(b, c) - p);
      g.start(b, c) = 2.0 * regression_weight * p * (pred.start(b, c) - target.start(b, c));
      g.end(b, c) = 2.0 * regression_weight * p * (pred.end(b, c) - target.end(b, c));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Adam (beta1 0.9, beta2 0.999, eps 1e-7) with L2 as gradient-side decay.
// Batch-norm scale/shift are flagged by the model and excluded from decay.

template <class T>
struct AdamState {
  std::vector<std::vector<double>> m, v;
  long step = 0;

  void ensure(const std::vector<net::TensorRef<T>>& refs) {
    if (!m.empty()) return;
    m.resize(refs.size());
    v.resize(refs.size());
    for (std::size_t i = 0; i < refs.size(); ++i) {
      m[i].assign(refs[i].value->size(), 0.0);
      v[i].assign(refs[i].value->size(), 0.0);
    }
  }
};

template <class T>
void adam_step(std::vector<net::TensorRef<T>>& refs, AdamState<T>& state, double lr,
               double l2_lambda) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-7;

  state.ensure(refs);
  ++state.step;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));

  for (std::size_t i = 0; i < refs.size(); ++i) {
    auto& value = *refs[i].value;
    const auto& grad = *refs[i].grad;
    const bool decay = refs[i].l2_decay && l2_lambda != 0.0;
    for (std::size_t j = 0; j < value.size(); ++j) {
      double g = static_cast<double>(grad[j]);
      require(std::isfinite(g), "non-finite-gradient",
              "gradient of " + refs[i].name + " is not finite");
      if (decay) g += 2.0 * l2_lambda * static_cast<double>(value[j]);
      double& m = state.m[i][j];
      double& v = state.v[i][j];
      m = kBeta1 * m + (1.0 - kBeta1) * g;
      v = kBeta2 * v + (1.0 - kBeta2) * g * g;
      const double update = lr * (m / bc1) / (std::sqrt(v / bc2) + kEps);
      value[j] = static_cast<T>(static_cast<double>(value[j]) - update);
    }
  }
}

// ---------------------------------------------------------------------------

// Loss and gradients for one window; gradients are left in the model's
// per-tensor buffers (zeroed first). The model must be in train mode.
template <class T, class F>
double forward_backward(net::YohoModel<T>& model, const F* values, int n_mels, int n_frames,
                        const OutputGrid& target, double presence_weight = 1.0,
                        double regression_weight = 1.0) {
  require(model.train_mode, "bad-mode", "forward_backward requires train mode");
  typename net::YohoModel<T>::Workspace ws;
  net::Tensor<T> x = net::input_from_logmel<T>(values, n_mels, n_frames);
  net::Tensor<T> y = model.run_forward(x, /*want_grad=*/true, ws);

  const OutputGrid pred = net::grid_from_output(y, 0);
  const double loss = yoho_loss(pred, target, presence_weight, regression_weight);
  const OutputGrid grad = yoho_loss_grad(pred, target, presence_weight, regression_weight);

  net::Tensor<T> dy(y.shape);
  for (int b = 0; b < OutputGrid::kBins; ++b) {
    T* r = dy.row(0, b, 0);
    for (int k = 0; k < OutputGrid::kCols; ++k) {
      r[k] = static_cast<T>(grad.v[b * OutputGrid::kCols + k]);
    }
  }
  model.zero_grads();
  model.run_backward(dy, ws);
  return loss;
}

namespace detail {

template <class T>
net::Tensor<T> batch_input(const std::vector<Sample>& set, const std::vector<std::size_t>& idx,
                           std::size_t begin, std::size_t end, bool augment,
                           const features::SpecAugmentParams& params, Rng* aug_base) {
  const int n = static_cast<int>(end - begin);
  net::Tensor<T> x({n, 257, 40, 1});
  for (int i = 0; i < n; ++i) {
    const std::size_t si = idx[begin + i];
    const features::LogMelExample* ex = &set[si].input;
    features::LogMelExample masked;
    if (augment) {
      Rng r = aug_base->fork(si);
      masked = features::spec_augment(*ex, r, params);
      ex = &masked;
    }
    for (int t = 0; t < 257; ++t) {
      for (int m = 0; m < 40; ++m) {
        *x.row(i, t, m) = static_cast<T>(ex->at(m, t));
      }
    }
  }
  return x;
}

}  // namespace detail

// One optimizer step on a batch (mean loss over the batch); returns that loss.
template <class T>
double train_step(net::YohoModel<T>& model, const std::vector<Sample>& set,
                  const std::vector<std::size_t>& idx, std::size_t begin, std::size_t end,
                  AdamState<T>& adam, const TrainConfig& cfg, Rng* aug_rng) {
  model.train_mode = true;
  const int n = static_cast<int>(end - begin);
  typename net::YohoModel<T>::Workspace ws;
  net::Tensor<T> x = detail::batch_input<T>(set, idx, begin, end,
                                            cfg.augment && aug_rng != nullptr,
                                            cfg.augment_params, aug_rng);
  net::Tensor<T> y = model.run_forward(x, /*want_grad=*/true, ws);

  double loss_sum = 0.0;
  net::Tensor<T> dy(y.shape);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int i = 0; i < n; ++i) {
    const OutputGrid pred = net::grid_from_output(y, i);
    const OutputGrid& target = set[idx[begin + i]].target;
    loss_sum += yoho_loss(pred, target, cfg.presence_weight, cfg.regression_weight);
    const OutputGrid grad =
        yoho_loss_grad(pred, target, cfg.presence_weight, cfg.regression_weight);
    for (int b = 0; b < OutputGrid::kBins; ++b) {
      T* r = dy.row(i, b, 0);
      for (int k = 0; k < OutputGrid::kCols; ++k) {
        r[k] = static_cast<T>(grad.v[b * OutputGrid::kCols + k] * inv_n);
      }
    }
  }

  model.zero_grads();
  model.run_backward(dy, ws);
  auto refs = model.trainable();
  adam_step(refs, adam, cfg.learning_rate, cfg.l2_lambda);
  return loss_sum * inv_n;
}

// Mean loss over a dataset in eval mode (no augmentation, running BN stats).
template <class T>
double mean_loss(net::YohoModel<T>& model, const std::vector<Sample>& set,
                 const TrainConfig& cfg, int batch_size = 32) {
  model.train_mode = false;
  std::vector<std::size_t> idx(set.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

  double loss_sum = 0.0;
  for (std::size_t begin = 0; begin < set.size(); begin += batch_size) {
    const std::size_t end = std::min(set.size(), begin + batch_size);
    typename net::YohoModel<T>::Workspace ws;
    net::Tensor<T> x = detail::batch_input<T>(set, idx, begin, end, false,
                                              cfg.augment_params, nullptr);
    net::Tensor<T> y = model.run_forward(x, /*want_grad=*/false, ws);
    for (std::size_t i = begin; i < end; ++i) {
      const OutputGrid pred = net::grid_from_output(y, static_cast<int>(i - begin));
      loss_sum += yoho_loss(pred, set[i].target, cfg.presence_weight, cfg.regression_weight);
    }
  }
  return loss_sum / static_cast<double>(set.size());
}

// Patience counter over the validation loss. An epoch only resets the
// counter when it improves on the best-so-far by strictly more than
// min_delta; that best-so-far reference also moves only on such epochs.
class EarlyStopper {
public:
  EarlyStopper(double min_delta, int patience) : min_delta_(min_delta), patience_(patience) {}

  // true when training should stop after the epoch with this loss
  bool update(double val_loss) {
    if (reference_ - val_loss > min_delta_) {
      reference_ = val_loss;
      wait_ = 0;
      return false;
    }
    return ++wait_ >= patience_;
  }

private:
  double min_delta_;
  int patience_;
  double reference_ = std::numeric_limits<double>::infinity();
  int wait_ = 0;
};

// Epoch loop with seeded shuffling and early stopping on the validation loss.
// Improvement only counts when it exceeds min_delta over the best seen so
// far; the returned model carries the weights of the best-validation epoch.
template <class T>
TrainHistory train(net::YohoModel<T>& model, const std::vector<Sample>& train_set,
                   const std::vector<Sample>& val_set, const TrainConfig& cfg) {
  require(!train_set.empty(), "empty-train-set", "training requires at least one example");
  require(!val_set.empty(), "empty-val-set", "validation requires at least one example");

  TrainHistory history;
  history.stop_reason = "max-epochs";
  if (cfg.max_epochs == 0) return history;

  model.dropout_rng = Rng(hash_combine(cfg.seed, "dropout"));
  Rng base(cfg.seed);
  AdamState<T> adam;

  std::vector<std::size_t> idx(train_set.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

  double best_val = std::numeric_limits<double>::infinity();
  EarlyStopper stopper(cfg.early_stop_min_delta, cfg.early_stop_patience);
  std::vector<std::vector<T>> best_snapshot;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    Rng shuffle_rng = base.fork(hash_combine(0x5u, static_cast<std::uint64_t>(epoch)));
    deterministic_shuffle(idx.begin(), idx.end(), shuffle_rng);
    Rng aug_rng = base.fork(hash_combine(0xau, static_cast<std::uint64_t>(epoch)));

    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < idx.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(idx.size(), begin + cfg.batch_size);
      const double batch_loss = train_step(model, train_set, idx, begin, end, adam, cfg,
                                           cfg.augment ? &aug_rng : nullptr);
      loss_sum += batch_loss * static_cast<double>(end - begin);
    }

    EpochStats stats;
    stats.train_loss = loss_sum / static_cast<double>(train_set.size());
    stats.val_loss = mean_loss(model, val_set, cfg, cfg.batch_size);
    history.epochs.push_back(stats);

    if (stats.val_loss < best_val) {
      best_val = stats.val_loss;
      best_snapshot = model.snapshot();
      history.best_epoch = epoch;
    }
    if (stopper.update(stats.val_loss)) {
      history.stop_reason = "early-stop";
      break;
    }
  }

  if (!best_snapshot.empty()) model.restore(best_snapshot);
  model.train_mode = false;
  return history;
}

void write_history(const std::filesystem::path& path, const TrainHistory& history);
TrainHistory read_history(const std::filesystem::path& path);

}  // namespace yoho::train
