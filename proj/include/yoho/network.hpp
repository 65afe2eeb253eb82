// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.
//
// The YOHO network: a MobileNet-v1 trunk (alternating depthwise 3x3 and
// pointwise 1x1 convolutions, each followed by batch norm and ReLU) with a
// three-block detection head and a final 1x1 conv producing a 9x9 grid of
// (presence, start, end) triplets through a sigmoid. Layers implement both
// the forward pass and reverse-mode gradients on CPU; the scalar type is a
// template parameter so tests can run the whole stack in double precision.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "yoho/error.hpp"
#include "yoho/grid.hpp"
#include "yoho/rng.hpp"

namespace yoho::net {

struct Shape {
  int n = 0, h = 0, w = 0, c = 0;

  std::int64_t count() const {
    return static_cast<std::int64_t>(n) * h * w * c;
  }
  bool operator==(const Shape&) const = default;
  std::string str() const {
    return std::to_string(n) + "x" + std::to_string(h) + "x" + std::to_string(w) + "x" +
           std::to_string(c);
  }
  std::string hwc_str() const {
    return std::to_string(h) + " x " + std::to_string(w) + " x " + std::to_string(c);
  }
};

template <class T>
struct Tensor {
  Shape shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(Shape s) : shape(s), data(static_cast<std::size_t>(s.count()), T(0)) {}

  T* row(int n, int h, int w) {
    return data.data() +
           ((static_cast<std::size_t>(n) * shape.h + h) * shape.w + w) * shape.c;
  }
  const T* row(int n, int h, int w) const {
    return data.data() +
           ((static_cast<std::size_t>(n) * shape.h + h) * shape.w + w) * shape.c;
  }
};

// TensorFlow-style "same" padding: out = ceil(in / stride), extra padding at
// the bottom/right when the total is odd.
struct SamePad {
  int out_h, out_w, top, left;
};

inline SamePad same_pad(const Shape& in, int kh, int kw, int sh, int sw) {
  SamePad p;
  p.out_h = (in.h + sh - 1) / sh;
  p.out_w = (in.w + sw - 1) / sw;
  const int pad_h = std::max((p.out_h - 1) * sh + kh - in.h, 0);
  const int pad_w = std::max((p.out_w - 1) * sw + kw - in.w, 0);
  p.top = pad_h / 2;
  p.left = pad_w / 2;
  return p;
}

// Per-layer state saved by a forward pass for the matching backward pass.
// Owned by the caller (one workspace per concurrent pass), so a model can be
// shared read-only across threads for eval-mode inference.
template <class T>
struct Cache {
  std::vector<Tensor<T>> tensors;
  std::vector<double> scalars;
};

template <class T>
struct TensorRef {
  std::string name;
  std::vector<int> dims;
  std::vector<T>* value = nullptr;
  std::vector<T>* grad = nullptr;  // null for non-trainable state (running stats)
  bool l2_decay = false;
};

template <class T>
class Layer {
public:
  virtual ~Layer() = default;
  virtual std::string kind() const = 0;
  virtual Shape output_shape(const Shape& in) const = 0;
  virtual Tensor<T> forward(const Tensor<T>& x, bool train, bool want_grad, Cache<T>& cache,
                            Rng* rng) = 0;
  virtual Tensor<T> backward(const Tensor<T>& dy, const Cache<T>& cache) = 0;
  virtual void collect(const std::string& prefix, std::vector<TensorRef<T>>& out) {}
};

// ---------------------------------------------------------------------------
// Reshape

template <class T>
class ReshapeLayer final : public Layer<T> {
public:
  ReshapeLayer(Shape from, Shape to) : from_(from), to_(to) {
    require(from.count() == to.count(), "shape-mismatch", "reshape changes element count");
  }

  std::string kind() const override { return "reshape"; }

  Shape output_shape(const Shape& in) const override {
    check_in(in);
    Shape out = to_;
    out.n = in.n;
    return out;
  }

  Tensor<T> forward(const Tensor<T>& x, bool, bool, Cache<T>&, Rng*) override {
    Tensor<T> y;
    y.shape = output_shape(x.shape);
    y.data = x.data;  // row-major flatten keeps the byte layout
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy, const Cache<T>&) override {
    Tensor<T> dx;
    dx.shape = from_;
    dx.shape.n = dy.shape.n;
    dx.data = dy.data;
    return dx;
  }

private:
  void check_in(const Shape& in) const {
    require(in.h == from_.h && in.w == from_.w && in.c == from_.c, "bad-input-shape",
            "reshape expected " + from_.hwc_str() + " got " + in.hwc_str());
  }

  Shape from_, to_;
};

// ---------------------------------------------------------------------------
// Conv2D (full convolution; 1x1 stride-1 kernels take a fast matrix path)

template <class T>
class Conv2dLayer final : public Layer<T> {
public:
  // kernel layout [kh][kw][cin][cout]
  Conv2dLayer(int kh, int kw, int cin, int cout, int sh, int sw, bool as_1d = false)
      : kh_(kh), kw_(kw), cin_(cin), cout_(cout), sh_(sh), sw_(sw), as_1d_(as_1d) {
    kernel_.assign(static_cast<std::size_t>(kh) * kw * cin * cout, T(0));
    bias_.assign(static_cast<std::size_t>(cout), T(0));
    kernel_grad_.assign(kernel_.size(), T(0));
    bias_grad_.assign(bias_.size(), T(0));
  }

  std::string kind() const override { return as_1d_ ? "conv1d" : "conv2d"; }

  void init_he(Rng& rng) {
    const double std_dev = std::sqrt(2.0 / (static_cast<double>(kh_) * kw_ * cin_));
    for (auto& v : kernel_) v = static_cast<T>(rng.gaussian() * std_dev);
  }

  Shape output_shape(const Shape& in) const override {
    require(in.c == cin_, "bad-input-shape",
            "conv expected " + std::to_string(cin_) + " channels, got " + std::to_string(in.c));
    const SamePad p = same_pad(in, kh_, kw_, sh_, sw_);
    return {in.n, p.out_h, p.out_w, cout_};
  }

  Tensor<T> forward(const Tensor<T>& x, bool, bool want_grad, Cache<T>& cache, Rng*) override {
    const Shape in = x.shape;
    const SamePad p = same_pad(in, kh_, kw_, sh_, sw_);
    Tensor<T> y(output_shape(in));

    if (kh_ == 1 && kw_ == 1 && sh_ == 1 && sw_ == 1) {
      // pointwise: y[r][co] = b[co] + sum_ci x[r][ci] * W[ci][co]
      const std::size_t rows = static_cast<std::size_t>(in.n) * in.h * in.w;
      const T* w = kernel_.data();
      for (std::size_t r = 0; r < rows; ++r) {
        const T* xi = x.data.data() + r * cin_;
        T* yo = y.data.data() + r * cout_;
        for (int co = 0; co < cout_; ++co) yo[co] = bias_[co];
        for (int ci = 0; ci < cin_; ++ci) {
          const T a = xi[ci];
          if (a == T(0)) continue;
          const T* wr = w + static_cast<std::size_t>(ci) * cout_;
          for (int co = 0; co < cout_; ++co) yo[co] += a * wr[co];
        }
      }
    } else {
      for (int n = 0; n < in.n; ++n) {
        for (int oh = 0; oh < p.out_h; ++oh) {
          for (int ow = 0; ow < p.out_w; ++ow) {
            T* yo = y.row(n, oh, ow);
            for (int co = 0; co < cout_; ++co) yo[co] = bias_[co];
            for (int kh = 0; kh < kh_; ++kh) {
              const int ih = oh * sh_ - p.top + kh;
              if (ih < 0 || ih >= in.h) continue;
              for (int kw = 0; kw < kw_; ++kw) {
                const int iw = ow * sw_ - p.left + kw;
                if (iw < 0 || iw >= in.w) continue;
                const T* xi = x.row(n, ih, iw);
                const T* wk = kernel_.data() +
                              (static_cast<std::size_t>(kh) * kw_ + kw) * cin_ * cout_;
                for (int ci = 0; ci < cin_; ++ci) {
                  const T a = xi[ci];
                  if (a == T(0)) continue;
                  const T* wr = wk + static_cast<std::size_t>(ci) * cout_;
                  for (int co = 0; co < cout_; ++co) yo[co] += a * wr[co];
                }
              }
            }
          }
        }
      }
    }

    if (want_grad) {
      cache.tensors.clear();
      cache.tensors.push_back(x);
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy, const Cache<T>& cache) override {
    const Tensor<T>& x = cache.tensors.at(0);
    const Shape in = x.shape;
    const SamePad p = same_pad(in, kh_, kw_, sh_, sw_);
    Tensor<T> dx(in);

    if (kh_ == 1 && kw_ == 1 && sh_ == 1 && sw_ == 1) {
      const std::size_t rows = static_cast<std::size_t>(in.n) * in.h * in.w;
      for (std::size_t r = 0; r < rows; ++r) {
        const T* xi = x.data.data() + r * cin_;
        const T* dyo = dy.data.data() + r * cout_;
        T* dxi = dx.data.data() + r * cin_;
        for (int co = 0; co < cout_; ++co) bias_grad_[co] += dyo[co];
        for (int ci = 0; ci < cin_; ++ci) {
          const T a = xi[ci];
          T* gw = kernel_grad_.data() + static_cast<std::size_t>(ci) * cout_;
          const T* wr = kernel_.data() + static_cast<std::size_t>(ci) * cout_;
          T acc = T(0);
          for (int co = 0; co < cout_; ++co) {
            gw[co] += a * dyo[co];
            acc += wr[co] * dyo[co];
          }
          dxi[ci] = acc;
        }
      }
      return dx;
    }

    // parameter gradients
    for (int n = 0; n < in.n; ++n) {
      for (int oh = 0; oh < p.out_h; ++oh) {
        for (int ow = 0; ow < p.out_w; ++ow) {
          const T* dyo = dy.row(n, oh, ow);
          for (int co = 0; co < cout_; ++co) bias_grad_[co] += dyo[co];
          for (int kh = 0; kh < kh_; ++kh) {
            const int ih = oh * sh_ - p.top + kh;
            if (ih < 0 || ih >= in.h) continue;
            for (int kw = 0; kw < kw_; ++kw) {
              const int iw = ow * sw_ - p.left + kw;
              if (iw < 0 || iw >= in.w) continue;
              const T* xi = x.row(n, ih, iw);
              T* gk = kernel_grad_.data() +
                      (static_cast<std::size_t>(kh) * kw_ + kw) * cin_ * cout_;
              for (int ci = 0; ci < cin_; ++ci) {
                const T a = xi[ci];
                if (a == T(0)) continue;
                T* gr = gk + static_cast<std::size_t>(ci) * cout_;
                for (int co = 0; co < cout_; ++co) gr[co] += a * dyo[co];
              }
            }
          }
        }
      }
    }

    // input gradient, gather form
    for (int n = 0; n < in.n; ++n) {
      for (int ih = 0; ih < in.h; ++ih) {
        for (int iw = 0; iw < in.w; ++iw) {
          T* dxi = dx.row(n, ih, iw);
          for (int kh = 0; kh < kh_; ++kh) {
            const int num_h = ih + p.top - kh;
            if (num_h < 0 || num_h % sh_ != 0) continue;
            const int oh = num_h / sh_;
            if (oh >= p.out_h) continue;
            for (int kw = 0; kw < kw_; ++kw) {
              const int num_w = iw + p.left - kw;
              if (num_w < 0 || num_w % sw_ != 0) continue;
              const int ow = num_w / sw_;
              if (ow >= p.out_w) continue;
              const T* dyo = dy.row(n, oh, ow);
              const T* wk = kernel_.data() +
                            (static_cast<std::size_t>(kh) * kw_ + kw) * cin_ * cout_;
              for (int ci = 0; ci < cin_; ++ci) {
                const T* wr = wk + static_cast<std::size_t>(ci) * cout_;
                T acc = T(0);
                for (int co = 0; co < cout_; ++co) acc += wr[co] * dyo[co];
                dxi[ci] += acc;
              }
            }
          }
        }
      }
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<TensorRef<T>>& out) override {
    out.push_back({prefix + ".kernel", {kh_, kw_, cin_, cout_}, &kernel_, &kernel_grad_, true});
    out.push_back({prefix + ".bias", {cout_}, &bias_, &bias_grad_, true});
  }

private:
  int kh_, kw_, cin_, cout_, sh_, sw_;
  bool as_1d_;
  std::vector<T> kernel_, bias_, kernel_grad_, bias_grad_;
};

// ---------------------------------------------------------------------------
// Depthwise Conv2D (channel multiplier 1)

template <class T>
class DepthwiseConv2dLayer final : public Layer<T> {
public:
  DepthwiseConv2dLayer(int kh, int kw, int channels, int sh, int sw)
      : kh_(kh), kw_(kw), c_(channels), sh_(sh), sw_(sw) {
    kernel_.assign(static_cast<std::size_t>(kh) * kw * channels, T(0));
    bias_.assign(static_cast<std::size_t>(channels), T(0));
    kernel_grad_.assign(kernel_.size(), T(0));
    bias_grad_.assign(bias_.size(), T(0));
  }

  std::string kind() const override { return "conv2d_dw"; }

  void init_he(Rng& rng) {
    const double std_dev = std::sqrt(2.0 / (static_cast<double>(kh_) * kw_));
    for (auto& v : kernel_) v = static_cast<T>(rng.gaussian() * std_dev);
  }

  Shape output_shape(const Shape& in) const override {
    require(in.c == c_, "bad-input-shape",
            "depthwise conv expected " + std::to_string(c_) + " channels, got " +
                std::to_string(in.c));
    const SamePad p = same_pad(in, kh_, kw_, sh_, sw_);
    return {in.n, p.out_h, p.out_w, c_};
  }

  Tensor<T> forward(const Tensor<T>& x, bool, bool want_grad, Cache<T>& cache, Rng*) override {
    const Shape in = x.shape;
    const SamePad p = same_pad(in, kh_, kw_, sh_, sw_);
    Tensor<T> y(output_shape(in));

    for (int n = 0; n < in.n; ++n) {
      for (int oh = 0; oh < p.out_h; ++oh) {
        for (int ow = 0; ow < p.out_w; ++ow) {
          T* yo = y.row(n, oh, ow);
          for (int c = 0; c < c_; ++c) yo[c] = bias_[c];
          for (int kh = 0; kh < kh_; ++kh) {
            const int ih = oh * sh_ - p.top + kh;
            if (ih < 0 || ih >= in.h) continue;
            for (int kw = 0; kw < kw_; ++kw) {
              const int iw = ow * sw_ - p.left + kw;
              if (iw < 0 || iw >= in.w) continue;
              const T* xi = x.row(n, ih, iw);
              const T* wk = kernel_.data() + (static_cast<std::size_t>(kh) * kw_ + kw) * c_;
              for (int c = 0; c < c_; ++c) yo[c] += xi[c] * wk[c];
            }
          }
        }
      }
    }

    if (want_grad) {
      cache.tensors.clear();
      cache.tensors.push_back(x);
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy, const Cache<T>& cache) override {
    const Tensor<T>& x = cache.tensors.at(0);
    const Shape in = x.shape;
    const SamePad p = same_pad(in, kh_, kw_, sh_, sw_);
    Tensor<T> dx(in);

    for (int n = 0; n < in.n; ++n) {
      for (int oh = 0; oh < p.out_h; ++oh) {
        for (int ow = 0; ow < p.out_w; ++ow) {
          const T* dyo = dy.row(n, oh, ow);
          for (int c = 0; c < c_; ++c) bias_grad_[c] += dyo[c];
          for (int kh = 0; kh < kh_; ++kh) {
            const int ih = oh * sh_ - p.top + kh;
            if (ih < 0 || ih >= in.h) continue;
            for (int kw = 0; kw < kw_; ++kw) {
              const int iw = ow * sw_ - p.left + kw;
              if (iw < 0 || iw >= in.w) continue;
              const T* xi = x.row(n, ih, iw);
              T* gk = kernel_grad_.data() + (static_cast<std::size_t>(kh) * kw_ + kw) * c_;
              for (int c = 0; c < c_; ++c) gk[c] += xi[c] * dyo[c];
            }
          }
        }
      }
    }

    for (int n = 0; n < in.n; ++n) {
      for (int ih = 0; ih < in.h; ++ih) {
        for (int iw = 0; iw < in.w; ++iw) {
          T* dxi = dx.row(n, ih, iw);
          for (int kh = 0; kh < kh_; ++kh) {
            const int num_h = ih + p.top - kh;
            if (num_h < 0 || num_h % sh_ != 0) continue;
            const int oh = num_h / sh_;
            if (oh >= p.out_h) continue;
            for (int kw = 0; kw < kw_; ++kw) {
              const int num_w = iw + p.left - kw;
              if (num_w < 0 || num_w % sw_ != 0) continue;
              const int ow = num_w / sw_;
              if (ow >= p.out_w) continue;
              const T* dyo = dy.row(n, oh, ow);
              const T* wk = kernel_.data() + (static_cast<std::size_t>(kh) * kw_ + kw) * c_;
              for (int c = 0; c < c_; ++c) dxi[c] += wk[c] * dyo[c];
            }
          }
        }
      }
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<TensorRef<T>>& out) override {
    out.push_back({prefix + ".kernel", {kh_, kw_, c_}, &kernel_, &kernel_grad_, true});
    out.push_back({prefix + ".bias", {c_}, &bias_, &bias_grad_, true});
  }

private:
  int kh_, kw_, c_, sh_, sw_;
  std::vector<T> kernel_, bias_, kernel_grad_, bias_grad_;
};

// ---------------------------------------------------------------------------
// Batch normalization over (n, h, w) per channel

template <class T>
class BatchNormLayer final : public Layer<T> {
public:
  explicit BatchNormLayer(int channels, double momentum = 0.99, double eps = 1e-3)
      : c_(channels), momentum_(momentum), eps_(eps) {
    gamma_.assign(static_cast<std::size_t>(channels), T(1));
    beta_.assign(static_cast<std::size_t>(channels), T(0));
    running_mean_.assign(static_cast<std::size_t>(channels), T(0));
    running_var_.assign(static_cast<std::size_t>(channels), T(1));
    gamma_grad_.assign(gamma_.size(), T(0));
    beta_grad_.assign(beta_.size(), T(0));
  }

  std::string kind() const override { return "batchnorm"; }

  Shape output_shape(const Shape& in) const override { return in; }

  Tensor<T> forward(const Tensor<T>& x, bool train, bool want_grad, Cache<T>& cache,
                    Rng*) override {
    const Shape in = x.shape;
    require(in.c == c_, "bad-input-shape", "batchnorm channel mismatch");
    const std::size_t rows = static_cast<std::size_t>(in.n) * in.h * in.w;
    Tensor<T> y(in);

    std::vector<double> mean(c_, 0.0), var(c_, 0.0), inv_std(c_, 0.0);
    if (train) {
      for (std::size_t r = 0; r < rows; ++r) {
        const T* xi = x.data.data() + r * c_;
        for (int c = 0; c < c_; ++c) mean[c] += static_cast<double>(xi[c]);
      }
      for (int c = 0; c < c_; ++c) mean[c] /= static_cast<double>(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        const T* xi = x.data.data() + r * c_;
        for (int c = 0; c < c_; ++c) {
          const double d = static_cast<double>(xi[c]) - mean[c];
          var[c] += d * d;
        }
      }
      for (int c = 0; c < c_; ++c) {
        var[c] /= static_cast<double>(rows);  // biased, as used for normalization
        inv_std[c] = 1.0 / std::sqrt(var[c] + eps_);
        running_mean_[c] = static_cast<T>(momentum_ * static_cast<double>(running_mean_[c]) +
                                          (1.0 - momentum_) * mean[c]);
        running_var_[c] = static_cast<T>(momentum_ * static_cast<double>(running_var_[c]) +
                                         (1.0 - momentum_) * var[c]);
      }
    } else {
      for (int c = 0; c < c_; ++c) {
        mean[c] = static_cast<double>(running_mean_[c]);
        inv_std[c] = 1.0 / std::sqrt(static_cast<double>(running_var_[c]) + eps_);
      }
    }

    Tensor<T> xhat(in);
    for (std::size_t r = 0; r < rows; ++r) {
      const T* xi = x.data.data() + r * c_;
      T* xh = xhat.data.data() + r * c_;
      T* yo = y.data.data() + r * c_;
      for (int c = 0; c < c_; ++c) {
        const double h = (static_cast<double>(xi[c]) - mean[c]) * inv_std[c];
        xh[c] = static_cast<T>(h);
        yo[c] = static_cast<T>(static_cast<double>(gamma_[c]) * h +
                               static_cast<double>(beta_[c]));
      }
    }

    if (want_grad) {
      cache.tensors.clear();
      cache.tensors.push_back(std::move(xhat));
      Tensor<T> is({1, 1, 1, c_});
      for (int c = 0; c < c_; ++c) is.data[c] = static_cast<T>(inv_std[c]);
      cache.tensors.push_back(std::move(is));
      cache.scalars.assign(1, train ? 1.0 : 0.0);
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy, const Cache<T>& cache) override {
    const Tensor<T>& xhat = cache.tensors.at(0);
    const Tensor<T>& inv_std = cache.tensors.at(1);
    const bool train = cache.scalars.at(0) != 0.0;
    const Shape in = dy.shape;
    const std::size_t rows = static_cast<std::size_t>(in.n) * in.h * in.w;
    Tensor<T> dx(in);

    std::vector<double> sum_dy(c_, 0.0), sum_dy_xhat(c_, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      const T* d = dy.data.data() + r * c_;
      const T* xh = xhat.data.data() + r * c_;
      for (int c = 0; c < c_; ++c) {
        sum_dy[c] += static_cast<double>(d[c]);
        sum_dy_xhat[c] += static_cast<double>(d[c]) * static_cast<double>(xh[c]);
      }
    }
    for (int c = 0; c < c_; ++c) {
      gamma_grad_[c] += static_cast<T>(sum_dy_xhat[c]);
      beta_grad_[c] += static_cast<T>(sum_dy[c]);
    }

    if (train) {
      // gradient through the batch statistics
      const double inv_rows = 1.0 / static_cast<double>(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        const T* d = dy.data.data() + r * c_;
        const T* xh = xhat.data.data() + r * c_;
        T* dxi = dx.data.data() + r * c_;
        for (int c = 0; c < c_; ++c) {
          const double g = static_cast<double>(gamma_[c]) *
                           static_cast<double>(inv_std.data[c]);
          const double t = static_cast<double>(d[c]) - inv_rows * sum_dy[c] -
                           static_cast<double>(xh[c]) * inv_rows * sum_dy_xhat[c];
          dxi[c] = static_cast<T>(g * t);
        }
      }
    } else {
      for (std::size_t r = 0; r < rows; ++r) {
        const T* d = dy.data.data() + r * c_;
        T* dxi = dx.data.data() + r * c_;
        for (int c = 0; c < c_; ++c) {
          dxi[c] = static_cast<T>(static_cast<double>(d[c]) *
                                  static_cast<double>(gamma_[c]) *
                                  static_cast<double>(inv_std.data[c]));
        }
      }
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<TensorRef<T>>& out) override {
    out.push_back({prefix + ".gamma", {c_}, &gamma_, &gamma_grad_, false});
    out.push_back({prefix + ".beta", {c_}, &beta_, &beta_grad_, false});
    out.push_back({prefix + ".running_mean", {c_}, &running_mean_, nullptr, false});
    out.push_back({prefix + ".running_var", {c_}, &running_var_, nullptr, false});
  }

  void freeze_running_stats(const std::vector<T>& mean, const std::vector<T>& var) {
    running_mean_ = mean;
    running_var_ = var;
  }

private:
  int c_;
  double momentum_, eps_;
  std::vector<T> gamma_, beta_, running_mean_, running_var_;
  std::vector<T> gamma_grad_, beta_grad_;
};

// ---------------------------------------------------------------------------
// Activations

template <class T>
class ReluLayer final : public Layer<T> {
public:
  std::string kind() const override { return "relu"; }
  Shape output_shape(const Shape& in) const override { return in; }

  Tensor<T> forward(const Tensor<T>& x, bool, bool want_grad, Cache<T>& cache, Rng*) override {
    Tensor<T> y(x.shape);
    for (std::size_t i = 0; i < x.data.size(); ++i) y.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
    if (want_grad) {
      cache.tensors.clear();
      cache.tensors.push_back(y);
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy, const Cache<T>& cache) override {
    const Tensor<T>& y = cache.tensors.at(0);
    Tensor<T> dx(dy.shape);
    for (std::size_t i = 0; i < dy.data.size(); ++i) {
      dx.data[i] = y.data[i] > T(0) ? dy.data[i] : T(0);
    }
    return dx;
  }
};

template <class T>
class SigmoidLayer final : public Layer<T> {
public:
  std::string kind() const override { return "sigmoid"; }
  Shape output_shape(const Shape& in) const override { return in; }

  Tensor<T> forward(const Tensor<T>& x, bool, bool want_grad, Cache<T>& cache, Rng*) override {
    Tensor<T> y(x.shape);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
      y.data[i] = static_cast<T>(1.0 / (1.0 + std::exp(-static_cast<double>(x.data[i]))));
    }
    if (want_grad) {
      cache.tensors.clear();
      cache.tensors.push_back(y);
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy, const Cache<T>& cache) override {
    const Tensor<T>& y = cache.tensors.at(0);
    Tensor<T> dx(dy.shape);
    for (std::size_t i = 0; i < dy.data.size(); ++i) {
      dx.data[i] = dy.data[i] * y.data[i] * (T(1) - y.data[i]);
    }
    return dx;
  }
};

// ---------------------------------------------------------------------------
// Spatial (channel-wise) dropout; identity in eval mode

template <class T>
class SpatialDropoutLayer final : public Layer<T> {
public:
  explicit SpatialDropoutLayer(double rate) : rate_(rate) {}

  std::string kind() const override { return "spatial_dropout"; }
  Shape output_shape(const Shape& in) const override { return in; }

  Tensor<T> forward(const Tensor<T>& x, bool train, bool want_grad, Cache<T>& cache,
                    Rng* rng) override {
    if (!train || rate_ <= 0.0) {
      if (want_grad) {
        cache.tensors.clear();
        cache.scalars.assign(1, 0.0);  // identity marker
      }
      return x;
    }
    require(rng != nullptr, "internal", "spatial dropout requires an rng in train mode");

    const Shape in = x.shape;
    Tensor<T> mask({in.n, 1, 1, in.c});
    const T keep_scale = static_cast<T>(1.0 / (1.0 - rate_));
    for (int n = 0; n < in.n; ++n) {
      T* m = mask.row(n, 0, 0);
      for (int c = 0; c < in.c; ++c) m[c] = rng->uniform() < rate_ ? T(0) : keep_scale;
    }

    Tensor<T> y(in);
    const std::size_t plane = static_cast<std::size_t>(in.h) * in.w;
    for (int n = 0; n < in.n; ++n) {
      const T* m = mask.row(n, 0, 0);
      for (std::size_t p = 0; p < plane; ++p) {
        const T* xi = x.data.data() + (static_cast<std::size_t>(n) * plane + p) * in.c;
        T* yo = y.data.data() + (static_cast<std::size_t>(n) * plane + p) * in.c;
        for (int c = 0; c < in.c; ++c) yo[c] = xi[c] * m[c];
      }
    }
    if (want_grad) {
      cache.tensors.clear();
      cache.tensors.push_back(std::move(mask));
      cache.scalars.assign(1, 1.0);
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy, const Cache<T>& cache) override {
    if (cache.scalars.at(0) == 0.0) return dy;
    const Tensor<T>& mask = cache.tensors.at(0);
    const Shape in = dy.shape;
    Tensor<T> dx(in);
    const std::size_t plane = static_cast<std::size_t>(in.h) * in.w;
    for (int n = 0; n < in.n; ++n) {
      const T* m = mask.row(n, 0, 0);
      for (std::size_t p = 0; p < plane; ++p) {
        const T* d = dy.data.data() + (static_cast<std::size_t>(n) * plane + p) * in.c;
        T* dxi = dx.data.data() + (static_cast<std::size_t>(n) * plane + p) * in.c;
        for (int c = 0; c < in.c; ++c) dxi[c] = d[c] * m[c];
      }
    }
    return dx;
  }

private:
  double rate_;
};

// ---------------------------------------------------------------------------
// Model

struct BuildOptions {
  // integer channel divisor for desk-scale test models; 1 is the full network
  int width_divisor = 1;
  double dropout_rate = 0.1;
};

template <class T>
struct YohoModel {
  std::vector<std::unique_ptr<Layer<T>>> layers;
  bool train_mode = false;
  BuildOptions options;
  Rng dropout_rng{0};

  using Workspace = std::vector<Cache<T>>;

  static constexpr Shape kInputShape{1, 257, 40, 1};

  Tensor<T> run_forward(const Tensor<T>& x, bool want_grad, Workspace& ws) {
    require(x.shape.h == kInputShape.h && x.shape.w == kInputShape.w &&
                x.shape.c == kInputShape.c,
            "bad-input-shape", "expected n x 257 x 40 x 1, got " + x.shape.str());
    ws.resize(layers.size());
    Tensor<T> cur = x;
    Rng* rng = train_mode ? &dropout_rng : nullptr;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      cur = layers[i]->forward(cur, train_mode, want_grad, ws[i], rng);
    }
    return cur;
  }

  void run_backward(const Tensor<T>& dy, Workspace& ws) {
    Tensor<T> cur = dy;
    for (std::size_t i = layers.size(); i-- > 0;) {
      cur = layers[i]->backward(cur, ws[i]);
    }
  }

  std::vector<TensorRef<T>> tensors() {
    std::vector<TensorRef<T>> out;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      char prefix[16];
      std::snprintf(prefix, sizeof prefix, "L%02zu", i);
      layers[i]->collect(std::string(prefix) + "." + layers[i]->kind(), out);
    }
    return out;
  }

  std::vector<TensorRef<T>> trainable() {
    std::vector<TensorRef<T>> out;
    for (auto& r : tensors()) {
      if (r.grad != nullptr) out.push_back(r);
    }
    return out;
  }

  void zero_grads() {
    for (auto& r : trainable()) std::fill(r.grad->begin(), r.grad->end(), T(0));
  }

  std::vector<std::pair<std::string, Shape>> layer_shapes() const {
    std::vector<std::pair<std::string, Shape>> out;
    Shape cur = kInputShape;
    for (const auto& l : layers) {
      cur = l->output_shape(cur);
      out.emplace_back(l->kind(), cur);
    }
    return out;
  }

  // full value snapshot: weights and running statistics
  std::vector<std::vector<T>> snapshot() {
    std::vector<std::vector<T>> out;
    for (auto& r : tensors()) out.push_back(*r.value);
    return out;
  }

  void restore(const std::vector<std::vector<T>>& snap) {
    auto refs = tensors();
    require(refs.size() == snap.size(), "internal", "snapshot size mismatch");
    for (std::size_t i = 0; i < refs.size(); ++i) *refs[i].value = snap[i];
  }
};

// Constructs the full layer stack with He-initialized kernels, zero biases,
// batch-norm scale 1 / shift 0. The head's nominal stride-2 depthwise conv is
// built with stride 1, keeping the printed 9 x 2 output size.
template <class T>
YohoModel<T> build_yoho(std::uint64_t seed, BuildOptions opts = {}) {
  const int d = opts.width_divisor;
  require(d >= 1 && 32 % d == 0, "bad-width-divisor",
          "width divisor must divide the narrowest channel count (32)");

  YohoModel<T> model;
  model.options = opts;
  model.dropout_rng = Rng(hash_combine(seed, "dropout"));
  Rng init(hash_combine(seed, "init"));

  auto conv = [&](int kh, int kw, int cin, int cout, int s, bool as_1d = false) {
    auto l = std::make_unique<Conv2dLayer<T>>(kh, kw, cin, cout, s, s, as_1d);
    l->init_he(init);
    model.layers.push_back(std::move(l));
  };
  auto dw = [&](int kh, int kw, int c, int s) {
    auto l = std::make_unique<DepthwiseConv2dLayer<T>>(kh, kw, c, s, s);
    l->init_he(init);
    model.layers.push_back(std::move(l));
  };
  auto bn_relu = [&](int c) {
    model.layers.push_back(std::make_unique<BatchNormLayer<T>>(c));
    model.layers.push_back(std::make_unique<ReluLayer<T>>());
  };
  auto block = [&](int cin, int cout, int stride) {
    dw(3, 3, cin, stride);
    bn_relu(cin);
    conv(1, 1, cin, cout, 1);
    bn_relu(cout);
  };

  model.layers.push_back(
      std::make_unique<ReshapeLayer<T>>(Shape{1, 257, 40, 1}, Shape{1, 257, 40, 1}));

  conv(3, 3, 1, 32 / d, 2);
  bn_relu(32 / d);

  block(32 / d, 64 / d, 1);
  block(64 / d, 128 / d, 2);
  block(128 / d, 128 / d, 1);
  block(128 / d, 256 / d, 2);
  block(256 / d, 256 / d, 1);
  block(256 / d, 512 / d, 2);
  for (int i = 0; i < 5; ++i) block(512 / d, 512 / d, 1);
  block(512 / d, 1024 / d, 2);
  model.layers.push_back(std::make_unique<SpatialDropoutLayer<T>>(opts.dropout_rate));
  block(1024 / d, 1024 / d, 1);
  model.layers.push_back(std::make_unique<SpatialDropoutLayer<T>>(opts.dropout_rate));

  // detection head; the second depthwise conv keeps stride 1 (see above)
  block(1024 / d, 512 / d, 1);
  block(512 / d, 256 / d, 1);
  block(256 / d, 128 / d, 1);

  model.layers.push_back(
      std::make_unique<ReshapeLayer<T>>(Shape{1, 9, 2, 128 / d}, Shape{1, 9, 1, 256 / d}));
  conv(1, 1, 256 / d, OutputGrid::kCols, 1, /*as_1d=*/true);
  model.layers.push_back(std::make_unique<SigmoidLayer<T>>());

  return model;
}

// (40 x 257) mel-major window -> n=1 network input tensor (time-major).
template <class T, class F>
Tensor<T> input_from_logmel(const F* values, int n_mels, int n_frames) {
  require(n_mels == 40 && n_frames == 257, "bad-input-shape",
          "expected a 40 x 257 feature window");
  Tensor<T> x({1, n_frames, n_mels, 1});
  for (int t = 0; t < n_frames; ++t) {
    for (int m = 0; m < n_mels; ++m) {
      *x.row(0, t, m) = static_cast<T>(values[static_cast<std::size_t>(m) * n_frames + t]);
    }
  }
  return x;
}

template <class T>
OutputGrid grid_from_output(const Tensor<T>& y, int n) {
  require(y.shape.h == OutputGrid::kBins && y.shape.w == 1 && y.shape.c == OutputGrid::kCols,
          "bad-input-shape", "expected n x 9 x 1 x 9 output, got " + y.shape.str());
  OutputGrid g;
  for (int b = 0; b < OutputGrid::kBins; ++b) {
    const T* r = y.row(n, b, 0);
    for (int k = 0; k < OutputGrid::kCols; ++k) g.v[b * OutputGrid::kCols + k] =
        static_cast<double>(r[k]);
  }
  return g;
}

// Single-window eval/train forward (batch of one).
template <class T, class F>
OutputGrid forward(YohoModel<T>& model, const F* values, int n_mels, int n_frames) {
  typename YohoModel<T>::Workspace ws;
  Tensor<T> x = input_from_logmel<T>(values, n_mels, n_frames);
  Tensor<T> y = model.run_forward(x, /*want_grad=*/false, ws);
  return grid_from_output(y, 0);
}

// Weight checkpoint: magic "YOHO", u32 version, u32 tensor count; per tensor
// u16 name length + name, u8 rank, u32 dims, f32 data; trailing CRC32.
void save_weights(YohoModel<float>& model, const std::filesystem::path& path);
YohoModel<float> load_weights(const std::filesystem::path& path, double dropout_rate = 0.1);

std::uint32_t crc32(const unsigned char* data, std::size_t len);

}  // namespace yoho::net
