// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#pragma once

#include <array>

namespace yoho {

// 9 time bins x 9 values. Per class c the columns (3c, 3c+1, 3c+2) hold
// (presence, start, end); start/end are fractions of the bin in [0, 1].
// Used both as the network output and as the training target.
struct OutputGrid {
  static constexpr int kBins = 9;
  static constexpr int kClasses = 3;
  static constexpr int kCols = 9;

  std::array<double, kBins * kCols> v{};

  double& presence(int bin, int cls) { return v[idx(bin, cls, 0)]; }
  double& start(int bin, int cls) { return v[idx(bin, cls, 1)]; }
  double& end(int bin, int cls) { return v[idx(bin, cls, 2)]; }
  double presence(int bin, int cls) const { return v[idx(bin, cls, 0)]; }
  double start(int bin, int cls) const { return v[idx(bin, cls, 1)]; }
  double end(int bin, int cls) const { return v[idx(bin, cls, 2)]; }

  bool operator==(const OutputGrid&) const = default;

private:
  static constexpr int idx(int bin, int cls, int field) { return bin * kCols + 3 * cls + field; }
};

}  // namespace yoho
