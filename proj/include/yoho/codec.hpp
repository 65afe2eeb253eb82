// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "yoho/grid.hpp"

namespace yoho::codec {

// One annotated sound event in absolute file time.
struct Event {
  double onset_s = 0.0;
  double offset_s = 0.0;
  std::string label;

  bool operator==(const Event&) const = default;
};

using EventList = std::vector<Event>;

inline const std::vector<std::string>& default_classes() {
  static const std::vector<std::string> k = {"babycry", "glassbreak", "gunshot"};
  return k;
}

// Time-bin geometry of one inference window.
struct BinGeometry {
  int n_bins = OutputGrid::kBins;
  double window_len_s = 2.56;

  double bin_len_s() const { return window_len_s / n_bins; }
  // Left edge of bin b in window-local seconds (b == n_bins gives the window end).
  double edge(int b) const { return b * bin_len_s(); }
};

// Post-processing constants for decoding and assembly.
struct DecodeParams {
  double threshold = 0.5;
  double merge_gap_s = 0.3;
  double min_dur_s = 0.1;
};

// Rasterizes events into a training target. Per class and bin: presence 1
// iff some event of that class overlaps the bin with positive duration;
// start/end are the clipped span as fractions of the bin; multiple events of
// one class in a bin merge to (min start, max end). Errors: "unknown-class".
OutputGrid encode_events(const EventList& events, double window_offset_s,
                         const BinGeometry& geom, std::span<const std::string> classes);

// Emits one window-local fragment per (bin, class) with presence >= threshold,
// mapped to absolute time; fragments with end <= start are discarded.
EventList decode_grid(const OutputGrid& grid, double window_offset_s, const BinGeometry& geom,
                      std::span<const std::string> classes, double threshold);

// Union-merges per-class fragments whose gap is <= merge_gap_s, drops merged
// events shorter than min_dur_s, and sorts by (onset, label).
// Errors: "negative-param".
EventList assemble_predictions(EventList fragments, double merge_gap_s, double min_dur_s);

// TUT-style annotation file: one `onset<TAB>offset<TAB>label` per line,
// decimal seconds, sorted by onset.
void write_annotations(const std::filesystem::path& path, const EventList& events);
EventList read_annotations(const std::filesystem::path& path);

}  // namespace yoho::codec
