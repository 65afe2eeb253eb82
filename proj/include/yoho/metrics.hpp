// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "yoho/codec.hpp"

namespace yoho::metrics {

// Binary per-segment, per-class activity.
struct SegmentRoll {
  int n_segments = 0;
  int n_classes = 0;
  double segment_len_s = 1.0;
  double duration_s = 0.0;
  std::vector<std::uint8_t> cells;  // [segment * n_classes + class]

  std::uint8_t& at(int seg, int cls) { return cells[static_cast<std::size_t>(seg) * n_classes + cls]; }
  std::uint8_t at(int seg, int cls) const { return cells[static_cast<std::size_t>(seg) * n_classes + cls]; }
};

// Micro-averaged counts pooled over all cells / segments.
struct EvalReport {
  double f1 = 0.0;
  double error_rate = 0.0;
  bool er_defined = false;  // false when the reference has no active cells
  long tp = 0, fp = 0, fn = 0;
  long substitutions = 0, deletions = 0, insertions = 0, n_reference = 0;
};

// Discretizes events onto half-open 1 s segments (cell active iff the event
// overlaps the segment with positive duration). Events reaching past the
// file duration are clipped with a warning.
SegmentRoll events_to_roll(const codec::EventList& events, double duration_s,
                           std::span<const std::string> classes, double segment_len_s = 1.0);

// F1 over pooled cell counts: 2TP / (2TP + FP + FN); two empty rolls score 1.
// Errors: "shape-mismatch".
EvalReport segment_f1(const SegmentRoll& reference, const SegmentRoll& system);

// Segment-based error rate with substitution/deletion/insertion split:
// per segment S = min(FN, FP), D = FN - S, I = FP - S; ER = sum(S+D+I)/sum(N).
// er_defined is false when the reference is empty. Errors: "shape-mismatch".
EvalReport segment_error_rate(const SegmentRoll& reference, const SegmentRoll& system);

// Pools counts over many files before computing F1/ER.
class Accumulator {
public:
  void add(const SegmentRoll& reference, const SegmentRoll& system);
  EvalReport report() const;

private:
  long tp_ = 0, fp_ = 0, fn_ = 0;
  long s_ = 0, d_ = 0, i_ = 0, n_ = 0;
  bool saw_reference_activity_ = false;
  bool saw_system_activity_ = false;
};

// ---------------------------------------------------------------------------
// Cross-domain result table (rows = source domain, columns = target domain)

struct CellStats {
  std::string source;
  std::string target;
  std::vector<double> f1_runs;  // one entry per seed
  std::vector<double> er_runs;

  double f1_mean() const;
  double f1_std() const;  // sample std, 0 for a single run
  double er_mean() const;
  double er_std() const;
};

struct CrossDomainReport {
  std::vector<std::string> sources;
  std::vector<std::string> targets;
  std::vector<CellStats> cells;  // sources x targets, row-major

  const CellStats& cell(const std::string& source, const std::string& target) const;
};

// Aligned plain-text table of "mean ± std" F1 values.
std::string format_table(const CrossDomainReport& report);

std::string report_to_json(const CrossDomainReport& report);

}  // namespace yoho::metrics
