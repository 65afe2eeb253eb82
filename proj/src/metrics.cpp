// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#include "yoho/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "yoho/error.hpp"

namespace yoho::metrics {

namespace {

int class_index(std::span<const std::string> classes, const std::string& label) {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == label) return static_cast<int>(i);
  }
  return -1;
}

void check_same_shape(const SegmentRoll& a, const SegmentRoll& b) {
  require(a.n_segments == b.n_segments && a.n_classes == b.n_classes, "shape-mismatch",
          "rolls are " + std::to_string(a.n_segments) + "x" + std::to_string(a.n_classes) +
              " vs " + std::to_string(b.n_segments) + "x" + std::to_string(b.n_classes));
}

struct CellCounts {
  long tp = 0, fp = 0, fn = 0;
  long s = 0, d = 0, i = 0, n = 0;
  bool ref_active = false, sys_active = false;
};

CellCounts count_cells(const SegmentRoll& ref, const SegmentRoll& sys) {
  CellCounts c;
  for (int k = 0; k < ref.n_segments; ++k) {
    long seg_fn = 0, seg_fp = 0, seg_n = 0;
    for (int cls = 0; cls < ref.n_classes; ++cls) {
      const bool r = ref.at(k, cls) != 0;
      const bool s = sys.at(k, cls) != 0;
      c.ref_active |= r;
      c.sys_active |= s;
      if (r && s) ++c.tp;
      if (!r && s) { ++c.fp; ++seg_fp; }
      if (r && !s) { ++c.fn; ++seg_fn; }
      if (r) ++seg_n;
    }
    const long seg_s = std::min(seg_fn, seg_fp);
    c.s += seg_s;
    c.d += seg_fn - seg_s;
    c.i += seg_fp - seg_s;
    c.n += seg_n;
  }
  return c;
}

double f1_from_counts(long tp, long fp, long fn, bool ref_active, bool sys_active) {
  const long denom = 2 * tp + fp + fn;
  if (denom > 0) return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  return (!ref_active && !sys_active) ? 1.0 : 0.0;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

SegmentRoll events_to_roll(const codec::EventList& events, double duration_s,
                           std::span<const std::string> classes, double segment_len_s) {
  require(duration_s >= 0.0, "negative-param", "duration must be >= 0");
  require(segment_len_s > 0.0, "negative-param", "segment length must be > 0");

  SegmentRoll roll;
  roll.segment_len_s = segment_len_s;
  roll.duration_s = duration_s;
  roll.n_classes = static_cast<int>(classes.size());
  roll.n_segments = static_cast<int>(std::ceil(duration_s / segment_len_s));
  roll.cells.assign(static_cast<std::size_t>(roll.n_segments) * roll.n_classes, 0);

  for (const codec::Event& ev : events) {
    const int cls = class_index(classes, ev.label);
    require(cls >= 0, "unknown-class", "label '" + ev.label + "' not in class list");
    double onset = ev.onset_s;
    double offset = ev.offset_s;
    if (offset > duration_s) {
      std::fprintf(stderr, "warning: event [%g, %g] '%s' clipped to duration %g\n", onset,
                   offset, ev.label.c_str(), duration_s);
      offset = duration_s;
    }
    if (onset < 0.0) onset = 0.0;
    if (offset <= onset) continue;

    for (int k = 0; k < roll.n_segments; ++k) {
      const double seg_lo = k * segment_len_s;
      const double seg_hi = seg_lo + segment_len_s;
      if (std::min(offset, seg_hi) > std::max(onset, seg_lo)) roll.at(k, cls) = 1;
    }
  }
  return roll;
}

EvalReport segment_f1(const SegmentRoll& reference, const SegmentRoll& system) {
  check_same_shape(reference, system);
  const CellCounts c = count_cells(reference, system);
  EvalReport r;
  r.tp = c.tp;
  r.fp = c.fp;
  r.fn = c.fn;
  r.f1 = f1_from_counts(c.tp, c.fp, c.fn, c.ref_active, c.sys_active);
  return r;
}

EvalReport segment_error_rate(const SegmentRoll& reference, const SegmentRoll& system) {
  check_same_shape(reference, system);
  const CellCounts c = count_cells(reference, system);
  EvalReport r;
  r.substitutions = c.s;
  r.deletions = c.d;
  r.insertions = c.i;
  r.n_reference = c.n;
  if (c.n > 0) {
    r.error_rate = static_cast<double>(c.s + c.d + c.i) / static_cast<double>(c.n);
    r.er_defined = true;
  }
  return r;
}

void Accumulator::add(const SegmentRoll& reference, const SegmentRoll& system) {
  check_same_shape(reference, system);
  const CellCounts c = count_cells(reference, system);
  tp_ += c.tp;
  fp_ += c.fp;
  fn_ += c.fn;
  s_ += c.s;
  d_ += c.d;
  i_ += c.i;
  n_ += c.n;
  saw_reference_activity_ |= c.ref_active;
  saw_system_activity_ |= c.sys_active;
}

EvalReport Accumulator::report() const {
  EvalReport r;
  r.tp = tp_;
  r.fp = fp_;
  r.fn = fn_;
  r.substitutions = s_;
  r.deletions = d_;
  r.insertions = i_;
  r.n_reference = n_;
  r.f1 = f1_from_counts(tp_, fp_, fn_, saw_reference_activity_, saw_system_activity_);
  if (n_ > 0) {
    r.error_rate = static_cast<double>(s_ + d_ + i_) / static_cast<double>(n_);
    r.er_defined = true;
  }
  return r;
}

double CellStats::f1_mean() const { return mean_of(f1_runs); }
double CellStats::f1_std() const { return sample_std_of(f1_runs); }
double CellStats::er_mean() const { return mean_of(er_runs); }
double CellStats::er_std() const { return sample_std_of(er_runs); }

const CellStats& CrossDomainReport::cell(const std::string& source,
                                         const std::string& target) const {
  for (const auto& c : cells) {
    if (c.source == source && c.target == target) return c;
  }
  fail("missing-cell", "no cell for " + source + " -> " + target);
}

std::string format_table(const CrossDomainReport& report) {
  const int col = 16;
  std::string out = "D_s/D_t";
  out.resize(col, ' ');
  for (const auto& t : report.targets) {
    std::string h = t;
    h.resize(col, ' ');
    out += h;
  }
  out += '\n';

  char buf[64];
  for (const auto& s : report.sources) {
    std::string row = s;
    row.resize(col, ' ');
    for (const auto& t : report.targets) {
      const CellStats& c = report.cell(s, t);
      std::snprintf(buf, sizeof buf, "%.2f \xC2\xB1 %.3f", c.f1_mean(), c.f1_std());
      std::string cell = buf;
      cell.resize(col, ' ');
      row += cell;
    }
    out += row;
    out += '\n';
  }
  return out;
}

std::string report_to_json(const CrossDomainReport& report) {
  nlohmann::json j;
  j["sources"] = report.sources;
  j["targets"] = report.targets;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : report.cells) {
    j["cells"].push_back({{"source", c.source},
                          {"target", c.target},
                          {"f1_mean", c.f1_mean()},
                          {"f1_std", c.f1_std()},
                          {"er_mean", c.er_mean()},
                          {"er_std", c.er_std()}});
  }
  return j.dump(2) + "\n";
}

}  // namespace yoho::metrics
