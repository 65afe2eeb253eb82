// Copyright (c) 2026 the yoho-sed authors.
// Licensed under the Apache License, Version 2.0. See the LICENSE file in
// the project root for license terms.

#include "yoho/codec.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "yoho/error.hpp"

namespace yoho::codec {

namespace {

int class_index(std::span<const std::string> classes, const std::string& label) {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == label) return static_cast<int>(i);
  }
  fail("unknown-class", "label '" + label + "' is not in the configured class list");
}

std::string format_seconds(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

OutputGrid encode_events(const EventList& events, double window_offset_s,
                         const BinGeometry& geom, std::span<const std::string> classes) {
  OutputGrid grid;
  const double d = geom.bin_len_s();

  for (const Event& ev : events) {
    const int cls = class_index(classes, ev.label);
    const double local_on = ev.onset_s - window_offset_s;
    const double local_off = ev.offset_s - window_offset_s;

    for (int b = 0; b < geom.n_bins; ++b) {
      const double bin_lo = geom.edge(b);
      const double bin_hi = geom.edge(b + 1);
      const double ov_lo = std::max(local_on, bin_lo);
      const double ov_hi = std::min(local_off, bin_hi);
      if (ov_hi <= ov_lo) continue;

      // the edge cases are computed branch-free of rounding so that encoded
      // values are exactly 0/1 when the event reaches the bin boundary
      const double s = ov_lo == bin_lo ? 0.0 : (ov_lo - bin_lo) / d;
      const double e = ov_hi == bin_hi ? 1.0 : (ov_hi - bin_lo) / d;

      if (grid.presence(b, cls) != 0.0) {
        grid.start(b, cls) = std::min(grid.start(b, cls), s);
        grid.end(b, cls) = std::max(grid.end(b, cls), e);
      } else {
        grid.presence(b, cls) = 1.0;
        grid.start(b, cls) = s;
        grid.end(b, cls) = e;
      }
    }
  }
  return grid;
}

EventList decode_grid(const OutputGrid& grid, double window_offset_s, const BinGeometry& geom,
                      std::span<const std::string> classes, double threshold) {
  EventList out;
  const double d = geom.bin_len_s();

  for (int b = 0; b < geom.n_bins; ++b) {
    for (int c = 0; c < OutputGrid::kClasses && c < static_cast<int>(classes.size()); ++c) {
      if (grid.presence(b, c) < threshold) continue;
      const double s = grid.start(b, c);
      const double e = grid.end(b, c);
      if (e <= s) continue;  // inverted regressors carry no span

      const double lo = s == 0.0 ? geom.edge(b) : geom.edge(b) + s * d;
      const double hi = e == 1.0 ? geom.edge(b + 1) : geom.edge(b) + e * d;
      out.push_back({window_offset_s + lo, window_offset_s + hi, classes[c]});
    }
  }
  return out;
}

EventList assemble_predictions(EventList fragments, double merge_gap_s, double min_dur_s) {
  require(merge_gap_s >= 0.0, "negative-param", "merge_gap_s must be >= 0");
  require(min_dur_s >= 0.0, "negative-param", "min_dur_s must be >= 0");

  std::map<std::string, EventList> by_class;
  for (Event& f : fragments) by_class[f.label].push_back(std::move(f));

  EventList out;
  for (auto& [label, frags] : by_class) {
    std::sort(frags.begin(), frags.end(),
              [](const Event& a, const Event& b) { return a.onset_s < b.onset_s; });
    std::size_t i = 0;
    while (i < frags.size()) {
      Event cur = frags[i++];
      while (i < frags.size() && frags[i].onset_s - cur.offset_s <= merge_gap_s) {
        cur.offset_s = std::max(cur.offset_s, frags[i].offset_s);
        ++i;
      }
      if (cur.offset_s - cur.onset_s >= min_dur_s) out.push_back(std::move(cur));
    }
  }

  std::sort(out.begin(), out.end(), [](const Event& a, const Event& b) {
    return a.onset_s != b.onset_s ? a.onset_s < b.onset_s : a.label < b.label;
  });
  return out;
}

void write_annotations(const std::filesystem::path& path, const EventList& events) {
  EventList sorted = events;
  std::sort(sorted.begin(), sorted.end(), [](const Event& a, const Event& b) {
    return a.onset_s != b.onset_s ? a.onset_s < b.onset_s : a.label < b.label;
  });

  std::ofstream f(path, std::ios::trunc);
  require(f.good(), "unwritable-path", "cannot open for writing: " + path.string());
  for (const Event& ev : sorted) {
    f << format_seconds(ev.onset_s) << '\t' << format_seconds(ev.offset_s) << '\t' << ev.label
      << '\n';
  }
  f.flush();
  require(f.good(), "unwritable-path", "write failed: " + path.string());
}

EventList read_annotations(const std::filesystem::path& path) {
  std::ifstream f(path);
  require(f.good(), "missing-file", "cannot open " + path.string());

  EventList out;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string onset_str, offset_str, label;
    const bool ok = static_cast<bool>(std::getline(ss, onset_str, '\t')) &&
                    static_cast<bool>(std::getline(ss, offset_str, '\t')) &&
                    static_cast<bool>(std::getline(ss, label));
    require(ok, "bad-annotation",
            path.string() + ":" + std::to_string(line_no) + ": expected onset<TAB>offset<TAB>label");

    Event ev;
    auto r1 = std::from_chars(onset_str.data(), onset_str.data() + onset_str.size(), ev.onset_s);
    auto r2 =
        std::from_chars(offset_str.data(), offset_str.data() + offset_str.size(), ev.offset_s);
    require(r1.ec == std::errc() && r2.ec == std::errc(), "bad-annotation",
            path.string() + ":" + std::to_string(line_no) + ": unparsable onset/offset");
    require(ev.offset_s > ev.onset_s, "bad-annotation",
            path.string() + ":" + std::to_string(line_no) + ": offset must exceed onset");
    ev.label = label;
    out.push_back(std::move(ev));
  }
  return out;
}

}  // namespace yoho::codec
