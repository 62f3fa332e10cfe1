// Copyright 2026 The TBF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tbf/belief.hpp"

namespace tbf {

/// Inclusive frame interval during which an action is true.
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentAnnotation {
  std::string action;
  std::vector<Segment> segments;  // sorted, non-overlapping

  void validate() const {
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (segments[i].start > segments[i].end) {
        throw Error(ErrorCode::InvalidAnnotation, action + ": segment with start > end");
      }
      if (i > 0 && segments[i].start <= segments[i - 1].end) {
        throw Error(ErrorCode::InvalidAnnotation, action + ": segments unsorted or overlapping");
      }
    }
  }

  [[nodiscard]] bool contains(std::size_t frame) const noexcept {
    for (const auto& s : segments) {
      if (frame >= s.start && frame <= s.end) return true;
    }
    return false;
  }

  /// One past the last annotated frame.
  [[nodiscard]] std::size_t extent() const noexcept {
    return segments.empty() ? 0 : segments.back().end + 1;
  }

  [[nodiscard]] std::vector<bool> mask(std::size_t frames) const {
    std::vector<bool> out(frames, false);
    for (const auto& s : segments) {
      for (std::size_t f = s.start; f <= s.end && f < frames; ++f) out[f] = true;
    }
    return out;
  }
};

/// True iff BetP(R) exceeds the threshold.
inline bool decide(const MassDistribution& m, double threshold = 0.5) {
  if (!m.frame().is_binary()) throw Error(ErrorCode::FrameMismatch, "decide needs a binary frame");
  return pignistic(m)[0] > threshold;
}

inline std::vector<bool> decide_all(std::span<const MassDistribution> masses, double threshold) {
  std::vector<bool> out;
  out.reserve(masses.size());
  for (const auto& m : masses) out.push_back(decide(m, threshold));
  return out;
}

/// Frame-wise recall and precision with their underlying counts.
/// Empty denominators yield 1.
struct FrameMetrics {
  double recall = 1.0;
  double precision = 1.0;
  std::size_t truth_count = 0;      // |C|
  std::size_t retrieved_count = 0;  // |R|
  std::size_t hit_count = 0;        // |C ∩ R|

  static FrameMetrics from_counts(std::size_t truth, std::size_t retrieved, std::size_t hits) {
    FrameMetrics m{1.0, 1.0, truth, retrieved, hits};
    if (truth > 0) m.recall = static_cast<double>(hits) / static_cast<double>(truth);
    if (retrieved > 0) m.precision = static_cast<double>(hits) / static_cast<double>(retrieved);
    return m;
  }
};

inline FrameMetrics segment_metrics(const std::vector<bool>& decisions,
                                    const SegmentAnnotation& truth) {
  truth.validate();
  if (truth.extent() > decisions.size()) {
    throw Error(ErrorCode::InvalidAnnotation,
                truth.action + ": annotation extends past the decided frames");
  }
  std::size_t c = 0, r = 0, hits = 0;
  for (std::size_t f = 0; f < decisions.size(); ++f) {
    const bool is_true = truth.contains(f);
    c += is_true;
    r += decisions[f];
    hits += is_true && decisions[f];
  }
  return FrameMetrics::from_counts(c, r, hits);
}

/// One row of the before/after comparison. `after` is absent when the filter
/// was not run.
struct ActionReport {
  std::string action;
  FrameMetrics before;
  std::optional<FrameMetrics> after;

  [[nodiscard]] double recall_gain() const { return after ? after->recall - before.recall : 0.0; }
  [[nodiscard]] double precision_gain() const {
    return after ? after->precision - before.precision : 0.0;
  }
};

inline ActionReport gain_report(const std::vector<bool>& before, const std::vector<bool>& after,
                                const SegmentAnnotation& truth) {
  if (before.size() != after.size()) {
    throw Error(ErrorCode::InvalidAnnotation, "before/after decisions differ in length");
  }
  return {truth.action, segment_metrics(before, truth), segment_metrics(after, truth)};
}

inline ActionReport before_only_report(const std::vector<bool>& before,
                                       const SegmentAnnotation& truth) {
  return {truth.action, segment_metrics(before, truth), std::nullopt};
}

namespace detail {

inline std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

inline std::string signed_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f", 100.0 * v);
  return buf;
}

// Column width in code points, so accented headers still line up.
inline std::size_t display_width(const std::string& s) {
  std::size_t w = 0;
  for (unsigned char c : s) w += (c & 0xC0) != 0x80;
  return w;
}

inline std::string pad(const std::string& s, std::size_t width) {
  const auto w = display_width(s);
  return w >= width ? s : s + std::string(width - w, ' ');
}

}  // namespace detail

struct EvalReport {
  std::string title;
  std::vector<ActionReport> rows;

  [[nodiscard]] bool has_after() const {
    for (const auto& r : rows) {
      if (!r.after) return false;
    }
    return !rows.empty();
  }

  /// Unweighted mean of the per-action recall and precision.
  [[nodiscard]] ActionReport mean_row() const {
    ActionReport mean{"moyenne", {}, std::nullopt};
    if (rows.empty()) return mean;
    FrameMetrics before{0.0, 0.0}, after{0.0, 0.0};
    for (const auto& r : rows) {
      before.recall += r.before.recall;
      before.precision += r.before.precision;
      before.truth_count += r.before.truth_count;
      before.retrieved_count += r.before.retrieved_count;
      before.hit_count += r.before.hit_count;
      if (r.after) {
        after.recall += r.after->recall;
        after.precision += r.after->precision;
        after.truth_count += r.after->truth_count;
        after.retrieved_count += r.after->retrieved_count;
        after.hit_count += r.after->hit_count;
      }
    }
    const auto n = static_cast<double>(rows.size());
    before.recall /= n;
    before.precision /= n;
    after.recall /= n;
    after.precision /= n;
    mean.before = before;
    if (has_after()) mean.after = after;
    return mean;
  }
};

/// "recall/precision" in percent with one decimal.
inline std::string format_pair(const FrameMetrics& m) {
  return detail::percent(m.recall) + "/" + detail::percent(m.precision);
}

inline std::string format_gain(const ActionReport& r) {
  return detail::signed_percent(r.recall_gain()) + "/" + detail::signed_percent(r.precision_gain());
}

/// `action: 40.2/94.7 → 78.4/95.3, gain +38.2/+0.6`
inline std::string summary_line(const ActionReport& r) {
  std::string out = r.action + ": " + format_pair(r.before);
  if (r.after) out += " → " + format_pair(*r.after) + ", gain " + format_gain(r);
  return out;
}

/// Fixed-width table: action | avant | après | gain, plus a mean row.
inline std::string render_table(const EvalReport& report) {
  const bool after = report.has_after();
  std::size_t name_w = detail::display_width(std::string("moyenne"));
  for (const auto& r : report.rows) name_w = std::max(name_w, detail::display_width(r.action));
  name_w += 2;
  constexpr std::size_t kCell = 13;

  auto line = [&](const ActionReport& r) {
    std::string s = detail::pad(r.action, name_w) + detail::pad(format_pair(r.before), kCell);
    if (after) s += detail::pad(format_pair(*r.after), kCell) + format_gain(r);
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s + "\n";
  };

  std::string out;
  if (!report.title.empty()) out += report.title + "\n";
  std::string header = detail::pad("action", name_w) + detail::pad("avant", kCell);
  if (after) header += detail::pad("après", kCell) + "gain";
  while (!header.empty() && header.back() == ' ') header.pop_back();
  out += header + "\n";
  out += std::string(detail::display_width(header) + (after ? 8 : 0), '-') + "\n";
  for (const auto& r : report.rows) out += line(r);
  if (!report.rows.empty()) {
    out += std::string(detail::display_width(header) + (after ? 8 : 0), '-') + "\n";
    out += line(report.mean_row());
  }
  return out;
}

}  // namespace tbf
