#pragma once

/**
 * @file tu_stream.hpp
 * @brief Synthetic keystroke/fixation logs and per-unit summary tables.
 *
 * S-mode units interleave source fixations with typing after a short pause.
 * I-mode units open with a long pause that grows with effort, then read the
 * source in a block before typing the target, strictly in sequence.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tpsim/agent.hpp"
#include "tpsim/csv.hpp"
#include "tpsim/error.hpp"
#include "tpsim/field.hpp"
#include "tpsim/rng.hpp"

namespace tpsim {

struct TimingModel {
  double smode_iki_ms = 150.0;
  double imode_pause_base_ms = 1200.0;
  double ms_per_nat = 400.0;
  double fixation_ms = 250.0;
  double jitter_fraction = 0.1;
  std::size_t keystrokes_per_target = 6;

  void validate() const {
    auto positive = [](const char* field, double v) {
      if (!(v > 0.0) || std::isinf(v)) throw ConfigError(std::string("timing.") + field, "must be finite and > 0");
    };
    positive("smode_iki_ms", smode_iki_ms);
    positive("imode_pause_base_ms", imode_pause_base_ms);
    positive("ms_per_nat", ms_per_nat);
    positive("fixation_ms", fixation_ms);
    if (!(jitter_fraction >= 0.0 && jitter_fraction < 1.0))
      throw ConfigError("timing.jitter_fraction", "must lie in [0, 1)");
    if (keystrokes_per_target < 1) throw ConfigError("timing.keystrokes_per_target", "must be >= 1");
  }
};

/// Effort beyond this many nats no longer lengthens a pause.
inline constexpr double kMaxTimedEffort = 100.0;

enum class EventKind { fixation_source, fixation_target, keystroke, pause_marker };

inline const char* to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::fixation_source: return "fixation_source";
    case EventKind::fixation_target: return "fixation_target";
    case EventKind::keystroke: return "keystroke";
    case EventKind::pause_marker: return "pause_marker";
  }
  return "?";
}

inline EventKind event_kind_from_string(std::string_view s) {
  for (EventKind k : {EventKind::fixation_source, EventKind::fixation_target, EventKind::keystroke, EventKind::pause_marker})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown event kind '" + std::string(s) + "'");
}

struct TuEvent {
  std::int64_t timestamp_ms = 0;
  EventKind kind = EventKind::keystroke;
  std::size_t tu_index = 0;
  std::size_t payload = 0;  ///< source token for fixations and pauses, target for keystrokes

  friend bool operator==(const TuEvent&, const TuEvent&) = default;
};

inline std::vector<TuEvent> emit_events(const SessionTrace& trace, const TimingModel& timing, RngStream rng) {
  timing.validate();
  // symmetric jitter, used where no lower bound has to hold
  auto jittered = [&](double ms) {
    const double factor = 1.0 + timing.jitter_fraction * (2.0 * rng.uniform() - 1.0);
    return std::max<std::int64_t>(1, std::llround(ms * factor));
  };

  std::vector<TuEvent> events;
  std::int64_t cursor = 0;
  for (const TuRecord& rec : trace.records) {
    const std::size_t tu = rec.index;
    auto emit = [&](std::int64_t ts, EventKind kind, std::size_t payload) {
      events.push_back({ts, kind, tu, payload});
    };

    if (rec.mode == Mode::smode) {
      std::int64_t ts = cursor + jittered(timing.smode_iki_ms);
      for (std::size_t k = 0; k < timing.keystrokes_per_target; ++k) {
        if (k % 2 == 0) emit(ts, EventKind::fixation_source, rec.token);
        emit(ts, EventKind::keystroke, rec.action);
        if (k + 1 < timing.keystrokes_per_target) ts += jittered(timing.smode_iki_ms);
      }
      cursor = ts;
      continue;
    }

    const double effort = std::min(rec.effort(), kMaxTimedEffort);
    const double effort_ms = timing.ms_per_nat * effort * (1.0 + timing.jitter_fraction * rng.uniform());
    std::int64_t ts = cursor + std::llround(timing.imode_pause_base_ms + effort_ms);
    emit(ts, EventKind::pause_marker, rec.token);
    const auto reads = 2 + static_cast<std::size_t>(std::ceil(effort));
    for (std::size_t k = 0; k < reads; ++k) {
      emit(ts, EventKind::fixation_source, rec.token);
      ts += jittered(timing.fixation_ms);
    }
    emit(ts, EventKind::fixation_target, rec.action);
    for (std::size_t k = 0; k < timing.keystrokes_per_target; ++k) {
      ts += jittered(timing.smode_iki_ms);
      emit(ts, EventKind::keystroke, rec.action);
    }
    cursor = ts;
  }
  return events;
}

struct TuSummaryRow {
  std::string session_id;
  std::size_t tu_index = 0;
  std::size_t token = 0;
  std::size_t target = 0;
  Mode mode = Mode::smode;
  std::int64_t dur_ms = 0;
  std::int64_t pause_before_ms = 0;
  std::size_t fixation_count = 0;
  Nats effort_e1_nats = 0.0;
  Nats effort_e2_nats = 0.0;
  double effect = 0.0;
  Nats f_nats = 0.0;
  PathClass path_class = PathClass::HighRelevance;

  friend bool operator==(const TuSummaryRow&, const TuSummaryRow&) = default;
};

inline std::vector<TuSummaryRow> summarize_tus(const std::vector<TuEvent>& events, const SessionTrace& trace,
                                               const std::string& session_id, PathClass path_class) {
  struct Span {
    std::int64_t first = 0, last = 0;
    std::size_t fixations = 0;
    bool seen = false;
  };
  std::vector<Span> spans(trace.records.size());
  for (const TuEvent& e : events) {
    if (e.tu_index >= spans.size())
      throw std::invalid_argument("summarize_tus: event for unit " + std::to_string(e.tu_index) +
                                  " but trace has " + std::to_string(spans.size()));
    Span& s = spans[e.tu_index];
    if (!s.seen) s.first = e.timestamp_ms;
    s.seen = true;
    s.last = std::max(s.last, e.timestamp_ms);
    if (e.kind == EventKind::fixation_source || e.kind == EventKind::fixation_target) ++s.fixations;
  }
  if (std::any_of(spans.begin(), spans.end(), [](const Span& s) { return !s.seen; }))
    throw std::invalid_argument("summarize_tus: trace has units without events");

  std::vector<TuSummaryRow> rows;
  rows.reserve(spans.size());
  std::int64_t previous_end = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const TuRecord& rec = trace.records[i];
    rows.push_back({
        .session_id = session_id,
        .tu_index = i,
        .token = rec.token,
        .target = rec.action,
        .mode = rec.mode,
        .dur_ms = spans[i].last - spans[i].first,
        .pause_before_ms = spans[i].first - previous_end,
        .fixation_count = spans[i].fixations,
        .effort_e1_nats = rec.effort_e1,
        .effort_e2_nats = rec.effort_e2,
        .effect = rec.effect,
        .f_nats = rec.f,
        .path_class = path_class,
    });
    previous_end = spans[i].last;
  }
  return rows;
}

inline constexpr std::string_view kSummaryHeader =
    "session_id,tu_index,token,target,mode,dur_ms,pause_before_ms,fixation_count,effort_e1_nats,effort_e2_nats,"
    "effect,f_nats,class";

inline constexpr std::string_view kEventHeader = "timestamp_ms,kind,tu_index,payload";

inline void write_table(const std::vector<TuSummaryRow>& rows, std::ostream& out) {
  out << kSummaryHeader << '\n';
  for (const TuSummaryRow& r : rows) {
    if (r.session_id.find_first_of(",\n\r") != std::string::npos)
      throw std::invalid_argument("write_table: session_id may not contain delimiters");
    out << r.session_id << ',' << r.tu_index << ',' << r.token << ',' << r.target << ',' << to_string(r.mode) << ','
        << r.dur_ms << ',' << r.pause_before_ms << ',' << r.fixation_count << ',' << csv::format(r.effort_e1_nats)
        << ',' << csv::format(r.effort_e2_nats) << ',' << csv::format(r.effect) << ',' << csv::format(r.f_nats) << ','
        << to_string(r.path_class) << '\n';
  }
}

inline std::vector<TuSummaryRow> read_table(std::istream& in) {
  std::vector<TuSummaryRow> rows;
  csv::read(in, kSummaryHeader, [&](const std::vector<std::string_view>& f, std::size_t line) {
    TuSummaryRow r;
    r.session_id = std::string(f[0]);
    r.tu_index = csv::parse<std::size_t>(f[1], line, "tu_index");
    r.token = csv::parse<std::size_t>(f[2], line, "token");
    r.target = csv::parse<std::size_t>(f[3], line, "target");
    if (f[4] != "smode" && f[4] != "imode") throw csv::ParseError(line, "bad mode '" + std::string(f[4]) + "'");
    r.mode = f[4] == "smode" ? Mode::smode : Mode::imode;
    r.dur_ms = csv::parse<std::int64_t>(f[5], line, "dur_ms");
    r.pause_before_ms = csv::parse<std::int64_t>(f[6], line, "pause_before_ms");
    r.fixation_count = csv::parse<std::size_t>(f[7], line, "fixation_count");
    r.effort_e1_nats = csv::parse<double>(f[8], line, "effort_e1_nats");
    r.effort_e2_nats = csv::parse<double>(f[9], line, "effort_e2_nats");
    r.effect = csv::parse<double>(f[10], line, "effect");
    r.f_nats = csv::parse<double>(f[11], line, "f_nats");
    try {
      r.path_class = path_class_from_string(f[12]);
    } catch (const std::invalid_argument& e) {
      throw csv::ParseError(line, e.what());
    }
    rows.push_back(std::move(r));
  });
  return rows;
}

inline void write_events(const std::vector<TuEvent>& events, std::ostream& out) {
  out << kEventHeader << '\n';
  for (const TuEvent& e : events)
    out << e.timestamp_ms << ',' << to_string(e.kind) << ',' << e.tu_index << ',' << e.payload << '\n';
}

inline std::vector<TuEvent> read_events(std::istream& in) {
  std::vector<TuEvent> events;
  csv::read(in, kEventHeader, [&](const std::vector<std::string_view>& f, std::size_t line) {
    TuEvent e;
    e.timestamp_ms = csv::parse<std::int64_t>(f[0], line, "timestamp_ms");
    try {
      e.kind = event_kind_from_string(f[1]);
    } catch (const std::invalid_argument& err) {
      throw csv::ParseError(line, err.what());
    }
    e.tu_index = csv::parse<std::size_t>(f[2], line, "tu_index");
    e.payload = csv::parse<std::size_t>(f[3], line, "payload");
    events.push_back(e);
  });
  return events;
}

}  // namespace tpsim
