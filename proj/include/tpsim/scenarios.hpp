#pragma once

// Reference scenarios. The same settings ship as configs/scen_*.json.

#include <string>

#include "tpsim/agent.hpp"
#include "tpsim/world.hpp"

namespace tpsim {

struct Scenario {
  std::string name;
  TaskConfig task;
  MonitorConfig monitor;
};

/// Unambiguous text whose primed defaults are all adequate.
inline Scenario scen_easy() {
  Scenario s{"scen_easy", {}, {}};
  s.task.lexicon_size = 4;
  s.task.senses_per_token = 1;
  s.task.context_overlap = 0.95;
  s.task.cue_reliability = 0.9;
  return s;
}

/// One ambiguous token whose habitual rendering is usually wrong.
inline Scenario scen_hard() {
  Scenario s{"scen_hard", {}, {}};
  s.task.lexicon_size = 4;
  s.task.senses_per_token = 2;
  s.task.ambiguous_tokens = 1;
  s.task.context_overlap = 0.3;
  s.task.cue_reliability = 0.9;
  return s;
}

/// An ambiguous token that no target renders adequately, on a small budget.
inline Scenario scen_blocked() {
  Scenario s{"scen_blocked", {}, {}};
  s.task.lexicon_size = 2;
  s.task.senses_per_token = 2;
  s.task.ambiguous_tokens = 1;
  s.task.blocked_tokens = 1;
  s.task.context_overlap = 0.3;
  s.task.cue_reliability = 0.9;
  s.monitor.effort_budget = 8.0;
  return s;
}

}  // namespace tpsim
