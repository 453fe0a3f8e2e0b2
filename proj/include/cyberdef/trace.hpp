#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cyberdef/env.hpp"
#include "cyberdef/events.hpp"
#include "cyberdef/types.hpp"

namespace cyberdef {

struct AgentStepRecord {
  ActionSpec action;
  bool in_progress = false;
  /// Sub-policy that chose the action, -1 for flat strategies.
  int subpolicy = -1;
  std::uint8_t message = 0;
  /// Whether the agent's history held a host IOC when it acted.
  bool host_ioc = false;
  bool operator==(const AgentStepRecord&) const = default;
};

struct TraceStep {
  int step = 0;
  Phase phase = Phase::P1;
  std::vector<AgentStepRecord> actions;
  EventList events;
  double reward = 0.0;
  /// Ground truth before the step was applied.
  TruthRecord truth;
  std::string digest;
  bool operator==(const TraceStep&) const = default;
};

struct EpisodeTrace {
  std::string strategy;
  std::string red;
  std::uint64_t seed = 0;
  int episode = 0;
  int episode_length = 0;
  std::vector<int> host_subnet;
  std::vector<TraceStep> steps;

  bool is_contractor_host(int h) const { return host_subnet.at(h) == 0; }
  double total_reward() const;
  bool operator==(const EpisodeTrace&) const = default;
};

/// Starts a trace for the episode the environment was just reset into.
EpisodeTrace begin_trace(const NetworkEnv& env, std::string strategy, std::uint64_t seed,
                         int episode = 0);
/// Appends one step. `before` must be the truth snapshot taken before stepping.
void record_step(EpisodeTrace& trace, const TruthRecord& before, Phase phase,
                 std::vector<AgentStepRecord> actions, const StepResult& result);

/// One header line followed by one line per step.
void write_trace(std::ostream& out, const EpisodeTrace& trace);
std::string serialize_trace(const EpisodeTrace& trace);
/// Reads every episode in a line-delimited stream. Throws InputError on
/// malformed input.
std::vector<EpisodeTrace> read_traces(std::istream& in);
std::vector<EpisodeTrace> load_traces(const std::string& path);

}  // namespace cyberdef
