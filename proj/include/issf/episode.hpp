#pragma once

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "issf/actions.hpp"
#include "issf/episode_state.hpp"
#include "issf/graph.hpp"
#include "issf/observation.hpp"

namespace issf {

enum class Role : std::uint8_t { Attacker = 0, Defender = 1 };

std::string_view to_string(Role r);
Role role_from_string(std::string_view s);
Role opposite(Role r);

// Frozen decision policies driven by the engine. Returning nullopt is a free
// no-op; the engine also substitutes a no-op when the valid set is empty.
// Agents draw randomness exclusively from the episode rng they are handed.
class AttackerAgent {
 public:
  virtual ~AttackerAgent() = default;
  virtual void on_episode_start() {}
  virtual std::optional<AttackerAction> act(const DynamicAccessGraph& graph,
                                            const AttackerObservation& obs,
                                            const std::vector<AttackerAction>& valid,
                                            Rng& rng) = 0;
};

class DefenderAgent {
 public:
  virtual ~DefenderAgent() = default;
  virtual void on_episode_start() {}
  virtual std::optional<DefenderAction> act(const DynamicAccessGraph& graph,
                                            const DefenderObservation& obs,
                                            const std::vector<DefenderAction>& valid,
                                            Rng& rng) = 0;
};

class RandomAttackerAgent : public AttackerAgent {
 public:
  std::optional<AttackerAction> act(const DynamicAccessGraph&, const AttackerObservation&,
                                    const std::vector<AttackerAction>& valid, Rng& rng) override;
};

class RandomDefenderAgent : public DefenderAgent {
 public:
  std::optional<DefenderAction> act(const DynamicAccessGraph&, const DefenderObservation&,
                                    const std::vector<DefenderAction>& valid, Rng& rng) override;
};

// Declines every turn. Training against it reduces the game to a single-agent
// attack problem.
class NullDefenderAgent : public DefenderAgent {
 public:
  std::optional<DefenderAction> act(const DynamicAccessGraph&, const DefenderObservation&,
                                    const std::vector<DefenderAction>&, Rng&) override {
    return std::nullopt;
  }
};

enum class OutcomeKind : std::uint8_t { AttackerWin = 0, StepLimit = 1, Aborted = 2 };

std::string_view to_string(OutcomeKind k);

struct TerminationOutcome {
  OutcomeKind kind = OutcomeKind::StepLimit;
  std::string reason;
};

struct StepRecord {
  int step = 0;
  Role role = Role::Attacker;
  bool acted = false;  // false = no-op
  std::variant<std::monostate, AttackerAction, DefenderAction> action;
  RewardBreakdown reward;
  int discovered = 0;  // posture counters after the action
  int owned = 0;
  int suspicious = 0;
  std::uint64_t rng_draws = 0;  // cumulative episode draw count after the action
};

struct EpisodeOptions {
  bool defender_first = true;
  // Overrides the scenario's episode cap when set (training uses this).
  std::optional<int> max_length = std::nullopt;
};

struct RoundResult {
  StepRecord first;
  StepRecord second;
  std::optional<TerminationOutcome> outcome;
};

// Runs one full round: both sides act in configured order, reimage counters
// tick, the step counter advances, then termination is evaluated
// (AttackerWin before StepLimit).
RoundResult step(const DynamicAccessGraph& graph, EpisodeState& state, AttackerAgent& attacker,
                 DefenderAgent& defender, const EpisodeOptions& options = {});

struct EpisodeTrace {
  std::string scenario_id;
  std::string scenario_hash;
  std::uint64_t seed = 0;
  bool defender_first = true;
  std::vector<StepRecord> records;
  TerminationOutcome outcome;
  int length = 0;  // rounds played
  double attacker_total = 0.0;
  double defender_total = 0.0;
  ActionTally tally;
  int end_discovered = 0;
  int end_owned = 0;
  int end_suspicious = 0;
};

EpisodeTrace run_episode(const DynamicAccessGraph& graph, AttackerAgent& attacker,
                         DefenderAgent& defender, std::uint64_t seed,
                         const EpisodeOptions& options = {});

// JSONL: one header line, then one line per step record.
void write_trace_jsonl(const DynamicAccessGraph& graph, const EpisodeTrace& trace,
                       std::ostream& out);

}  // namespace issf
