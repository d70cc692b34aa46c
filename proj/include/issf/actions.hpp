#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <variant>
#include <vector>

#include "issf/episode_state.hpp"
#include "issf/graph.hpp"

namespace issf {

// Attacker actions address nodes by index and vulnerabilities by toolkit
// index. Construction with out-of-universe indices is rejected by the engine
// with UnknownIdError; in-game precondition violations are penalized no-ops.
struct LocalAttack {
  int target;
  int vuln;  // toolkit index

  friend bool operator==(const LocalAttack&, const LocalAttack&) = default;
};

struct RemoteAttack {
  int source;
  int target;
  int vuln;

  friend bool operator==(const RemoteAttack&, const RemoteAttack&) = default;
};

struct Connect {
  int source;
  int target;
  int credential;

  friend bool operator==(const Connect&, const Connect&) = default;
};

using AttackerAction = std::variant<LocalAttack, RemoteAttack, Connect>;

struct Scan {
  friend bool operator==(const Scan&, const Scan&) = default;
};

struct Restore {
  int target;

  friend bool operator==(const Restore&, const Restore&) = default;
};

struct Remediate {
  int target;

  friend bool operator==(const Remediate&, const Remediate&) = default;
};

using DefenderAction = std::variant<Scan, Restore, Remediate>;

enum class OutcomeDetail : std::uint8_t {
  Exploited,           // attack succeeded, outcome applied
  CredentialGranted,   // connect succeeded, node owned
  VulnNotPresent,      // valid attack, target does not carry the vulnerability
  AlreadyExploited,    // valid attack, instance already exploited
  Scanned,
  Restored,
  Remediated,          // one exploited vulnerability nullified
  NothingToRemediate,  // remediate on a clean node, base cost only
  Invalid,             // precondition violation, penalized no-op
  NoOp,                // agent declined to act, free
};

std::string_view to_string(OutcomeDetail d);

struct RewardBreakdown {
  double gain = 0.0;
  double cost = 0.0;
  double reward = 0.0;  // gain - cost
  bool success = false;
  OutcomeDetail detail = OutcomeDetail::NoOp;
  int new_suspicious = 0;  // Scanned only
  int vulnerability = -1;  // toolkit index involved (attacks, Remediated)
};

ActionKind kind_of(const AttackerAction& action);
ActionKind kind_of(const DefenderAction& action);

// Applies one action, mutating state and the action tally. Throws
// UnknownIdError when an index is outside the graph universe.
RewardBreakdown apply_attacker(const DynamicAccessGraph& graph, EpisodeState& state,
                               const AttackerAction& action);
RewardBreakdown apply_defender(const DynamicAccessGraph& graph, EpisodeState& state,
                               const DefenderAction& action);

// Validity masks. Valid means preconditions hold; a valid attack may still
// fail (vulnerability absent or already exploited). Ordered the same way the
// dense action indexers order them.
std::vector<AttackerAction> valid_attacker_actions(const DynamicAccessGraph& graph,
                                                   const EpisodeState& state);
std::vector<DefenderAction> valid_defender_actions(const DynamicAccessGraph& graph,
                                                   const EpisodeState& state);

bool is_valid(const DynamicAccessGraph& graph, const EpisodeState& state,
              const AttackerAction& action);
bool is_valid(const DynamicAccessGraph& graph, const EpisodeState& state,
              const DefenderAction& action);

// Id-based rendering for traces and CLI output.
nlohmann::json action_to_json(const DynamicAccessGraph& graph, const AttackerAction& action);
nlohmann::json action_to_json(const DynamicAccessGraph& graph, const DefenderAction& action);

}  // namespace issf
