#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <vector>

#include "issf/graph.hpp"
#include "issf/rng.hpp"

namespace issf {

enum class SecurityState : std::uint8_t { Undiscovered = 0, Discovered = 1, Owned = 2 };
enum class DefenderMark : std::uint8_t { Normal = 0, Suspicious = 1 };

std::string_view to_string(SecurityState s);
std::string_view to_string(DefenderMark m);

// Knowledge edge the attacker acquired at runtime: exploiting something on
// `source` revealed or unlocked `target` at `step`.
struct DiscoveryEdge {
  int source;
  int target;
  int step;

  friend bool operator==(const DiscoveryEdge&, const DiscoveryEdge&) = default;
};

enum class ActionKind : std::uint8_t {
  LocalAttack = 0,
  RemoteAttack = 1,
  Connect = 2,
  Scan = 3,
  Restore = 4,
  Remediate = 5,
};

std::string_view to_string(ActionKind k);

struct TallyRow {
  int success = 0;
  int failure = 0;
  int invalid = 0;

  friend bool operator==(const TallyRow&, const TallyRow&) = default;
};

struct ActionTally {
  std::array<TallyRow, 6> rows{};

  TallyRow& row(ActionKind k) { return rows[static_cast<std::size_t>(k)]; }
  const TallyRow& row(ActionKind k) const { return rows[static_cast<std::size_t>(k)]; }

  friend bool operator==(const ActionTally&, const ActionTally&) = default;
};

// Full mutable per-episode state. Reset = construction. The action engine is
// the only intended writer; everything is public so tests and the trace
// writer can inspect freely.
struct EpisodeState {
  EpisodeState(const DynamicAccessGraph& graph, std::uint64_t seed);

  const DynamicAccessGraph& graph() const { return *graph_; }

  int step = 0;
  std::vector<SecurityState> attacker_state;  // per node
  std::vector<DefenderMark> mark;             // per node
  std::vector<int> reimage_remaining;         // per node, 0 = running
  std::vector<int> reimage_set_step;          // step the current reimage started, -1 otherwise
  std::vector<std::vector<bool>> exploited;   // per node, per vuln position
  std::vector<bool> credential_held;          // per credential
  std::vector<DiscoveryEdge> discovery_edges;
  ActionTally tally;
  Rng rng;
  std::uint64_t seed = 0;

  bool running(int node) const { return reimage_remaining[node] == 0; }
  bool owned(int node) const { return attacker_state[node] == SecurityState::Owned; }
  bool visible_to_attacker(int node) const {
    return attacker_state[node] != SecurityState::Undiscovered;
  }

  int discovered_count() const;  // nodes in state Discovered (not Owned)
  int owned_count() const;
  int suspicious_count() const;
  int reimaging_count() const;
  int credential_count() const;
  int exploited_count() const;

  bool all_goals_owned() const;

  // Digest of the complete game posture (everything except the rng stream).
  std::uint64_t posture_digest() const;

  // Advances reimage counters at end of round. Nodes whose reimage started
  // this same round keep their counter for a full round.
  void tick_reimages();

 private:
  const DynamicAccessGraph* graph_;
};

}  // namespace issf
