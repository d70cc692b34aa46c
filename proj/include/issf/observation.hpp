#pragma once

#include <utility>
#include <vector>

#include "issf/episode_state.hpp"
#include "issf/graph.hpp"

namespace issf {

// The attacker sees only what it has discovered. Node lists are ascending by
// node index; edges keep acquisition order; exploited pairs ascend by
// (node, position).
struct AttackerObservation {
  int step = 0;
  std::vector<int> nodes;                        // visible node indices
  std::vector<SecurityState> states;             // parallel to nodes
  std::vector<DiscoveryEdge> edges;              // both endpoints visible
  std::vector<int> credentials;                  // held credential indices
  std::vector<std::pair<int, int>> exploited;    // (node, vuln position), node visible
};

// The defender sees the whole graph posture but nothing of the attacker's
// knowledge set.
struct DefenderObservation {
  int step = 0;
  std::vector<DefenderMark> marks;       // per node
  std::vector<int> reimage_remaining;    // per node, 0 = running
};

AttackerObservation attacker_observation(const DynamicAccessGraph& graph,
                                         const EpisodeState& state);
DefenderObservation defender_observation(const DynamicAccessGraph& graph,
                                         const EpisodeState& state);

}  // namespace issf
