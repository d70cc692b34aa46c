#include "issf/observation.hpp"

namespace issf {

AttackerObservation attacker_observation(const DynamicAccessGraph& g, const EpisodeState& s) {
  AttackerObservation obs;
  obs.step = s.step;
  for (int n = 0; n < g.node_count(); ++n) {
    if (!s.visible_to_attacker(n)) continue;
    obs.nodes.push_back(n);
    obs.states.push_back(s.attacker_state[n]);
    for (std::size_t p = 0; p < s.exploited[n].size(); ++p)
      if (s.exploited[n][p]) obs.exploited.emplace_back(n, static_cast<int>(p));
  }
  for (const auto& e : s.discovery_edges)
    if (s.visible_to_attacker(e.source) && s.visible_to_attacker(e.target))
      obs.edges.push_back(e);
  for (int c = 0; c < g.credential_count(); ++c)
    if (s.credential_held[c]) obs.credentials.push_back(c);
  return obs;
}

DefenderObservation defender_observation(const DynamicAccessGraph& g, const EpisodeState& s) {
  DefenderObservation obs;
  obs.step = s.step;
  obs.marks = s.mark;
  obs.reimage_remaining = s.reimage_remaining;
  (void)g;
  return obs;
}

}  // namespace issf
