#include "issf/episode_state.hpp"

#include <algorithm>

#include "issf/hashing.hpp"

namespace issf {

std::string_view to_string(SecurityState s) {
  switch (s) {
    case SecurityState::Undiscovered: return "undiscovered";
    case SecurityState::Discovered: return "discovered";
    case SecurityState::Owned: return "owned";
  }
  return "?";
}

std::string_view to_string(DefenderMark m) {
  return m == DefenderMark::Normal ? "normal" : "suspicious";
}

std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::LocalAttack: return "local_attack";
    case ActionKind::RemoteAttack: return "remote_attack";
    case ActionKind::Connect: return "connect";
    case ActionKind::Scan: return "scan";
    case ActionKind::Restore: return "restore";
    case ActionKind::Remediate: return "remediate";
  }
  return "?";
}

EpisodeState::EpisodeState(const DynamicAccessGraph& graph, std::uint64_t seed_value)
    : rng(seed_value), seed(seed_value), graph_(&graph) {
  const int n = graph.node_count();
  attacker_state.assign(n, SecurityState::Undiscovered);
  mark.assign(n, DefenderMark::Normal);
  reimage_remaining.assign(n, 0);
  reimage_set_step.assign(n, -1);
  exploited.resize(n);
  for (int i = 0; i < n; ++i)
    exploited[i].assign(graph.nodes()[i].vulnerabilities.size(), false);
  credential_held.assign(graph.credential_count(), false);
  for (int landing : graph.landing_nodes())
    attacker_state[landing] = SecurityState::Owned;
}

int EpisodeState::discovered_count() const {
  return static_cast<int>(
      std::count(attacker_state.begin(), attacker_state.end(), SecurityState::Discovered));
}

int EpisodeState::owned_count() const {
  return static_cast<int>(
      std::count(attacker_state.begin(), attacker_state.end(), SecurityState::Owned));
}

int EpisodeState::suspicious_count() const {
  return static_cast<int>(std::count(mark.begin(), mark.end(), DefenderMark::Suspicious));
}

int EpisodeState::reimaging_count() const {
  return static_cast<int>(std::count_if(reimage_remaining.begin(), reimage_remaining.end(),
                                        [](int r) { return r > 0; }));
}

int EpisodeState::credential_count() const {
  return static_cast<int>(std::count(credential_held.begin(), credential_held.end(), true));
}

int EpisodeState::exploited_count() const {
  int total = 0;
  for (const auto& row : exploited)
    total += static_cast<int>(std::count(row.begin(), row.end(), true));
  return total;
}

bool EpisodeState::all_goals_owned() const {
  for (int goal : graph_->goal_nodes())
    if (attacker_state[goal] != SecurityState::Owned) return false;
  return true;
}

std::uint64_t EpisodeState::posture_digest() const {
  Fnv64 h;
  h.update_u64(static_cast<std::uint64_t>(step));
  for (std::size_t i = 0; i < attacker_state.size(); ++i) {
    h.update_u64(static_cast<std::uint64_t>(attacker_state[i]));
    h.update_u64(static_cast<std::uint64_t>(mark[i]));
    h.update_u64(static_cast<std::uint64_t>(reimage_remaining[i]));
    h.update_u64(static_cast<std::uint64_t>(reimage_set_step[i] + 1));
    for (bool b : exploited[i]) h.update_u64(b ? 1 : 0);
  }
  for (bool b : credential_held) h.update_u64(b ? 1 : 0);
  h.update_u64(discovery_edges.size());
  for (const auto& e : discovery_edges) {
    h.update_u64(static_cast<std::uint64_t>(e.source));
    h.update_u64(static_cast<std::uint64_t>(e.target));
    h.update_u64(static_cast<std::uint64_t>(e.step));
  }
  for (const auto& row : tally.rows) {
    h.update_u64(static_cast<std::uint64_t>(row.success));
    h.update_u64(static_cast<std::uint64_t>(row.failure));
    h.update_u64(static_cast<std::uint64_t>(row.invalid));
  }
  return h.digest();
}

void EpisodeState::tick_reimages() {
  for (std::size_t i = 0; i < reimage_remaining.size(); ++i) {
    if (reimage_remaining[i] == 0) continue;
    if (reimage_set_step[i] == step) continue;  // started this round, hold one full round
    if (--reimage_remaining[i] == 0) reimage_set_step[i] = -1;
  }
}

}  // namespace issf
