#include "issf/actions.hpp"

#include <algorithm>

#include "issf/errors.hpp"

namespace issf {

namespace {

void check_node(const DynamicAccessGraph& g, int node) {
  if (node < 0 || node >= g.node_count())
    throw UnknownIdError("node index " + std::to_string(node) + " out of range");
}

void check_toolkit(const DynamicAccessGraph& g, int vuln) {
  if (vuln < 0 || vuln >= g.toolkit_count())
    throw UnknownIdError("toolkit index " + std::to_string(vuln) + " out of range");
}

void check_credential(const DynamicAccessGraph& g, int cred) {
  if (cred < 0 || cred >= g.credential_count())
    throw UnknownIdError("credential index " + std::to_string(cred) + " out of range");
}

bool connect_unlocks(const DynamicAccessGraph& g, int cred, int target) {
  const Credential& c = g.credentials()[cred];
  const NodeSpec& node = g.nodes()[target];
  return c.target_node == node.id && node.required_credential &&
         *node.required_credential == c.id;
}

// True when any currently exploited vulnerability anywhere reveals `node`.
bool still_revealed(const DynamicAccessGraph& g, const EpisodeState& s, int node) {
  const std::string& id = g.nodes()[node].id;
  for (int n = 0; n < g.node_count(); ++n) {
    const auto& vulns = g.nodes()[n].vulnerabilities;
    for (std::size_t p = 0; p < vulns.size(); ++p) {
      if (!s.exploited[n][p]) continue;
      const auto* reveal = std::get_if<RevealNodesOutcome>(&vulns[p].outcome);
      if (reveal == nullptr) continue;
      if (std::find(reveal->nodes.begin(), reveal->nodes.end(), id) != reveal->nodes.end())
        return true;
    }
  }
  return false;
}

bool touched_by_attacker(const EpisodeState& s, int node) {
  if (s.owned(node)) return true;
  const auto& row = s.exploited[node];
  return std::find(row.begin(), row.end(), true) != row.end();
}

RewardBreakdown invalid_action(const DynamicAccessGraph& g, EpisodeState& s, ActionKind kind) {
  s.tally.row(kind).invalid += 1;
  RewardBreakdown r;
  r.cost = g.config().invalid_action_cost;
  r.reward = -r.cost;
  r.detail = OutcomeDetail::Invalid;
  return r;
}

void reveal_nodes(const DynamicAccessGraph& g, EpisodeState& s, int source,
                  const RevealNodesOutcome& outcome) {
  // Outcome node lists are stored sorted, so newly discovered nodes of one
  // exploit share a step and appear in id order.
  for (const auto& id : outcome.nodes) {
    int target = g.node_index(id);
    if (s.attacker_state[target] != SecurityState::Undiscovered) continue;
    s.attacker_state[target] = SecurityState::Discovered;
    s.discovery_edges.push_back({source, target, s.step});
  }
}

RewardBreakdown run_exploit(const DynamicAccessGraph& g, EpisodeState& s, ActionKind kind,
                            int target, int vuln) {
  const ToolkitEntry& tool = g.toolkit()[vuln];
  RewardBreakdown r;
  r.vulnerability = vuln;
  r.cost = tool.exploitability;
  int pos = g.vuln_position(target, tool.id);
  if (pos < 0) {
    r.detail = OutcomeDetail::VulnNotPresent;
  } else if (s.exploited[target][pos]) {
    r.detail = OutcomeDetail::AlreadyExploited;
  } else {
    s.exploited[target][pos] = true;
    const Vulnerability& instance = g.nodes()[target].vulnerabilities[pos];
    if (const auto* reveal = std::get_if<RevealNodesOutcome>(&instance.outcome)) {
      reveal_nodes(g, s, target, *reveal);
    } else {
      const auto& leak = std::get<LeakCredentialOutcome>(instance.outcome);
      s.credential_held[g.credential_index(leak.credential)] = true;
    }
    r.gain = tool.impact;
    r.success = true;
    r.detail = OutcomeDetail::Exploited;
  }
  r.reward = r.gain - r.cost;
  auto& row = s.tally.row(kind);
  (r.success ? row.success : row.failure) += 1;
  return r;
}

}  // namespace

std::string_view to_string(OutcomeDetail d) {
  switch (d) {
    case OutcomeDetail::Exploited: return "exploited";
    case OutcomeDetail::CredentialGranted: return "credential_granted";
    case OutcomeDetail::VulnNotPresent: return "vuln_not_present";
    case OutcomeDetail::AlreadyExploited: return "already_exploited";
    case OutcomeDetail::Scanned: return "scanned";
    case OutcomeDetail::Restored: return "restored";
    case OutcomeDetail::Remediated: return "remediated";
    case OutcomeDetail::NothingToRemediate: return "nothing_to_remediate";
    case OutcomeDetail::Invalid: return "invalid";
    case OutcomeDetail::NoOp: return "no_op";
  }
  return "?";
}

ActionKind kind_of(const AttackerAction& action) {
  if (std::holds_alternative<LocalAttack>(action)) return ActionKind::LocalAttack;
  if (std::holds_alternative<RemoteAttack>(action)) return ActionKind::RemoteAttack;
  return ActionKind::Connect;
}

ActionKind kind_of(const DefenderAction& action) {
  if (std::holds_alternative<Scan>(action)) return ActionKind::Scan;
  if (std::holds_alternative<Restore>(action)) return ActionKind::Restore;
  return ActionKind::Remediate;
}

bool is_valid(const DynamicAccessGraph& g, const EpisodeState& s, const AttackerAction& action) {
  if (const auto* a = std::get_if<LocalAttack>(&action)) {
    check_node(g, a->target);
    check_toolkit(g, a->vuln);
    return s.owned(a->target) && s.running(a->target) &&
           g.toolkit()[a->vuln].vector == AttackVector::Local;
  }
  if (const auto* a = std::get_if<RemoteAttack>(&action)) {
    check_node(g, a->source);
    check_node(g, a->target);
    check_toolkit(g, a->vuln);
    return a->source != a->target && s.owned(a->source) && s.running(a->source) &&
           s.visible_to_attacker(a->target) && s.running(a->target) &&
           g.toolkit()[a->vuln].vector == AttackVector::Remote;
  }
  const auto& a = std::get<Connect>(action);
  check_node(g, a.source);
  check_node(g, a.target);
  check_credential(g, a.credential);
  return a.source != a.target && s.owned(a.source) && s.running(a.source) &&
         s.attacker_state[a.target] == SecurityState::Discovered && s.running(a.target) &&
         s.credential_held[a.credential] && connect_unlocks(g, a.credential, a.target);
}

bool is_valid(const DynamicAccessGraph& g, const EpisodeState& s, const DefenderAction& action) {
  if (std::holds_alternative<Scan>(action)) return true;
  if (const auto* a = std::get_if<Restore>(&action)) {
    check_node(g, a->target);
    return true;  // idempotent; re-imaging an already re-imaging node refreshes it
  }
  const auto& a = std::get<Remediate>(action);
  check_node(g, a.target);
  return s.running(a.target);
}

RewardBreakdown apply_attacker(const DynamicAccessGraph& g, EpisodeState& s,
                               const AttackerAction& action) {
  if (!is_valid(g, s, action)) return invalid_action(g, s, kind_of(action));

  if (const auto* a = std::get_if<LocalAttack>(&action))
    return run_exploit(g, s, ActionKind::LocalAttack, a->target, a->vuln);
  if (const auto* a = std::get_if<RemoteAttack>(&action))
    return run_exploit(g, s, ActionKind::RemoteAttack, a->target, a->vuln);

  const auto& a = std::get<Connect>(action);
  s.attacker_state[a.target] = SecurityState::Owned;
  s.tally.row(ActionKind::Connect).success += 1;
  RewardBreakdown r;
  r.gain = g.nodes()[a.target].asset_value;
  r.cost = g.config().connect_cost;
  r.reward = r.gain - r.cost;
  r.success = true;
  r.detail = OutcomeDetail::CredentialGranted;
  return r;
}

RewardBreakdown apply_defender(const DynamicAccessGraph& g, EpisodeState& s,
                               const DefenderAction& action) {
  if (!is_valid(g, s, action)) return invalid_action(g, s, kind_of(action));
  const EnvironmentConfig& cfg = g.config();

  if (std::holds_alternative<Scan>(action)) {
    RewardBreakdown r;
    // One draw per node in index order regardless of posture, so the rng
    // stream shape does not leak attacker information.
    for (int n = 0; n < g.node_count(); ++n) {
      double p = touched_by_attacker(s, n) ? cfg.scan_true_positive_rate
                                           : cfg.scan_false_positive_rate;
      bool hit = s.rng.bernoulli(p);
      if (hit && s.mark[n] == DefenderMark::Normal) {
        s.mark[n] = DefenderMark::Suspicious;
        r.new_suspicious += 1;
      }
    }
    r.gain = cfg.scan_gain_per_new_suspicious * r.new_suspicious;
    r.cost = cfg.scan_cost;
    r.reward = r.gain - r.cost;
    r.success = true;
    r.detail = OutcomeDetail::Scanned;
    s.tally.row(ActionKind::Scan).success += 1;
    return r;
  }

  if (const auto* a = std::get_if<Restore>(&action)) {
    int t = a->target;
    bool was_owned = s.owned(t);
    RewardBreakdown r;
    r.gain = was_owned ? g.nodes()[t].asset_value : 0.0;
    r.cost = cfg.restore_cost;
    r.reward = r.gain - r.cost;
    r.success = true;
    r.detail = OutcomeDetail::Restored;
    s.reimage_remaining[t] = cfg.reimage_duration_steps;
    s.reimage_set_step[t] = s.step;
    // Attackers keep the topological information they already harvested: the
    // node stays Discovered, and a landing point can never be evicted.
    if (was_owned && !g.nodes()[t].is_landing)
      s.attacker_state[t] = SecurityState::Discovered;
    std::fill(s.exploited[t].begin(), s.exploited[t].end(), false);
    s.mark[t] = DefenderMark::Normal;
    s.tally.row(ActionKind::Restore).success += 1;
    return r;
  }

  const auto& a = std::get<Remediate>(action);
  int t = a.target;
  std::vector<int> positions;
  for (std::size_t p = 0; p < s.exploited[t].size(); ++p)
    if (s.exploited[t][p]) positions.push_back(static_cast<int>(p));

  RewardBreakdown r;
  s.mark[t] = DefenderMark::Normal;
  if (positions.empty()) {
    r.cost = cfg.remediate_base_cost;
    r.reward = -r.cost;
    r.detail = OutcomeDetail::NothingToRemediate;
    s.tally.row(ActionKind::Remediate).failure += 1;
    return r;
  }

  int pos = positions[s.rng.next_index(positions.size())];
  const Vulnerability& vuln = g.nodes()[t].vulnerabilities[pos];
  s.exploited[t][pos] = false;
  if (const auto* reveal = std::get_if<RevealNodesOutcome>(&vuln.outcome)) {
    for (const auto& id : reveal->nodes) {
      int n = g.node_index(id);
      if (s.attacker_state[n] != SecurityState::Discovered) continue;
      if (g.nodes()[n].is_landing) continue;
      if (still_revealed(g, s, n)) continue;
      s.attacker_state[n] = SecurityState::Undiscovered;
      std::erase_if(s.discovery_edges,
                    [n](const DiscoveryEdge& e) { return e.target == n; });
    }
  } else {
    const auto& leak = std::get<LeakCredentialOutcome>(vuln.outcome);
    s.credential_held[g.credential_index(leak.credential)] = false;
  }
  r.vulnerability = g.toolkit_index(vuln.id);
  r.gain = vuln.impact;
  r.cost = vuln.exploitability;
  r.reward = r.gain - r.cost;
  r.success = true;
  r.detail = OutcomeDetail::Remediated;
  s.tally.row(ActionKind::Remediate).success += 1;
  return r;
}

std::vector<AttackerAction> valid_attacker_actions(const DynamicAccessGraph& g,
                                                   const EpisodeState& s) {
  std::vector<AttackerAction> out;
  for (int t = 0; t < g.node_count(); ++t) {
    if (!s.owned(t) || !s.running(t)) continue;
    for (int v : g.local_toolkit()) out.push_back(LocalAttack{t, v});
  }
  for (int src = 0; src < g.node_count(); ++src) {
    if (!s.owned(src) || !s.running(src)) continue;
    for (int t = 0; t < g.node_count(); ++t) {
      if (t == src || !s.visible_to_attacker(t) || !s.running(t)) continue;
      for (int v : g.remote_toolkit()) out.push_back(RemoteAttack{src, t, v});
    }
  }
  for (int src = 0; src < g.node_count(); ++src) {
    if (!s.owned(src) || !s.running(src)) continue;
    for (int t = 0; t < g.node_count(); ++t) {
      if (t == src || s.attacker_state[t] != SecurityState::Discovered || !s.running(t)) continue;
      for (int c = 0; c < g.credential_count(); ++c) {
        if (s.credential_held[c] && connect_unlocks(g, c, t))
          out.push_back(Connect{src, t, c});
      }
    }
  }
  return out;
}

std::vector<DefenderAction> valid_defender_actions(const DynamicAccessGraph& g,
                                                   const EpisodeState& s) {
  std::vector<DefenderAction> out;
  out.push_back(Scan{});
  for (int t = 0; t < g.node_count(); ++t) out.push_back(Restore{t});
  for (int t = 0; t < g.node_count(); ++t)
    if (s.running(t)) out.push_back(Remediate{t});
  return out;
}

nlohmann::json action_to_json(const DynamicAccessGraph& g, const AttackerAction& action) {
  if (const auto* a = std::get_if<LocalAttack>(&action))
    return {{"kind", "local_attack"},
            {"target", g.nodes()[a->target].id},
            {"vulnerability", g.toolkit()[a->vuln].id}};
  if (const auto* a = std::get_if<RemoteAttack>(&action))
    return {{"kind", "remote_attack"},
            {"source", g.nodes()[a->source].id},
            {"target", g.nodes()[a->target].id},
            {"vulnerability", g.toolkit()[a->vuln].id}};
  const auto& a = std::get<Connect>(action);
  return {{"kind", "connect"},
          {"source", g.nodes()[a.source].id},
          {"target", g.nodes()[a.target].id},
          {"credential", g.credentials()[a.credential].id}};
}

nlohmann::json action_to_json(const DynamicAccessGraph& g, const DefenderAction& action) {
  if (std::holds_alternative<Scan>(action)) return {{"kind", "scan"}};
  if (const auto* a = std::get_if<Restore>(&action))
    return {{"kind", "restore"}, {"target", g.nodes()[a->target].id}};
  const auto& a = std::get<Remediate>(action);
  return {{"kind", "remediate"}, {"target", g.nodes()[a.target].id}};
}

}  // namespace issf
