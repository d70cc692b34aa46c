#pragma once

// Reference round simulator used for differential testing. Deliberately
// structured unlike the engine: state is string-keyed, the scenario document
// is parsed directly, and nothing from graph.hpp/actions.hpp is reused. Both
// implementations target the same rules, so any divergence on the same action
// stream points at a bug on one side.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "issf/rng.hpp"

namespace issf::test {

struct RefResult {
  double gain = 0.0;
  double cost = 0.0;
  double reward = 0.0;
  bool success = false;
  std::string detail;
  int new_suspicious = 0;
  std::string vulnerability;  // id, empty when no vulnerability was involved
};

struct RefEdge {
  std::string source;
  std::string target;
  int step = 0;

  friend bool operator==(const RefEdge&, const RefEdge&) = default;
};

class RefSim {
 public:
  RefSim(const nlohmann::json& doc, std::uint64_t seed);

  // Actions arrive in the engine's JSON rendering ({"kind": ..., ids...}).
  RefResult attacker(const nlohmann::json& action);
  RefResult defender(const nlohmann::json& action);

  // End-of-round bookkeeping: reimage countdown (holding nodes restored this
  // round), then the step counter advances.
  void end_round();

  int step = 0;
  std::map<std::string, char> state;            // 'U' / 'D' / 'O'
  std::set<std::string> suspicious;
  std::map<std::string, int> downtime;          // remaining rounds, 0 = running
  std::map<std::string, int> downtime_started;  // step of the restore, -1 idle
  std::set<std::pair<std::string, std::string>> exploited;  // (node, vuln)
  std::set<std::string> creds;
  std::vector<RefEdge> edges;
  Rng rng;

 private:
  struct VulnDecl {
    std::string id;
    bool remote = false;
    double impact = 0.0;
    double exploitability = 0.0;
    std::vector<std::string> reveals;  // sorted, deduplicated
    std::string leaks;                 // credential id, empty for reveal vulns
  };

  struct NodeDecl {
    double asset_value = 0.0;
    std::string required_credential;
    std::vector<VulnDecl> vulns;
    bool goal = false;
    bool landing = false;
  };

  bool running(const std::string& node) const { return downtime.at(node) == 0; }
  bool owned(const std::string& node) const { return state.at(node) == 'O'; }
  bool touched(const std::string& node) const;
  bool still_revealed(const std::string& node) const;
  const VulnDecl* find_vuln(const std::string& node, const std::string& vuln) const;
  RefResult invalid() ;
  RefResult exploit(const std::string& target, const std::string& vuln);

  std::map<std::string, NodeDecl> nodes_;        // ordered by id
  std::map<std::string, std::string> cred_target_;
  std::map<std::string, VulnDecl> toolkit_;      // one decl per distinct id
  double tpr_ = 0.95, fpr_ = 0.05;
  double scan_cost_ = 0.5, scan_gain_ = 1.0;
  double connect_cost_ = 2.0, restore_cost_ = 10.0;
  double remediate_base_ = 1.0, invalid_cost_ = 1.0;
  int reimage_rounds_ = 1;
};

}  // namespace issf::test
