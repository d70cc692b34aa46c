#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "issf/episode.hpp"
#include "issf/graph.hpp"

namespace issf::test {

inline std::filesystem::path scenario_dir() { return ISSF_SCENARIO_DIR; }

inline DynamicAccessGraph chain_graph() {
  return load_graph(scenario_dir() / "three_service_chain.json");
}

// Two-service scenario: everything the attacker needs sits on the landing
// node, so the shortest win is reveal + leak + connect.
inline nlohmann::json pair_doc() {
  return nlohmann::json::parse(R"({
    "id": "pair",
    "config": {"max_episode_length": 50},
    "nodes": [
      {"id": "entry", "asset_value": 5, "landing": true, "vulnerabilities": [
        {"id": "v_reveal", "vector": "local", "impact": 2.7, "exploitability": 2.0,
         "outcome": {"reveal_nodes": ["db"]}},
        {"id": "v_leak", "vector": "local", "impact": 3.6, "exploitability": 1.8,
         "outcome": {"leak_credential": "cred_db"}}
      ]},
      {"id": "db", "asset_value": 100, "goal": true, "required_credential": "cred_db",
       "vulnerabilities": [
        {"id": "v_reveal", "vector": "local", "impact": 2.7, "exploitability": 2.0,
         "outcome": {"reveal_nodes": ["entry"]}}
      ]}
    ],
    "credentials": [{"id": "cred_db", "target": "db"}]
  })");
}

inline DynamicAccessGraph pair_graph() { return DynamicAccessGraph::from_json(pair_doc()); }

// Replays a fixed action list, then declines. Actions are emitted whether or
// not they are valid, which makes penalty paths easy to exercise.
class ScriptedAttacker : public AttackerAgent {
 public:
  explicit ScriptedAttacker(std::vector<AttackerAction> script) : script_(std::move(script)) {}

  void on_episode_start() override { cursor_ = 0; }

  std::optional<AttackerAction> act(const DynamicAccessGraph&, const AttackerObservation&,
                                    const std::vector<AttackerAction>&, Rng&) override {
    if (cursor_ >= script_.size()) return std::nullopt;
    return script_[cursor_++];
  }

 private:
  std::vector<AttackerAction> script_;
  std::size_t cursor_ = 0;
};

class ScriptedDefender : public DefenderAgent {
 public:
  explicit ScriptedDefender(std::vector<DefenderAction> script) : script_(std::move(script)) {}

  void on_episode_start() override { cursor_ = 0; }

  std::optional<DefenderAction> act(const DynamicAccessGraph&, const DefenderObservation&,
                                    const std::vector<DefenderAction>&, Rng&) override {
    if (cursor_ >= script_.size()) return std::nullopt;
    return script_[cursor_++];
  }

 private:
  std::vector<DefenderAction> script_;
  std::size_t cursor_ = 0;
};

// The optimal campaign against a passive defender on three_service_chain,
// 17 actions long, total attacker reward 330.7.
std::vector<AttackerAction> optimal_chain_script(const DynamicAccessGraph& g);

constexpr int kOptimalChainLength = 17;
constexpr double kOptimalChainReward = 330.7;

}  // namespace issf::test
