#pragma once

#include <memory>
#include <string>
#include <vector>

#include "issf/agents.hpp"
#include "issf/graph.hpp"
#include "issf/service_pool.hpp"

namespace issf {

// A frozen opponent for the trainee. A null model is the null defender and is
// only meaningful when training attackers.
struct Adversary {
  std::shared_ptr<ActionDecisionModel> model;
  bool stochastic = false;  // greedy unless asked otherwise
  std::string id = "NA";    // pool id, for manifests
};

struct TrainingReport {
  long trainee_steps = 0;
  int episodes = 0;
  std::vector<double> episode_rewards;  // trainee's per-episode totals
  std::vector<int> episode_lengths;
  double final_epsilon = 0.0;  // QLearning only
};

struct TrainResult {
  std::unique_ptr<ActionDecisionModel> model;
  TrainingReport report;
};

// Trains one agent against frozen adversaries (rotated per episode). Episodes
// run with the adversary side acting first. Episodes always finish, so the
// realized timestep count lands in [total_timesteps,
// total_timesteps + max_episode_length). Deterministic in
// (graph, config, adversaries, pretrained).
TrainResult train(const DynamicAccessGraph& graph, Role role, const LearnerConfig& config,
                  const std::vector<Adversary>& adversaries,
                  const ActionDecisionModel* pretrained = nullptr);

struct PlanEntry {
  std::string id;
  Role role = Role::Attacker;
  LearnerConfig config;
  std::vector<std::string> adversaries;  // pool ids; empty = null defender
  std::string pretrain = "NA";
  bool stochastic_adversaries = false;
};

struct TrainingPlan {
  std::vector<PlanEntry> entries;
};

TrainingPlan training_plan_from_json(const nlohmann::json& doc);
TrainingPlan load_training_plan(const std::filesystem::path& file);

// Executes entries in dependency order (an entry may reference services
// published by earlier entries), publishing each result into the pool.
// Returns ids in execution order. Throws PlanError on unknown references or
// cycles, and pool errors pass through.
std::vector<std::string> run_training_plan(const DynamicAccessGraph& graph,
                                           const TrainingPlan& plan, ServicePool& pool);

// Trains per `entry`, resolving references through the pool, and publishes
// the result. Returns the published id.
std::string train_and_publish(const DynamicAccessGraph& graph, const PlanEntry& entry,
                              ServicePool& pool);

}  // namespace issf
