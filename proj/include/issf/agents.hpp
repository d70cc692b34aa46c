#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "issf/episode.hpp"

namespace issf {

enum class Algorithm : std::uint8_t { Random = 0, QLearning = 1, PolicyGradient = 2 };

std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view s);

struct LearnerConfig {
  Algorithm algorithm = Algorithm::QLearning;
  long total_timesteps = 50000;
  int max_episode_length = 2000;
  long learning_start = 10000;  // QLearning: exploration-only prefix
  double learning_rate = 0.1;
  double discount = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;  // linear anneal over the first half of total_timesteps
  int replay_batch = 16;      // QLearning: extra replayed updates per step
  long replay_capacity = 50000;
  std::uint64_t seed = 0;

  friend bool operator==(const LearnerConfig&, const LearnerConfig&) = default;
};

nlohmann::json learner_config_to_json(const LearnerConfig& config);
LearnerConfig learner_config_from_json(const nlohmann::json& doc);

// Fixed-length feature vector plus the exact discrete posture it was derived
// from. `discrete` is the Q-table key (hashed for bucketing, compared
// byte-for-byte on lookup); `features` feed linear policies.
struct ObservationEncoding {
  std::vector<double> features;
  std::vector<std::uint8_t> discrete;
  std::uint64_t state_key = 0;
};

class ObservationEncoder {
 public:
  ObservationEncoder(Role role, const DynamicAccessGraph& graph);

  Role role() const { return role_; }
  const std::string& id() const { return id_; }
  int feature_count() const { return feature_count_; }

  ObservationEncoding encode(const AttackerObservation& obs) const;  // role must be Attacker
  ObservationEncoding encode(const DefenderObservation& obs) const;  // role must be Defender

 private:
  Role role_;
  std::string id_;
  int feature_count_ = 0;
  int node_count_ = 0;
  int credential_count_ = 0;
  int max_episode_length_ = 1;
  std::vector<int> vuln_counts_;  // per node
};

// Dense bijection between role actions and [0, action_count). Attacker
// layout: local block (target x local toolkit), remote block
// (source x target x remote toolkit), connect block
// (source x target x credential). Defender layout: scan, restores,
// remediates. Unused rectangle cells (self-loops) are simply never valid.
class ActionIndexer {
 public:
  ActionIndexer(Role role, const DynamicAccessGraph& graph);

  Role role() const { return role_; }
  const std::string& id() const { return id_; }
  int action_count() const { return action_count_; }

  int index_of(const AttackerAction& action) const;
  int index_of(const DefenderAction& action) const;
  AttackerAction attacker_action(int index) const;
  DefenderAction defender_action(int index) const;

 private:
  Role role_;
  std::string id_;
  int action_count_ = 0;
  int node_count_ = 0;
  int credential_count_ = 0;
  std::vector<int> local_toolkit_;
  std::vector<int> remote_toolkit_;
  std::vector<int> local_slot_;   // toolkit index -> position in local block, -1
  std::vector<int> remote_slot_;  // toolkit index -> position in remote block, -1
  int local_block_ = 0;
  int remote_block_ = 0;
};

// One learning step: the decision taken at `obs` among `valid`, the reward it
// returned, and the next decision point of the same agent.
struct Transition {
  ObservationEncoding obs;
  std::vector<int> valid;  // dense indices available at obs
  int action = -1;
  double reward = 0.0;
  ObservationEncoding next_obs;
  std::vector<int> next_valid;
  bool done = false;
};

// A trainable (or frozen) decision policy over dense action indices.
class ActionDecisionModel {
 public:
  virtual ~ActionDecisionModel() = default;

  Role role() const { return role_; }
  Algorithm algorithm() const { return algorithm_; }
  const LearnerConfig& config() const { return config_; }
  const std::string& graph_fingerprint() const { return graph_fingerprint_; }
  const std::string& shape_signature() const { return shape_signature_; }
  long train_steps() const { return train_steps_; }

  // Greedy picks the argmax action; otherwise the model's exploration policy
  // applies. Throws EmptyMaskError when `valid` is empty.
  virtual int select_action(const ObservationEncoding& obs, const std::vector<int>& valid,
                            Rng& rng, bool greedy) = 0;

  virtual void begin_episode() {}
  virtual void observe(const Transition& transition, Rng& rng) = 0;
  virtual void end_episode() {}

  virtual nlohmann::json params_to_json() const = 0;
  virtual void params_from_json(const nlohmann::json& params) = 0;

  // SHA-256 over the canonical parameter dump.
  std::string param_digest() const;

  void set_train_steps(long n) { train_steps_ = n; }

  // Rebuilds a model shell from stored identity; parameters are loaded
  // separately via params_from_json.
  static std::unique_ptr<ActionDecisionModel> restore(Role role, const LearnerConfig& config,
                                                      std::string graph_fingerprint,
                                                      std::string shape_signature);

 protected:
  ActionDecisionModel(Role role, Algorithm algorithm, LearnerConfig config,
                      const DynamicAccessGraph& graph);
  ActionDecisionModel(Role role, Algorithm algorithm, LearnerConfig config,
                      std::string graph_fingerprint, std::string shape_signature);

  LearnerConfig config_;
  long train_steps_ = 0;

 private:
  Role role_;
  Algorithm algorithm_;
  std::string graph_fingerprint_;
  std::string shape_signature_;
};

class RandomPolicyModel : public ActionDecisionModel {
 public:
  RandomPolicyModel(Role role, LearnerConfig config, const DynamicAccessGraph& graph);
  RandomPolicyModel(Role role, LearnerConfig config, std::string fingerprint, std::string signature);

  int select_action(const ObservationEncoding&, const std::vector<int>& valid, Rng& rng,
                    bool greedy) override;
  void observe(const Transition&, Rng&) override {}
  nlohmann::json params_to_json() const override;
  void params_from_json(const nlohmann::json&) override {}
};

class QTableModel : public ActionDecisionModel {
 public:
  QTableModel(Role role, LearnerConfig config, const DynamicAccessGraph& graph);
  QTableModel(Role role, LearnerConfig config, std::string fingerprint, std::string signature);

  int select_action(const ObservationEncoding& obs, const std::vector<int>& valid, Rng& rng,
                    bool greedy) override;
  void observe(const Transition& transition, Rng& rng) override;
  nlohmann::json params_to_json() const override;
  void params_from_json(const nlohmann::json& params) override;

  double q_value(const std::vector<std::uint8_t>& key, int action) const;
  std::size_t table_size() const { return table_.size(); }
  double epsilon() const;  // current annealed exploration rate

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint8_t>& k) const;
  };
  using Row = std::map<int, double>;

  void td_update(const Transition& t);
  double best_value(const std::vector<std::uint8_t>& key, const std::vector<int>& valid) const;

  std::unordered_map<std::vector<std::uint8_t>, Row, KeyHash> table_;
  std::deque<Transition> replay_;
};

class SoftmaxPolicyModel : public ActionDecisionModel {
 public:
  SoftmaxPolicyModel(Role role, LearnerConfig config, const DynamicAccessGraph& graph);
  SoftmaxPolicyModel(Role role, LearnerConfig config, std::string fingerprint, std::string signature);

  int select_action(const ObservationEncoding& obs, const std::vector<int>& valid, Rng& rng,
                    bool greedy) override;
  void begin_episode() override;
  void observe(const Transition& transition, Rng& rng) override;
  void end_episode() override;
  nlohmann::json params_to_json() const override;
  void params_from_json(const nlohmann::json& params) override;

  // Policy probabilities restricted to `valid`, aligned with it.
  std::vector<double> probabilities(const ObservationEncoding& obs,
                                    const std::vector<int>& valid) const;
  double theta(int action, int feature) const;
  void add_theta(int action, int feature, double delta);

 private:
  void reinforce_update();

  int feature_count_ = 0;
  int action_count_ = 0;
  std::vector<double> theta_;  // action-major
  std::vector<Transition> episode_;
  // Welford running stats over discounted returns, for advantage scaling.
  double baseline_ = 0.0;
  double baseline_m2_ = 0.0;
  long baseline_updates_ = 0;
};

std::unique_ptr<ActionDecisionModel> make_model(Role role, const LearnerConfig& config,
                                                const DynamicAccessGraph& graph);

// Self-describing blob: role, algorithm, shape, hyperparameters, parameters.
nlohmann::json serialize_model(const ActionDecisionModel& model);
std::unique_ptr<ActionDecisionModel> deserialize_model(const nlohmann::json& blob);

// Both checks throw (ShapeMismatchError / RoleMismatchError) on violation. A
// model fits a graph when the exact content hash matches or, failing that,
// the shape signature does.
void check_model_fits(const ActionDecisionModel& model, const DynamicAccessGraph& graph);
void check_model_role(const ActionDecisionModel& model, Role expected);

// Frozen agents bridging a model into the episode engine.
class ModelAttackerAgent : public AttackerAgent {
 public:
  ModelAttackerAgent(std::shared_ptr<ActionDecisionModel> model, const DynamicAccessGraph& graph,
                     bool greedy = true);
  std::optional<AttackerAction> act(const DynamicAccessGraph& graph,
                                    const AttackerObservation& obs,
                                    const std::vector<AttackerAction>& valid, Rng& rng) override;

 private:
  std::shared_ptr<ActionDecisionModel> model_;
  ObservationEncoder encoder_;
  ActionIndexer indexer_;
  bool greedy_;
};

class ModelDefenderAgent : public DefenderAgent {
 public:
  ModelDefenderAgent(std::shared_ptr<ActionDecisionModel> model, const DynamicAccessGraph& graph,
                     bool greedy = true);
  std::optional<DefenderAction> act(const DynamicAccessGraph& graph,
                                    const DefenderObservation& obs,
                                    const std::vector<DefenderAction>& valid, Rng& rng) override;

 private:
  std::shared_ptr<ActionDecisionModel> model_;
  ObservationEncoder encoder_;
  ActionIndexer indexer_;
  bool greedy_;
};

}  // namespace issf
