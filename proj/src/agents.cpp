#include "issf/agents.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "issf/errors.hpp"
#include "issf/hashing.hpp"

namespace issf {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Random: return "random";
    case Algorithm::QLearning: return "qlearning";
    case Algorithm::PolicyGradient: return "policy_gradient";
  }
  return "?";
}

Algorithm algorithm_from_string(std::string_view s) {
  if (s == "random") return Algorithm::Random;
  if (s == "qlearning") return Algorithm::QLearning;
  if (s == "policy_gradient") return Algorithm::PolicyGradient;
  throw ParseError("unknown algorithm '" + std::string(s) + "'");
}

nlohmann::json learner_config_to_json(const LearnerConfig& c) {
  return {{"algorithm", to_string(c.algorithm)},
          {"total_timesteps", c.total_timesteps},
          {"max_episode_length", c.max_episode_length},
          {"learning_start", c.learning_start},
          {"learning_rate", c.learning_rate},
          {"discount", c.discount},
          {"epsilon_start", c.epsilon_start},
          {"epsilon_end", c.epsilon_end},
          {"replay_batch", c.replay_batch},
          {"replay_capacity", c.replay_capacity},
          {"seed", c.seed}};
}

LearnerConfig learner_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("learner config must be an object");
  LearnerConfig c;
  if (doc.contains("algorithm")) c.algorithm = algorithm_from_string(doc.at("algorithm").get<std::string>());
  c.total_timesteps = doc.value("total_timesteps", c.total_timesteps);
  c.max_episode_length = doc.value("max_episode_length", c.max_episode_length);
  c.learning_start = doc.value("learning_start", c.learning_start);
  c.learning_rate = doc.value("learning_rate", c.learning_rate);
  c.discount = doc.value("discount", c.discount);
  c.epsilon_start = doc.value("epsilon_start", c.epsilon_start);
  c.epsilon_end = doc.value("epsilon_end", c.epsilon_end);
  c.replay_batch = doc.value("replay_batch", c.replay_batch);
  c.replay_capacity = doc.value("replay_capacity", c.replay_capacity);
  c.seed = doc.value("seed", c.seed);
  if (c.total_timesteps < 0 || c.learning_start < 0)
    throw ValidationError("timestep budgets must be non-negative");
  if (c.max_episode_length < 1) throw ValidationError("max_episode_length must be >= 1");
  if (c.discount < 0 || c.discount > 1) throw ValidationError("discount must lie in [0, 1]");
  if (c.replay_batch < 0 || c.replay_capacity < 1) throw ValidationError("bad replay settings");
  return c;
}

// ---------------------------------------------------------------------------
// Encoders

ObservationEncoder::ObservationEncoder(Role role, const DynamicAccessGraph& graph)
    : role_(role),
      id_(role == Role::Attacker ? "atk-onehot-v1" : "def-posture-v1"),
      node_count_(graph.node_count()),
      credential_count_(graph.credential_count()),
      max_episode_length_(graph.config().max_episode_length) {
  for (const auto& node : graph.nodes())
    vuln_counts_.push_back(static_cast<int>(node.vulnerabilities.size()));
  feature_count_ = role == Role::Attacker ? 3 * node_count_ + 3 : 4 * node_count_ + 3;
}

ObservationEncoding ObservationEncoder::encode(const AttackerObservation& obs) const {
  if (role_ != Role::Attacker) throw RoleMismatchError("attacker observation on defender encoder");
  ObservationEncoding enc;
  enc.features.assign(feature_count_, 0.0);

  std::vector<std::uint8_t> state(node_count_, 0);
  for (std::size_t i = 0; i < obs.nodes.size(); ++i)
    state[obs.nodes[i]] = static_cast<std::uint8_t>(obs.states[i]);
  for (int n = 0; n < node_count_; ++n) enc.features[3 * n + state[n]] = 1.0;

  int total_vulns = 0;
  for (int c : vuln_counts_) total_vulns += c;
  std::vector<std::uint8_t> flags(total_vulns, 0);
  std::vector<int> offset(node_count_, 0);
  for (int n = 1; n < node_count_; ++n) offset[n] = offset[n - 1] + vuln_counts_[n - 1];
  for (const auto& [node, pos] : obs.exploited) flags[offset[node] + pos] = 1;

  std::vector<std::uint8_t> creds(credential_count_, 0);
  for (int c : obs.credentials) creds[c] = 1;

  double step_fraction = std::min(1.0, static_cast<double>(obs.step) / max_episode_length_);
  enc.features[3 * node_count_] = step_fraction;
  enc.features[3 * node_count_ + 1] =
      credential_count_ == 0 ? 0.0 : static_cast<double>(obs.credentials.size()) / credential_count_;
  enc.features[3 * node_count_ + 2] =
      total_vulns == 0 ? 0.0 : static_cast<double>(obs.exploited.size()) / total_vulns;

  enc.discrete = state;
  enc.discrete.insert(enc.discrete.end(), creds.begin(), creds.end());
  enc.discrete.insert(enc.discrete.end(), flags.begin(), flags.end());
  enc.state_key = fnv1a64(enc.discrete.data(), enc.discrete.size());
  return enc;
}

ObservationEncoding ObservationEncoder::encode(const DefenderObservation& obs) const {
  if (role_ != Role::Defender) throw RoleMismatchError("defender observation on attacker encoder");
  ObservationEncoding enc;
  enc.features.assign(feature_count_, 0.0);

  int suspicious = 0;
  int reimaging = 0;
  enc.discrete.resize(node_count_);
  for (int n = 0; n < node_count_; ++n) {
    bool sus = obs.marks[n] == DefenderMark::Suspicious;
    bool down = obs.reimage_remaining[n] > 0;
    suspicious += sus ? 1 : 0;
    reimaging += down ? 1 : 0;
    int combo = (sus ? 2 : 0) + (down ? 1 : 0);
    enc.features[4 * n + combo] = 1.0;
    enc.discrete[n] = static_cast<std::uint8_t>((sus ? 0x10 : 0) |
                                                std::min(obs.reimage_remaining[n], 15));
  }
  double step_fraction = std::min(1.0, static_cast<double>(obs.step) / max_episode_length_);
  enc.features[4 * node_count_] = step_fraction;
  enc.features[4 * node_count_ + 1] = static_cast<double>(suspicious) / node_count_;
  enc.features[4 * node_count_ + 2] = static_cast<double>(reimaging) / node_count_;
  enc.state_key = fnv1a64(enc.discrete.data(), enc.discrete.size());
  return enc;
}

// ---------------------------------------------------------------------------
// Action indexer

ActionIndexer::ActionIndexer(Role role, const DynamicAccessGraph& graph)
    : role_(role),
      id_(role == Role::Attacker ? "atk-dense-v1" : "def-dense-v1"),
      node_count_(graph.node_count()),
      credential_count_(graph.credential_count()),
      local_toolkit_(graph.local_toolkit()),
      remote_toolkit_(graph.remote_toolkit()) {
  local_slot_.assign(graph.toolkit_count(), -1);
  remote_slot_.assign(graph.toolkit_count(), -1);
  for (std::size_t i = 0; i < local_toolkit_.size(); ++i) local_slot_[local_toolkit_[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < remote_toolkit_.size(); ++i) remote_slot_[remote_toolkit_[i]] = static_cast<int>(i);
  const int n = node_count_;
  local_block_ = n * static_cast<int>(local_toolkit_.size());
  remote_block_ = n * n * static_cast<int>(remote_toolkit_.size());
  if (role == Role::Attacker) {
    action_count_ = local_block_ + remote_block_ + n * n * credential_count_;
  } else {
    action_count_ = 1 + 2 * n;
  }
}

int ActionIndexer::index_of(const AttackerAction& action) const {
  if (role_ != Role::Attacker) throw RoleMismatchError("attacker action on defender indexer");
  const int n = node_count_;
  if (const auto* a = std::get_if<LocalAttack>(&action)) {
    int slot = local_slot_.at(a->vuln);
    if (slot < 0) throw UnknownIdError("vulnerability is not local");
    return a->target * static_cast<int>(local_toolkit_.size()) + slot;
  }
  if (const auto* a = std::get_if<RemoteAttack>(&action)) {
    int slot = remote_slot_.at(a->vuln);
    if (slot < 0) throw UnknownIdError("vulnerability is not remote");
    int r = static_cast<int>(remote_toolkit_.size());
    return local_block_ + (a->source * n + a->target) * r + slot;
  }
  const auto& a = std::get<Connect>(action);
  return local_block_ + remote_block_ + (a.source * n + a.target) * credential_count_ + a.credential;
}

int ActionIndexer::index_of(const DefenderAction& action) const {
  if (role_ != Role::Defender) throw RoleMismatchError("defender action on attacker indexer");
  if (std::holds_alternative<Scan>(action)) return 0;
  if (const auto* a = std::get_if<Restore>(&action)) return 1 + a->target;
  return 1 + node_count_ + std::get<Remediate>(action).target;
}

AttackerAction ActionIndexer::attacker_action(int index) const {
  if (role_ != Role::Attacker) throw RoleMismatchError("attacker decode on defender indexer");
  if (index < 0 || index >= action_count_) throw UnknownIdError("action index out of range");
  const int n = node_count_;
  if (index < local_block_) {
    int l = static_cast<int>(local_toolkit_.size());
    return LocalAttack{index / l, local_toolkit_[index % l]};
  }
  index -= local_block_;
  if (index < remote_block_) {
    int r = static_cast<int>(remote_toolkit_.size());
    int pair = index / r;
    return RemoteAttack{pair / n, pair % n, remote_toolkit_[index % r]};
  }
  index -= remote_block_;
  int pair = index / credential_count_;
  return Connect{pair / n, pair % n, index % credential_count_};
}

DefenderAction ActionIndexer::defender_action(int index) const {
  if (role_ != Role::Defender) throw RoleMismatchError("defender decode on attacker indexer");
  if (index < 0 || index >= action_count_) throw UnknownIdError("action index out of range");
  if (index == 0) return Scan{};
  if (index <= node_count_) return Restore{index - 1};
  return Remediate{index - 1 - node_count_};
}

// ---------------------------------------------------------------------------
// Models

ActionDecisionModel::ActionDecisionModel(Role role, Algorithm algorithm, LearnerConfig config,
                                         const DynamicAccessGraph& graph)
    : config_(config),
      role_(role),
      algorithm_(algorithm),
      graph_fingerprint_(graph.content_hash()),
      shape_signature_(graph.shape_signature()) {}

ActionDecisionModel::ActionDecisionModel(Role role, Algorithm algorithm, LearnerConfig config,
                                         std::string graph_fingerprint,
                                         std::string shape_signature)
    : config_(config),
      role_(role),
      algorithm_(algorithm),
      graph_fingerprint_(std::move(graph_fingerprint)),
      shape_signature_(std::move(shape_signature)) {}

std::unique_ptr<ActionDecisionModel> ActionDecisionModel::restore(Role role,
                                                                  const LearnerConfig& config,
                                                                  std::string fingerprint,
                                                                  std::string signature) {
  switch (config.algorithm) {
    case Algorithm::Random:
      return std::make_unique<RandomPolicyModel>(role, config, std::move(fingerprint),
                                                 std::move(signature));
    case Algorithm::QLearning:
      return std::make_unique<QTableModel>(role, config, std::move(fingerprint),
                                           std::move(signature));
    case Algorithm::PolicyGradient:
      return std::make_unique<SoftmaxPolicyModel>(role, config, std::move(fingerprint),
                                                  std::move(signature));
  }
  throw Error("unreachable");
}

std::string ActionDecisionModel::param_digest() const {
  return sha256_hex(params_to_json().dump());
}

namespace {

int argmax_valid(const std::vector<int>& valid, const std::function<double(int)>& value) {
  int best = valid.front();
  double best_v = value(best);
  for (std::size_t i = 1; i < valid.size(); ++i) {
    double v = value(valid[i]);
    if (v > best_v) {
      best_v = v;
      best = valid[i];
    }
  }
  return best;
}

}  // namespace

RandomPolicyModel::RandomPolicyModel(Role role, LearnerConfig config,
                                     const DynamicAccessGraph& graph)
    : ActionDecisionModel(role, Algorithm::Random, config, graph) {}

RandomPolicyModel::RandomPolicyModel(Role role, LearnerConfig config, std::string fingerprint,
                                     std::string signature)
    : ActionDecisionModel(role, Algorithm::Random, config, std::move(fingerprint),
                          std::move(signature)) {}

int RandomPolicyModel::select_action(const ObservationEncoding&, const std::vector<int>& valid,
                                     Rng& rng, bool) {
  if (valid.empty()) throw EmptyMaskError("no valid action");
  return valid[rng.next_index(valid.size())];
}

nlohmann::json RandomPolicyModel::params_to_json() const { return nlohmann::json::object(); }

// --- Q-learning ---

QTableModel::QTableModel(Role role, LearnerConfig config, const DynamicAccessGraph& graph)
    : ActionDecisionModel(role, Algorithm::QLearning, config, graph) {}

QTableModel::QTableModel(Role role, LearnerConfig config, std::string fingerprint,
                         std::string signature)
    : ActionDecisionModel(role, Algorithm::QLearning, config, std::move(fingerprint),
                          std::move(signature)) {}

std::size_t QTableModel::KeyHash::operator()(const std::vector<std::uint8_t>& k) const {
  return static_cast<std::size_t>(fnv1a64(k.data(), k.size()));
}

double QTableModel::epsilon() const {
  long half = std::max<long>(1, config_.total_timesteps / 2);
  long t = std::min(train_steps_, half);
  return config_.epsilon_start +
         (config_.epsilon_end - config_.epsilon_start) * static_cast<double>(t) / half;
}

double QTableModel::q_value(const std::vector<std::uint8_t>& key, int action) const {
  auto it = table_.find(key);
  if (it == table_.end()) return 0.0;
  auto jt = it->second.find(action);
  return jt == it->second.end() ? 0.0 : jt->second;
}

double QTableModel::best_value(const std::vector<std::uint8_t>& key,
                               const std::vector<int>& valid) const {
  if (valid.empty()) return 0.0;
  double best = q_value(key, valid.front());
  for (std::size_t i = 1; i < valid.size(); ++i)
    best = std::max(best, q_value(key, valid[i]));
  return best;
}

int QTableModel::select_action(const ObservationEncoding& obs, const std::vector<int>& valid,
                               Rng& rng, bool greedy) {
  if (valid.empty()) throw EmptyMaskError("no valid action");
  if (!greedy && rng.bernoulli(epsilon())) return valid[rng.next_index(valid.size())];
  return argmax_valid(valid, [&](int a) { return q_value(obs.discrete, a); });
}

void QTableModel::td_update(const Transition& t) {
  double target = t.reward;
  if (!t.done) target += config_.discount * best_value(t.next_obs.discrete, t.next_valid);
  double& q = table_[t.obs.discrete][t.action];
  q += config_.learning_rate * (target - q);
}

void QTableModel::observe(const Transition& t, Rng& rng) {
  train_steps_ += 1;
  replay_.push_back(t);
  if (static_cast<long>(replay_.size()) > config_.replay_capacity) replay_.pop_front();
  if (train_steps_ <= config_.learning_start) return;
  td_update(t);
  for (int i = 0; i < config_.replay_batch; ++i)
    td_update(replay_[rng.next_index(replay_.size())]);
}

nlohmann::json QTableModel::params_to_json() const {
  std::map<std::vector<std::uint8_t>, const Row*> sorted;
  for (const auto& [key, row] : table_) sorted.emplace(key, &row);
  nlohmann::json entries = nlohmann::json::array();
  static const char* hex = "0123456789abcdef";
  for (const auto& [key, row] : sorted) {
    std::string k;
    k.reserve(key.size() * 2);
    for (auto b : key) {
      k.push_back(hex[b >> 4]);
      k.push_back(hex[b & 0xf]);
    }
    nlohmann::json q = nlohmann::json::array();
    for (const auto& [action, value] : *row) q.push_back({action, value});
    entries.push_back({{"key", k}, {"q", q}});
  }
  return {{"entries", entries}};
}

void QTableModel::params_from_json(const nlohmann::json& params) {
  table_.clear();
  if (!params.is_object() || !params.contains("entries"))
    throw CorruptBlobError("qlearning params missing 'entries'");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw CorruptBlobError("bad hex in q-table key");
  };
  for (const auto& entry : params.at("entries")) {
    const std::string k = entry.at("key").get<std::string>();
    if (k.size() % 2 != 0) throw CorruptBlobError("bad q-table key length");
    std::vector<std::uint8_t> key(k.size() / 2);
    for (std::size_t i = 0; i < key.size(); ++i)
      key[i] = static_cast<std::uint8_t>(nibble(k[2 * i]) << 4 | nibble(k[2 * i + 1]));
    Row row;
    for (const auto& pair : entry.at("q"))
      row[pair.at(0).get<int>()] = pair.at(1).get<double>();
    table_.emplace(std::move(key), std::move(row));
  }
}

// --- REINFORCE over a linear softmax policy ---

SoftmaxPolicyModel::SoftmaxPolicyModel(Role role, LearnerConfig config,
                                       const DynamicAccessGraph& graph)
    : ActionDecisionModel(role, Algorithm::PolicyGradient, config, graph) {
  ObservationEncoder encoder(role, graph);
  ActionIndexer indexer(role, graph);
  feature_count_ = encoder.feature_count();
  action_count_ = indexer.action_count();
  theta_.assign(static_cast<std::size_t>(feature_count_) * action_count_, 0.0);
}

SoftmaxPolicyModel::SoftmaxPolicyModel(Role role, LearnerConfig config, std::string fingerprint,
                                       std::string signature)
    : ActionDecisionModel(role, Algorithm::PolicyGradient, config, std::move(fingerprint),
                          std::move(signature)) {}

std::vector<double> SoftmaxPolicyModel::probabilities(const ObservationEncoding& obs,
                                                      const std::vector<int>& valid) const {
  std::vector<double> logits(valid.size(), 0.0);
  for (std::size_t i = 0; i < valid.size(); ++i) {
    const double* row = theta_.data() + static_cast<std::size_t>(valid[i]) * feature_count_;
    double z = 0.0;
    for (int f = 0; f < feature_count_; ++f) z += row[f] * obs.features[f];
    logits[i] = z;
  }
  double m = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (auto& l : logits) {
    l = std::exp(l - m);
    total += l;
  }
  for (auto& l : logits) l /= total;
  return logits;
}

double SoftmaxPolicyModel::theta(int action, int feature) const {
  return theta_.at(static_cast<std::size_t>(action) * feature_count_ + feature);
}

void SoftmaxPolicyModel::add_theta(int action, int feature, double delta) {
  theta_.at(static_cast<std::size_t>(action) * feature_count_ + feature) += delta;
}

int SoftmaxPolicyModel::select_action(const ObservationEncoding& obs,
                                      const std::vector<int>& valid, Rng& rng, bool greedy) {
  if (valid.empty()) throw EmptyMaskError("no valid action");
  auto probs = probabilities(obs, valid);
  if (greedy) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i)
      if (probs[i] > probs[best]) best = i;
    return valid[best];
  }
  double u = rng.next_unit();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return valid[i];
  }
  return valid.back();
}

void SoftmaxPolicyModel::begin_episode() { episode_.clear(); }

void SoftmaxPolicyModel::observe(const Transition& t, Rng&) {
  train_steps_ += 1;
  episode_.push_back(t);
  if (t.done) reinforce_update();
}

void SoftmaxPolicyModel::end_episode() {
  if (!episode_.empty()) reinforce_update();
}

void SoftmaxPolicyModel::reinforce_update() {
  // Returns are normalized by running statistics gathered across episodes;
  // the statistics used for an episode exclude that episode's own returns.
  std::vector<double> returns(episode_.size(), 0.0);
  double g = 0.0;
  for (std::size_t i = episode_.size(); i-- > 0;) {
    g = episode_[i].reward + config_.discount * g;
    returns[i] = g;
  }
  double mean = baseline_;
  double variance = baseline_updates_ > 1 ? baseline_m2_ / (baseline_updates_ - 1) : 1.0;
  double scale = std::sqrt(std::max(variance, 1e-12)) + 1e-8;

  for (std::size_t i = 0; i < episode_.size(); ++i) {
    const Transition& t = episode_[i];
    double adv = (returns[i] - mean) / scale;
    auto probs = probabilities(t.obs, t.valid);
    for (std::size_t j = 0; j < t.valid.size(); ++j) {
      double coef = (t.valid[j] == t.action ? 1.0 : 0.0) - probs[j];
      double* row = theta_.data() + static_cast<std::size_t>(t.valid[j]) * feature_count_;
      double step_size = config_.learning_rate * adv * coef;
      for (int f = 0; f < feature_count_; ++f) row[f] += step_size * t.obs.features[f];
    }
  }
  for (double G : returns) {
    baseline_updates_ += 1;
    double delta = G - baseline_;
    baseline_ += delta / baseline_updates_;
    baseline_m2_ += delta * (G - baseline_);
  }
  episode_.clear();
}

nlohmann::json SoftmaxPolicyModel::params_to_json() const {
  return {{"feature_count", feature_count_},
          {"action_count", action_count_},
          {"theta", theta_},
          {"baseline", baseline_},
          {"baseline_m2", baseline_m2_},
          {"baseline_updates", baseline_updates_}};
}

void SoftmaxPolicyModel::params_from_json(const nlohmann::json& params) {
  if (!params.is_object() || !params.contains("theta"))
    throw CorruptBlobError("policy_gradient params missing 'theta'");
  feature_count_ = params.at("feature_count").get<int>();
  action_count_ = params.at("action_count").get<int>();
  theta_ = params.at("theta").get<std::vector<double>>();
  if (theta_.size() != static_cast<std::size_t>(feature_count_) * action_count_)
    throw CorruptBlobError("theta size does not match declared shape");
  baseline_ = params.value("baseline", 0.0);
  baseline_m2_ = params.value("baseline_m2", 0.0);
  baseline_updates_ = params.value("baseline_updates", 0L);
  episode_.clear();
}

// ---------------------------------------------------------------------------
// Factory, serialization, compatibility

std::unique_ptr<ActionDecisionModel> make_model(Role role, const LearnerConfig& config,
                                                const DynamicAccessGraph& graph) {
  switch (config.algorithm) {
    case Algorithm::Random: return std::make_unique<RandomPolicyModel>(role, config, graph);
    case Algorithm::QLearning: return std::make_unique<QTableModel>(role, config, graph);
    case Algorithm::PolicyGradient:
      return std::make_unique<SoftmaxPolicyModel>(role, config, graph);
  }
  throw Error("unreachable");
}

nlohmann::json serialize_model(const ActionDecisionModel& model) {
  return {{"format", "issf-policy"},
          {"version", 1},
          {"role", to_string(model.role())},
          {"algorithm", to_string(model.algorithm())},
          {"graph_fingerprint", model.graph_fingerprint()},
          {"shape_signature", model.shape_signature()},
          {"train_steps", model.train_steps()},
          {"config", learner_config_to_json(model.config())},
          {"params", model.params_to_json()}};
}

std::unique_ptr<ActionDecisionModel> deserialize_model(const nlohmann::json& blob) {
  if (!blob.is_object() || blob.value("format", "") != "issf-policy")
    throw CorruptBlobError("not an issf-policy blob");
  if (blob.value("version", 0) != 1) throw CorruptBlobError("unsupported blob version");
  Role role = role_from_string(blob.at("role").get<std::string>());
  LearnerConfig config = learner_config_from_json(blob.at("config"));
  config.algorithm = algorithm_from_string(blob.at("algorithm").get<std::string>());
  auto model = ActionDecisionModel::restore(role, config, blob.value("graph_fingerprint", ""),
                                            blob.value("shape_signature", ""));
  model->params_from_json(blob.at("params"));
  model->set_train_steps(blob.value("train_steps", 0L));
  return model;
}

void check_model_fits(const ActionDecisionModel& model, const DynamicAccessGraph& graph) {
  if (model.graph_fingerprint() == graph.content_hash()) return;
  if (model.shape_signature() == graph.shape_signature()) return;
  throw ShapeMismatchError("model shape " + model.shape_signature() +
                           " does not fit scenario shape " + graph.shape_signature());
}

void check_model_role(const ActionDecisionModel& model, Role expected) {
  if (model.role() != expected)
    throw RoleMismatchError(std::string("expected a ") + std::string(to_string(expected)) +
                            " model, got " + std::string(to_string(model.role())));
}

// ---------------------------------------------------------------------------
// Model-backed frozen agents

ModelAttackerAgent::ModelAttackerAgent(std::shared_ptr<ActionDecisionModel> model,
                                       const DynamicAccessGraph& graph, bool greedy)
    : model_(std::move(model)),
      encoder_(Role::Attacker, graph),
      indexer_(Role::Attacker, graph),
      greedy_(greedy) {
  check_model_role(*model_, Role::Attacker);
  check_model_fits(*model_, graph);
}

std::optional<AttackerAction> ModelAttackerAgent::act(const DynamicAccessGraph&,
                                                      const AttackerObservation& obs,
                                                      const std::vector<AttackerAction>& valid,
                                                      Rng& rng) {
  if (valid.empty()) return std::nullopt;
  auto enc = encoder_.encode(obs);
  std::vector<int> indices;
  indices.reserve(valid.size());
  for (const auto& a : valid) indices.push_back(indexer_.index_of(a));
  int chosen = model_->select_action(enc, indices, rng, greedy_);
  return indexer_.attacker_action(chosen);
}

ModelDefenderAgent::ModelDefenderAgent(std::shared_ptr<ActionDecisionModel> model,
                                       const DynamicAccessGraph& graph, bool greedy)
    : model_(std::move(model)),
      encoder_(Role::Defender, graph),
      indexer_(Role::Defender, graph),
      greedy_(greedy) {
  check_model_role(*model_, Role::Defender);
  check_model_fits(*model_, graph);
}

std::optional<DefenderAction> ModelDefenderAgent::act(const DynamicAccessGraph&,
                                                      const DefenderObservation& obs,
                                                      const std::vector<DefenderAction>& valid,
                                                      Rng& rng) {
  if (valid.empty()) return std::nullopt;
  auto enc = encoder_.encode(obs);
  std::vector<int> indices;
  indices.reserve(valid.size());
  for (const auto& a : valid) indices.push_back(indexer_.index_of(a));
  int chosen = model_->select_action(enc, indices, rng, greedy_);
  return indexer_.defender_action(chosen);
}

}  // namespace issf
