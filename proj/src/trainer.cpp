#include "issf/trainer.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "issf/errors.hpp"
#include "issf/rng.hpp"

namespace issf {

namespace {

struct Decision {
  ObservationEncoding enc;
  std::vector<int> valid;
  int action = -1;
};

// Trainee wrappers: select with the model's exploration policy and expose the
// decision, so the training loop can assemble transitions round by round.
class LearningAttacker : public AttackerAgent {
 public:
  LearningAttacker(ActionDecisionModel& model, const DynamicAccessGraph& graph)
      : model_(model), encoder_(Role::Attacker, graph), indexer_(Role::Attacker, graph) {}

  std::optional<AttackerAction> act(const DynamicAccessGraph&, const AttackerObservation& obs,
                                    const std::vector<AttackerAction>& valid, Rng& rng) override {
    last_decision.reset();
    if (valid.empty()) return std::nullopt;
    Decision d;
    d.enc = encoder_.encode(obs);
    d.valid.reserve(valid.size());
    for (const auto& a : valid) d.valid.push_back(indexer_.index_of(a));
    d.action = model_.select_action(d.enc, d.valid, rng, /*greedy=*/false);
    last_decision = d;
    return indexer_.attacker_action(d.action);
  }

  std::optional<Decision> last_decision;

 private:
  ActionDecisionModel& model_;
  ObservationEncoder encoder_;
  ActionIndexer indexer_;
};

class LearningDefender : public DefenderAgent {
 public:
  LearningDefender(ActionDecisionModel& model, const DynamicAccessGraph& graph)
      : model_(model), encoder_(Role::Defender, graph), indexer_(Role::Defender, graph) {}

  std::optional<DefenderAction> act(const DynamicAccessGraph&, const DefenderObservation& obs,
                                    const std::vector<DefenderAction>& valid, Rng& rng) override {
    last_decision.reset();
    if (valid.empty()) return std::nullopt;
    Decision d;
    d.enc = encoder_.encode(obs);
    d.valid.reserve(valid.size());
    for (const auto& a : valid) d.valid.push_back(indexer_.index_of(a));
    d.action = model_.select_action(d.enc, d.valid, rng, /*greedy=*/false);
    last_decision = d;
    return indexer_.defender_action(d.action);
  }

  std::optional<Decision> last_decision;

 private:
  ActionDecisionModel& model_;
  ObservationEncoder encoder_;
  ActionIndexer indexer_;
};

std::unique_ptr<ActionDecisionModel> clone_into_config(const ActionDecisionModel& pretrained,
                                                       Role role, const LearnerConfig& config,
                                                       const DynamicAccessGraph& graph) {
  if (pretrained.algorithm() != config.algorithm)
    throw ValidationError("pretrained model algorithm does not match the requested one");
  auto model = make_model(role, config, graph);
  model->params_from_json(pretrained.params_to_json());
  model->set_train_steps(pretrained.train_steps());
  return model;
}

}  // namespace

TrainResult train(const DynamicAccessGraph& graph, Role role, const LearnerConfig& config,
                  const std::vector<Adversary>& adversaries,
                  const ActionDecisionModel* pretrained) {
  bool any_real_adversary =
      std::any_of(adversaries.begin(), adversaries.end(),
                  [](const Adversary& a) { return a.model != nullptr; });
  if (role == Role::Defender && !any_real_adversary)
    throw AdversaryRequiredError("defender training requires an attacker adversary");
  for (const auto& adv : adversaries) {
    if (!adv.model) {
      if (role == Role::Defender)
        throw AdversaryRequiredError("null adversaries cannot train defenders");
      continue;
    }
    check_model_role(*adv.model, opposite(role));
    check_model_fits(*adv.model, graph);
  }

  std::unique_ptr<ActionDecisionModel> model;
  if (pretrained != nullptr) {
    check_model_role(*pretrained, role);
    check_model_fits(*pretrained, graph);
    model = clone_into_config(*pretrained, role, config, graph);
  } else {
    model = make_model(role, config, graph);
  }

  // Frozen adversary agents, one per rotation slot.
  std::vector<std::unique_ptr<AttackerAgent>> attacker_slots;
  std::vector<std::unique_ptr<DefenderAgent>> defender_slots;
  if (role == Role::Attacker) {
    if (adversaries.empty()) defender_slots.push_back(std::make_unique<NullDefenderAgent>());
    for (const auto& adv : adversaries) {
      if (adv.model)
        defender_slots.push_back(
            std::make_unique<ModelDefenderAgent>(adv.model, graph, !adv.stochastic));
      else
        defender_slots.push_back(std::make_unique<NullDefenderAgent>());
    }
  } else {
    for (const auto& adv : adversaries) {
      if (!adv.model) continue;
      attacker_slots.push_back(
          std::make_unique<ModelAttackerAgent>(adv.model, graph, !adv.stochastic));
    }
  }

  LearningAttacker learn_attacker(*model, graph);
  LearningDefender learn_defender(*model, graph);

  EpisodeOptions options;
  options.defender_first = (role == Role::Attacker);  // adversary side acts first
  options.max_length = config.max_episode_length;

  Rng update_rng(derive_seed(config.seed, ~0ULL));
  TrainingReport report;

  while (report.trainee_steps < config.total_timesteps) {
    std::uint64_t episode_seed = derive_seed(config.seed, static_cast<std::uint64_t>(report.episodes));
    EpisodeState state(graph, episode_seed);

    AttackerAgent* attacker;
    DefenderAgent* defender;
    if (role == Role::Attacker) {
      attacker = &learn_attacker;
      defender = defender_slots[report.episodes % defender_slots.size()].get();
    } else {
      attacker = attacker_slots[report.episodes % attacker_slots.size()].get();
      defender = &learn_defender;
    }
    attacker->on_episode_start();
    defender->on_episode_start();
    model->begin_episode();

    std::optional<Transition> pending;
    double episode_reward = 0.0;

    while (true) {
      RoundResult round = step(graph, state, *attacker, *defender, options);
      const StepRecord& trainee_record =
          round.first.role == role ? round.first : round.second;
      const std::optional<Decision>& decision =
          role == Role::Attacker ? learn_attacker.last_decision : learn_defender.last_decision;

      if (decision) {
        if (pending) {
          pending->next_obs = decision->enc;
          pending->next_valid = decision->valid;
          model->observe(*pending, update_rng);
        }
        Transition t;
        t.obs = decision->enc;
        t.valid = decision->valid;
        t.action = decision->action;
        t.reward = trainee_record.reward.reward;
        pending = std::move(t);
        report.trainee_steps += 1;
        episode_reward += trainee_record.reward.reward;
      }

      if (round.outcome) break;
    }

    if (pending) {
      pending->done = true;
      model->observe(*pending, update_rng);
      pending.reset();
    }
    model->end_episode();

    report.episodes += 1;
    report.episode_rewards.push_back(episode_reward);
    report.episode_lengths.push_back(state.step);
  }

  if (const auto* q = dynamic_cast<const QTableModel*>(model.get()))
    report.final_epsilon = q->epsilon();

  return {std::move(model), std::move(report)};
}

TrainingPlan training_plan_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("services") || !doc.at("services").is_array())
    throw ParseError("training plan requires a 'services' array");
  TrainingPlan plan;
  std::set<std::string> ids;
  for (const auto& item : doc.at("services")) {
    if (!item.is_object()) throw ParseError("plan entries must be objects");
    PlanEntry entry;
    entry.id = item.value("id", "");
    if (entry.id.empty()) throw ParseError("plan entry missing 'id'");
    if (!ids.insert(entry.id).second)
      throw ValidationError("plan lists service '" + entry.id + "' twice");
    entry.role = role_from_string(item.value("role", "attacker"));
    nlohmann::json config =
        item.contains("config") ? item.at("config") : nlohmann::json::object();
    if (item.contains("algorithm")) config["algorithm"] = item.at("algorithm");
    if (item.contains("seed")) config["seed"] = item.at("seed");
    entry.config = learner_config_from_json(config);
    if (item.contains("adversaries")) {
      for (const auto& adv : item.at("adversaries")) {
        std::string id = adv.get<std::string>();
        if (id != "NA") entry.adversaries.push_back(id);
      }
    } else if (item.contains("adversary")) {
      std::string id = item.at("adversary").get<std::string>();
      if (id != "NA") entry.adversaries.push_back(id);
    }
    entry.pretrain = item.value("pretrain", "NA");
    entry.stochastic_adversaries = item.value("stochastic_adversaries", false);
    plan.entries.push_back(std::move(entry));
  }
  return plan;
}

TrainingPlan load_training_plan(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open plan file '" + file.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("plan is not valid JSON: ") + e.what());
  }
  return training_plan_from_json(doc);
}

std::string train_and_publish(const DynamicAccessGraph& graph, const PlanEntry& entry,
                              ServicePool& pool) {
  std::vector<Adversary> adversaries;
  for (const auto& id : entry.adversaries) {
    Adversary adv;
    adv.id = id;
    adv.model = pool.load_model(id);
    adv.stochastic = entry.stochastic_adversaries;
    adversaries.push_back(std::move(adv));
  }
  std::unique_ptr<ActionDecisionModel> pretrained;
  if (entry.pretrain != "NA") pretrained = pool.load_model(entry.pretrain);

  TrainResult result = train(graph, entry.role, entry.config, adversaries, pretrained.get());

  ServiceManifest manifest;
  manifest.id = entry.id;
  manifest.role = entry.role;
  manifest.env = {graph.scenario_id(), graph.content_hash()};
  manifest.algorithm = std::string(to_string(entry.config.algorithm));
  if (entry.adversaries.empty()) {
    manifest.adversary = "NA";
  } else {
    std::string joined;
    for (const auto& id : entry.adversaries) {
      if (!joined.empty()) joined += ",";
      joined += id;
    }
    manifest.adversary = joined;
  }
  manifest.pretrain = entry.pretrain;
  manifest.learner_config = learner_config_to_json(entry.config);
  return pool.publish(std::move(manifest), serialize_model(*result.model));
}

std::vector<std::string> run_training_plan(const DynamicAccessGraph& graph,
                                           const TrainingPlan& plan, ServicePool& pool) {
  std::set<std::string> planned;
  for (const auto& entry : plan.entries) planned.insert(entry.id);

  auto available = [&](const std::string& id) { return pool.contains(id); };
  auto ready = [&](const PlanEntry& entry) {
    for (const auto& adv : entry.adversaries)
      if (!available(adv)) return false;
    return entry.pretrain == "NA" || available(entry.pretrain);
  };

  std::vector<const PlanEntry*> remaining;
  for (const auto& entry : plan.entries) remaining.push_back(&entry);
  std::vector<std::string> published;

  while (!remaining.empty()) {
    bool progress = false;
    for (auto it = remaining.begin(); it != remaining.end();) {
      if (ready(**it)) {
        published.push_back(train_and_publish(graph, **it, pool));
        it = remaining.erase(it);
        progress = true;
      } else {
        ++it;
      }
    }
    if (!progress) {
      for (const auto* entry : remaining) {
        auto refs = entry->adversaries;
        if (entry->pretrain != "NA") refs.push_back(entry->pretrain);
        for (const auto& ref : refs) {
          if (!available(ref) && planned.find(ref) == planned.end())
            throw PlanError("plan entry '" + entry->id + "' references unknown service '" + ref +
                            "'");
        }
      }
      throw PlanError("training plan contains a dependency cycle");
    }
  }
  return published;
}

}  // namespace issf
