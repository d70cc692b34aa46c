#include "issf/episode.hpp"

#include "issf/errors.hpp"

namespace issf {

std::string_view to_string(Role r) { return r == Role::Attacker ? "attacker" : "defender"; }

Role role_from_string(std::string_view s) {
  if (s == "attacker") return Role::Attacker;
  if (s == "defender") return Role::Defender;
  throw ParseError("unknown role '" + std::string(s) + "'");
}

Role opposite(Role r) { return r == Role::Attacker ? Role::Defender : Role::Attacker; }

std::string_view to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::AttackerWin: return "attacker_win";
    case OutcomeKind::StepLimit: return "step_limit";
    case OutcomeKind::Aborted: return "aborted";
  }
  return "?";
}

std::optional<AttackerAction> RandomAttackerAgent::act(const DynamicAccessGraph&,
                                                       const AttackerObservation&,
                                                       const std::vector<AttackerAction>& valid,
                                                       Rng& rng) {
  if (valid.empty()) return std::nullopt;
  return valid[rng.next_index(valid.size())];
}

std::optional<DefenderAction> RandomDefenderAgent::act(const DynamicAccessGraph&,
                                                       const DefenderObservation&,
                                                       const std::vector<DefenderAction>& valid,
                                                       Rng& rng) {
  if (valid.empty()) return std::nullopt;
  return valid[rng.next_index(valid.size())];
}

namespace {

StepRecord attacker_turn(const DynamicAccessGraph& g, EpisodeState& s, AttackerAgent& agent) {
  StepRecord rec;
  rec.step = s.step;
  rec.role = Role::Attacker;
  auto obs = attacker_observation(g, s);
  auto valid = valid_attacker_actions(g, s);
  auto choice = agent.act(g, obs, valid, s.rng);
  if (choice) {
    rec.acted = true;
    rec.action = *choice;
    rec.reward = apply_attacker(g, s, *choice);
  }
  rec.discovered = s.discovered_count();
  rec.owned = s.owned_count();
  rec.suspicious = s.suspicious_count();
  rec.rng_draws = s.rng.draw_count();
  return rec;
}

StepRecord defender_turn(const DynamicAccessGraph& g, EpisodeState& s, DefenderAgent& agent) {
  StepRecord rec;
  rec.step = s.step;
  rec.role = Role::Defender;
  auto obs = defender_observation(g, s);
  auto valid = valid_defender_actions(g, s);
  auto choice = agent.act(g, obs, valid, s.rng);
  if (choice) {
    rec.acted = true;
    rec.action = *choice;
    rec.reward = apply_defender(g, s, *choice);
  }
  rec.discovered = s.discovered_count();
  rec.owned = s.owned_count();
  rec.suspicious = s.suspicious_count();
  rec.rng_draws = s.rng.draw_count();
  return rec;
}

}  // namespace

RoundResult step(const DynamicAccessGraph& g, EpisodeState& s, AttackerAgent& attacker,
                 DefenderAgent& defender, const EpisodeOptions& options) {
  RoundResult result;
  if (options.defender_first) {
    result.first = defender_turn(g, s, defender);
    result.second = attacker_turn(g, s, attacker);
  } else {
    result.first = attacker_turn(g, s, attacker);
    result.second = defender_turn(g, s, defender);
  }
  s.tick_reimages();
  s.step += 1;

  int cap = options.max_length.value_or(g.config().max_episode_length);
  if (s.all_goals_owned()) {
    result.outcome = TerminationOutcome{OutcomeKind::AttackerWin, "all goal nodes owned"};
  } else if (s.step >= cap) {
    result.outcome = TerminationOutcome{OutcomeKind::StepLimit, "episode length cap reached"};
  }
  return result;
}

EpisodeTrace run_episode(const DynamicAccessGraph& g, AttackerAgent& attacker,
                         DefenderAgent& defender, std::uint64_t seed,
                         const EpisodeOptions& options) {
  EpisodeTrace trace;
  trace.scenario_id = g.scenario_id();
  trace.scenario_hash = g.content_hash();
  trace.seed = seed;
  trace.defender_first = options.defender_first;

  EpisodeState state(g, seed);
  attacker.on_episode_start();
  defender.on_episode_start();

  try {
    while (true) {
      RoundResult round = step(g, state, attacker, defender, options);
      trace.records.push_back(round.first);
      trace.records.push_back(round.second);
      if (round.outcome) {
        trace.outcome = *round.outcome;
        break;
      }
    }
  } catch (const Error& e) {
    trace.outcome = TerminationOutcome{OutcomeKind::Aborted, e.what()};
  }

  trace.length = state.step;
  trace.tally = state.tally;
  trace.end_discovered = state.discovered_count();
  trace.end_owned = state.owned_count();
  trace.end_suspicious = state.suspicious_count();
  for (const auto& rec : trace.records) {
    if (rec.role == Role::Attacker)
      trace.attacker_total += rec.reward.reward;
    else
      trace.defender_total += rec.reward.reward;
  }
  return trace;
}

void write_trace_jsonl(const DynamicAccessGraph& g, const EpisodeTrace& trace,
                       std::ostream& out) {
  nlohmann::json header{{"scenario", trace.scenario_id},
                        {"scenario_hash", trace.scenario_hash},
                        {"seed", trace.seed},
                        {"defender_first", trace.defender_first},
                        {"length", trace.length},
                        {"outcome", to_string(trace.outcome.kind)},
                        {"outcome_reason", trace.outcome.reason},
                        {"attacker_total", trace.attacker_total},
                        {"defender_total", trace.defender_total}};
  out << header.dump() << '\n';
  for (const auto& rec : trace.records) {
    nlohmann::json line{{"step", rec.step},
                        {"role", to_string(rec.role)},
                        {"acted", rec.acted},
                        {"gain", rec.reward.gain},
                        {"cost", rec.reward.cost},
                        {"reward", rec.reward.reward},
                        {"success", rec.reward.success},
                        {"detail", to_string(rec.reward.detail)},
                        {"discovered", rec.discovered},
                        {"owned", rec.owned},
                        {"suspicious", rec.suspicious},
                        {"rng_draws", rec.rng_draws}};
    if (const auto* a = std::get_if<AttackerAction>(&rec.action))
      line["action"] = action_to_json(g, *a);
    else if (const auto* d = std::get_if<DefenderAction>(&rec.action))
      line["action"] = action_to_json(g, *d);
    else
      line["action"] = nullptr;
    out << line.dump() << '\n';
  }
}

}  // namespace issf
