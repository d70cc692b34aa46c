#include "issf/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <sstream>

#include "issf/errors.hpp"
#include "issf/rng.hpp"

namespace issf {

SimulationMetrics simulate(const DynamicAccessGraph& graph, const AttackerFactory& attacker,
                           const DefenderFactory& defender, int episodes,
                           std::uint64_t base_seed, const SimulateOptions& options) {
  if (episodes < 1) throw ValidationError("episodes must be >= 1");
  if (!attacker || !defender) throw ValidationError("both agent factories are required");

  std::vector<EpisodeTrace> traces(static_cast<std::size_t>(episodes));
  int workers = std::max(1, options.parallel);
  workers = std::min(workers, episodes);

  auto run_range = [&](int begin, int end) {
    auto atk = attacker();
    auto def = defender();
    for (int i = begin; i < end; ++i)
      traces[i] = run_episode(graph, *atk, *def, derive_seed(base_seed, i), options.episode);
  };

  if (workers == 1) {
    run_range(0, episodes);
  } else {
    std::vector<std::future<void>> futures;
    int chunk = (episodes + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      int begin = w * chunk;
      int end = std::min(episodes, begin + chunk);
      if (begin >= end) break;
      futures.push_back(std::async(std::launch::async, run_range, begin, end));
    }
    for (auto& f : futures) f.get();
  }

  SimulationMetrics m;
  m.episodes = episodes;
  for (const auto& trace : traces) {
    m.ael += trace.length;
    m.aer_attacker += trace.attacker_total;
    m.aer_defender += trace.defender_total;
    m.attacker_win_rate += trace.outcome.kind == OutcomeKind::AttackerWin ? 1.0 : 0.0;
    m.mean_discovered += trace.end_discovered;
    m.mean_owned += trace.end_owned;
    m.mean_suspicious += trace.end_suspicious;
    for (std::size_t k = 0; k < m.tally.rows.size(); ++k) {
      m.tally.rows[k].success += trace.tally.rows[k].success;
      m.tally.rows[k].failure += trace.tally.rows[k].failure;
      m.tally.rows[k].invalid += trace.tally.rows[k].invalid;
    }
    if (options.on_episode) options.on_episode(trace);
  }
  m.ael /= episodes;
  m.aer_attacker /= episodes;
  m.aer_defender /= episodes;
  m.attacker_win_rate /= episodes;
  m.mean_discovered /= episodes;
  m.mean_owned /= episodes;
  m.mean_suspicious /= episodes;
  return m;
}

nlohmann::json metrics_to_json(const SimulationMetrics& m) {
  nlohmann::json tally = nlohmann::json::object();
  static const ActionKind kinds[] = {ActionKind::LocalAttack, ActionKind::RemoteAttack,
                                     ActionKind::Connect,     ActionKind::Scan,
                                     ActionKind::Restore,     ActionKind::Remediate};
  for (ActionKind k : kinds) {
    const TallyRow& row = m.tally.row(k);
    tally[std::string(to_string(k))] = {
        {"success", row.success}, {"failure", row.failure}, {"invalid", row.invalid}};
  }
  return {{"episodes", m.episodes},
          {"ael", m.ael},
          {"aer_attacker", m.aer_attacker},
          {"aer_defender", m.aer_defender},
          {"attacker_win_rate", m.attacker_win_rate},
          {"mean_discovered", m.mean_discovered},
          {"mean_owned", m.mean_owned},
          {"mean_suspicious", m.mean_suspicious},
          {"actions", tally}};
}

std::pair<double, double> decide_match(const SimulationMetrics& a, const SimulationMetrics& b,
                                       Role role) {
  if (role == Role::Attacker) {
    if (a.ael != b.ael) return a.ael < b.ael ? std::make_pair(1.0, 0.0) : std::make_pair(0.0, 1.0);
    if (a.aer_attacker != b.aer_attacker)
      return a.aer_attacker > b.aer_attacker ? std::make_pair(1.0, 0.0) : std::make_pair(0.0, 1.0);
  } else {
    if (a.ael != b.ael) return a.ael > b.ael ? std::make_pair(1.0, 0.0) : std::make_pair(0.0, 1.0);
    if (a.aer_defender != b.aer_defender)
      return a.aer_defender > b.aer_defender ? std::make_pair(1.0, 0.0) : std::make_pair(0.0, 1.0);
  }
  return {0.5, 0.5};
}

double EloTable::expected_score(double rating_i, double rating_j) {
  return 1.0 / (1.0 + std::pow(10.0, (rating_j - rating_i) / 400.0));
}

void EloTable::add(const std::string& id) { ratings_.emplace(id, initial_); }

double EloTable::rating(const std::string& id) const {
  auto it = ratings_.find(id);
  if (it == ratings_.end()) throw NotFoundError("no rating for '" + id + "'");
  return it->second;
}

void EloTable::record_result(const std::string& i, const std::string& j, double score_i) {
  double ri = rating(i);
  double rj = rating(j);
  double ei = expected_score(ri, rj);
  double ej = 1.0 - ei;
  ratings_[i] = ri + k_ * (score_i - ei);
  ratings_[j] = rj + k_ * ((1.0 - score_i) - ej);
}

TournamentReport run_tournament(const DynamicAccessGraph& graph,
                                const std::vector<TournamentService>& services,
                                const TournamentOptions& options) {
  std::vector<const TournamentService*> attackers;
  std::vector<const TournamentService*> defenders;
  for (const auto& s : services)
    (s.role == Role::Attacker ? attackers : defenders).push_back(&s);
  auto by_id = [](const TournamentService* a, const TournamentService* b) { return a->id < b->id; };
  std::sort(attackers.begin(), attackers.end(), by_id);
  std::sort(defenders.begin(), defenders.end(), by_id);

  bool attacker_bracket = attackers.size() >= 2 && !defenders.empty();
  bool defender_bracket = defenders.size() >= 2 && !attackers.empty();
  if (!attacker_bracket && !defender_bracket)
    throw InsufficientServicesError(
        "a tournament needs two services of one role plus an opposite-role adversary");

  TournamentReport report;
  report.options = options;
  EloTable table;
  for (const auto& s : services) table.add(s.id);

  std::map<std::string, ServiceStanding> standings;
  for (const auto& s : services) {
    ServiceStanding st;
    st.id = s.id;
    st.role = s.role;
    standings.emplace(s.id, std::move(st));
  }

  SimulateOptions sim_options;
  sim_options.parallel = options.parallel;

  std::uint64_t match_ordinal = 0;
  auto play = [&](Role role, const TournamentService& ci, const TournamentService& cj,
                  const TournamentService& adversary, int sim) {
    MatchRecord match;
    match.role = role;
    match.contestant_i = ci.id;
    match.contestant_j = cj.id;
    match.adversary = adversary.id;
    match.simulation = sim;
    match.seed = derive_seed(options.base_seed, match_ordinal++);
    if (role == Role::Attacker) {
      match.metrics_i = simulate(graph, ci.attacker, adversary.defender,
                                 options.episodes_per_simulation, match.seed, sim_options);
      match.metrics_j = simulate(graph, cj.attacker, adversary.defender,
                                 options.episodes_per_simulation, match.seed, sim_options);
    } else {
      match.metrics_i = simulate(graph, adversary.attacker, ci.defender,
                                 options.episodes_per_simulation, match.seed, sim_options);
      match.metrics_j = simulate(graph, adversary.attacker, cj.defender,
                                 options.episodes_per_simulation, match.seed, sim_options);
    }
    std::tie(match.score_i, match.score_j) = decide_match(match.metrics_i, match.metrics_j, role);
    table.record_result(ci.id, cj.id, match.score_i);
    match.rating_i_after = table.rating(ci.id);
    match.rating_j_after = table.rating(cj.id);

    auto credit = [&](ServiceStanding& st, double score, const std::string& adversary_id) {
      st.matches += 1;
      auto& vs = st.versus[adversary_id];
      if (score == 1.0) {
        st.wins += 1;
        vs[0] += 1;
      } else if (score == 0.5) {
        st.draws += 1;
        vs[1] += 1;
      } else {
        st.losses += 1;
        vs[2] += 1;
      }
    };
    credit(standings.at(ci.id), match.score_i, adversary.id);
    credit(standings.at(cj.id), match.score_j, adversary.id);
    (role == Role::Attacker ? report.attacker_matches : report.defender_matches) += 1;
    report.matches.push_back(std::move(match));
  };

  for (int sim = 0; sim < options.simulations_per_pairing; ++sim) {
    if (attacker_bracket) {
      for (std::size_t i = 0; i < attackers.size(); ++i)
        for (std::size_t j = i + 1; j < attackers.size(); ++j)
          for (const auto* adversary : defenders)
            play(Role::Attacker, *attackers[i], *attackers[j], *adversary, sim);
    }
    if (defender_bracket) {
      for (std::size_t i = 0; i < defenders.size(); ++i)
        for (std::size_t j = i + 1; j < defenders.size(); ++j)
          for (const auto* adversary : attackers)
            play(Role::Defender, *defenders[i], *defenders[j], *adversary, sim);
    }
  }

  for (auto& [id, st] : standings) {
    st.rating = table.rating(id);
    report.leaderboard.push_back(std::move(st));
  }
  std::sort(report.leaderboard.begin(), report.leaderboard.end(),
            [](const ServiceStanding& a, const ServiceStanding& b) {
              if (a.rating != b.rating) return a.rating > b.rating;
              return a.id < b.id;
            });
  return report;
}

nlohmann::json tournament_report_to_json(const TournamentReport& report) {
  nlohmann::json leaderboard = nlohmann::json::array();
  for (const auto& st : report.leaderboard) {
    nlohmann::json versus = nlohmann::json::object();
    for (const auto& [adversary, wdl] : st.versus)
      versus[adversary] = {{"wins", wdl[0]}, {"draws", wdl[1]}, {"losses", wdl[2]}};
    leaderboard.push_back({{"id", st.id},
                           {"role", to_string(st.role)},
                           {"rating", st.rating},
                           {"matches", st.matches},
                           {"wins", st.wins},
                           {"draws", st.draws},
                           {"losses", st.losses},
                           {"versus", versus}});
  }
  nlohmann::json matches = nlohmann::json::array();
  for (const auto& m : report.matches) {
    matches.push_back({{"role", to_string(m.role)},
                       {"contestant_i", m.contestant_i},
                       {"contestant_j", m.contestant_j},
                       {"adversary", m.adversary},
                       {"simulation", m.simulation},
                       {"seed", m.seed},
                       {"score_i", m.score_i},
                       {"score_j", m.score_j},
                       {"ael_i", m.metrics_i.ael},
                       {"ael_j", m.metrics_j.ael},
                       {"rating_i_after", m.rating_i_after},
                       {"rating_j_after", m.rating_j_after}});
  }
  return {{"leaderboard", leaderboard},
          {"matches", matches},
          {"attacker_matches", report.attacker_matches},
          {"defender_matches", report.defender_matches},
          {"simulations_per_pairing", report.options.simulations_per_pairing},
          {"episodes_per_simulation", report.options.episodes_per_simulation},
          {"base_seed", report.options.base_seed}};
}

std::string render_leaderboard(const TournamentReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(24) << "service" << std::setw(10) << "role" << std::right
      << std::setw(10) << "rating" << std::setw(9) << "matches" << std::setw(7) << "won"
      << std::setw(7) << "drawn" << std::setw(7) << "lost" << '\n';
  out << std::string(74, '-') << '\n';
  out << std::fixed << std::setprecision(2);
  for (const auto& st : report.leaderboard) {
    out << std::left << std::setw(24) << st.id << std::setw(10) << to_string(st.role)
        << std::right << std::setw(10) << st.rating << std::setw(9) << st.matches << std::setw(7)
        << st.wins << std::setw(7) << st.draws << std::setw(7) << st.losses << '\n';
  }
  return out.str();
}

}  // namespace issf
