#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "issf/episode.hpp"
#include "issf/graph.hpp"

namespace issf {

// Episode-aggregated quality metrics for one attacker/defender pairing.
struct SimulationMetrics {
  int episodes = 0;
  double ael = 0.0;  // average episode length
  double aer_attacker = 0.0;
  double aer_defender = 0.0;
  double attacker_win_rate = 0.0;
  double mean_discovered = 0.0;  // end-of-episode posture means
  double mean_owned = 0.0;
  double mean_suspicious = 0.0;
  ActionTally tally;  // summed across episodes
};

// Parallel workers construct their own agents, so factories rather than
// instances cross the API.
using AttackerFactory = std::function<std::unique_ptr<AttackerAgent>()>;
using DefenderFactory = std::function<std::unique_ptr<DefenderAgent>()>;

struct SimulateOptions {
  int parallel = 1;  // worker threads
  EpisodeOptions episode;
  // Invoked in episode order after all episodes complete (trace export).
  std::function<void(const EpisodeTrace&)> on_episode;
};

// Runs `episodes` seeded episodes (episode i uses derive_seed(base_seed, i))
// and aggregates. Deterministic in (graph, agents, episodes, base_seed)
// regardless of parallelism.
SimulationMetrics simulate(const DynamicAccessGraph& graph, const AttackerFactory& attacker,
                           const DefenderFactory& defender, int episodes,
                           std::uint64_t base_seed, const SimulateOptions& options = {});

nlohmann::json metrics_to_json(const SimulationMetrics& metrics);

// Win/draw/loss from paired metrics. Offense: shorter campaigns win, average
// reward breaks ties. Defense: longer campaigns win, defender reward breaks
// ties. Returns (score_i, score_j) summing to 1.
std::pair<double, double> decide_match(const SimulationMetrics& metrics_i,
                                       const SimulationMetrics& metrics_j, Role role);

class EloTable {
 public:
  explicit EloTable(double initial = 1000.0, double k_factor = 32.0)
      : initial_(initial), k_(k_factor) {}

  static double expected_score(double rating_i, double rating_j);

  void add(const std::string& id);
  double rating(const std::string& id) const;
  void record_result(const std::string& i, const std::string& j, double score_i);
  const std::map<std::string, double>& ratings() const { return ratings_; }

 private:
  double initial_;
  double k_;
  std::map<std::string, double> ratings_;
};

struct TournamentService {
  std::string id;
  Role role = Role::Attacker;
  AttackerFactory attacker;  // role == Attacker
  DefenderFactory defender;  // role == Defender
};

struct TournamentOptions {
  int simulations_per_pairing = 25;
  int episodes_per_simulation = 50;
  std::uint64_t base_seed = 0;
  int parallel = 1;
};

// One ledger row: contestants i and j played the same adversary on the same
// seed; ratings listed as they stood after this match was applied.
struct MatchRecord {
  Role role = Role::Attacker;
  std::string contestant_i;
  std::string contestant_j;
  std::string adversary;
  int simulation = 0;
  std::uint64_t seed = 0;
  SimulationMetrics metrics_i;
  SimulationMetrics metrics_j;
  double score_i = 0.0;
  double score_j = 0.0;
  double rating_i_after = 0.0;
  double rating_j_after = 0.0;
};

struct ServiceStanding {
  std::string id;
  Role role = Role::Attacker;
  double rating = 0.0;
  int matches = 0;
  double wins = 0.0;
  double draws = 0.0;
  double losses = 0.0;
  // adversary id -> {wins, draws, losses} against it
  std::map<std::string, std::array<double, 3>> versus;
};

struct TournamentReport {
  std::vector<ServiceStanding> leaderboard;  // rating desc, id asc on ties
  std::vector<MatchRecord> matches;          // schedule order
  int attacker_matches = 0;
  int defender_matches = 0;
  TournamentOptions options;
};

// Round-robin per role against every opposite-role service, repeated
// simulations interleaved, ELO applied sequentially in schedule order.
// Requires at least one role with two contestants and an adversary.
TournamentReport run_tournament(const DynamicAccessGraph& graph,
                                const std::vector<TournamentService>& services,
                                const TournamentOptions& options = {});

nlohmann::json tournament_report_to_json(const TournamentReport& report);
std::string render_leaderboard(const TournamentReport& report);

}  // namespace issf
