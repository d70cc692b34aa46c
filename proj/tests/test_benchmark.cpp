#include <doctest/doctest.h>

#include <cmath>
#include <memory>
#include <set>
#include <vector>

#include "issf/benchmark.hpp"
#include "issf/errors.hpp"
#include "issf/rng.hpp"

#include "common/helpers.hpp"

using namespace issf;
using namespace issf::test;
using nlohmann::json;

namespace {

AttackerFactory optimal_attacker(const DynamicAccessGraph& g) {
  auto script = optimal_chain_script(g);
  return [script] { return std::make_unique<ScriptedAttacker>(script); };
}

AttackerFactory random_attacker() {
  return [] { return std::make_unique<RandomAttackerAgent>(); };
}

DefenderFactory null_defender() {
  return [] { return std::make_unique<NullDefenderAgent>(); };
}

DefenderFactory random_defender() {
  return [] { return std::make_unique<RandomDefenderAgent>(); };
}

}  // namespace

TEST_CASE("elo updates follow the classic formula") {
  EloTable table;
  table.add("a");
  table.add("b");
  CHECK(table.rating("a") == 1000.0);
  CHECK(EloTable::expected_score(1000.0, 1000.0) == 0.5);

  // the pinned book example: equal ratings, K=32, a win moves 16 points
  table.record_result("a", "b", 1.0);
  CHECK(table.rating("a") == 1016.0);
  CHECK(table.rating("b") == 984.0);

  // second win: the expected score is no longer one half
  double ea = 1.0 / (1.0 + std::pow(10.0, (984.0 - 1016.0) / 400.0));
  table.record_result("a", "b", 1.0);
  CHECK(table.rating("a") == doctest::Approx(1016.0 + 32.0 * (1.0 - ea)).epsilon(1e-12));
  CHECK(table.rating("b") == doctest::Approx(984.0 - 32.0 * (1.0 - ea)).epsilon(1e-12));
  // zero-sum with a shared K
  CHECK(table.rating("a") + table.rating("b") == doctest::Approx(2000.0).epsilon(1e-12));

  // draws between equals move nothing
  EloTable even;
  even.add("x");
  even.add("y");
  even.record_result("x", "y", 0.5);
  CHECK(even.rating("x") == 1000.0);
  CHECK(even.rating("y") == 1000.0);

  SUBCASE("expected score is symmetric and monotone") {
    CHECK(EloTable::expected_score(1200.0, 1000.0) ==
          doctest::Approx(1.0 / (1.0 + std::pow(10.0, -0.5))).epsilon(1e-12));
    CHECK(EloTable::expected_score(1200.0, 1000.0) + EloTable::expected_score(1000.0, 1200.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(EloTable::expected_score(1400.0, 1000.0) > EloTable::expected_score(1200.0, 1000.0));
  }

  SUBCASE("unknown ids have no rating") {
    CHECK_THROWS_AS(table.rating("ghost"), NotFoundError);
  }

  SUBCASE("re-adding an id does not reset its rating") {
    double before = table.rating("a");
    table.add("a");
    CHECK(table.rating("a") == before);
  }

  SUBCASE("custom initial rating and k-factor") {
    EloTable custom(1500.0, 16.0);
    custom.add("p");
    custom.add("q");
    custom.record_result("p", "q", 0.0);
    CHECK(custom.rating("p") == 1492.0);
    CHECK(custom.rating("q") == 1508.0);
  }
}

TEST_CASE("match decisions prefer speed for offense and delay for defense") {
  SimulationMetrics fast;
  fast.ael = 12.0;
  fast.aer_attacker = 100.0;
  fast.aer_defender = -5.0;
  SimulationMetrics slow;
  slow.ael = 40.0;
  slow.aer_attacker = 250.0;  // richer but slower
  slow.aer_defender = 3.0;

  CHECK(decide_match(fast, slow, Role::Attacker) == std::pair{1.0, 0.0});
  CHECK(decide_match(slow, fast, Role::Attacker) == std::pair{0.0, 1.0});
  CHECK(decide_match(fast, slow, Role::Defender) == std::pair{0.0, 1.0});
  CHECK(decide_match(slow, fast, Role::Defender) == std::pair{1.0, 0.0});

  SUBCASE("equal lengths fall back to the role's reward") {
    SimulationMetrics a = fast, b = fast;
    a.aer_attacker = 50.0;
    b.aer_attacker = 60.0;
    CHECK(decide_match(a, b, Role::Attacker) == std::pair{0.0, 1.0});
    a.aer_defender = 9.0;
    b.aer_defender = 2.0;
    CHECK(decide_match(a, b, Role::Defender) == std::pair{1.0, 0.0});
  }

  SUBCASE("full ties are split") {
    CHECK(decide_match(fast, fast, Role::Attacker) == std::pair{0.5, 0.5});
    CHECK(decide_match(fast, fast, Role::Defender) == std::pair{0.5, 0.5});
  }
}

TEST_CASE("simulation aggregates known episodes exactly") {
  auto g = chain_graph();
  std::vector<std::uint64_t> seen_seeds;
  SimulateOptions options;
  options.on_episode = [&](const EpisodeTrace& t) { seen_seeds.push_back(t.seed); };

  auto m = simulate(g, optimal_attacker(g), null_defender(), 4, 99, options);
  CHECK(m.episodes == 4);
  CHECK(m.ael == kOptimalChainLength);
  CHECK(m.aer_attacker == doctest::Approx(kOptimalChainReward));
  CHECK(m.aer_defender == 0.0);
  CHECK(m.attacker_win_rate == 1.0);
  CHECK(m.mean_owned == 6.0);
  CHECK(m.mean_discovered == 4.0);
  CHECK(m.mean_suspicious == 0.0);
  // tallies sum across episodes: 4 locals, 8 remotes, 5 connects each
  CHECK(m.tally.row(ActionKind::LocalAttack).success == 4 * 4);
  CHECK(m.tally.row(ActionKind::RemoteAttack).success == 8 * 4);
  CHECK(m.tally.row(ActionKind::Connect).success == 5 * 4);
  CHECK(m.tally.row(ActionKind::Scan).success == 0);

  // the trace callback runs once per episode, in order, on derived seeds
  REQUIRE(seen_seeds.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(seen_seeds[i] == derive_seed(99, i));

  json doc = metrics_to_json(m);
  CHECK(doc["episodes"] == 4);
  CHECK(doc["ael"] == 17.0);
  CHECK(doc["attacker_win_rate"] == 1.0);
  CHECK(doc["actions"]["local_attack"]["success"] == 16);
  CHECK(doc["actions"]["scan"]["failure"] == 0);
}

TEST_CASE("simulation results are identical across worker counts") {
  auto g = chain_graph();
  SimulateOptions serial;
  serial.episode.max_length = 30;
  SimulateOptions threaded = serial;
  threaded.parallel = 4;

  auto m1 = simulate(g, random_attacker(), random_defender(), 9, 1234, serial);
  auto m2 = simulate(g, random_attacker(), random_defender(), 9, 1234, threaded);
  CHECK(metrics_to_json(m1) == metrics_to_json(m2));

  SimulateOptions many = serial;
  many.parallel = 16;  // more workers than episodes
  auto m3 = simulate(g, random_attacker(), random_defender(), 9, 1234, many);
  CHECK(metrics_to_json(m1) == metrics_to_json(m3));

  // and a different base seed gives a different run
  auto m4 = simulate(g, random_attacker(), random_defender(), 9, 4321, serial);
  CHECK(metrics_to_json(m1) != metrics_to_json(m4));
}

TEST_CASE("simulation validates its inputs") {
  auto g = chain_graph();
  CHECK_THROWS_AS(simulate(g, optimal_attacker(g), null_defender(), 0, 1), ValidationError);
  CHECK_THROWS_AS(simulate(g, nullptr, null_defender(), 1, 1), ValidationError);
  CHECK_THROWS_AS(simulate(g, optimal_attacker(g), nullptr, 1, 1), ValidationError);
}

TEST_CASE("a tournament pits contestants against shared seeds and ranks them") {
  auto g = chain_graph();
  std::vector<TournamentService> services(3);
  services[0] = {"atk_optimal", Role::Attacker, optimal_attacker(g), nullptr};
  services[1] = {"atk_random", Role::Attacker, random_attacker(), nullptr};
  services[2] = {"def_null", Role::Defender, nullptr, null_defender()};

  TournamentOptions options;
  options.simulations_per_pairing = 3;
  options.episodes_per_simulation = 4;
  options.base_seed = 7;

  auto report = run_tournament(g, services, options);
  CHECK(report.attacker_matches == 3);  // 1 pairing x 1 adversary x 3 simulations
  CHECK(report.defender_matches == 0);  // a lone defender has nobody to play
  REQUIRE(report.matches.size() == 3);

  double expected_optimal = 1000.0;
  double expected_random = 1000.0;
  for (int k = 0; k < 3; ++k) {
    const MatchRecord& match = report.matches[k];
    CHECK(match.role == Role::Attacker);
    CHECK(match.contestant_i == "atk_optimal");
    CHECK(match.contestant_j == "atk_random");
    CHECK(match.adversary == "def_null");
    CHECK(match.simulation == k);
    CHECK(match.seed == derive_seed(7, k));  // schedule-ordinal seeds, shared per match
    // the optimal campaign is 17 rounds; a random walk cannot match that
    CHECK(match.metrics_i.ael == kOptimalChainLength);
    CHECK(match.metrics_i.ael < match.metrics_j.ael);
    CHECK(match.score_i == 1.0);
    CHECK(match.score_j == 0.0);

    double e = EloTable::expected_score(expected_optimal, expected_random);
    expected_optimal += 32.0 * (1.0 - e);
    expected_random -= 32.0 * (1.0 - e);
    CHECK(match.rating_i_after == doctest::Approx(expected_optimal).epsilon(1e-12));
    CHECK(match.rating_j_after == doctest::Approx(expected_random).epsilon(1e-12));
  }
  CHECK(report.matches[0].rating_i_after == 1016.0);  // first win from level pegging
  CHECK(report.matches[0].rating_j_after == 984.0);

  REQUIRE(report.leaderboard.size() == 3);
  CHECK(report.leaderboard[0].id == "atk_optimal");
  CHECK(report.leaderboard[0].rating == doctest::Approx(expected_optimal));
  CHECK(report.leaderboard[0].wins == 3.0);
  CHECK(report.leaderboard[0].matches == 3);
  CHECK(report.leaderboard[0].versus.at("def_null")[0] == 3.0);
  // the unplayed defender keeps the initial rating, between the two attackers
  CHECK(report.leaderboard[1].id == "def_null");
  CHECK(report.leaderboard[1].rating == 1000.0);
  CHECK(report.leaderboard[1].matches == 0);
  CHECK(report.leaderboard[2].id == "atk_random");
  CHECK(report.leaderboard[2].versus.at("def_null")[2] == 3.0);

  SUBCASE("the report serializes and renders") {
    json doc = tournament_report_to_json(report);
    CHECK(doc["attacker_matches"] == 3);
    CHECK(doc["leaderboard"][0]["id"] == "atk_optimal");
    CHECK(doc["leaderboard"][0]["versus"]["def_null"]["wins"] == 3.0);
    CHECK(doc["matches"].size() == 3);
    CHECK(doc["matches"][0]["seed"] == derive_seed(7, 0));
    CHECK(doc["simulations_per_pairing"] == 3);

    std::string board = render_leaderboard(report);
    CHECK(board.find("service") != std::string::npos);
    CHECK(board.find("atk_optimal") != std::string::npos);
    CHECK(board.find("def_null") != std::string::npos);
    // winner listed before loser
    CHECK(board.find("atk_optimal") < board.find("atk_random"));
  }

  SUBCASE("tournaments are reproducible end to end") {
    auto again = run_tournament(g, services, options);
    CHECK(tournament_report_to_json(again) == tournament_report_to_json(report));
  }
}

TEST_CASE("round-robin schedules interleave simulations over pairings") {
  auto g = chain_graph();
  std::vector<TournamentService> services(5);
  services[0] = {"a1", Role::Attacker, random_attacker(), nullptr};
  services[1] = {"a2", Role::Attacker, random_attacker(), nullptr};
  services[2] = {"a3", Role::Attacker, random_attacker(), nullptr};
  services[3] = {"d1", Role::Defender, nullptr, null_defender()};
  services[4] = {"d2", Role::Defender, nullptr, random_defender()};

  TournamentOptions options;
  options.simulations_per_pairing = 2;
  options.episodes_per_simulation = 2;
  options.base_seed = 11;

  auto report = run_tournament(g, services, options);
  // attackers: C(3,2) pairings x 2 defenders x 2 sims
  CHECK(report.attacker_matches == 3 * 2 * 2);
  // defenders: C(2,2) pairing x 3 attackers x 2 sims
  CHECK(report.defender_matches == 1 * 3 * 2);
  REQUIRE(report.matches.size() == 18);

  // schedule: for each simulation round, the full attacker bracket then the
  // full defender bracket
  for (int k = 0; k < 9; ++k) CHECK(report.matches[k].simulation == 0);
  for (int k = 9; k < 18; ++k) CHECK(report.matches[k].simulation == 1);
  CHECK(report.matches[0].contestant_i == "a1");
  CHECK(report.matches[0].contestant_j == "a2");
  CHECK(report.matches[0].adversary == "d1");
  CHECK(report.matches[1].adversary == "d2");
  CHECK(report.matches[2].contestant_j == "a3");
  CHECK(report.matches[6].role == Role::Defender);
  CHECK(report.matches[6].contestant_i == "d1");
  CHECK(report.matches[6].contestant_j == "d2");
  CHECK(report.matches[6].adversary == "a1");
  // the second simulation round replays the same schedule on fresh seeds
  CHECK(report.matches[9].contestant_i == "a1");
  CHECK(report.matches[9].contestant_j == "a2");
  CHECK(report.matches[9].adversary == "d1");

  // seeds follow the schedule ordinal without collisions
  std::set<std::uint64_t> seeds;
  for (std::size_t k = 0; k < report.matches.size(); ++k) {
    CHECK(report.matches[k].seed == derive_seed(11, k));
    seeds.insert(report.matches[k].seed);
  }
  CHECK(seeds.size() == report.matches.size());

  // every attacker plays 2 pairings x 2 defenders x 2 sims
  for (const auto& st : report.leaderboard) {
    if (st.role == Role::Attacker) CHECK(st.matches == 8);
    if (st.role == Role::Defender) CHECK(st.matches == 6);
    CHECK(st.wins + st.draws + st.losses == st.matches);
  }
}

TEST_CASE("identical twins draw forever and keep the initial rating") {
  auto g = chain_graph();
  std::vector<TournamentService> services(3);
  services[0] = {"twin_a", Role::Attacker, optimal_attacker(g), nullptr};
  services[1] = {"twin_b", Role::Attacker, optimal_attacker(g), nullptr};
  services[2] = {"zz_null", Role::Defender, nullptr, null_defender()};

  TournamentOptions options;
  options.simulations_per_pairing = 4;
  options.episodes_per_simulation = 2;

  auto report = run_tournament(g, services, options);
  for (const auto& match : report.matches) {
    CHECK(match.score_i == 0.5);
    CHECK(match.rating_i_after == 1000.0);
    CHECK(match.rating_j_after == 1000.0);
  }
  // rating ties break by id
  CHECK(report.leaderboard[0].id == "twin_a");
  CHECK(report.leaderboard[1].id == "twin_b");
  CHECK(report.leaderboard[0].draws == 4.0);
}

TEST_CASE("tournaments without a playable bracket are refused") {
  auto g = chain_graph();
  std::vector<TournamentService> lonely(2);
  lonely[0] = {"a", Role::Attacker, random_attacker(), nullptr};
  lonely[1] = {"d", Role::Defender, nullptr, null_defender()};
  CHECK_THROWS_AS(run_tournament(g, lonely), InsufficientServicesError);

  std::vector<TournamentService> no_adversary(2);
  no_adversary[0] = {"a1", Role::Attacker, random_attacker(), nullptr};
  no_adversary[1] = {"a2", Role::Attacker, random_attacker(), nullptr};
  CHECK_THROWS_AS(run_tournament(g, no_adversary), InsufficientServicesError);

  CHECK_THROWS_AS(run_tournament(g, {}), InsufficientServicesError);
}
