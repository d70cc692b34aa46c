#include <doctest/doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "issf/episode.hpp"

#include "common/helpers.hpp"

using namespace issf;
using namespace issf::test;
using nlohmann::json;

TEST_CASE("the optimal campaign beats a passive defender in 17 rounds") {
  auto g = chain_graph();
  ScriptedAttacker attacker(optimal_chain_script(g));
  NullDefenderAgent defender;
  auto trace = run_episode(g, attacker, defender, 42);

  CHECK(trace.outcome.kind == OutcomeKind::AttackerWin);
  CHECK(trace.length == kOptimalChainLength);
  CHECK(trace.attacker_total == doctest::Approx(kOptimalChainReward));
  CHECK(trace.defender_total == 0.0);
  CHECK(trace.records.size() == 2 * static_cast<std::size_t>(kOptimalChainLength));

  // every scripted action succeeded
  CHECK(trace.tally.row(ActionKind::LocalAttack).success == 4);
  CHECK(trace.tally.row(ActionKind::RemoteAttack).success == 8);
  CHECK(trace.tally.row(ActionKind::Connect).success == 5);
  for (const auto& row : trace.tally.rows) {
    CHECK(row.failure == 0);
    CHECK(row.invalid == 0);
  }

  CHECK(trace.end_owned == 6);        // gateway, sa2, sc2 and all three databases
  CHECK(trace.end_discovered == 4);   // sa1, sb1, sb2, sc1 were never owned
  CHECK(trace.end_suspicious == 0);

  // the defender record of each round is a free no-op
  for (const auto& rec : trace.records) {
    if (rec.role == Role::Defender) {
      CHECK_FALSE(rec.acted);
      CHECK(rec.reward.reward == 0.0);
      CHECK(rec.reward.detail == OutcomeDetail::NoOp);
    }
  }
}

TEST_CASE("episodes replay byte-identically under the same seed") {
  auto g = chain_graph();
  auto render = [&](std::uint64_t seed) {
    RandomAttackerAgent attacker;
    RandomDefenderAgent defender;
    EpisodeOptions opt;
    opt.max_length = 40;
    auto trace = run_episode(g, attacker, defender, seed, opt);
    std::ostringstream out;
    write_trace_jsonl(g, trace, out);
    return out.str();
  };

  CHECK(render(7) == render(7));
  CHECK(render(7) != render(8));
}

TEST_CASE("round order is configurable and recorded") {
  auto g = pair_graph();

  ScriptedAttacker attacker({LocalAttack{g.node_index("entry"), g.toolkit_index("v_reveal")}});
  ScriptedDefender defender({Scan{}});
  EpisodeOptions opt;
  opt.max_length = 2;

  SUBCASE("defender first") {
    auto trace = run_episode(g, attacker, defender, 5, opt);
    CHECK(trace.defender_first);
    CHECK(trace.records[0].role == Role::Defender);
    CHECK(trace.records[1].role == Role::Attacker);
  }
  SUBCASE("attacker first") {
    opt.defender_first = false;
    auto trace = run_episode(g, attacker, defender, 5, opt);
    CHECK_FALSE(trace.defender_first);
    CHECK(trace.records[0].role == Role::Attacker);
    CHECK(trace.records[1].role == Role::Defender);
  }
}

TEST_CASE("an attacker win is reported even on the capped round") {
  auto g = pair_graph();
  ScriptedAttacker attacker({
      LocalAttack{g.node_index("entry"), g.toolkit_index("v_reveal")},
      LocalAttack{g.node_index("entry"), g.toolkit_index("v_leak")},
      Connect{g.node_index("entry"), g.node_index("db"), g.credential_index("cred_db")},
  });
  NullDefenderAgent defender;
  EpisodeOptions opt;
  opt.max_length = 3;  // the win lands exactly on the cap

  auto trace = run_episode(g, attacker, defender, 1, opt);
  CHECK(trace.outcome.kind == OutcomeKind::AttackerWin);
  CHECK(trace.length == 3);
}

TEST_CASE("idle games stop at the step limit") {
  auto g = pair_graph();
  ScriptedAttacker attacker({});
  NullDefenderAgent defender;
  EpisodeOptions opt;
  opt.max_length = 5;

  auto trace = run_episode(g, attacker, defender, 1, opt);
  CHECK(trace.outcome.kind == OutcomeKind::StepLimit);
  CHECK(trace.length == 5);
  CHECK(trace.records.size() == 10);
  CHECK(trace.attacker_total == 0.0);
  for (const auto& rec : trace.records) CHECK_FALSE(rec.acted);
}

TEST_CASE("the scenario cap applies when no override is given") {
  auto g = pair_graph();  // max_episode_length 50
  ScriptedAttacker attacker({});
  NullDefenderAgent defender;
  auto trace = run_episode(g, attacker, defender, 1);
  CHECK(trace.outcome.kind == OutcomeKind::StepLimit);
  CHECK(trace.length == 50);
}

TEST_CASE("an engine error aborts the episode with the diagnostic") {
  auto g = pair_graph();
  ScriptedAttacker attacker({LocalAttack{99, 0}});
  NullDefenderAgent defender;
  auto trace = run_episode(g, attacker, defender, 1);
  CHECK(trace.outcome.kind == OutcomeKind::Aborted);
  CHECK(trace.outcome.reason.find("out of range") != std::string::npos);
}

TEST_CASE("a restored node is down for exactly one full round") {
  auto g = pair_graph();
  const int entry = g.node_index("entry");
  const int db = g.node_index("db");
  const AttackerAction connect{Connect{entry, db, g.credential_index("cred_db")}};

  // Round 0: discover + leak happen elsewhere; here we pre-own everything the
  // attacker needs, then let the defender knock db over.
  ScriptedAttacker attacker({
      LocalAttack{entry, g.toolkit_index("v_reveal")},  // round 0
      LocalAttack{entry, g.toolkit_index("v_leak")},    // round 1
      connect,  // round 2: invalid, restore landed this round
      connect,  // round 3: invalid, the reimage runs one full round
      connect,  // round 4: valid again
  });
  ScriptedDefender defender({
      Scan{},          // round 0
      Scan{},          // round 1
      Restore{db},     // round 2 (db still unowned: pure denial)
      Scan{},          // round 3
      Scan{},          // round 4
  });

  // Manual drive so downtime is visible mid-episode. The restore happens in
  // round 2 before the attacker moves (defender first).
  EpisodeState s(g, 11);
  attacker.on_episode_start();
  defender.on_episode_start();
  EpisodeOptions opt;
  opt.max_length = 10;

  auto r0 = step(g, s, attacker, defender, opt);
  auto r1 = step(g, s, attacker, defender, opt);
  auto r2 = step(g, s, attacker, defender, opt);
  CHECK(r2.second.reward.detail == OutcomeDetail::Invalid);  // connect blocked
  CHECK_FALSE(s.running(db));

  auto r3 = step(g, s, attacker, defender, opt);
  CHECK(r3.second.reward.detail == OutcomeDetail::Invalid);  // still down
  CHECK(s.running(db));  // countdown finished at the end of round 3

  auto r4 = step(g, s, attacker, defender, opt);
  CHECK(r4.second.reward.detail == OutcomeDetail::CredentialGranted);
  CHECK(r4.outcome.has_value());
  CHECK(r4.outcome->kind == OutcomeKind::AttackerWin);
  (void)r0;
  (void)r1;
}

TEST_CASE("traces render as one header line plus one line per record") {
  auto g = pair_graph();
  ScriptedAttacker attacker({LocalAttack{g.node_index("entry"), g.toolkit_index("v_leak")}});
  NullDefenderAgent defender;
  EpisodeOptions opt;
  opt.max_length = 2;
  auto trace = run_episode(g, attacker, defender, 3, opt);

  std::ostringstream out;
  write_trace_jsonl(g, trace, out);
  std::istringstream in(out.str());
  std::vector<json> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(json::parse(line));

  REQUIRE(lines.size() == 1 + trace.records.size());
  const json& header = lines[0];
  CHECK(header["scenario"] == "pair");
  CHECK(header["scenario_hash"] == g.content_hash());
  CHECK(header["seed"] == 3);
  CHECK(header["outcome"] == "step_limit");
  CHECK(header["length"] == 2);

  const json& leak_line = lines[2];  // defender first, attacker second
  CHECK(leak_line["role"] == "attacker");
  CHECK(leak_line["acted"] == true);
  CHECK(leak_line["action"]["kind"] == "local_attack");
  CHECK(leak_line["action"]["vulnerability"] == "v_leak");
  CHECK(leak_line["detail"] == "exploited");

  const json& noop_line = lines[1];
  CHECK(noop_line["acted"] == false);
  CHECK(noop_line["action"].is_null());

  // cumulative draw counters never decrease
  std::uint64_t last = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::uint64_t draws = lines[i]["rng_draws"].get<std::uint64_t>();
    CHECK(draws >= last);
    last = draws;
  }
}

TEST_CASE("random agents draw only from the episode stream") {
  auto g = chain_graph();
  RandomAttackerAgent attacker;
  RandomDefenderAgent defender;
  EpisodeOptions opt;
  opt.max_length = 30;
  auto a = run_episode(g, attacker, defender, 99, opt);
  auto b = run_episode(g, attacker, defender, 99, opt);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].rng_draws == b.records[i].rng_draws);
    CHECK(a.records[i].reward.reward == b.records[i].reward.reward);
  }
}
