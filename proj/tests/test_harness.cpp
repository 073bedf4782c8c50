#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "r2/harness.hpp"
#include "test_util.hpp"

using namespace r2;
using r2::test::standard_cards;
using r2::test::standard_nobles;

namespace {

GameSetup quick_setup(long budget = 60, int players = 2) {
    GameSetup setup;
    setup.params = GameParams::standard(players);
    setup.cards = standard_cards();
    setup.nobles = standard_nobles();
    setup.budget = budget;
    return setup;
}

AgentFactory rnd_factory() {
    return [] { return std::make_unique<RndAgent>(); };
}

AgentFactory osla_factory() {
    return [] { return std::make_unique<OslaAgent>(ValueFunction{}); };
}

} // namespace

TEST_CASE("run_game finishes, reports a winner and replays identically") {
    GameSetup setup = quick_setup();
    RndAgent a, b;
    MatchResult r1 = run_game({&a, &b}, setup, 5);
    MatchResult r2 = run_game({&a, &b}, setup, 5);
    REQUIRE_FALSE(r1.capped);
    REQUIRE(r1.winner >= 0);
    REQUIRE(r1.turns > 0);
    REQUIRE(r1.points.size() == 2);
    REQUIRE(r1.points[static_cast<std::size_t>(r1.winner)] >= 15);
    REQUIRE(r1.winner == r2.winner);
    REQUIRE(r1.turns == r2.turns);
    REQUIRE(r1.points == r2.points);
}

TEST_CASE("run_game rejects a wrong agent count") {
    GameSetup setup = quick_setup();
    RndAgent a;
    REQUIRE_THROWS_AS(run_game({&a}, setup, 0), ConfigError);
}

TEST_CASE("run_game enforces the budget contract") {
    struct Glutton final : Agent {
        Action act(const GameState& s, BudgetMeter& meter,
                   std::uint64_t seed) override {
            Rng rng(seed);
            GameState sim = clone_state(s);
            for (int i = 0; i < 10; ++i) { // overruns a budget of 5
                if (sim.terminalFlag) break;
                step(sim, sample_action(sim, rng));
                meter.spend();
            }
            return sample_action(s, rng);
        }
        std::string name() const override { return "GLUTTON"; }
    };
    GameSetup setup = quick_setup(5);
    Glutton g;
    RndAgent r;
    REQUIRE_THROWS_AS(run_game({&g, &r}, setup, 1), std::logic_error);
}

TEST_CASE("run_game rejects illegal agent moves") {
    struct Cheat final : Agent {
        Action act(const GameState&, BudgetMeter&, std::uint64_t) override {
            Action a;
            a.kind = ActionKind::BuyFaceUp;
            a.deck = 0;
            a.slot = 0; // unaffordable on turn one
            return a;
        }
        std::string name() const override { return "CHEAT"; }
    };
    GameSetup setup = quick_setup();
    Cheat c;
    RndAgent r;
    REQUIRE_THROWS_AS(run_game({&c, &r}, setup, 1), std::logic_error);
}

TEST_CASE("run_game caps pathological games as ties") {
    struct Idler final : Agent {
        Action act(const GameState&, BudgetMeter&, std::uint64_t) override {
            return Action{}; // always pass
        }
        std::string name() const override { return "IDLE"; }
    };
    GameSetup setup = quick_setup();
    setup.turnCap = 40;
    Idler a, b;
    MatchResult r = run_game({&a, &b}, setup, 2);
    REQUIRE(r.capped);
    REQUIRE(r.winner == -1);
    REQUIRE(r.turns == 40);
}

TEST_CASE("ci_bounds") {
    auto [p, half] = ci_bounds(60, 0, 100);
    REQUIRE(p == Catch::Approx(0.6));
    REQUIRE(half == Catch::Approx(1.96 * std::sqrt(0.6 * 0.4 / 100)));
    auto [pt, halft] = ci_bounds(40, 20, 100);
    REQUIRE(pt == Catch::Approx(0.5));
    REQUIRE_THROWS_AS(ci_bounds(0, 0, 0), std::invalid_argument);
}

TEST_CASE("self-play head-to-head is exactly 50 percent") {
    GameSetup setup = quick_setup();
    HeadToHeadResult h = head_to_head(rnd_factory(), rnd_factory(), setup, 40,
                                      77);
    REQUIRE(h.winRate == Catch::Approx(0.5));
    REQUIRE(h.wins == h.losses);
    REQUIRE(h.wins + h.ties + h.losses == 40);
}

TEST_CASE("head-to-head is reproducible and parallel-invariant") {
    GameSetup setup = quick_setup();
    HeadToHeadResult a = head_to_head(osla_factory(), rnd_factory(), setup, 16,
                                      123);
    HeadToHeadResult b = head_to_head(osla_factory(), rnd_factory(), setup, 16,
                                      123, 3);
    REQUIRE(a.wins == b.wins);
    REQUIRE(a.ties == b.ties);
    REQUIRE(a.losses == b.losses);
    for (std::size_t g = 0; g < a.games.size(); ++g) {
        REQUIRE(a.games[g].winner == b.games[g].winner);
        REQUIRE(a.games[g].turns == b.games[g].turns);
        REQUIRE(a.games[g].points == b.games[g].points);
    }
}

TEST_CASE("round robin cells are complementary and averaged") {
    GameSetup setup = quick_setup();
    WinRateTable t = round_robin({rnd_factory(), osla_factory(), rnd_factory()},
                                 {"RND-A", "OSLA", "RND-B"}, setup, 8, 9);
    REQUIRE(t.names.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(t.winPercent[i][i] == -1.0);
        for (std::size_t j = 0; j < 3; ++j) {
            if (i == j) continue;
            REQUIRE(t.winPercent[i][j] + t.winPercent[j][i] ==
                    Catch::Approx(100.0));
            REQUIRE(t.sampleCount[i][j] == 8);
        }
        double avg = 0;
        for (std::size_t j = 0; j < 3; ++j)
            if (j != i) avg += t.winPercent[i][j];
        REQUIRE(t.average[i] == Catch::Approx(avg / 2));
    }
}

TEST_CASE("multi-opponent rotates the candidate seat") {
    GameSetup setup = quick_setup(60, 4);
    MultiOpponentResult m = multi_opponent(rnd_factory(), rnd_factory(), setup,
                                           12, 31);
    REQUIRE(m.uniformTarget == Catch::Approx(0.25));
    REQUIRE(m.wins + m.ties <= 12);
    REQUIRE(m.games.size() == 12);
    // Reproducible under parallelism.
    MultiOpponentResult m2 = multi_opponent(rnd_factory(), rnd_factory(), setup,
                                            12, 31, 2);
    REQUIRE(m.wins == m2.wins);
    REQUIRE(m.ties == m2.ties);
}

TEST_CASE("agent factories build every kind from a spec") {
    for (const char* kind : {"RND", "OSLA", "BMRH", "SRH", "MCTS"}) {
        AgentSpec spec;
        spec.kind = kind;
        auto agent = make_agent_factory(spec)();
        REQUIRE(agent != nullptr);
        REQUIRE_FALSE(agent->name().empty());
    }
    AgentSpec bogus;
    bogus.kind = "ORACLE";
    REQUIRE_THROWS_AS(make_agent_factory(bogus), ConfigError);
}

TEST_CASE("agent spec JSON round trip") {
    json j{{"kind", "BMRH"},
           {"value_function", "lin_hc_star"},
           {"hyperparameters", {{"sequence_length", 4}, {"shift_buffer", 1}}},
           {"seed", 7},
           {"determinize", false}};
    AgentSpec spec = agent_spec_from_json(j);
    REQUIRE(spec.kind == "BMRH");
    REQUIRE(spec.vf.is_event_based());
    REQUIRE_FALSE(spec.determinize);
    BMRHConfig cfg = bmrh_config_from_json(spec.hyperparameters);
    REQUIRE(cfg.sequenceLength == 4);
    REQUIRE(cfg.shiftBuffer);
    json back = agent_spec_to_json(spec);
    REQUIRE(back["kind"] == "BMRH");
    REQUIRE(back["value_function"] == "lin_hc_star");

    REQUIRE_THROWS_AS(agent_spec_from_json(json{{"kind", "NOPE"}}), ConfigError);
}

TEST_CASE("tune_bmrh runs a tiny campaign and decodes its winner") {
    TuneSetup setup;
    setup.game = quick_setup(30);
    setup.ntbea.budget = 6;
    setup.opponent.kind = "RND";
    TuneOutcome out = tune_bmrh(setup, 13);
    REQUIRE(out.space.size() == 10);
    REQUIRE(out.evaluations.size() == 6);
    REQUIRE(out.best.size() == 10);
    REQUIRE(out.bestWeights.empty());
    REQUIRE(out.bestConfig.sequenceLength >= 1);
    REQUIRE(out.bestConfig.sequenceLength <= 5);
    for (const auto& [c, f] : out.evaluations) {
        REQUIRE((f == 0.0 || f == 0.5 || f == 1.0));
        REQUIRE(c.size() == 10);
    }
    // Deterministic per seed.
    TuneOutcome again = tune_bmrh(setup, 13);
    REQUIRE(again.best == out.best);
    for (std::size_t i = 0; i < out.evaluations.size(); ++i)
        REQUIRE(again.evaluations[i].second == out.evaluations[i].second);
}

TEST_CASE("tune_bmrh with event-function weights widens the space") {
    TuneSetup setup;
    setup.game = quick_setup(30);
    setup.useEventFunction = true;
    setup.mapping = TypeMapping::hand_crafted();
    setup.mixer = Mixer{MixerKind::Linear, 1, 5};
    setup.ntbea.budget = 4;
    setup.opponent.kind = "RND";
    TuneOutcome out = tune_bmrh(setup, 17);
    REQUIRE(out.space.size() == 15);
    REQUIRE(out.bestWeights.size() == 5);
    for (double w : out.bestWeights) {
        REQUIRE(w >= -1.0);
        REQUIRE(w <= 1.0);
    }
}

TEST_CASE("results CSV has stable formatting and no timing columns") {
    GameSetup setup = quick_setup();
    RndAgent a, b;
    std::vector<MatchResult> games{run_game({&a, &b}, setup, 3),
                                   run_game({&a, &b}, setup, 4)};
    std::stringstream s1, s2;
    write_results_csv(s1, games);
    games[0].wallClockSeconds = 99.0; // timing must not leak into the file
    write_results_csv(s2, games);
    REQUIRE(s1.str() == s2.str());
    std::string header = s1.str().substr(0, s1.str().find('\n'));
    REQUIRE(header == "game,seed,winner,turns,capped,points0,points1");
    REQUIRE(s1.str().find("wall") == std::string::npos);
}

TEST_CASE("matrix CSV writes 4-decimal cells with a diagonal dash") {
    WinRateTable t;
    t.names = {"A", "B"};
    t.winPercent = {{-1.0, 62.5}, {37.5, -1.0}};
    t.sampleCount = {{0, 8}, {8, 0}};
    t.ciHalfWidthPercent = {{0, 1}, {1, 0}};
    t.average = {62.5, 37.5};
    std::stringstream out;
    write_matrix_csv(out, t);
    REQUIRE(out.str() ==
            "agent,A,B,avg\nA,-,62.5000,62.5000\nB,37.5000,-,37.5000\n");
}

TEST_CASE("tuning CSV lists candidates with semicolon-joined indices") {
    std::vector<std::pair<Candidate, double>> evals{{{0, 2, 1}, 1.0},
                                                    {{1, 0, 0}, 0.5}};
    std::stringstream out;
    write_tuning_csv(out, evals);
    REQUIRE(out.str() ==
            "iteration,candidate,fitness\n0,0;2;1,1.0000\n1,1;0;0,0.5000\n");
}

TEST_CASE("format4 pins four decimals") {
    REQUIRE(format4(0.5) == "0.5000");
    REQUIRE(format4(12.34567) == "12.3457");
    REQUIRE(format4(-1) == "-1.0000");
}
