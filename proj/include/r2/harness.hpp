#ifndef R2_HARNESS_HPP
#define R2_HARNESS_HPP

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "r2/agents.hpp"
#include "r2/engine.hpp"
#include "r2/io.hpp"
#include "r2/ntbea.hpp"
#include "r2/valuefn.hpp"

namespace r2 {

// ---------------------------------------------------------------------------
// Agent interface
// ---------------------------------------------------------------------------

class Agent {
public:
    virtual ~Agent() = default;
    virtual Action act(const GameState& s, BudgetMeter& meter,
                       std::uint64_t turnSeed) = 0;
    virtual void reset() {}
    virtual std::string name() const = 0;
};

using AgentFactory = std::function<std::unique_ptr<Agent>()>;

namespace detail {

// Planner view of the true state: hidden information reshuffled under the
// planner's seed when determinization is on.
inline GameState planner_view(const GameState& s, bool det,
                              std::uint64_t turnSeed) {
    if (!det) return clone_state(s);
    return determinize(s, s.currentPlayer, derive_seed(turnSeed, 7));
}

} // namespace detail

class RndAgent final : public Agent {
public:
    Action act(const GameState& s, BudgetMeter&, std::uint64_t seed) override {
        return act_rnd(s, seed);
    }
    std::string name() const override { return "RND"; }
};

class OslaAgent final : public Agent {
public:
    explicit OslaAgent(ValueFunction vf, bool det = true)
        : vf_(std::move(vf)), det_(det) {}
    Action act(const GameState& s, BudgetMeter& meter,
               std::uint64_t seed) override {
        GameState view = detail::planner_view(s, det_, seed);
        Rng rng(seed);
        return act_osla(view, vf_, meter, rng);
    }
    std::string name() const override { return "OSLA"; }

private:
    ValueFunction vf_;
    bool det_;
};

class BmrhAgent final : public Agent {
public:
    BmrhAgent(BMRHConfig cfg, ValueFunction vf, bool det = true,
              std::string label = "BMRH")
        : cfg_(cfg), vf_(std::move(vf)), det_(det), label_(std::move(label)) {}
    Action act(const GameState& s, BudgetMeter& meter,
               std::uint64_t seed) override {
        GameState view = detail::planner_view(s, det_, seed);
        Rng rng(seed);
        return act_bmrh(view, cfg_, vf_, meter, rng, &session_);
    }
    void reset() override { session_ = BmrhSession{}; }
    std::string name() const override { return label_; }
    const BMRHConfig& config() const { return cfg_; }

private:
    BMRHConfig cfg_;
    ValueFunction vf_;
    bool det_;
    std::string label_;
    BmrhSession session_;
};

class SrhAgent final : public Agent {
public:
    SrhAgent(SRHConfig cfg, ValueFunction vf, bool det = true)
        : cfg_(cfg), vf_(std::move(vf)), det_(det) {}
    Action act(const GameState& s, BudgetMeter& meter,
               std::uint64_t seed) override {
        GameState view = detail::planner_view(s, det_, seed);
        Rng rng(seed);
        return act_srh(view, cfg_, vf_, meter, rng, &session_);
    }
    void reset() override { session_ = SrhSession{}; }
    std::string name() const override { return "SRH"; }

private:
    SRHConfig cfg_;
    ValueFunction vf_;
    bool det_;
    SrhSession session_;
};

class MctsAgent final : public Agent {
public:
    MctsAgent(MCTSConfig cfg, ValueFunction vf, bool det = true)
        : cfg_(cfg), vf_(std::move(vf)), det_(det) {}
    Action act(const GameState& s, BudgetMeter& meter,
               std::uint64_t seed) override {
        GameState view = detail::planner_view(s, det_, seed);
        Rng rng(seed);
        return act_mcts(view, cfg_, vf_, meter, rng);
    }
    std::string name() const override { return "MCTS"; }

private:
    MCTSConfig cfg_;
    ValueFunction vf_;
    bool det_;
};

inline AgentFactory make_agent_factory(const AgentSpec& spec) {
    if (spec.kind == "RND")
        return [] { return std::make_unique<RndAgent>(); };
    if (spec.kind == "OSLA")
        return [spec] {
            return std::make_unique<OslaAgent>(spec.vf, spec.determinize);
        };
    if (spec.kind == "BMRH")
        return [spec] {
            return std::make_unique<BmrhAgent>(
                bmrh_config_from_json(spec.hyperparameters), spec.vf,
                spec.determinize);
        };
    if (spec.kind == "SRH")
        return [spec] {
            return std::make_unique<SrhAgent>(
                srh_config_from_json(spec.hyperparameters), spec.vf,
                spec.determinize);
        };
    if (spec.kind == "MCTS")
        return [spec] {
            return std::make_unique<MctsAgent>(
                mcts_config_from_json(spec.hyperparameters), spec.vf,
                spec.determinize);
        };
    throw ConfigError("unknown agent kind: " + spec.kind);
}

// ---------------------------------------------------------------------------
// Single games
// ---------------------------------------------------------------------------

struct GameSetup {
    GameParams params = GameParams::standard(2);
    std::vector<Card> cards;
    std::vector<Noble> nobles;
    long budget = 1000; // simulated actions per agent turn
    int turnCap = 500;  // plies; capped games count as ties
    bool strictBudget = true;
};

struct MatchResult {
    std::uint64_t seed = 0;
    std::vector<int> points;
    int winner = -1; // seat index; -1 for capped/tied games
    int turns = 0;
    bool capped = false;
    double wallClockSeconds = 0.0;
};

// Plays one game. `agents` are seat-ordered; per-turn seeds fan out from the
// game seed by turn counter, independent of the seat, so mirrored seatings of
// identical agents replay identically.
inline MatchResult run_game(const std::vector<Agent*>& agents,
                            const GameSetup& setup, std::uint64_t seed) {
    if (static_cast<int>(agents.size()) != setup.params.numPlayers)
        throw ConfigError("agent count does not match numPlayers");
    auto t0 = std::chrono::steady_clock::now();

    GameState s = new_game(setup.params, setup.cards, setup.nobles,
                           derive_seed(seed, 0));
    for (Agent* a : agents) a->reset();

    MatchResult result;
    result.seed = seed;
    int turn = 0;
    while (!s.terminalFlag && turn < setup.turnCap) {
        int seat = s.currentPlayer;
        BudgetMeter meter(setup.budget);
        Action a = agents[static_cast<std::size_t>(seat)]->act(
            s, meter, derive_seed(seed, 1000 + static_cast<std::uint64_t>(turn)));
        if (setup.strictBudget && meter.spent > setup.budget)
            throw std::logic_error("agent exceeded simulation budget");
        if (!is_legal(s, a))
            throw std::logic_error("agent returned illegal action");
        step(s, a);
        ++turn;
    }
    result.turns = turn;
    result.capped = !s.terminalFlag;
    result.winner = s.terminalFlag ? s.winnerIndex : -1;
    for (const PlayerState& p : s.players) result.points.push_back(p.points);
    result.wallClockSeconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return result;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

// Win-rate point estimate with ties worth half, and the 95% normal CI
// half-width 1.96 * sqrt(p(1-p)/n).
inline std::pair<double, double> ci_bounds(long wins, long ties, long n) {
    if (n < 1) throw std::invalid_argument("ci_bounds needs n >= 1");
    double p = (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) /
               static_cast<double>(n);
    double half = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return {p, half};
}

// ---------------------------------------------------------------------------
// Parallel game batches (deterministic: results keyed by game index)
// ---------------------------------------------------------------------------

inline void parallel_for(int n, int jobs,
                         const std::function<void(int)>& body) {
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            while (true) {
                int i = next.fetch_add(1);
                if (i >= n) break;
                body(i);
            }
        });
    for (auto& th : pool) th.join();
}

struct HeadToHeadResult {
    long wins = 0, ties = 0, losses = 0;
    double winRate = 0.0;  // in [0,1], ties worth half
    double ciHalfWidth = 0.0;
    long cappedGames = 0;
    std::vector<MatchResult> games;
};

// n games of candidate vs opponent with seat alternation; games 2k and 2k+1
// share the game seed with seats swapped.
inline HeadToHeadResult head_to_head(const AgentFactory& candidate,
                                     const AgentFactory& opponent,
                                     const GameSetup& setup, long n,
                                     std::uint64_t masterSeed, int jobs = 1) {
    HeadToHeadResult out;
    out.games.resize(static_cast<std::size_t>(n));
    std::vector<int> candidateSeat(static_cast<std::size_t>(n));
    parallel_for(static_cast<int>(n), jobs, [&](int g) {
        std::uint64_t gameSeed =
            derive_seed(masterSeed, static_cast<std::uint64_t>(g / 2));
        int seat = g % 2;
        candidateSeat[static_cast<std::size_t>(g)] = seat;
        auto a = candidate();
        auto b = opponent();
        std::vector<Agent*> seats(2);
        seats[static_cast<std::size_t>(seat)] = a.get();
        seats[static_cast<std::size_t>(1 - seat)] = b.get();
        out.games[static_cast<std::size_t>(g)] = run_game(seats, setup, gameSeed);
    });
    for (long g = 0; g < n; ++g) {
        const MatchResult& r = out.games[static_cast<std::size_t>(g)];
        if (r.capped || r.winner < 0) {
            ++out.ties;
            if (r.capped) ++out.cappedGames;
        } else if (r.winner == candidateSeat[static_cast<std::size_t>(g)]) {
            ++out.wins;
        } else {
            ++out.losses;
        }
    }
    auto [p, half] = ci_bounds(out.wins, out.ties, n);
    out.winRate = p;
    out.ciHalfWidth = half;
    return out;
}

struct WinRateTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> winPercent; // row vs column, diag = -1
    std::vector<std::vector<long>> sampleCount;
    std::vector<std::vector<double>> ciHalfWidthPercent;
    std::vector<double> average; // per-row average over opponents
};

// Round-robin over all unordered pairs with seat alternation. Cell (i,j) +
// cell (j,i) always sums to 100 (ties split half-half).
inline WinRateTable round_robin(const std::vector<AgentFactory>& factories,
                                const std::vector<std::string>& names,
                                const GameSetup& setup, long gamesPerPair,
                                std::uint64_t masterSeed, int jobs = 1) {
    int n = static_cast<int>(factories.size());
    if (n < 2) throw ConfigError("round robin needs >= 2 agents");
    WinRateTable table;
    table.names = names;
    table.winPercent.assign(static_cast<std::size_t>(n),
                            std::vector<double>(static_cast<std::size_t>(n), -1.0));
    table.sampleCount.assign(static_cast<std::size_t>(n),
                             std::vector<long>(static_cast<std::size_t>(n), 0));
    table.ciHalfWidthPercent.assign(
        static_cast<std::size_t>(n),
        std::vector<double>(static_cast<std::size_t>(n), 0.0));
    int pairIndex = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            HeadToHeadResult h = head_to_head(
                factories[static_cast<std::size_t>(i)],
                factories[static_cast<std::size_t>(j)], setup, gamesPerPair,
                derive_seed(masterSeed, static_cast<std::uint64_t>(pairIndex)),
                jobs);
            ++pairIndex;
            auto [pj, halfj] = ci_bounds(h.losses, h.ties, gamesPerPair);
            table.winPercent[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                h.winRate * 100.0;
            table.winPercent[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                pj * 100.0;
            table.sampleCount[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                gamesPerPair;
            table.sampleCount[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                gamesPerPair;
            table.ciHalfWidthPercent[static_cast<std::size_t>(i)]
                                    [static_cast<std::size_t>(j)] =
                h.ciHalfWidth * 100.0;
            table.ciHalfWidthPercent[static_cast<std::size_t>(j)]
                                    [static_cast<std::size_t>(i)] = halfj * 100.0;
        }
    }
    table.average.resize(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double sum = 0;
        for (int j = 0; j < n; ++j)
            if (j != i)
                sum += table.winPercent[static_cast<std::size_t>(i)]
                                       [static_cast<std::size_t>(j)];
        table.average[static_cast<std::size_t>(i)] = sum / (n - 1);
    }
    return table;
}

struct MultiOpponentResult {
    long wins = 0, ties = 0;
    double winRate = 0.0;
    double ciHalfWidth = 0.0;
    double uniformTarget = 0.0; // 1 / numPlayers
    long cappedGames = 0;
    std::vector<MatchResult> games;
};

// Candidate vs (numPlayers - 1) copies of the opponent, candidate rotating
// through the seats.
inline MultiOpponentResult multi_opponent(const AgentFactory& candidate,
                                          const AgentFactory& opponent,
                                          const GameSetup& setup, long n,
                                          std::uint64_t masterSeed,
                                          int jobs = 1) {
    int players = setup.params.numPlayers;
    MultiOpponentResult out;
    out.uniformTarget = 1.0 / players;
    out.games.resize(static_cast<std::size_t>(n));
    std::vector<int> candidateSeat(static_cast<std::size_t>(n));
    parallel_for(static_cast<int>(n), jobs, [&](int g) {
        std::uint64_t gameSeed =
            derive_seed(masterSeed, static_cast<std::uint64_t>(g));
        int seat = g % players;
        candidateSeat[static_cast<std::size_t>(g)] = seat;
        auto cand = candidate();
        std::vector<std::unique_ptr<Agent>> opps;
        std::vector<Agent*> seats(static_cast<std::size_t>(players));
        for (int p = 0; p < players; ++p) {
            if (p == seat) {
                seats[static_cast<std::size_t>(p)] = cand.get();
            } else {
                opps.push_back(opponent());
                seats[static_cast<std::size_t>(p)] = opps.back().get();
            }
        }
        out.games[static_cast<std::size_t>(g)] = run_game(seats, setup, gameSeed);
    });
    for (long g = 0; g < n; ++g) {
        const MatchResult& r = out.games[static_cast<std::size_t>(g)];
        if (r.capped || r.winner < 0) {
            ++out.ties;
            if (r.capped) ++out.cappedGames;
        } else if (r.winner == candidateSeat[static_cast<std::size_t>(g)]) {
            ++out.wins;
        }
    }
    auto [p, half] = ci_bounds(out.wins, out.ties, n);
    out.winRate = p;
    out.ciHalfWidth = half;
    return out;
}

// ---------------------------------------------------------------------------
// NTBEA tuning campaigns
// ---------------------------------------------------------------------------

struct TuneSetup {
    GameSetup game;
    // Empty mixer = plain BMRH over the score value function (10 dims);
    // otherwise weight dimensions for this mixer+mapping are appended.
    bool useEventFunction = false;
    TypeMapping mapping = TypeMapping::hand_crafted();
    Mixer mixer{MixerKind::Linear, 1, 5};
    NTBEAConfig ntbea;
    AgentSpec opponent;
};

struct TuneOutcome {
    SearchSpace space;
    Candidate best;
    BMRHConfig bestConfig;
    std::vector<double> bestWeights;
    std::vector<std::pair<Candidate, double>> evaluations;
};

// One NTBEA run over the (BMRH [+ EF weights]) space with single-game
// win-indicator fitness (1 win, 0.5 tie/cap, 0 loss), alternating seats.
inline TuneOutcome tune_bmrh(const TuneSetup& setup, std::uint64_t seed) {
    SearchSpace space = bmrh_search_space();
    if (setup.useEventFunction) {
        Mixer mixer = setup.mixer;
        mixer.featureCount = setup.mapping.groupCount;
        space = combine_spaces(
            space,
            weights_search_space(static_cast<int>(required_weights(mixer))));
    }
    AgentFactory opponentFactory = make_agent_factory(setup.opponent);

    long evalCounter = 0;
    auto fitness = [&](const Candidate& c, Rng& rng) -> double {
        auto [cfg, weights] = decode_bmrh_candidate(space, c);
        ValueFunction vf;
        if (setup.useEventFunction) {
            Mixer mixer = setup.mixer;
            mixer.featureCount = setup.mapping.groupCount;
            vf = ValueFunction(std::make_shared<EventValueFunction>(
                setup.mapping, mixer, weights));
        }
        BmrhAgent candidate(cfg, vf);
        auto opponent = opponentFactory();
        int seat = static_cast<int>(evalCounter++ % 2);
        std::vector<Agent*> seats(2);
        seats[static_cast<std::size_t>(seat)] = &candidate;
        seats[static_cast<std::size_t>(1 - seat)] = opponent.get();
        MatchResult r = run_game(seats, setup.game, rng.next_u64());
        if (r.capped || r.winner < 0) return 0.5;
        return r.winner == seat ? 1.0 : 0.0;
    };

    NTBEAResult res = ntbea_optimize(space, fitness, setup.ntbea, seed);
    TuneOutcome out;
    out.space = std::move(space);
    out.best = res.best;
    auto [cfg, weights] = decode_bmrh_candidate(out.space, res.best);
    out.bestConfig = cfg;
    out.bestWeights = std::move(weights);
    out.evaluations = std::move(res.evaluations);
    return out;
}

// ---------------------------------------------------------------------------
// CSV output (4 decimal places, comma-separated, header row)
// ---------------------------------------------------------------------------

inline std::string format4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

inline void write_results_csv(std::ostream& out,
                              const std::vector<MatchResult>& games) {
    out << "game,seed,winner,turns,capped";
    std::size_t players = games.empty() ? 2 : games.front().points.size();
    for (std::size_t p = 0; p < players; ++p) out << ",points" << p;
    out << "\n";
    for (std::size_t g = 0; g < games.size(); ++g) {
        const MatchResult& r = games[g];
        out << g << "," << r.seed << "," << r.winner << "," << r.turns << ","
            << (r.capped ? 1 : 0);
        for (int pts : r.points) out << "," << pts;
        out << "\n";
    }
}

inline void write_matrix_csv(std::ostream& out, const WinRateTable& table) {
    out << "agent";
    for (const auto& n : table.names) out << "," << n;
    out << ",avg\n";
    for (std::size_t i = 0; i < table.names.size(); ++i) {
        out << table.names[i];
        for (std::size_t j = 0; j < table.names.size(); ++j) {
            out << ",";
            if (i == j)
                out << "-";
            else
                out << format4(table.winPercent[i][j]);
        }
        out << "," << format4(table.average[i]) << "\n";
    }
}

inline void write_tuning_csv(
    std::ostream& out,
    const std::vector<std::pair<Candidate, double>>& evaluations) {
    out << "iteration,candidate,fitness\n";
    for (std::size_t i = 0; i < evaluations.size(); ++i) {
        out << i << ",";
        const Candidate& c = evaluations[i].first;
        for (std::size_t d = 0; d < c.size(); ++d) {
            if (d) out << ";";
            out << c[d];
        }
        out << "," << format4(evaluations[i].second) << "\n";
    }
}

} // namespace r2

#endif
