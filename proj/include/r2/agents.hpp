#ifndef R2_AGENTS_HPP
#define R2_AGENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "r2/engine.hpp"
#include "r2/rng.hpp"
#include "r2/state.hpp"
#include "r2/valuefn.hpp"

namespace r2 {

enum class MutationPointDist { Uniform, Geometric05, Geometric08 };
enum class TieBreak { First, Randomized };

struct BMRHConfig {
    int sequenceLength = 3;
    int populationSize = 10;
    int eliteCount = 2;
    MutationPointDist mutationPointDist = MutationPointDist::Uniform;
    int offspringPerParent = 2;
    bool shiftBuffer = false;
    int evaluationsPerSequence = 1;
    // Mild discounting rewards sequences that score sooner; with no discount
    // a buy planned three plies out rates the same as a buy right now, and
    // the later buy frequently never materializes after opponent moves.
    double valueDiscount = 0.9;
    OpponentModel opponentModel = OpponentModel::Random;
    TieBreak tieBreak = TieBreak::First;
};

struct SRHConfig {
    int sequenceLength = 3;
    int populationSize = 10;
    int eliteCount = 2;
    double geneMutationProb = 0.5;
    int offspringPerParent = 2;
    bool shiftBuffer = false;
    int evaluationsPerSequence = 1;
    double valueDiscount = 0.9; // see BMRHConfig::valueDiscount
    OpponentModel opponentModel = OpponentModel::Random;
    TieBreak tieBreak = TieBreak::First;
};

struct MCTSConfig {
    double explorationConstant = 1.41421356237;
    int maxDepth = 10;
    double wideningBase = 2.0;
    double wideningExponent = 0.5;
    int rolloutLength = 6;
};

inline Action act_rnd(const GameState& s, Rng& rng) {
    return sample_action(s, rng);
}

inline Action act_rnd(const GameState& s, std::uint64_t seed) {
    Rng rng(seed);
    return act_rnd(s, rng);
}

// One-step look-ahead: sample candidate actions while budget lasts, evaluate
// each as a length-1 sequence, play the maximizer. Ties go to the first find.
inline Action act_osla(const GameState& s, const ValueFunction& vf,
                       BudgetMeter& meter, Rng& rng) {
    Action best;
    double bestValue = 0;
    bool have = false;
    while (!meter.empty()) {
        Action a = sample_action(s, rng);
        EvalResult r = evaluate_sequence(s, std::span<const Action>(&a, 1), vf,
                                         OpponentModel::Random, meter, rng);
        if (!have || r.value > bestValue) {
            best = std::move(a);
            bestValue = r.value;
            have = true;
        }
    }
    return best; // Pass when the budget allowed no candidate at all
}

inline int draw_mutation_point(MutationPointDist dist, int length, Rng& rng) {
    switch (dist) {
        case MutationPointDist::Uniform: return rng.next_int(length);
        case MutationPointDist::Geometric05:
        case MutationPointDist::Geometric08: {
            double p = dist == MutationPointDist::Geometric05 ? 0.5 : 0.8;
            int m = 0;
            while (m < length - 1 && rng.next_bool(p)) ++m;
            return m;
        }
    }
    return 0;
}

namespace detail {

struct RollOutcome {
    std::vector<Action> child;
    double value = 0.0;
    bool exhausted = false;
};

// Branching mutation fused with evaluation: copy-and-replay the parent up to
// the mutation point, sample fresh legal actions from there while rolling the
// state, accumulating the (discounted) value increments along the way.
// Opponent turns between own actions come from the opponent model. Every
// simulated action costs one budget unit; once the meter runs dry the
// remaining positions are padded with unsimulated Pass actions.
inline RollOutcome branch_roll(const GameState& root,
                               std::span<const Action> parent, int length,
                               int mutationPoint, const ValueFunction& vf,
                               OpponentModel opponent, BudgetMeter& meter,
                               Rng& rng, double discount) {
    GameState sim = clone_state(root);
    int player = sim.currentPlayer;
    EventLogger logger;
    logger.owner = player;
    bool ef = vf.is_event_based();
    if (ef) sim.attach_logger(&logger);

    RollOutcome out;
    out.child.reserve(static_cast<std::size_t>(length));
    double prev = 0.0, weight = 1.0, total = 0.0;
    int baseScore = score(sim, player);

    for (int i = 0; i < length; ++i) {
        if (sim.terminalFlag) {
            out.child.emplace_back(); // Pass filler past game end
            continue;
        }
        if (meter.empty()) {
            out.exhausted = true;
            out.child.emplace_back();
            continue;
        }
        Action a;
        if (i < mutationPoint && i < static_cast<int>(parent.size()) &&
            is_legal(sim, parent[static_cast<std::size_t>(i)]))
            a = parent[static_cast<std::size_t>(i)];
        else
            a = sample_action(sim, rng);
        step(sim, a);
        meter.spend();
        out.child.push_back(std::move(a));

        double cum = ef ? vf.ef().value(logger.buffer, player)
                        : static_cast<double>(score(sim, player) - baseScore);
        total += weight * (cum - prev);
        prev = cum;
        weight *= discount;

        if (i + 1 < length) {
            for (int o = 1; o < sim.params.numPlayers; ++o) {
                if (sim.terminalFlag) break;
                if (meter.empty()) {
                    out.exhausted = true;
                    break;
                }
                Action oa = opponent == OpponentModel::Passing
                                ? Action{}
                                : sample_action(sim, rng);
                step(sim, oa);
                meter.spend();
            }
        }
    }
    out.value = total;
    return out;
}

} // namespace detail

// The spec-level mutation operator: returns the child sequence only.
inline std::vector<Action> branching_mutation(const GameState& s,
                                              std::span<const Action> parent,
                                              MutationPointDist dist,
                                              OpponentModel opponent,
                                              BudgetMeter& meter, Rng& rng) {
    int length = static_cast<int>(parent.size());
    int m = draw_mutation_point(dist, length, rng);
    return detail::branch_roll(s, parent, length, m, ValueFunction{}, opponent,
                               meter, rng, 1.0)
        .child;
}

namespace detail {

struct Individual {
    std::vector<Action> seq;
    double fitness = 0.0;
};

// Extra evaluations beyond the one piggybacked on the construction roll.
inline double average_fitness(const GameState& s, const std::vector<Action>& seq,
                              double firstValue, int evaluations,
                              const ValueFunction& vf, OpponentModel opponent,
                              BudgetMeter& meter, Rng& rng, double discount) {
    double sum = firstValue;
    int done = 1;
    for (int e = 1; e < evaluations && !meter.empty(); ++e) {
        EvalResult r = evaluate_sequence(s, seq, vf, opponent, meter, rng, discount);
        sum += r.value;
        ++done;
    }
    return sum / done;
}

} // namespace detail

struct BmrhSession {
    std::vector<Action> carried;
    bool hasCarried = false;
};

inline Action act_bmrh(const GameState& s, const BMRHConfig& cfg,
                       const ValueFunction& vf, BudgetMeter& meter, Rng& rng,
                       BmrhSession* session = nullptr) {
    using detail::Individual;
    const int length = cfg.sequenceLength;
    const int elites = std::min(cfg.eliteCount, cfg.populationSize);

    std::vector<Individual> pop;
    Individual best;
    bool haveBest = false;
    auto consider = [&](const Individual& ind) {
        bool better = !haveBest || ind.fitness > best.fitness ||
                      (cfg.tieBreak == TieBreak::Randomized &&
                       ind.fitness == best.fitness && rng.next_bool(0.5));
        if (better) {
            best = ind;
            haveBest = true;
        }
    };
    auto breed = [&](std::span<const Action> parent, int m) {
        detail::RollOutcome roll = detail::branch_roll(
            s, parent, length, m, vf, cfg.opponentModel, meter, rng,
            cfg.valueDiscount);
        Individual ind;
        ind.seq = std::move(roll.child);
        ind.fitness = detail::average_fitness(
            s, ind.seq, roll.value, cfg.evaluationsPerSequence, vf,
            cfg.opponentModel, meter, rng, cfg.valueDiscount);
        consider(ind);
        return ind;
    };

    for (int p = 0; p < cfg.populationSize && !meter.empty(); ++p) {
        if (p == 0 && cfg.shiftBuffer && session && session->hasCarried &&
            static_cast<int>(session->carried.size()) == length) {
            // Previous turn's best, shifted one step; the tail is resampled.
            std::vector<Action> shifted(session->carried.begin() + 1,
                             session->carried.end());
            shifted.emplace_back();
            pop.push_back(breed(shifted, length - 1));
        } else {
            pop.push_back(breed({}, 0));
        }
    }

    while (!meter.empty() && !pop.empty()) {
        std::stable_sort(pop.begin(), pop.end(),
                         [](const Individual& a, const Individual& b) {
                             return a.fitness > b.fitness;
                         });
        std::vector<Individual> next(pop.begin(),
                                     pop.begin() + std::min<std::size_t>(
                                                       pop.size(),
                                                       static_cast<std::size_t>(elites)));
        // At least one offspring per generation, or the loop would never
        // drain the budget when the elites already fill the population.
        int target = std::max(cfg.populationSize,
                              static_cast<int>(next.size()) + 1);
        int parentIdx = 0;
        int offspringLeft = cfg.offspringPerParent;
        while (static_cast<int>(next.size()) < target && !meter.empty()) {
            const Individual& parent =
                next[static_cast<std::size_t>(parentIdx)];
            int m = draw_mutation_point(cfg.mutationPointDist, length, rng);
            next.push_back(breed(parent.seq, m));
            if (--offspringLeft == 0) {
                parentIdx = (parentIdx + 1) % elites;
                offspringLeft = cfg.offspringPerParent;
            }
        }
        std::stable_sort(next.begin(), next.end(),
                         [](const Individual& a, const Individual& b) {
                             return a.fitness > b.fitness;
                         });
        if (static_cast<int>(next.size()) > cfg.populationSize)
            next.resize(static_cast<std::size_t>(cfg.populationSize));
        pop = std::move(next);
    }

    if (!haveBest || best.seq.empty()) return Action{};
    if (cfg.shiftBuffer && session) {
        session->carried = best.seq;
        session->hasCarried = true;
    }
    return best.seq[0];
}

namespace detail {

// Seeded-RHEA genome decode: gene i seeds the action sampler at rollout step
// i, so a fixed genome always decodes to the same action sequence from the
// same state. Opponent fills derive from the gene seed as well.
struct SrhDecode {
    std::vector<Action> actions;
    double value = 0.0;
    bool exhausted = false;
};

inline SrhDecode srh_decode(const GameState& root,
                            std::span<const std::uint64_t> genome,
                            const ValueFunction& vf, OpponentModel opponent,
                            BudgetMeter& meter, double discount) {
    GameState sim = clone_state(root);
    int player = sim.currentPlayer;
    EventLogger logger;
    logger.owner = player;
    bool ef = vf.is_event_based();
    if (ef) sim.attach_logger(&logger);

    SrhDecode out;
    double prev = 0.0, weight = 1.0, total = 0.0;
    int baseScore = score(sim, player);
    for (std::size_t i = 0; i < genome.size(); ++i) {
        if (sim.terminalFlag) break;
        if (meter.empty()) {
            out.exhausted = true;
            break;
        }
        Rng gene(genome[i]);
        Action a = sample_action(sim, gene);
        step(sim, a);
        meter.spend();
        out.actions.push_back(std::move(a));

        double cum = ef ? vf.ef().value(logger.buffer, player)
                        : static_cast<double>(score(sim, player) - baseScore);
        total += weight * (cum - prev);
        prev = cum;
        weight *= discount;

        if (i + 1 < genome.size()) {
            for (int o = 1; o < sim.params.numPlayers; ++o) {
                if (sim.terminalFlag) break;
                if (meter.empty()) {
                    out.exhausted = true;
                    break;
                }
                Rng oppRng(derive_seed(genome[i], 1000 + static_cast<std::uint64_t>(o)));
                Action oa = opponent == OpponentModel::Passing
                                ? Action{}
                                : sample_action(sim, oppRng);
                step(sim, oa);
                meter.spend();
            }
        }
    }
    out.value = total;
    return out;
}

} // namespace detail

struct SrhSession {
    std::vector<std::uint64_t> carried;
    bool hasCarried = false;
};

inline Action act_srh(const GameState& s, const SRHConfig& cfg,
                      const ValueFunction& vf, BudgetMeter& meter, Rng& rng,
                      SrhSession* session = nullptr) {
    struct Individual {
        std::vector<std::uint64_t> genome;
        std::vector<Action> decoded;
        double fitness = 0.0;
    };
    const int length = cfg.sequenceLength;
    const int elites = std::min(cfg.eliteCount, cfg.populationSize);

    Individual best;
    bool haveBest = false;
    auto consider = [&](const Individual& ind) {
        bool better = !haveBest || ind.fitness > best.fitness ||
                      (cfg.tieBreak == TieBreak::Randomized &&
                       ind.fitness == best.fitness && rng.next_bool(0.5));
        if (better) {
            best = ind;
            haveBest = true;
        }
    };
    auto evaluate = [&](Individual& ind) {
        detail::SrhDecode first = detail::srh_decode(
            s, ind.genome, vf, cfg.opponentModel, meter, cfg.valueDiscount);
        ind.decoded = std::move(first.actions);
        double sum = first.value;
        int done = 1;
        for (int e = 1; e < cfg.evaluationsPerSequence && !meter.empty(); ++e) {
            sum += detail::srh_decode(s, ind.genome, vf, cfg.opponentModel,
                                      meter, cfg.valueDiscount)
                       .value;
            ++done;
        }
        ind.fitness = sum / done;
        consider(ind);
    };

    std::vector<Individual> pop;
    for (int p = 0; p < cfg.populationSize && !meter.empty(); ++p) {
        Individual ind;
        if (p == 0 && cfg.shiftBuffer && session && session->hasCarried &&
            static_cast<int>(session->carried.size()) == length) {
            ind.genome.assign(session->carried.begin() + 1,
                              session->carried.end());
            ind.genome.push_back(rng.next_u64());
        } else {
            for (int i = 0; i < length; ++i) ind.genome.push_back(rng.next_u64());
        }
        evaluate(ind);
        pop.push_back(std::move(ind));
    }

    while (!meter.empty() && !pop.empty()) {
        std::stable_sort(pop.begin(), pop.end(),
                         [](const Individual& a, const Individual& b) {
                             return a.fitness > b.fitness;
                         });
        std::vector<Individual> next(pop.begin(),
                                     pop.begin() + std::min<std::size_t>(
                                                       pop.size(),
                                                       static_cast<std::size_t>(elites)));
        // As in act_bmrh: guarantee one offspring per generation.
        int target = std::max(cfg.populationSize,
                              static_cast<int>(next.size()) + 1);
        int parentIdx = 0;
        int offspringLeft = cfg.offspringPerParent;
        while (static_cast<int>(next.size()) < target && !meter.empty()) {
            Individual child;
            child.genome = next[static_cast<std::size_t>(parentIdx)].genome;
            bool changed = false;
            for (auto& gene : child.genome)
                if (rng.next_bool(cfg.geneMutationProb)) {
                    gene = rng.next_u64();
                    changed = true;
                }
            if (!changed)
                child.genome[static_cast<std::size_t>(rng.next_int(length))] =
                    rng.next_u64();
            evaluate(child);
            next.push_back(std::move(child));
            if (--offspringLeft == 0) {
                parentIdx = (parentIdx + 1) % elites;
                offspringLeft = cfg.offspringPerParent;
            }
        }
        std::stable_sort(next.begin(), next.end(),
                         [](const Individual& a, const Individual& b) {
                             return a.fitness > b.fitness;
                         });
        if (static_cast<int>(next.size()) > cfg.populationSize)
            next.resize(static_cast<std::size_t>(cfg.populationSize));
        pop = std::move(next);
    }

    if (!haveBest || best.decoded.empty()) return Action{};
    if (cfg.shiftBuffer && session) {
        session->carried = best.genome;
        session->hasCarried = true;
    }
    return best.decoded[0];
}

// UCB tree search over own actions with iterative widening; opponent turns
// are filled by random sampling during descent, leaves are valued by the
// value function over the root-to-leaf path plus a random rollout. Rewards
// are normalized to [0,1] with a running min-max kept at the root.
inline Action act_mcts(const GameState& s, const MCTSConfig& cfg,
                       const ValueFunction& vf, BudgetMeter& meter, Rng& rng) {
    struct Node {
        std::vector<std::pair<Action, std::unique_ptr<Node>>> children;
        int visits = 0;
        double valueSum = 0.0;
    };
    auto widening_cap = [&](int visits) {
        return static_cast<int>(std::ceil(
            cfg.wideningBase * std::pow(std::max(visits, 1),
                                        cfg.wideningExponent)));
    };

    Node root;
    int me = s.currentPlayer;
    double lo = 0.0, hi = 0.0;
    bool haveRange = false;

    while (!meter.empty()) {
        GameState sim = clone_state(s);
        EventLogger logger;
        logger.owner = me;
        bool ef = vf.is_event_based();
        if (ef) sim.attach_logger(&logger);
        int baseScore = score(sim, me);

        std::vector<Node*> path{&root};
        Node* node = &root;
        int depth = 0;
        while (!sim.terminalFlag && !meter.empty() && depth < cfg.maxDepth) {
            int cap = widening_cap(node->visits);
            if (static_cast<int>(node->children.size()) < cap) {
                // Expansion: sample an action, with a few retries to avoid
                // duplicating an existing edge.
                Action a = sample_action(sim, rng);
                for (int attempt = 0; attempt < 4; ++attempt) {
                    bool dup = false;
                    for (const auto& [ea, _] : node->children)
                        if (ea == a) {
                            dup = true;
                            break;
                        }
                    if (!dup) break;
                    a = sample_action(sim, rng);
                }
                step(sim, a);
                meter.spend();
                node->children.emplace_back(std::move(a),
                                            std::make_unique<Node>());
                node = node->children.back().second.get();
                path.push_back(node);
                break;
            }
            // Selection by UCB1 over normalized means.
            Node* bestChild = nullptr;
            const Action* bestAction = nullptr;
            double bestScore = 0;
            for (const auto& [ea, child] : node->children) {
                double mean = child->visits > 0
                                  ? child->valueSum / child->visits
                                  : 0.0;
                double norm = (haveRange && hi > lo) ? (mean - lo) / (hi - lo)
                                                     : 0.5;
                double ucb = norm + cfg.explorationConstant *
                                        std::sqrt(std::log(node->visits + 1.0) /
                                                  std::max(child->visits, 1));
                if (!bestChild || ucb > bestScore) {
                    bestChild = child.get();
                    bestAction = &ea;
                    bestScore = ucb;
                }
            }
            Action a = *bestAction;
            if (!is_legal(sim, a)) a = sample_action(sim, rng); // open-loop repair
            step(sim, a);
            meter.spend();
            node = bestChild;
            path.push_back(node);
            ++depth;
            for (int o = 1; o < sim.params.numPlayers; ++o) {
                if (sim.terminalFlag || meter.empty()) break;
                step(sim, sample_action(sim, rng));
                meter.spend();
            }
        }

        for (int r = 0; r < cfg.rolloutLength; ++r) {
            if (sim.terminalFlag || meter.empty()) break;
            step(sim, sample_action(sim, rng));
            meter.spend();
        }

        double v = ef ? vf.ef().value(logger.buffer, me)
                      : static_cast<double>(score(sim, me) - baseScore);
        if (!haveRange) {
            lo = hi = v;
            haveRange = true;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (Node* n : path) {
            ++n->visits;
            n->valueSum += v;
        }
    }

    const Action* best = nullptr;
    int bestVisits = -1;
    for (const auto& [a, child] : root.children)
        if (child->visits > bestVisits) {
            best = &a;
            bestVisits = child->visits;
        }
    return best ? *best : Action{};
}

} // namespace r2

#endif
