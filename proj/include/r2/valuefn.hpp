#ifndef R2_VALUEFN_HPP
#define R2_VALUEFN_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "r2/engine.hpp"
#include "r2/events.hpp"
#include "r2/rng.hpp"
#include "r2/state.hpp"

namespace r2 {

// Per-turn simulation allowance; one unit per forward-model action applied.
struct BudgetMeter {
    long remaining = 0;
    long spent = 0;
    bool exhaustedFlag = false;

    explicit BudgetMeter(long budget = 0) : remaining(budget) {}

    bool empty() const { return remaining <= 0; }
    void spend() {
        --remaining;
        ++spent;
        if (remaining <= 0) exhaustedFlag = true;
    }
};

struct BudgetExhausted : std::runtime_error {
    BudgetExhausted() : std::runtime_error("simulation budget exhausted") {}
};

enum class MixerKind { Linear, Polynomial };

struct Mixer {
    MixerKind kind = MixerKind::Linear;
    int degree = 1; // polynomial only
    int featureCount = 0;
};

// C(n+d-1, d), the number of degree-d monomials over n variables.
inline long long multiset_coefficient(int n, int d) {
    long long r = 1;
    for (int i = 1; i <= d; ++i) r = r * (n + i - 1) / i;
    return r;
}

inline long long required_weights(const Mixer& m) {
    if (m.featureCount < 1) throw std::invalid_argument("featureCount < 1");
    if (m.kind == MixerKind::Linear) return m.featureCount;
    if (m.degree < 1) throw std::invalid_argument("degree < 1");
    return multiset_coefficient(m.featureCount, m.degree);
}

// All non-decreasing index tuples of length d over [0, n), lexicographic.
// This ordering is the weight-indexing contract for weight files.
inline std::vector<std::vector<int>> enumerate_monomials(int n, int d) {
    if (n < 1 || d < 1) throw std::invalid_argument("enumerate_monomials");
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(d), 0);
    while (true) {
        out.push_back(cur);
        int i = d - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - 1) --i;
        if (i < 0) break;
        int v = cur[static_cast<std::size_t>(i)] + 1;
        for (int j = i; j < d; ++j) cur[static_cast<std::size_t>(j)] = v;
    }
    return out;
}

inline double eval_mixer(const Mixer& m, std::span<const double> w,
                         std::span<const double> theta) {
    if (static_cast<int>(theta.size()) != m.featureCount)
        throw std::invalid_argument("feature vector length mismatch");
    if (static_cast<long long>(w.size()) != required_weights(m))
        throw std::invalid_argument("weight vector length mismatch");
    if (m.kind == MixerKind::Linear) {
        double v = 0;
        for (std::size_t i = 0; i < w.size(); ++i) v += w[i] * theta[i];
        return v;
    }
    double v = 0;
    std::size_t i = 0;
    for (const auto& mono : enumerate_monomials(m.featureCount, m.degree)) {
        double term = w[i++];
        for (int idx : mono) term *= theta[static_cast<std::size_t>(idx)];
        v += term;
    }
    return v;
}

// h_w(E) = f_w(sigma(E)): type mapping, mixer and weights bundled together.
// Immutable after construction; safe to share across evaluations.
class EventValueFunction {
public:
    EventValueFunction(TypeMapping mapping, Mixer mixer,
                       std::vector<double> weights)
        : mapping_(std::move(mapping)), mixer_(mixer),
          weights_(std::move(weights)) {
        if (mixer_.featureCount != mapping_.groupCount)
            throw std::invalid_argument("mixer/mapping feature count mismatch");
        if (static_cast<long long>(weights_.size()) != required_weights(mixer_))
            throw std::invalid_argument("weight count mismatch");
        if (mixer_.kind == MixerKind::Polynomial)
            monomials_ = enumerate_monomials(mixer_.featureCount, mixer_.degree);
    }

    const TypeMapping& mapping() const { return mapping_; }
    const Mixer& mixer() const { return mixer_; }
    const std::vector<double>& weights() const { return weights_; }

    double value(std::span<const double> theta) const {
        if (mixer_.kind == MixerKind::Linear) {
            double v = 0;
            for (std::size_t i = 0; i < weights_.size(); ++i)
                v += weights_[i] * theta[i];
            return v;
        }
        double v = 0;
        for (std::size_t i = 0; i < monomials_.size(); ++i) {
            double term = weights_[i];
            for (int idx : monomials_[i]) term *= theta[static_cast<std::size_t>(idx)];
            v += term;
        }
        return v;
    }

    double value(const std::vector<Event>& events, int player) const {
        std::vector<double> theta = synthesize(events, player, mapping_);
        return value(theta);
    }

private:
    TypeMapping mapping_;
    Mixer mixer_;
    std::vector<double> weights_;
    std::vector<std::vector<int>> monomials_;
};

// Score-delta baseline: prestige points gained over the evaluated sequence.
struct ScoreValueFunction {};

// Either the score baseline or an event-value function.
class ValueFunction {
public:
    ValueFunction() = default; // score baseline
    ValueFunction(ScoreValueFunction) {}
    explicit ValueFunction(std::shared_ptr<const EventValueFunction> ef)
        : ef_(std::move(ef)) {}

    bool is_event_based() const { return ef_ != nullptr; }
    const EventValueFunction& ef() const { return *ef_; }

private:
    std::shared_ptr<const EventValueFunction> ef_;
};

enum class OpponentModel { Random, Passing };

struct EvalResult {
    double value = 0.0;
    std::vector<Action> repaired; // the sequence as actually played
    bool budgetExhausted = false;
    bool reachedTerminal = false;
};

// Plays `seq` for the player to move on a clone of `s`, filling opponent
// turns from the opponent model, and values the resulting event list (or
// score delta). Actions illegal at their point of play are replaced by fresh
// legal samples; the repaired sequence is reported back. `discount` weights
// the value increment after own action i by discount^i.
inline EvalResult evaluate_sequence(const GameState& s,
                                    std::span<const Action> seq,
                                    const ValueFunction& vf,
                                    OpponentModel opponent, BudgetMeter& meter,
                                    Rng& rng, double discount = 1.0) {
    if (s.terminalFlag)
        throw std::logic_error("evaluate_sequence on terminal state");
    if (meter.empty()) throw BudgetExhausted();

    GameState sim = clone_state(s);
    int player = sim.currentPlayer;
    EventLogger logger;
    logger.owner = player;
    bool ef = vf.is_event_based();
    if (ef) sim.attach_logger(&logger);

    EvalResult result;
    result.repaired.reserve(seq.size());
    double prev = 0.0;
    double weight = 1.0;
    double total = 0.0;
    int baseScore = score(sim, player);

    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (sim.terminalFlag) {
            result.reachedTerminal = true;
            break;
        }
        if (meter.empty()) {
            result.budgetExhausted = true;
            break;
        }
        Action a = seq[i];
        if (!is_legal(sim, a)) a = sample_action(sim, rng);
        step(sim, a);
        meter.spend();
        result.repaired.push_back(std::move(a));

        double cum = ef ? vf.ef().value(logger.buffer, player)
                        : static_cast<double>(score(sim, player) - baseScore);
        total += weight * (cum - prev);
        prev = cum;
        weight *= discount;

        if (i + 1 < seq.size()) {
            for (int o = 1; o < sim.params.numPlayers; ++o) {
                if (sim.terminalFlag) break;
                if (meter.empty()) {
                    result.budgetExhausted = true;
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
    result.reachedTerminal = result.reachedTerminal || sim.terminalFlag;
    result.value = total;
    return result;
}

} // namespace r2

#endif
