#ifndef R2_NTBEA_HPP
#define R2_NTBEA_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "r2/rng.hpp"

namespace r2 {

// Discrete hyperparameter space: ordered dimensions, each an ordered list of
// values. Candidates are vectors of value indices.
struct SearchDim {
    std::string name;
    std::vector<double> values;
};

struct SearchSpace {
    std::vector<SearchDim> dims;

    int size() const { return static_cast<int>(dims.size()); }

    double total_size() const {
        double t = 1;
        for (const auto& d : dims) t *= static_cast<double>(d.values.size());
        return t;
    }

    void validate() const {
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (dims[i].values.size() < 2)
                throw std::invalid_argument("search dim needs >= 2 values: " +
                                            dims[i].name);
            for (std::size_t j = 0; j < i; ++j)
                if (dims[j].name == dims[i].name)
                    throw std::invalid_argument("duplicate dim name: " +
                                                dims[i].name);
        }
    }

    std::vector<int> random_candidate(Rng& rng) const {
        std::vector<int> c(dims.size());
        for (std::size_t i = 0; i < dims.size(); ++i)
            c[i] = rng.next_int(static_cast<int>(dims[i].values.size()));
        return c;
    }
};

inline SearchSpace combine_spaces(const SearchSpace& a, const SearchSpace& b) {
    SearchSpace out;
    out.dims = a.dims;
    out.dims.insert(out.dims.end(), b.dims.begin(), b.dims.end());
    for (const auto& da : a.dims)
        for (const auto& db : b.dims)
            if (da.name == db.name)
                throw std::invalid_argument("dimension name clash: " + da.name);
    return out;
}

using Candidate = std::vector<int>;

enum class TupleScheme { OneTwoN, OneN, All };

struct NTBEAConfig {
    double k = 1.0;            // exploration constant
    double epsilon = 0.7;      // probability that only the forced dim mutates
    int neighborhoodSize = 50;
    TupleScheme tupleScheme = TupleScheme::OneTwoN;
    long budget = 100;         // fitness evaluations
};

// Bandit statistics over tuples of dimensions: every tuple keeps a table from
// value patterns to (count, mean, sum of squares).
class NTupleModel {
public:
    struct PatternStats {
        long count = 0;
        double mean = 0.0;
        double sumSquares = 0.0;
    };

    NTupleModel() = default;
    NTupleModel(const SearchSpace& space, TupleScheme scheme) {
        int n = space.size();
        if (scheme == TupleScheme::OneTwoN || scheme == TupleScheme::OneN ||
            scheme == TupleScheme::All)
            for (int i = 0; i < n; ++i) tuples_.push_back({i});
        if (scheme == TupleScheme::OneTwoN || scheme == TupleScheme::All)
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) tuples_.push_back({i, j});
        if (n > 1) {
            std::vector<int> all(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
            tuples_.push_back(std::move(all));
        }
        tables_.resize(tuples_.size());
    }

    void add_evaluation(const Candidate& c, double fitness) {
        ++totalEvaluations_;
        for (std::size_t t = 0; t < tuples_.size(); ++t) {
            PatternStats& st = tables_[t][pattern_key(t, c)];
            ++st.count;
            st.mean += (fitness - st.mean) / static_cast<double>(st.count);
            st.sumSquares += fitness * fitness;
        }
    }

    long total_evaluations() const { return totalEvaluations_; }
    std::size_t tuple_count() const { return tuples_.size(); }
    const std::vector<int>& tuple_dims(std::size_t t) const { return tuples_[t]; }

    const PatternStats* stats(std::size_t t, const Candidate& c) const {
        auto it = tables_[t].find(pattern_key(t, c));
        return it == tables_[t].end() ? nullptr : &it->second;
    }

    // UCB estimate: the model mean estimate plus k times the exploration
    // estimate, where the exploration estimate is the mean over tuples of
    // sqrt(ln(N+1) / (n + eps)) and unvisited patterns contribute the
    // term at n = 0. The count epsilon is deliberately O(1): a tiny
    // epsilon would make the unvisited bonus orders of magnitude larger
    // than any visited bonus, so neighbor selection would chase unvisited
    // patterns forever and never exploit the means.
    static constexpr double kCountEpsilon = 0.5;

    double exploration_estimate(const Candidate& c) const {
        if (tuples_.empty()) return 0.0;
        double logTerm = std::log(static_cast<double>(totalEvaluations_) + 1.0);
        double acc = 0.0;
        for (std::size_t t = 0; t < tuples_.size(); ++t) {
            const PatternStats* st = stats(t, c);
            double n = st ? static_cast<double>(st->count) : 0.0;
            acc += std::sqrt(logTerm / (n + kCountEpsilon));
        }
        return acc / static_cast<double>(tuples_.size());
    }

    double ucb_estimate(const Candidate& c, double k) const {
        return mean_estimate(c) + k * exploration_estimate(c);
    }

    // Model mean: count-weighted average of the pattern means over the
    // tuples that have data for this candidate. Weighting by observation
    // count keeps estimates comparable between evaluated and unevaluated
    // candidates — an unweighted average lets a single self-observation of
    // the full N-tuple (whose mean is the candidate's own fitness) dominate
    // and pins the recommendation to the evaluated trajectory. Unvisited
    // patterns are skipped; zero if nothing is visited.
    double mean_estimate(const Candidate& c) const {
        double acc = 0.0;
        double weight = 0.0;
        for (std::size_t t = 0; t < tuples_.size(); ++t) {
            const PatternStats* st = stats(t, c);
            if (!st) continue;
            double n = static_cast<double>(st->count);
            acc += st->mean * n;
            weight += n;
        }
        return weight == 0.0 ? 0.0 : acc / weight;
    }

private:
    std::string pattern_key(std::size_t t, const Candidate& c) const {
        std::string key;
        key.reserve(tuples_[t].size() * 2);
        for (int d : tuples_[t]) {
            int v = c[static_cast<std::size_t>(d)];
            key.push_back(static_cast<char>('a' + (v & 0x0f)));
            key.push_back(static_cast<char>('a' + ((v >> 4) & 0x0f)));
        }
        return key;
    }

    std::vector<std::vector<int>> tuples_;
    std::vector<std::unordered_map<std::string, PatternStats>> tables_;
    long totalEvaluations_ = 0;
};

// Neighborhood mutation: one uniformly chosen dimension is always re-drawn to
// a different value; each other dimension is independently re-drawn with a
// probability calibrated so epsilon is the chance that only the forced
// dimension mutates.
inline Candidate mutate_neighbor(const Candidate& c, const SearchSpace& space,
                                 double epsilon, Rng& rng) {
    Candidate out = c;
    int n = space.size();
    auto redraw = [&](int d) {
        int options = static_cast<int>(space.dims[static_cast<std::size_t>(d)].values.size());
        int v = rng.next_int(options - 1);
        if (v >= out[static_cast<std::size_t>(d)]) ++v;
        out[static_cast<std::size_t>(d)] = v;
    };
    int forced = rng.next_int(n);
    redraw(forced);
    if (n > 1) {
        double pOther = 1.0 - std::pow(epsilon, 1.0 / (n - 1));
        for (int d = 0; d < n; ++d)
            if (d != forced && rng.next_bool(pOther)) redraw(d);
    }
    return out;
}

// Additive least-squares fit of the fitness surface from the model's
// bandit tables: fitness(c) ~ sum over dimensions of theta[d][c[d]].
// The per-pattern noise of raw 1-tuple means comes from whatever values the
// *other* dimensions happened to take in those samples; solving the additive
// normal equations removes that cross-dimension variance entirely (exactly,
// on a separable landscape). The equations only need per-value counts and
// fitness sums (1-tuple tables) and pair co-occurrence counts (2-tuple
// tables), so the fit is computed from the model alone, by Gauss-Seidel
// sweeps. Where a pair table is absent the co-occurrence counts are
// approximated as independent. Values never sampled keep theta = 0.
inline std::vector<std::vector<double>> additive_fit(const NTupleModel& model,
                                                     const SearchSpace& space) {
    int nd = space.size();
    std::vector<int> oneTuple(static_cast<std::size_t>(nd), -1);
    std::vector<std::vector<int>> pairTuple(
        static_cast<std::size_t>(nd), std::vector<int>(static_cast<std::size_t>(nd), -1));
    for (std::size_t t = 0; t < model.tuple_count(); ++t) {
        const std::vector<int>& dims = model.tuple_dims(t);
        if (dims.size() == 1) {
            oneTuple[static_cast<std::size_t>(dims[0])] = static_cast<int>(t);
        } else if (dims.size() == 2) {
            pairTuple[static_cast<std::size_t>(dims[0])][static_cast<std::size_t>(dims[1])] =
                static_cast<int>(t);
            pairTuple[static_cast<std::size_t>(dims[1])][static_cast<std::size_t>(dims[0])] =
                static_cast<int>(t);
        }
    }

    std::vector<std::vector<double>> theta(static_cast<std::size_t>(nd));
    for (int d = 0; d < nd; ++d)
        theta[static_cast<std::size_t>(d)].assign(
            space.dims[static_cast<std::size_t>(d)].values.size(), 0.0);
    if (model.total_evaluations() == 0) return theta;

    double totalN = static_cast<double>(model.total_evaluations());
    Candidate key(static_cast<std::size_t>(nd), 0);
    for (int iter = 0; iter < 30; ++iter) {
        for (int d = 0; d < nd; ++d) {
            if (oneTuple[static_cast<std::size_t>(d)] < 0) continue;
            int valuesD = static_cast<int>(space.dims[static_cast<std::size_t>(d)].values.size());
            for (int v = 0; v < valuesD; ++v) {
                std::fill(key.begin(), key.end(), 0);
                key[static_cast<std::size_t>(d)] = v;
                const NTupleModel::PatternStats* own = model.stats(
                    static_cast<std::size_t>(oneTuple[static_cast<std::size_t>(d)]), key);
                if (!own) continue;
                double n = static_cast<double>(own->count);
                double cross = 0.0;
                for (int e = 0; e < nd; ++e) {
                    if (e == d) continue;
                    int pt = pairTuple[static_cast<std::size_t>(d)][static_cast<std::size_t>(e)];
                    int valuesE = static_cast<int>(
                        space.dims[static_cast<std::size_t>(e)].values.size());
                    for (int u = 0; u < valuesE; ++u) {
                        double nPair = 0.0;
                        if (pt >= 0) {
                            key[static_cast<std::size_t>(e)] = u;
                            const NTupleModel::PatternStats* p =
                                model.stats(static_cast<std::size_t>(pt), key);
                            key[static_cast<std::size_t>(e)] = 0;
                            if (p) nPair = static_cast<double>(p->count);
                        } else if (oneTuple[static_cast<std::size_t>(e)] >= 0) {
                            Candidate keyE(static_cast<std::size_t>(nd), 0);
                            keyE[static_cast<std::size_t>(e)] = u;
                            const NTupleModel::PatternStats* q = model.stats(
                                static_cast<std::size_t>(oneTuple[static_cast<std::size_t>(e)]),
                                keyE);
                            if (q) nPair = n * static_cast<double>(q->count) / totalN;
                        }
                        if (nPair > 0.0)
                            cross += nPair * theta[static_cast<std::size_t>(e)][static_cast<std::size_t>(u)];
                    }
                }
                theta[static_cast<std::size_t>(d)][static_cast<std::size_t>(v)] =
                    (own->mean * n - cross) / n;
            }
        }
    }
    return theta;
}

struct NTBEAResult {
    Candidate best;
    double bestMeanEstimate = 0.0;
    NTupleModel model;
    // tuning log, one row per fitness evaluation
    std::vector<std::pair<Candidate, double>> evaluations;
};

// Classic NTBEA loop: evaluate the current candidate once, feed the model,
// pick the UCB-best of `neighborhoodSize` mutated neighbors, repeat. The
// recommendation is the evaluated candidate with the best model mean, not
// the luckiest single evaluation.
inline NTBEAResult ntbea_optimize(
    const SearchSpace& space,
    const std::function<double(const Candidate&, Rng&)>& fitness,
    const NTBEAConfig& cfg, std::uint64_t seed) {
    space.validate();
    if (cfg.budget < 1) throw std::invalid_argument("budget < 1");

    Rng rng(seed);
    NTBEAResult result;
    result.model = NTupleModel(space, cfg.tupleScheme);
    std::vector<Candidate> evaluated;

    Candidate current = space.random_candidate(rng);
    for (long it = 0; it < cfg.budget; ++it) {
        double f = fitness(current, rng);
        result.model.add_evaluation(current, f);
        result.evaluations.emplace_back(current, f);
        evaluated.push_back(current);

        if (it + 1 >= cfg.budget) break;
        Candidate bestNeighbor;
        double bestUcb = 0;
        for (int i = 0; i < cfg.neighborhoodSize; ++i) {
            Candidate nb = mutate_neighbor(current, space, cfg.epsilon, rng);
            double u = result.model.ucb_estimate(nb, cfg.k);
            if (bestNeighbor.empty() || u > bestUcb) {
                bestNeighbor = std::move(nb);
                bestUcb = u;
            }
        }
        current = std::move(bestNeighbor);
    }

    result.best = evaluated.front();
    result.bestMeanEstimate = result.model.mean_estimate(result.best);
    for (const Candidate& c : evaluated) {
        double m = result.model.mean_estimate(c);
        if (m > result.bestMeanEstimate) {
            result.bestMeanEstimate = m;
            result.best = c;
        }
    }

    // The recommendation is the candidate the model rates best, which need
    // not be one the trajectory happened to evaluate. Rate candidates by
    // the additive fit of the model tables (see additive_fit), which cancels
    // the cross-dimension sampling noise that raw pattern means carry.
    // Starting from the best evaluated candidate, hill-climb one dimension
    // at a time, but accept a move only when its gain clears a significance
    // bar proportional to the standard error of the compared per-value
    // effects, derived from the fit's residual variance: where
    // the landscape is additive the residuals (and the bar) are tiny and the
    // climb runs to the fit's optimum, while on interaction-driven
    // landscapes the additive fit explains little, the bar is high, and the
    // recommendation stays with the evaluated candidate whose full tuple
    // statistics already capture the interaction. Dims and values are
    // scanned in order, so the climb is deterministic.
    const NTupleModel& model = result.model;
    std::vector<std::vector<double>> theta = additive_fit(model, space);
    int nd = space.size();
    std::vector<int> oneT(static_cast<std::size_t>(nd), -1);
    std::vector<std::vector<int>> pairT(
        static_cast<std::size_t>(nd), std::vector<int>(static_cast<std::size_t>(nd), -1));
    for (std::size_t t = 0; t < model.tuple_count(); ++t) {
        const std::vector<int>& dims = model.tuple_dims(t);
        if (dims.size() == 1) {
            oneT[static_cast<std::size_t>(dims[0])] = static_cast<int>(t);
        } else if (dims.size() == 2) {
            pairT[static_cast<std::size_t>(dims[0])][static_cast<std::size_t>(dims[1])] =
                static_cast<int>(t);
            pairT[static_cast<std::size_t>(dims[1])][static_cast<std::size_t>(dims[0])] =
                static_cast<int>(t);
        }
    }

    // Residual sum of squares of the additive fit, computed from the tables:
    // sum(f^2) comes from any 1-tuple's sumSquares, the fit/fitness cross
    // term from per-value counts and means, and sum(prediction^2) from pair
    // co-occurrence counts (independence-approximated if absent).
    double totalN = static_cast<double>(model.total_evaluations());
    double sumF2 = 0.0, crossFP = 0.0, pred2 = 0.0;
    std::vector<std::vector<double>> counts(static_cast<std::size_t>(nd));
    for (int d = 0; d < nd; ++d) {
        std::size_t valuesD = space.dims[static_cast<std::size_t>(d)].values.size();
        counts[static_cast<std::size_t>(d)].assign(valuesD, 0.0);
        for (std::size_t v = 0; v < valuesD; ++v) {
            Candidate key(static_cast<std::size_t>(nd), 0);
            key[static_cast<std::size_t>(d)] = static_cast<int>(v);
            const NTupleModel::PatternStats* st =
                oneT[static_cast<std::size_t>(d)] >= 0
                    ? model.stats(static_cast<std::size_t>(oneT[static_cast<std::size_t>(d)]), key)
                    : nullptr;
            if (!st) continue;
            double n = static_cast<double>(st->count);
            counts[static_cast<std::size_t>(d)][v] = n;
            if (d == 0) sumF2 += st->sumSquares;
            crossFP += theta[static_cast<std::size_t>(d)][v] * n * st->mean;
            pred2 += n * theta[static_cast<std::size_t>(d)][v] * theta[static_cast<std::size_t>(d)][v];
        }
    }
    for (int d = 0; d < nd; ++d) {
        for (int e = d + 1; e < nd; ++e) {
            std::size_t valuesD = space.dims[static_cast<std::size_t>(d)].values.size();
            std::size_t valuesE = space.dims[static_cast<std::size_t>(e)].values.size();
            for (std::size_t v = 0; v < valuesD; ++v) {
                for (std::size_t u = 0; u < valuesE; ++u) {
                    double n = 0.0;
                    int pt = pairT[static_cast<std::size_t>(d)][static_cast<std::size_t>(e)];
                    if (pt >= 0) {
                        Candidate key(static_cast<std::size_t>(nd), 0);
                        key[static_cast<std::size_t>(d)] = static_cast<int>(v);
                        key[static_cast<std::size_t>(e)] = static_cast<int>(u);
                        const NTupleModel::PatternStats* st =
                            model.stats(static_cast<std::size_t>(pt), key);
                        if (st) n = static_cast<double>(st->count);
                    } else {
                        n = counts[static_cast<std::size_t>(d)][v] *
                            counts[static_cast<std::size_t>(e)][u] / totalN;
                    }
                    pred2 += 2.0 * n * theta[static_cast<std::size_t>(d)][v] *
                             theta[static_cast<std::size_t>(e)][u];
                }
            }
        }
    }
    double rss = sumF2 - 2.0 * crossFP + pred2;
    if (rss < 0.0) rss = 0.0;
    double residualSd = std::sqrt(rss / totalN);

    auto fitValue = [&](const Candidate& c) {
        double s = 0.0;
        for (std::size_t d = 0; d < c.size(); ++d)
            s += theta[d][static_cast<std::size_t>(c[d])];
        return s;
    };
    constexpr double kSignificance = 0.5;
    double bestFit = fitValue(result.best);
    bool improved = true;
    while (improved) {
        improved = false;
        for (int d = 0; d < nd; ++d) {
            std::size_t valuesD = space.dims[static_cast<std::size_t>(d)].values.size();
            Candidate probe = result.best;
            for (std::size_t v = 0; v < valuesD; ++v) {
                if (static_cast<int>(v) == result.best[static_cast<std::size_t>(d)]) continue;
                double nOld = counts[static_cast<std::size_t>(d)]
                                    [static_cast<std::size_t>(result.best[static_cast<std::size_t>(d)])];
                double nNew = counts[static_cast<std::size_t>(d)][v];
                if (nNew <= 0.0) continue; // never move to a value with no data
                double se = residualSd *
                            std::sqrt(1.0 / std::max(nOld, 1.0) + 1.0 / nNew);
                probe[static_cast<std::size_t>(d)] = static_cast<int>(v);
                double m = fitValue(probe);
                if (m > bestFit + kSignificance * se) {
                    bestFit = m;
                    result.best = probe;
                    improved = true;
                }
            }
        }
    }
    result.bestMeanEstimate = bestFit;
    return result;
}

} // namespace r2

#endif
