#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "r2/ntbea.hpp"
#include "r2/io.hpp"

using namespace r2;

namespace {

SearchSpace tiny_space(int dims = 3, int valuesPerDim = 4) {
    SearchSpace s;
    for (int d = 0; d < dims; ++d) {
        SearchDim dim;
        dim.name = "d" + std::to_string(d);
        for (int v = 0; v < valuesPerDim; ++v)
            dim.values.push_back(static_cast<double>(v));
        s.dims.push_back(std::move(dim));
    }
    return s;
}

} // namespace

TEST_CASE("search space validation") {
    SearchSpace s = tiny_space();
    REQUIRE_NOTHROW(s.validate());
    REQUIRE(s.total_size() == 64.0);

    SearchSpace single = tiny_space(1, 1);
    REQUIRE_THROWS_AS(single.validate(), std::invalid_argument);

    SearchSpace dup = tiny_space(2);
    dup.dims[1].name = "d0";
    REQUIRE_THROWS_AS(dup.validate(), std::invalid_argument);
}

TEST_CASE("combine_spaces concatenates and rejects name clashes") {
    SearchSpace a = tiny_space(2);
    SearchSpace b = tiny_space(2);
    b.dims[0].name = "x0";
    b.dims[1].name = "x1";
    SearchSpace c = combine_spaces(a, b);
    REQUIRE(c.size() == 4);
    REQUIRE(c.dims[2].name == "x0");
    REQUIRE_THROWS_AS(combine_spaces(a, a), std::invalid_argument);
}

TEST_CASE("model builds 1-tuples, 2-tuples and the N-tuple") {
    SearchSpace s = tiny_space(4);
    NTupleModel m(s, TupleScheme::OneTwoN);
    // 4 singles + C(4,2)=6 pairs + 1 full tuple.
    REQUIRE(m.tuple_count() == 11);
    NTupleModel mN(s, TupleScheme::OneN);
    REQUIRE(mN.tuple_count() == 5);
}

TEST_CASE("pattern statistics track incremental means") {
    SearchSpace s = tiny_space(2);
    NTupleModel m(s, TupleScheme::OneTwoN);
    m.add_evaluation({0, 1}, 1.0);
    m.add_evaluation({0, 1}, 0.0);
    m.add_evaluation({0, 2}, 1.0);
    // d0=0 was seen 3 times with mean 2/3.
    const auto* st = m.stats(0, {0, 1});
    REQUIRE(st != nullptr);
    REQUIRE(st->count == 3);
    REQUIRE(st->mean == Catch::Approx(2.0 / 3.0));
    // The pair (0,1) was seen twice with mean 0.5.
    const auto* pair = m.stats(2, {0, 1});
    REQUIRE(pair->count == 2);
    REQUIRE(pair->mean == Catch::Approx(0.5));
    REQUIRE(m.stats(2, {3, 3}) == nullptr);
    REQUIRE(m.total_evaluations() == 3);
}

TEST_CASE("ucb estimate on a single observed pattern") {
    // One dimension, a single evaluation of 1.0: the visited value scores
    // mean 1 plus k*sqrt(ln(2)/(1+eps)); an unvisited value scores mean 0
    // plus the n=0 bonus k*sqrt(ln(2)/eps), with eps = 0.5.
    SearchSpace s = tiny_space(1, 4);
    // A 1-dim space has only the single 1-tuple.
    NTupleModel m(s, TupleScheme::OneTwoN);
    REQUIRE(m.tuple_count() == 1);
    m.add_evaluation({2}, 1.0);
    double eps = NTupleModel::kCountEpsilon;
    double expect = 1.0 + std::sqrt(std::log(2.0) / (1.0 + eps));
    REQUIRE(m.ucb_estimate({2}, 1.0) == Catch::Approx(expect));
    REQUIRE(m.mean_estimate({2}) == Catch::Approx(1.0));
    // An unvisited value has mean 0 and the larger n=0 exploration bonus.
    REQUIRE(m.ucb_estimate({0}, 1.0) ==
            Catch::Approx(std::sqrt(std::log(2.0) / eps)));
    REQUIRE(m.exploration_estimate({0}) > m.exploration_estimate({2}));
    REQUIRE(m.mean_estimate({0}) == 0.0);
}

TEST_CASE("mutate_neighbor always changes at least one dimension") {
    SearchSpace s = tiny_space(4);
    Rng rng(1);
    Candidate c{0, 1, 2, 3};
    for (int i = 0; i < 2000; ++i) {
        Candidate nb = mutate_neighbor(c, s, 0.7, rng);
        REQUIRE(nb.size() == c.size());
        int changed = 0;
        for (std::size_t d = 0; d < c.size(); ++d) {
            REQUIRE(nb[d] >= 0);
            REQUIRE(nb[d] < 4);
            if (nb[d] != c[d]) ++changed;
        }
        REQUIRE(changed >= 1);
    }
}

TEST_CASE("mutate_neighbor epsilon calibrates single-dimension moves") {
    // epsilon is the probability that exactly one dimension differs.
    SearchSpace s = tiny_space(5);
    Rng rng(2);
    Candidate c{0, 0, 0, 0, 0};
    int single = 0;
    const int trials = 40000;
    for (int i = 0; i < trials; ++i) {
        Candidate nb = mutate_neighbor(c, s, 0.7, rng);
        int changed = 0;
        for (std::size_t d = 0; d < c.size(); ++d)
            if (nb[d] != c[d]) ++changed;
        if (changed == 1) ++single;
    }
    double frac = static_cast<double>(single) / trials;
    REQUIRE(frac == Catch::Approx(0.7).margin(0.01));
}

TEST_CASE("optimizer recovers the best corner of a separable landscape") {
    // fitness = sum of values; optimum is all-max. Noisy via rng jitter.
    SearchSpace s = tiny_space(4, 3);
    auto fitness = [&](const Candidate& c, Rng& rng) {
        double f = 0;
        for (std::size_t d = 0; d < c.size(); ++d)
            f += s.dims[d].values[static_cast<std::size_t>(c[d])];
        return f / 8.0 + 0.05 * (rng.next_double() - 0.5);
    };
    NTBEAConfig cfg;
    cfg.budget = 300;
    NTBEAResult res = ntbea_optimize(s, fitness, cfg, 3);
    REQUIRE(res.evaluations.size() == 300);
    for (int v : res.best) REQUIRE(v == 2);
    REQUIRE(res.bestMeanEstimate > 0.8);
}

TEST_CASE("optimizer handles an interaction the 2-tuples must catch") {
    // XOR-style: good only when d0 == d1.
    SearchSpace s = tiny_space(2, 2);
    auto fitness = [](const Candidate& c, Rng& rng) {
        double base = c[0] == c[1] ? 1.0 : 0.0;
        return base + 0.1 * (rng.next_double() - 0.5);
    };
    NTBEAConfig cfg;
    cfg.budget = 200;
    NTBEAResult res = ntbea_optimize(s, fitness, cfg, 4);
    REQUIRE(res.best[0] == res.best[1]);
}

TEST_CASE("optimizer is deterministic per seed") {
    SearchSpace s = tiny_space(3, 3);
    auto fitness = [](const Candidate& c, Rng& rng) {
        return static_cast<double>(c[0]) + rng.next_double();
    };
    NTBEAConfig cfg;
    cfg.budget = 60;
    NTBEAResult a = ntbea_optimize(s, fitness, cfg, 9);
    NTBEAResult b = ntbea_optimize(s, fitness, cfg, 9);
    REQUIRE(a.best == b.best);
    REQUIRE(a.evaluations.size() == b.evaluations.size());
    for (std::size_t i = 0; i < a.evaluations.size(); ++i) {
        REQUIRE(a.evaluations[i].first == b.evaluations[i].first);
        REQUIRE(a.evaluations[i].second == b.evaluations[i].second);
    }
}

TEST_CASE("optimizer recommends by model mean, not by a lucky sample") {
    // One dimension; value 0 is usually better, value 1 occasionally spikes.
    SearchSpace s = tiny_space(1, 2);
    auto fitness = [](const Candidate& c, Rng& rng) {
        if (c[0] == 0) return 0.8 + 0.01 * rng.next_double();
        return rng.next_double() < 0.1 ? 1.0 : 0.0;
    };
    NTBEAConfig cfg;
    cfg.budget = 200;
    NTBEAResult res = ntbea_optimize(s, fitness, cfg, 11);
    REQUIRE(res.best == Candidate{0});
}

TEST_CASE("optimizer rejects a zero budget") {
    SearchSpace s = tiny_space(2);
    NTBEAConfig cfg;
    cfg.budget = 0;
    REQUIRE_THROWS_AS(
        ntbea_optimize(s, [](const Candidate&, Rng&) { return 0.0; }, cfg, 1),
        std::invalid_argument);
}

TEST_CASE("bmrh search space has the published ten dimensions") {
    SearchSpace s = bmrh_search_space();
    REQUIRE(s.size() == 10);
    REQUIRE_NOTHROW(s.validate());
    REQUIRE(s.dims[0].name == "sequence_length");
    REQUIRE(s.dims[0].values == std::vector<double>{1, 2, 3, 4, 5});
    REQUIRE(s.dims[1].values == std::vector<double>{1, 2, 5, 10, 20});
    double total = s.total_size();
    REQUIRE(total == 5 * 5 * 3 * 3 * 3 * 2 * 3 * 3 * 2 * 2);
}

TEST_CASE("weight grid spans [-1, 1] in 0.2 steps") {
    const auto& g = weight_grid();
    REQUIRE(g.size() == 11);
    REQUIRE(g.front() == -1.0);
    REQUIRE(g.back() == 1.0);
    for (std::size_t i = 1; i < g.size(); ++i)
        REQUIRE(g[i] - g[i - 1] == Catch::Approx(0.2));
    SearchSpace w = weights_search_space(5);
    REQUIRE(w.size() == 5);
    REQUIRE(w.dims[4].name == "w4");
}

TEST_CASE("candidate decode splits hyperparameters from weights") {
    SearchSpace space = combine_spaces(bmrh_search_space(),
                                       weights_search_space(5));
    Candidate c(15, 0);
    c[0] = 4;  // sequence_length = 5
    c[1] = 3;  // population_size = 10
    c[7] = 1;  // value_discount = 0.95
    c[10] = 10; // w0 = 1.0
    c[12] = 5;  // w2 = 0.0
    auto [cfg, weights] = decode_bmrh_candidate(space, c);
    REQUIRE(cfg.sequenceLength == 5);
    REQUIRE(cfg.populationSize == 10);
    REQUIRE(cfg.valueDiscount == Catch::Approx(0.95));
    REQUIRE(cfg.eliteCount == 1);
    REQUIRE(weights.size() == 5);
    REQUIRE(weights[0] == 1.0);
    REQUIRE(weights[2] == 0.0);
    REQUIRE(weights[1] == -1.0);
}

TEST_CASE("search space JSON round trip") {
    SearchSpace s = bmrh_search_space();
    json j = search_space_to_json(s);
    SearchSpace back = search_space_from_json(j);
    REQUIRE(back.size() == s.size());
    for (int d = 0; d < s.size(); ++d) {
        REQUIRE(back.dims[static_cast<std::size_t>(d)].name ==
                s.dims[static_cast<std::size_t>(d)].name);
        REQUIRE(back.dims[static_cast<std::size_t>(d)].values ==
                s.dims[static_cast<std::size_t>(d)].values);
    }
}
