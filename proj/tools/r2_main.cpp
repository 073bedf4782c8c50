// Experiment runner. Subcommands: play, validate, roundrobin, multi, tune.
// Every run takes a JSON spec, a master seed and an output directory; reruns
// with the same spec and seed produce byte-identical CSVs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "r2/harness.hpp"

namespace fs = std::filesystem;
using namespace r2;

namespace {

json load_json(const std::string& path) {
    auto f = detail::open_or_throw(path);
    return json::parse(f);
}

// Agent entries in specs are either inline objects or paths to spec files.
AgentSpec resolve_agent(const json& j) {
    if (j.is_string()) return load_agent_spec(j.get<std::string>());
    return agent_spec_from_json(j);
}

GameSetup setup_from_json(const json& j) {
    GameSetup setup;
    if (j.contains("params")) {
        const json& p = j.at("params");
        setup.params = p.is_string() ? params_from_json(load_json(p.get<std::string>()))
                                     : params_from_json(p);
    }
    setup.cards = load_cards_csv(j.at("cards").get<std::string>(),
                                 setup.params.numSuits);
    setup.nobles = load_nobles_csv(j.at("nobles").get<std::string>(),
                                   setup.params.numSuits);
    setup.budget = j.value("budget", 1000L);
    setup.turnCap = j.value("turn_cap", 500);
    return setup;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

std::string csv_string(const std::function<void(std::ostream&)>& writer) {
    std::ostringstream ss;
    writer(ss);
    return ss.str();
}

void report_rate(const char* label, double rate, double ci, long capped) {
    std::cout << label << ": " << format4(rate * 100.0) << "% +/- "
              << format4(ci * 100.0) << "%";
    if (capped > 0) std::cout << " (" << capped << " capped games)";
    std::cout << "\n";
}

int cmd_play(const json& spec, const fs::path& out, std::uint64_t seed,
             int jobs) {
    GameSetup setup = setup_from_json(spec);
    std::vector<AgentFactory> factories;
    for (const json& a : spec.at("agents"))
        factories.push_back(make_agent_factory(resolve_agent(a)));
    if (static_cast<int>(factories.size()) != setup.params.numPlayers)
        throw ConfigError("agent count does not match numPlayers");
    long n = spec.value("games", 1L);

    std::vector<MatchResult> games(static_cast<std::size_t>(n));
    parallel_for(static_cast<int>(n), jobs, [&](int g) {
        std::vector<std::unique_ptr<Agent>> agents;
        std::vector<Agent*> seats;
        for (const auto& f : factories) {
            agents.push_back(f());
            seats.push_back(agents.back().get());
        }
        games[static_cast<std::size_t>(g)] = run_game(
            seats, setup, derive_seed(seed, static_cast<std::uint64_t>(g)));
    });
    write_file(out / "results.csv",
               csv_string([&](std::ostream& s) { write_results_csv(s, games); }));
    std::cout << "played " << n << " game(s); results.csv written\n";
    return 0;
}

int cmd_validate(const json& spec, const fs::path& out, std::uint64_t seed,
                 int jobs) {
    GameSetup setup = setup_from_json(spec);
    AgentFactory candidate = make_agent_factory(resolve_agent(spec.at("candidate")));
    AgentFactory opponent = make_agent_factory(resolve_agent(spec.at("opponent")));
    long n = spec.value("games", 100L);
    HeadToHeadResult h = head_to_head(candidate, opponent, setup, n, seed, jobs);
    write_file(out / "results.csv", csv_string([&](std::ostream& s) {
                   write_results_csv(s, h.games);
               }));
    std::cout << "wins " << h.wins << ", ties " << h.ties << ", losses "
              << h.losses << "\n";
    report_rate("win rate", h.winRate, h.ciHalfWidth, h.cappedGames);
    return 0;
}

int cmd_roundrobin(const json& spec, const fs::path& out, std::uint64_t seed,
                   int jobs) {
    GameSetup setup = setup_from_json(spec);
    std::vector<AgentFactory> factories;
    std::vector<std::string> names;
    for (const json& a : spec.at("agents")) {
        AgentSpec as = resolve_agent(a);
        factories.push_back(make_agent_factory(as));
        names.push_back(as.kind);
    }
    if (spec.contains("names"))
        names = spec.at("names").get<std::vector<std::string>>();
    if (names.size() != factories.size())
        throw ConfigError("names/agents length mismatch");
    long perPair = spec.value("games_per_pair", 100L);
    WinRateTable table =
        round_robin(factories, names, setup, perPair, seed, jobs);
    write_file(out / "matrix.csv", csv_string([&](std::ostream& s) {
                   write_matrix_csv(s, table);
               }));
    for (std::size_t i = 0; i < names.size(); ++i)
        std::cout << names[i] << " avg " << format4(table.average[i]) << "%\n";
    return 0;
}

int cmd_multi(const json& spec, const fs::path& out, std::uint64_t seed,
              int jobs) {
    GameSetup setup = setup_from_json(spec);
    AgentFactory candidate = make_agent_factory(resolve_agent(spec.at("candidate")));
    AgentFactory opponent = make_agent_factory(resolve_agent(spec.at("opponent")));
    long n = spec.value("games", 100L);
    MultiOpponentResult m =
        multi_opponent(candidate, opponent, setup, n, seed, jobs);
    write_file(out / "results.csv", csv_string([&](std::ostream& s) {
                   write_results_csv(s, m.games);
               }));
    report_rate("win rate", m.winRate, m.ciHalfWidth, m.cappedGames);
    std::cout << "uniform target: " << format4(m.uniformTarget * 100.0)
              << "%\n";
    if (spec.contains("baseline_win_rate")) {
        double base = spec.at("baseline_win_rate").get<double>();
        std::cout << "delta vs 2-player baseline: "
                  << format4(m.winRate * 100.0 - base) << "\n";
    }
    return 0;
}

int cmd_tune(const json& spec, const fs::path& out, std::uint64_t seed,
             int jobs) {
    TuneSetup setup;
    setup.game = setup_from_json(spec);
    setup.opponent = resolve_agent(spec.at("opponent"));
    if (spec.contains("ntbea")) {
        const json& nj = spec.at("ntbea");
        setup.ntbea.budget = nj.value("budget", setup.ntbea.budget);
        setup.ntbea.k = nj.value("k", setup.ntbea.k);
        setup.ntbea.epsilon = nj.value("epsilon", setup.ntbea.epsilon);
        setup.ntbea.neighborhoodSize =
            nj.value("neighborhood", setup.ntbea.neighborhoodSize);
    }
    if (spec.contains("event_function")) {
        const json& ej = spec.at("event_function");
        setup.useEventFunction = true;
        setup.mapping = mapping_from_json(ej.at("mapping"));
        std::string kind = ej.at("mixer").at("kind").get<std::string>();
        setup.mixer.kind =
            kind == "polynomial" ? MixerKind::Polynomial : MixerKind::Linear;
        setup.mixer.degree = ej.at("mixer").value("degree", 1);
        setup.mixer.featureCount = setup.mapping.groupCount;
    }
    int repetitions = spec.value("repetitions", 1);
    long validationGames = spec.value("validation_games", 0L);

    std::vector<TuneOutcome> outcomes(static_cast<std::size_t>(repetitions));
    parallel_for(repetitions, jobs, [&](int rep) {
        outcomes[static_cast<std::size_t>(rep)] = tune_bmrh(
            setup, derive_seed(seed, static_cast<std::uint64_t>(rep)));
    });
    std::cout << "search space: " << outcomes.front().space.size()
              << " dimensions, " << repetitions << " repetition(s), budget "
              << setup.ntbea.budget << " games each\n";

    // Pick the recommendation to freeze: validated win rate when asked for,
    // otherwise the first repetition.
    int pick = 0;
    std::vector<double> rates(static_cast<std::size_t>(repetitions), -1.0);
    if (validationGames > 0) {
        AgentFactory opponentFactory = make_agent_factory(setup.opponent);
        for (int rep = 0; rep < repetitions; ++rep) {
            const TuneOutcome& o = outcomes[static_cast<std::size_t>(rep)];
            AgentFactory tuned = [&setup, &o] {
                ValueFunction vf;
                if (setup.useEventFunction) {
                    Mixer mixer = setup.mixer;
                    mixer.featureCount = setup.mapping.groupCount;
                    vf = ValueFunction(std::make_shared<EventValueFunction>(
                        setup.mapping, mixer, o.bestWeights));
                }
                return std::make_unique<BmrhAgent>(o.bestConfig, vf);
            };
            HeadToHeadResult h = head_to_head(
                tuned, opponentFactory, setup.game, validationGames,
                derive_seed(seed, 5000 + static_cast<std::uint64_t>(rep)),
                jobs);
            rates[static_cast<std::size_t>(rep)] = h.winRate;
            std::cout << "repetition " << rep << " validation ";
            report_rate("win rate", h.winRate, h.ciHalfWidth, h.cappedGames);
            if (h.winRate > rates[static_cast<std::size_t>(pick)]) pick = rep;
        }
    }
    const TuneOutcome& chosen = outcomes[static_cast<std::size_t>(pick)];

    std::ostringstream tuning;
    tuning << "repetition,iteration,candidate,fitness\n";
    for (int rep = 0; rep < repetitions; ++rep) {
        const auto& evals = outcomes[static_cast<std::size_t>(rep)].evaluations;
        for (std::size_t i = 0; i < evals.size(); ++i) {
            tuning << rep << "," << i << ",";
            const Candidate& c = evals[i].first;
            for (std::size_t d = 0; d < c.size(); ++d) {
                if (d) tuning << ";";
                tuning << c[d];
            }
            tuning << "," << format4(evals[i].second) << "\n";
        }
    }
    write_file(out / "tuning.csv", tuning.str());

    AgentSpec tunedSpec;
    tunedSpec.kind = "BMRH";
    tunedSpec.hyperparameters = bmrh_config_to_json(chosen.bestConfig);
    if (setup.useEventFunction) {
        Mixer mixer = setup.mixer;
        mixer.featureCount = setup.mapping.groupCount;
        EventValueFunction ef(setup.mapping, mixer, chosen.bestWeights);
        tunedSpec.valueFunctionJson = ef_to_json(ef);
    } else {
        tunedSpec.valueFunctionJson = "score";
    }
    write_file(out / "agent.json", agent_spec_to_json(tunedSpec).dump(2) + "\n");
    std::cout << "tuned agent written to agent.json\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Splendor-like game engine experiment runner"};
    app.require_subcommand(1);

    std::string specPath, outDir = ".";
    std::uint64_t seed = 0;
    int jobs = 1;
    for (const char* name : {"play", "validate", "roundrobin", "multi", "tune"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--spec", specPath, "experiment spec (JSON)")->required();
        sub->add_option("--out", outDir, "output directory");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--jobs", jobs, "worker threads");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        json spec = load_json(specPath);
        fs::path out(outDir);
        fs::create_directories(out);
        std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "play") return cmd_play(spec, out, seed, jobs);
        if (cmd == "validate") return cmd_validate(spec, out, seed, jobs);
        if (cmd == "roundrobin") return cmd_roundrobin(spec, out, seed, jobs);
        if (cmd == "multi") return cmd_multi(spec, out, seed, jobs);
        if (cmd == "tune") return cmd_tune(spec, out, seed, jobs);
        std::cerr << "unknown subcommand\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
