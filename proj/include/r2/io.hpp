#ifndef R2_IO_HPP
#define R2_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "r2/agents.hpp"
#include "r2/engine.hpp"
#include "r2/ntbea.hpp"
#include "r2/state.hpp"
#include "r2/valuefn.hpp"

namespace r2 {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Deck / noble CSV files
// Deck:   tier,points,bonus,cost0,cost1,cost2,cost3,cost4
// Nobles: points,req0..req4
// Suit indices 0-4 are fixed by column order.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::vector<int>> read_csv_ints(std::istream& in,
                                                   const char* what) {
    std::vector<std::vector<int>> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<int> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stoi(cell));
            } catch (const std::exception&) {
                throw ConfigError(std::string("bad cell in ") + what + ": " + cell);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::ifstream open_or_throw(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open file: " + path);
    return f;
}

} // namespace detail

inline std::vector<Card> parse_cards_csv(std::istream& in, int numSuits = 5) {
    std::vector<Card> cards;
    for (const auto& row : detail::read_csv_ints(in, "deck csv")) {
        if (static_cast<int>(row.size()) != 3 + numSuits)
            throw ConfigError("deck csv row has wrong column count");
        Card c;
        c.deckTier = static_cast<std::int8_t>(row[0]);
        c.points = static_cast<std::int8_t>(row[1]);
        c.bonusSuit = static_cast<std::int8_t>(row[2]);
        c.cost = TokenVector(numSuits);
        for (int s = 0; s < numSuits; ++s)
            c.cost.at(s) = static_cast<std::int16_t>(row[static_cast<std::size_t>(3 + s)]);
        cards.push_back(c);
    }
    return cards;
}

inline std::vector<Card> load_cards_csv(const std::string& path,
                                        int numSuits = 5) {
    auto f = detail::open_or_throw(path);
    return parse_cards_csv(f, numSuits);
}

inline std::vector<Noble> parse_nobles_csv(std::istream& in, int numSuits = 5) {
    std::vector<Noble> nobles;
    for (const auto& row : detail::read_csv_ints(in, "noble csv")) {
        if (static_cast<int>(row.size()) != 1 + numSuits)
            throw ConfigError("noble csv row has wrong column count");
        Noble n;
        n.points = static_cast<std::int8_t>(row[0]);
        n.requirement = TokenVector(numSuits);
        for (int s = 0; s < numSuits; ++s)
            n.requirement.at(s) = static_cast<std::int16_t>(row[static_cast<std::size_t>(1 + s)]);
        nobles.push_back(n);
    }
    return nobles;
}

inline std::vector<Noble> load_nobles_csv(const std::string& path,
                                          int numSuits = 5) {
    auto f = detail::open_or_throw(path);
    return parse_nobles_csv(f, numSuits);
}

// ---------------------------------------------------------------------------
// Game parameters (JSON document mirroring GameParams field names)
// ---------------------------------------------------------------------------

inline json params_to_json(const GameParams& p) {
    return json{{"numPlayers", p.numPlayers},
                {"pointsToWin", p.pointsToWin},
                {"numDecks", p.numDecks},
                {"faceUpPerDeck", p.faceUpPerDeck},
                {"tokensPerSuit", p.tokensPerSuit},
                {"numSuits", p.numSuits},
                {"jokerCount", p.jokerCount},
                {"maxTokensHeld", p.maxTokensHeld},
                {"maxReserved", p.maxReserved},
                {"minStackForTakeTwo", p.minStackForTakeTwo},
                {"nobleCount", p.nobleCount}};
}

inline GameParams params_from_json(const json& j) {
    GameParams p = GameParams::standard(j.value("numPlayers", 2));
    auto get = [&](const char* key, int& field) {
        if (j.contains(key)) field = j.at(key).get<int>();
    };
    get("pointsToWin", p.pointsToWin);
    get("numDecks", p.numDecks);
    get("faceUpPerDeck", p.faceUpPerDeck);
    get("tokensPerSuit", p.tokensPerSuit);
    get("numSuits", p.numSuits);
    get("jokerCount", p.jokerCount);
    get("maxTokensHeld", p.maxTokensHeld);
    get("maxReserved", p.maxReserved);
    get("minStackForTakeTwo", p.minStackForTakeTwo);
    get("nobleCount", p.nobleCount);
    p.validate();
    return p;
}

// ---------------------------------------------------------------------------
// Type mappings and event-value function files
// EF file: {"mapping": "id" | "hc" | [18 ints],
//           "mixer": {"kind": "linear"|"polynomial", "degree": d},
//           "weights": [...]}
// ---------------------------------------------------------------------------

inline TypeMapping mapping_from_json(const json& j) {
    if (j.is_string()) {
        std::string name = j.get<std::string>();
        if (name == "id") return TypeMapping::identity();
        if (name == "hc") return TypeMapping::hand_crafted();
        throw ConfigError("unknown mapping name: " + name);
    }
    if (!j.is_array() || j.size() != kNumEventTypes)
        throw ConfigError("mapping must be \"id\", \"hc\" or an 18-entry array");
    std::array<int, kNumEventTypes> table{};
    for (int i = 0; i < kNumEventTypes; ++i)
        table[static_cast<std::size_t>(i)] = j.at(static_cast<std::size_t>(i)).get<int>();
    return TypeMapping::from_table(table);
}

inline std::shared_ptr<const EventValueFunction> ef_from_json(const json& j) {
    TypeMapping mapping = mapping_from_json(j.at("mapping"));
    const json& mj = j.at("mixer");
    Mixer mixer;
    std::string kind = mj.at("kind").get<std::string>();
    if (kind == "linear")
        mixer.kind = MixerKind::Linear;
    else if (kind == "polynomial")
        mixer.kind = MixerKind::Polynomial;
    else
        throw ConfigError("unknown mixer kind: " + kind);
    mixer.degree = mj.value("degree", 1);
    mixer.featureCount = mapping.groupCount;
    std::vector<double> weights = j.at("weights").get<std::vector<double>>();
    return std::make_shared<EventValueFunction>(mapping, mixer,
                                                std::move(weights));
}

inline json ef_to_json(const EventValueFunction& ef) {
    json mapping;
    if (ef.mapping().table == TypeMapping::identity().table)
        mapping = "id";
    else if (ef.mapping().table == TypeMapping::hand_crafted().table)
        mapping = "hc";
    else
        mapping = ef.mapping().table;
    return json{{"mapping", mapping},
                {"mixer",
                 {{"kind", ef.mixer().kind == MixerKind::Linear ? "linear"
                                                                : "polynomial"},
                  {"degree", ef.mixer().degree}}},
                {"weights", ef.weights()}};
}

// Reported optimal linear EF over the hand-crafted mapping.
inline std::shared_ptr<const EventValueFunction> preset_lin_hc_star() {
    return std::make_shared<EventValueFunction>(
        TypeMapping::hand_crafted(), Mixer{MixerKind::Linear, 1, 5},
        std::vector<double>{0.2, 0.2, -0.4, -0.6, 0.8});
}

// Reported optimal linear EF over the identity mapping.
inline std::shared_ptr<const EventValueFunction> preset_lin_id_star() {
    return std::make_shared<EventValueFunction>(
        TypeMapping::identity(), Mixer{MixerKind::Linear, 1, 18},
        std::vector<double>{-0.8, 0.2, -0.4, -1.0, 0.8, 0.2, -0.2, -0.2, 0.8,
                            -0.2, -1.0, -0.8, -0.8, 0.2, 1.0, 0.8, 1.0, 0.4});
}

inline ValueFunction value_function_from_json(const json& j) {
    if (j.is_string()) {
        std::string name = j.get<std::string>();
        if (name == "score") return ValueFunction{};
        if (name == "lin_hc_star") return ValueFunction(preset_lin_hc_star());
        if (name == "lin_id_star") return ValueFunction(preset_lin_id_star());
        // anything else is a path to an EF file
        auto f = detail::open_or_throw(name);
        return ValueFunction(ef_from_json(json::parse(f)));
    }
    return ValueFunction(ef_from_json(j));
}

// ---------------------------------------------------------------------------
// Agent specs
// {"kind": "RND"|"OSLA"|"BMRH"|"SRH"|"MCTS",
//  "value_function": "score" | preset name | EF file path | inline EF,
//  "hyperparameters": {...}, "seed": <int>}
// ---------------------------------------------------------------------------

struct AgentSpec {
    std::string kind = "RND";
    ValueFunction vf;
    json valueFunctionJson = "score";
    json hyperparameters = json::object();
    std::uint64_t seed = 0;
    bool determinize = true;
};

inline MutationPointDist mutation_dist_from_code(int code) {
    switch (code) {
        case 0: return MutationPointDist::Uniform;
        case 1: return MutationPointDist::Geometric05;
        case 2: return MutationPointDist::Geometric08;
    }
    throw ConfigError("bad mutation point distribution code");
}

inline BMRHConfig bmrh_config_from_json(const json& h) {
    BMRHConfig c;
    c.sequenceLength = h.value("sequence_length", c.sequenceLength);
    c.populationSize = h.value("population_size", c.populationSize);
    c.eliteCount = h.value("elite_count", c.eliteCount);
    c.mutationPointDist =
        mutation_dist_from_code(h.value("mutation_point", 0));
    c.offspringPerParent = h.value("offspring_per_parent", c.offspringPerParent);
    c.shiftBuffer = h.value("shift_buffer", 0) != 0;
    c.evaluationsPerSequence =
        h.value("evaluations_per_sequence", c.evaluationsPerSequence);
    c.valueDiscount = h.value("value_discount", c.valueDiscount);
    c.opponentModel = h.value("opponent_model", 0) != 0
                          ? OpponentModel::Passing
                          : OpponentModel::Random;
    c.tieBreak = h.value("tie_break", 0) != 0 ? TieBreak::Randomized
                                              : TieBreak::First;
    c.eliteCount = std::min(c.eliteCount, c.populationSize);
    return c;
}

inline json bmrh_config_to_json(const BMRHConfig& c) {
    return json{{"sequence_length", c.sequenceLength},
                {"population_size", c.populationSize},
                {"elite_count", c.eliteCount},
                {"mutation_point", static_cast<int>(c.mutationPointDist)},
                {"offspring_per_parent", c.offspringPerParent},
                {"shift_buffer", c.shiftBuffer ? 1 : 0},
                {"evaluations_per_sequence", c.evaluationsPerSequence},
                {"value_discount", c.valueDiscount},
                {"opponent_model",
                 c.opponentModel == OpponentModel::Passing ? 1 : 0},
                {"tie_break", c.tieBreak == TieBreak::Randomized ? 1 : 0}};
}

inline SRHConfig srh_config_from_json(const json& h) {
    SRHConfig c;
    c.sequenceLength = h.value("sequence_length", c.sequenceLength);
    c.populationSize = h.value("population_size", c.populationSize);
    c.eliteCount = h.value("elite_count", c.eliteCount);
    c.geneMutationProb = h.value("gene_mutation_prob", c.geneMutationProb);
    c.offspringPerParent = h.value("offspring_per_parent", c.offspringPerParent);
    c.shiftBuffer = h.value("shift_buffer", 0) != 0;
    c.evaluationsPerSequence =
        h.value("evaluations_per_sequence", c.evaluationsPerSequence);
    c.valueDiscount = h.value("value_discount", c.valueDiscount);
    c.opponentModel = h.value("opponent_model", 0) != 0
                          ? OpponentModel::Passing
                          : OpponentModel::Random;
    c.tieBreak = h.value("tie_break", 0) != 0 ? TieBreak::Randomized
                                              : TieBreak::First;
    c.eliteCount = std::min(c.eliteCount, c.populationSize);
    return c;
}

inline MCTSConfig mcts_config_from_json(const json& h) {
    MCTSConfig c;
    c.explorationConstant = h.value("exploration_constant", c.explorationConstant);
    c.maxDepth = h.value("max_depth", c.maxDepth);
    c.wideningBase = h.value("widening_base", c.wideningBase);
    c.wideningExponent = h.value("widening_exponent", c.wideningExponent);
    c.rolloutLength = h.value("rollout_length", c.rolloutLength);
    return c;
}

inline AgentSpec agent_spec_from_json(const json& j) {
    AgentSpec spec;
    spec.kind = j.at("kind").get<std::string>();
    if (spec.kind != "RND" && spec.kind != "OSLA" && spec.kind != "BMRH" &&
        spec.kind != "SRH" && spec.kind != "MCTS")
        throw ConfigError("unknown agent kind: " + spec.kind);
    spec.valueFunctionJson = j.value("value_function", json("score"));
    spec.vf = value_function_from_json(spec.valueFunctionJson);
    spec.hyperparameters = j.value("hyperparameters", json::object());
    spec.seed = j.value("seed", 0ULL);
    spec.determinize = j.value("determinize", true);
    return spec;
}

inline json agent_spec_to_json(const AgentSpec& spec) {
    return json{{"kind", spec.kind},
                {"value_function", spec.valueFunctionJson},
                {"hyperparameters", spec.hyperparameters},
                {"seed", spec.seed},
                {"determinize", spec.determinize}};
}

inline AgentSpec load_agent_spec(const std::string& path) {
    auto f = detail::open_or_throw(path);
    return agent_spec_from_json(json::parse(f));
}

// ---------------------------------------------------------------------------
// Search spaces
// ---------------------------------------------------------------------------

inline SearchSpace search_space_from_json(const json& j) {
    SearchSpace space;
    for (const auto& dj : j) {
        SearchDim d;
        d.name = dj.at("name").get<std::string>();
        d.values = dj.at("values").get<std::vector<double>>();
        space.dims.push_back(std::move(d));
    }
    space.validate();
    return space;
}

inline json search_space_to_json(const SearchSpace& space) {
    json out = json::array();
    for (const auto& d : space.dims)
        out.push_back(json{{"name", d.name}, {"values", d.values}});
    return out;
}

// The 10-dimensional BMRH hyperparameter space used for tuning. Categorical
// dimensions carry integer codes; see bmrh_config_from_json for the key
// semantics.
inline SearchSpace bmrh_search_space() {
    SearchSpace s;
    s.dims = {
        {"sequence_length", {1, 2, 3, 4, 5}},
        {"population_size", {1, 2, 5, 10, 20}},
        {"elite_count", {1, 2, 5}},
        {"mutation_point", {0, 1, 2}},
        {"offspring_per_parent", {1, 2, 4}},
        {"shift_buffer", {0, 1}},
        {"evaluations_per_sequence", {1, 2, 3}},
        {"value_discount", {1.0, 0.95, 0.9}},
        {"opponent_model", {0, 1}},
        {"tie_break", {0, 1}},
    };
    return s;
}

// The discretized weight grid W, one dimension per mixer weight.
inline const std::vector<double>& weight_grid() {
    static const std::vector<double> grid{-1.0, -0.8, -0.6, -0.4, -0.2, 0.0,
                                          0.2,  0.4,  0.6,  0.8,  1.0};
    return grid;
}

inline SearchSpace weights_search_space(int weightCount) {
    SearchSpace s;
    for (int i = 0; i < weightCount; ++i)
        s.dims.push_back({"w" + std::to_string(i), weight_grid()});
    return s;
}

// Decodes a candidate over bmrh_search_space() [+ weight dims] into a BMRH
// config and a weight vector (empty for score-based candidates).
inline std::pair<BMRHConfig, std::vector<double>> decode_bmrh_candidate(
    const SearchSpace& space, const Candidate& c) {
    json h = json::object();
    std::vector<double> weights;
    for (std::size_t i = 0; i < space.dims.size(); ++i) {
        const SearchDim& d = space.dims[i];
        double value = d.values[static_cast<std::size_t>(c[i])];
        if (d.name.size() > 1 && d.name[0] == 'w' &&
            d.name.find_first_not_of("0123456789", 1) == std::string::npos) {
            weights.push_back(value);
        } else if (d.name == "value_discount") {
            h[d.name] = value;
        } else {
            h[d.name] = static_cast<int>(value);
        }
    }
    return {bmrh_config_from_json(h), std::move(weights)};
}

// ---------------------------------------------------------------------------
// Event traces and state serialization
// ---------------------------------------------------------------------------

inline const char* to_string(DurationType t) {
    switch (t) {
        case DurationType::Instant: return "instant";
        case DurationType::Delayed: return "delayed";
        case DurationType::Durative: return "durative";
    }
    return "?";
}

inline json event_to_json(const Event& e) {
    json attrs = json::object();
    for (const auto& [k, v] : e.attributes) attrs[k] = v;
    json j{{"tick", e.tick},
           {"who", e.who},
           {"type", e.type},
           {"duration", e.duration},
           {"durationType", to_string(e.durationType)},
           {"attributes", attrs},
           {"signature", e.signature}};
    if (e.trigger) {
        j["trigger"] = json{{"player", e.trigger->player},
                            {"kind", e.trigger->action
                                         ? to_string(e.trigger->action->kind)
                                         : "?"}};
    } else {
        j["trigger"] = nullptr;
    }
    return j;
}

inline void write_events_jsonl(std::ostream& out,
                               const std::vector<Event>& events) {
    for (const Event& e : events) out << event_to_json(e).dump() << "\n";
}

inline json token_vector_to_json(const TokenVector& tv) {
    json a = json::array();
    for (int i = 0; i < tv.size(); ++i) a.push_back(tv[i]);
    return a;
}

inline json card_to_json(const Card& c) {
    return json{{"tier", c.deckTier},
                {"points", c.points},
                {"bonus", c.bonusSuit},
                {"cost", token_vector_to_json(c.cost)}};
}

inline json state_to_json(const GameState& s) {
    json decks = json::array();
    for (const auto& stack : s.decks) {
        json d = json::array();
        for (const Card& c : stack) d.push_back(card_to_json(c));
        decks.push_back(std::move(d));
    }
    json faceUp = json::array();
    for (const auto& row : s.faceUp) {
        json d = json::array();
        for (const Card& c : row) d.push_back(card_to_json(c));
        faceUp.push_back(std::move(d));
    }
    json nobles = json::array();
    for (const Noble& n : s.nobles)
        nobles.push_back(json{{"points", n.points},
                              {"requirement", token_vector_to_json(n.requirement)}});
    json players = json::array();
    for (const PlayerState& p : s.players) {
        json reservedV = json::array(), reservedH = json::array(),
             purchased = json::array();
        for (const Card& c : p.reservedVisible) reservedV.push_back(card_to_json(c));
        for (const Card& c : p.reservedHidden) reservedH.push_back(card_to_json(c));
        for (const Card& c : p.purchasedCards) purchased.push_back(card_to_json(c));
        players.push_back(json{{"points", p.points},
                               {"tokens", token_vector_to_json(p.tokens)},
                               {"jokers", p.jokers},
                               {"bonuses", token_vector_to_json(p.purchasedBonuses)},
                               {"purchased", purchased},
                               {"reservedVisible", reservedV},
                               {"reservedHidden", reservedH}});
    }
    return json{{"params", params_to_json(s.params)},
                {"decks", decks},
                {"faceUp", faceUp},
                {"nobles", nobles},
                {"tableTokens", token_vector_to_json(s.tableTokens)},
                {"tableJokers", s.tableJokers},
                {"players", players},
                {"tick", s.tick},
                {"currentPlayer", s.currentPlayer},
                {"terminal", s.terminalFlag},
                {"winner", s.winnerIndex}};
}

inline std::string serialize_state(const GameState& s) {
    return state_to_json(s).dump();
}

} // namespace r2

#endif
