#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "r2/engine.hpp"
#include "r2/io.hpp"
#include "test_util.hpp"

using namespace r2;
using r2::test::standard_cards;
using r2::test::standard_game;
using r2::test::standard_nobles;

namespace {

// Token / joker / card conservation across the whole table.
void check_conservation(const GameState& s) {
    const GameParams& p = s.params;
    for (int su = 0; su < p.numSuits; ++su) {
        int total = s.tableTokens[su];
        for (const PlayerState& pl : s.players) total += pl.tokens[su];
        REQUIRE(total == p.tokensPerSuit);
    }
    int jokers = s.tableJokers;
    for (const PlayerState& pl : s.players) jokers += pl.jokers;
    REQUIRE(jokers == p.jokerCount);

    std::size_t cards = 0;
    for (const auto& d : s.decks) cards += d.size();
    for (const auto& f : s.faceUp) cards += f.size();
    for (const PlayerState& pl : s.players)
        cards += pl.purchasedCards.size() + pl.reservedVisible.size() +
                 pl.reservedHidden.size();
    REQUIRE(cards == standard_cards().size());
}

} // namespace

TEST_CASE("new_game lays out 3 decks with 4 face-up cards each") {
    GameState s = standard_game(0);
    REQUIRE(s.decks.size() == 3);
    std::size_t faceUp = 0;
    for (const auto& row : s.faceUp) {
        REQUIRE(row.size() == 4);
        faceUp += row.size();
    }
    REQUIRE(faceUp == 12);
    REQUIRE(s.tick == 0);
    REQUIRE(s.currentPlayer == 0);
    REQUIRE_FALSE(s.terminalFlag);
}

TEST_CASE("new_game is deterministic per seed") {
    GameState a = standard_game(42);
    GameState b = standard_game(42);
    REQUIRE(serialize_state(a) == serialize_state(b));
    GameState c = standard_game(43);
    REQUIRE(serialize_state(a) != serialize_state(c));
}

TEST_CASE("2-player game places 3 nobles") {
    GameState s = standard_game(0);
    REQUIRE(s.nobles.size() == 3);
    GameState s4 = standard_game(0, 4);
    REQUIRE(s4.nobles.size() == 5);
}

TEST_CASE("new_game rejects bad configurations") {
    GameParams p = GameParams::standard(2);
    REQUIRE_THROWS_AS(new_game(p, {}, standard_nobles(), 0), ConfigError);
    std::vector<Noble> few(standard_nobles().begin(),
                           standard_nobles().begin() + 2);
    REQUIRE_THROWS_AS(new_game(p, standard_cards(), few, 0), ConfigError);
}

TEST_CASE("clone is independent of the original") {
    GameState s = standard_game(7);
    GameState c = clone_state(s);
    std::string before = serialize_state(s);
    Rng rng(1);
    step(c, sample_action(c, rng));
    REQUIRE(serialize_state(s) == before);
    REQUIRE(serialize_state(c) != before);
}

TEST_CASE("clone does not carry loggers") {
    GameState s = standard_game(7);
    EventLogger onOriginal;
    s.attach_logger(&onOriginal);
    GameState c = clone_state(s);
    REQUIRE_FALSE(c.has_loggers());
    // Logger attached to the clone sees nothing from the original and
    // vice versa.
    EventLogger onClone;
    c.attach_logger(&onClone);
    Rng rng(3);
    step(c, sample_action(c, rng));
    REQUIRE(onOriginal.buffer.empty());
    REQUIRE_FALSE(onClone.buffer.empty());
}

TEST_CASE("TakeSame requires more than minStackForTakeTwo-1 tokens") {
    GameState s = standard_game(0);
    Action a;
    a.kind = ActionKind::TakeSame;
    a.suits = {0};
    REQUIRE(is_legal(s, a)); // 2-player table starts with 4 per suit
    s.tableTokens.at(0) = 3;
    REQUIRE_FALSE(is_legal(s, a));
}

TEST_CASE("TakeDifferent of three available suits is legal without returns") {
    GameState s = standard_game(0);
    PlayerState& p = s.players[0];
    p.tokens.at(0) = 3;
    p.tokens.at(1) = 2;
    p.tokens.at(2) = 2;
    s.tableTokens.at(0) -= 3;
    s.tableTokens.at(1) -= 2;
    s.tableTokens.at(2) -= 2;
    REQUIRE(p.heldTotal() == 7);
    Action a;
    a.kind = ActionKind::TakeDifferent;
    a.suits = {2, 3, 4};
    REQUIRE(is_legal(s, a)); // 7 + 3 = 10 <= cap, no return needed
    // A fourth suit or a duplicate suit is rejected.
    Action bad = a;
    bad.suits = {1, 2, 3, 4};
    REQUIRE_FALSE(is_legal(s, bad));
    bad.suits = {2, 2, 3};
    REQUIRE_FALSE(is_legal(s, bad));
}

TEST_CASE("buy with short payment is illegal") {
    GameState s = standard_game(0);
    Action a;
    a.kind = ActionKind::BuyFaceUp;
    a.deck = 0;
    a.slot = 0;
    a.payment = TokenVector(5); // pay nothing for a costed card
    a.paymentJokers = 0;
    REQUIRE(s.faceUp[0][0].cost.total() > 0);
    REQUIRE_FALSE(is_legal(s, a));
}

TEST_CASE("sample_action is deterministic and always legal") {
    GameState s = standard_game(5);
    Action a = sample_action(s, std::uint64_t{9});
    Action b = sample_action(s, std::uint64_t{9});
    REQUIRE(a == b);
    REQUIRE(is_legal(s, a));
}

TEST_CASE("sample_action covers every legal action kind on the initial state") {
    GameState s = standard_game(3);
    // Determine which kinds have at least one legal instantiation up front.
    std::set<ActionKind> expected{ActionKind::TakeDifferent,
                                  ActionKind::TakeSame,
                                  ActionKind::ReserveFaceUp,
                                  ActionKind::ReserveDeckTop};
    std::set<ActionKind> seen;
    Rng rng(17);
    for (int i = 0; i < 10000; ++i) seen.insert(sample_action(s, rng).kind);
    for (ActionKind k : expected) REQUIRE(seen.count(k) == 1);
    // Nothing is affordable on the very first turn of this deck.
    REQUIRE(seen.count(ActionKind::BuyFaceUp) == 0);
    REQUIRE(seen.count(ActionKind::Pass) == 0);
}

TEST_CASE("sample_action returns Pass only when nothing else is legal") {
    GameState s = standard_game(0);
    // Strip the table and decks so no action kind remains.
    s.tableTokens = TokenVector(5);
    s.tableJokers = 0;
    for (auto& d : s.decks) d.clear();
    for (auto& f : s.faceUp) f.clear();
    for (auto& p : s.players) {
        p.reservedVisible.clear();
        p.reservedHidden.clear();
    }
    Rng rng(1);
    Action a = sample_action(s, rng);
    REQUIRE(a.kind == ActionKind::Pass);
    REQUIRE(is_legal(s, a));
}

TEST_CASE("sampled actions stay legal across random reachable states") {
    Rng rng(11);
    int samples = 0;
    for (int game = 0; game < 120; ++game) {
        GameState s = standard_game(static_cast<std::uint64_t>(game));
        for (int ply = 0; ply < 400 && !s.terminalFlag; ++ply) {
            for (int k = 0; k < 12; ++k) {
                Action a = sample_action(s, rng);
                REQUIRE(is_legal(s, a));
                ++samples;
            }
            step(s, sample_action(s, rng));
        }
    }
    REQUIRE(samples >= 100000);
}

TEST_CASE("apply_action rejects illegal actions without touching the state") {
    GameState s = standard_game(0);
    std::string before = serialize_state(s);
    Action a;
    a.kind = ActionKind::TakeSame;
    a.suits = {0};
    s.tableTokens.at(0) = 2;
    REQUIRE_THROWS_AS(apply_action(s, a), IllegalActionError);
    s.tableTokens.at(0) = 4;
    REQUIRE(serialize_state(s) == before);
}

TEST_CASE("apply_action on a terminal state is an error") {
    GameState s = standard_game(0);
    s.terminalFlag = true;
    Action pass;
    REQUIRE_THROWS_AS(apply_action(s, pass), IllegalActionError);
    REQUIRE_THROWS_AS(sample_action(s, std::uint64_t{0}), std::logic_error);
}

TEST_CASE("terminal detection waits for the round to complete") {
    GameState s = standard_game(0);
    s.players[0].points = 15;
    Action pass;
    step(s, pass); // player 0 moves; round not yet complete
    REQUIRE_FALSE(s.terminalFlag);
    step(s, pass); // player 1 moves; round complete
    REQUIRE(s.terminalFlag);
    REQUIRE(winner(s) == 0);
    REQUIRE(clone_state(s).terminalFlag);
}

TEST_CASE("winner tie-break prefers fewer purchased cards then lower index") {
    GameState s = standard_game(0);
    s.players[0].points = 15;
    s.players[1].points = 15;
    s.players[0].purchasedCards.push_back(Card{});
    Action pass;
    step(s, pass);
    step(s, pass);
    REQUIRE(winner(s) == 1);

    GameState t = standard_game(0);
    t.players[0].points = 15;
    t.players[1].points = 15;
    step(t, pass);
    step(t, pass);
    REQUIRE(winner(t) == 0);
}

TEST_CASE("winner on a non-terminal state is an error") {
    GameState s = standard_game(0);
    REQUIRE_THROWS_AS(winner(s), std::logic_error);
}

TEST_CASE("score reads player points") {
    GameState s = standard_game(0);
    REQUIRE(score(s, 0) == 0);
    REQUIRE(score(s, 1) == 0);
    s.players[1].points = 4;
    REQUIRE(score(s, 1) == 4);
    REQUIRE_THROWS_AS(score(s, 2), std::out_of_range);
}

TEST_CASE("noble is auto-awarded once requirements are met") {
    GameState s = standard_game(0);
    Noble n;
    n.points = 3;
    n.requirement = TokenVector(5);
    n.requirement.at(0) = 1;
    s.nobles.insert(s.nobles.begin(), n);
    s.players[0].purchasedBonuses.at(0) = 1;
    std::size_t noblesBefore = s.nobles.size();
    Action pass;
    auto events = apply_action(s, pass);
    REQUIRE(s.players[0].points == 3);
    REQUIRE(s.nobles.size() == noblesBefore - 1);
    bool sawNoblePoints = false;
    for (const Event& e : events)
        if (e.type == event_type::kPointsFromNoble) {
            sawNoblePoints = true;
            REQUIRE(e.who == kEngineWho);
            REQUIRE(e.attributed_to() == 0);
        }
    REQUIRE(sawNoblePoints);
}

TEST_CASE("random games preserve conservation and the token cap") {
    Rng rng(99);
    int maxTurns = 0;
    for (int game = 0; game < 100; ++game) {
        GameState s = standard_game(static_cast<std::uint64_t>(game));
        int turns = 0;
        while (!s.terminalFlag && turns < 500) {
            step(s, sample_action(s, rng));
            ++turns;
            for (const PlayerState& p : s.players)
                REQUIRE(p.heldTotal() <= s.params.maxTokensHeld);
        }
        check_conservation(s);
        REQUIRE(s.terminalFlag); // finished under the turn cap
        maxTurns = std::max(maxTurns, turns);
    }
    REQUIRE(maxTurns < 500);
}

TEST_CASE("determinize keeps observable state and reshuffles hidden cards") {
    // Roll a game forward until someone holds a hidden reserve.
    GameState s = r2::test::find_state(
        [](const GameState& st) {
            return !st.players[0].reservedHidden.empty() &&
                   st.currentPlayer == 1;
        },
        21);
    GameState d = determinize(s, 1, 77);
    REQUIRE(d.faceUp == s.faceUp);
    REQUIRE(d.tableTokens == s.tableTokens);
    REQUIRE(d.players[1].tokens == s.players[1].tokens);
    // Deck sizes and hidden-reserve counts are preserved.
    for (std::size_t t = 0; t < s.decks.size(); ++t)
        REQUIRE(d.decks[t].size() == s.decks[t].size());
    REQUIRE(d.players[0].reservedHidden.size() ==
            s.players[0].reservedHidden.size());
    // The observer's own hidden reserves are not touched.
    GameState own = determinize(s, 0, 77);
    REQUIRE(own.players[0].reservedHidden == s.players[0].reservedHidden);
}

TEST_CASE("double logger attach is rejected") {
    GameState s = standard_game(0);
    EventLogger logger;
    s.attach_logger(&logger);
    REQUIRE_THROWS_AS(s.attach_logger(&logger), std::invalid_argument);
    s.detach_logger(&logger);
    REQUIRE_THROWS_AS(s.detach_logger(&logger), std::invalid_argument);
}
