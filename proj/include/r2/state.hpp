#ifndef R2_STATE_HPP
#define R2_STATE_HPP

#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "r2/events.hpp"

namespace r2 {

inline constexpr int kMaxSuits = 8;

// Per-suit token counts. Fixed capacity so cards and states stay trivially
// copyable on the simulation hot path.
struct TokenVector {
    std::array<std::int16_t, kMaxSuits> v{};
    std::int8_t n = 0;

    TokenVector() = default;
    explicit TokenVector(int suits) : n(static_cast<std::int8_t>(suits)) {
        if (suits < 0 || suits > kMaxSuits)
            throw std::invalid_argument("suit count out of range");
    }

    int size() const { return n; }
    int operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
    std::int16_t& at(int i) { return v[static_cast<std::size_t>(i)]; }

    int total() const {
        int s = 0;
        for (int i = 0; i < n; ++i) s += v[static_cast<std::size_t>(i)];
        return s;
    }

    bool operator==(const TokenVector&) const = default;
};

struct GameParams {
    int numPlayers = 2;
    int pointsToWin = 15;
    int numDecks = 3;
    int faceUpPerDeck = 4;
    int tokensPerSuit = 4;
    int numSuits = 5;
    int jokerCount = 5;
    int maxTokensHeld = 10;
    int maxReserved = 3;
    int minStackForTakeTwo = 4;
    int nobleCount = 3;

    // Published table token counts: 4 for 2 players, 5 for 3, 7 for 4.
    static GameParams standard(int players) {
        GameParams p;
        p.numPlayers = players;
        p.tokensPerSuit = players == 2 ? 4 : players == 3 ? 5 : 7;
        p.nobleCount = players + 1;
        return p;
    }

    void validate() const {
        if (numPlayers < 2 || numPlayers > 4)
            throw std::invalid_argument("numPlayers must be in [2,4]");
        if (pointsToWin < 1) throw std::invalid_argument("pointsToWin < 1");
        if (numDecks < 1 || faceUpPerDeck < 1 || tokensPerSuit < 1 ||
            jokerCount < 0 || maxTokensHeld < 1 || maxReserved < 1 ||
            minStackForTakeTwo < 1 || nobleCount < 1)
            throw std::invalid_argument("game parameter must be positive");
        if (numSuits < 1 || numSuits > kMaxSuits)
            throw std::invalid_argument("numSuits out of range");
    }

    bool operator==(const GameParams&) const = default;
};

struct Card {
    std::int8_t deckTier = 0; // 0-based
    std::int8_t points = 0;
    std::int8_t bonusSuit = 0;
    TokenVector cost;

    bool operator==(const Card&) const = default;
};

struct Noble {
    std::int8_t points = 3;
    TokenVector requirement; // per-suit bonus-card counts

    bool operator==(const Noble&) const = default;
};

enum class ActionKind {
    TakeDifferent,
    TakeSame,
    BuyFaceUp,
    BuyReserved,
    ReserveFaceUp,
    ReserveDeckTop,
    Pass,
};

inline const char* to_string(ActionKind k) {
    switch (k) {
        case ActionKind::TakeDifferent: return "TakeDifferent";
        case ActionKind::TakeSame: return "TakeSame";
        case ActionKind::BuyFaceUp: return "BuyFaceUp";
        case ActionKind::BuyReserved: return "BuyReserved";
        case ActionKind::ReserveFaceUp: return "ReserveFaceUp";
        case ActionKind::ReserveDeckTop: return "ReserveDeckTop";
        case ActionKind::Pass: return "Pass";
    }
    return "?";
}

struct Action {
    ActionKind kind = ActionKind::Pass;
    // TakeDifferent: 1-3 distinct suits; TakeSame: exactly one suit.
    std::vector<int> suits;
    // Card location. BuyFaceUp/ReserveFaceUp: deck + slot into faceUp[deck].
    // ReserveDeckTop: deck. BuyReserved: slot into the player's reserve list,
    // fromHidden selecting visible vs hidden.
    int deck = -1;
    int slot = -1;
    bool fromHidden = false;
    // Buys: tokens handed over, split between suit tokens and jokers.
    TokenVector payment;
    int paymentJokers = 0;
    // Takes/reserves: tokens given back to restore the held-token cap.
    TokenVector returns;
    int returnJokers = 0;

    bool operator==(const Action&) const = default;
};

struct PlayerState {
    int points = 0;
    TokenVector tokens;
    int jokers = 0;
    TokenVector purchasedBonuses; // per-suit bonus-card counts
    std::vector<Card> purchasedCards;
    std::vector<Card> reservedVisible;
    std::vector<Card> reservedHidden;

    int reservedCount() const {
        return static_cast<int>(reservedVisible.size() + reservedHidden.size());
    }
    int heldTotal() const { return tokens.total() + jokers; }

    bool operator==(const PlayerState&) const = default;
};

struct GameState {
    GameParams params;
    std::vector<std::vector<Card>> decks; // face-down stacks, back = top
    std::vector<std::vector<Card>> faceUp; // per-deck revealed slots
    std::vector<Noble> nobles;
    TokenVector tableTokens;
    int tableJokers = 0;
    std::vector<PlayerState> players;
    int tick = 0;
    int currentPlayer = 0;
    bool terminalFlag = false;
    int winnerIndex = -1;

    GameState() = default;
    // Copies are forward-model clones: deep, independent, with no loggers.
    GameState(const GameState& o)
        : params(o.params), decks(o.decks), faceUp(o.faceUp), nobles(o.nobles),
          tableTokens(o.tableTokens), tableJokers(o.tableJokers),
          players(o.players), tick(o.tick), currentPlayer(o.currentPlayer),
          terminalFlag(o.terminalFlag), winnerIndex(o.winnerIndex) {}
    GameState& operator=(const GameState& o) {
        if (this == &o) return *this;
        GameState tmp(o);
        *this = std::move(tmp);
        return *this;
    }
    GameState(GameState&&) = default;
    GameState& operator=(GameState&&) = default;

    bool same_position(const GameState& o) const {
        return params == o.params && decks == o.decks && faceUp == o.faceUp &&
               nobles == o.nobles && tableTokens == o.tableTokens &&
               tableJokers == o.tableJokers && players == o.players &&
               tick == o.tick && currentPlayer == o.currentPlayer &&
               terminalFlag == o.terminalFlag && winnerIndex == o.winnerIndex;
    }

    void attach_logger(EventLogger* logger) {
        for (EventLogger* l : loggers_)
            if (l == logger)
                throw std::invalid_argument("logger already attached");
        loggers_.push_back(logger);
    }

    void detach_logger(EventLogger* logger) {
        for (auto it = loggers_.begin(); it != loggers_.end(); ++it) {
            if (*it == logger) {
                loggers_.erase(it);
                return;
            }
        }
        throw std::invalid_argument("logger not attached");
    }

    bool has_loggers() const { return !loggers_.empty(); }
    const std::vector<EventLogger*>& loggers() const { return loggers_; }

private:
    std::vector<EventLogger*> loggers_; // not owned; dropped by clone
};

} // namespace r2

#endif
