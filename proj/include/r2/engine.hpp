#ifndef R2_ENGINE_HPP
#define R2_ENGINE_HPP

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "r2/events.hpp"
#include "r2/rng.hpp"
#include "r2/state.hpp"

namespace r2 {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllegalActionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline int tv_get(const TokenVector& tv, int s) {
    return s < tv.size() ? tv[s] : 0;
}

inline void shuffle(std::vector<Card>& cards, Rng& rng) {
    for (int i = static_cast<int>(cards.size()) - 1; i > 0; --i)
        std::swap(cards[static_cast<std::size_t>(i)],
                  cards[static_cast<std::size_t>(rng.next_int(i + 1))]);
}

} // namespace detail

// Cost after bonus-card discount.
inline TokenVector effective_cost(const GameParams& params, const Card& card,
                                  const PlayerState& player) {
    TokenVector eff(params.numSuits);
    for (int s = 0; s < params.numSuits; ++s) {
        int c = detail::tv_get(card.cost, s) - player.purchasedBonuses[s];
        eff.at(s) = static_cast<std::int16_t>(c > 0 ? c : 0);
    }
    return eff;
}

inline bool can_afford(const GameParams& params, const PlayerState& player,
                       const Card& card) {
    TokenVector eff = effective_cost(params, card, player);
    int shortfall = 0;
    for (int s = 0; s < params.numSuits; ++s) {
        int gap = eff[s] - player.tokens[s];
        if (gap > 0) shortfall += gap;
    }
    return shortfall <= player.jokers;
}

namespace detail {

// Exact-cover check: payment stays within held tokens and effective cost,
// jokers make up precisely the remainder.
inline bool payment_legal(const GameParams& params, const PlayerState& player,
                          const Card& card, const Action& a) {
    TokenVector eff = effective_cost(params, card, player);
    int jokersNeeded = 0;
    for (int s = 0; s < params.numSuits; ++s) {
        int pay = tv_get(a.payment, s);
        if (pay < 0 || pay > player.tokens[s] || pay > eff[s]) return false;
        jokersNeeded += eff[s] - pay;
    }
    return a.paymentJokers == jokersNeeded && jokersNeeded <= player.jokers;
}

// Returns must restore the held-token cap exactly, from tokens actually held
// after the gain.
inline bool returns_legal(const GameParams& params, const PlayerState& player,
                          const TokenVector& gain, int gainJokers,
                          const Action& a) {
    int total = player.jokers + gainJokers;
    for (int s = 0; s < params.numSuits; ++s) {
        int post = player.tokens[s] + tv_get(gain, s);
        int ret = tv_get(a.returns, s);
        if (ret < 0 || ret > post) return false;
        total += post;
    }
    if (a.returnJokers < 0 || a.returnJokers > player.jokers + gainJokers)
        return false;
    int excess = total - params.maxTokensHeld;
    if (excess < 0) excess = 0;
    int returned = a.returnJokers;
    for (int s = 0; s < params.numSuits; ++s) returned += tv_get(a.returns, s);
    return returned == excess;
}

inline const Card* locate_card(const GameState& s, const Action& a) {
    switch (a.kind) {
        case ActionKind::BuyFaceUp:
        case ActionKind::ReserveFaceUp: {
            if (a.deck < 0 || a.deck >= s.params.numDecks) return nullptr;
            const auto& row = s.faceUp[static_cast<std::size_t>(a.deck)];
            if (a.slot < 0 || a.slot >= static_cast<int>(row.size()))
                return nullptr;
            return &row[static_cast<std::size_t>(a.slot)];
        }
        case ActionKind::BuyReserved: {
            const PlayerState& p =
                s.players[static_cast<std::size_t>(s.currentPlayer)];
            const auto& list = a.fromHidden ? p.reservedHidden : p.reservedVisible;
            if (a.slot < 0 || a.slot >= static_cast<int>(list.size()))
                return nullptr;
            return &list[static_cast<std::size_t>(a.slot)];
        }
        default: return nullptr;
    }
}

} // namespace detail

inline bool is_legal(const GameState& s, const Action& a) {
    if (s.terminalFlag) return false;
    const GameParams& params = s.params;
    const PlayerState& player =
        s.players[static_cast<std::size_t>(s.currentPlayer)];
    switch (a.kind) {
        case ActionKind::Pass:
            return true;
        case ActionKind::TakeDifferent: {
            if (a.suits.empty() || a.suits.size() > 3) return false;
            TokenVector gain(params.numSuits);
            for (std::size_t i = 0; i < a.suits.size(); ++i) {
                int su = a.suits[i];
                if (su < 0 || su >= params.numSuits) return false;
                for (std::size_t j = 0; j < i; ++j)
                    if (a.suits[j] == su) return false;
                if (s.tableTokens[su] < 1) return false;
                gain.at(su) = 1;
            }
            return detail::returns_legal(params, player, gain, 0, a);
        }
        case ActionKind::TakeSame: {
            if (a.suits.size() != 1) return false;
            int su = a.suits[0];
            if (su < 0 || su >= params.numSuits) return false;
            if (s.tableTokens[su] < params.minStackForTakeTwo) return false;
            TokenVector gain(params.numSuits);
            gain.at(su) = 2;
            return detail::returns_legal(params, player, gain, 0, a);
        }
        case ActionKind::BuyFaceUp:
        case ActionKind::BuyReserved: {
            const Card* card = detail::locate_card(s, a);
            if (!card) return false;
            return detail::payment_legal(params, player, *card, a);
        }
        case ActionKind::ReserveFaceUp: {
            if (player.reservedCount() >= params.maxReserved) return false;
            if (!detail::locate_card(s, a)) return false;
            int jokerGain = s.tableJokers > 0 ? 1 : 0;
            return detail::returns_legal(params, player, TokenVector(params.numSuits),
                                         jokerGain, a);
        }
        case ActionKind::ReserveDeckTop: {
            if (player.reservedCount() >= params.maxReserved) return false;
            if (a.deck < 0 || a.deck >= params.numDecks) return false;
            if (s.decks[static_cast<std::size_t>(a.deck)].empty()) return false;
            int jokerGain = s.tableJokers > 0 ? 1 : 0;
            return detail::returns_legal(params, player, TokenVector(params.numSuits),
                                         jokerGain, a);
        }
    }
    return false;
}

namespace detail {

// Spread the mandatory give-back uniformly over whatever the player would be
// holding after the gain (just-taken tokens and jokers included).
inline void fill_returns(const GameParams& params, const PlayerState& player,
                         const TokenVector& gain, int gainJokers, Action& a,
                         Rng& rng) {
    a.returns = TokenVector(params.numSuits);
    a.returnJokers = 0;
    TokenVector post(params.numSuits);
    int postJokers = player.jokers + gainJokers;
    int total = postJokers;
    for (int s = 0; s < params.numSuits; ++s) {
        post.at(s) = static_cast<std::int16_t>(player.tokens[s] + tv_get(gain, s));
        total += post[s];
    }
    int excess = total - params.maxTokensHeld;
    while (excess > 0) {
        int pool = 0;
        for (int s = 0; s < params.numSuits; ++s)
            pool += post[s] - a.returns[s];
        pool += postJokers - a.returnJokers;
        int pick = rng.next_int(pool);
        for (int s = 0; s < params.numSuits; ++s) {
            pick -= post[s] - a.returns[s];
            if (pick < 0) {
                ++a.returns.at(s);
                break;
            }
        }
        if (pick >= 0) ++a.returnJokers;
        --excess;
    }
}

inline void fill_payment(const GameParams& params, const PlayerState& player,
                         const Card& card, Action& a) {
    TokenVector eff = effective_cost(params, card, player);
    a.payment = TokenVector(params.numSuits);
    a.paymentJokers = 0;
    for (int s = 0; s < params.numSuits; ++s) {
        int pay = std::min<int>(eff[s], player.tokens[s]);
        a.payment.at(s) = static_cast<std::int16_t>(pay);
        a.paymentJokers += eff[s] - pay;
    }
}

} // namespace detail

// Seeded legal-action sampling without full enumeration: pick a kind uniformly
// among kinds with at least one legal instantiation, then pick parameters
// uniformly within the kind. Pass is returned only when nothing else is legal.
inline Action sample_action(const GameState& s, Rng& rng) {
    if (s.terminalFlag)
        throw std::logic_error("sample_action on terminal state");
    const GameParams& params = s.params;
    const PlayerState& player =
        s.players[static_cast<std::size_t>(s.currentPlayer)];

    std::vector<int> takeable, takeableTwo;
    for (int su = 0; su < params.numSuits; ++su) {
        if (s.tableTokens[su] >= 1) takeable.push_back(su);
        if (s.tableTokens[su] >= params.minStackForTakeTwo)
            takeableTwo.push_back(su);
    }
    std::vector<std::pair<int, int>> buyable, faceUpSlots;
    for (int d = 0; d < params.numDecks; ++d) {
        const auto& row = s.faceUp[static_cast<std::size_t>(d)];
        for (int i = 0; i < static_cast<int>(row.size()); ++i) {
            faceUpSlots.emplace_back(d, i);
            if (can_afford(params, player, row[static_cast<std::size_t>(i)]))
                buyable.emplace_back(d, i);
        }
    }
    std::vector<std::pair<bool, int>> buyableReserved;
    for (int i = 0; i < static_cast<int>(player.reservedVisible.size()); ++i)
        if (can_afford(params, player, player.reservedVisible[static_cast<std::size_t>(i)]))
            buyableReserved.emplace_back(false, i);
    for (int i = 0; i < static_cast<int>(player.reservedHidden.size()); ++i)
        if (can_afford(params, player, player.reservedHidden[static_cast<std::size_t>(i)]))
            buyableReserved.emplace_back(true, i);
    std::vector<int> reservableDecks;
    for (int d = 0; d < params.numDecks; ++d)
        if (!s.decks[static_cast<std::size_t>(d)].empty())
            reservableDecks.push_back(d);
    bool canReserve = player.reservedCount() < params.maxReserved;

    std::vector<ActionKind> kinds;
    if (!takeable.empty()) kinds.push_back(ActionKind::TakeDifferent);
    if (!takeableTwo.empty()) kinds.push_back(ActionKind::TakeSame);
    if (!buyable.empty()) kinds.push_back(ActionKind::BuyFaceUp);
    if (!buyableReserved.empty()) kinds.push_back(ActionKind::BuyReserved);
    if (canReserve && !faceUpSlots.empty())
        kinds.push_back(ActionKind::ReserveFaceUp);
    if (canReserve && !reservableDecks.empty())
        kinds.push_back(ActionKind::ReserveDeckTop);

    Action a;
    if (kinds.empty()) return a; // Pass

    int jokerGain = s.tableJokers > 0 ? 1 : 0;
    switch (kinds[static_cast<std::size_t>(rng.next_int(static_cast<int>(kinds.size())))]) {
        case ActionKind::TakeDifferent: {
            a.kind = ActionKind::TakeDifferent;
            int k = std::min<int>(3, static_cast<int>(takeable.size()));
            TokenVector gain(params.numSuits);
            for (int i = 0; i < k; ++i) {
                int j = i + rng.next_int(static_cast<int>(takeable.size()) - i);
                std::swap(takeable[static_cast<std::size_t>(i)],
                          takeable[static_cast<std::size_t>(j)]);
                a.suits.push_back(takeable[static_cast<std::size_t>(i)]);
                gain.at(takeable[static_cast<std::size_t>(i)]) = 1;
            }
            detail::fill_returns(params, player, gain, 0, a, rng);
            break;
        }
        case ActionKind::TakeSame: {
            a.kind = ActionKind::TakeSame;
            int su = takeableTwo[static_cast<std::size_t>(
                rng.next_int(static_cast<int>(takeableTwo.size())))];
            a.suits.push_back(su);
            TokenVector gain(params.numSuits);
            gain.at(su) = 2;
            detail::fill_returns(params, player, gain, 0, a, rng);
            break;
        }
        case ActionKind::BuyFaceUp: {
            a.kind = ActionKind::BuyFaceUp;
            auto [d, i] = buyable[static_cast<std::size_t>(
                rng.next_int(static_cast<int>(buyable.size())))];
            a.deck = d;
            a.slot = i;
            detail::fill_payment(params, player,
                                 s.faceUp[static_cast<std::size_t>(d)]
                                         [static_cast<std::size_t>(i)],
                                 a);
            break;
        }
        case ActionKind::BuyReserved: {
            a.kind = ActionKind::BuyReserved;
            auto [hidden, i] = buyableReserved[static_cast<std::size_t>(
                rng.next_int(static_cast<int>(buyableReserved.size())))];
            a.fromHidden = hidden;
            a.slot = i;
            const Card& card = hidden
                ? player.reservedHidden[static_cast<std::size_t>(i)]
                : player.reservedVisible[static_cast<std::size_t>(i)];
            detail::fill_payment(params, player, card, a);
            break;
        }
        case ActionKind::ReserveFaceUp: {
            a.kind = ActionKind::ReserveFaceUp;
            auto [d, i] = faceUpSlots[static_cast<std::size_t>(
                rng.next_int(static_cast<int>(faceUpSlots.size())))];
            a.deck = d;
            a.slot = i;
            detail::fill_returns(params, player, TokenVector(params.numSuits),
                                 jokerGain, a, rng);
            break;
        }
        case ActionKind::ReserveDeckTop: {
            a.kind = ActionKind::ReserveDeckTop;
            a.deck = reservableDecks[static_cast<std::size_t>(
                rng.next_int(static_cast<int>(reservableDecks.size())))];
            detail::fill_returns(params, player, TokenVector(params.numSuits),
                                 jokerGain, a, rng);
            break;
        }
        default: break;
    }
    return a;
}

inline Action sample_action(const GameState& s, std::uint64_t seed) {
    Rng rng(seed);
    return sample_action(s, rng);
}

namespace detail {

using Attr = std::pair<const char*, double>;

// Rule application with event emission routed through a callable, so the
// no-logger simulation path pays nothing for the logging machinery.
template <class Emit>
void apply_impl(GameState& s, const Action& a, Emit&& emit) {
    namespace et = event_type;
    const GameParams& params = s.params;
    int actor = s.currentPlayer;
    PlayerState& player = s.players[static_cast<std::size_t>(actor)];

    auto giveTokens = [&](const TokenVector& gain) {
        for (int su = 0; su < params.numSuits; ++su) {
            int amt = tv_get(gain, su);
            if (amt == 0) continue;
            player.tokens.at(su) = static_cast<std::int16_t>(player.tokens[su] + amt);
            s.tableTokens.at(su) = static_cast<std::int16_t>(s.tableTokens[su] - amt);
            emit(et::kPlayerTokenInc, actor,
                 {Attr{"suit", su}, Attr{"amount", amt}});
            emit(et::kTableTokenDec, actor,
                 {Attr{"suit", su}, Attr{"amount", amt}});
        }
    };
    auto applyReturns = [&] {
        for (int su = 0; su < params.numSuits; ++su) {
            int amt = tv_get(a.returns, su);
            if (amt == 0) continue;
            player.tokens.at(su) = static_cast<std::int16_t>(player.tokens[su] - amt);
            s.tableTokens.at(su) = static_cast<std::int16_t>(s.tableTokens[su] + amt);
            emit(et::kPlayerTokenDec, actor,
                 {Attr{"suit", su}, Attr{"amount", amt}});
            emit(et::kTableTokenInc, actor,
                 {Attr{"suit", su}, Attr{"amount", amt}});
        }
        if (a.returnJokers > 0) {
            player.jokers -= a.returnJokers;
            s.tableJokers += a.returnJokers;
            emit(et::kPlayerJokerDec, actor,
                 {Attr{"amount", a.returnJokers}});
            emit(et::kTableJokerInc, actor,
                 {Attr{"amount", a.returnJokers}});
        }
    };
    auto refill = [&](int deck) {
        auto& stack = s.decks[static_cast<std::size_t>(deck)];
        if (stack.empty()) return;
        Card drawn = stack.back();
        stack.pop_back();
        emit(et::kCardDraw, actor, {Attr{"deck", deck}});
        s.faceUp[static_cast<std::size_t>(deck)].push_back(drawn);
        emit(et::kCardPlace, actor, {Attr{"deck", deck}});
    };
    auto grantJoker = [&] {
        if (s.tableJokers > 0) {
            ++player.jokers;
            --s.tableJokers;
            emit(et::kPlayerJokerInc, actor, {Attr{"amount", 1}});
            emit(et::kTableJokerDec, actor, {Attr{"amount", 1}});
        }
    };
    auto payAndBuy = [&](Card card, bool refillAfter) {
        for (int su = 0; su < params.numSuits; ++su) {
            int amt = tv_get(a.payment, su);
            if (amt == 0) continue;
            player.tokens.at(su) = static_cast<std::int16_t>(player.tokens[su] - amt);
            s.tableTokens.at(su) = static_cast<std::int16_t>(s.tableTokens[su] + amt);
            emit(et::kPlayerTokenDec, actor,
                 {Attr{"suit", su}, Attr{"amount", amt}});
            emit(et::kTableTokenInc, actor,
                 {Attr{"suit", su}, Attr{"amount", amt}});
        }
        if (a.paymentJokers > 0) {
            player.jokers -= a.paymentJokers;
            s.tableJokers += a.paymentJokers;
            emit(et::kPlayerJokerDec, actor,
                 {Attr{"amount", a.paymentJokers}});
            emit(et::kTableJokerInc, actor,
                 {Attr{"amount", a.paymentJokers}});
        }
        emit(et::kCardBuy, actor, {Attr{"deck", card.deckTier}});
        if (card.points > 0) {
            player.points += card.points;
            emit(et::kPointsFromCard, actor, {Attr{"points", card.points}});
        }
        ++player.purchasedBonuses.at(card.bonusSuit);
        player.purchasedCards.push_back(card);
        if (refillAfter) refill(card.deckTier);
    };

    switch (a.kind) {
        case ActionKind::Pass:
            break;
        case ActionKind::TakeDifferent: {
            TokenVector gain(params.numSuits);
            for (int su : a.suits) gain.at(su) = 1;
            giveTokens(gain);
            applyReturns();
            break;
        }
        case ActionKind::TakeSame: {
            TokenVector gain(params.numSuits);
            gain.at(a.suits[0]) = 2;
            giveTokens(gain);
            applyReturns();
            break;
        }
        case ActionKind::BuyFaceUp: {
            auto& row = s.faceUp[static_cast<std::size_t>(a.deck)];
            Card card = row[static_cast<std::size_t>(a.slot)];
            row.erase(row.begin() + a.slot);
            payAndBuy(card, true);
            break;
        }
        case ActionKind::BuyReserved: {
            auto& list = a.fromHidden ? player.reservedHidden
                                      : player.reservedVisible;
            Card card = list[static_cast<std::size_t>(a.slot)];
            list.erase(list.begin() + a.slot);
            payAndBuy(card, false);
            break;
        }
        case ActionKind::ReserveFaceUp: {
            auto& row = s.faceUp[static_cast<std::size_t>(a.deck)];
            Card card = row[static_cast<std::size_t>(a.slot)];
            row.erase(row.begin() + a.slot);
            player.reservedVisible.push_back(card);
            emit(et::kCardReserve, actor, {Attr{"deck", a.deck}});
            refill(a.deck);
            grantJoker();
            applyReturns();
            break;
        }
        case ActionKind::ReserveDeckTop: {
            auto& stack = s.decks[static_cast<std::size_t>(a.deck)];
            Card card = stack.back();
            stack.pop_back();
            player.reservedHidden.push_back(card);
            emit(et::kCardHidden, actor, {Attr{"deck", a.deck}});
            grantJoker();
            applyReturns();
            break;
        }
    }

    // Lowest-index qualifying noble auto-awarded at end of the acting
    // player's turn. Points event is engine-raised.
    for (std::size_t i = 0; i < s.nobles.size(); ++i) {
        const Noble& noble = s.nobles[i];
        bool ok = true;
        for (int su = 0; su < params.numSuits; ++su)
            if (player.purchasedBonuses[su] < tv_get(noble.requirement, su)) {
                ok = false;
                break;
            }
        if (!ok) continue;
        int pts = noble.points;
        s.nobles.erase(s.nobles.begin() + static_cast<std::ptrdiff_t>(i));
        emit(et::kNobleTake, actor, {});
        emit(et::kNobleReceive, actor, {});
        player.points += pts;
        emit(et::kPointsFromNoble, kEngineWho, {Attr{"points", pts}});
        break;
    }

    ++s.tick;
    s.currentPlayer = (s.currentPlayer + 1) % params.numPlayers;

    // Game ends once the round completes with somebody at the threshold, so
    // all players get equal turns.
    if (s.currentPlayer == 0) {
        for (const PlayerState& p : s.players)
            if (p.points >= params.pointsToWin) {
                s.terminalFlag = true;
                break;
            }
        if (s.terminalFlag) {
            int best = 0;
            for (int p = 1; p < params.numPlayers; ++p) {
                const PlayerState& cand = s.players[static_cast<std::size_t>(p)];
                const PlayerState& cur = s.players[static_cast<std::size_t>(best)];
                if (cand.points > cur.points ||
                    (cand.points == cur.points &&
                     cand.purchasedCards.size() < cur.purchasedCards.size()))
                    best = p;
            }
            s.winnerIndex = best;
        }
    }
}

struct EventBuilder {
    GameState& s;
    std::shared_ptr<const ActionTrigger> trigger;
    std::vector<Event>* out;

    void operator()(int type, int who, std::initializer_list<Attr> attrs) {
        Event e;
        e.tick = s.tick;
        e.who = who;
        e.type = type;
        e.trigger = trigger;
        e.attributes.reserve(attrs.size());
        e.signature.reserve(attrs.size());
        for (const Attr& kv : attrs) {
            e.attributes.emplace_back(kv.first, kv.second);
            e.signature.emplace_back(kv.first);
        }
        for (EventLogger* logger : s.loggers()) logger->buffer.push_back(e);
        if (out) out->push_back(std::move(e));
    }
};

} // namespace detail

// Applies a legal action in place, returning the raised events; events are
// also forwarded to every attached logger. Illegal actions are rejected with
// no state change.
inline std::vector<Event> apply_action(GameState& s, const Action& a) {
    if (s.terminalFlag)
        throw IllegalActionError("apply_action on terminal state");
    if (!is_legal(s, a)) throw IllegalActionError("illegal action");
    std::vector<Event> events;
    auto trigger = std::make_shared<ActionTrigger>(
        ActionTrigger{s.currentPlayer, std::make_shared<Action>(a)});
    detail::apply_impl(s, a, detail::EventBuilder{s, trigger, &events});
    return events;
}

// Same as apply_action but only materializes events when loggers are
// attached; the hot path for plain simulation.
inline void step(GameState& s, const Action& a) {
    if (s.terminalFlag)
        throw IllegalActionError("apply_action on terminal state");
    if (!is_legal(s, a)) throw IllegalActionError("illegal action");
    if (s.has_loggers()) {
        auto trigger = std::make_shared<ActionTrigger>(
            ActionTrigger{s.currentPlayer, std::make_shared<Action>(a)});
        detail::apply_impl(s, a, detail::EventBuilder{s, trigger, nullptr});
    } else {
        detail::apply_impl(s, a,
                           [](int, int, std::initializer_list<detail::Attr>) {});
    }
}

inline bool is_terminal(const GameState& s) { return s.terminalFlag; }

inline int winner(const GameState& s) {
    if (!s.terminalFlag) throw std::logic_error("winner of non-terminal state");
    return s.winnerIndex;
}

inline int score(const GameState& s, int player) {
    if (player < 0 || player >= s.params.numPlayers)
        throw std::out_of_range("player index");
    return s.players[static_cast<std::size_t>(player)].points;
}

// Deep, independent copy; loggers are not carried over.
inline GameState clone_state(const GameState& s) { return GameState(s); }

inline GameState new_game(const GameParams& params,
                          const std::vector<Card>& cards,
                          const std::vector<Noble>& nobles,
                          std::uint64_t seed) {
    params.validate();
    std::vector<std::vector<Card>> tiers(
        static_cast<std::size_t>(params.numDecks));
    for (const Card& c : cards) {
        if (c.deckTier < 0 || c.deckTier >= params.numDecks)
            throw ConfigError("card tier out of range");
        if (c.bonusSuit < 0 || c.bonusSuit >= params.numSuits)
            throw ConfigError("card bonus suit out of range");
        for (int s = 0; s < c.cost.size(); ++s)
            if (c.cost[s] < 0) throw ConfigError("negative card cost");
        tiers[static_cast<std::size_t>(c.deckTier)].push_back(c);
    }
    for (const auto& tier : tiers)
        if (tier.empty()) throw ConfigError("empty card tier");
    if (static_cast<int>(nobles.size()) < params.nobleCount)
        throw ConfigError("not enough nobles");

    GameState s;
    s.params = params;
    s.decks = std::move(tiers);
    s.faceUp.resize(static_cast<std::size_t>(params.numDecks));
    for (int d = 0; d < params.numDecks; ++d) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(d)));
        detail::shuffle(s.decks[static_cast<std::size_t>(d)], rng);
        for (int i = 0; i < params.faceUpPerDeck; ++i) {
            auto& stack = s.decks[static_cast<std::size_t>(d)];
            if (stack.empty()) break;
            s.faceUp[static_cast<std::size_t>(d)].push_back(stack.back());
            stack.pop_back();
        }
    }
    {
        std::vector<Noble> pool = nobles;
        Rng rng(derive_seed(seed, 100));
        for (int i = static_cast<int>(pool.size()) - 1; i > 0; --i)
            std::swap(pool[static_cast<std::size_t>(i)],
                      pool[static_cast<std::size_t>(rng.next_int(i + 1))]);
        pool.resize(static_cast<std::size_t>(params.nobleCount));
        s.nobles = std::move(pool);
    }
    s.tableTokens = TokenVector(params.numSuits);
    for (int su = 0; su < params.numSuits; ++su)
        s.tableTokens.at(su) = static_cast<std::int16_t>(params.tokensPerSuit);
    s.tableJokers = params.jokerCount;
    s.players.resize(static_cast<std::size_t>(params.numPlayers));
    for (PlayerState& p : s.players) {
        p.tokens = TokenVector(params.numSuits);
        p.purchasedBonuses = TokenVector(params.numSuits);
    }
    return s;
}

// Observation copy for a planner: information unseen by `observer` (face-down
// deck cards, opponents' hidden reserves) is reshuffled under the planner's
// seed. Opponents keep the same hidden-reserve counts.
inline GameState determinize(const GameState& s, int observer,
                             std::uint64_t seed) {
    GameState d = clone_state(s);
    std::vector<std::vector<Card>> pools(
        static_cast<std::size_t>(d.params.numDecks)); // per deck tier
    for (int t = 0; t < d.params.numDecks; ++t) {
        auto& stack = d.decks[static_cast<std::size_t>(t)];
        pools[t].insert(pools[t].end(), stack.begin(), stack.end());
        stack.clear();
    }
    std::vector<std::pair<int, int>> hiddenSlots; // (player, index)
    for (int p = 0; p < d.params.numPlayers; ++p) {
        if (p == observer) continue;
        auto& hidden = d.players[static_cast<std::size_t>(p)].reservedHidden;
        for (int i = 0; i < static_cast<int>(hidden.size()); ++i) {
            pools[hidden[static_cast<std::size_t>(i)].deckTier].push_back(
                hidden[static_cast<std::size_t>(i)]);
            hiddenSlots.emplace_back(p, i);
        }
    }
    Rng rng(seed);
    for (int t = 0; t < d.params.numDecks; ++t)
        detail::shuffle(pools[t], rng);
    // Hidden reserves are redrawn from the matching tier, remaining cards
    // rebuild the face-down stacks.
    for (auto [p, i] : hiddenSlots) {
        Card& slot =
            d.players[static_cast<std::size_t>(p)].reservedHidden[static_cast<std::size_t>(i)];
        auto& pool = pools[slot.deckTier];
        slot = pool.back();
        pool.pop_back();
    }
    for (int t = 0; t < d.params.numDecks; ++t)
        d.decks[static_cast<std::size_t>(t)] = std::move(pools[t]);
    return d;
}

} // namespace r2

#endif
