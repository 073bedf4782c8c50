#ifndef R2_EVENTS_HPP
#define R2_EVENTS_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace r2 {

struct Action;

// The acting player behind an engine-raised event (noble points and the like).
struct ActionTrigger {
    int player = -1;
    std::shared_ptr<const Action> action;
};

inline constexpr int kEngineWho = -1;
inline constexpr int kNumEventTypes = 18;

// Raw event type ids. Fixed catalogue; ids are part of the external contract
// (weight files index them).
namespace event_type {
inline constexpr int kNobleTake = 0;
inline constexpr int kTableTokenInc = 1;
inline constexpr int kTableTokenDec = 2;
inline constexpr int kTableJokerInc = 3;
inline constexpr int kTableJokerDec = 4;
inline constexpr int kCardDraw = 5;
inline constexpr int kCardPlace = 6;
inline constexpr int kNoblePlace = 7;
inline constexpr int kPlayerTokenInc = 8;
inline constexpr int kPlayerTokenDec = 9;
inline constexpr int kPlayerJokerInc = 10;
inline constexpr int kPlayerJokerDec = 11;
inline constexpr int kCardHidden = 12;
inline constexpr int kCardReserve = 13;
inline constexpr int kNobleReceive = 14;
inline constexpr int kCardBuy = 15;
inline constexpr int kPointsFromCard = 16;
inline constexpr int kPointsFromNoble = 17;
} // namespace event_type

enum class DurationType { Instant, Delayed, Durative };

struct Event {
    int tick = 0;
    int who = kEngineWho; // player index, or kEngineWho for engine-raised
    int type = 0;
    int duration = 0;
    DurationType durationType = DurationType::Instant;
    std::vector<std::pair<std::string, double>> attributes;
    std::vector<std::string> signature;
    std::shared_ptr<const ActionTrigger> trigger; // null when not action-caused

    // Player the event counts for: `who`, or the trigger's actor for
    // engine-raised events. kEngineWho if neither applies.
    int attributed_to() const {
        if (who != kEngineWho) return who;
        return trigger ? trigger->player : kEngineWho;
    }
};

// Maps raw type ids to feature group ids; -1 discards the event.
struct TypeMapping {
    std::array<int, kNumEventTypes> table{};
    int groupCount = 0;

    static TypeMapping from_table(const std::array<int, kNumEventTypes>& t) {
        TypeMapping m;
        m.table = t;
        int hi = -1;
        for (int v : t) {
            if (v < -1) throw std::invalid_argument("type mapping entry < -1");
            if (v > hi) hi = v;
        }
        m.groupCount = hi + 1;
        return m;
    }

    // Identity over the 18 raw types.
    static const TypeMapping& identity() {
        static const TypeMapping m = from_table(
            {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17});
        return m;
    }

    // Hand-crafted grouping into 5 macro-features:
    //   0 gaining tokens/jokers, 1 hidden reserve, 2 face-up reserve,
    //   3 noble received, 4 points gained. Everything else discarded.
    static const TypeMapping& hand_crafted() {
        static const TypeMapping m = from_table(
            {-1, -1, -1, -1, -1, -1, -1, -1, 0, -1, 0, -1, 1, 2, 3, -1, 4, 4});
        return m;
    }
};

inline constexpr int kDiscard = -1;

inline int map_type(const TypeMapping& m, int rawType) {
    if (rawType < 0 || rawType >= kNumEventTypes)
        throw std::out_of_range("event type out of range");
    return m.table[rawType];
}

// Buffers every event raised by the state it is attached to, in emission order.
struct EventLogger {
    std::vector<Event> buffer;
    int owner = 0; // player index the logger evaluates for

    void clear() { buffer.clear(); }
};

// Synthesis function: counts events per mapped group, keeping only events
// attributed to `player`. Magnitudes in attributes are deliberately unused.
inline std::vector<double> synthesize(const std::vector<Event>& events,
                                      int player, const TypeMapping& m) {
    std::vector<double> theta(static_cast<std::size_t>(m.groupCount), 0.0);
    for (const Event& e : events) {
        if (e.attributed_to() != player) continue;
        int g = map_type(m, e.type);
        if (g == kDiscard) continue;
        theta[static_cast<std::size_t>(g)] += 1.0;
    }
    return theta;
}

} // namespace r2

#endif
