#ifndef R2_RNG_HPP
#define R2_RNG_HPP

#include <cstdint>
#include <random>

namespace r2 {

// splitmix64, used for seed derivation so that streams fanned out from a
// master seed are decorrelated and independent of evaluation order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based seed split: derive(seed, i) gives stream i of a master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x51ed27f4a7c15ULL));
}

// Seeded generator wrapper. Bounded draws avoid std::uniform_int_distribution
// (implementation-defined) so sequences are identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, n), n > 0. Lemire multiply-shift.
    int next_int(int n) {
        return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                                 static_cast<std::uint64_t>(n)) >> 64);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool next_bool(double p) { return next_double() < p; }

private:
    std::mt19937_64 gen_;
};

} // namespace r2

#endif
