#pragma once

#include <array>
#include <cstdint>

namespace mcrelay {

/// SplitMix64 finalizer. Used to derive well-mixed seeds from (seed, counter) pairs.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/**
 * Counter-addressed random stream.
 *
 * The state is a pure function of (master_seed, stream_index), so trial i of a
 * Monte Carlo run sees the same draws no matter which thread runs it or in
 * which order. Output is xoshiro256** seeded through SplitMix64.
 */
class TrialStream {
public:
    using result_type = std::uint64_t;

    TrialStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept {
        std::uint64_t x = splitmix64(master_seed) ^ splitmix64(stream_index + 0x632be59bd9b4e019ULL);
        for (auto& word : state_) {
            x = splitmix64(x);
            word = x;
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double on the open interval (0, 1); never returns 0 or 1.
    double uniform_open() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace mcrelay
