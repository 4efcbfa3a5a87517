#pragma once

#include <cstdint>

namespace cbr {

// SplitMix64 (Steele, Lea & Flood). Every random decision in the library draws
// from this generator so results are reproducible across platforms and
// standard library implementations; std:: distributions are never used.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // 53-bit uniform in [0, 1).
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Unbiased integer in [0, bound) by Lemire's multiply-and-reject. bound must be > 0.
    std::uint64_t bounded(std::uint64_t bound) noexcept {
        std::uint64_t x = next();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = next();
                m = static_cast<__uint128_t>(x) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

// Child seed for an independent sub-stream (run index, purpose tag, retry count...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    SplitMix64 mix(base ^ (stream * 0xd1b54a32d192ed03ULL + 0x8bb84b93962eacc9ULL));
    mix.next();
    return mix.next();
}

}  // namespace cbr
