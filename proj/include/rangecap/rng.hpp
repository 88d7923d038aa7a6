#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace rangecap {

/// Philox4x32-10 block function (Salmon et al., Random123).
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept;
};

/// splitmix64 finalizer; used to derive stream ids and element keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Combine a purpose tag and indices into one 64-bit stream id.
constexpr std::uint64_t stream_id(std::initializer_list<std::uint64_t> parts) noexcept
{
    std::uint64_t h = 0x6A09E667F3BCC909ULL;
    for (auto p : parts) {
        h = mix64(h ^ mix64(p));
    }
    return h;
}

// Purpose tags for stream derivation. Values are part of the reproducibility
// contract: changing them changes every report.
namespace streams {
inline constexpr std::uint64_t kPath = 1;
inline constexpr std::uint64_t kEscape = 2;
inline constexpr std::uint64_t kGreenMc = 3;
inline constexpr std::uint64_t kBacktrack = 4;
inline constexpr std::uint64_t kGeometric = 5;
inline constexpr std::uint64_t kExperiment = 6;
}  // namespace streams

/// Counter-based generator keyed by (seed, stream). Draw i of a stream is a
/// pure function of (seed, stream, i), so results do not depend on which
/// thread consumes the stream or in what order streams are visited.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream)
    {
    }

    std::uint32_t next_u32() noexcept
    {
        if (used_ == 4) {
            refill();
        }
        return buffer_[used_++];
    }

    std::uint64_t next_u64() noexcept
    {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform integer in [0, bound); exact (Lemire's method with rejection).
    std::uint32_t uniform_index(std::uint32_t bound) noexcept
    {
        std::uint64_t m = std::uint64_t{next_u32()} * bound;
        auto low = static_cast<std::uint32_t>(m);
        if (low < bound) {
            std::uint32_t threshold = (0u - bound) % bound;
            while (low < threshold) {
                m = std::uint64_t{next_u32()} * bound;
                low = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    std::uint64_t blocks_used() const noexcept { return block_; }

private:
    void refill() noexcept;

    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Philox4x32::Counter buffer_{};
    int used_ = 4;
};

}  // namespace rangecap
