#pragma once

#include <cstdint>
#include <initializer_list>

namespace icbox {

// Counter-style SplitMix64 stream. Substreams are derived from a seed plus a
// list of integer labels, so independent work items (sweep rows, protocol
// trials, ...) can be given disjoint streams that do not depend on scheduling
// order. One next_u64() call advances the state by the SplitMix64 increment
// and returns the finalized value.
class RngStream {
public:
    explicit RngStream(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return finalize(state_);
    }

    // Uniform double in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Lowest k bits of one draw, 1 <= k <= 64.
    std::uint64_t next_bits(int k) {
        return next_u64() >> (64 - k);
    }

    static std::uint64_t finalize(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// Derive a substream by avalanching each label into the running state.
// Distinct label sequences give statistically independent streams.
inline RngStream substream(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
    std::uint64_t s = RngStream::finalize(seed ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t label : labels) {
        s = RngStream::finalize(s ^ (label + 0x9e3779b97f4a7c15ULL));
    }
    return RngStream(s);
}

// Small helper for labelling streams with short strings ("sweep", "proto", ...).
constexpr std::uint64_t label_tag(const char* s) {
    std::uint64_t v = 1469598103934665603ULL; // FNV-1a
    while (*s) {
        v ^= static_cast<unsigned char>(*s++);
        v *= 1099511628211ULL;
    }
    return v;
}

} // namespace icbox
