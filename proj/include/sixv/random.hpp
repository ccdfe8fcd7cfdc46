#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace sixv {

// Philox4x32-10 block function (counter-based; no state besides the counter).
inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key) {
    constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const uint64_t p0 = static_cast<uint64_t>(M0) * ctr[0];
        const uint64_t p1 = static_cast<uint64_t>(M1) * ctr[2];
        const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
        const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

// Deterministic stream: key = seed, counter = (draw index, stream id).
class RngStream {
public:
    RngStream(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

    // UniformRandomBitGenerator interface, so standard distributions can draw from the stream.
    using result_type = uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }
    result_type operator()() { return next_u64(); }

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

    uint64_t next_u64() {
        if (have_ == 0) refill();
        return buf_[--have_];
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

private:
    void refill() {
        const std::array<uint32_t, 4> ctr = {static_cast<uint32_t>(counter_), static_cast<uint32_t>(counter_ >> 32),
                                             static_cast<uint32_t>(stream_), static_cast<uint32_t>(stream_ >> 32)};
        const auto out = philox4x32(ctr, {static_cast<uint32_t>(seed_), static_cast<uint32_t>(seed_ >> 32)});
        ++counter_;
        buf_[0] = (static_cast<uint64_t>(out[1]) << 32) | out[0];
        buf_[1] = (static_cast<uint64_t>(out[3]) << 32) | out[2];
        // consumed from the back, so keep draw order = block order
        std::swap(buf_[0], buf_[1]);
        have_ = 2;
    }

    uint64_t seed_;
    uint64_t stream_;
    uint64_t counter_ = 0;
    uint64_t buf_[2] = {0, 0};
    int have_ = 0;
};

// Packs (sample, sweep, row) into one stream id: 24 + 20 + 20 bits.
inline uint64_t stream_id(uint64_t sample, uint64_t sweep, uint64_t row) {
    if (sample >= (1ull << 24) || sweep >= (1ull << 20) || row >= (1ull << 20))
        throw std::invalid_argument("stream id component out of range");
    return (sample << 40) | (sweep << 20) | row;
}

}  // namespace sixv
