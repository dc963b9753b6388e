#include "bspm/random.hpp"

#include <cmath>

namespace bspm {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
    std::uint64_t const product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

inline PhiloxCounter philox_round(PhiloxCounter const& ctr,
                                  PhiloxKey const& key) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        counter = philox_round(counter, key);
    }
    return counter;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), stream_index_(stream_index) {}

void RandomStream::refill() {
    PhiloxCounter const ctr{static_cast<std::uint32_t>(block_),
                            static_cast<std::uint32_t>(block_ >> 32),
                            static_cast<std::uint32_t>(stream_index_),
                            static_cast<std::uint32_t>(stream_index_ >> 32)};
    PhiloxKey const key{static_cast<std::uint32_t>(seed_),
                        static_cast<std::uint32_t>(seed_ >> 32)};
    buffer_ = philox4x32_10(ctr, key);
    ++block_;
    position_ = 0;
}

std::uint32_t RandomStream::next_u32() {
    if (position_ == buffer_.size()) {
        refill();
    }
    return buffer_[position_++];
}

std::uint64_t RandomStream::next_u64() {
    std::uint64_t const hi = next_u32();
    return (hi << 32) | next_u32();
}

double RandomStream::uniform() {
    // Midpoint of one of 2^53 equal cells, so never exactly 0 or 1.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::standard_normal() {
    if (spare_normal_) {
        double const value = *spare_normal_;
        spare_normal_.reset();
        return value;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double const factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * factor;
    return u * factor;
}

}  // namespace bspm
