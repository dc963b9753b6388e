#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace bspm {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function (Salmon et al., SC'11).
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

//---------------------------------------------------------------------------//
/*!
 * Counter-based random stream.
 *
 * The 64-bit seed is the Philox key; the 128-bit counter is split into a
 * 64-bit block index (low words) and the 64-bit stream index (high words).
 * Stream `i` of an experiment is therefore a pure function of `(seed, i)`,
 * and any number of streams can be created independently of one another
 * and of scheduling order.
 *
 * A single stream is not safe to sample from concurrently; distinct
 * streams share nothing.
 */
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_index);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    //! Uniform on the open interval (0, 1), 53 bits of resolution.
    double uniform();

    //! Standard normal via the Marsaglia polar method (pairs cached).
    double standard_normal();

  private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_index_;
    std::uint64_t block_ = 0;
    PhiloxCounter buffer_{};
    unsigned position_ = 4;
    std::optional<double> spare_normal_;
};

}  // namespace bspm
