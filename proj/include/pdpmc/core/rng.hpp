#pragma once

#include <cstdint>
#include <random>

namespace pdpmc {

/// Reproducible stream of uniform variates keyed by (seed, stream id, substream).
///
/// The engine state is a pure function of the key, so trajectory r always sees
/// the same variates no matter which worker runs it. Each stream owns its
/// engine; copies continue independently from the copied position.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

    /// Uniform variate in the open interval (0, 1).
    double uniform() {
        // 53 random bits, shifted by half an ulp so 0 and 1 are unreachable.
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Independent stream derived from this key; branch nu uses substream(nu + 1).
    RngStream substream(std::uint64_t k) const { return RngStream(seed_, stream_, k); }
    RngStream branch(int nu) const { return substream(static_cast<std::uint64_t>(nu) + 1); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    std::uint64_t substream_index() const { return substream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t substream_;
    std::mt19937_64 engine_;
};

} // namespace pdpmc
