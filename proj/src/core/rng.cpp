#include "pdpmc/core/rng.hpp"

namespace pdpmc {

namespace {

// splitmix64 finalizer; used only to hash the stream key into an engine seed.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t key_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ stream);
    h = mix64(h ^ (substream * 0xd1b54a32d192ed03ULL));
    return h;
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
    : seed_(seed), stream_(stream), substream_(substream),
      engine_(key_seed(seed, stream, substream)) {}

} // namespace pdpmc
