#pragma once

#include <cstdint>
#include <random>

namespace jdgamma {

using Engine = std::mt19937_64;

//! One step of the SplitMix64 sequence; advances state.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for stream `stream` derived from `base`. Streams are independent of
/// evaluation order, so replicate r always sees the same numbers regardless
/// of how replicates are scheduled across threads.
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream);

//! Engine fully initialised from a 64-bit seed (state filled via SplitMix64).
Engine make_engine(std::uint64_t seed);

} // namespace jdgamma
