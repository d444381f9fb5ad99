#include "jdgamma/rng.hpp"

#include <array>

namespace jdgamma {

std::uint64_t splitmix64(std::uint64_t& state)
{
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream)
{
  std::uint64_t state = base;
  const std::uint64_t mixed_base = splitmix64(state);
  std::uint64_t s2 = mixed_base ^ (stream * 0xD1B54A32D192ED03ULL);
  splitmix64(s2);
  return splitmix64(s2);
}

Engine make_engine(std::uint64_t seed)
{
  std::array<std::uint32_t, 16> words{};
  std::uint64_t state = seed;
  for (std::size_t i = 0; i < words.size(); i += 2) {
    const std::uint64_t v = splitmix64(state);
    words[i] = static_cast<std::uint32_t>(v);
    words[i + 1] = static_cast<std::uint32_t>(v >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

} // namespace jdgamma
