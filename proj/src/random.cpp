#include "levelflow/random.hpp"

#include <array>

namespace levelflow {

Engine make_stream(std::uint64_t seed, std::uint64_t index) {
  const std::array<std::uint32_t, 5> words = {
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
      0x6c65766cu};
  std::seed_seq sequence(words.begin(), words.end());
  return Engine(sequence);
}

}  // namespace levelflow
