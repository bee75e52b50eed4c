#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace levelflow {

using Engine = std::mt19937_64;

/// Independent substream `index` of the run seeded by `seed`. The pair is
/// expanded through std::seed_seq, so substreams depend only on
/// (seed, index) and never on the thread that consumes them.
Engine make_stream(std::uint64_t seed, std::uint64_t index);

/// Batch samplers draw in fixed-size blocks, one substream per block.
inline constexpr std::size_t kSampleBlock = 4096;

}  // namespace levelflow
