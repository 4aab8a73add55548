#include "gsrisk/random.hpp"

namespace gsrisk {

Rng make_stream(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t substream) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffULL); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(master_seed), hi(master_seed), lo(stream), hi(stream), lo(substream),
                    hi(substream)};
  return Rng(seq);
}

}  // namespace gsrisk
