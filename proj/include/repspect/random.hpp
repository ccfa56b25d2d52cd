#pragma once

#include <cstdint>
#include <random>

namespace repspect {

using Rng = std::mt19937_64;

/// Independent stream for (master seed, worker index, purpose tag). The
/// mapping is a pure function of its arguments so parallel runs replay
/// exactly.
inline Rng make_stream(std::uint64_t master, std::uint64_t worker = 0, std::uint64_t tag = 0) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(master), hi(master), lo(worker), hi(worker), lo(tag), hi(tag), 0x9e3779b9u};
  return Rng(seq);
}

}  // namespace repspect
