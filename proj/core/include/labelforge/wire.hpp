#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "labelforge/optimizer.hpp"

namespace labelforge::wire {

// Inter-worker message inventory.
enum class MessageKind : std::uint8_t {
  scatter = 1,
  gather = 2,
  broadcast = 3,
  exchange = 4,
  result = 5,
  stop = 6,
  failure = 7,
};

// Frame layout, little-endian throughout:
//   u32 length of everything after this field
//   u8  message kind
//   u16 worker id
//   u32 generation
//   Q x u8 genes
//   f64 fitness (IEEE-754 bits)
inline constexpr std::size_t kLengthPrefix = 4;
inline constexpr std::size_t kHeaderSize = 1 + 2 + 4;
inline constexpr std::size_t kFitnessSize = 8;

struct Frame {
  MessageKind kind = MessageKind::exchange;
  std::uint16_t worker = 0;
  std::uint32_t generation = 0;
  Chromosome chromosome;

  friend bool operator==(const Frame&, const Frame&) = default;
};

std::vector<std::byte> encode(const Frame& frame);

// Throws ParseError on truncated or inconsistent input.
Frame decode(std::span<const std::byte> bytes);

}  // namespace labelforge::wire
