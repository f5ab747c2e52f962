#include "labelforge/wire.hpp"

#include <bit>
#include <cstring>

#include "labelforge/errors.hpp"

namespace labelforge::wire {
namespace {

template <class T>
void put(std::vector<std::byte>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::byte>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

template <class T>
T get(std::span<const std::byte> in, std::size_t offset) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(in[offset + i])) << (8 * i);
  }
  return static_cast<T>(v);
}

}  // namespace

std::vector<std::byte> encode(const Frame& frame) {
  const std::size_t body = kHeaderSize + frame.chromosome.genes.size() + kFitnessSize;
  std::vector<std::byte> out;
  out.reserve(kLengthPrefix + body);
  put(out, static_cast<std::uint32_t>(body));
  put(out, static_cast<std::uint8_t>(frame.kind));
  put(out, frame.worker);
  put(out, frame.generation);
  for (Gene g : frame.chromosome.genes) put(out, static_cast<std::uint8_t>(g));
  put(out, std::bit_cast<std::uint64_t>(frame.chromosome.fitness));
  return out;
}

Frame decode(std::span<const std::byte> bytes) {
  if (bytes.size() < kLengthPrefix + kHeaderSize + kFitnessSize) throw ParseError("frame too short");
  const auto body = get<std::uint32_t>(bytes, 0);
  if (bytes.size() != kLengthPrefix + body) throw ParseError("frame length prefix does not match payload");
  Frame frame;
  const auto kind = get<std::uint8_t>(bytes, 4);
  if (kind < 1 || kind > 7) throw ParseError("unknown message kind");
  frame.kind = static_cast<MessageKind>(kind);
  frame.worker = get<std::uint16_t>(bytes, 5);
  frame.generation = get<std::uint32_t>(bytes, 7);
  const std::size_t genes = body - kHeaderSize - kFitnessSize;
  frame.chromosome.genes.resize(genes);
  for (std::size_t i = 0; i < genes; ++i) {
    const auto g = get<std::uint8_t>(bytes, kLengthPrefix + kHeaderSize + i);
    if (g > kMaxGene) throw ParseError("gene out of range in frame");
    frame.chromosome.genes[i] = g;
  }
  frame.chromosome.fitness = std::bit_cast<double>(get<std::uint64_t>(bytes, kLengthPrefix + kHeaderSize + genes));
  return frame;
}

}  // namespace labelforge::wire
