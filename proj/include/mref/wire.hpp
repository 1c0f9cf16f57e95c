#pragma once

// Canonical binary encoding of InstructionSets for uplink.
//
// Layout, all integers little-endian, floats IEEE-754 binary32:
//   "MRIS" | version u16 = 1 | set_id str | target_asset str | step_count u16
//   per step:     hint str | text str | cue_count u8
//   per cue:      asset_id str | highlight u8 | keyframe_count u16
//   per keyframe: t f32 | px py pz f32 | qx qy qz qw f32 | sx sy sz f32
//   CRC-32 (IEEE) of every preceding byte, u32
// where `str` is a u16 byte length followed by UTF-8 bytes.

#include <cstdint>
#include <span>
#include <vector>

#include "mref/error.hpp"
#include "mref/instruction.hpp"

namespace mref {

enum class WireErrc { LimitExceeded, BadMagic, BadVersion, CrcMismatch, Truncated, Malformed };
std::string_view to_string(WireErrc code);
using WireError = CodedError<WireErrc>;

inline constexpr std::uint16_t kWireVersion = 1;
inline constexpr std::size_t kKeyframeWireBytes = 11 * 4;

struct WireDocument {
  std::vector<std::uint8_t> bytes;

  friend bool operator==(const WireDocument&, const WireDocument&) = default;
};

struct SizeReport {
  std::uint64_t wire_bytes = 0;
  std::uint64_t referenced_asset_bytes = 0;
  double reduction_ratio = 0.0;
};

std::uint32_t crc32_ieee(std::span<const std::uint8_t> data);

/// True when the trailer matches the CRC of the preceding bytes.
bool crc_ok(std::span<const std::uint8_t> bytes);

WireDocument encode(const InstructionSet& set);
InstructionSet decode(std::span<const std::uint8_t> bytes);
inline InstructionSet decode(const WireDocument& doc) { return decode(std::span<const std::uint8_t>(doc.bytes)); }

SizeReport size_report(const InstructionSet& set, const AssetCatalog& catalog);

}  // namespace mref
