#pragma once

// Compiles Mission-Control-authored CSV instruction files into InstructionSets.
//
// One row per keyframe. Rows of a step are contiguous; a cue's keyframes are
// consecutive rows sharing (step_index, cue_index). A step without cues is a
// single row whose cue_index, asset_id, highlight and pose fields are empty.

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mref/instruction.hpp"

namespace mref {

inline constexpr std::size_t kCsvFieldCount = 17;
inline constexpr std::string_view kCsvHeader =
    "step_index,step_text,key_phrase_hint,cue_index,asset_id,highlight,t_offset_s,px,py,pz,qx,qy,qz,qw,sx,sy,sz";

enum class CompileErrc {
  BadHeader,
  BadFieldCount,
  BadNumber,
  BadStepOrder,
  EmptyText,
  BadCueOrder,
  InconsistentRow,
  BadAsset,
  NonUnitQuaternion,
  BadTrack,
};
std::string_view to_string(CompileErrc code);

struct CompileError {
  std::size_t line = 1;
  CompileErrc code;
  std::string message;
};

struct CsvRow {
  std::array<std::string, kCsvFieldCount> fields;
  std::size_t line = 0;
};

using ParseResult = std::variant<std::vector<CsvRow>, std::vector<CompileError>>;
using CompileResult = std::variant<InstructionSet, std::vector<CompileError>>;

/// Splits the document into rows. Double quotes delimit fields, `""` inside a
/// quoted field is a literal quote. Either every row or every error is returned.
ParseResult parse_csv(std::string_view text);

CompileResult compile(const std::vector<CsvRow>& rows, const std::string& set_id, const AssetRef& target_asset);

/// parse_csv followed by compile.
CompileResult compile_document(std::string_view text, const std::string& set_id, const AssetRef& target_asset);

std::string format_error(const CompileError& error);

}  // namespace mref
