#include "mref/authoring.hpp"

#include <cmath>
#include <optional>

#include "mref/text.hpp"

namespace mref {

std::string_view to_string(CompileErrc code) {
  switch (code) {
    case CompileErrc::BadHeader: return "BAD_HEADER";
    case CompileErrc::BadFieldCount: return "BAD_FIELD_COUNT";
    case CompileErrc::BadNumber: return "BAD_NUMBER";
    case CompileErrc::BadStepOrder: return "BAD_STEP_ORDER";
    case CompileErrc::EmptyText: return "EMPTY_TEXT";
    case CompileErrc::BadCueOrder: return "BAD_CUE_ORDER";
    case CompileErrc::InconsistentRow: return "INCONSISTENT_ROW";
    case CompileErrc::BadAsset: return "BAD_ASSET";
    case CompileErrc::NonUnitQuaternion: return "NON_UNIT_QUATERNION";
    case CompileErrc::BadTrack: return "BAD_TRACK";
  }
  return "UNKNOWN";
}

std::string format_error(const CompileError& error) {
  return "line " + std::to_string(error.line) + ": " + std::string(to_string(error.code)) + ": " + error.message;
}

namespace {

enum Field : std::size_t {
  kStepIndex, kStepText, kHint, kCueIndex, kAssetId, kHighlight, kTime,
  kPx, kPy, kPz, kQx, kQy, kQz, kQw, kSx, kSy, kSz,
};

// Splits one physical line into fields. Returns nullopt for an unterminated quote.
std::optional<std::vector<std::string>> split_record(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back().push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  if (quoted) {
    return std::nullopt;
  }
  return fields;
}

struct Keyed {
  std::size_t step = 0;
  bool has_cue = false;
  std::size_t cue = 0;
  std::string asset;
  bool highlight = false;
  CueKeyframe keyframe;
};

class RowParser {
 public:
  RowParser(const CsvRow& row, std::vector<CompileError>& errors) : row_(row), errors_(errors) {}

  std::optional<Keyed> parse() {
    Keyed out;
    const auto step = index(kStepIndex, "step_index");
    if (row_.fields[kStepText].empty()) {
      fail(CompileErrc::EmptyText, "step_text is empty");
    }
    const bool cueless = row_.fields[kCueIndex].empty() && row_.fields[kAssetId].empty();
    if (cueless) {
      for (std::size_t f = kHighlight; f < kCsvFieldCount; ++f) {
        if (!row_.fields[f].empty()) {
          fail(CompileErrc::BadNumber, "a row without a cue must leave highlight and pose fields empty");
          break;
        }
      }
      if (!step || failed_) return std::nullopt;
      out.step = *step;
      return out;
    }
    out.has_cue = true;
    const auto cue = index(kCueIndex, "cue_index");
    out.asset = row_.fields[kAssetId];
    if (!AssetRef::is_valid(out.asset)) {
      fail(CompileErrc::BadAsset, "asset_id must be 1..255 bytes without control characters");
    }
    const auto& hl = row_.fields[kHighlight];
    if (hl == "1" || hl == "true") {
      out.highlight = true;
    } else if (hl == "0" || hl == "false") {
      out.highlight = false;
    } else {
      fail(CompileErrc::BadNumber, "highlight must be 0, 1, true or false");
    }
    auto& kf = out.keyframe;
    kf.t_offset = real(kTime, "t_offset_s");
    if (std::isfinite(kf.t_offset) && kf.t_offset < 0.0) {
      fail(CompileErrc::BadNumber, "t_offset_s must be >= 0");
    }
    kf.position = Vec3{real(kPx, "px"), real(kPy, "py"), real(kPz, "pz")};
    const Quat q{real(kQx, "qx"), real(kQy, "qy"), real(kQz, "qz"), real(kQw, "qw")};
    kf.scale = Vec3{real(kSx, "sx"), real(kSy, "sy"), real(kSz, "sz")};
    if (is_finite(kf.scale) && !(kf.scale.x > 0.0 && kf.scale.y > 0.0 && kf.scale.z > 0.0)) {
      fail(CompileErrc::BadNumber, "scale components must be > 0");
    }
    if (!failed_) {
      try {
        kf.rotation = UnitQuaternion::near_unit(q, kAuthoredQuatTolerance).raw();
      } catch (const PoseError& e) {
        fail(CompileErrc::NonUnitQuaternion, e.what());
      }
    }
    if (!step || !cue || failed_) return std::nullopt;
    out.step = *step;
    out.cue = *cue;
    return out;
  }

 private:
  void fail(CompileErrc code, std::string message) {
    failed_ = true;
    errors_.push_back({row_.line, code, std::move(message)});
  }

  std::optional<std::size_t> index(Field f, const char* name) {
    const auto v = text::parse_u64(row_.fields[f]);
    if (!v) {
      fail(CompileErrc::BadNumber, std::string(name) + " must be a non-negative integer, got \"" + row_.fields[f] + "\"");
      return std::nullopt;
    }
    return static_cast<std::size_t>(*v);
  }

  double real(Field f, const char* name) {
    const auto v = text::parse_double(row_.fields[f]);
    if (!v || !std::isfinite(*v)) {
      fail(CompileErrc::BadNumber, std::string(name) + " must be a finite decimal number, got \"" + row_.fields[f] + "\"");
      return std::nan("");
    }
    return *v;
  }

  const CsvRow& row_;
  std::vector<CompileError>& errors_;
  bool failed_ = false;
};

}  // namespace

ParseResult parse_csv(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") {
    text.remove_prefix(3);
  }
  const auto lines = text::split_lines(text);
  std::vector<CompileError> errors;
  if (lines.empty() || lines.front() != kCsvHeader) {
    errors.push_back({1, CompileErrc::BadHeader, "header must be exactly: " + std::string(kCsvHeader)});
    return errors;
  }
  std::vector<CsvRow> rows;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (text::trim(lines[n]).empty()) {
      continue;
    }
    const auto fields = split_record(lines[n]);
    if (!fields) {
      errors.push_back({n + 1, CompileErrc::BadFieldCount, "unterminated quoted field"});
      continue;
    }
    if (fields->size() != kCsvFieldCount) {
      errors.push_back({n + 1, CompileErrc::BadFieldCount,
                        "expected " + std::to_string(kCsvFieldCount) + " fields, got " + std::to_string(fields->size())});
      continue;
    }
    CsvRow row;
    row.line = n + 1;
    std::move(fields->begin(), fields->end(), row.fields.begin());
    rows.push_back(std::move(row));
  }
  if (!errors.empty()) {
    return errors;
  }
  return rows;
}

CompileResult compile(const std::vector<CsvRow>& rows, const std::string& set_id, const AssetRef& target_asset) {
  std::vector<CompileError> errors;
  if (set_id.empty()) {
    errors.push_back({1, CompileErrc::EmptyText, "set id is empty"});
  }
  InstructionSet set{set_id, target_asset, {}};

  std::optional<std::size_t> current_step;
  bool step_is_cueless = false;
  std::optional<std::size_t> current_cue;

  for (const auto& row : rows) {
    auto parsed = RowParser(row, errors).parse();
    if (!parsed) {
      continue;
    }
    const auto error = [&](CompileErrc code, std::string message) {
      errors.push_back({row.line, code, std::move(message)});
    };

    const std::size_t expected_new = current_step ? *current_step + 1 : 0;
    const bool same_step = current_step && parsed->step == *current_step;
    if (!same_step) {
      if (parsed->step != expected_new) {
        error(CompileErrc::BadStepOrder, "step_index " + std::to_string(parsed->step) + " where " +
                                             (current_step ? std::to_string(*current_step) + " or " : std::string()) +
                                             std::to_string(expected_new) + " was expected");
      }
      current_step = parsed->step;
      current_cue.reset();
      step_is_cueless = !parsed->has_cue;
      set.steps.push_back(InstructionStep{set.steps.size(), row.fields[kStepText], row.fields[kHint], {}});
    } else {
      auto& step = set.steps.back();
      if (row.fields[kStepText] != step.text || row.fields[kHint] != step.key_phrase_hint) {
        error(CompileErrc::InconsistentRow, "step_text and key_phrase_hint must repeat verbatim within a step");
      }
      if (step_is_cueless || !parsed->has_cue) {
        error(CompileErrc::InconsistentRow, "a step is either a single cue-less row or rows that all carry cues");
        continue;
      }
    }
    if (!parsed->has_cue) {
      continue;
    }

    auto& step = set.steps.back();
    const std::size_t expected_cue = current_cue ? *current_cue + 1 : 0;
    const bool same_cue = current_cue && parsed->cue == *current_cue;
    if (!same_cue) {
      if (parsed->cue != expected_cue) {
        error(CompileErrc::BadCueOrder, "cue_index " + std::to_string(parsed->cue) + " where " +
                                            std::to_string(expected_cue) + " was expected");
      }
      current_cue = parsed->cue;
      step.cues.push_back(ModelCue{AssetRef(parsed->asset), parsed->highlight, {parsed->keyframe}});
      continue;
    }
    auto& cue = step.cues.back();
    if (cue.asset.id() != parsed->asset || cue.highlight != parsed->highlight) {
      error(CompileErrc::InconsistentRow, "asset_id and highlight must repeat verbatim within a cue");
    }
    if (cue.highlight) {
      error(CompileErrc::BadTrack, "highlight cues take exactly one keyframe");
    }
    if (!(parsed->keyframe.t_offset > cue.keyframes.back().t_offset)) {
      error(CompileErrc::BadTrack, "t_offset_s must increase strictly within a cue");
    }
    cue.keyframes.push_back(parsed->keyframe);
  }

  if (errors.empty() && set.steps.empty()) {
    errors.push_back({1, CompileErrc::BadStepOrder, "document contains no steps"});
  }
  if (!errors.empty()) {
    return errors;
  }
  return set;
}

CompileResult compile_document(std::string_view text, const std::string& set_id, const AssetRef& target_asset) {
  auto parsed = parse_csv(text);
  if (auto* errors = std::get_if<std::vector<CompileError>>(&parsed)) {
    return std::move(*errors);
  }
  return compile(std::get<std::vector<CsvRow>>(parsed), set_id, target_asset);
}

}  // namespace mref
