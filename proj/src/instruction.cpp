#include "mref/instruction.hpp"

#include <cmath>
#include <set>

namespace mref {

std::string_view to_string(InstructionErrc code) {
  switch (code) {
    case InstructionErrc::BadAssetRef: return "BAD_ASSET_REF";
    case InstructionErrc::UnvalidatedSet: return "UNVALIDATED_SET";
    case InstructionErrc::StepOutOfRange: return "STEP_OUT_OF_RANGE";
    case InstructionErrc::CatalogParse: return "CATALOG_PARSE";
    case InstructionErrc::DuplicateAsset: return "DUPLICATE_ASSET";
    case InstructionErrc::Io: return "IO";
  }
  return "UNKNOWN";
}

std::string_view to_string(ValidationCode code) {
  switch (code) {
    case ValidationCode::MissingAsset: return "MISSING_ASSET";
    case ValidationCode::NonUnitQuaternion: return "NON_UNIT_QUATERNION";
    case ValidationCode::NonMonotonicTrack: return "NON_MONOTONIC_TRACK";
    case ValidationCode::EmptyTrack: return "EMPTY_TRACK";
    case ValidationCode::BadHighlightTrack: return "BAD_HIGHLIGHT_TRACK";
    case ValidationCode::BadPose: return "BAD_POSE";
    case ValidationCode::BadStepIndex: return "BAD_STEP_INDEX";
    case ValidationCode::EmptyText: return "EMPTY_TEXT";
    case ValidationCode::EmptySetId: return "EMPTY_SET_ID";
    case ValidationCode::NoSteps: return "NO_STEPS";
  }
  return "UNKNOWN";
}

bool AssetRef::is_valid(std::string_view id) {
  if (id.empty() || id.size() > 255) {
    return false;
  }
  for (unsigned char c : id) {
    if (c < 0x20 || c == 0x7F) {
      return false;
    }
  }
  return true;
}

AssetRef::AssetRef(std::string id) : id_(std::move(id)) {
  if (!is_valid(id_)) {
    throw InstructionError(InstructionErrc::BadAssetRef,
                           "asset id must be 1..255 bytes without control characters");
  }
}

KeyframeTrack ModelCue::track() const {
  std::vector<Keyframe> frames;
  frames.reserve(keyframes.size());
  for (const auto& kf : keyframes) {
    frames.push_back(Keyframe{kf.t_offset,
                              Pose{kf.position, UnitQuaternion::near_unit(kf.rotation, kAuthoredQuatTolerance),
                                   kf.scale}});
  }
  return KeyframeTrack(std::move(frames));
}

namespace {

void check_cue(const ModelCue& cue, std::size_t step, std::size_t cue_index, const AssetCatalog& catalog,
               std::vector<ValidationIssue>& out) {
  const auto add = [&](ValidationCode code, std::string message) {
    out.push_back(ValidationIssue{step, cue_index, code, std::move(message)});
  };
  if (!catalog.contains(cue.asset.id())) {
    add(ValidationCode::MissingAsset, "asset " + cue.asset.id() + " is not in the catalog");
  }
  if (cue.keyframes.empty()) {
    add(ValidationCode::EmptyTrack, "cue has no keyframes");
    return;
  }
  if (cue.highlight && cue.keyframes.size() != 1) {
    add(ValidationCode::BadHighlightTrack, "highlight cue must have exactly one keyframe");
  }
  for (std::size_t k = 0; k < cue.keyframes.size(); ++k) {
    const auto& kf = cue.keyframes[k];
    const std::string where = "keyframe " + std::to_string(k) + ": ";
    const double n = kf.rotation.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > kAuthoredQuatTolerance) {
      add(ValidationCode::NonUnitQuaternion, where + "rotation norm " + std::to_string(n));
    }
    if (!std::isfinite(kf.t_offset) || kf.t_offset < 0.0 || !is_finite(kf.position) || !is_finite(kf.scale) ||
        !(kf.scale.x > 0.0 && kf.scale.y > 0.0 && kf.scale.z > 0.0)) {
      add(ValidationCode::BadPose, where + "non-finite value, negative offset or non-positive scale");
    }
    if (k > 0 && !(kf.t_offset > cue.keyframes[k - 1].t_offset)) {
      add(ValidationCode::NonMonotonicTrack, where + "offset does not increase");
    }
  }
}

void require_valid(const InstructionSet& set, const AssetCatalog& catalog) {
  const auto report = validate(set, catalog);
  if (!report.ok()) {
    const auto& first = report.errors.front();
    throw InstructionError(InstructionErrc::UnvalidatedSet,
                           std::to_string(report.errors.size()) + " validation error(s), first " +
                               std::string(to_string(first.code)) + ": " + first.message);
  }
}

}  // namespace

ValidationReport validate(const InstructionSet& set, const AssetCatalog& catalog) {
  ValidationReport report;
  auto& errors = report.errors;
  if (set.set_id.empty()) {
    errors.push_back({std::nullopt, std::nullopt, ValidationCode::EmptySetId, "set id is empty"});
  }
  if (!catalog.contains(set.target_asset.id())) {
    errors.push_back({std::nullopt, std::nullopt, ValidationCode::MissingAsset,
                      "target asset " + set.target_asset.id() + " is not in the catalog"});
  }
  if (set.steps.empty()) {
    errors.push_back({std::nullopt, std::nullopt, ValidationCode::NoSteps, "instruction set has no steps"});
  }
  for (std::size_t s = 0; s < set.steps.size(); ++s) {
    const auto& step = set.steps[s];
    if (step.index != s) {
      errors.push_back({s, std::nullopt, ValidationCode::BadStepIndex,
                        "step index " + std::to_string(step.index) + " at position " + std::to_string(s)});
    }
    if (step.text.empty()) {
      errors.push_back({s, std::nullopt, ValidationCode::EmptyText, "step text is empty"});
    }
    for (std::size_t c = 0; c < step.cues.size(); ++c) {
      check_cue(step.cues[c], s, c, catalog, errors);
    }
  }
  return report;
}

std::vector<ResolvedCue> resolve(const InstructionSet& set, const AssetCatalog& catalog, const Pose& target_pose,
                                 std::size_t step, double t) {
  require_valid(set, catalog);
  if (step >= set.steps.size()) {
    throw InstructionError(InstructionErrc::StepOutOfRange, "step " + std::to_string(step) + " of " +
                                                                std::to_string(set.steps.size()));
  }
  std::vector<ResolvedCue> out;
  for (const auto& cue : set.steps[step].cues) {
    const auto* entry = catalog.find(cue.asset.id());
    out.push_back(ResolvedCue{cue.asset.id(), entry->display_name,
                              pose_compose(target_pose, keyframe_sample(cue.track(), t)), cue.highlight});
  }
  return out;
}

std::uint64_t referenced_bytes(const InstructionSet& set, const AssetCatalog& catalog) {
  require_valid(set, catalog);
  std::set<std::string_view> ids{set.target_asset.id()};
  for (const auto& step : set.steps) {
    for (const auto& cue : step.cues) {
      ids.insert(cue.asset.id());
    }
  }
  std::uint64_t total = 0;
  for (const auto id : ids) {
    total += catalog.find(id)->byte_size;
  }
  return total;
}

}  // namespace mref
