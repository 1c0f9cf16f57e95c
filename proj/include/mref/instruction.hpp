#pragma once

// Instruction-set data model, the on-device asset catalog it links against,
// and validation/resolution of those links.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mref/error.hpp"
#include "mref/pose.hpp"

namespace mref {

enum class InstructionErrc { BadAssetRef, UnvalidatedSet, StepOutOfRange, CatalogParse, DuplicateAsset, Io };
std::string_view to_string(InstructionErrc code);
using InstructionError = CodedError<InstructionErrc>;

/// Identifier of an asset stored on the device. Non-empty, at most 255 bytes,
/// no control characters.
class AssetRef {
 public:
  explicit AssetRef(std::string id);
  static bool is_valid(std::string_view id);

  const std::string& id() const { return id_; }
  friend auto operator<=>(const AssetRef&, const AssetRef&) = default;

 private:
  std::string id_;
};

/// A keyframe as authored or decoded. The rotation is not yet known to be a
/// unit quaternion and the offsets are not yet known to be ordered; validate()
/// reports both before the values are promoted into a KeyframeTrack.
struct CueKeyframe {
  double t_offset = 0.0;
  Vec3 position{};
  Quat rotation{};
  Vec3 scale{1.0, 1.0, 1.0};

  friend bool operator==(const CueKeyframe&, const CueKeyframe&) = default;
};

struct ModelCue {
  AssetRef asset;
  bool highlight = false;  // static marker (one keyframe) vs animated model
  std::vector<CueKeyframe> keyframes;

  /// Checked conversion. Throws PoseError if the keyframes break a track invariant.
  KeyframeTrack track() const;

  friend bool operator==(const ModelCue&, const ModelCue&) = default;
};

struct InstructionStep {
  std::size_t index = 0;
  std::string text;
  std::string key_phrase_hint;
  std::vector<ModelCue> cues;

  friend bool operator==(const InstructionStep&, const InstructionStep&) = default;
};

struct InstructionSet {
  std::string set_id;
  AssetRef target_asset;
  std::vector<InstructionStep> steps;

  friend bool operator==(const InstructionSet&, const InstructionSet&) = default;
};

using ContentHash = std::array<std::uint8_t, 32>;

struct CatalogEntry {
  std::string display_name;
  std::uint64_t byte_size = 0;
  ContentHash content_hash{};

  friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

/// Registry of locally stored assets. Sizes and digests only, never geometry.
class AssetCatalog {
 public:
  /// Throws InstructionError(DuplicateAsset) for a repeated id and
  /// InstructionError(CatalogParse) for a zero byte_size.
  void add(const AssetRef& id, CatalogEntry entry);

  const CatalogEntry* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, CatalogEntry, std::less<>>& entries() const { return entries_; }

  /// Parses the line-oriented catalog format:
  ///   asset <asset_id> name="<display name>" bytes=<u64> sha="<64 hex chars>"
  static AssetCatalog parse(std::string_view text);
  static AssetCatalog load(const std::string& path);

 private:
  std::map<std::string, CatalogEntry, std::less<>> entries_;
};

enum class ValidationCode { MissingAsset, NonUnitQuaternion, NonMonotonicTrack, EmptyTrack, BadHighlightTrack, BadPose, BadStepIndex, EmptyText, EmptySetId, NoSteps };
std::string_view to_string(ValidationCode code);

struct ValidationIssue {
  std::optional<std::size_t> step;  // absent for set-level problems
  std::optional<std::size_t> cue;
  ValidationCode code;
  std::string message;

  friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  bool ok() const { return errors.empty(); }

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Quaternion norm deviation tolerated in authored and decoded keyframes.
inline constexpr double kAuthoredQuatTolerance = 1e-3;

ValidationReport validate(const InstructionSet& set, const AssetCatalog& catalog);

struct ResolvedCue {
  std::string asset_id;
  std::string display_name;
  Pose world_pose;
  bool highlight = false;
};

/// World placement of every cue of `step` at time `t`, given the tracked pose
/// of the model target.
std::vector<ResolvedCue> resolve(const InstructionSet& set, const AssetCatalog& catalog,
                                 const Pose& target_pose, std::size_t step, double t);

/// Total catalog size of the distinct assets the set references (target included).
std::uint64_t referenced_bytes(const InstructionSet& set, const AssetCatalog& catalog);

}  // namespace mref
