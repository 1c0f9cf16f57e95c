#pragma once

// Quaternion and pose algebra used to place instruction models relative to a
// tracked model target.
//
// Conventions: Hamilton product, components stored as (x, y, z, w), right-handed
// frames, rotations act on column vectors. quat_mul(a, b) applies b first.

#include <cstddef>
#include <span>
#include <vector>

#include "mref/error.hpp"

namespace mref {

enum class PoseErrc { NonUnitQuaternion, NonFinite, BadScale, BadTrack, OutOfRange };
std::string_view to_string(PoseErrc code);
using PoseError = CodedError<PoseErrc>;

/// Deviation from unit norm a UnitQuaternion may carry verbatim.
inline constexpr double kUnitTolerance = 1e-6;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(double s, const Vec3& v);
Vec3 hadamard(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);
bool is_finite(const Vec3& v);

/// Plain four-component quaternion with no invariant. Used for authored or
/// decoded values before they are checked.
struct Quat {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double w = 1.0;

  double norm() const;
  friend bool operator==(const Quat&, const Quat&) = default;
};

/// Rotation quaternion whose norm is within kUnitTolerance of 1.
class UnitQuaternion {
 public:
  /// Identity rotation.
  UnitQuaternion() = default;

  /// Keeps `q` verbatim when it is already unit within kUnitTolerance,
  /// otherwise divides by its norm. Throws on zero or non-finite input.
  static UnitQuaternion normalized(const Quat& q);

  /// Like normalized(), but rejects inputs whose norm deviates from 1 by more
  /// than `tolerance`.
  static UnitQuaternion near_unit(const Quat& q, double tolerance);

  static UnitQuaternion from_axis_angle(const Vec3& axis, double radians);

  double x() const { return q_.x; }
  double y() const { return q_.y; }
  double z() const { return q_.z; }
  double w() const { return q_.w; }
  const Quat& raw() const { return q_; }

  UnitQuaternion conjugate() const;

  friend bool operator==(const UnitQuaternion&, const UnitQuaternion&) = default;

 private:
  explicit UnitQuaternion(const Quat& q) : q_(q) {}
  Quat q_{0.0, 0.0, 0.0, 1.0};
};

struct Pose {
  Vec3 position{};
  UnitQuaternion rotation{};
  Vec3 scale{1.0, 1.0, 1.0};

  /// Throws PoseError when position is non-finite or a scale component is not > 0.
  void check() const;

  friend bool operator==(const Pose&, const Pose&) = default;
};

struct Keyframe {
  double t_offset = 0.0;
  Pose pose{};

  friend bool operator==(const Keyframe&, const Keyframe&) = default;
};

/// Non-empty keyframe sequence with strictly increasing offsets.
class KeyframeTrack {
 public:
  explicit KeyframeTrack(std::vector<Keyframe> keyframes);

  std::span<const Keyframe> keyframes() const { return keyframes_; }
  std::size_t size() const { return keyframes_.size(); }

 private:
  std::vector<Keyframe> keyframes_;
};

UnitQuaternion quat_mul(const UnitQuaternion& a, const UnitQuaternion& b);
Vec3 quat_rotate(const UnitQuaternion& q, const Vec3& v);
double quat_dot(const UnitQuaternion& a, const UnitQuaternion& b);

/// Rotation angle in radians between two orientations, in [0, pi].
double quat_angle(const UnitQuaternion& a, const UnitQuaternion& b);

/// Shortest-arc spherical interpolation. Falls back to normalized lerp when
/// the inputs are nearly parallel. Throws PoseError for t outside [0, 1].
UnitQuaternion quat_slerp(const UnitQuaternion& a, const UnitQuaternion& b, double t);

/// World placement of a pose authored relative to `target` sitting at the origin.
Pose pose_compose(const Pose& target, const Pose& relative);

/// Clamped sampling: linear in position and scale, slerp in rotation.
Pose keyframe_sample(const KeyframeTrack& track, double t);

}  // namespace mref
