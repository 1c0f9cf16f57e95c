#include "mref/pose.hpp"

#include <algorithm>
#include <cmath>

namespace mref {

std::string_view to_string(PoseErrc code) {
  switch (code) {
    case PoseErrc::NonUnitQuaternion: return "NON_UNIT_QUATERNION";
    case PoseErrc::NonFinite: return "NON_FINITE";
    case PoseErrc::BadScale: return "BAD_SCALE";
    case PoseErrc::BadTrack: return "BAD_TRACK";
    case PoseErrc::OutOfRange: return "OUT_OF_RANGE";
  }
  return "UNKNOWN";
}

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
Vec3 hadamard(const Vec3& a, const Vec3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

double Quat::norm() const { return std::sqrt(x * x + y * y + z * z + w * w); }

UnitQuaternion UnitQuaternion::normalized(const Quat& q) {
  const double n = q.norm();
  if (!std::isfinite(n)) {
    throw PoseError(PoseErrc::NonFinite, "quaternion has non-finite components");
  }
  if (n == 0.0) {
    throw PoseError(PoseErrc::NonUnitQuaternion, "zero quaternion has no orientation");
  }
  if (std::abs(n - 1.0) <= kUnitTolerance) {
    return UnitQuaternion(q);
  }
  return UnitQuaternion(Quat{q.x / n, q.y / n, q.z / n, q.w / n});
}

UnitQuaternion UnitQuaternion::near_unit(const Quat& q, double tolerance) {
  const double n = q.norm();
  if (std::isfinite(n) && std::abs(n - 1.0) > tolerance) {
    throw PoseError(PoseErrc::NonUnitQuaternion,
                    "quaternion norm " + std::to_string(n) + " is not within tolerance of 1");
  }
  return normalized(q);
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double radians) {
  const double len = norm(axis);
  if (!(len > 0.0) || !std::isfinite(len) || !std::isfinite(radians)) {
    throw PoseError(PoseErrc::NonFinite, "axis must be finite and non-zero");
  }
  const double s = std::sin(radians / 2.0) / len;
  return normalized(Quat{axis.x * s, axis.y * s, axis.z * s, std::cos(radians / 2.0)});
}

UnitQuaternion UnitQuaternion::conjugate() const {
  return UnitQuaternion(Quat{-q_.x, -q_.y, -q_.z, q_.w});
}

void Pose::check() const {
  if (!is_finite(position)) {
    throw PoseError(PoseErrc::NonFinite, "pose position must be finite");
  }
  if (!is_finite(scale) || !(scale.x > 0.0 && scale.y > 0.0 && scale.z > 0.0)) {
    throw PoseError(PoseErrc::BadScale, "pose scale components must be finite and > 0");
  }
}

KeyframeTrack::KeyframeTrack(std::vector<Keyframe> keyframes) : keyframes_(std::move(keyframes)) {
  if (keyframes_.empty()) {
    throw PoseError(PoseErrc::BadTrack, "keyframe track is empty");
  }
  for (std::size_t i = 0; i < keyframes_.size(); ++i) {
    const auto& kf = keyframes_[i];
    if (!std::isfinite(kf.t_offset) || kf.t_offset < 0.0) {
      throw PoseError(PoseErrc::BadTrack, "keyframe offset must be finite and >= 0");
    }
    if (i > 0 && !(kf.t_offset > keyframes_[i - 1].t_offset)) {
      throw PoseError(PoseErrc::BadTrack, "keyframe offsets must be strictly increasing");
    }
    kf.pose.check();
  }
}

UnitQuaternion quat_mul(const UnitQuaternion& a, const UnitQuaternion& b) {
  const Quat& p = a.raw();
  const Quat& q = b.raw();
  return UnitQuaternion::normalized(Quat{
      p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
      p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
      p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
      p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
  });
}

Vec3 quat_rotate(const UnitQuaternion& q, const Vec3& v) {
  // v' = v + 2w (u x v) + 2 u x (u x v), scaled by 1/|q|^2 so the result is an
  // exact rotation even for quaternions carried verbatim within tolerance.
  const Vec3 u{q.x(), q.y(), q.z()};
  const double n2 = dot(u, u) + q.w() * q.w();
  const Vec3 uv = cross(u, v);
  const Vec3 uuv = cross(u, uv);
  if (n2 == 1.0) {
    return v + (2.0 * q.w()) * uv + 2.0 * uuv;
  }
  // (w^2 - |u|^2) v + 2 (u.v) u + 2w (u x v), divided by |q|^2.
  const double inv = 1.0 / n2;
  const Vec3 r = (q.w() * q.w() - dot(u, u)) * v + (2.0 * dot(u, v)) * u + (2.0 * q.w()) * uv;
  return inv * r;
}

double quat_dot(const UnitQuaternion& a, const UnitQuaternion& b) {
  return a.x() * b.x() + a.y() * b.y() + a.z() * b.z() + a.w() * b.w();
}

double quat_angle(const UnitQuaternion& a, const UnitQuaternion& b) {
  const double na = a.raw().norm();
  const double nb = b.raw().norm();
  const double d = std::clamp(std::abs(quat_dot(a, b)) / (na * nb), 0.0, 1.0);
  return 2.0 * std::acos(d);
}

UnitQuaternion quat_slerp(const UnitQuaternion& a, const UnitQuaternion& b, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw PoseError(PoseErrc::OutOfRange, "slerp parameter must lie in [0, 1]");
  }
  Quat end = b.raw();
  double d = quat_dot(a, b);
  if (d < 0.0) {
    end = Quat{-end.x, -end.y, -end.z, -end.w};
    d = -d;
  }
  if (t == 0.0) {
    return a;
  }
  if (t == 1.0) {
    return UnitQuaternion::normalized(end);
  }
  const Quat& start = a.raw();
  double s0 = 1.0 - t;
  double s1 = t;
  if (d <= 1.0 - 1e-6) {
    const double theta = std::acos(std::min(d, 1.0));
    const double sin_theta = std::sin(theta);
    s0 = std::sin((1.0 - t) * theta) / sin_theta;
    s1 = std::sin(t * theta) / sin_theta;
  }
  return UnitQuaternion::normalized(Quat{
      s0 * start.x + s1 * end.x,
      s0 * start.y + s1 * end.y,
      s0 * start.z + s1 * end.z,
      s0 * start.w + s1 * end.w,
  });
}

Pose pose_compose(const Pose& target, const Pose& relative) {
  Pose out;
  out.position = target.position + quat_rotate(target.rotation, hadamard(target.scale, relative.position));
  out.rotation = quat_mul(target.rotation, relative.rotation);
  out.scale = hadamard(target.scale, relative.scale);
  return out;
}

namespace {

Vec3 lerp(const Vec3& a, const Vec3& b, double t) { return a + t * (b - a); }

}  // namespace

Pose keyframe_sample(const KeyframeTrack& track, double t) {
  const auto frames = track.keyframes();
  if (!(t > frames.front().t_offset)) {
    return frames.front().pose;
  }
  if (t >= frames.back().t_offset) {
    return frames.back().pose;
  }
  const auto hi = std::upper_bound(frames.begin(), frames.end(), t,
                                   [](double value, const Keyframe& kf) { return value < kf.t_offset; });
  const auto lo = hi - 1;
  if (lo->t_offset == t) {
    return lo->pose;
  }
  const double u = (t - lo->t_offset) / (hi->t_offset - lo->t_offset);
  Pose out;
  out.position = lerp(lo->pose.position, hi->pose.position, u);
  out.rotation = quat_slerp(lo->pose.rotation, hi->pose.rotation, u);
  out.scale = lerp(lo->pose.scale, hi->pose.scale, u);
  return out;
}

}  // namespace mref
