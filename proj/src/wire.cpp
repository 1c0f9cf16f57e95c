#include "mref/wire.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <string>

namespace mref {

std::string_view to_string(WireErrc code) {
  switch (code) {
    case WireErrc::LimitExceeded: return "LIMIT_EXCEEDED";
    case WireErrc::BadMagic: return "BAD_MAGIC";
    case WireErrc::BadVersion: return "BAD_VERSION";
    case WireErrc::CrcMismatch: return "CRC_MISMATCH";
    case WireErrc::Truncated: return "TRUNCATED";
    case WireErrc::Malformed: return "MALFORMED";
  }
  return "UNKNOWN";
}

namespace {

constexpr std::uint8_t kMagic[4] = {'M', 'R', 'I', 'S'};
constexpr std::size_t kCrcBytes = 4;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }

  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

  void str(const std::string& s, const char* what) {
    u16(checked_u16(s.size(), what));
    out_.insert(out_.end(), s.begin(), s.end());
  }

  static std::uint16_t checked_u16(std::size_t n, const char* what) {
    if (n > 0xFFFF) {
      throw WireError(WireErrc::LimitExceeded, std::string(what) + " count " + std::to_string(n) + " exceeds 65535");
    }
    return static_cast<std::uint16_t>(n);
  }

  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }

  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  double f32() { return static_cast<double>(std::bit_cast<float>(u32())); }

  std::string str() {
    const std::size_t n = u16();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      throw WireError(WireErrc::Truncated, "document ends at byte " + std::to_string(data_.size()) +
                                               " while " + std::to_string(n) + " more bytes were expected");
    }
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

[[noreturn]] void malformed(const std::string& message) { throw WireError(WireErrc::Malformed, message); }

// Walks the layout without interpreting values; throws Truncated on overrun.
void walk_structure(Reader& in) {
  in.skip(4 + 2);
  in.str();
  in.str();
  const std::size_t steps = in.u16();
  for (std::size_t s = 0; s < steps; ++s) {
    in.str();
    in.str();
    const std::size_t cues = in.u8();
    for (std::size_t c = 0; c < cues; ++c) {
      in.str();
      in.u8();
      in.skip(std::size_t{in.u16()} * kKeyframeWireBytes);
    }
  }
}

AssetRef decode_asset(const std::string& id, const char* what) {
  if (!AssetRef::is_valid(id)) {
    malformed(std::string(what) + " is not a valid asset id");
  }
  return AssetRef(id);
}

CueKeyframe decode_keyframe(Reader& in) {
  CueKeyframe kf;
  kf.t_offset = in.f32();
  kf.position = Vec3{in.f32(), in.f32(), in.f32()};
  const Quat q{in.f32(), in.f32(), in.f32(), in.f32()};
  kf.scale = Vec3{in.f32(), in.f32(), in.f32()};
  if (!std::isfinite(kf.t_offset) || kf.t_offset < 0.0 || !is_finite(kf.position)) {
    malformed("keyframe carries a non-finite value or negative offset");
  }
  if (!is_finite(kf.scale) || !(kf.scale.x > 0.0 && kf.scale.y > 0.0 && kf.scale.z > 0.0)) {
    malformed("keyframe scale must be finite and > 0");
  }
  try {
    kf.rotation = UnitQuaternion::near_unit(q, kAuthoredQuatTolerance).raw();
  } catch (const PoseError& e) {
    malformed(e.what());
  }
  return kf;
}

}  // namespace

std::uint32_t crc32_ieee(std::span<const std::uint8_t> data) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes a uInt length; feed large inputs in chunks.
  std::size_t pos = 0;
  while (pos < data.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(data.size() - pos, 1u << 30));
    crc = ::crc32(crc, data.data() + pos, n);
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

bool crc_ok(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kCrcBytes) {
    return false;
  }
  const auto body = bytes.first(bytes.size() - kCrcBytes);
  Reader trailer(bytes.last(kCrcBytes));
  return crc32_ieee(body) == trailer.u32();
}

WireDocument encode(const InstructionSet& set) {
  Writer out;
  for (auto b : kMagic) out.u8(b);
  out.u16(kWireVersion);
  out.str(set.set_id, "set_id bytes");
  out.str(set.target_asset.id(), "target asset bytes");
  out.u16(Writer::checked_u16(set.steps.size(), "step"));
  for (const auto& step : set.steps) {
    out.str(step.key_phrase_hint, "hint bytes");
    out.str(step.text, "text bytes");
    if (step.cues.size() > 0xFF) {
      throw WireError(WireErrc::LimitExceeded,
                      "step " + std::to_string(step.index) + " has " + std::to_string(step.cues.size()) + " cues, limit 255");
    }
    out.u8(static_cast<std::uint8_t>(step.cues.size()));
    for (const auto& cue : step.cues) {
      out.str(cue.asset.id(), "asset id bytes");
      out.u8(cue.highlight ? 1 : 0);
      out.u16(Writer::checked_u16(cue.keyframes.size(), "keyframe"));
      for (const auto& kf : cue.keyframes) {
        out.f32(kf.t_offset);
        out.f32(kf.position.x);
        out.f32(kf.position.y);
        out.f32(kf.position.z);
        out.f32(kf.rotation.x);
        out.f32(kf.rotation.y);
        out.f32(kf.rotation.z);
        out.f32(kf.rotation.w);
        out.f32(kf.scale.x);
        out.f32(kf.scale.y);
        out.f32(kf.scale.z);
      }
    }
  }
  out.u32(crc32_ieee(out.bytes()));
  return WireDocument{std::move(out.bytes())};
}

InstructionSet decode(std::span<const std::uint8_t> bytes) {
  const std::size_t magic_len = std::min<std::size_t>(bytes.size(), 4);
  for (std::size_t i = 0; i < magic_len; ++i) {
    if (bytes[i] != kMagic[i]) {
      throw WireError(WireErrc::BadMagic, "document does not start with MRIS");
    }
  }
  if (bytes.size() < 4 + 2 + kCrcBytes) {
    throw WireError(WireErrc::Truncated, "document is only " + std::to_string(bytes.size()) + " bytes");
  }
  const auto body = bytes.first(bytes.size() - kCrcBytes);
  if (!crc_ok(bytes)) {
    // A document cut short also fails the checksum; name the cause when the
    // layout itself runs past the end.
    Reader probe(body);
    walk_structure(probe);
    throw WireError(WireErrc::CrcMismatch, "checksum does not match document contents");
  }

  Reader in(body);
  in.skip(4);
  if (const auto version = in.u16(); version != kWireVersion) {
    throw WireError(WireErrc::BadVersion, "unsupported version " + std::to_string(version));
  }
  std::string set_id = in.str();
  if (set_id.empty()) {
    malformed("set id is empty");
  }
  InstructionSet set{std::move(set_id), decode_asset(in.str(), "target asset"), {}};
  const std::size_t step_count = in.u16();
  if (step_count == 0) {
    malformed("instruction set has no steps");
  }
  set.steps.reserve(step_count);
  for (std::size_t s = 0; s < step_count; ++s) {
    InstructionStep step;
    step.index = s;
    step.key_phrase_hint = in.str();
    step.text = in.str();
    if (step.text.empty()) {
      malformed("step " + std::to_string(s) + " has empty text");
    }
    const std::size_t cue_count = in.u8();
    for (std::size_t c = 0; c < cue_count; ++c) {
      ModelCue cue{decode_asset(in.str(), "cue asset"), false, {}};
      const auto highlight = in.u8();
      if (highlight > 1) {
        malformed("highlight flag must be 0 or 1");
      }
      cue.highlight = highlight == 1;
      const std::size_t kf_count = in.u16();
      if (kf_count == 0 || (cue.highlight && kf_count != 1)) {
        malformed("cue keyframe count " + std::to_string(kf_count) + " is invalid");
      }
      for (std::size_t k = 0; k < kf_count; ++k) {
        auto kf = decode_keyframe(in);
        if (k > 0 && !(kf.t_offset > cue.keyframes.back().t_offset)) {
          malformed("keyframe offsets must increase strictly");
        }
        cue.keyframes.push_back(kf);
      }
      step.cues.push_back(std::move(cue));
    }
    set.steps.push_back(std::move(step));
  }
  if (in.remaining() != 0) {
    malformed(std::to_string(in.remaining()) + " unexpected bytes before the checksum");
  }
  return set;
}

SizeReport size_report(const InstructionSet& set, const AssetCatalog& catalog) {
  SizeReport report;
  report.referenced_asset_bytes = referenced_bytes(set, catalog);
  report.wire_bytes = encode(set).bytes.size();
  report.reduction_ratio = static_cast<double>(report.referenced_asset_bytes) / static_cast<double>(report.wire_bytes);
  return report;
}

}  // namespace mref
