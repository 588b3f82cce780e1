#pragma once
// Domain model for wearable gesture authentication: devices, sensor samples,
// gesture metadata, and segment containers. No I/O in this header.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gestauth {

enum class DeviceKind { Ring, Watch, Door };
enum class SensorKind { Accelerometer, Gyroscope, LinearAccelerometer, Grv };
enum class GestureKind { RingTap, WatchTap, Knock3, Knock5, SecretKnock };
enum class Arm { Left, Right };

// Fixed terminals are 1..6; 7 stands for the handheld freestyle one ("F").
inline constexpr int kFreestyleTerminal = 7;

constexpr bool is_tap(GestureKind k) {
  return k == GestureKind::RingTap || k == GestureKind::WatchTap;
}
constexpr bool is_knock(GestureKind k) { return !is_tap(k); }

inline const char* to_token(DeviceKind d) {
  switch (d) {
    case DeviceKind::Ring: return "ring";
    case DeviceKind::Watch: return "watch";
    case DeviceKind::Door: return "door";
  }
  return "?";
}

inline const char* to_token(SensorKind s) {
  switch (s) {
    case SensorKind::Accelerometer: return "acc";
    case SensorKind::Gyroscope: return "gyr";
    case SensorKind::LinearAccelerometer: return "lacc";
    case SensorKind::Grv: return "grv";
  }
  return "?";
}

inline const char* to_token(GestureKind k) {
  switch (k) {
    case GestureKind::RingTap: return "ring-tap";
    case GestureKind::WatchTap: return "watch-tap";
    case GestureKind::Knock3: return "3-knock";
    case GestureKind::Knock5: return "5-knock";
    case GestureKind::SecretKnock: return "secret-knock";
  }
  return "?";
}

inline const char* to_token(Arm a) { return a == Arm::Left ? "Left" : "Right"; }

inline std::optional<DeviceKind> device_from_token(std::string_view t) {
  if (t == "ring") return DeviceKind::Ring;
  if (t == "watch") return DeviceKind::Watch;
  if (t == "door") return DeviceKind::Door;
  return std::nullopt;
}

inline std::optional<SensorKind> sensor_from_token(std::string_view t) {
  if (t == "acc") return SensorKind::Accelerometer;
  if (t == "gyr") return SensorKind::Gyroscope;
  if (t == "lacc") return SensorKind::LinearAccelerometer;
  if (t == "grv") return SensorKind::Grv;
  return std::nullopt;
}

inline std::optional<GestureKind> gesture_from_token(std::string_view t) {
  if (t == "ring-tap") return GestureKind::RingTap;
  if (t == "watch-tap") return GestureKind::WatchTap;
  if (t == "3-knock") return GestureKind::Knock3;
  if (t == "5-knock") return GestureKind::Knock5;
  if (t == "secret-knock") return GestureKind::SecretKnock;
  return std::nullopt;
}

inline std::optional<Arm> arm_from_token(std::string_view t) {
  if (t == "Left") return Arm::Left;
  if (t == "Right") return Arm::Right;
  return std::nullopt;
}

inline std::string terminal_token(int t) {
  return t == kFreestyleTerminal ? "F" : std::to_string(t);
}

inline std::optional<int> terminal_from_token(std::string_view t) {
  if (t == "F") return kFreestyleTerminal;
  if (t.size() == 1 && t[0] >= '1' && t[0] <= '6') return t[0] - '0';
  return std::nullopt;
}

// The door terminal carries no wrist-worn sensors beyond inertial ones.
inline std::vector<SensorKind> device_sensors(DeviceKind d) {
  if (d == DeviceKind::Door)
    return {SensorKind::Accelerometer, SensorKind::Gyroscope};
  return {SensorKind::Accelerometer, SensorKind::Gyroscope,
          SensorKind::LinearAccelerometer, SensorKind::Grv};
}

using SensorMask = unsigned;
constexpr SensorMask sensor_bit(SensorKind s) { return 1u << static_cast<int>(s); }
inline constexpr SensorMask kAllSensors = 0b1111u;

// Feature vectors for multi-device gestures always concatenate door, ring,
// watch in that order, whatever order the caller supplies.
constexpr int concat_rank(DeviceKind d) {
  switch (d) {
    case DeviceKind::Door: return 0;
    case DeviceKind::Ring: return 1;
    case DeviceKind::Watch: return 2;
  }
  return 3;
}

struct DeviceId {
  DeviceKind kind{};
  std::string label;
};

struct VecSample {
  double t = 0, x = 0, y = 0, z = 0;
};

struct QuatSample {
  double t = 0, x = 0, y = 0, z = 0, w = 1;
  double norm() const { return std::sqrt(x * x + y * y + z * z + w * w); }
};

struct SensorStream {
  DeviceId device;
  SensorKind sensor{};
  double rate_hz = 0;
  std::vector<VecSample> vec;    // xyz sensors
  std::vector<QuatSample> quat;  // rotation vector only
  bool is_quat() const { return sensor == SensorKind::Grv; }
  size_t size() const { return is_quat() ? quat.size() : vec.size(); }
  double first_t() const { return is_quat() ? quat.front().t : vec.front().t; }
  double last_t() const { return is_quat() ? quat.back().t : vec.back().t; }
};

struct Impersonation {
  std::string attacker;
  std::string victim;
  int attempt = 0;  // 1-based within (kind, terminal)
};

struct GestureMeta {
  std::string user;
  int session = 1;  // 1 or 2
  GestureKind kind{};
  std::optional<int> terminal;  // taps only; 1..6 or kFreestyleTerminal
  Arm arm = Arm::Left;
  std::optional<Impersonation> impersonation;
  std::string id;  // stable identifier assigned at segmentation
};

// Taps are cut [T0 - offset - size, T0 - offset] behind the contact event;
// knocks use the button bounds as-is, so size/offset do not apply to them.
struct WindowSpec {
  double size_s = 2.5;
  double offset_s = 0.0;
  bool valid() const {
    return size_s > 0.0 && size_s <= 4.0 && offset_s >= 0.0 &&
           offset_s + size_s <= 4.0;
  }
};

struct SensorWindow {
  SensorKind sensor{};
  double rate_hz = 0;
  std::vector<VecSample> vec;
  std::vector<QuatSample> quat;
  bool is_quat() const { return sensor == SensorKind::Grv; }
  size_t size() const { return is_quat() ? quat.size() : vec.size(); }
};

struct DeviceWindow {
  DeviceKind device{};
  std::string label;
  std::vector<SensorWindow> sensors;
  const SensorWindow* find(SensorKind s) const {
    for (auto& w : sensors)
      if (w.sensor == s) return &w;
    return nullptr;
  }
};

struct GestureSegment {
  GestureMeta meta;
  double t_start = 0, t_end = 0;
  std::vector<DeviceWindow> devices;  // sorted by concat_rank
  const DeviceWindow* find(DeviceKind d) const {
    for (auto& w : devices)
      if (w.device == d) return &w;
    return nullptr;
  }
};

// Throws std::invalid_argument naming the first violated segment invariant.
inline const GestureSegment& validate_segment(const GestureSegment& g) {
  if (!(g.t_start < g.t_end))
    throw std::invalid_argument("segment " + g.meta.id + ": empty time window");
  if (is_tap(g.meta.kind) && !g.meta.terminal)
    throw std::invalid_argument("segment " + g.meta.id + ": tap without terminal");
  if (g.meta.session != 1 && g.meta.session != 2)
    throw std::invalid_argument("segment " + g.meta.id + ": bad session index");
  if (g.devices.empty())
    throw std::invalid_argument("segment " + g.meta.id + ": no device windows");
  for (auto& dev : g.devices) {
    for (auto& sw : dev.sensors) {
      if (sw.size() == 0)
        throw std::invalid_argument("segment " + g.meta.id + ": empty sensor window " +
                                    std::string(to_token(dev.device)) + "/" +
                                    to_token(sw.sensor));
      const double lo = g.t_start - 1e-9, hi = g.t_end + 1e-9;
      if (sw.is_quat()) {
        for (auto& q : sw.quat) {
          if (q.t < lo || q.t > hi)
            throw std::invalid_argument("segment " + g.meta.id +
                                        ": sample outside window");
          if (std::abs(q.norm() - 1.0) > 1e-3)
            throw std::invalid_argument("segment " + g.meta.id +
                                        ": non-unit quaternion sample");
        }
      } else {
        for (auto& v : sw.vec)
          if (v.t < lo || v.t > hi)
            throw std::invalid_argument("segment " + g.meta.id +
                                        ": sample outside window");
      }
    }
  }
  return g;
}

}  // namespace gestauth
