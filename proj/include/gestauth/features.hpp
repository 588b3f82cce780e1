#pragma once
// Feature extraction: per-channel statistics plus per-sensor kinematics.
//
// Each xyz sensor contributes five processed dimensions (low-passed x/y/z,
// per-sample energy of the filtered axes, per-sample energy of the raw axes)
// and the rotation vector contributes its four filtered components. Every
// dimension yields ten order-statistics/moment features; every xyz sensor
// adds ten kinematic features integrated from the raw axes. A wrist device
// therefore yields 19*10 + 3*10 = 220 features, the door 10*10 + 2*10 = 120.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gestauth/core.hpp"
#include "gestauth/util.hpp"

namespace gestauth::features {

struct FeatureOptions {
  // Single-pole IIR cutoff. 8 Hz keeps gesture motion (< ~6 Hz) while a
  // 20 Hz tone at a 50 Hz rate comes through below half amplitude.
  double lowpass_cutoff_hz = 8.0;
  double peak_gate_stdevs = 1.0;
};

// y[i] = y[i-1] + a*(x[i] - y[i-1]), a = 1 - exp(-2*pi*fc/rate), y[0] = x[0].
// Unit DC gain; an impulse decays by (1-a) per sample.
inline std::vector<double> lowpass(std::span<const double> x, double rate_hz,
                                   double cutoff_hz) {
  if (rate_hz <= 0 || cutoff_hz <= 0)
    throw std::invalid_argument("lowpass: rate and cutoff must be positive");
  const double a = 1.0 - std::exp(-2.0 * 3.141592653589793 * cutoff_hz / rate_hz);
  std::vector<double> y(x.size());
  if (x.empty()) return y;
  y[0] = x[0];
  for (size_t i = 1; i < x.size(); ++i) y[i] = y[i - 1] + a * (x[i] - y[i - 1]);
  return y;
}

inline double energy(double x, double y, double z) {
  return std::sqrt(x * x + y * y + z * z);
}

inline constexpr int kStatCount = 10;
inline constexpr const char* kStatNames[kStatCount] = {
    "min", "max", "mean", "med", "stdev", "var", "iqr", "kurt", "skew", "peaks"};

namespace detail {

// Linear-interpolated quantile at position (n-1)*q of the sorted sample.
inline double quantile_sorted(const std::vector<double>& s, double q) {
  const double pos = (double(s.size()) - 1.0) * q;
  const size_t lo = size_t(pos);
  const double frac = pos - double(lo);
  if (lo + 1 >= s.size()) return s.back();
  return s[lo] + frac * (s[lo + 1] - s[lo]);
}

}  // namespace detail

// The ten per-channel statistics, in the order of kStatNames. Population
// moments; excess kurtosis; zero-variance channels report kurt = skew = 0.
inline std::array<double, kStatCount> stat_features(std::span<const double> x,
                                                    double peak_gate_stdevs = 1.0) {
  if (x.size() < 4)
    throw std::invalid_argument("stat_features: channel shorter than 4 samples");
  const size_t n = x.size();
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double mn = sorted.front(), mx = sorted.back();
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= double(n);
  m3 /= double(n);
  m4 /= double(n);
  const double var = m2;
  const double stdev = std::sqrt(var);
  const double med = detail::quantile_sorted(sorted, 0.5);
  const double iqr = detail::quantile_sorted(sorted, 0.75) - detail::quantile_sorted(sorted, 0.25);
  const bool constant = mn == mx;
  const double kurt = constant ? 0.0 : m4 / (m2 * m2) - 3.0;
  const double skew = constant ? 0.0 : m3 / (m2 * stdev);
  // Peaks: interior strict local maxima that also clear mean + k*stdev.
  const double gate = mean + peak_gate_stdevs * stdev;
  double peaks = 0;
  for (size_t i = 1; i + 1 < n; ++i)
    if (x[i] > x[i - 1] && x[i] > x[i + 1] && x[i] > gate) peaks += 1;
  return {mn, mx, mean, med, stdev, var, iqr, kurt, skew, peaks};
}

inline constexpr int kKinCount = 10;
inline constexpr const char* kKinNames[kKinCount] = {
    "x-velomean", "y-velomean", "z-velomean", "x-velomax", "y-velomax",
    "z-velomax",  "x-disp",     "y-disp",     "z-disp",    "euc-disp"};

// Kinematics from the raw axes: cumulative trapezoidal velocity with a zero
// initial condition, then mean / peak-magnitude velocity and trapezoidal
// displacement per axis plus the Euclidean displacement across axes.
inline std::array<double, kKinCount> kinematic_features(const SensorWindow& w) {
  if (w.is_quat())
    throw std::invalid_argument("kinematic_features: rotation vector has no kinematics");
  const size_t n = w.vec.size();
  if (n < 2) throw std::invalid_argument("kinematic_features: window shorter than 2 samples");
  std::array<double, kKinCount> out{};
  double disp[3] = {0, 0, 0};
  for (int axis = 0; axis < 3; ++axis) {
    auto value = [&](size_t i) {
      const auto& s = w.vec[i];
      return axis == 0 ? s.x : axis == 1 ? s.y : s.z;
    };
    double v = 0, v_sum = 0, v_peak = 0, d = 0;
    for (size_t i = 1; i < n; ++i) {
      const double dt = w.vec[i].t - w.vec[i - 1].t;
      const double v_prev = v;
      v += 0.5 * (value(i) + value(i - 1)) * dt;
      v_sum += v;
      if (std::abs(v) > std::abs(v_peak)) v_peak = v;
      d += 0.5 * (v + v_prev) * dt;
    }
    out[size_t(axis)] = v_sum / double(n);             // velomean over the series

    out[size_t(3 + axis)] = std::abs(v_peak);          // velomax
    out[size_t(6 + axis)] = d;                         // disp
    disp[axis] = d;
  }
  out[9] = energy(disp[0], disp[1], disp[2]);
  return out;
}

struct Channel {
  std::string name;  // e.g. "Acc-x", "Gyr-e", "GRV-w", "Acc-eraw"
  std::vector<double> values;
};

inline const char* sensor_feature_token(SensorKind s) {
  switch (s) {
    case SensorKind::Accelerometer: return "Acc";
    case SensorKind::Gyroscope: return "Gyr";
    case SensorKind::LinearAccelerometer: return "LAc";
    case SensorKind::Grv: return "GRV";
  }
  return "?";
}

// The processed dimensions of one sensor window.
inline std::vector<Channel> build_dimensions(const SensorWindow& w,
                                             const FeatureOptions& opt = {}) {
  const std::string s = sensor_feature_token(w.sensor);
  std::vector<Channel> out;
  if (w.is_quat()) {
    const size_t n = w.quat.size();
    std::vector<double> comp(n);
    const char* axes = "xyzw";
    for (int k = 0; k < 4; ++k) {
      for (size_t i = 0; i < n; ++i) {
        const auto& q = w.quat[i];
        comp[i] = k == 0 ? q.x : k == 1 ? q.y : k == 2 ? q.z : q.w;
      }
      out.push_back({s + "-" + axes[k], lowpass(comp, w.rate_hz, opt.lowpass_cutoff_hz)});
    }
    return out;
  }
  const size_t n = w.vec.size();
  std::vector<double> raw[3];
  for (auto& r : raw) r.resize(n);
  for (size_t i = 0; i < n; ++i) {
    raw[0][i] = w.vec[i].x;
    raw[1][i] = w.vec[i].y;
    raw[2][i] = w.vec[i].z;
  }
  const char* axes = "xyz";
  std::vector<double> filt[3];
  for (int k = 0; k < 3; ++k) {
    filt[k] = lowpass(raw[k], w.rate_hz, opt.lowpass_cutoff_hz);
    out.push_back({s + "-" + axes[k], filt[k]});
  }
  std::vector<double> e_filt(n), e_raw(n);
  for (size_t i = 0; i < n; ++i) {
    e_filt[i] = energy(filt[0][i], filt[1][i], filt[2][i]);
    e_raw[i] = energy(raw[0][i], raw[1][i], raw[2][i]);
  }
  out.push_back({s + "-e", std::move(e_filt)});
  out.push_back({s + "-eraw", std::move(e_raw)});
  return out;
}

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;
  GestureMeta meta;
};

namespace detail {

inline std::vector<DeviceKind> sorted_devices(std::span<const DeviceKind> devices) {
  std::vector<DeviceKind> order(devices.begin(), devices.end());
  std::sort(order.begin(), order.end(),
            [](DeviceKind a, DeviceKind b) { return concat_rank(a) < concat_rank(b); });
  if (std::adjacent_find(order.begin(), order.end()) != order.end())
    throw std::invalid_argument("duplicate device in feature source list");
  if (order.empty()) throw std::invalid_argument("empty feature source list");
  return order;
}

inline std::string device_prefix(DeviceKind d) {
  switch (d) {
    case DeviceKind::Door: return "d-";
    case DeviceKind::Ring: return "r-";
    case DeviceKind::Watch: return "w-";
  }
  return "?-";
}

template <class EmitStat, class EmitKin>
inline void walk_schema(std::span<const DeviceKind> devices, SensorMask mask,
                        EmitStat&& stat, EmitKin&& kin) {
  const auto order = sorted_devices(devices);
  const bool prefixed = order.size() > 1;
  for (DeviceKind d : order) {
    const std::string pre = prefixed ? device_prefix(d) : "";
    for (SensorKind s : device_sensors(d)) {
      if (!(mask & sensor_bit(s))) continue;
      stat(d, s, pre);
      if (s != SensorKind::Grv) kin(d, s, pre);
    }
  }
}

}  // namespace detail

// Deterministic schema for a device set and sensor mask: per sensor, the
// per-channel statistics then the kinematics, devices in door/ring/watch
// order with d-/r-/w- prefixes only when more than one device contributes.
inline std::vector<std::string> feature_names(std::span<const DeviceKind> devices,
                                              SensorMask mask = kAllSensors) {
  std::vector<std::string> names;
  detail::walk_schema(
      devices, mask,
      [&](DeviceKind, SensorKind s, const std::string& pre) {
        const std::string tok = sensor_feature_token(s);
        const char* axes_xyz[] = {"x", "y", "z", "e", "eraw"};
        const char* axes_quat[] = {"x", "y", "z", "w"};
        const bool quat = s == SensorKind::Grv;
        const auto n_axes = quat ? 4 : 5;
        for (int k = 0; k < n_axes; ++k)
          for (int st = 0; st < kStatCount; ++st)
            names.push_back(pre + tok + "-" + (quat ? axes_quat[k] : axes_xyz[k]) + "-" +
                            kStatNames[st]);
      },
      [&](DeviceKind, SensorKind s, const std::string& pre) {
        const std::string tok = sensor_feature_token(s);
        for (int k = 0; k < kKinCount; ++k)
          names.push_back(pre + tok + "-" + kKinNames[k]);
      });
  return names;
}

inline FeatureVector extract(const GestureSegment& g, std::span<const DeviceKind> devices,
                             SensorMask mask = kAllSensors, const FeatureOptions& opt = {}) {
  FeatureVector fv;
  fv.meta = g.meta;
  detail::walk_schema(
      devices, mask,
      [&](DeviceKind d, SensorKind s, const std::string& pre) {
        const DeviceWindow* dev = g.find(d);
        if (!dev)
          throw std::runtime_error("segment " + g.meta.id + ": missing device window " +
                                   to_token(d));
        const SensorWindow* sw = dev->find(s);
        if (!sw)
          throw std::runtime_error("segment " + g.meta.id + ": missing sensor " +
                                   std::string(to_token(d)) + "/" + to_token(s));
        if (sw->size() < 4)
          throw std::runtime_error("segment " + g.meta.id + ": window shorter than 4 samples for " +
                                   std::string(to_token(d)) + "/" + to_token(s));
        for (const auto& ch : build_dimensions(*sw, opt)) {
          const auto st = stat_features(ch.values, opt.peak_gate_stdevs);
          for (int k = 0; k < kStatCount; ++k) {
            fv.names.push_back(pre + ch.name + "-" + kStatNames[k]);
            fv.values.push_back(st[size_t(k)]);
          }
        }
      },
      [&](DeviceKind d, SensorKind s, const std::string& pre) {
        const SensorWindow* sw = g.find(d)->find(s);
        const auto kin = kinematic_features(*sw);
        const std::string tok = sensor_feature_token(s);
        for (int k = 0; k < kKinCount; ++k) {
          fv.names.push_back(pre + tok + "-" + kKinNames[k]);
          fv.values.push_back(kin[size_t(k)]);
        }
      });
  return fv;
}

// A named feature matrix with per-row gesture metadata.
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::vector<GestureMeta> metas;

  size_t width() const { return names.size(); }
  size_t size() const { return rows.size(); }

  void append(FeatureVector&& fv) {
    if (names.empty())
      names = fv.names;
    else if (names != fv.names)
      throw std::runtime_error("feature schema mismatch appending " + fv.meta.id);
    rows.push_back(std::move(fv.values));
    metas.push_back(std::move(fv.meta));
  }
};

inline void write_feature_table(const FeatureTable& t, const std::filesystem::path& file) {
  std::ostringstream out;
  out << "id\tuser\tsession\tkind\tterminal\tarm\tattacker\tvictim\tattempt";
  for (auto& n : t.names) out << "\t" << n;
  out << "\n";
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const auto& m = t.metas[i];
    out << m.id << "\t" << m.user << "\t" << m.session << "\t" << to_token(m.kind) << "\t"
        << (m.terminal ? terminal_token(*m.terminal) : "-") << "\t" << to_token(m.arm) << "\t"
        << (m.impersonation ? m.impersonation->attacker : "-") << "\t"
        << (m.impersonation ? m.impersonation->victim : "-") << "\t"
        << (m.impersonation ? std::to_string(m.impersonation->attempt) : "-");
    for (double v : t.rows[i]) out << "\t" << fmt_g(v);
    out << "\n";
  }
  write_text_file(file, out.str());
}

}  // namespace gestauth::features
