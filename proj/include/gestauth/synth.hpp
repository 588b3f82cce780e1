#pragma once
// Synthetic study generator. Produces byte-identical-per-seed recordings of
// a two-session payment/access study: per-user motion profiles drive tap
// approaches toward terminals with fixed geometry and knock trains against a
// sensed door. `separability` scales how far user profiles spread apart
// (0 -> everyone shares one profile); `fidelity` interpolates an attacker's
// profile toward the victim's for impersonation sessions.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "gestauth/core.hpp"
#include "gestauth/rng.hpp"
#include "gestauth/util.hpp"

namespace gestauth::synth {

namespace fs = std::filesystem;

struct StudySpec {
  int n_users = 6;
  int gestures_per = 6;  // per (tap kind, terminal) and per knock kind, per session
  double separability = 0.9;
  double fidelity = 1.0;
  uint64_t seed = 1;
  std::vector<int> victims;    // 0-based user indices; empty -> no impersonations
  std::vector<int> attackers;
  double ring_hz = 100.0, watch_hz = 50.0, door_hz = 30.0;
};

struct TerminalInfo {
  double height_cm = 0, tilt_deg = 0, distance_cm = 0;
  bool handheld = false;
};

// Fixed reader geometry; index 0..5 are terminals 1..6, index 6 is freestyle.
inline const std::array<TerminalInfo, 7>& terminal_table() {
  static const std::array<TerminalInfo, 7> table = {{
      {100, 0, 5, false},
      {120, 60, 25, false},
      {95, 45, -10, false},
      {105, 30, 15, false},
      {110, 15, 10, false},
      {115, 90, 30, false},
      {0, 0, 0, true},
  }};
  return table;
}

struct GenerationSummary {
  fs::path root;
  int sessions = 0;
  int impersonation_sessions = 0;
  std::vector<std::string> manifests;  // relative paths, study order
};

namespace detail {

inline std::string user_name(int idx) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "u%02d", idx + 1);
  return buf;
}

struct Profile {
  double approach_dur = 1.2;
  double ax = 6.0, ay = 1.6, az = 2.8;  // peak linear acceleration per axis
  double h2 = 0.35;                     // second-harmonic shape weight
  double rot_amp = 0.9;                 // wrist rotation while reaching, rad
  double axis[3] = {0.25, 0.88, 0.40};  // rotation axis, unit
  double cadence = 0.94;                // seconds per knock
  double force = 1.0;
  double noise = 0.05;
  int secret_count = 3;
  std::vector<double> secret_gaps;      // secret_count - 1 inter-knock gaps
};

// Parameter draws happen in a fixed order; appending new ones keeps old
// studies reproducible.
inline Profile make_profile(const StudySpec& spec, int user) {
  Rng rng(mix_seed(mix_seed(spec.seed, 0x70f11eull), uint64_t(user)));
  const double s = spec.separability;
  Profile p;
  p.approach_dur += s * rng.uniform(-0.45, 0.45);
  p.ax += s * rng.uniform(-2.5, 2.5);
  p.ay += s * rng.uniform(-0.8, 0.8);
  p.az += s * rng.uniform(-1.2, 1.2);
  p.h2 += s * rng.uniform(-0.30, 0.30);
  p.rot_amp += s * rng.uniform(-0.5, 0.5);
  for (double& a : p.axis) a += s * rng.uniform(-0.45, 0.45);
  const double an = std::sqrt(p.axis[0] * p.axis[0] + p.axis[1] * p.axis[1] +
                              p.axis[2] * p.axis[2]);
  for (double& a : p.axis) a /= an;
  p.cadence += s * rng.uniform(-0.30, 0.30);
  p.force += s * rng.uniform(-0.45, 0.45);
  p.noise += s * rng.uniform(0.0, 0.04);
  p.secret_count = 3 + int(std::floor(rng.uniform01() * (1.0 + 3.0 * s)));
  if (p.secret_count > 6) p.secret_count = 6;
  p.secret_gaps.clear();
  for (int i = 1; i < p.secret_count; ++i)
    p.secret_gaps.push_back(p.cadence * (1.0 + s * rng.uniform(-0.25, 0.35)));
  return p;
}

inline Profile blend(const Profile& attacker, const Profile& victim, double fidelity) {
  auto lerp = [fidelity](double a, double v) { return a + fidelity * (v - a); };
  Profile p;
  p.approach_dur = lerp(attacker.approach_dur, victim.approach_dur);
  p.ax = lerp(attacker.ax, victim.ax);
  p.ay = lerp(attacker.ay, victim.ay);
  p.az = lerp(attacker.az, victim.az);
  p.h2 = lerp(attacker.h2, victim.h2);
  p.rot_amp = lerp(attacker.rot_amp, victim.rot_amp);
  for (int i = 0; i < 3; ++i) p.axis[i] = lerp(attacker.axis[i], victim.axis[i]);
  const double an = std::sqrt(p.axis[0] * p.axis[0] + p.axis[1] * p.axis[1] +
                              p.axis[2] * p.axis[2]);
  for (double& a : p.axis) a /= an;
  p.cadence = lerp(attacker.cadence, victim.cadence);
  p.force = lerp(attacker.force, victim.force);
  p.noise = attacker.noise;  // the attacker's hand stays their own
  // A motivated attacker copies the observed rhythm outright.
  if (fidelity >= 0.5) {
    p.secret_count = victim.secret_count;
    p.secret_gaps = victim.secret_gaps;
  } else {
    p.secret_count = attacker.secret_count;
    p.secret_gaps = attacker.secret_gaps;
  }
  return p;
}

// ---- quaternion / rotation helpers ----

inline void axis_angle_quat(const double axis[3], double phi, double q[4]) {
  const double h = 0.5 * phi;
  const double s = std::sin(h);
  q[0] = axis[0] * s;
  q[1] = axis[1] * s;
  q[2] = axis[2] * s;
  q[3] = std::cos(h);
}

// Rodrigues rotation of v about `axis` by angle phi.
inline void rotate_axis_angle(const double v[3], const double axis[3], double phi,
                              double out[3]) {
  const double c = std::cos(phi), s = std::sin(phi);
  const double kx = axis[0], ky = axis[1], kz = axis[2];
  const double cross[3] = {ky * v[2] - kz * v[1], kz * v[0] - kx * v[2],
                           kx * v[1] - ky * v[0]};
  const double dot = kx * v[0] + ky * v[1] + kz * v[2];
  for (int i = 0; i < 3; ++i)
    out[i] = v[i] * c + cross[i] * s + axis[i] * dot * (1.0 - c);
}

// ---- motion primitives ----

struct TermMod {
  double amp = 1.0, tilt_rad = 0.0, lift = 0.0;
};

inline TermMod term_mod(int terminal) {
  const auto& t = terminal_table()[size_t(terminal - 1)];
  if (t.handheld) return {0.85, 0.35, 0.10};
  TermMod m;
  m.amp = 1.0 + (t.distance_cm - 12.5) / 80.0;
  m.tilt_rad = t.tilt_deg * 3.141592653589793 / 180.0 * 0.35;
  m.lift = (t.height_cm - 107.5) / 25.0 * 0.8;
  return m;
}

struct TapPrim {
  double t0 = 0, dur = 1.2;     // window [t0-dur, t0]
  double A[3] = {0, 0, 0};      // peak linear acceleration after terminal mod
  double h2 = 0.35;
  double imp = 2.0;             // contact transient amplitude
  double rot = 0.9;
  double ring_scale = 1.0, watch_scale = 0.62;
  double active_lo() const { return t0 - dur; }
  double active_hi() const { return t0 + 2.5; }  // orientation relaxation tail
};

struct KnockPrim {
  double ts = 0, te = 0;
  std::vector<double> impacts;
  double swing = 2.0, force = 1.0, rot = 0.12, cad = 0.94;
  double ring_scale = 1.0, watch_scale = 0.7;
  double active_lo() const { return ts - 0.5; }
  double active_hi() const { return te + 0.6; }
};

struct Motion {
  double lin[3] = {0, 0, 0};
  double omega[3] = {0, 0, 0};
  double phi = 0;
};

inline void eval_tap(const TapPrim& p, double t, const double axis[3], double scale,
                     double rot_scale, Motion& m) {
  if (t < p.active_lo() || t > p.active_hi()) return;
  if (t <= p.t0) {
    const double u = (t - p.active_lo()) / p.dur;
    const double base = std::sin(6.283185307179586 * u) +
                        p.h2 * std::sin(12.566370614359172 * u);
    for (int i = 0; i < 3; ++i) m.lin[i] += p.A[i] * scale * base;
    const double s = u * u * (3.0 - 2.0 * u);
    const double sp = 6.0 * u * (1.0 - u) / p.dur;
    m.phi += p.rot * rot_scale * s;
    for (int i = 0; i < 3; ++i) m.omega[i] += p.rot * rot_scale * sp * axis[i];
    const double back = p.t0 - t;
    if (back < 0.06)
      m.lin[0] += p.imp * scale * std::exp(-back / 0.015) *
                  std::cos(6.283185307179586 * 16.0 * back);
  } else {
    const double d = t - p.t0;
    const double decay = std::exp(-d / 0.4);
    m.phi += p.rot * rot_scale * decay;
    const double sp = -p.rot * rot_scale * decay / 0.4;
    for (int i = 0; i < 3; ++i) m.omega[i] += sp * axis[i];
  }
}

inline void eval_knock(const KnockPrim& p, double t, const double axis[3], double scale,
                       double rot_scale, Motion& m) {
  if (t < p.active_lo() || t > p.active_hi()) return;
  const double half = 0.35 * p.cad;
  for (double tau : p.impacts) {
    const double d = t - tau;
    if (d >= -half && d <= half) {
      // Wind-up and strike of the forearm.
      m.lin[0] += p.swing * scale * std::sin(3.141592653589793 * d / half);
      const double w = p.rot * rot_scale * 8.0 * std::cos(3.141592653589793 * d / half);
      for (int i = 0; i < 3; ++i) m.omega[i] += w * axis[i];
      m.phi += p.rot * rot_scale * std::cos(1.5707963267948966 * d / half);
    }
    if (d >= 0 && d < 0.05) {
      const double hit = p.force * scale * std::exp(-d / 0.012) *
                         std::cos(6.283185307179586 * 22.0 * d);
      m.lin[0] += 3.2 * hit;
      m.lin[2] += 1.3 * hit;
    }
  }
}

// Door vibration response: decaying ringing per impact.
inline void eval_door(const KnockPrim& p, double t, Motion& m) {
  for (double tau : p.impacts) {
    const double d = t - tau;
    if (d < 0 || d > 1.2) continue;
    const double ring = p.force * std::exp(-d / 0.12) *
                        std::sin(6.283185307179586 * 9.0 * d);
    m.lin[2] += 2.4 * ring;
    m.lin[0] += 0.8 * ring;
    m.omega[1] += 0.35 * p.force * std::exp(-d / 0.15) *
                  std::sin(6.283185307179586 * 7.0 * d);
  }
}

struct SessionScript {
  std::vector<TapPrim> taps;      // time-ordered
  std::vector<KnockPrim> knocks;  // time-ordered, after the taps
  std::vector<std::string> event_lines;
  std::vector<std::string> knock_kind_tokens;
  double total = 0;
  const Profile* profile = nullptr;
};

// Which tap terminals/kinds a session contains.
struct Schedule {
  std::vector<std::pair<GestureKind, int>> tap_slots;   // kind, terminal
  std::vector<GestureKind> knock_slots;
  int repeats = 1;
};

inline Schedule full_schedule(int gestures_per) {
  Schedule s;
  for (GestureKind k : {GestureKind::RingTap, GestureKind::WatchTap})
    for (int t = 1; t <= kFreestyleTerminal; ++t) s.tap_slots.emplace_back(k, t);
  s.knock_slots = {GestureKind::Knock3, GestureKind::Knock5, GestureKind::SecretKnock};
  s.repeats = gestures_per;
  return s;
}

inline Schedule impersonation_schedule() {
  Schedule s;
  for (GestureKind k : {GestureKind::RingTap, GestureKind::WatchTap})
    for (int t : {2, 3}) s.tap_slots.emplace_back(k, t);
  s.knock_slots = {GestureKind::Knock5, GestureKind::SecretKnock};
  s.repeats = 3;  // three attempts per observed gesture
  return s;
}

inline SessionScript build_script(const Profile& prof, const Schedule& sched,
                                  uint64_t session_seed, double timing_noise) {
  SessionScript script;
  script.profile = &prof;
  double cursor = 6.0;
  uint64_t ordinal = 0;
  auto gesture_rng = [&]() { return Rng(mix_seed(session_seed, ordinal++)); };

  for (auto [kind, terminal] : sched.tap_slots) {
    for (int g = 0; g < sched.repeats; ++g) {
      Rng rng = gesture_rng();
      auto jitter = [&]() { return 1.0 + 0.04 * rng.normal(); };
      const TermMod tm = term_mod(terminal);
      TapPrim p;
      p.t0 = cursor;
      p.dur = std::max(0.5, prof.approach_dur * jitter());
      const double ax = prof.ax * tm.amp * jitter();
      const double ay = prof.ay * tm.amp * jitter();
      const double az = prof.az * jitter();
      p.A[0] = ax * std::cos(tm.tilt_rad);
      p.A[1] = ay;
      p.A[2] = az * 0.6 + ax * std::sin(tm.tilt_rad) + tm.lift;
      p.h2 = prof.h2 * jitter();
      p.imp = (1.8 + 0.5 * prof.force) * jitter();
      p.rot = prof.rot_amp * (1.0 + 0.15 * (tm.amp - 1.0)) * jitter();
      if (kind == GestureKind::RingTap) {
        p.ring_scale = 1.0;
        p.watch_scale = 0.62;
      } else {
        p.ring_scale = 0.72;
        p.watch_scale = 1.0;
      }
      script.taps.push_back(p);
      std::ostringstream ev;
      ev << fmt_fixed(p.t0) << " NFC "
         << (kind == GestureKind::RingTap ? "ring" : "watch") << " "
         << terminal_token(terminal);
      script.event_lines.push_back(ev.str());
      cursor += 4.6 + rng.uniform(0.0, 0.4);
    }
  }

  for (GestureKind kind : sched.knock_slots) {
    for (int g = 0; g < sched.repeats; ++g) {
      Rng rng = gesture_rng();
      auto jitter = [&]() { return 1.0 + 0.04 * rng.normal(); };
      KnockPrim p;
      p.cad = std::max(0.4, prof.cadence * jitter());
      p.force = prof.force * jitter();
      p.swing = (1.6 + 0.9 * prof.force) * jitter();
      p.rot = 0.12 * (0.6 + 0.4 * prof.rot_amp) * jitter();
      p.ts = cursor;
      double t = p.ts + 0.25;
      int count = kind == GestureKind::Knock3 ? 3
                  : kind == GestureKind::Knock5 ? 5
                                                : prof.secret_count;
      for (int i = 0; i < count; ++i) {
        // However sloppy the timing, a knock stays inside its button press.
        p.impacts.push_back(
            std::max(p.ts + 0.05, t + timing_noise * p.cad * rng.normal()));
        if (i + 1 < count) {
          const double gap = kind == GestureKind::SecretKnock
                                 ? prof.secret_gaps[size_t(i)]
                                 : p.cad * (1.0 + 0.02 * rng.normal());
          t += std::max(0.25, gap);
        }
      }
      p.te = *std::max_element(p.impacts.begin(), p.impacts.end()) + 0.45 * p.cad;
      script.knocks.push_back(p);
      std::ostringstream s_ev, e_ev;
      s_ev << fmt_fixed(p.ts) << " BTN Start";
      e_ev << fmt_fixed(p.te) << " BTN End";
      script.event_lines.push_back(s_ev.str());
      script.event_lines.push_back(e_ev.str());
      script.knock_kind_tokens.push_back(kind == GestureKind::Knock3   ? "3"
                                         : kind == GestureKind::Knock5 ? "5"
                                                                       : "S");
      cursor = p.te + 4.0 + rng.uniform(0.0, 0.4);
    }
  }
  script.total = cursor + 2.0;
  return script;
}

// Sum of all active primitives at time t, scaled for one wearable.
inline Motion eval_wearable(const SessionScript& sc, double t, DeviceKind dev,
                            size_t& tap_cursor, size_t& knock_cursor) {
  Motion m;
  while (tap_cursor < sc.taps.size() && sc.taps[tap_cursor].active_hi() < t) ++tap_cursor;
  while (knock_cursor < sc.knocks.size() && sc.knocks[knock_cursor].active_hi() < t)
    ++knock_cursor;
  const bool watch = dev == DeviceKind::Watch;
  const double* axis = sc.profile->axis;
  for (size_t i = tap_cursor; i < sc.taps.size() && sc.taps[i].active_lo() <= t; ++i)
    eval_tap(sc.taps[i], t, axis,
             watch ? sc.taps[i].watch_scale : sc.taps[i].ring_scale,
             watch ? 0.85 : 1.0, m);
  for (size_t i = knock_cursor; i < sc.knocks.size() && sc.knocks[i].active_lo() <= t; ++i)
    eval_knock(sc.knocks[i], t, axis,
               watch ? sc.knocks[i].watch_scale : sc.knocks[i].ring_scale,
               watch ? 0.85 : 1.0, m);
  return m;
}

struct StreamPlan {
  DeviceKind device;
  const char* label;
  SensorKind sensor;
  double rate;
  double lag;
};

inline void write_session(const StudySpec& spec, const Profile& prof,
                          const std::string& user, int session,
                          const std::string& rel_dir, const Schedule& sched,
                          double timing_noise, const std::string& impersonation_of,
                          const fs::path& out_root) {
  const uint64_t session_seed =
      mix_seed(mix_seed(spec.seed, fnv1a(user)), fnv1a(rel_dir));
  const SessionScript sc = build_script(prof, sched, session_seed, timing_noise);
  const fs::path dir = out_root / rel_dir;
  fs::create_directories(dir / "streams");

  const StreamPlan plans[] = {
      {DeviceKind::Ring, "ring", SensorKind::Accelerometer, spec.ring_hz, 0.0},
      {DeviceKind::Ring, "ring", SensorKind::Gyroscope, spec.ring_hz, 0.0},
      {DeviceKind::Ring, "ring", SensorKind::LinearAccelerometer, spec.ring_hz, 0.0},
      {DeviceKind::Ring, "ring", SensorKind::Grv, spec.ring_hz, 0.0},
      {DeviceKind::Watch, "watch", SensorKind::Accelerometer, spec.watch_hz, 0.045},
      {DeviceKind::Watch, "watch", SensorKind::Gyroscope, spec.watch_hz, 0.045},
      {DeviceKind::Watch, "watch", SensorKind::LinearAccelerometer, spec.watch_hz, 0.045},
      {DeviceKind::Watch, "watch", SensorKind::Grv, spec.watch_hz, 0.045},
      {DeviceKind::Door, "door", SensorKind::Accelerometer, spec.door_hz, 0.0},
      {DeviceKind::Door, "door", SensorKind::Gyroscope, spec.door_hz, 0.0},
  };

  std::ostringstream manifest;
  manifest << "user " << user << "\nsession " << session << "\narm Left\n";
  manifest << "offset ring 0\noffset watch 0\noffset door 0\n";

  for (const auto& plan : plans) {
    Rng noise(mix_seed(session_seed, fnv1a(std::string(plan.label) + ":" +
                                           to_token(plan.sensor))));
    const long n = std::lround(sc.total * plan.rate) + 1;
    std::ostringstream out;
    out << "# device=" << plan.label << " sensor=" << to_token(plan.sensor)
        << " rate=" << fmt_g(plan.rate) << "\n";
    size_t tap_cur = 0, knock_cur = 0;
    for (long i = 0; i < n; ++i) {
      const double t = double(i) / plan.rate;
      const double tm = t - plan.lag;
      Motion m;
      if (plan.device == DeviceKind::Door) {
        size_t kc = knock_cur;
        while (kc < sc.knocks.size() && sc.knocks[kc].active_hi() + 1.2 < tm) ++kc;
        knock_cur = kc;
        for (size_t k = knock_cur; k < sc.knocks.size() && sc.knocks[k].ts - 0.1 <= tm; ++k)
          eval_door(sc.knocks[k], tm, m);
      } else {
        m = eval_wearable(sc, tm, plan.device, tap_cur, knock_cur);
      }
      const auto& prof_noise = prof.noise;
      out << fmt_fixed(t) << " ";
      switch (plan.sensor) {
        case SensorKind::Accelerometer: {
          double g_dev[3];
          const double g_world[3] = {0, 0, 9.81};
          if (plan.device == DeviceKind::Door) {
            g_dev[0] = 0; g_dev[1] = 0; g_dev[2] = 9.81;
          } else {
            rotate_axis_angle(g_world, prof.axis, -m.phi, g_dev);
          }
          out << fmt_g(m.lin[0] + g_dev[0] + noise.normal(0, prof_noise * 2.0), 6) << " "
              << fmt_g(m.lin[1] + g_dev[1] + noise.normal(0, prof_noise * 2.0), 6) << " "
              << fmt_g(m.lin[2] + g_dev[2] + noise.normal(0, prof_noise * 2.0), 6);
          break;
        }
        case SensorKind::LinearAccelerometer:
          out << fmt_g(m.lin[0] + noise.normal(0, prof_noise * 1.5), 6) << " "
              << fmt_g(m.lin[1] + noise.normal(0, prof_noise * 1.5), 6) << " "
              << fmt_g(m.lin[2] + noise.normal(0, prof_noise * 1.5), 6);
          break;
        case SensorKind::Gyroscope:
          out << fmt_g(m.omega[0] + noise.normal(0, prof_noise * 1.2), 6) << " "
              << fmt_g(m.omega[1] + noise.normal(0, prof_noise * 1.2), 6) << " "
              << fmt_g(m.omega[2] + noise.normal(0, prof_noise * 1.2), 6);
          break;
        case SensorKind::Grv: {
          double q[4];
          axis_angle_quat(prof.axis, m.phi, q);
          for (double& c : q) c += noise.normal(0, prof_noise * 0.05);
          const double nq =
              std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
          out << fmt_g(q[0] / nq, 6) << " " << fmt_g(q[1] / nq, 6) << " "
              << fmt_g(q[2] / nq, 6) << " " << fmt_g(q[3] / nq, 6);
          break;
        }
      }
      out << "\n";
    }
    const std::string fname =
        std::string("streams/") + plan.label + "_" + to_token(plan.sensor) + ".txt";
    write_text_file(dir / fname, out.str());
    manifest << "stream " << plan.label << " " << to_token(plan.sensor) << " "
             << fmt_g(plan.rate) << " " << fname << "\n";
  }

  {
    std::ostringstream ev;
    for (auto& line : sc.event_lines) ev << line << "\n";
    write_text_file(dir / "events.txt", ev.str());
  }
  manifest << "events events.txt\n";
  if (!sc.knock_kind_tokens.empty()) {
    manifest << "knock_kinds";
    for (auto& k : sc.knock_kind_tokens) manifest << " " << k;
    manifest << "\n";
  }
  if (!impersonation_of.empty()) manifest << "impersonation_of " << impersonation_of << "\n";
  write_text_file(dir / "manifest.txt", manifest.str());
}

}  // namespace detail

inline std::vector<std::string> base_manifest_paths(const StudySpec& spec) {
  std::vector<std::string> out;
  for (int u = 0; u < spec.n_users; ++u)
    for (int s = 1; s <= 2; ++s)
      out.push_back(detail::user_name(u) + "/s" + std::to_string(s) + "/manifest.txt");
  return out;
}

inline std::vector<std::string> generate_base_sessions(const StudySpec& spec,
                                                       const fs::path& out) {
  if (spec.n_users < 2) throw std::invalid_argument("study needs at least 2 users");
  if (spec.gestures_per < 1) throw std::invalid_argument("gestures_per must be positive");
  if (spec.separability < 0 || spec.separability > 1)
    throw std::invalid_argument("separability must lie in [0,1]");
  std::vector<std::string> manifests;
  const auto sched = detail::full_schedule(spec.gestures_per);
  for (int u = 0; u < spec.n_users; ++u) {
    const auto prof = detail::make_profile(spec, u);
    const auto user = detail::user_name(u);
    for (int s = 1; s <= 2; ++s) {
      const std::string rel = user + "/s" + std::to_string(s);
      detail::write_session(spec, prof, user, s, rel, sched, 0.02, "", out);
      manifests.push_back(rel + "/manifest.txt");
    }
  }
  return manifests;
}

// Impersonation sessions for every (attacker, victim) pair. `dir_tag` names
// the session directory (e.g. "imp" -> u04/imp_u01), letting several fidelity
// variants coexist beside one base study.
inline std::vector<std::string> generate_impersonation_sessions(const StudySpec& spec,
                                                                const fs::path& out,
                                                                const std::string& dir_tag) {
  if (spec.fidelity < 0 || spec.fidelity > 1)
    throw std::invalid_argument("fidelity must lie in [0,1]");
  std::vector<std::string> manifests;
  const auto sched = detail::impersonation_schedule();
  for (int a : spec.attackers) {
    for (int v : spec.victims) {
      if (a == v) throw std::invalid_argument("a user cannot impersonate themselves");
      if (a < 0 || a >= spec.n_users || v < 0 || v >= spec.n_users)
        throw std::invalid_argument("impersonation pair outside the user range");
      const auto attacker_prof = detail::make_profile(spec, a);
      const auto victim_prof = detail::make_profile(spec, v);
      const auto prof = detail::blend(attacker_prof, victim_prof, spec.fidelity);
      const auto attacker = detail::user_name(a);
      const auto victim = detail::user_name(v);
      const std::string rel = attacker + "/" + dir_tag + "_" + victim;
      const double timing_noise = 0.02 + 0.25 * (1.0 - spec.fidelity);
      detail::write_session(spec, prof, attacker, 2, rel, sched, timing_noise, victim, out);
      manifests.push_back(rel + "/manifest.txt");
    }
  }
  return manifests;
}

inline void write_study_list(const fs::path& file, const std::vector<std::string>& manifests) {
  std::ostringstream out;
  for (auto& m : manifests) out << m << "\n";
  write_text_file(file, out.str());
}

inline GenerationSummary generate_study(const StudySpec& spec, const fs::path& out) {
  GenerationSummary sum;
  sum.root = out;
  auto manifests = generate_base_sessions(spec, out);
  sum.sessions = int(manifests.size());
  if (!spec.victims.empty() && !spec.attackers.empty()) {
    auto imp = generate_impersonation_sessions(spec, out, "imp");
    sum.impersonation_sessions = int(imp.size());
    manifests.insert(manifests.end(), imp.begin(), imp.end());
  }
  write_study_list(out / "study.txt", manifests);

  std::ostringstream summary;
  summary << "study v1\n";
  summary << "seed " << spec.seed << "\n";
  summary << "users " << spec.n_users << "\n";
  summary << "gestures_per " << spec.gestures_per << "\n";
  summary << "separability " << fmt_fixed(spec.separability) << "\n";
  summary << "fidelity " << fmt_fixed(spec.fidelity) << "\n";
  summary << "victims";
  for (int v : spec.victims) summary << " " << detail::user_name(v);
  summary << "\nattackers";
  for (int a : spec.attackers) summary << " " << detail::user_name(a);
  summary << "\nrates ring=" << fmt_g(spec.ring_hz) << " watch=" << fmt_g(spec.watch_hz)
          << " door=" << fmt_g(spec.door_hz) << "\n";
  const auto& terms = terminal_table();
  for (int t = 1; t <= 6; ++t)
    summary << "terminal " << t << " height=" << fmt_g(terms[size_t(t - 1)].height_cm)
            << " tilt=" << fmt_g(terms[size_t(t - 1)].tilt_deg)
            << " distance=" << fmt_g(terms[size_t(t - 1)].distance_cm) << "\n";
  summary << "terminal F handheld\n";
  for (int u = 0; u < spec.n_users; ++u)
    summary << "user " << detail::user_name(u) << " arm Left\n";
  summary << "sessions " << sum.sessions << "\n";
  summary << "impersonation_sessions " << sum.impersonation_sessions << "\n";
  write_text_file(out / "study.summary", summary.str());
  sum.manifests = std::move(manifests);
  return sum;
}

}  // namespace gestauth::synth
