#pragma once
// Recording ingest: stream/event/manifest parsing, clock-offset correction,
// quaternion hygiene, button pairing, and rate regularization.
//
// File layouts are documented in FORMATS.md at the repository root.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gestauth/core.hpp"
#include "gestauth/util.hpp"

namespace gestauth::ingest {

namespace fs = std::filesystem;

struct NfcContactEvent {
  double t = 0;          // contact-ended time, session clock
  std::string device;    // label of the tapping device ("ring" / "watch")
  int terminal = 0;      // 1..6 or kFreestyleTerminal
};

struct ButtonEvent {
  double t = 0;
  bool is_start = false;
};

struct SessionRecording {
  std::string user;
  int session = 1;
  Arm arm = Arm::Left;
  std::optional<std::string> impersonation_of;  // attacker sessions only
  std::vector<SensorStream> streams;
  std::vector<NfcContactEvent> nfc;      // time-sorted
  std::vector<ButtonEvent> buttons;      // time-sorted
  std::vector<GestureKind> knock_kinds;  // one per button Start/End pair
  int quat_renormalized = 0;             // samples fixed up on ingest
  std::vector<std::string> warnings;
  fs::path manifest_path;

  const SensorStream* find_stream(DeviceKind d, SensorKind s) const {
    for (auto& st : streams)
      if (st.device.kind == d && st.sensor == s) return &st;
    return nullptr;
  }
};

struct Study {
  fs::path root;
  std::vector<SessionRecording> sessions;
};

namespace detail {

[[noreturn]] inline void fail(const fs::path& file, size_t line, const std::string& what) {
  throw std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + what);
}

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      if (pos < text.size()) out.push_back(text.substr(pos));
      break;
    }
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

// "key=value" pieces of a stream header line.
inline std::map<std::string, std::string> header_fields(std::string_view line) {
  std::map<std::string, std::string> out;
  for (auto tok : split_ws(line)) {
    auto eq = tok.find('=');
    if (eq == std::string_view::npos) continue;
    out.emplace(std::string(tok.substr(0, eq)), std::string(tok.substr(eq + 1)));
  }
  return out;
}

}  // namespace detail

// Parses one sensor stream file. `clock_offset` is subtracted from every
// timestamp, mapping the device clock onto the session clock.
inline SensorStream parse_stream(const fs::path& file, double clock_offset = 0.0) {
  const auto text = read_text_file(file);
  const auto lines = detail::lines_of(text);
  if (lines.empty()) detail::fail(file, 1, "empty stream file");
  if (lines[0].rfind("# ", 0) != 0)
    detail::fail(file, 1, "missing stream header");

  auto fields = detail::header_fields(std::string_view(lines[0]).substr(2));
  SensorStream st;
  auto dev = fields.find("device");
  auto sen = fields.find("sensor");
  auto rate = fields.find("rate");
  if (dev == fields.end() || sen == fields.end() || rate == fields.end())
    detail::fail(file, 1, "stream header needs device=, sensor=, rate=");
  auto dk = device_from_token(dev->second);
  if (!dk) detail::fail(file, 1, "unknown device '" + dev->second + "'");
  auto sk = sensor_from_token(sen->second);
  if (!sk) detail::fail(file, 1, "unknown sensor '" + sen->second + "'");
  if (!parse_double(rate->second, st.rate_hz) || st.rate_hz <= 0)
    detail::fail(file, 1, "bad rate '" + rate->second + "'");
  st.device = {*dk, dev->second};
  st.sensor = *sk;

  const size_t want = st.is_quat() ? 5 : 4;
  double prev_t = -std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < lines.size(); ++i) {
    const auto toks = split_ws(lines[i]);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks.size() != want)
      detail::fail(file, i + 1, "expected " + std::to_string(want) + " fields, got " +
                                    std::to_string(toks.size()));
    double v[5];
    for (size_t k = 0; k < want; ++k)
      if (!parse_double(toks[k], v[k]))
        detail::fail(file, i + 1, "malformed number '" + std::string(toks[k]) + "'");
    const double t = v[0] - clock_offset;
    if (!(t > prev_t)) detail::fail(file, i + 1, "non-monotone timestamp");
    prev_t = t;
    if (st.is_quat())
      st.quat.push_back({t, v[1], v[2], v[3], v[4]});
    else
      st.vec.push_back({t, v[1], v[2], v[3]});
  }
  if (st.size() == 0) detail::fail(file, lines.size(), "stream has no samples");
  return st;
}

// Restores unit norm on rotation-vector samples that drifted past 1e-3.
// Returns how many samples needed fixing; exactly-zero norms are an error.
inline int renormalize_quats(SensorStream& st) {
  if (!st.is_quat()) return 0;
  int fixed = 0;
  for (auto& q : st.quat) {
    const double n = q.norm();
    if (n == 0.0)
      throw std::runtime_error("zero-norm quaternion in " + st.device.label +
                               " stream at t=" + fmt_g(q.t));
    if (std::abs(n - 1.0) > 1e-3) {
      q.x /= n; q.y /= n; q.z /= n; q.w /= n;
      ++fixed;
    }
  }
  return fixed;
}

enum class ResampleMode { Interpolate, Decimate };

// Regularizes a stream onto a uniform grid anchored at its first sample.
// Interpolate: linear per component (quats renormalized after). Decimate:
// keep every k-th sample, requiring an integer rate ratio. Upsampling is
// refused; equal-rate interpolation is the identity grid.
inline SensorStream resample(const SensorStream& in, double target_hz,
                             ResampleMode mode = ResampleMode::Interpolate) {
  if (in.size() < 2) throw std::runtime_error("resample: stream has fewer than 2 samples");
  if (target_hz <= 0) throw std::runtime_error("resample: bad target rate");
  if (target_hz > in.rate_hz * (1.0 + 1e-9))
    throw std::runtime_error("resample: upsampling " + std::to_string(in.rate_hz) +
                             " Hz to " + std::to_string(target_hz) + " Hz refused");

  SensorStream out;
  out.device = in.device;
  out.sensor = in.sensor;
  out.rate_hz = target_hz;

  if (mode == ResampleMode::Decimate) {
    const double ratio = in.rate_hz / target_hz;
    const long k = std::lround(ratio);
    if (k < 1 || std::abs(ratio - double(k)) > 1e-6)
      throw std::runtime_error("resample: decimation needs an integer rate ratio, got " +
                               fmt_g(ratio));
    if (in.is_quat())
      for (size_t i = 0; i < in.quat.size(); i += size_t(k)) out.quat.push_back(in.quat[i]);
    else
      for (size_t i = 0; i < in.vec.size(); i += size_t(k)) out.vec.push_back(in.vec[i]);
    return out;
  }

  const double t0 = in.first_t();
  const double t_last = in.last_t();
  const double step = 1.0 / target_hz;
  // Grid points computed as t0 + i*step (not accumulated) so a second pass
  // over already-regular data reproduces the grid bit for bit.
  size_t cursor = 0;
  const size_t n = in.size();
  auto sample_t = [&](size_t i) { return in.is_quat() ? in.quat[i].t : in.vec[i].t; };
  for (size_t i = 0;; ++i) {
    const double t = t0 + double(i) * step;
    if (t > t_last + 1e-9) break;
    while (cursor + 1 < n && sample_t(cursor + 1) <= t) ++cursor;
    const size_t a = cursor;
    const size_t b = std::min(cursor + 1, n - 1);
    const double ta = sample_t(a), tb = sample_t(b);
    const double u = (tb > ta) ? std::clamp((t - ta) / (tb - ta), 0.0, 1.0) : 0.0;
    if (in.is_quat()) {
      const auto &qa = in.quat[a], &qb = in.quat[b];
      QuatSample q{t, qa.x + u * (qb.x - qa.x), qa.y + u * (qb.y - qa.y),
                   qa.z + u * (qb.z - qa.z), qa.w + u * (qb.w - qa.w)};
      const double nq = q.norm();
      if (nq > 0) { q.x /= nq; q.y /= nq; q.z /= nq; q.w /= nq; }
      out.quat.push_back(q);
    } else {
      const auto &va = in.vec[a], &vb = in.vec[b];
      out.vec.push_back({t, va.x + u * (vb.x - va.x), va.y + u * (vb.y - va.y),
                         va.z + u * (vb.z - va.z)});
    }
  }
  if (out.size() == 0) throw std::runtime_error("resample: empty result");
  return out;
}

// Event log: "<t> NFC <device> <terminal>" and "<t> BTN <Start|End>" lines.
inline void parse_events(const fs::path& file, std::vector<NfcContactEvent>& nfc,
                         std::vector<ButtonEvent>& buttons) {
  const auto lines = detail::lines_of(read_text_file(file));
  for (size_t i = 0; i < lines.size(); ++i) {
    const auto toks = split_ws(lines[i]);
    if (toks.empty() || toks[0][0] == '#') continue;
    double t;
    if (toks.size() < 2 || !parse_double(toks[0], t))
      detail::fail(file, i + 1, "malformed event line");
    if (toks[1] == "NFC") {
      if (toks.size() != 4) detail::fail(file, i + 1, "NFC event needs device and terminal");
      auto term = terminal_from_token(toks[3]);
      if (!term) detail::fail(file, i + 1, "bad terminal '" + std::string(toks[3]) + "'");
      nfc.push_back({t, std::string(toks[2]), *term});
    } else if (toks[1] == "BTN") {
      if (toks.size() != 3 || (toks[2] != "Start" && toks[2] != "End"))
        detail::fail(file, i + 1, "BTN event needs Start or End");
      buttons.push_back({t, toks[2] == "Start"});
    } else {
      detail::fail(file, i + 1, "unknown event '" + std::string(toks[1]) + "'");
    }
  }
  auto by_t = [](auto& a, auto& b) { return a.t < b.t; };
  std::sort(nfc.begin(), nfc.end(), by_t);
  std::sort(buttons.begin(), buttons.end(), by_t);
}

// Start/End events must alternate, beginning with Start; returns the bounds.
inline std::vector<std::pair<double, double>> pair_button_bounds(
    const std::vector<ButtonEvent>& events) {
  std::vector<std::pair<double, double>> out;
  bool open = false;
  double t_open = 0;
  for (auto& e : events) {
    if (e.is_start) {
      if (open) throw std::runtime_error("button Start at t=" + fmt_g(e.t) +
                                         " while a bound is already open");
      open = true;
      t_open = e.t;
    } else {
      if (!open) throw std::runtime_error("button End at t=" + fmt_g(e.t) +
                                          " without a matching Start");
      if (!(e.t > t_open))
        throw std::runtime_error("button bound of zero length at t=" + fmt_g(e.t));
      out.emplace_back(t_open, e.t);
      open = false;
    }
  }
  if (open) throw std::runtime_error("button Start at t=" + fmt_g(t_open) + " never closed");
  return out;
}

// Loads one session directory through its manifest. Clock offsets are applied
// while streams parse, so downstream code sees a single session clock.
inline SessionRecording parse_session(const fs::path& manifest) {
  const fs::path dir = manifest.parent_path();
  const auto lines = detail::lines_of(read_text_file(manifest));

  SessionRecording rec;
  rec.manifest_path = manifest;
  std::map<std::string, double> offsets;
  struct StreamDecl { std::string device, sensor, path; double rate; size_t line; };
  std::vector<StreamDecl> decls;
  fs::path events_path;
  bool have_session = false;

  for (size_t i = 0; i < lines.size(); ++i) {
    const auto toks = split_ws(lines[i]);
    if (toks.empty() || toks[0][0] == '#') continue;
    const auto key = toks[0];
    if (key == "user" && toks.size() == 2) {
      rec.user = std::string(toks[1]);
    } else if (key == "session" && toks.size() == 2) {
      if (!parse_int(toks[1], rec.session) || (rec.session != 1 && rec.session != 2))
        detail::fail(manifest, i + 1, "session must be 1 or 2");
      have_session = true;
    } else if (key == "arm" && toks.size() == 2) {
      auto a = arm_from_token(toks[1]);
      if (!a) detail::fail(manifest, i + 1, "arm must be Left or Right");
      rec.arm = *a;
    } else if (key == "offset" && toks.size() == 3) {
      double off;
      if (!parse_double(toks[2], off))
        detail::fail(manifest, i + 1, "bad offset value");
      offsets[std::string(toks[1])] = off;
    } else if (key == "stream" && toks.size() == 5) {
      StreamDecl d;
      d.device = std::string(toks[1]);
      d.sensor = std::string(toks[2]);
      if (!parse_double(toks[3], d.rate)) detail::fail(manifest, i + 1, "bad stream rate");
      d.path = std::string(toks[4]);
      d.line = i + 1;
      decls.push_back(std::move(d));
    } else if (key == "events" && toks.size() == 2) {
      events_path = dir / std::string(toks[1]);
    } else if (key == "knock_kinds" && toks.size() >= 2) {
      for (size_t k = 1; k < toks.size(); ++k) {
        if (toks[k] == "3") rec.knock_kinds.push_back(GestureKind::Knock3);
        else if (toks[k] == "5") rec.knock_kinds.push_back(GestureKind::Knock5);
        else if (toks[k] == "S") rec.knock_kinds.push_back(GestureKind::SecretKnock);
        else detail::fail(manifest, i + 1, "knock kind must be 3, 5, or S");
      }
    } else if (key == "impersonation_of" && toks.size() == 2) {
      rec.impersonation_of = std::string(toks[1]);
    } else {
      detail::fail(manifest, i + 1, "unrecognized manifest line");
    }
  }

  if (rec.user.empty()) detail::fail(manifest, 1, "manifest missing user");
  if (!have_session) detail::fail(manifest, 1, "manifest missing session");
  if (decls.empty()) detail::fail(manifest, 1, "manifest declares no streams");
  if (events_path.empty()) detail::fail(manifest, 1, "manifest missing events file");

  for (auto& d : decls) {
    if (!device_from_token(d.device))
      detail::fail(manifest, d.line, "unknown device '" + d.device + "'");
    const double off = offsets.count(d.device) ? offsets[d.device] : 0.0;
    const fs::path p = dir / d.path;
    if (!fs::exists(p)) detail::fail(manifest, d.line, "missing stream file " + p.string());
    SensorStream st = parse_stream(p, off);
    if (st.device.label != d.device || to_token(st.sensor) != d.sensor)
      detail::fail(manifest, d.line, "stream header disagrees with manifest for " + d.path);
    if (std::abs(st.rate_hz - d.rate) > 1e-9)
      detail::fail(manifest, d.line, "stream rate disagrees with manifest for " + d.path);
    rec.quat_renormalized += renormalize_quats(st);
    // Cadence sanity: mean spacing should sit near the nominal rate.
    if (st.size() >= 2) {
      const double span = st.last_t() - st.first_t();
      const double mean_dt = span / double(st.size() - 1);
      const double nominal = 1.0 / st.rate_hz;
      if (std::abs(mean_dt - nominal) > 0.2 * nominal)
        rec.warnings.push_back(d.path + ": mean sample spacing " + fmt_g(mean_dt) +
                               " s vs nominal " + fmt_g(nominal) + " s");
    }
    rec.streams.push_back(std::move(st));
  }

  parse_events(events_path, rec.nfc, rec.buttons);

  const auto bounds = pair_button_bounds(rec.buttons);
  if (!bounds.empty() && rec.knock_kinds.size() != bounds.size())
    detail::fail(manifest, 1,
                 "knock_kinds lists " + std::to_string(rec.knock_kinds.size()) +
                     " kinds for " + std::to_string(bounds.size()) + " button bounds");
  return rec;
}

// A study is a list of session manifests, one path per line, relative to the
// list file. Accepts either the list file itself or a directory holding
// "study.txt".
inline Study load_study(const fs::path& where) {
  Study study;
  fs::path list = where;
  if (fs::is_directory(where)) list = where / "study.txt";
  study.root = list.parent_path();
  const auto lines = detail::lines_of(read_text_file(list));
  for (size_t i = 0; i < lines.size(); ++i) {
    const auto toks = split_ws(lines[i]);
    if (toks.empty() || toks[0][0] == '#') continue;
    study.sessions.push_back(parse_session(study.root / std::string(toks[0])));
  }
  if (study.sessions.empty())
    throw std::runtime_error(list.string() + ": study lists no sessions");
  return study;
}

}  // namespace gestauth::ingest
