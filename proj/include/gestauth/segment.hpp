#pragma once
// Gesture segmentation. Taps are cut from a window anchored behind the NFC
// contact-ended event; knocks take the button-press bounds verbatim.

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "gestauth/core.hpp"
#include "gestauth/ingest.hpp"
#include "gestauth/util.hpp"

namespace gestauth::seg {

namespace fs = std::filesystem;

// [T0 - offset - size, T0 - offset]: the offset slides the window away from
// the contact instant, the size stretches it further into the approach.
inline std::pair<double, double> tap_window(double t_contact, const WindowSpec& spec) {
  if (!spec.valid())
    throw std::invalid_argument("window spec out of range: size=" + fmt_g(spec.size_s) +
                                " offset=" + fmt_g(spec.offset_s));
  const double t_end = t_contact - spec.offset_s;
  return {t_end - spec.size_s, t_end};
}

namespace detail {

// Copies the closed-interval [t_start, t_end] slice of a stream.
inline SensorWindow cut(const SensorStream& st, double t_start, double t_end) {
  SensorWindow w;
  w.sensor = st.sensor;
  w.rate_hz = st.rate_hz;
  const double lo = t_start - 1e-9, hi = t_end + 1e-9;
  if (st.is_quat()) {
    for (auto& q : st.quat) {
      if (q.t < lo) continue;
      if (q.t > hi) break;
      w.quat.push_back(q);
    }
  } else {
    for (auto& v : st.vec) {
      if (v.t < lo) continue;
      if (v.t > hi) break;
      w.vec.push_back(v);
    }
  }
  return w;
}

inline GestureSegment assemble(const std::vector<const SensorStream*>& streams,
                               double t_start, double t_end, GestureMeta meta,
                               bool reject_preceding_windows) {
  GestureSegment g;
  g.meta = std::move(meta);
  g.t_start = t_start;
  g.t_end = t_end;
  for (const auto* st : streams) {
    if (reject_preceding_windows && t_start < st->first_t() - 1e-9)
      throw std::runtime_error("segment " + g.meta.id + ": window precedes " +
                               st->device.label + "/" + to_token(st->sensor) + " stream");
    SensorWindow w = cut(*st, t_start, t_end);
    if (w.size() == 0)
      throw std::runtime_error("segment " + g.meta.id + ": no samples in window for " +
                               st->device.label + "/" + to_token(st->sensor));
    DeviceWindow* dev = nullptr;
    for (auto& d : g.devices)
      if (d.device == st->device.kind) dev = &d;
    if (!dev) {
      g.devices.push_back({st->device.kind, st->device.label, {}});
      dev = &g.devices.back();
    }
    dev->sensors.push_back(std::move(w));
  }
  std::sort(g.devices.begin(), g.devices.end(), [](auto& a, auto& b) {
    return concat_rank(a.device) < concat_rank(b.device);
  });
  return g;
}

}  // namespace detail

inline GestureSegment extract_tap_segment(const std::vector<const SensorStream*>& streams,
                                          const ingest::NfcContactEvent& ev,
                                          const WindowSpec& spec, GestureMeta meta) {
  const auto [t_start, t_end] = tap_window(ev.t, spec);
  meta.terminal = ev.terminal;
  GestureSegment g = detail::assemble(streams, t_start, t_end, std::move(meta), true);
  return g;
}

inline GestureSegment extract_knock_segment(const std::vector<const SensorStream*>& streams,
                                            std::pair<double, double> bound,
                                            GestureMeta meta) {
  if (!(bound.second > bound.first))
    throw std::invalid_argument("knock bound of non-positive length");
  return detail::assemble(streams, bound.first, bound.second, std::move(meta), false);
}

namespace detail {

inline std::vector<const SensorStream*> tap_streams(const ingest::SessionRecording& rec) {
  std::vector<const SensorStream*> out;
  for (auto& st : rec.streams)
    if (st.device.kind == DeviceKind::Ring || st.device.kind == DeviceKind::Watch)
      out.push_back(&st);
  return out;
}

inline std::vector<const SensorStream*> knock_streams(const ingest::SessionRecording& rec) {
  std::vector<const SensorStream*> out;
  for (auto& st : rec.streams) out.push_back(&st);
  return out;
}

inline GestureMeta base_meta(const ingest::SessionRecording& rec, GestureKind kind) {
  GestureMeta m;
  m.user = rec.user;
  m.session = rec.session;
  m.kind = kind;
  m.arm = rec.arm;
  return m;
}

}  // namespace detail

// All taps of one kind in a session, in event order. Windows that start
// before a stream does are dropped (not errors) and noted in `dropped`.
// Impersonation sessions yield segments flagged with attacker/victim and a
// per-(kind, terminal) attempt ordinal.
inline std::vector<GestureSegment> taps_in_session(const ingest::SessionRecording& rec,
                                                   GestureKind kind, const WindowSpec& spec,
                                                   std::vector<std::string>* dropped = nullptr) {
  if (!is_tap(kind)) throw std::invalid_argument("taps_in_session needs a tap kind");
  const char* want_device = kind == GestureKind::RingTap ? "ring" : "watch";
  const auto streams = detail::tap_streams(rec);
  std::vector<GestureSegment> out;
  std::map<int, int> ordinal_by_terminal;
  for (auto& ev : rec.nfc) {
    if (ev.device != want_device) continue;
    const int idx = ++ordinal_by_terminal[ev.terminal];
    GestureMeta meta = detail::base_meta(rec, kind);
    std::ostringstream id;
    if (rec.impersonation_of) {
      meta.impersonation = Impersonation{rec.user, *rec.impersonation_of, idx};
      id << "imp:" << rec.user << ">" << *rec.impersonation_of << ":" << to_token(kind)
         << ":T" << terminal_token(ev.terminal) << ":" << idx;
    } else {
      id << rec.user << ":s" << rec.session << ":" << to_token(kind) << ":T"
         << terminal_token(ev.terminal) << ":" << idx;
    }
    meta.id = id.str();
    try {
      out.push_back(extract_tap_segment(streams, ev, spec, std::move(meta)));
    } catch (const std::runtime_error& e) {
      if (dropped) dropped->push_back(e.what());
    }
  }
  return out;
}

// All knocks of one kind in a session, using the manifest's knock_kinds to
// label each button bound.
inline std::vector<GestureSegment> knocks_in_session(const ingest::SessionRecording& rec,
                                                     GestureKind kind) {
  if (!is_knock(kind)) throw std::invalid_argument("knocks_in_session needs a knock kind");
  const auto bounds = ingest::pair_button_bounds(rec.buttons);
  if (!bounds.empty() && rec.knock_kinds.size() != bounds.size())
    throw std::runtime_error(rec.manifest_path.string() + ": knock_kinds/bounds mismatch");
  const auto streams = detail::knock_streams(rec);
  std::vector<GestureSegment> out;
  int ordinal = 0;
  for (size_t i = 0; i < bounds.size(); ++i) {
    if (rec.knock_kinds[i] != kind) continue;
    ++ordinal;
    GestureMeta meta = detail::base_meta(rec, kind);
    std::ostringstream id;
    if (rec.impersonation_of) {
      meta.impersonation = Impersonation{rec.user, *rec.impersonation_of, ordinal};
      id << "imp:" << rec.user << ">" << *rec.impersonation_of << ":" << to_token(kind)
         << ":" << ordinal;
    } else {
      id << rec.user << ":s" << rec.session << ":" << to_token(kind) << ":" << ordinal;
    }
    meta.id = id.str();
    out.push_back(extract_knock_segment(streams, bounds[i], std::move(meta)));
  }
  return out;
}

// ---- segment files (see FORMATS.md) ----

inline void write_segment(const GestureSegment& g, const fs::path& file) {
  std::ostringstream out;
  out << "# gesture id=" << g.meta.id << " user=" << g.meta.user << " session="
      << g.meta.session << " kind=" << to_token(g.meta.kind);
  if (g.meta.terminal) out << " terminal=" << terminal_token(*g.meta.terminal);
  out << " arm=" << to_token(g.meta.arm);
  if (g.meta.impersonation)
    out << " attacker=" << g.meta.impersonation->attacker
        << " victim=" << g.meta.impersonation->victim
        << " attempt=" << g.meta.impersonation->attempt;
  out << " window=" << fmt_g(g.t_start, 12) << ":" << fmt_g(g.t_end, 12) << "\n";
  for (auto& dev : g.devices) {
    for (auto& sw : dev.sensors) {
      out << "# device=" << dev.label << " sensor=" << to_token(sw.sensor)
          << " rate=" << fmt_g(sw.rate_hz) << "\n";
      if (sw.is_quat())
        for (auto& q : sw.quat)
          out << fmt_g(q.t, 12) << " " << fmt_g(q.x) << " " << fmt_g(q.y) << " "
              << fmt_g(q.z) << " " << fmt_g(q.w) << "\n";
      else
        for (auto& v : sw.vec)
          out << fmt_g(v.t, 12) << " " << fmt_g(v.x) << " " << fmt_g(v.y) << " "
              << fmt_g(v.z) << "\n";
    }
  }
  write_text_file(file, out.str());
}

inline GestureSegment read_segment(const fs::path& file) {
  const auto lines = ingest::detail::lines_of(read_text_file(file));
  if (lines.empty() || lines[0].rfind("# gesture ", 0) != 0)
    throw std::runtime_error(file.string() + ": not a segment file");
  GestureSegment g;
  auto fields = ingest::detail::header_fields(std::string_view(lines[0]).substr(2));
  g.meta.id = fields["id"];
  g.meta.user = fields["user"];
  if (!parse_int(fields["session"], g.meta.session))
    throw std::runtime_error(file.string() + ": bad session");
  auto kind = gesture_from_token(fields["kind"]);
  if (!kind) throw std::runtime_error(file.string() + ": bad kind");
  g.meta.kind = *kind;
  if (fields.count("terminal")) g.meta.terminal = *terminal_from_token(fields["terminal"]);
  if (auto a = arm_from_token(fields["arm"])) g.meta.arm = *a;
  if (fields.count("attacker")) {
    Impersonation imp;
    imp.attacker = fields["attacker"];
    imp.victim = fields["victim"];
    parse_int(fields["attempt"], imp.attempt);
    g.meta.impersonation = imp;
  }
  const auto& win = fields["window"];
  const auto colon = win.find(':');
  if (colon == std::string::npos || !parse_double(win.substr(0, colon), g.t_start) ||
      !parse_double(win.substr(colon + 1), g.t_end))
    throw std::runtime_error(file.string() + ": bad window field");

  DeviceWindow* dev = nullptr;
  SensorWindow* sw = nullptr;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].rfind("# device=", 0) == 0) {
      auto h = ingest::detail::header_fields(std::string_view(lines[i]).substr(2));
      auto dk = device_from_token(h["device"]);
      auto sk = sensor_from_token(h["sensor"]);
      double rate;
      if (!dk || !sk || !parse_double(h["rate"], rate))
        throw std::runtime_error(file.string() + ": bad sensor header at line " +
                                 std::to_string(i + 1));
      dev = nullptr;
      for (auto& d : g.devices)
        if (d.device == *dk) dev = &d;
      if (!dev) {
        g.devices.push_back({*dk, h["device"], {}});
        dev = &g.devices.back();
      }
      dev->sensors.push_back({*sk, rate, {}, {}});
      sw = &dev->sensors.back();
      continue;
    }
    const auto toks = split_ws(lines[i]);
    if (toks.empty()) continue;
    if (!sw) throw std::runtime_error(file.string() + ": samples before sensor header");
    double v[5];
    const size_t want = sw->is_quat() ? 5 : 4;
    if (toks.size() != want)
      throw std::runtime_error(file.string() + ": bad sample at line " + std::to_string(i + 1));
    for (size_t k = 0; k < want; ++k)
      if (!parse_double(toks[k], v[k]))
        throw std::runtime_error(file.string() + ": bad number at line " + std::to_string(i + 1));
    if (sw->is_quat())
      sw->quat.push_back({v[0], v[1], v[2], v[3], v[4]});
    else
      sw->vec.push_back({v[0], v[1], v[2], v[3]});
  }
  return g;
}

}  // namespace gestauth::seg
