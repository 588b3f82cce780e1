#pragma once
// Command-line front end. Exit codes: 0 success, 1 runtime failure, 2 usage
// error. Every command writes a run.summary next to its outputs recording
// flags, seeds, and input hashes, so identical invocations are auditable as
// identical runs.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gestauth/core.hpp"
#include "gestauth/eval.hpp"
#include "gestauth/features.hpp"
#include "gestauth/ingest.hpp"
#include "gestauth/segment.hpp"
#include "gestauth/svg.hpp"
#include "gestauth/synth.hpp"
#include "gestauth/util.hpp"

namespace gestauth::cli {

namespace fs = std::filesystem;

// Flag-combination problems discovered after CLI11 parsing still count as
// usage errors (exit 2), not runtime failures.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline GestureKind parse_gesture(const std::string& token) {
  if (auto k = gesture_from_token(token)) return *k;
  throw UsageError("unknown gesture '" + token +
                   "' (expected ring-tap, watch-tap, 3-knock, 5-knock, secret-knock)");
}

inline std::vector<DeviceKind> parse_sources(const std::string& csv, GestureKind gesture) {
  if (csv.empty()) {
    return is_tap(gesture)
               ? std::vector<DeviceKind>{DeviceKind::Ring, DeviceKind::Watch}
               : std::vector<DeviceKind>{DeviceKind::Door, DeviceKind::Ring,
                                         DeviceKind::Watch};
  }
  std::vector<DeviceKind> out;
  for (auto& tok : split_csv(csv)) {
    auto d = device_from_token(tok);
    if (!d) throw UsageError("unknown source '" + tok + "' (expected door, ring, watch)");
    out.push_back(*d);
  }
  return out;
}

inline SensorMask parse_sensors(const std::string& csv) {
  if (csv.empty()) return kAllSensors;
  SensorMask mask = 0;
  for (auto& tok : split_csv(csv)) {
    auto s = sensor_from_token(tok);
    if (!s) throw UsageError("unknown sensor '" + tok + "' (expected acc, gyr, lacc, grv)");
    mask |= sensor_bit(*s);
  }
  return mask;
}

inline std::vector<double> parse_range(const std::string& spec) {
  const auto parts = split_ws([&] {
    std::string s = spec;
    for (char& c : s)
      if (c == ':') c = ' ';
    return s;
  }());
  double lo = 0, hi = 0, step = 0;
  if (parts.size() != 3 || !parse_double(parts[0], lo) || !parse_double(parts[1], hi) ||
      !parse_double(parts[2], step))
    throw UsageError("range must be lo:hi:step, got '" + spec + "'");
  if (step <= 0 || hi < lo) throw UsageError("range must satisfy lo <= hi, step > 0");
  std::vector<double> out;
  for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
  return out;
}

inline std::vector<int> parse_int_list(const std::string& csv, const char* what) {
  std::vector<int> out;
  for (auto& tok : split_csv(csv)) {
    int v = 0;
    if (!parse_int(tok, v))
      throw UsageError(std::string(what) + ": '" + tok + "' is not an integer");
    out.push_back(v);
  }
  return out;
}

inline std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Hash the study list and every manifest it names: cheap, and enough to pin
// down which inputs a report came from.
inline std::vector<std::pair<std::string, std::string>> study_input_hashes(
    const fs::path& study) {
  std::vector<std::pair<std::string, std::string>> out;
  fs::path list = study;
  if (fs::is_directory(list)) list /= "study.txt";
  out.emplace_back(list.filename().string(), hex64(hash_file(list)));
  const fs::path root = list.parent_path();
  std::istringstream in(read_text_file(list));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    out.emplace_back(line, hex64(hash_file(root / line)));
  }
  return out;
}

inline void write_run_summary(const fs::path& file, const std::string& command,
                              std::map<std::string, std::string> flags,
                              const std::vector<std::pair<std::string, std::string>>& inputs) {
  std::ostringstream out;
  out << "run v1\ncommand " << command << "\n";
  for (auto& [k, v] : flags) out << "flag " << k << " " << v << "\n";
  for (auto& [name, hash] : inputs) out << "input " << name << " fnv=" << hash << "\n";
  write_text_file(file, out.str());
}

inline std::string sanitize_id(const std::string& id) {
  std::string out = id;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  return out;
}

// Shared flag bundle for everything downstream of ingestion.
struct PipelineFlags {
  std::string study;
  std::string gesture = "ring-tap";
  std::string sources, sensors;
  double window = 2.5, offset = 0.0;
  double ring_hz = 50.0;
  std::string resample = "interpolate";
  double cutoff = 8.0;
  int trees = 100, max_features = 0, min_leaf = 1, seeds = 10;
  uint64_t seed = 1;
  int jobs = 0;
  double lamb_threshold = 0.10;

  void add_common(CLI::App* cmd, bool with_forest) {
    cmd->add_option("--study", study, "study directory or list file")->required();
    cmd->add_option("--gesture", gesture, "ring-tap|watch-tap|3-knock|5-knock|secret-knock");
    cmd->add_option("--sources", sources, "comma list of door,ring,watch");
    cmd->add_option("--sensors", sensors, "comma list of acc,gyr,lacc,grv");
    cmd->add_option("--window", window, "tap window size, seconds");
    cmd->add_option("--offset", offset, "tap window offset back from contact, seconds");
    cmd->add_option("--ring-hz", ring_hz, "resample ring streams to this rate (0 = native)");
    cmd->add_option("--resample", resample, "interpolate|decimate");
    cmd->add_option("--cutoff", cutoff, "low-pass cutoff, Hz");
    if (with_forest) {
      cmd->add_option("--trees", trees, "trees per forest");
      cmd->add_option("--max-features", max_features, "features per split (0 = sqrt)");
      cmd->add_option("--min-leaf", min_leaf, "minimum samples per leaf");
      cmd->add_option("--seeds", seeds, "seeds per evaluation cell");
      cmd->add_option("--seed", seed, "base RNG seed");
      cmd->add_option("--jobs", jobs, "worker threads (0 = all cores)");
    }
  }

  eval::EvalOptions to_options() const {
    eval::EvalOptions o;
    o.gesture = parse_gesture(gesture);
    o.sources = parse_sources(sources, o.gesture);
    o.mask = parse_sensors(sensors);
    o.window = WindowSpec{window, offset};
    o.forest.n_trees = trees;
    o.forest.max_features = size_t(max_features);
    o.forest.min_leaf = size_t(min_leaf);
    o.forest.seed = seed;
    o.n_seeds = seeds;
    o.ring_target_hz = ring_hz;
    if (resample == "interpolate")
      o.resample = ingest::ResampleMode::Interpolate;
    else if (resample == "decimate")
      o.resample = ingest::ResampleMode::Decimate;
    else
      throw UsageError("--resample must be interpolate or decimate");
    o.feat.lowpass_cutoff_hz = cutoff;
    o.lamb_threshold = lamb_threshold;
    o.jobs = jobs > 0 ? jobs : int(std::max(1u, std::thread::hardware_concurrency()));
    if (trees < 1 || seeds < 1 || min_leaf < 1 || max_features < 0)
      throw UsageError("forest flags must be positive");
    for (DeviceKind d : o.sources)
      if (d == DeviceKind::Door && is_tap(o.gesture))
        throw UsageError("door source only applies to knock gestures");
    return o;
  }

  std::map<std::string, std::string> flag_map(bool with_forest) const {
    std::map<std::string, std::string> m{
        {"study", study},          {"gesture", gesture},
        {"sources", sources.empty() ? "(default)" : sources},
        {"sensors", sensors.empty() ? "all" : sensors},
        {"window", fmt_fixed(window, 2)}, {"offset", fmt_fixed(offset, 2)},
        {"ring-hz", fmt_g(ring_hz)},      {"resample", resample},
        {"cutoff", fmt_g(cutoff)},
    };
    if (with_forest) {
      m.emplace("trees", std::to_string(trees));
      m.emplace("max-features", std::to_string(max_features));
      m.emplace("min-leaf", std::to_string(min_leaf));
      m.emplace("seeds", std::to_string(seeds));
      m.emplace("seed", std::to_string(seed));
      m.emplace("jobs", std::to_string(jobs));
    }
    return m;
  }
};

inline eval::SweepReport read_sweep_grid(const fs::path& file) {
  std::istringstream in(read_text_file(file));
  auto bad = [&](const char* why) {
    return std::runtime_error(file.string() + ": " + why);
  };
  std::string line;
  if (!std::getline(in, line)) throw bad("empty grid");
  eval::SweepReport rep;
  {
    std::istringstream hdr(line);
    std::string cell;
    std::getline(hdr, cell, '\t');  // "offset\size"
    while (std::getline(hdr, cell, '\t')) {
      double v = 0;
      if (!parse_double(cell, v)) throw bad("bad size in grid header");
      rep.sizes.push_back(v);
    }
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, '\t');
    double off = 0;
    if (!parse_double(cell, off)) throw bad("bad offset in grid row");
    rep.offsets.push_back(off);
    for (double s : rep.sizes) {
      if (!std::getline(row, cell, '\t')) throw bad("short row in grid");
      eval::SweepCell c;
      c.size = s;
      c.offset = off;
      c.valid = cell != "-";
      if (c.valid && !parse_double(cell, c.mean_eer)) throw bad("bad value in grid");
      rep.cells.push_back(c);
    }
  }
  return rep;
}

}  // namespace detail

inline int run(std::vector<std::string> args) {
  CLI::App app{"wearable-gesture authentication pipeline"};
  app.require_subcommand(1);

  // ---- synth ----
  struct {
    std::string out;
    int users = 6, gestures = 6;
    double separability = 0.9, fidelity = 1.0;
    uint64_t seed = 1;
    std::string victims, attackers;
  } sy;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic study");
  synth_cmd->add_option("--out", sy.out, "output directory")->required();
  synth_cmd->add_option("--users", sy.users, "number of users");
  synth_cmd->add_option("--gestures", sy.gestures, "gestures per kind/terminal/session");
  synth_cmd->add_option("--separability", sy.separability, "profile spread in [0,1]");
  synth_cmd->add_option("--fidelity", sy.fidelity, "impersonation fidelity in [0,1]");
  synth_cmd->add_option("--seed", sy.seed, "study seed");
  synth_cmd->add_option("--victims", sy.victims, "comma list of victim user numbers (1-based)");
  synth_cmd->add_option("--attackers", sy.attackers, "comma list of attacker user numbers");
  synth_cmd->callback([&] {
    if (sy.users < 2) throw UsageError("need >= 2 users");
    synth::StudySpec spec;
    spec.n_users = sy.users;
    spec.gestures_per = sy.gestures;
    spec.separability = sy.separability;
    spec.fidelity = sy.fidelity;
    spec.seed = sy.seed;
    for (int v : detail::parse_int_list(sy.victims, "--victims")) spec.victims.push_back(v - 1);
    for (int a : detail::parse_int_list(sy.attackers, "--attackers"))
      spec.attackers.push_back(a - 1);
    if (spec.victims.empty() != spec.attackers.empty())
      throw UsageError("--victims and --attackers go together");
    const auto sum = synth::generate_study(spec, sy.out);
    std::map<std::string, std::string> flags{
        {"out", sy.out},
        {"users", std::to_string(sy.users)},
        {"gestures", std::to_string(sy.gestures)},
        {"separability", fmt_fixed(sy.separability, 2)},
        {"fidelity", fmt_fixed(sy.fidelity, 2)},
        {"seed", std::to_string(sy.seed)},
        {"victims", sy.victims.empty() ? "none" : sy.victims},
        {"attackers", sy.attackers.empty() ? "none" : sy.attackers}};
    detail::write_run_summary(fs::path(sy.out) / "run.summary", "synth", std::move(flags),
                              {{"study.summary", detail::hex64(hash_file(fs::path(sy.out) / "study.summary"))}});
    std::cout << "study at " << sy.out << ": " << sum.sessions << " sessions";
    if (sum.impersonation_sessions > 0)
      std::cout << " + " << sum.impersonation_sessions << " impersonation";
    std::cout << "\n";
  });

  // ---- ingest ----
  struct {
    std::string study, out;
  } ig;
  auto* ingest_cmd = app.add_subcommand("ingest", "parse and validate a study");
  ingest_cmd->add_option("--study", ig.study, "study directory or list file")->required();
  ingest_cmd->add_option("--out", ig.out, "directory for the ingest report");
  ingest_cmd->callback([&] {
    const auto study = ingest::load_study(ig.study);
    std::ostringstream rep;
    int warnings = 0;
    for (const auto& s : study.sessions) {
      rep << s.user << " s" << s.session;
      if (s.impersonation_of) rep << " (impersonating " << *s.impersonation_of << ")";
      rep << ": " << s.streams.size() << " streams, " << s.nfc.size() << " taps, "
          << s.buttons.size() / 2 << " knocks";
      if (s.quat_renormalized > 0) rep << ", " << s.quat_renormalized << " quats renormalized";
      rep << "\n";
      for (const auto& w : s.warnings) {
        rep << "  warning: " << w << "\n";
        ++warnings;
      }
    }
    rep << study.sessions.size() << " sessions, " << warnings << " warnings\n";
    std::cout << rep.str();
    if (!ig.out.empty()) {
      write_text_file(fs::path(ig.out) / "ingest.txt", rep.str());
      detail::write_run_summary(fs::path(ig.out) / "run.summary", "ingest",
                                {{"study", ig.study}}, detail::study_input_hashes(ig.study));
    }
  });

  // ---- segment ----
  struct {
    std::string study, gesture = "ring-tap", out;
    double window = 2.5, offset = 0.0;
  } sg;
  auto* seg_cmd = app.add_subcommand("segment", "cut gesture segments to files");
  seg_cmd->add_option("--study", sg.study, "study directory or list file")->required();
  seg_cmd->add_option("--gesture", sg.gesture, "gesture kind token");
  seg_cmd->add_option("--window", sg.window, "tap window size, seconds");
  seg_cmd->add_option("--offset", sg.offset, "tap window offset, seconds");
  seg_cmd->add_option("--out", sg.out, "output directory")->required();
  seg_cmd->callback([&] {
    const GestureKind kind = detail::parse_gesture(sg.gesture);
    const WindowSpec spec{sg.window, sg.offset};
    if (is_tap(kind) && !spec.valid())
      throw UsageError("tap window must satisfy 0 < size, offset >= 0, size+offset <= 4");
    const auto study = ingest::load_study(sg.study);
    const fs::path dir = fs::path(sg.out) / "segments";
    fs::create_directories(dir);
    std::vector<std::string> dropped;
    std::ostringstream index;
    index << "id\tuser\tsession\tkind\tterminal\tarm\tattacker\tfile\n";
    size_t count = 0;
    for (const auto& rec : study.sessions) {
      const auto segs = is_tap(kind) ? seg::taps_in_session(rec, kind, spec, &dropped)
                                     : seg::knocks_in_session(rec, kind);
      for (const auto& g : segs) {
        const std::string fname = detail::sanitize_id(g.meta.id) + ".txt";
        seg::write_segment(g, dir / fname);
        index << g.meta.id << "\t" << g.meta.user << "\t" << g.meta.session << "\t"
              << to_token(g.meta.kind) << "\t"
              << (g.meta.terminal ? terminal_token(*g.meta.terminal) : "-") << "\t"
              << to_token(g.meta.arm) << "\t"
              << (g.meta.impersonation ? g.meta.impersonation->attacker : std::string("-"))
              << "\t" << "segments/" + fname << "\n";
        ++count;
      }
    }
    write_text_file(fs::path(sg.out) / "index.tsv", index.str());
    if (!dropped.empty()) {
      std::ostringstream log;
      for (auto& d : dropped) log << d << "\n";
      write_text_file(fs::path(sg.out) / "dropped.log", log.str());
    }
    detail::write_run_summary(fs::path(sg.out) / "run.summary", "segment",
                              {{"study", sg.study},
                               {"gesture", sg.gesture},
                               {"window", fmt_fixed(sg.window, 2)},
                               {"offset", fmt_fixed(sg.offset, 2)}},
                              detail::study_input_hashes(sg.study));
    std::cout << "wrote " << count << " segments (" << dropped.size() << " dropped) to "
              << sg.out << "\n";
  });

  // ---- features ----
  detail::PipelineFlags ft;
  std::string ft_out;
  auto* feat_cmd = app.add_subcommand("features", "extract a feature matrix");
  ft.add_common(feat_cmd, false);
  feat_cmd->add_option("--out", ft_out, "output TSV file")->required();
  feat_cmd->callback([&] {
    const auto opts = ft.to_options();
    eval::validate_options(opts);
    const auto study = eval::prepare_study(ingest::load_study(ft.study), opts.ring_target_hz,
                                           opts.resample);
    const auto table = eval::build_table(study, opts.gesture, opts.window, opts.sources,
                                         opts.mask, opts.feat);
    features::write_feature_table(table, ft_out);
    detail::write_run_summary(fs::path(ft_out).string() + ".run.summary", "features",
                              ft.flag_map(false), detail::study_input_hashes(ft.study));
    std::cout << table.size() << " gestures x " << table.width() << " features -> " << ft_out
              << "\n";
  });

  // ---- eval ----
  detail::PipelineFlags ev;
  struct {
    std::string protocol, out;
    std::string sizes = "0.5:4.0:0.5", offsets = "0:1.5:0.5";
    std::string counts = "2,4,8,16,32";
  } ex;
  auto* eval_cmd = app.add_subcommand("eval", "run an authentication protocol");
  ev.add_common(eval_cmd, true);
  eval_cmd
      ->add_option("--protocol", ex.protocol,
                   "terminal-agnostic|terminal-specific|access-control|sweep|enrolment")
      ->required();
  eval_cmd->add_option("--out", ex.out, "output directory")->required();
  eval_cmd->add_option("--sizes", ex.sizes, "sweep window sizes lo:hi:step");
  eval_cmd->add_option("--offsets", ex.offsets, "sweep window offsets lo:hi:step");
  eval_cmd->add_option("--counts", ex.counts, "enrolment sizes, comma list");
  eval_cmd->callback([&] {
    const auto opts = ev.to_options();
    const fs::path out = ex.out;
    auto flags = ev.flag_map(true);
    flags.emplace("protocol", ex.protocol);
    const auto study = ingest::load_study(ev.study);

    auto finish_protocol = [&](const eval::ProtocolReport& rep) {
      eval::write_protocol_report(rep, out);
      std::cout << "mean EER = " << fmt_fixed(rep.mean_eer) << " over " << rep.forests
                << " forests -> " << out.string() << "\n";
    };

    if (ex.protocol == "terminal-agnostic") {
      if (!is_tap(opts.gesture)) throw UsageError("terminal protocols need a tap gesture");
      finish_protocol(eval::run_terminal_agnostic(study, opts));
    } else if (ex.protocol == "terminal-specific") {
      if (!is_tap(opts.gesture)) throw UsageError("terminal protocols need a tap gesture");
      finish_protocol(eval::run_terminal_specific(study, opts));
    } else if (ex.protocol == "access-control") {
      if (!is_knock(opts.gesture))
        throw UsageError("access-control evaluates knock gestures");
      finish_protocol(eval::run_access_control(study, opts));
    } else if (ex.protocol == "sweep") {
      if (!is_tap(opts.gesture)) throw UsageError("window sweeps need a tap gesture");
      const auto rep = eval::sweep_windows(study, detail::parse_range(ex.sizes),
                                           detail::parse_range(ex.offsets), opts);
      eval::write_sweep(rep, out / "sweep.tsv");
      svg::write_sweep_heatmap(rep, out / "sweep.svg");
      const eval::SweepCell* best = nullptr;
      for (const auto& c : rep.cells)
        if (c.valid && (!best || c.mean_eer < best->mean_eer)) best = &c;
      if (best)
        std::cout << "best mean EER = " << fmt_fixed(best->mean_eer) << " at size "
                  << fmt_fixed(best->size, 2) << " s, offset " << fmt_fixed(best->offset, 2)
                  << " s\n";
      std::cout << "sweep grid -> " << (out / "sweep.tsv").string() << ", heatmap -> "
                << (out / "sweep.svg").string() << "\n";
      flags.emplace("sizes", ex.sizes);
      flags.emplace("offsets", ex.offsets);
    } else if (ex.protocol == "enrolment") {
      const auto counts = detail::parse_int_list(ex.counts, "--counts");
      const auto rep = eval::enrolment_sweep(study, counts, opts);
      eval::write_enrol_report(rep, out);
      for (const auto& p : rep.points)
        std::cout << "enrolment " << p.count << " -> mean EER " << fmt_fixed(p.mean_eer)
                  << "\n";
      flags.emplace("counts", ex.counts);
    } else {
      throw UsageError("unknown protocol '" + ex.protocol + "'");
    }
    detail::write_run_summary(out / "run.summary", "eval", std::move(flags),
                              detail::study_input_hashes(ev.study));
  });

  // ---- attack ----
  detail::PipelineFlags at;
  std::string at_out;
  auto* attack_cmd = app.add_subcommand("attack", "observation-attack evaluation");
  at.add_common(attack_cmd, true);
  attack_cmd->add_option("--lamb-threshold", at.lamb_threshold,
                         "observation-FAR excess marking a lamb");
  attack_cmd->add_option("--out", at_out, "output directory")->required();
  attack_cmd->callback([&] {
    const auto opts = at.to_options();
    const auto study = ingest::load_study(at.study);
    const auto rep = eval::run_observation_attack(study, opts);
    const auto wl = eval::wolf_lamb_report(rep, opts.lamb_threshold);
    const fs::path out = at_out;
    eval::write_attack_report(rep, out);
    eval::write_wolf_lamb(wl, out / "wolf_lamb.tsv");
    auto flags = at.flag_map(true);
    flags.emplace("lamb-threshold", fmt_fixed(at.lamb_threshold, 2));
    detail::write_run_summary(out / "run.summary", "attack", std::move(flags),
                              detail::study_input_hashes(at.study));
    int lambs = 0;
    for (const auto& v : wl.victims) lambs += v.lamb ? 1 : 0;
    std::cout << "mean base FAR = " << fmt_fixed(rep.mean_base)
              << ", mean observation FAR = " << fmt_fixed(rep.mean_obs) << " (" << lambs
              << " lambs) -> " << out.string() << "\n";
  });

  // ---- report ----
  struct {
    std::string in, out;
  } rp;
  auto* report_cmd = app.add_subcommand("report", "re-render reports from an eval directory");
  report_cmd->add_option("--in", rp.in, "eval output directory")->required();
  report_cmd->add_option("--out", rp.out, "heatmap SVG path (default <in>/sweep.svg)");
  report_cmd->callback([&] {
    const fs::path in = rp.in;
    bool did = false;
    if (fs::exists(in / "sweep.tsv")) {
      const auto rep = detail::read_sweep_grid(in / "sweep.tsv");
      const fs::path out = rp.out.empty() ? in / "sweep.svg" : fs::path(rp.out);
      svg::write_sweep_heatmap(rep, out);
      std::cout << "heatmap -> " << out.string() << "\n";
      did = true;
    }
    if (fs::exists(in / "summary.txt")) {
      std::cout << read_text_file(in / "summary.txt");
      did = true;
    }
    if (!did) throw std::runtime_error("nothing to report in " + in.string());
  });

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gestauth::cli
