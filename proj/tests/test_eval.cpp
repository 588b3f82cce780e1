#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "gestauth/eval.hpp"
#include "gestauth/rng.hpp"
#include "gestauth/synth.hpp"
#include "oracles.hpp"

using namespace gestauth;
using namespace gestauth::eval;
namespace fs = std::filesystem;

TEST_CASE("far_frr counts an inclusive accept threshold") {
  ScoreSet s{{0.9, 0.8, 0.7, 0.2}, {0.6, 0.3, 0.1, 0.05}};
  auto [far, frr] = far_frr(s, 0.6);
  CHECK(far == 0.25);
  CHECK(frr == 0.25);
  std::tie(far, frr) = far_frr(s, 0.65);
  CHECK(far == 0.0);
  CHECK(frr == 0.25);
  std::tie(far, frr) = far_frr({{0.5}, {0.5}}, 0.5);
  CHECK(far == 1.0);  // score == theta accepts
  CHECK(frr == 0.0);

  CHECK_THROWS_WITH(far_frr({{}, {0.1}}, 0.5),
                    Catch::Matchers::ContainsSubstring("need both positive and negative"));
  CHECK_THROWS_AS(eer({{0.1}, {}}), std::invalid_argument);
}

TEST_CASE("eer on a hand-worked score set") {
  const ScoreSet s{{0.9, 0.8, 0.7, 0.2}, {0.6, 0.3, 0.1, 0.05}};
  const auto r = eer(s);
  CHECK(r.eer == 0.25);
  CHECK(r.theta == 0.6);
  CHECK(r.far == 0.25);
  CHECK(r.frr == 0.25);
}

TEST_CASE("eer of separated and of identical score sets") {
  const auto sep = eer({{0.8, 0.9, 0.7}, {0.1, 0.2, 0.3}});
  CHECK(sep.eer == 0.0);
  CHECK(sep.far == 0.0);
  CHECK(sep.frr == 0.0);

  const auto same = eer({{0.1, 0.5, 0.9}, {0.1, 0.5, 0.9}});
  CHECK(same.eer == 0.5);

  const auto degenerate = eer({{0.5}, {0.5}});
  CHECK(degenerate.eer == 0.5);
  CHECK(degenerate.theta == 0.0);

  const auto zeros = eer({{0.0, 0.0}, {0.0, 0.0}});
  CHECK(zeros.eer == 0.5);
}

TEST_CASE("eer agrees with an exhaustive sweep on random score sets") {
  Rng rng(606);
  for (int trial = 0; trial < 500; ++trial) {
    ScoreSet s;
    const size_t np = 1 + rng.below(50), nn = 1 + rng.below(50);
    const int flavor = int(rng.below(3));
    auto draw = [&]() {
      const double u = rng.uniform01();
      if (flavor == 0) return u;
      if (flavor == 1) return std::round(u * 10) / 10;  // coarse ties
      return std::floor(u * 21) / 20;                   // vote-fraction style
    };
    for (size_t i = 0; i < np; ++i) s.positives.push_back(draw());
    for (size_t i = 0; i < nn; ++i) s.negatives.push_back(draw());

    const auto got = eer(s);
    const auto want = oracle::eer_exhaustive(s.positives, s.negatives);
    INFO("trial " << trial << " flavor " << flavor);
    CHECK(got.eer == want.eer);
    CHECK(got.theta == want.theta);
    CHECK(got.far == want.far);
    CHECK(got.frr == want.frr);
    if (flavor == 0) {
      // With distinct scores each candidate step reclassifies one score, so
      // the best |FAR-FRR| cannot exceed half the larger step.
      const double bound = 0.5 * std::max(1.0 / double(np), 1.0 / double(nn));
      CHECK(std::abs(got.far - got.frr) <= bound + 1e-12);
    }
  }
}

TEST_CASE("option validation") {
  EvalOptions o;
  o.sources = {DeviceKind::Ring, DeviceKind::Door};
  CHECK_THROWS_WITH(validate_options(o),
                    Catch::Matchers::ContainsSubstring("door is not a valid source"));
  o = {};
  o.window = {9.0, 0.0};
  CHECK_THROWS_WITH(validate_options(o), Catch::Matchers::ContainsSubstring("window spec"));
  o = {};
  o.n_seeds = 0;
  CHECK_THROWS_AS(validate_options(o), std::invalid_argument);
  o = {};
  o.mask = 0;
  CHECK_THROWS_AS(validate_options(o), std::invalid_argument);
  o = {};
  o.sources.clear();
  CHECK_THROWS_AS(validate_options(o), std::invalid_argument);
  // Door is fine for knocks.
  o = {};
  o.gesture = GestureKind::Knock3;
  o.sources = {DeviceKind::Door};
  CHECK_NOTHROW(validate_options(o));
}

// ---- protocol runs on a small synthetic study ----

namespace {

const ingest::Study& eval_study() {
  static const ingest::Study study = [] {
    const fs::path dir = fs::temp_directory_path() / "gestauth_eval_study";
    fs::remove_all(dir);
    synth::StudySpec spec;
    spec.n_users = 3;
    spec.gestures_per = 2;
    spec.separability = 0.9;
    spec.fidelity = 1.0;
    spec.seed = 21;
    spec.victims = {0};
    spec.attackers = {2};
    synth::generate_study(spec, dir);
    return ingest::load_study(dir);
  }();
  return study;
}

EvalOptions fast_opts(GestureKind kind) {
  EvalOptions o;
  o.gesture = kind;
  o.sources = is_tap(kind) ? std::vector<DeviceKind>{DeviceKind::Ring}
                           : std::vector<DeviceKind>{DeviceKind::Door, DeviceKind::Ring,
                                                     DeviceKind::Watch};
  o.forest.n_trees = 15;
  o.forest.seed = 5;
  o.n_seeds = 1;
  o.jobs = 2;
  return o;
}

std::string terminal_of(const std::string& gesture_id) {
  const auto p = gesture_id.find(":T");
  if (p == std::string::npos) return "";
  const auto q = gesture_id.find(':', p + 2);
  return gesture_id.substr(p + 2, q - p - 2);
}

}  // namespace

TEST_CASE("terminal-agnostic protocol: structure, audit, determinism") {
  const auto& study = eval_study();
  const auto opts = fast_opts(GestureKind::RingTap);
  const auto rep = run_terminal_agnostic(study, opts);

  CHECK(rep.protocol == "terminal-agnostic");
  CHECK(rep.forests == 3 * 6 * 1);
  REQUIRE(rep.cells.size() == 18);
  CHECK(rep.per_user.size() == 3);
  CHECK(rep.curves.size() == 3);
  CHECK(rep.mean_eer < 0.2);  // well-separated users

  for (const auto& c : rep.cells) {
    CHECK(c.train_count == 10);  // 5 kept terminals x 2 repeats
    CHECK(c.eer >= 0.0);
    CHECK(c.eer <= 0.5);
  }

  double imp_sum = 0;
  for (double v : rep.mean_importance) imp_sum += v;
  CHECK(imp_sum == Catch::Approx(1.0).epsilon(1e-6));
  int top5_sum = 0;
  for (int v : rep.top5_counts) top5_sum += v;
  CHECK(top5_sum == 18 * 5);

  // No training row may come from session 2, an impersonation, the held-out
  // terminal, or the freestyle terminal.
  size_t trains = 0, tests = 0;
  for (const auto& row : rep.audit) {
    const auto hp = row.cell.find("holdout=");
    REQUIRE(hp != std::string::npos);
    const std::string holdout = row.cell.substr(hp + 8);
    if (row.role == "train+" || row.role == "train-") {
      ++trains;
      CHECK(row.gesture.find(":s1:") != std::string::npos);
      CHECK(row.gesture.rfind("imp:", 0) != 0);
      CHECK(terminal_of(row.gesture) != holdout);
      CHECK(terminal_of(row.gesture) != "F");
    } else if (row.role == "test+" || row.role == "test-") {
      ++tests;
      CHECK(row.gesture.find(":s2:") != std::string::npos);
      CHECK(terminal_of(row.gesture) == holdout);
    } else if (row.gesture.rfind("imp:", 0) == 0) {
      CHECK(row.role == "excluded:impersonation");
    } else if (terminal_of(row.gesture) == "F") {
      CHECK(row.role == "excluded:freestyle");
    }
  }
  CHECK(trains > 0);
  CHECK(tests > 0);

  // Byte-level determinism, independent of the job count.
  auto serial = opts;
  serial.jobs = 1;
  const auto rep2 = run_terminal_agnostic(study, serial);
  REQUIRE(rep2.cells.size() == rep.cells.size());
  CHECK(rep2.mean_eer == rep.mean_eer);
  for (size_t i = 0; i < rep.cells.size(); ++i) {
    CHECK(rep2.cells[i].cell == rep.cells[i].cell);
    CHECK(rep2.cells[i].eer == rep.cells[i].eer);
    CHECK(rep2.cells[i].theta == rep.cells[i].theta);
  }
}

TEST_CASE("terminal-specific protocol covers the freestyle terminal") {
  const auto& study = eval_study();
  const auto rep = run_terminal_specific(study, fast_opts(GestureKind::RingTap));
  CHECK(rep.protocol == "terminal-specific");
  CHECK(rep.forests == 3 * 7);
  bool has_freestyle = false;
  for (const auto& c : rep.cells) {
    if (c.cell.find("terminal=F") != std::string::npos) has_freestyle = true;
    CHECK(c.train_count == 2);
  }
  CHECK(has_freestyle);
  for (const auto& row : rep.audit)
    if (row.role == "train+" || row.role == "train-" || row.role == "test+" ||
        row.role == "test-") {
      const auto tp = row.cell.find("terminal=");
      CHECK(terminal_of(row.gesture) == row.cell.substr(tp + 9));
    }

  CHECK_THROWS_WITH(run_terminal_specific(study, fast_opts(GestureKind::Knock3)),
                    Catch::Matchers::ContainsSubstring("needs tap gestures"));
}

TEST_CASE("access control trains on session 1 and tests on session 2") {
  const auto& study = eval_study();
  const auto rep = run_access_control(study, fast_opts(GestureKind::Knock3));
  CHECK(rep.protocol == "access-control");
  CHECK(rep.forests == 3);
  for (const auto& c : rep.cells) CHECK(c.train_count == 2);
  for (const auto& row : rep.audit) {
    if (row.role == "train+" || row.role == "train-")
      CHECK(row.gesture.find(":s1:") != std::string::npos);
    if (row.role == "test+" || row.role == "test-")
      CHECK(row.gesture.find(":s2:") != std::string::npos);
  }
  CHECK(rep.mean_eer < 0.25);

  CHECK_THROWS_WITH(run_access_control(study, fast_opts(GestureKind::RingTap)),
                    Catch::Matchers::ContainsSubstring("knock gestures"));
}

TEST_CASE("observation attack isolates the attacker and scores their probes") {
  const auto& study = eval_study();
  const auto rep = run_observation_attack(study, fast_opts(GestureKind::RingTap));
  CHECK(rep.forests == 1);  // one (victim, attacker) pair, one seed
  REQUIRE(rep.cells.size() == 1);
  const auto& c = rep.cells[0];
  CHECK(c.victim == "u01");
  CHECK(c.attacker == "u03");
  CHECK(c.n_probes == 6);  // 2 terminals x 3 attempts
  CHECK(rep.per_victim.size() == 1);
  CHECK(rep.per_attacker.size() == 1);

  for (const auto& row : rep.audit) {
    if (row.role == "attack") {
      CHECK(row.gesture.rfind("imp:u03>u01:", 0) == 0);
    } else if (row.role != "excluded:attacker gestures") {
      CHECK(row.gesture.rfind("u03:", 0) != 0);  // attacker rows never train/test
    } else {
      CHECK(row.gesture.rfind("u03:", 0) == 0);
    }
  }

  const auto wl = wolf_lamb_report(rep, 0.10);
  CHECK(wl.lamb_threshold == 0.10);
  REQUIRE(wl.victims.size() == 1);
  CHECK(wl.victims[0].user == "u01");
  CHECK(wl.victims[0].delta == Catch::Approx(wl.victims[0].obs - wl.victims[0].base));
  CHECK(wl.victims[0].lamb == (wl.victims[0].delta > 0.10));
  REQUIRE(wl.wolves.size() == 1);
  CHECK(wl.wolves[0].first == "u03");

  CHECK_THROWS_WITH(run_observation_attack(study, fast_opts(GestureKind::Knock3)),
                    Catch::Matchers::ContainsSubstring("no impersonation segments"));
}

TEST_CASE("enrolment sweep subsamples evenly and validates counts") {
  const auto& study = eval_study();
  const auto rep = enrolment_sweep(study, {6, 12}, fast_opts(GestureKind::RingTap));
  REQUIRE(rep.points.size() == 2);
  CHECK(rep.points[0].count == 6);
  CHECK(rep.points[1].count == 12);
  REQUIRE(rep.cells.size() == 3 * 2);
  for (const auto& c : rep.cells) CHECK((c.train_count == 6 || c.train_count == 12));

  std::map<std::string, int> train_pos_per_cell;
  for (const auto& row : rep.audit)
    if (row.role == "train+") ++train_pos_per_cell[row.cell];
  for (const auto& [cell, n] : train_pos_per_cell) {
    const bool six = cell.find("count=6 ") != std::string::npos;
    CHECK(n == (six ? 6 : 12));
  }

  CHECK_THROWS_WITH(enrolment_sweep(study, {13}, fast_opts(GestureKind::RingTap)),
                    Catch::Matchers::ContainsSubstring("exceeds the 12 gestures"));
  CHECK_THROWS_AS(enrolment_sweep(study, {}, fast_opts(GestureKind::RingTap)),
                  std::invalid_argument);
}

TEST_CASE("window sweeps mark invalid cells and stay row-major") {
  const auto& study = eval_study();
  const auto rep = sweep_windows(study, {2.0, 4.5}, {0.0}, fast_opts(GestureKind::RingTap));
  REQUIRE(rep.cells.size() == 2);
  CHECK(rep.cells[0].valid);
  CHECK(rep.cells[0].size == 2.0);
  CHECK_FALSE(rep.cells[1].valid);  // 4.5 s exceeds the 4 s lead-in

  const fs::path file = fs::temp_directory_path() / "gestauth_sweep.tsv";
  write_sweep(rep, file);
  const auto text = read_text_file(file);
  fs::remove(file);
  CHECK(text.rfind("offset\\size\t2.00\t4.50\n", 0) == 0);
  CHECK(text.find("\t-") != std::string::npos);

  CHECK_THROWS_WITH(sweep_windows(study, {2.0}, {0.0}, fast_opts(GestureKind::Knock3)),
                    Catch::Matchers::ContainsSubstring("sweeps apply to taps"));
}

TEST_CASE("empty cells are reported, not silently skipped") {
  features::FeatureTable t;
  t.names = {"a", "b"};
  Rng rng(3);
  auto add = [&](const std::string& user, int session, int terminal) {
    features::FeatureVector fv;
    fv.names = t.names;
    fv.values = {rng.uniform01(), rng.uniform01()};
    fv.meta.user = user;
    fv.meta.session = session;
    fv.meta.kind = GestureKind::RingTap;
    fv.meta.terminal = terminal;
    fv.meta.id = user + ":s" + std::to_string(session) + ":ring-tap:T" +
                 std::to_string(terminal) + ":1";
    t.append(std::move(fv));
  };
  // Both users have session-2 data only at terminal 1; holdout=2 has no tests.
  for (const char* u : {"u01", "u02"}) {
    for (int term = 1; term <= 6; ++term)
      for (int rep = 0; rep < 2; ++rep) add(u, 1, term);
    add(u, 2, 1);
  }
  EvalOptions opts = fast_opts(GestureKind::RingTap);
  CHECK_THROWS_WITH(run_terminal_agnostic_on(t, opts),
                    Catch::Matchers::ContainsSubstring("empty test class"));
}

TEST_CASE("prepare_study resamples only the ring") {
  const auto& study = eval_study();
  double ring_before = 0;
  for (const auto& st : study.sessions.at(0).streams)
    if (st.device.kind == DeviceKind::Ring) ring_before = st.rate_hz;
  CHECK(ring_before == 100.0);

  const auto prep = prepare_study(study, 50.0, ingest::ResampleMode::Interpolate);
  for (const auto& rec : prep.sessions)
    for (const auto& st : rec.streams) {
      if (st.device.kind == DeviceKind::Ring) CHECK(st.rate_hz == 50.0);
      if (st.device.kind == DeviceKind::Watch) CHECK(st.rate_hz == 50.0);
      if (st.device.kind == DeviceKind::Door) CHECK(st.rate_hz == 30.0);
    }

  const auto same = prepare_study(study, 0.0, ingest::ResampleMode::Interpolate);
  for (const auto& st : same.sessions.at(0).streams)
    if (st.device.kind == DeviceKind::Ring) CHECK(st.rate_hz == 100.0);
}

TEST_CASE("protocol reports serialize with their audits") {
  const auto& study = eval_study();
  auto opts = fast_opts(GestureKind::RingTap);
  opts.n_seeds = 2;
  const auto rep = run_terminal_agnostic(study, opts);
  CHECK(rep.forests == 36);

  const fs::path dir = fs::temp_directory_path() / "gestauth_eval_report";
  fs::remove_all(dir);
  write_protocol_report(rep, dir);
  for (const char* name :
       {"cells.tsv", "summary.txt", "curves.tsv", "audit.tsv", "importances.tsv"})
    CHECK(fs::exists(dir / name));

  const auto summary = read_text_file(dir / "summary.txt");
  CHECK(summary.rfind("protocol terminal-agnostic\n", 0) == 0);
  CHECK(summary.find("forests 36\n") != std::string::npos);
  CHECK(summary.find("mean_eer ") != std::string::npos);
  CHECK(summary.find("user_eer u01 ") != std::string::npos);

  const auto cells = read_text_file(dir / "cells.tsv");
  size_t lines = 0;
  for (char ch : cells) lines += ch == '\n';
  CHECK(lines == 1 + 36);
  fs::remove_all(dir);
}
