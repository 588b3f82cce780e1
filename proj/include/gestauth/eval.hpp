#pragma once
// Evaluation: EER machinery, the user-study protocols (terminal-agnostic,
// terminal-specific, terminal-known observation attack, access control,
// window sweeps, enrolment-size sweeps), training-set audits, and report
// serialization. Scores come from one forest per (cell, seed).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "gestauth/core.hpp"
#include "gestauth/features.hpp"
#include "gestauth/forest.hpp"
#include "gestauth/ingest.hpp"
#include "gestauth/segment.hpp"
#include "gestauth/util.hpp"

namespace gestauth::eval {

namespace fs = std::filesystem;

// ---- score sets and the equal error rate ----

struct ScoreSet {
  std::vector<double> positives;  // genuine-user scores
  std::vector<double> negatives;  // everyone else
};

// Accept iff score >= theta: FAR counts negatives at or above, FRR counts
// positives strictly below.
inline std::pair<double, double> far_frr(const ScoreSet& s, double theta) {
  if (s.positives.empty() || s.negatives.empty())
    throw std::invalid_argument("far_frr: need both positive and negative scores");
  size_t fa = 0, fr = 0;
  for (double v : s.negatives)
    if (v >= theta) ++fa;
  for (double v : s.positives)
    if (v < theta) ++fr;
  return {double(fa) / double(s.negatives.size()), double(fr) / double(s.positives.size())};
}

struct EerResult {
  double eer = 0;    // midpoint of FAR and FRR at theta
  double theta = 0;  // smallest minimizer of |FAR - FRR|
  double far = 0, frr = 0;
};

// Sweeps every candidate threshold: zero, each observed score, and one past
// the maximum. Ties in |FAR - FRR| resolve toward the smaller threshold.
inline EerResult eer(const ScoreSet& s) {
  if (s.positives.empty() || s.negatives.empty())
    throw std::invalid_argument("eer: need both positive and negative scores");
  std::vector<double> pos = s.positives, neg = s.negatives;
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());

  std::vector<double> cand;
  cand.reserve(pos.size() + neg.size() + 2);
  cand.push_back(0.0);
  cand.insert(cand.end(), pos.begin(), pos.end());
  cand.insert(cand.end(), neg.begin(), neg.end());
  cand.push_back(std::max(pos.back(), neg.back()) + 1.0);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  EerResult best;
  double best_diff = std::numeric_limits<double>::infinity();
  for (double theta : cand) {
    const auto at_or_above = neg.end() - std::lower_bound(neg.begin(), neg.end(), theta);
    const auto below = std::lower_bound(pos.begin(), pos.end(), theta) - pos.begin();
    const double far = double(at_or_above) / double(neg.size());
    const double frr = double(below) / double(pos.size());
    const double diff = std::abs(far - frr);
    if (diff < best_diff) {
      best_diff = diff;
      best = {0.5 * (far + frr), theta, far, frr};
    }
  }
  return best;
}

// ---- run configuration ----

struct EvalOptions {
  GestureKind gesture = GestureKind::RingTap;
  std::vector<DeviceKind> sources{DeviceKind::Ring};
  SensorMask mask = kAllSensors;
  WindowSpec window{};               // taps only
  forest::ForestConfig forest{};     // .seed is the base; seed k trains with seed+k
  int n_seeds = 10;
  double ring_target_hz = 50.0;      // 0 keeps the native ring rate
  ingest::ResampleMode resample = ingest::ResampleMode::Interpolate;
  features::FeatureOptions feat{};
  double lamb_threshold = 0.10;
  int jobs = 1;
};

inline void validate_options(const EvalOptions& o) {
  if (o.sources.empty()) throw std::invalid_argument("no feature sources selected");
  if (is_tap(o.gesture)) {
    for (auto d : o.sources)
      if (d == DeviceKind::Door)
        throw std::invalid_argument("door is not a valid source for tap gestures");
    if (!o.window.valid()) throw std::invalid_argument("window spec out of range");
  }
  if (o.n_seeds < 1) throw std::invalid_argument("n_seeds must be at least 1");
  if ((o.mask & kAllSensors) == 0) throw std::invalid_argument("sensor mask selects nothing");
}

// ---- feature table construction ----

// Copy of the study with ring streams regularized to the target rate.
inline ingest::Study prepare_study(const ingest::Study& in, double ring_target_hz,
                                   ingest::ResampleMode mode) {
  ingest::Study out;
  out.root = in.root;
  out.sessions = in.sessions;
  if (ring_target_hz <= 0) return out;
  for (auto& rec : out.sessions)
    for (auto& st : rec.streams)
      if (st.device.kind == DeviceKind::Ring &&
          std::abs(st.rate_hz - ring_target_hz) > 1e-9)
        st = ingest::resample(st, ring_target_hz, mode);
  return out;
}

// Features for every gesture of `kind` in the (already prepared) study,
// impersonation sessions included; callers decide how those rows are used.
inline features::FeatureTable build_table(const ingest::Study& study, GestureKind kind,
                                          const WindowSpec& window,
                                          const std::vector<DeviceKind>& sources,
                                          SensorMask mask,
                                          const features::FeatureOptions& feat = {},
                                          std::vector<std::string>* dropped = nullptr) {
  features::FeatureTable table;
  table.names = features::feature_names(sources, mask);
  for (auto& rec : study.sessions) {
    std::vector<GestureSegment> segs;
    if (is_tap(kind))
      segs = seg::taps_in_session(rec, kind, window, dropped);
    else
      segs = seg::knocks_in_session(rec, kind);
    for (auto& g : segs) {
      validate_segment(g);
      table.append(features::extract(g, sources, mask, feat));
    }
  }
  if (table.rows.empty())
    throw std::runtime_error(std::string("study has no ") + to_token(kind) + " gestures");
  return table;
}

// ---- cells, splits, audits ----

struct CellResult {
  std::string cell;  // split key, e.g. "user=u01 holdout=3"
  std::string user;
  int terminal = 0;    // 0 when not applicable
  uint64_t seed = 0;   // actual forest seed
  int train_count = 0; // positive training rows
  double eer = 0, theta = 0, far = 0, frr = 0, oob = 0;
};

struct AuditRow {
  std::string cell;
  std::string gesture;
  std::string role;  // train+, train-, test+, test-, excluded:<reason>
};

struct SplitSpec {
  std::string key;
  std::string user;      // positive identity (victim for attacks)
  std::string attacker;  // attacks only
  int terminal = 0;
  std::vector<int> train_pos, train_neg, test_pos, test_neg;
  std::vector<int> attack_rows;  // impersonation probes, attacks only
};

namespace detail {

inline bool fixed_terminal(const GestureMeta& m) {
  return m.terminal && *m.terminal >= 1 && *m.terminal <= 6;
}

inline std::vector<std::string> genuine_users(const features::FeatureTable& t) {
  std::set<std::string> users;
  for (auto& m : t.metas)
    if (!m.impersonation) users.insert(m.user);
  return {users.begin(), users.end()};
}

inline void audit_split(const features::FeatureTable& t, const SplitSpec& s,
                        const std::function<std::string(const GestureMeta&)>& reason,
                        std::vector<AuditRow>& out) {
  std::vector<const char*> role(t.size(), nullptr);
  for (int i : s.train_pos) role[size_t(i)] = "train+";
  for (int i : s.train_neg) role[size_t(i)] = "train-";
  for (int i : s.test_pos) role[size_t(i)] = "test+";
  for (int i : s.test_neg) role[size_t(i)] = "test-";
  for (int i : s.attack_rows) role[size_t(i)] = "attack";
  for (size_t i = 0; i < t.size(); ++i) {
    if (role[i])
      out.push_back({s.key, t.metas[i].id, role[i]});
    else
      out.push_back({s.key, t.metas[i].id, "excluded:" + reason(t.metas[i])});
  }
}

struct CellOutcome {
  EerResult er;
  double oob = 0;
  int train_pos = 0;
  ScoreSet scores;
  std::vector<double> importance;
  std::vector<int> top5;
  double obs_far = 0;  // attacks only
  int n_attack = 0;
};

inline CellOutcome run_cell(const features::FeatureTable& t, const SplitSpec& s,
                            forest::ForestConfig cfg,
                            const std::vector<int>* train_pos_override = nullptr) {
  const std::vector<int>& tp = train_pos_override ? *train_pos_override : s.train_pos;
  if (tp.empty() || s.train_neg.empty())
    throw std::runtime_error("cell " + s.key + ": empty training class");
  if (s.test_pos.empty() || s.test_neg.empty())
    throw std::runtime_error("cell " + s.key + ": empty test class");

  forest::Matrix X;
  std::vector<int> y;
  X.reserve(tp.size() + s.train_neg.size());
  for (int i : tp) { X.push_back(&t.rows[size_t(i)]); y.push_back(1); }
  for (int i : s.train_neg) { X.push_back(&t.rows[size_t(i)]); y.push_back(0); }
  auto f = forest::Forest::train(X, y, t.names, cfg);

  CellOutcome out;
  out.train_pos = int(tp.size());
  for (int i : s.test_pos) out.scores.positives.push_back(f.score(t.rows[size_t(i)]));
  for (int i : s.test_neg) out.scores.negatives.push_back(f.score(t.rows[size_t(i)]));
  out.er = eer(out.scores);
  out.oob = f.oob_error();
  out.importance = f.importances();
  const auto ranked = f.ranked_features();
  for (size_t k = 0; k < 5 && k < ranked.size(); ++k) out.top5.push_back(ranked[k]);
  if (!s.attack_rows.empty()) {
    int hits = 0;
    for (int i : s.attack_rows)
      if (f.score(t.rows[size_t(i)]) >= out.er.theta) ++hits;
    out.obs_far = double(hits) / double(s.attack_rows.size());
    out.n_attack = int(s.attack_rows.size());
  }
  return out;
}

}  // namespace detail

// ---- protocol reports ----

struct UserCurve {
  std::string user;
  std::vector<std::array<double, 3>> points;  // theta, far, frr
};

struct ProtocolReport {
  std::string protocol;
  std::vector<CellResult> cells;       // one per (split, seed)
  std::vector<AuditRow> audit;         // one sweep over the table per split
  double mean_eer = 0;
  std::vector<std::pair<std::string, double>> per_user;  // mean EER by user
  std::vector<UserCurve> curves;       // pooled over each user's cells
  std::vector<std::string> feature_names;
  std::vector<double> mean_importance;
  std::vector<int> top5_counts;
  int forests = 0;
};

namespace detail {

inline UserCurve pooled_curve(const std::string& user, const ScoreSet& pooled) {
  UserCurve c{user, {}};
  if (pooled.positives.empty() || pooled.negatives.empty()) return c;
  std::vector<double> cand;
  cand.push_back(0.0);
  cand.insert(cand.end(), pooled.positives.begin(), pooled.positives.end());
  cand.insert(cand.end(), pooled.negatives.begin(), pooled.negatives.end());
  const double top = *std::max_element(cand.begin(), cand.end()) + 1.0;
  cand.push_back(top);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  for (double theta : cand) {
    const auto [far, frr] = far_frr(pooled, theta);
    c.points.push_back({theta, far, frr});
  }
  return c;
}

// Shared driver: runs every (split, seed) cell, then aggregates means,
// importances, and per-user pooled curves in deterministic order.
inline ProtocolReport run_protocol(std::string protocol, const features::FeatureTable& t,
                                   const std::vector<SplitSpec>& splits,
                                   const std::function<std::string(const GestureMeta&)>& reason,
                                   const EvalOptions& opts) {
  ProtocolReport rep;
  rep.protocol = std::move(protocol);
  rep.feature_names = t.names;
  for (auto& s : splits) detail::audit_split(t, s, reason, rep.audit);

  const int n_jobs = int(splits.size()) * opts.n_seeds;
  std::vector<detail::CellOutcome> outcomes(static_cast<size_t>(n_jobs));
  parallel_for(n_jobs, opts.jobs, [&](int j) {
    const auto& s = splits[size_t(j) / size_t(opts.n_seeds)];
    forest::ForestConfig cfg = opts.forest;
    cfg.seed = opts.forest.seed + uint64_t(j % opts.n_seeds);
    outcomes[size_t(j)] = detail::run_cell(t, s, cfg);
  });

  rep.mean_importance.assign(t.names.size(), 0.0);
  rep.top5_counts.assign(t.names.size(), 0);
  std::map<std::string, ScoreSet> pooled;
  std::map<std::string, std::pair<double, int>> by_user;
  double eer_sum = 0;
  for (int j = 0; j < n_jobs; ++j) {
    const auto& s = splits[size_t(j) / size_t(opts.n_seeds)];
    const auto& o = outcomes[size_t(j)];
    CellResult c;
    c.cell = s.key;
    c.user = s.user;
    c.terminal = s.terminal;
    c.seed = opts.forest.seed + uint64_t(j % opts.n_seeds);
    c.train_count = o.train_pos;
    c.eer = o.er.eer;
    c.theta = o.er.theta;
    c.far = o.er.far;
    c.frr = o.er.frr;
    c.oob = o.oob;
    rep.cells.push_back(c);
    eer_sum += o.er.eer;
    auto& acc = by_user[s.user];
    acc.first += o.er.eer;
    acc.second += 1;
    auto& pool = pooled[s.user];
    pool.positives.insert(pool.positives.end(), o.scores.positives.begin(),
                          o.scores.positives.end());
    pool.negatives.insert(pool.negatives.end(), o.scores.negatives.begin(),
                          o.scores.negatives.end());
    for (size_t f = 0; f < t.names.size(); ++f) rep.mean_importance[f] += o.importance[f];
    for (int f : o.top5) ++rep.top5_counts[size_t(f)];
  }
  rep.forests = n_jobs;
  rep.mean_eer = n_jobs > 0 ? eer_sum / double(n_jobs) : 0.0;
  for (double& v : rep.mean_importance) v /= double(std::max(1, n_jobs));
  for (auto& [user, acc] : by_user) rep.per_user.emplace_back(user, acc.first / acc.second);
  for (auto& [user, pool] : pooled) rep.curves.push_back(detail::pooled_curve(user, pool));
  return rep;
}

}  // namespace detail

// ---- terminal-agnostic: leave one fixed terminal out ----

inline ProtocolReport run_terminal_agnostic_on(const features::FeatureTable& t,
                                               const EvalOptions& opts) {
  const auto users = detail::genuine_users(t);
  if (users.size() < 2) throw std::runtime_error("protocol needs at least 2 users");
  std::vector<SplitSpec> splits;
  for (auto& user : users) {
    for (int holdout = 1; holdout <= 6; ++holdout) {
      SplitSpec s;
      s.key = "user=" + user + " holdout=" + std::to_string(holdout);
      s.user = user;
      s.terminal = holdout;
      for (size_t i = 0; i < t.size(); ++i) {
        const auto& m = t.metas[i];
        if (m.impersonation || !detail::fixed_terminal(m)) continue;
        const bool held = *m.terminal == holdout;
        if (m.session == 1 && !held)
          (m.user == user ? s.train_pos : s.train_neg).push_back(int(i));
        else if (m.session == 2 && held)
          (m.user == user ? s.test_pos : s.test_neg).push_back(int(i));
      }
      splits.push_back(std::move(s));
    }
  }
  auto reason = [](const GestureMeta& m) -> std::string {
    if (m.impersonation) return "impersonation";
    if (!m.terminal || *m.terminal == kFreestyleTerminal) return "freestyle";
    return m.session == 1 ? "held-out terminal" : "session-2 off-cell";
  };
  return detail::run_protocol("terminal-agnostic", t, splits, reason, opts);
}

inline ProtocolReport run_terminal_agnostic(const ingest::Study& study,
                                            const EvalOptions& opts) {
  validate_options(opts);
  const auto prepared = prepare_study(study, opts.ring_target_hz, opts.resample);
  const auto table =
      build_table(prepared, opts.gesture, opts.window, opts.sources, opts.mask, opts.feat);
  return run_terminal_agnostic_on(table, opts);
}

// ---- terminal-specific: train and test on one terminal (freestyle too) ----

inline ProtocolReport run_terminal_specific_on(const features::FeatureTable& t,
                                               const EvalOptions& opts) {
  const auto users = detail::genuine_users(t);
  if (users.size() < 2) throw std::runtime_error("protocol needs at least 2 users");
  std::set<int> terminals;
  for (auto& m : t.metas)
    if (!m.impersonation && m.terminal) terminals.insert(*m.terminal);
  if (terminals.empty())
    throw std::runtime_error("terminal-specific evaluation needs tap gestures");
  std::vector<SplitSpec> splits;
  for (auto& user : users) {
    for (int term : terminals) {
      SplitSpec s;
      s.key = "user=" + user + " terminal=" + terminal_token(term);
      s.user = user;
      s.terminal = term;
      for (size_t i = 0; i < t.size(); ++i) {
        const auto& m = t.metas[i];
        if (m.impersonation || !m.terminal || *m.terminal != term) continue;
        if (m.session == 1)
          (m.user == user ? s.train_pos : s.train_neg).push_back(int(i));
        else
          (m.user == user ? s.test_pos : s.test_neg).push_back(int(i));
      }
      splits.push_back(std::move(s));
    }
  }
  auto reason = [](const GestureMeta& m) -> std::string {
    return m.impersonation ? "impersonation" : "other terminal";
  };
  return detail::run_protocol("terminal-specific", t, splits, reason, opts);
}

inline ProtocolReport run_terminal_specific(const ingest::Study& study,
                                            const EvalOptions& opts) {
  validate_options(opts);
  const auto prepared = prepare_study(study, opts.ring_target_hz, opts.resample);
  const auto table =
      build_table(prepared, opts.gesture, opts.window, opts.sources, opts.mask, opts.feat);
  return run_terminal_specific_on(table, opts);
}

// ---- access control: session 1 trains, session 2 tests, per knock kind ----

inline ProtocolReport run_access_control_on(const features::FeatureTable& t,
                                            const EvalOptions& opts) {
  const auto users = detail::genuine_users(t);
  if (users.size() < 2) throw std::runtime_error("protocol needs at least 2 users");
  std::vector<SplitSpec> splits;
  for (auto& user : users) {
    SplitSpec s;
    s.key = "user=" + user;
    s.user = user;
    for (size_t i = 0; i < t.size(); ++i) {
      const auto& m = t.metas[i];
      if (m.impersonation) continue;
      if (m.session == 1)
        (m.user == user ? s.train_pos : s.train_neg).push_back(int(i));
      else
        (m.user == user ? s.test_pos : s.test_neg).push_back(int(i));
    }
    splits.push_back(std::move(s));
  }
  auto reason = [](const GestureMeta&) -> std::string { return "impersonation"; };
  return detail::run_protocol("access-control", t, splits, reason, opts);
}

inline ProtocolReport run_access_control(const ingest::Study& study, const EvalOptions& opts) {
  validate_options(opts);
  if (!is_knock(opts.gesture))
    throw std::invalid_argument("access control evaluates knock gestures");
  const auto prepared = prepare_study(study, opts.ring_target_hz, opts.resample);
  const auto table =
      build_table(prepared, opts.gesture, opts.window, opts.sources, opts.mask, opts.feat);
  return run_access_control_on(table, opts);
}

// ---- terminal-known observation attack ----
// Victim models train on all the victim's gestures of the kind (terminals are
// not excluded); the attacker's genuine gestures leave both train and test.
// theta lands at the EER threshold; the impersonation probes score against it.

struct AttackCell {
  std::string victim, attacker;
  uint64_t seed = 0;
  double eer = 0, theta = 0, base_far = 0, obs_far = 0;
  int n_probes = 0;
};

struct AttackReport {
  GestureKind gesture{};
  std::vector<AttackCell> cells;
  std::vector<AuditRow> audit;
  double mean_base = 0, mean_obs = 0;
  std::vector<std::tuple<std::string, double, double>> per_victim;    // base, obs
  std::vector<std::pair<std::string, double>> per_attacker;           // mean obs
  int forests = 0;
};

inline AttackReport run_observation_attack_on(const features::FeatureTable& t,
                                              const EvalOptions& opts) {
  std::set<std::pair<std::string, std::string>> pair_set;
  for (auto& m : t.metas)
    if (m.impersonation) pair_set.insert({m.impersonation->victim, m.impersonation->attacker});
  if (pair_set.empty())
    throw std::runtime_error("no impersonation segments for this gesture");

  std::vector<SplitSpec> splits;
  for (auto& [victim, attacker] : pair_set) {
    SplitSpec s;
    s.key = "victim=" + victim + " attacker=" + attacker;
    s.user = victim;
    s.attacker = attacker;
    for (size_t i = 0; i < t.size(); ++i) {
      const auto& m = t.metas[i];
      if (m.impersonation) {
        if (m.impersonation->victim == victim && m.impersonation->attacker == attacker)
          s.attack_rows.push_back(int(i));
        continue;
      }
      if (m.user == attacker) continue;  // attacker's own gestures leave the cell
      if (m.session == 1)
        (m.user == victim ? s.train_pos : s.train_neg).push_back(int(i));
      else
        (m.user == victim ? s.test_pos : s.test_neg).push_back(int(i));
    }
    splits.push_back(std::move(s));
  }

  AttackReport rep;
  rep.gesture = opts.gesture;
  auto reason = [](const GestureMeta& m) -> std::string {
    return m.impersonation ? "other attack pair" : "attacker gestures";
  };
  for (auto& s : splits) detail::audit_split(t, s, reason, rep.audit);

  const int n_jobs = int(splits.size()) * opts.n_seeds;
  std::vector<detail::CellOutcome> outcomes(static_cast<size_t>(n_jobs));
  parallel_for(n_jobs, opts.jobs, [&](int j) {
    const auto& s = splits[size_t(j) / size_t(opts.n_seeds)];
    forest::ForestConfig cfg = opts.forest;
    cfg.seed = opts.forest.seed + uint64_t(j % opts.n_seeds);
    outcomes[size_t(j)] = detail::run_cell(t, s, cfg);
  });

  std::map<std::string, std::array<double, 3>> victim_acc;    // base, obs, count
  std::map<std::string, std::pair<double, int>> attacker_acc;
  for (int j = 0; j < n_jobs; ++j) {
    const auto& s = splits[size_t(j) / size_t(opts.n_seeds)];
    const auto& o = outcomes[size_t(j)];
    AttackCell c;
    c.victim = s.user;
    c.attacker = s.attacker;
    c.seed = opts.forest.seed + uint64_t(j % opts.n_seeds);
    c.eer = o.er.eer;
    c.theta = o.er.theta;
    c.base_far = o.er.far;  // zero-effort FAR at the EER threshold
    c.obs_far = o.obs_far;
    c.n_probes = o.n_attack;
    rep.cells.push_back(c);
    rep.mean_base += c.base_far;
    rep.mean_obs += c.obs_far;
    auto& va = victim_acc[c.victim];
    va[0] += c.base_far;
    va[1] += c.obs_far;
    va[2] += 1;
    auto& aa = attacker_acc[s.attacker];
    aa.first += c.obs_far;
    aa.second += 1;
  }
  rep.forests = n_jobs;
  if (n_jobs > 0) {
    rep.mean_base /= double(n_jobs);
    rep.mean_obs /= double(n_jobs);
  }
  for (auto& [v, acc] : victim_acc)
    rep.per_victim.emplace_back(v, acc[0] / acc[2], acc[1] / acc[2]);
  for (auto& [a, acc] : attacker_acc)
    rep.per_attacker.emplace_back(a, acc.first / acc.second);
  return rep;
}

inline AttackReport run_observation_attack(const ingest::Study& study,
                                           const EvalOptions& opts) {
  validate_options(opts);
  const auto prepared = prepare_study(study, opts.ring_target_hz, opts.resample);
  const auto table =
      build_table(prepared, opts.gesture, opts.window, opts.sources, opts.mask, opts.feat);
  return run_observation_attack_on(table, opts);
}

// ---- wolf/lamb summary over an attack report ----

struct WolfLambEntry {
  std::string user;
  double base = 0, obs = 0, delta = 0;
  bool lamb = false;
};

struct WolfLambReport {
  double lamb_threshold = 0.10;
  std::vector<WolfLambEntry> victims;                   // by descending delta
  std::vector<std::pair<std::string, double>> wolves;   // attackers by mean obs
};

inline WolfLambReport wolf_lamb_report(const AttackReport& attack, double lamb_threshold) {
  WolfLambReport rep;
  rep.lamb_threshold = lamb_threshold;
  for (auto& [user, base, obs] : attack.per_victim) {
    WolfLambEntry e;
    e.user = user;
    e.base = base;
    e.obs = obs;
    e.delta = obs - base;
    e.lamb = e.delta > lamb_threshold;
    rep.victims.push_back(e);
  }
  std::stable_sort(rep.victims.begin(), rep.victims.end(),
                   [](auto& a, auto& b) { return a.delta > b.delta; });
  rep.wolves.assign(attack.per_attacker.begin(), attack.per_attacker.end());
  std::stable_sort(rep.wolves.begin(), rep.wolves.end(),
                   [](auto& a, auto& b) { return a.second > b.second; });
  return rep;
}

// ---- window sweep: one terminal-agnostic run per (size, offset) ----

struct SweepCell {
  double size = 0, offset = 0;
  bool valid = false;
  double mean_eer = 0;
};

struct SweepReport {
  std::vector<double> sizes, offsets;
  std::vector<SweepCell> cells;  // row-major, offsets outer
};

inline SweepReport sweep_windows(const ingest::Study& study, const std::vector<double>& sizes,
                                 const std::vector<double>& offsets, const EvalOptions& opts) {
  validate_options(opts);
  if (!is_tap(opts.gesture)) throw std::invalid_argument("window sweeps apply to taps");
  const auto prepared = prepare_study(study, opts.ring_target_hz, opts.resample);
  SweepReport rep;
  rep.sizes = sizes;
  rep.offsets = offsets;
  for (double off : offsets) {
    for (double size : sizes) {
      SweepCell cell{size, off, false, 0};
      WindowSpec w{size, off};
      if (w.valid()) {
        EvalOptions cell_opts = opts;
        cell_opts.window = w;
        const auto table = build_table(prepared, opts.gesture, w, opts.sources, opts.mask,
                                       opts.feat);
        cell.mean_eer = run_terminal_agnostic_on(table, cell_opts).mean_eer;
        cell.valid = true;
      }
      rep.cells.push_back(cell);
    }
  }
  return rep;
}

// ---- enrolment-size sweep ----
// Taps: positives subsampled evenly across the six fixed terminals from
// session 1, tested on session 2 at the same terminals. Knocks: a uniform
// subsample of the user's session-1 knocks. Subsampling is deterministic per
// (user, count, seed).

struct EnrolPoint {
  int count = 0;
  double mean_eer = 0;
};

struct EnrolReport {
  GestureKind gesture{};
  std::vector<EnrolPoint> points;
  std::vector<CellResult> cells;
  std::vector<AuditRow> audit;
};

inline EnrolReport enrolment_sweep_on(const features::FeatureTable& t,
                                      const std::vector<int>& counts,
                                      const EvalOptions& opts) {
  const auto users = detail::genuine_users(t);
  if (users.size() < 2) throw std::runtime_error("protocol needs at least 2 users");
  const bool tap = is_tap(opts.gesture);

  struct EnrolSplit {
    SplitSpec base;
    std::vector<std::vector<int>> pos_by_group;  // taps: per fixed terminal
  };
  std::vector<EnrolSplit> splits;
  for (auto& user : users) {
    EnrolSplit es;
    es.base.key = "user=" + user;
    es.base.user = user;
    es.pos_by_group.resize(tap ? 6 : 1);
    for (size_t i = 0; i < t.size(); ++i) {
      const auto& m = t.metas[i];
      if (m.impersonation) continue;
      if (tap && !detail::fixed_terminal(m)) continue;
      if (m.session == 1) {
        if (m.user == user) {
          es.pos_by_group[tap ? size_t(*m.terminal - 1) : 0].push_back(int(i));
          es.base.train_pos.push_back(int(i));
        } else {
          es.base.train_neg.push_back(int(i));
        }
      } else {
        (m.user == user ? es.base.test_pos : es.base.test_neg).push_back(int(i));
      }
    }
    splits.push_back(std::move(es));
  }

  EnrolReport rep;
  rep.gesture = opts.gesture;
  struct Job {
    int split = 0, count = 0, seed_idx = 0;
    std::vector<int> subsample;
  };
  std::vector<Job> jobs;
  for (int si = 0; si < int(splits.size()); ++si) {
    auto& es = splits[size_t(si)];
    int available = 0;
    for (auto& g : es.pos_by_group) available += int(g.size());
    for (int count : counts) {
      if (count > available)
        throw std::runtime_error("enrolment count " + std::to_string(count) +
                                 " exceeds the " + std::to_string(available) +
                                 " gestures available for " + es.base.user);
      for (int k = 0; k < opts.n_seeds; ++k) {
        Job job{si, count, k, {}};
        Rng rng(mix_seed(mix_seed(opts.forest.seed + uint64_t(k), fnv1a(es.base.user)),
                         uint64_t(count)));
        const int groups = int(es.pos_by_group.size());
        for (int g = 0; g < groups; ++g) {
          // Even spread: the first (count % groups) groups take one extra.
          int quota = count / groups + (g < count % groups ? 1 : 0);
          if (quota > int(es.pos_by_group[size_t(g)].size()))
            throw std::runtime_error("enrolment count " + std::to_string(count) +
                                     " cannot spread evenly for " + es.base.user);
          std::vector<int> pool = es.pos_by_group[size_t(g)];
          rng.shuffle(pool);
          job.subsample.insert(job.subsample.end(), pool.begin(), pool.begin() + quota);
        }
        std::sort(job.subsample.begin(), job.subsample.end());
        jobs.push_back(std::move(job));
      }
    }
  }

  std::vector<detail::CellOutcome> outcomes(jobs.size());
  parallel_for(int(jobs.size()), opts.jobs, [&](int j) {
    const auto& job = jobs[size_t(j)];
    forest::ForestConfig cfg = opts.forest;
    cfg.seed = opts.forest.seed + uint64_t(job.seed_idx);
    outcomes[size_t(j)] = detail::run_cell(t, splits[size_t(job.split)].base, cfg,
                                           &job.subsample);
  });

  std::map<int, std::pair<double, int>> by_count;
  for (size_t j = 0; j < jobs.size(); ++j) {
    const auto& job = jobs[j];
    const auto& es = splits[size_t(job.split)];
    const auto& o = outcomes[j];
    const std::string key = es.base.key + " count=" + std::to_string(job.count) +
                            " seed=" + std::to_string(job.seed_idx);
    CellResult c;
    c.cell = key;
    c.user = es.base.user;
    c.seed = opts.forest.seed + uint64_t(job.seed_idx);
    c.train_count = job.count;
    c.eer = o.er.eer;
    c.theta = o.er.theta;
    c.far = o.er.far;
    c.frr = o.er.frr;
    c.oob = o.oob;
    rep.cells.push_back(c);
    auto& acc = by_count[job.count];
    acc.first += o.er.eer;
    acc.second += 1;

    SplitSpec audited = es.base;
    audited.key = key;
    audited.train_pos = job.subsample;
    detail::audit_split(t, audited,
                        [&](const GestureMeta& m) -> std::string {
                          if (m.impersonation) return "impersonation";
                          if (is_tap(m.kind) && !detail::fixed_terminal(m)) return "freestyle";
                          return "enrolment subsample";
                        },
                        rep.audit);
  }
  for (auto& [count, acc] : by_count) rep.points.push_back({count, acc.first / acc.second});
  return rep;
}

inline EnrolReport enrolment_sweep(const ingest::Study& study, const std::vector<int>& counts,
                                   const EvalOptions& opts) {
  validate_options(opts);
  if (counts.empty()) throw std::invalid_argument("enrolment sweep needs counts");
  const auto prepared = prepare_study(study, opts.ring_target_hz, opts.resample);
  const auto table =
      build_table(prepared, opts.gesture, opts.window, opts.sources, opts.mask, opts.feat);
  return enrolment_sweep_on(table, counts, opts);
}

// ---- report files (tab-separated, 4-decimal metrics; see FORMATS.md) ----

namespace detail {

inline void write_audit(const std::vector<AuditRow>& audit, const fs::path& file) {
  std::ostringstream out;
  out << "cell\tgesture\trole\n";
  for (auto& row : audit) out << row.cell << "\t" << row.gesture << "\t" << row.role << "\n";
  write_text_file(file, out.str());
}

inline void write_importances(const std::vector<std::string>& names,
                              const std::vector<double>& mean_imp,
                              const std::vector<int>& top5, int forests,
                              const fs::path& file) {
  std::vector<int> order(names.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (top5[size_t(a)] != top5[size_t(b)]) return top5[size_t(a)] > top5[size_t(b)];
    return mean_imp[size_t(a)] > mean_imp[size_t(b)];
  });
  std::ostringstream out;
  out << "rank\tfeature\ttop5_count\tforests\tmean_importance\n";
  for (size_t r = 0; r < order.size(); ++r) {
    const int i = order[r];
    out << (r + 1) << "\t" << names[size_t(i)] << "\t" << top5[size_t(i)] << "\t" << forests
        << "\t" << fmt_fixed(mean_imp[size_t(i)], 6) << "\n";
  }
  write_text_file(file, out.str());
}

}  // namespace detail

inline void write_protocol_report(const ProtocolReport& rep, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ostringstream out;
    out << "cell\tuser\tterminal\tseed\ttrain_pos\teer\ttheta\tfar\tfrr\toob\n";
    for (auto& c : rep.cells)
      out << c.cell << "\t" << c.user << "\t"
          << (c.terminal ? terminal_token(c.terminal) : "-") << "\t" << c.seed << "\t"
          << c.train_count << "\t" << fmt_fixed(c.eer) << "\t" << fmt_fixed(c.theta) << "\t"
          << fmt_fixed(c.far) << "\t" << fmt_fixed(c.frr) << "\t" << fmt_fixed(c.oob) << "\n";
    write_text_file(dir / "cells.tsv", out.str());
  }
  {
    std::ostringstream out;
    out << "protocol " << rep.protocol << "\n";
    out << "forests " << rep.forests << "\n";
    out << "mean_eer " << fmt_fixed(rep.mean_eer) << "\n";
    for (auto& [user, eer] : rep.per_user)
      out << "user_eer " << user << " " << fmt_fixed(eer) << "\n";
    write_text_file(dir / "summary.txt", out.str());
  }
  {
    std::ostringstream out;
    out << "user\ttheta\tfar\tfrr\n";
    for (auto& c : rep.curves)
      for (auto& p : c.points)
        out << c.user << "\t" << fmt_fixed(p[0]) << "\t" << fmt_fixed(p[1]) << "\t"
            << fmt_fixed(p[2]) << "\n";
    write_text_file(dir / "curves.tsv", out.str());
  }
  detail::write_audit(rep.audit, dir / "audit.tsv");
  detail::write_importances(rep.feature_names, rep.mean_importance, rep.top5_counts,
                            rep.forests, dir / "importances.tsv");
}

inline void write_attack_report(const AttackReport& rep, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ostringstream out;
    out << "victim\tattacker\tseed\teer\ttheta\tbase_far\tobs_far\tprobes\n";
    for (auto& c : rep.cells)
      out << c.victim << "\t" << c.attacker << "\t" << c.seed << "\t" << fmt_fixed(c.eer)
          << "\t" << fmt_fixed(c.theta) << "\t" << fmt_fixed(c.base_far) << "\t"
          << fmt_fixed(c.obs_far) << "\t" << c.n_probes << "\n";
    write_text_file(dir / "pairs.tsv", out.str());
  }
  {
    std::ostringstream out;
    out << "victim\tbase_far\tobs_far\tdelta\n";
    for (auto& [v, base, obs] : rep.per_victim)
      out << v << "\t" << fmt_fixed(base) << "\t" << fmt_fixed(obs) << "\t"
          << fmt_fixed(obs - base) << "\n";
    write_text_file(dir / "victims.tsv", out.str());
  }
  {
    std::ostringstream out;
    out << "attacker\tmean_obs_far\n";
    for (auto& [a, obs] : rep.per_attacker) out << a << "\t" << fmt_fixed(obs) << "\n";
    write_text_file(dir / "attackers.tsv", out.str());
  }
  {
    std::ostringstream out;
    out << "gesture " << to_token(rep.gesture) << "\n";
    out << "forests " << rep.forests << "\n";
    out << "mean_base_far " << fmt_fixed(rep.mean_base) << "\n";
    out << "mean_obs_far " << fmt_fixed(rep.mean_obs) << "\n";
    write_text_file(dir / "summary.txt", out.str());
  }
  detail::write_audit(rep.audit, dir / "audit.tsv");
}

inline void write_wolf_lamb(const WolfLambReport& rep, const fs::path& file) {
  std::ostringstream out;
  out << "# lamb_threshold " << fmt_fixed(rep.lamb_threshold) << "\n";
  out << "role\tuser\tbase_far\tobs_far\tdelta\tlamb\n";
  for (auto& v : rep.victims)
    out << "victim\t" << v.user << "\t" << fmt_fixed(v.base) << "\t" << fmt_fixed(v.obs)
        << "\t" << fmt_fixed(v.delta) << "\t" << (v.lamb ? "yes" : "no") << "\n";
  for (auto& [a, obs] : rep.wolves)
    out << "attacker\t" << a << "\t-\t" << fmt_fixed(obs) << "\t-\t-\n";
  write_text_file(file, out.str());
}

inline void write_sweep(const SweepReport& rep, const fs::path& file) {
  std::ostringstream out;
  out << "offset\\size";
  for (double s : rep.sizes) out << "\t" << fmt_fixed(s, 2);
  out << "\n";
  size_t idx = 0;
  for (double off : rep.offsets) {
    out << fmt_fixed(off, 2);
    for (size_t k = 0; k < rep.sizes.size(); ++k, ++idx) {
      const auto& c = rep.cells[idx];
      out << "\t" << (c.valid ? fmt_fixed(c.mean_eer) : std::string("-"));
    }
    out << "\n";
  }
  write_text_file(file, out.str());
}

inline void write_enrol_report(const EnrolReport& rep, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ostringstream out;
    out << "count\tmean_eer\n";
    for (auto& p : rep.points) out << p.count << "\t" << fmt_fixed(p.mean_eer) << "\n";
    write_text_file(dir / "curve.tsv", out.str());
  }
  {
    std::ostringstream out;
    out << "cell\tuser\tseed\tcount\teer\ttheta\tfar\tfrr\toob\n";
    for (auto& c : rep.cells)
      out << c.cell << "\t" << c.user << "\t" << c.seed << "\t" << c.train_count << "\t"
          << fmt_fixed(c.eer) << "\t" << fmt_fixed(c.theta) << "\t" << fmt_fixed(c.far)
          << "\t" << fmt_fixed(c.frr) << "\t" << fmt_fixed(c.oob) << "\n";
    write_text_file(dir / "cells.tsv", out.str());
  }
  detail::write_audit(rep.audit, dir / "audit.tsv");
}

}  // namespace gestauth::eval
