#pragma once
// Random forest, written out in full so scores are reproducible bit for bit:
// bootstrapped Gini trees grown to purity, hard leaf-majority votes, the
// positive-vote fraction as the score, and node-weighted impurity decrease
// as the importance measure. No external ML dependency.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gestauth/rng.hpp"
#include "gestauth/util.hpp"

namespace gestauth::forest {

struct ForestConfig {
  int n_trees = 100;
  int max_features = 0;  // 0 -> floor(sqrt(feature count))
  int min_leaf = 1;
  uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1, right = -1;
  int label = 0;  // leaves only
};

struct Tree {
  std::vector<TreeNode> nodes;
  int predict(std::span<const double> row) const {
    int i = 0;
    while (nodes[size_t(i)].feature >= 0) {
      const auto& nd = nodes[size_t(i)];
      i = row[size_t(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[size_t(i)].label;
  }
};

using Matrix = std::vector<const std::vector<double>*>;

namespace detail {

inline double gini(int pos, int n) {
  const double p = double(pos) / double(n);
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

struct Builder {
  const Matrix& X;
  const std::vector<int>& y;
  int d;
  int max_features;
  int min_leaf;
  Rng rng;
  int n_root = 0;

  std::vector<int> samples;               // bootstrap rows, partitioned in place
  std::vector<int> feat_order;            // lazily shuffled feature ids
  std::vector<std::pair<double, int>> sorted;  // (value, label) scratch
  std::vector<double>* importance = nullptr;   // accumulated across the forest

  Tree tree;

  struct Best {
    double gain = -1.0;
    int feature = -1;
    double threshold = 0.0;
    int n_left = 0, pos_left = 0;
  };

  // Examines one feature; returns false when it is constant inside the node.
  bool scan_feature(int f, int begin, int end, int pos, double g_node, Best& best) {
    const int n = end - begin;
    sorted.clear();
    for (int i = begin; i < end; ++i)
      sorted.emplace_back((*X[size_t(samples[size_t(i)])])[size_t(f)],
                          y[size_t(samples[size_t(i)])]);
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front().first == sorted.back().first) return false;
    int pos_left = 0;
    for (int i = 0; i + 1 < n; ++i) {
      pos_left += sorted[size_t(i)].second;
      if (sorted[size_t(i)].first == sorted[size_t(i + 1)].first) continue;
      const int n_left = i + 1, n_right = n - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      const double g_left = gini(pos_left, n_left);
      const double g_right = gini(pos - pos_left, n_right);
      const double gain =
          g_node - (double(n_left) * g_left + double(n_right) * g_right) / double(n);
      const double thr = 0.5 * (sorted[size_t(i)].first + sorted[size_t(i + 1)].first);
      const bool better =
          gain > best.gain ||
          (gain == best.gain &&
           (f < best.feature || (f == best.feature && thr < best.threshold)));
      if (better) best = {gain, f, thr, n_left, pos_left};
    }
    return true;
  }

  int build_node(int begin, int end) {
    const int n = end - begin;
    int pos = 0;
    for (int i = begin; i < end; ++i) pos += y[size_t(samples[size_t(i)])];

    const int node_id = int(tree.nodes.size());
    tree.nodes.emplace_back();

    auto make_leaf = [&](int node) {
      tree.nodes[size_t(node)].feature = -1;
      tree.nodes[size_t(node)].label = pos > n - pos ? 1 : 0;  // tie -> negative
      return node;
    };

    if (pos == 0 || pos == n || n < 2 * min_leaf) return make_leaf(node_id);

    const double g_node = gini(pos, n);
    Best best;
    int inspected = 0;
    for (int k = 0; k < d; ++k) {
      const int j = k + rng.below_int(d - k);
      std::swap(feat_order[size_t(k)], feat_order[size_t(j)]);
      if (scan_feature(feat_order[size_t(k)], begin, end, pos, g_node, best)) {
        if (++inspected >= max_features) break;
      }
      // Constant features do not count toward max_features.
    }
    if (best.feature < 0) return make_leaf(node_id);

    // Stable two-pass partition keeps child sample order deterministic.
    std::vector<int> left, right;
    left.reserve(size_t(best.n_left));
    right.reserve(size_t(n - best.n_left));
    for (int i = begin; i < end; ++i) {
      const int row = samples[size_t(i)];
      ((*X[size_t(row)])[size_t(best.feature)] <= best.threshold ? left : right)
          .push_back(row);
    }
    std::copy(left.begin(), left.end(), samples.begin() + begin);
    std::copy(right.begin(), right.end(), samples.begin() + begin + best.n_left);

    if (importance) {
      const int nl = best.n_left, nr = n - nl;
      const double decrease = double(n) * g_node -
                              double(nl) * gini(best.pos_left, nl) -
                              double(nr) * gini(pos - best.pos_left, nr);
      (*importance)[size_t(best.feature)] += decrease / double(n_root);
    }

    tree.nodes[size_t(node_id)].feature = best.feature;
    tree.nodes[size_t(node_id)].threshold = best.threshold;
    const int l = build_node(begin, begin + best.n_left);
    tree.nodes[size_t(node_id)].left = l;
    const int r = build_node(begin + best.n_left, end);
    tree.nodes[size_t(node_id)].right = r;
    return node_id;
  }
};

}  // namespace detail

class Forest {
 public:
  // Binary labels (0/1). Trees draw a plain bootstrap (each draw uniform over
  // rows, so the expected class mix equals the training mix), then split on
  // max_features randomly ordered candidates per node, grown to purity.
  // Tree t is seeded with cfg.seed + t, making every tree reproducible alone.
  static Forest train(const Matrix& X, const std::vector<int>& y,
                      std::vector<std::string> names, const ForestConfig& cfg) {
    if (X.size() != y.size()) throw std::invalid_argument("train: rows/labels mismatch");
    if (X.empty()) throw std::invalid_argument("train: empty training set");
    const int d = int(names.size());
    for (auto* row : X)
      if (int(row->size()) != d)
        throw std::invalid_argument("train: row width does not match schema");
    for (int label : y)
      if (label != 0 && label != 1)
        throw std::invalid_argument("train: labels must be 0 or 1");
    if (cfg.n_trees <= 0) throw std::invalid_argument("train: n_trees must be positive");

    Forest f;
    f.cfg_ = cfg;
    f.names_ = std::move(names);
    f.importance_.assign(size_t(d), 0.0);
    const int n = int(X.size());
    const int mf = cfg.max_features > 0
                       ? std::min(cfg.max_features, d)
                       : std::max(1, int(std::floor(std::sqrt(double(d)))));

    std::vector<int> oob_pos(size_t(n), 0), oob_votes(size_t(n), 0);
    std::vector<char> in_bag(static_cast<size_t>(n), char(0));
    f.trees_.reserve(size_t(cfg.n_trees));
    for (int t = 0; t < cfg.n_trees; ++t) {
      detail::Builder b{X, y, d, mf, std::max(1, cfg.min_leaf),
                        Rng(cfg.seed + uint64_t(t)), n};
      b.samples.resize(size_t(n));
      std::fill(in_bag.begin(), in_bag.end(), char(0));
      for (int i = 0; i < n; ++i) {
        const int row = b.rng.below_int(n);
        b.samples[size_t(i)] = row;
        in_bag[size_t(row)] = 1;
      }
      b.feat_order.resize(size_t(d));
      for (int i = 0; i < d; ++i) b.feat_order[size_t(i)] = i;
      b.importance = &f.importance_;
      b.build_node(0, n);
      for (int i = 0; i < n; ++i)
        if (!in_bag[size_t(i)]) {
          ++oob_votes[size_t(i)];
          oob_pos[size_t(i)] += b.tree.predict(*X[size_t(i)]);
        }
      f.trees_.push_back(std::move(b.tree));
    }

    int oob_n = 0, oob_wrong = 0;
    for (int i = 0; i < n; ++i) {
      if (oob_votes[size_t(i)] == 0) continue;
      ++oob_n;
      const int pred = 2 * oob_pos[size_t(i)] > oob_votes[size_t(i)] ? 1 : 0;
      if (pred != y[size_t(i)]) ++oob_wrong;
    }
    f.oob_error_ = oob_n > 0 ? double(oob_wrong) / double(oob_n)
                             : std::numeric_limits<double>::quiet_NaN();

    double total = 0;
    for (double v : f.importance_) total += v;
    if (total > 0)
      for (double& v : f.importance_) v /= total;
    return f;
  }

  static Forest train(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                      std::vector<std::string> names, const ForestConfig& cfg) {
    Matrix ptrs;
    ptrs.reserve(X.size());
    for (auto& row : X) ptrs.push_back(&row);
    return train(ptrs, y, std::move(names), cfg);
  }

  // Fraction of trees voting positive; granularity is 1/n_trees.
  double score(std::span<const double> row) const {
    if (row.size() != names_.size())
      throw std::invalid_argument("feature schema mismatch: scoring " +
                                  std::to_string(row.size()) + " features against a " +
                                  std::to_string(names_.size()) + "-feature forest");
    int votes = 0;
    for (auto& t : trees_) votes += t.predict(row);
    return double(votes) / double(trees_.size());
  }

  bool decide(std::span<const double> row) const {
    if (!theta_) throw std::logic_error("decide: threshold not set");
    return score(row) >= *theta_;
  }

  void set_theta(double theta) { theta_ = theta; }
  std::optional<double> theta() const { return theta_; }

  const std::vector<std::string>& feature_names() const { return names_; }
  const std::vector<double>& importances() const { return importance_; }
  double oob_error() const { return oob_error_; }
  const std::vector<Tree>& trees() const { return trees_; }
  const ForestConfig& config() const { return cfg_; }

  void check_schema(const std::vector<std::string>& names) const {
    if (names != names_)
      throw std::invalid_argument("feature schema mismatch: names differ from training schema");
  }

  // Feature indices ordered by importance (descending, index breaks ties).
  std::vector<int> ranked_features() const {
    std::vector<int> order(importance_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return importance_[size_t(a)] > importance_[size_t(b)];
    });
    return order;
  }

  void save(const std::filesystem::path& file) const {
    std::ostringstream out;
    out << "forest v1\n";
    out << "config trees=" << trees_.size() << " max_features=" << cfg_.max_features
        << " min_leaf=" << cfg_.min_leaf << " seed=" << cfg_.seed << "\n";
    out << "features " << names_.size() << "\n";
    out << "theta " << (theta_ ? fmt_g(*theta_, 17) : "none") << "\n";
    out << "oob " << fmt_g(oob_error_, 17) << "\n";
    out << "names";
    for (auto& n : names_) out << " " << n;
    out << "\nimportance";
    for (double v : importance_) out << " " << fmt_g(v, 17);
    out << "\n";
    for (size_t t = 0; t < trees_.size(); ++t) {
      out << "tree " << t << " " << trees_[t].nodes.size() << "\n";
      for (auto& nd : trees_[t].nodes) {
        if (nd.feature < 0)
          out << "l " << nd.label << "\n";
        else
          out << "s " << nd.feature << " " << fmt_g(nd.threshold, 17) << " " << nd.left
              << " " << nd.right << "\n";
      }
    }
    write_text_file(file, out.str());
  }

  static Forest load(const std::filesystem::path& file) {
    std::istringstream in(read_text_file(file));
    std::string line;
    auto next_line = [&](const char* what) {
      if (!std::getline(in, line))
        throw std::runtime_error(file.string() + ": truncated before " + what);
      return line;
    };
    if (next_line("header") != "forest v1")
      throw std::runtime_error(file.string() + ": not a v1 forest file");

    Forest f;
    {
      std::istringstream cfg(next_line("config"));
      std::string word, kv;
      cfg >> word;
      int trees = 0;
      while (cfg >> kv) {
        const auto eq = kv.find('=');
        const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "trees") trees = std::stoi(val);
        if (key == "max_features") f.cfg_.max_features = std::stoi(val);
        if (key == "min_leaf") f.cfg_.min_leaf = std::stoi(val);
        if (key == "seed") f.cfg_.seed = std::stoull(val);
      }
      f.cfg_.n_trees = trees;
    }
    size_t n_features = 0;
    {
      std::istringstream hs(next_line("features"));
      std::string word;
      hs >> word >> n_features;
    }
    {
      std::istringstream hs(next_line("theta"));
      std::string word, val;
      hs >> word >> val;
      double theta;
      if (val != "none" && parse_double(val, theta)) f.theta_ = theta;
    }
    {
      std::istringstream hs(next_line("oob"));
      std::string word, val;
      hs >> word >> val;
      parse_double(val, f.oob_error_);  // "nan" round-trips via from_chars
    }
    {
      std::istringstream hs(next_line("names"));
      std::string word;
      hs >> word;
      std::string n;
      while (hs >> n) f.names_.push_back(n);
      if (f.names_.size() != n_features)
        throw std::runtime_error(file.string() + ": name count disagrees with header");
    }
    {
      std::istringstream hs(next_line("importance"));
      std::string word;
      hs >> word;
      double v;
      while (hs >> v) f.importance_.push_back(v);
      if (f.importance_.size() != n_features)
        throw std::runtime_error(file.string() + ": importance count disagrees with header");
    }
    for (int t = 0; t < f.cfg_.n_trees; ++t) {
      std::istringstream hs(next_line("tree header"));
      std::string word;
      size_t idx = 0, count = 0;
      hs >> word >> idx >> count;
      if (word != "tree" || idx != size_t(t))
        throw std::runtime_error(file.string() + ": bad tree header");
      Tree tree;
      tree.nodes.reserve(count);
      for (size_t k = 0; k < count; ++k) {
        std::istringstream ns(next_line("tree node"));
        std::string tag;
        ns >> tag;
        TreeNode nd;
        if (tag == "l") {
          ns >> nd.label;
        } else if (tag == "s") {
          ns >> nd.feature >> nd.threshold >> nd.left >> nd.right;
        } else {
          throw std::runtime_error(file.string() + ": bad node line");
        }
        if (!ns) throw std::runtime_error(file.string() + ": bad node line");
        tree.nodes.push_back(nd);
      }
      f.trees_.push_back(std::move(tree));
    }
    return f;
  }

 private:
  ForestConfig cfg_;
  std::vector<Tree> trees_;
  std::vector<std::string> names_;
  std::vector<double> importance_;
  std::optional<double> theta_;
  double oob_error_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace gestauth::forest
