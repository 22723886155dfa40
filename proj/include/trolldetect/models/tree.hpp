#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "trolldetect/models/logistic.hpp"
#include "trolldetect/util/artifact.hpp"
#include "trolldetect/util/error.hpp"

namespace trolldetect {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double prob_positive = 0.0;  // weighted class frequency at this node
  int depth = 0;
};

struct TreeOptions {
  int max_depth = 10;
  std::uint64_t seed = 7;
};

/// Value of column `col` in row `row` of a row-major sparse matrix.
inline double sparse_at(const SparseRows& X, Eigen::Index row, Eigen::Index col) {
  const auto begin = X.outerIndexPtr()[row];
  const auto end = X.outerIndexPtr()[row + 1];
  const auto* idx = X.innerIndexPtr();
  const auto* hit = std::lower_bound(idx + begin, idx + end, static_cast<std::int64_t>(col));
  if (hit != idx + end && *hit == col) return X.valuePtr()[hit - idx];
  return 0.0;
}

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int max_depth = 10;

  int depth() const {
    int d = 0;
    for (const auto& n : nodes) d = std::max(d, n.depth);
    return d;
  }

  const TreeNode& leaf_for(const SparseRows& X, Eigen::Index row) const {
    const TreeNode* n = &nodes.at(0);
    while (n->feature >= 0) {
      n = &nodes[static_cast<std::size_t>(sparse_at(X, row, n->feature) <= n->threshold ? n->left : n->right)];
    }
    return *n;
  }

  std::vector<double> predict_proba(const SparseRows& X) const {
    std::vector<double> p(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index r = 0; r < X.rows(); ++r) p[static_cast<std::size_t>(r)] = leaf_for(X, r).prob_positive;
    return p;
  }

  json to_json() const {
    json ns = json::array();
    for (const auto& n : nodes) ns.push_back({n.feature, n.threshold, n.left, n.right, n.prob_positive, n.depth});
    return json{{"max_depth", max_depth}, {"nodes", ns}};
  }

  static TreeModel from_json(const json& j) {
    TreeModel t;
    t.max_depth = j.at("max_depth").get<int>();
    for (const auto& n : j.at("nodes")) {
      t.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                         n.at(4).get<double>(), n.at(5).get<int>()});
    }
    const int count = static_cast<int>(t.nodes.size());
    if (count == 0) throw ValidationError("tree model: no nodes");
    for (const auto& n : t.nodes) {
      if (n.feature >= 0 && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count)) {
        throw ValidationError("tree model: child index out of range");
      }
    }
    return t;
  }
};

inline double gini(double w0, double w1) {
  const double w = w0 + w1;
  if (w <= 0) return 0.0;
  return 1.0 - (w0 * w0 + w1 * w1) / (w * w);
}

/// Midpoint split value between two consecutive distinct values, nudged
/// down when rounding would send `hi` to the left side.
inline double split_threshold(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

/// Gain comparisons treat differences under this as ties; ties go to the
/// lowest column, then the lowest threshold.
inline constexpr double kGainTolerance = 1e-12;

namespace detail {

using SparseCols = Eigen::SparseMatrix<double, Eigen::ColMajor, std::int64_t>;

class TreeBuilder {
 public:
  TreeBuilder(const SparseRows& X, std::span<const int> y, std::span<const double> w, int max_depth)
      : Xc_(X), y_(y), w_(w), max_depth_(max_depth), in_node_(static_cast<std::size_t>(X.rows()), 0) {}

  TreeModel build() {
    TreeModel t;
    t.max_depth = max_depth_;
    std::vector<int> all(y_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    grow(t, all, 0);
    return t;
  }

  /// Best Gini split over all columns for the given samples.
  SplitChoice best_split(const std::vector<int>& samples) {
    double tot0 = 0, tot1 = 0;
    for (int i : samples) {
      in_node_[static_cast<std::size_t>(i)] = 1;
      (y_[static_cast<std::size_t>(i)] == 1 ? tot1 : tot0) += w_[static_cast<std::size_t>(i)];
    }
    const double total = tot0 + tot1;
    const double parent = gini(tot0, tot1);
    SplitChoice best;
    struct Item {
      double value;
      double w0;
      double w1;
    };
    std::vector<Item> items;
    for (Eigen::Index c = 0; c < Xc_.cols(); ++c) {
      items.clear();
      std::size_t nz_count = 0;
      for (SparseCols::InnerIterator it(Xc_, c); it; ++it) {
        const auto r = static_cast<std::size_t>(it.row());
        if (!in_node_[r]) continue;
        const double wi = w_[r];
        const bool pos = y_[r] == 1;
        items.push_back({it.value(), pos ? 0.0 : wi, pos ? wi : 0.0});
        ++nz_count;
      }
      if (nz_count < samples.size()) {
        double z0 = tot0, z1 = tot1;
        if (nz_count > 0) zero_bucket(c, samples, z0, z1);
        items.push_back({0.0, z0, z1});
      }
      std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.value < b.value; });
      double l0 = 0, l1 = 0;
      for (std::size_t k = 0; k + 1 < items.size(); ++k) {
        l0 += items[k].w0;
        l1 += items[k].w1;
        if (items[k + 1].value == items[k].value) continue;
        const double r0 = tot0 - l0, r1 = tot1 - l1;
        const double child = ((l0 + l1) * gini(l0, l1) + (r0 + r1) * gini(r0, r1)) / total;
        const double gain = parent - child;
        if (gain > best.gain + kGainTolerance) {
          best = {static_cast<int>(c), split_threshold(items[k].value, items[k + 1].value), gain};
        }
      }
    }
    for (int i : samples) in_node_[static_cast<std::size_t>(i)] = 0;
    return best;
  }

 private:
  // Class weights of the node's implicit zeros in column c, summed directly
  // rather than as (total - nonzeros) to avoid cancellation.
  void zero_bucket(Eigen::Index c, const std::vector<int>& samples, double& z0, double& z1) {
    z0 = 0;
    z1 = 0;
    mark_.resize(in_node_.size(), 0);
    for (SparseCols::InnerIterator it(Xc_, c); it; ++it) mark_[static_cast<std::size_t>(it.row())] = 1;
    for (int i : samples) {
      const auto r = static_cast<std::size_t>(i);
      if (mark_[r]) continue;
      (y_[r] == 1 ? z1 : z0) += w_[r];
    }
    for (SparseCols::InnerIterator it(Xc_, c); it; ++it) mark_[static_cast<std::size_t>(it.row())] = 0;
  }

  int grow(TreeModel& t, const std::vector<int>& samples, int depth) {
    double w0 = 0, w1 = 0;
    for (int i : samples) (y_[static_cast<std::size_t>(i)] == 1 ? w1 : w0) += w_[static_cast<std::size_t>(i)];
    const int id = static_cast<int>(t.nodes.size());
    TreeNode node;
    node.depth = depth;
    node.prob_positive = w0 + w1 > 0 ? w1 / (w0 + w1) : 0.0;
    t.nodes.push_back(node);
    if (depth >= max_depth_ || samples.size() < 2 || w0 == 0 || w1 == 0) return id;
    const SplitChoice s = best_split(samples);
    if (s.feature < 0) return id;
    std::vector<int> left, right;
    for (int i : samples) {
      const double v = sparse_at_col(s.feature, i);
      (v <= s.threshold ? left : right).push_back(i);
    }
    t.nodes[static_cast<std::size_t>(id)].feature = s.feature;
    t.nodes[static_cast<std::size_t>(id)].threshold = s.threshold;
    const int l = grow(t, left, depth + 1);
    const int r = grow(t, right, depth + 1);
    t.nodes[static_cast<std::size_t>(id)].left = l;
    t.nodes[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  double sparse_at_col(int col, int row) const {
    const auto begin = Xc_.outerIndexPtr()[col];
    const auto end = Xc_.outerIndexPtr()[col + 1];
    const auto* idx = Xc_.innerIndexPtr();
    const auto* hit = std::lower_bound(idx + begin, idx + end, static_cast<std::int64_t>(row));
    if (hit != idx + end && *hit == row) return Xc_.valuePtr()[hit - idx];
    return 0.0;
  }

  SparseCols Xc_;
  std::span<const int> y_;
  std::span<const double> w_;
  int max_depth_;
  std::vector<char> in_node_;
  std::vector<char> mark_;
};

}  // namespace detail

/// Greedy CART with Gini impurity. A node becomes a leaf at max_depth, when
/// pure, with fewer than 2 samples, or when no split has positive gain.
/// Leaves predict the (weighted) positive-class frequency.
inline TreeModel train_tree(const SparseRows& X, std::span<const int> y, const TreeOptions& opt = {},
                            std::span<const double> weights = {}) {
  detail::check_training_input(X, y, "train_tree");
  if (opt.max_depth < 0) throw ValidationError("train_tree: max_depth must be >= 0");
  std::vector<double> uniform;
  if (weights.empty()) {
    uniform.assign(y.size(), 1.0);
    weights = uniform;
  } else if (weights.size() != y.size()) {
    throw ValidationError("train_tree: weights and labels differ in length");
  }
  return detail::TreeBuilder(X, y, weights, opt.max_depth).build();
}

/// Root split the tree builder would choose (exposed for verification).
inline SplitChoice best_root_split(const SparseRows& X, std::span<const int> y) {
  std::vector<double> w(y.size(), 1.0);
  std::vector<int> all(y.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return detail::TreeBuilder(X, y, w, 1).best_split(all);
}

}  // namespace trolldetect
