#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "trolldetect/models/tree.hpp"

namespace trolldetect {

struct AdaBoostOptions {
  int rounds = 50;
  int base_depth = 2;
  std::uint64_t seed = 7;
};

struct BoostStage {
  TreeModel tree;
  double alpha = 0.0;
  double weighted_error = 0.0;
};

/// Discrete two-class AdaBoost. Each stage votes h(x) = +1 when its tree's
/// leaf frequency is >= 0.5, else -1; F(x) = sum alpha_t h_t(x) and the
/// reported probability is 1 / (1 + exp(-2 F)).
struct BoostedModel {
  std::vector<BoostStage> stages;
  int rounds = 50;
  int base_depth = 2;

  std::vector<double> decision(const SparseRows& X) const {
    std::vector<double> f(static_cast<std::size_t>(X.rows()), 0.0);
    for (const auto& s : stages) {
      for (Eigen::Index r = 0; r < X.rows(); ++r) {
        f[static_cast<std::size_t>(r)] += s.alpha * (s.tree.leaf_for(X, r).prob_positive >= 0.5 ? 1.0 : -1.0);
      }
    }
    return f;
  }

  std::vector<double> predict_proba(const SparseRows& X) const {
    auto f = decision(X);
    for (auto& v : f) v = sigmoid(2.0 * v);
    return f;
  }

  json to_json() const {
    json st = json::array();
    for (const auto& s : stages) st.push_back({{"alpha", s.alpha}, {"weighted_error", s.weighted_error}, {"tree", s.tree.to_json()}});
    return json{{"rounds", rounds}, {"base_depth", base_depth}, {"stages", st}};
  }

  static BoostedModel from_json(const json& j) {
    BoostedModel m;
    m.rounds = j.at("rounds").get<int>();
    m.base_depth = j.at("base_depth").get<int>();
    for (const auto& s : j.at("stages")) {
      m.stages.push_back({TreeModel::from_json(s.at("tree")), s.at("alpha").get<double>(), s.at("weighted_error").get<double>()});
    }
    if (m.stages.empty()) throw ValidationError("boosted model: no stages");
    return m;
  }
};

/// Stage weight for weighted error eps.
inline double stage_alpha(double eps) { return 0.5 * std::log((1.0 - eps) / eps); }

/// Stops early when a stage reaches zero weighted error (kept, with eps
/// clamped to 1e-10) or weighted error >= 0.5 (dropped, unless it is the
/// first stage, which is kept with alpha 0).
inline BoostedModel train_adaboost(const SparseRows& X, std::span<const int> y, const AdaBoostOptions& opt = {}) {
  detail::check_training_input(X, y, "train_adaboost");
  if (opt.rounds <= 0) throw ValidationError("train_adaboost: rounds must be positive");
  BoostedModel model;
  model.rounds = opt.rounds;
  model.base_depth = opt.base_depth;
  const std::size_t n = y.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> h(n);
  for (int round = 0; round < opt.rounds; ++round) {
    TreeModel tree = train_tree(X, y, TreeOptions{opt.base_depth, opt.seed}, w);
    double eps = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = tree.leaf_for(X, static_cast<Eigen::Index>(i)).prob_positive >= 0.5 ? 1.0 : -1.0;
      const double yi = y[i] == 1 ? 1.0 : -1.0;
      if (h[i] != yi) eps += w[i];
    }
    if (eps >= 0.5) {
      if (model.stages.empty()) model.stages.push_back({std::move(tree), 0.0, eps});
      break;
    }
    constexpr double kMinError = 1e-10;
    const bool perfect = eps <= kMinError;
    const double alpha = stage_alpha(std::max(eps, kMinError));
    model.stages.push_back({std::move(tree), alpha, eps});
    if (perfect) break;
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double yi = y[i] == 1 ? 1.0 : -1.0;
      w[i] *= std::exp(-alpha * yi * h[i]);
      z += w[i];
    }
    for (auto& wi : w) wi /= z;
  }
  return model;
}

}  // namespace trolldetect
