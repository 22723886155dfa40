#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "trolldetect/util/artifact.hpp"
#include "trolldetect/util/error.hpp"

namespace trolldetect {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;

/// Column z-scoring with training statistics (population variance).
/// Constant columns keep scale 1, so they standardize to exactly 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const SparseRows& X) {
    const auto n = static_cast<double>(X.rows());
    const auto d = static_cast<std::size_t>(X.cols());
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    std::vector<double> ss(d, 0.0);
    std::vector<std::size_t> nnz(d, 0);
    for (Eigen::Index r = 0; r < X.outerSize(); ++r)
      for (SparseRows::InnerIterator it(X, r); it; ++it) s.mean[static_cast<std::size_t>(it.col())] += it.value();
    for (auto& m : s.mean) m /= n;
    for (Eigen::Index r = 0; r < X.outerSize(); ++r) {
      for (SparseRows::InnerIterator it(X, r); it; ++it) {
        const auto c = static_cast<std::size_t>(it.col());
        const double dv = it.value() - s.mean[c];
        ss[c] += dv * dv;
        ++nnz[c];
      }
    }
    for (std::size_t c = 0; c < d; ++c) {
      ss[c] += static_cast<double>(X.rows() - static_cast<Eigen::Index>(nnz[c])) * s.mean[c] * s.mean[c];
      const double sd = std::sqrt(ss[c] / n);
      if (sd > 1e-12 * std::max(1.0, std::abs(s.mean[c]))) s.scale[c] = sd;
    }
    return s;
  }

  json to_json() const { return json{{"mean", mean}, {"scale", scale}}; }
  static Standardizer from_json(const json& j) {
    return {j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>()};
  }
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

/// L2-regularized negative log-likelihood over standardized features:
///   sum_i softplus(z_i) - y_i z_i + (l2/2) |w|^2,   z = Xs w + b,
/// with Xs = (X - mean) / scale applied implicitly so X stays sparse.
/// Parameters are packed as [w_0 .. w_{d-1}, b]; the bias is unpenalized.
class LogisticObjective {
 public:
  LogisticObjective(const SparseRows& X, std::span<const int> y, const Standardizer& st, double l2)
      : X_(X), y_(y.size()), l2_(l2) {
    for (std::size_t i = 0; i < y.size(); ++i) y_[static_cast<Eigen::Index>(i)] = y[i];
    mean_ = Eigen::Map<const Eigen::VectorXd>(st.mean.data(), static_cast<Eigen::Index>(st.mean.size()));
    inv_scale_ = Eigen::Map<const Eigen::VectorXd>(st.scale.data(), static_cast<Eigen::Index>(st.scale.size())).cwiseInverse();
  }

  Eigen::Index dim() const { return X_.cols() + 1; }

  Eigen::VectorXd margins(const Eigen::VectorXd& theta) const {
    const auto d = X_.cols();
    const Eigen::VectorXd v = theta.head(d).cwiseProduct(inv_scale_);
    const double offset = theta[d] - mean_.dot(v);
    Eigen::VectorXd z = X_ * v;
    z.array() += offset;
    return z;
  }

  double value(const Eigen::VectorXd& theta) const {
    const Eigen::VectorXd z = margins(theta);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) loss += softplus(z[i]) - y_[i] * z[i];
    return loss + 0.5 * l2_ * theta.head(X_.cols()).squaredNorm();
  }

  double value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
    const auto d = X_.cols();
    const Eigen::VectorXd z = margins(theta);
    Eigen::VectorXd r(z.size());
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      loss += softplus(z[i]) - y_[i] * z[i];
      r[i] = sigmoid(z[i]) - y_[i];
    }
    const double rsum = r.sum();
    grad.resize(d + 1);
    grad.head(d) = (X_.transpose() * r - mean_ * rsum).cwiseProduct(inv_scale_) + l2_ * theta.head(d);
    grad[d] = rsum;
    return loss + 0.5 * l2_ * theta.head(d).squaredNorm();
  }

 private:
  const SparseRows& X_;
  Eigen::VectorXd y_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd inv_scale_;
  double l2_;
};

struct LogisticOptions {
  double l2 = 1.0;
  double tol = 1e-4;
  int max_iter = 500;
  std::uint64_t seed = 7;
};

struct LogisticModel {
  std::vector<double> weights;  // standardized space
  double bias = 0.0;
  double l2 = 1.0;
  Standardizer standardizer;
  std::uint64_t seed = 0;
  int iterations = 0;
  double final_loss = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
  std::vector<double> loss_history;  // objective after every accepted step, starting at the initial point

  std::vector<double> predict_proba(const SparseRows& X) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(weights.size()));
    double offset = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) {
      v[static_cast<Eigen::Index>(j)] = weights[j] / standardizer.scale[j];
      offset -= standardizer.mean[j] * v[static_cast<Eigen::Index>(j)];
    }
    const Eigen::VectorXd z = X * v;
    std::vector<double> p(static_cast<std::size_t>(z.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i) p[static_cast<std::size_t>(i)] = sigmoid(z[i] + offset);
    return p;
  }

  json to_json() const {
    return json{{"weights", weights},       {"bias", bias},
                {"l2", l2},                 {"standardization", standardizer.to_json()},
                {"seed", seed},             {"iterations", iterations},
                {"final_loss", final_loss}, {"gradient_norm", gradient_norm},
                {"converged", converged}};
  }

  static LogisticModel from_json(const json& j) {
    LogisticModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.l2 = j.at("l2").get<double>();
    m.standardizer = Standardizer::from_json(j.at("standardization"));
    m.seed = j.at("seed").get<std::uint64_t>();
    m.iterations = j.at("iterations").get<int>();
    m.final_loss = j.at("final_loss").get<double>();
    m.gradient_norm = j.at("gradient_norm").get<double>();
    m.converged = j.at("converged").get<bool>();
    if (m.standardizer.mean.size() != m.weights.size() || m.standardizer.scale.size() != m.weights.size()) {
      throw ValidationError("logistic model: standardization size does not match weights");
    }
    return m;
  }
};

namespace detail {

inline void check_training_input(const SparseRows& X, std::span<const int> y, const char* who) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ValidationError(std::string(who) + ": rows and labels differ in length");
  bool pos = false, neg = false;
  for (int v : y) {
    if (v != 0 && v != 1) throw ValidationError(std::string(who) + ": labels must be 0 or 1");
    (v == 1 ? pos : neg) = true;
  }
  if (!pos || !neg) throw ValidationError(std::string(who) + ": training data must contain both classes");
  for (Eigen::Index k = 0; k < X.nonZeros(); ++k) {
    if (!std::isfinite(X.valuePtr()[k])) throw ValidationError(std::string(who) + ": non-finite feature value");
  }
}

}  // namespace detail

/// Full-batch gradient descent with Armijo backtracking. Trial steps come
/// from the Barzilai-Borwein estimate of the previous iteration; every
/// accepted step strictly lowers the objective. Stops when |grad| <= tol or
/// after max_iter steps. Deterministic: the seed is recorded, not used.
inline LogisticModel train_logistic(const SparseRows& X, std::span<const int> y, const LogisticOptions& opt = {}) {
  detail::check_training_input(X, y, "train_logistic");
  if (!(opt.l2 >= 0.0)) throw ValidationError("train_logistic: l2 must be >= 0");
  LogisticModel model;
  model.l2 = opt.l2;
  model.seed = opt.seed;
  model.standardizer = Standardizer::fit(X);
  const LogisticObjective f(X, y, model.standardizer, opt.l2);
  const auto d = X.cols();

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  const double npos = static_cast<double>(std::count(y.begin(), y.end(), 1));
  theta[d] = std::log(npos / (static_cast<double>(y.size()) - npos));

  Eigen::VectorXd grad;
  double loss = f.value_and_gradient(theta, grad);
  model.loss_history.push_back(loss);
  double step = 1.0 / (0.25 * static_cast<double>(X.rows()) * static_cast<double>(d + 1) + opt.l2);
  constexpr double kArmijo = 1e-4;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    const double gsq = grad.squaredNorm();
    if (std::sqrt(gsq) <= opt.tol) {
      model.converged = true;
      break;
    }
    double t = step;
    Eigen::VectorXd next;
    double next_loss = 0.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 80; ++halvings) {
      next = theta - t * grad;
      next_loss = f.value(next);
      if (next_loss <= loss - kArmijo * t * gsq) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no representable descent step left
    Eigen::VectorXd next_grad;
    next_loss = f.value_and_gradient(next, next_grad);
    const Eigen::VectorXd s = next - theta;
    const double sy = s.dot(next_grad - grad);
    step = sy > 0 ? s.squaredNorm() / sy : 2.0 * t;
    theta = std::move(next);
    grad = std::move(next_grad);
    loss = next_loss;
    model.loss_history.push_back(loss);
  }
  if (!model.converged && grad.norm() <= opt.tol) model.converged = true;
  model.iterations = it;
  model.final_loss = loss;
  model.gradient_norm = grad.norm();
  model.weights.assign(theta.data(), theta.data() + d);
  model.bias = theta[d];
  return model;
}

}  // namespace trolldetect
