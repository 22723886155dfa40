#pragma once

#include <algorithm>
#include <functional>
#include <future>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "trolldetect/models/metrics.hpp"
#include "trolldetect/models/model.hpp"
#include "trolldetect/util/rng.hpp"

namespace trolldetect {

using Scorer = std::function<std::vector<double>(const SparseRows&)>;
using Trainer = std::function<Scorer(const SparseRows&, std::span<const int>)>;

inline Trainer make_trainer(const ModelSpec& spec) {
  return [spec](const SparseRows& X, std::span<const int> y) -> Scorer {
    auto model = std::make_shared<TrainedModel>(train_model(X, y, spec));
    return [model](const SparseRows& Xt) { return model->predict_proba(Xt); };
  };
}

/// Stratified fold assignment. Each class is shuffled with the "cv-folds"
/// stream of `seed` and dealt round-robin; the negative class continues the
/// deal where the positives stopped so fold sizes differ by at most one.
inline std::vector<int> stratified_folds(std::span<const int> y, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("cross-validation needs k >= 2");
  std::vector<int> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(static_cast<int>(i));
  if (pos.size() < k || neg.size() < k) {
    throw ValidationError(fmt::format("cross-validation: each class needs >= {} members (have {} positive, {} negative)",
                                      k, pos.size(), neg.size()));
  }
  Rng rng(derive_seed(seed, "cv-folds"));
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<int> fold(y.size(), -1);
  for (std::size_t i = 0; i < pos.size(); ++i) fold[static_cast<std::size_t>(pos[i])] = static_cast<int>(i % k);
  const std::size_t offset = pos.size() % k;
  for (std::size_t i = 0; i < neg.size(); ++i) fold[static_cast<std::size_t>(neg[i])] = static_cast<int>((offset + i) % k);
  return fold;
}

struct CvOptions {
  std::size_t k = 10;
  std::uint64_t seed = 7;
  std::optional<Family> family;  // nullopt = all features
  double threshold = 0.5;
  unsigned workers = 1;
};

struct CvReport {
  std::string model;
  std::string family;
  std::uint64_t seed = 0;
  std::size_t k = 0;
  std::vector<Metrics> folds;
  Metrics mean;
  std::vector<int> fold_of;

  std::string to_csv() const {
    std::string out = "fold,model,family,precision,recall,f1,auc,accuracy\n";
    auto row = [&](const std::string& name, const Metrics& m) {
      out += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", name, model, family, m.precision, m.recall, m.f1,
                         m.auc, m.accuracy);
    };
    for (std::size_t i = 0; i < folds.size(); ++i) row(std::to_string(i), folds[i]);
    row("mean", mean);
    return out;
  }
};

namespace detail {

/// Row/column subset of a sparse matrix. `col_map[c]` is the new index of
/// column c or -1 to drop it.
inline SparseRows select(const SparseRows& X, const std::vector<int>& rows, const std::vector<std::int64_t>& col_map,
                         std::int64_t new_cols) {
  std::vector<Eigen::Triplet<double, std::int64_t>> trip;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (SparseRows::InnerIterator it(X, rows[r]); it; ++it) {
      const auto c = col_map[static_cast<std::size_t>(it.col())];
      if (c >= 0) trip.emplace_back(static_cast<std::int64_t>(r), c, it.value());
    }
  }
  SparseRows out(static_cast<Eigen::Index>(rows.size()), new_cols);
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

/// Columns used when training on `train_rows`: the requested family (or
/// everything), with the bag-of-words block re-selected from the training
/// rows only: the top |V| columns by training-fold count, zero-count columns
/// excluded.
inline std::vector<std::int64_t> fold_columns(const LabeledMatrix& m, const std::vector<int>& train_rows,
                                              std::optional<Family> family, std::int64_t& new_cols) {
  const auto d = static_cast<std::size_t>(m.X.cols());
  std::vector<char> keep(d, 0);
  if (family) {
    auto [b, e] = m.schema.range(*family);
    std::fill(keep.begin() + static_cast<std::ptrdiff_t>(b), keep.begin() + static_cast<std::ptrdiff_t>(e), 1);
  } else {
    std::fill(keep.begin(), keep.end(), 1);
  }
  auto [bow_begin, bow_end] = m.schema.range(Family::kBow);
  if (!family || *family == Family::kBow) {
    std::vector<double> counts(bow_end - bow_begin, 0.0);
    for (int r : train_rows) {
      for (SparseRows::InnerIterator it(m.X, r); it; ++it) {
        const auto c = static_cast<std::size_t>(it.col());
        if (c >= bow_begin && c < bow_end) counts[c - bow_begin] += it.value();
      }
    }
    std::vector<std::size_t> order(counts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
    for (std::size_t i = 0; i < order.size(); ++i) {
      keep[bow_begin + order[i]] = (i < m.schema.vocabulary.size() && counts[order[i]] > 0) ? 1 : 0;
    }
  }
  std::vector<std::int64_t> map(d, -1);
  new_cols = 0;
  for (std::size_t c = 0; c < d; ++c)
    if (keep[c]) map[c] = new_cols++;
  return map;
}

}  // namespace detail

/// Stratified k-fold cross-validation. Every fold trains on the other k-1
/// folds; feature selection and standardization only see training rows.
/// Folds may run on `workers` threads; results are identical either way.
inline CvReport cross_validate(const LabeledMatrix& data, const Trainer& trainer, const CvOptions& opt,
                               std::string model_name) {
  const LabeledMatrix m = labeled_subset(data);
  const auto y = binary_labels(m.labels);
  CvReport rep;
  rep.model = std::move(model_name);
  rep.family = opt.family ? std::string(to_string(*opt.family)) : "all";
  rep.seed = opt.seed;
  rep.k = opt.k;
  rep.fold_of = stratified_folds(y, opt.k, opt.seed);
  rep.folds.resize(opt.k);

  auto run_fold = [&](std::size_t f) {
    std::vector<int> train_rows, test_rows;
    for (std::size_t i = 0; i < y.size(); ++i) {
      (rep.fold_of[i] == static_cast<int>(f) ? test_rows : train_rows).push_back(static_cast<int>(i));
    }
    std::int64_t cols = 0;
    const auto map = detail::fold_columns(m, train_rows, opt.family, cols);
    const SparseRows Xtr = detail::select(m.X, train_rows, map, cols);
    const SparseRows Xte = detail::select(m.X, test_rows, map, cols);
    std::vector<int> ytr, yte;
    for (int r : train_rows) ytr.push_back(y[static_cast<std::size_t>(r)]);
    for (int r : test_rows) yte.push_back(y[static_cast<std::size_t>(r)]);
    const Scorer scorer = trainer(Xtr, ytr);
    const auto probs = scorer(Xte);
    rep.folds[f] = evaluate(probs, yte, opt.threshold);
  };

  const unsigned workers = std::max(1u, opt.workers);
  if (workers == 1) {
    for (std::size_t f = 0; f < opt.k; ++f) run_fold(f);
  } else {
    for (std::size_t start = 0; start < opt.k; start += workers) {
      std::vector<std::future<void>> jobs;
      for (std::size_t f = start; f < std::min(opt.k, start + workers); ++f) jobs.push_back(std::async(std::launch::async, run_fold, f));
      for (auto& j : jobs) j.get();
    }
  }
  rep.mean = mean_metrics(rep.folds);
  return rep;
}

inline CvReport cross_validate(const LabeledMatrix& data, const ModelSpec& spec, const CvOptions& opt) {
  return cross_validate(data, make_trainer(spec), opt, std::string(to_string(spec.kind)));
}

}  // namespace trolldetect
