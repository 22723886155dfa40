#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <fmt/format.h>

#include "trolldetect/util/error.hpp"

namespace trolldetect {

/// Rank-based AUC (Mann-Whitney U / (n+ n-)); tied scores share their
/// average rank, so a positive/negative tie counts one half.
inline double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ValidationError("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t npos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        pos_rank_sum += avg_rank;
        ++npos;
      }
    }
    i = j;
  }
  const std::size_t nneg = n - npos;
  if (npos == 0 || nneg == 0) throw ValidationError("auc: both classes must be present");
  const double p = static_cast<double>(npos);
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(nneg));
}

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;  // NaN when only one class is present
  double accuracy = 0.0;
};

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

/// Precision is 0 when nothing is predicted positive; recall is 0 when there
/// are no positives; f1 is 0 when precision + recall is 0.
inline Metrics metrics_from_confusion(const Confusion& c) {
  Metrics m;
  const auto tp = static_cast<double>(c.tp);
  m.precision = c.tp + c.fp > 0 ? tp / static_cast<double>(c.tp + c.fp) : 0.0;
  m.recall = c.tp + c.fn > 0 ? tp / static_cast<double>(c.tp + c.fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  const auto total = c.tp + c.fp + c.tn + c.fn;
  m.accuracy = total > 0 ? static_cast<double>(c.tp + c.tn) / static_cast<double>(total) : 0.0;
  m.auc = std::numeric_limits<double>::quiet_NaN();
  return m;
}

/// A probability at or above the threshold predicts the positive class.
inline Metrics evaluate(std::span<const double> probabilities, std::span<const int> labels, double threshold = 0.5) {
  if (probabilities.size() != labels.size()) throw ValidationError("evaluate: predictions and labels differ in length");
  if (probabilities.empty()) throw ValidationError("evaluate: no predictions");
  Confusion c;
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = probabilities[i] >= threshold;
    const bool actual = labels[i] == 1;
    pos |= actual;
    neg |= !actual;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  Metrics m = metrics_from_confusion(c);
  if (pos && neg) m.auc = auc(probabilities, labels);
  return m;
}

inline Metrics mean_metrics(std::span<const Metrics> folds) {
  Metrics m;
  if (folds.empty()) return m;
  for (const auto& f : folds) {
    m.precision += f.precision;
    m.recall += f.recall;
    m.f1 += f.f1;
    m.auc += f.auc;
    m.accuracy += f.accuracy;
  }
  const auto n = static_cast<double>(folds.size());
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  m.auc /= n;
  m.accuracy /= n;
  return m;
}

}  // namespace trolldetect
