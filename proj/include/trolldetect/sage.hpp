#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "trolldetect/corpus.hpp"
#include "trolldetect/features.hpp"
#include "trolldetect/util/csv.hpp"
#include "trolldetect/util/format.hpp"

namespace trolldetect {

/// N-gram counts for one corpus. `total` is the sum of all counts.
struct CorpusCounts {
  std::map<std::string, std::int64_t> counts;
  std::int64_t total = 0;

  void add(const std::string& term, std::int64_t n) {
    if (n < 0) throw ValidationError("corpus counts: negative count for '" + term + "'");
    if (n == 0) return;
    counts[term] += n;
    total += n;
  }
  std::int64_t count(const std::string& term) const {
    auto it = counts.find(term);
    return it == counts.end() ? 0 : it->second;
  }
};

inline CorpusCounts corpus_counts(const std::map<std::string, std::int64_t>& m) {
  CorpusCounts c;
  for (const auto& [t, n] : m) c.add(t, n);
  return c;
}

/// Unigram+bigram counts over every tweet of the selected timelines (all of
/// them when `label` is empty), using the bag-of-words tokenizer.
inline CorpusCounts corpus_counts(const Dataset& ds, std::optional<Label> label = std::nullopt) {
  NgramCounts counts;
  for (const auto& tl : ds.timelines) {
    if (label && tl.account.label != *label) continue;
    count_ngrams(tl, counts);
  }
  CorpusCounts c;
  for (const auto& [t, n] : counts) c.add(t, n);
  return c;
}

struct SageOptions {
  double smoothing = 0.1;      // background pseudo-count
  double tol = 1e-4;
  int max_iter = 500;
  double penalty_scale = 0.1;  // 0 disables the sparsity penalty
  double epsilon = 1e-4;
};

struct SageFit {
  std::vector<std::string> terms;  // lexicographic
  std::vector<double> eta;
  std::vector<double> background;  // m_j
  std::vector<double> objective;   // penalized objective after each sweep
  int iterations = 0;
  bool converged = false;

  double eta_of(const std::string& term) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), term);
    return it != terms.end() && *it == term ? eta[static_cast<std::size_t>(it - terms.begin())] : 0.0;
  }
};

namespace detail {

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace detail

/// Fits eta so that the treatment multinomial has logits m + eta, where m is
/// the smoothed background log-frequency. The sparsity penalty on each term
/// is lambda0_j * eps * log(1 + |eta_j| / eps) with
/// lambda0_j = penalty_scale * C * sqrt(p0_j (1 - p0_j)), C the treatment
/// total and p0 the background distribution. It is maximized by alternating
/// one sweep of proximal coordinate Newton steps under the linearized
/// (weighted L1) penalty with a weight refresh
///   lambda_j = lambda0_j * eps / (|eta_j| + eps),
/// which never decreases the penalized objective.
inline SageFit sage_fit(const CorpusCounts& treatment, const CorpusCounts& base, const SageOptions& opt = {}) {
  if (treatment.total <= 0) throw ValidationError("sage: treatment corpus is empty");
  if (base.total <= 0) throw ValidationError("sage: base corpus is empty");
  if (opt.smoothing < 0 || opt.penalty_scale < 0 || opt.epsilon <= 0 || opt.tol <= 0 || opt.max_iter < 1) {
    throw ValidationError("sage: invalid options");
  }
  SageFit fit;
  {
    auto a = treatment.counts.begin();
    auto b = base.counts.begin();
    while (a != treatment.counts.end() || b != base.counts.end()) {
      if (b == base.counts.end() || (a != treatment.counts.end() && a->first < b->first)) {
        fit.terms.push_back((a++)->first);
      } else if (a == treatment.counts.end() || b->first < a->first) {
        fit.terms.push_back((b++)->first);
      } else {
        fit.terms.push_back(a->first);
        ++a;
        ++b;
      }
    }
  }
  const std::size_t V = fit.terms.size();
  if (V == 0) throw ValidationError("sage: empty vocabulary");

  const double C = static_cast<double>(treatment.total);
  const double denom = static_cast<double>(base.total) + opt.smoothing * static_cast<double>(V);
  std::vector<double> c(V), lambda0(V);
  fit.background.resize(V);
  for (std::size_t j = 0; j < V; ++j) {
    const double b = static_cast<double>(base.count(fit.terms[j])) + opt.smoothing;
    if (b <= 0) throw ValidationError("sage: term '" + fit.terms[j] + "' has no background mass (use smoothing > 0)");
    fit.background[j] = std::log(b / denom);
    c[j] = static_cast<double>(treatment.count(fit.terms[j]));
    const double p0 = b / denom;
    lambda0[j] = opt.penalty_scale * C * std::sqrt(p0 * (1.0 - p0));
  }
  const auto& m = fit.background;
  fit.eta.assign(V, 0.0);
  auto& eta = fit.eta;

  auto log_partition = [&] {
    double mx = -INFINITY;
    for (std::size_t j = 0; j < V; ++j) mx = std::max(mx, m[j] + eta[j]);
    double s = 0;
    for (std::size_t j = 0; j < V; ++j) s += std::exp(m[j] + eta[j] - mx);
    return mx + std::log(s);
  };
  auto objective = [&] {
    const double lz = log_partition();
    double v = 0;
    for (std::size_t j = 0; j < V; ++j) {
      v += c[j] * (m[j] + eta[j] - lz);
      v -= lambda0[j] * opt.epsilon * std::log1p(std::abs(eta[j]) / opt.epsilon);
    }
    return v;
  };

  std::vector<double> lambda = lambda0;
  fit.objective.push_back(objective());
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    // Z is held relative to a fixed shift so single-term updates stay cheap.
    const double shift = log_partition();
    double Z = 0;
    for (std::size_t j = 0; j < V; ++j) Z += std::exp(m[j] + eta[j] - shift);
    double max_delta = 0;
    for (std::size_t j = 0; j < V; ++j) {
      const double ej = std::exp(m[j] + eta[j] - shift);
      const double rest = std::max(Z - ej, 0.0);
      // 1-D surrogate in x = eta_j
      auto f = [&](double x) {
        return c[j] * x - C * std::log(rest + std::exp(m[j] + x - shift)) - lambda[j] * std::abs(x);
      };
      const double p = ej / Z;
      const double g = c[j] - C * p;
      const double h = std::max(C * p * (1.0 - p), 1e-12 * C);
      double x = detail::soft_threshold(eta[j] + g / h, lambda[j] / h);
      const double f0 = f(eta[j]);
      double step = 1.0;
      while (f(eta[j] + step * (x - eta[j])) < f0 && step > 1e-10) step *= 0.5;
      if (step <= 1e-10) continue;
      x = eta[j] + step * (x - eta[j]);
      if (x == eta[j]) continue;
      max_delta = std::max(max_delta, std::abs(x - eta[j]));
      Z = rest + std::exp(m[j] + x - shift);
      eta[j] = x;
    }
    for (std::size_t j = 0; j < V; ++j) lambda[j] = lambda0[j] * opt.epsilon / (std::abs(eta[j]) + opt.epsilon);
    fit.objective.push_back(objective());
    fit.iterations = iter;
    if (max_delta <= opt.tol) {
      fit.converged = true;
      break;
    }
  }
  // Without a penalty eta is only identified up to a constant; pin it so the
  // fitted distribution needs no renormalization.
  if (opt.penalty_scale == 0.0) {
    const double lz = log_partition();
    for (auto& e : eta) e -= lz;
  }
  return fit;
}

struct SageResult {
  std::string term;
  double eta = 0;
  std::int64_t treatment_count = 0;
  std::int64_t base_count = 0;
  double treatment_rate = 0;
  double base_rate = 0;
};

/// Top `top_k` terms by eta, then treatment count (both descending), then
/// term.
inline std::vector<SageResult> sage_report(const SageFit& fit, const CorpusCounts& treatment, const CorpusCounts& base,
                                           std::size_t top_k = 30) {
  std::vector<SageResult> rows;
  rows.reserve(fit.terms.size());
  for (std::size_t j = 0; j < fit.terms.size(); ++j) {
    SageResult r;
    r.term = fit.terms[j];
    r.eta = fit.eta[j];
    r.treatment_count = treatment.count(r.term);
    r.base_count = base.count(r.term);
    r.treatment_rate = static_cast<double>(r.treatment_count) / static_cast<double>(treatment.total);
    r.base_rate = static_cast<double>(r.base_count) / static_cast<double>(base.total);
    rows.push_back(std::move(r));
  }
  const std::size_t k = std::min(top_k, rows.size());
  std::partial_sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(k), rows.end(),
                    [](const SageResult& a, const SageResult& b) {
                      if (a.eta != b.eta) return a.eta > b.eta;
                      if (a.treatment_count != b.treatment_count) return a.treatment_count > b.treatment_count;
                      return a.term < b.term;
                    });
  rows.resize(k);
  return rows;
}

inline std::string sage_csv(const std::vector<SageResult>& rows) {
  std::string out = "rank,ngram,sage,treatment_count,treatment_rate,base_count,base_rate\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::string eta = fmt::format("{:.2f}", r.eta);
    if (eta == "-0.00") eta = "0.00";
    out += fmt::format("{},{},{},{},{},{},{}\n", i + 1, csv::escape(r.term), eta, r.treatment_count,
                       two_sig(r.treatment_rate), r.base_count, two_sig(r.base_rate));
  }
  return out;
}

}  // namespace trolldetect
