#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "trolldetect/util/csv.hpp"
#include "trolldetect/util/error.hpp"
#include "trolldetect/util/format.hpp"

namespace trolldetect {

/// Accounts x raters; a missing cell is nullopt.
struct RatingMatrix {
  std::vector<std::string> accounts;
  std::vector<std::string> raters;
  std::vector<std::vector<std::optional<double>>> cells;

  std::size_t rows() const { return accounts.size(); }
  std::size_t cols() const { return raters.size(); }
};

inline RatingMatrix make_rating_matrix(std::vector<std::vector<std::optional<double>>> cells) {
  RatingMatrix m;
  m.cells = std::move(cells);
  const std::size_t width = m.cells.empty() ? 0 : m.cells.front().size();
  for (std::size_t i = 0; i < m.cells.size(); ++i) {
    if (m.cells[i].size() != width) throw ValidationError("rating matrix: ragged rows");
    m.accounts.push_back("a" + std::to_string(i + 1));
  }
  for (std::size_t j = 0; j < width; ++j) m.raters.push_back("r" + std::to_string(j + 1));
  return m;
}

/// Long-format CSV with header account_id,rater_id,rating; ratings are
/// integers 1..5. Row and column order follow first appearance.
inline RatingMatrix parse_ratings_csv(const std::string& text, const std::string& origin = "ratings") {
  std::istringstream in(text);
  csv::Row row;
  if (!csv::read_row(in, row) || row != csv::Row{"account_id", "rater_id", "rating"}) {
    throw ValidationError(origin + ": expected header account_id,rater_id,rating");
  }
  RatingMatrix m;
  std::map<std::string, std::size_t> arow, rcol;
  std::size_t line = 1;
  while (csv::read_row(in, row)) {
    ++line;
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 3) throw ValidationError(fmt::format("{}:{}: expected 3 fields", origin, line));
    if (row[2].size() != 1 || row[2][0] < '1' || row[2][0] > '5') {
      throw ValidationError(fmt::format("{}:{}: rating must be an integer 1-5, got '{}'", origin, line, row[2]));
    }
    auto [ai, anew] = arow.emplace(row[0], m.accounts.size());
    if (anew) {
      m.accounts.push_back(row[0]);
      m.cells.emplace_back(m.raters.size());
    }
    auto [ri, rnew] = rcol.emplace(row[1], m.raters.size());
    if (rnew) {
      m.raters.push_back(row[1]);
      for (auto& r : m.cells) r.emplace_back();
    }
    auto& cell = m.cells[ai->second][ri->second];
    if (cell) throw ValidationError(fmt::format("{}:{}: rater '{}' rated '{}' twice", origin, line, row[1], row[0]));
    cell = static_cast<double>(row[2][0] - '0');
  }
  return m;
}

/// Interval-level Krippendorff's alpha from the coincidence matrix. Units
/// with fewer than two ratings are not pairable and drop out.
inline double krippendorff_alpha(const RatingMatrix& m) {
  std::map<double, std::size_t> index;
  for (const auto& r : m.cells)
    for (const auto& c : r)
      if (c) index.emplace(*c, 0);
  std::vector<double> values;
  for (auto& [v, i] : index) {
    i = values.size();
    values.push_back(v);
  }
  const std::size_t k = values.size();
  std::vector<double> o(k * k, 0.0);
  for (const auto& r : m.cells) {
    std::vector<std::size_t> present;
    for (const auto& c : r)
      if (c) present.push_back(index.at(*c));
    const std::size_t mu = present.size();
    if (mu < 2) continue;
    const double w = 1.0 / static_cast<double>(mu - 1);
    for (std::size_t a = 0; a < mu; ++a)
      for (std::size_t b = 0; b < mu; ++b)
        if (a != b) o[present[a] * k + present[b]] += w;
  }
  std::vector<double> nc(k, 0.0);
  double n = 0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) nc[c] += o[c * k + d];
    n += nc[c];
  }
  if (n < 2.0 - 1e-9) throw ValidationError("krippendorff alpha: fewer than 2 pairable values");
  double observed = 0, expected = 0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = c + 1; d < k; ++d) {
      const double delta2 = (values[c] - values[d]) * (values[c] - values[d]);
      observed += 2.0 * o[c * k + d] * delta2;
      expected += 2.0 * nc[c] * nc[d] * delta2;
    }
  }
  if (observed == 0.0) return 1.0;
  const double D_o = observed / n;
  const double D_e = expected / (n * (n - 1.0));
  return 1.0 - D_o / D_e;
}

struct CohortRatings {
  std::size_t accounts = 0;
  double median = 0;
  double mean = 0;
  std::size_t mean_above_3 = 0;
  std::size_t majority_above_3 = 0;  // at least `min_raters` ratings above 3
};

struct AgreementReport {
  double alpha = 0;
  std::string level = "interval";
  std::map<std::string, double> account_mean;
  CohortRatings flagged;
  CohortRatings unflagged;
  std::size_t min_raters = 2;

  std::string render_markdown() const {
    std::string out = fmt::format("Krippendorff's alpha ({}): {:.3f}\n\n", level, alpha);
    out += "| | Flagged | Unflagged |\n|---|---|---|\n";
    auto row = [&](const std::string& name, const std::string& a, const std::string& b) {
      out += "| " + name + " | " + a + " | " + b + " |\n";
    };
    auto cnt = [](const CohortRatings& c, std::size_t x) {
      return count_with_percent(static_cast<std::int64_t>(x), static_cast<std::int64_t>(c.accounts));
    };
    row("Accounts rated", with_commas(static_cast<std::int64_t>(flagged.accounts)),
        with_commas(static_cast<std::int64_t>(unflagged.accounts)));
    row("Median of mean ratings", fmt::format("{:.2f}", flagged.median), fmt::format("{:.2f}", unflagged.median));
    row("Mean of mean ratings", fmt::format("{:.2f}", flagged.mean), fmt::format("{:.2f}", unflagged.mean));
    row("Mean rating above 3", cnt(flagged, flagged.mean_above_3), cnt(unflagged, unflagged.mean_above_3));
    row(fmt::format("At least {} raters above 3", min_raters), cnt(flagged, flagged.majority_above_3),
        cnt(unflagged, unflagged.majority_above_3));
    return out;
  }
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Per-account means over present ratings and per-cohort summaries. Every
/// rated account must appear in `key`.
inline AgreementReport aggregate_ratings(const RatingMatrix& m, const std::map<std::string, bool>& key,
                                         std::size_t min_raters = 2) {
  AgreementReport rep;
  rep.min_raters = min_raters;
  rep.alpha = krippendorff_alpha(m);
  std::vector<double> means[2];
  std::size_t above[2] = {0, 0}, majority[2] = {0, 0};
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto it = key.find(m.accounts[i]);
    if (it == key.end()) throw ValidationError("ratings: account '" + m.accounts[i] + "' is not in the key");
    double sum = 0;
    std::size_t n = 0, high = 0;
    for (const auto& c : m.cells[i]) {
      if (!c) continue;
      sum += *c;
      ++n;
      high += *c > 3 ? 1 : 0;
    }
    if (n == 0) continue;
    const double mean = sum / static_cast<double>(n);
    rep.account_mean[m.accounts[i]] = mean;
    const int g = it->second ? 1 : 0;
    means[g].push_back(mean);
    above[g] += mean > 3 ? 1 : 0;
    majority[g] += high >= min_raters ? 1 : 0;
  }
  auto fill = [&](CohortRatings& c, int g) {
    c.accounts = means[g].size();
    c.median = median(means[g]);
    c.mean = means[g].empty() ? 0.0 : std::accumulate(means[g].begin(), means[g].end(), 0.0) / static_cast<double>(c.accounts);
    c.mean_above_3 = above[g];
    c.majority_above_3 = majority[g];
  };
  fill(rep.flagged, 1);
  fill(rep.unflagged, 0);
  return rep;
}

}  // namespace trolldetect
