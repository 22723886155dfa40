#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "trolldetect/util/csv.hpp"
#include "trolldetect/util/error.hpp"
#include "trolldetect/util/rng.hpp"

namespace trolldetect {

struct ReviewSample {
  std::vector<std::string> order;        // what raters see
  std::map<std::string, bool> flagged;   // hidden key
};

namespace detail {

inline std::vector<std::string> draw(std::vector<std::string> pool, std::size_t n, Rng& rng) {
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return pool;
}

}  // namespace detail

/// n ids drawn uniformly without replacement from each pool, merged and
/// shuffled.
inline ReviewSample sample_for_review(const std::vector<std::string>& flagged, const std::vector<std::string>& unflagged,
                                      std::size_t n, std::uint64_t seed) {
  std::set<std::string> seen;
  for (const auto* pool : {&flagged, &unflagged}) {
    for (const auto& id : *pool) {
      if (!seen.insert(id).second) throw ValidationError("review sample: account '" + id + "' appears more than once");
    }
  }
  if (flagged.size() < n || unflagged.size() < n) {
    throw ValidationError(fmt::format("review sample: need {} accounts per pool, have {} flagged and {} unflagged", n,
                                      flagged.size(), unflagged.size()));
  }
  Rng rng(derive_seed(seed, "review-sample"));
  ReviewSample s;
  for (auto& id : detail::draw(flagged, n, rng)) {
    s.flagged[id] = true;
    s.order.push_back(std::move(id));
  }
  for (auto& id : detail::draw(unflagged, n, rng)) {
    s.flagged[id] = false;
    s.order.push_back(std::move(id));
  }
  rng.shuffle(s.order);
  return s;
}

inline std::string review_sheet_csv(const ReviewSample& s) {
  std::string out = "position,account_id\n";
  for (std::size_t i = 0; i < s.order.size(); ++i) out += fmt::format("{},{}\n", i + 1, csv::escape(s.order[i]));
  return out;
}

inline std::string review_key_csv(const ReviewSample& s) {
  std::string out = "account_id,flagged\n";
  for (const auto& id : s.order) out += csv::escape(id) + "," + (s.flagged.at(id) ? "1" : "0") + "\n";
  return out;
}

inline std::map<std::string, bool> parse_review_key(const std::string& text, const std::string& origin = "key") {
  std::istringstream in(text);
  csv::Row row;
  if (!csv::read_row(in, row) || row != csv::Row{"account_id", "flagged"}) {
    throw ValidationError(origin + ": expected header account_id,flagged");
  }
  std::map<std::string, bool> key;
  std::size_t line = 1;
  while (csv::read_row(in, row)) {
    ++line;
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 2 || (row[1] != "0" && row[1] != "1")) {
      throw ValidationError(fmt::format("{}:{}: expected account_id,0|1", origin, line));
    }
    if (!key.emplace(row[0], row[1] == "1").second) {
      throw ValidationError(fmt::format("{}:{}: duplicate account '{}'", origin, line, row[0]));
    }
  }
  return key;
}

}  // namespace trolldetect
