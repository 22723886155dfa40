#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "trolldetect/corpus.hpp"
#include "trolldetect/features.hpp"
#include "trolldetect/util/format.hpp"

namespace trolldetect {

using Tally = std::vector<std::pair<std::string, std::int64_t>>;

struct CohortStats {
  std::int64_t accounts = 0;
  double avg_age_days = 0;
  double avg_followers = 0;
  double avg_following = 0;
  std::int64_t total_tweets = 0;
  double avg_tweets = 0;
  double avg_daily_mean = 0;   // mean over accounts of their average tweets per active day
  double avg_daily_sigma = 0;  // population standard deviation of the same
  Tally languages;             // top 3
  Tally hashtags;              // top 10
};

struct CohortReport {
  CohortStats flagged;
  CohortStats unflagged;

  std::string render_markdown() const;
};

/// Count descending, then key ascending, truncated to `k`.
inline Tally top_k(const std::map<std::string, std::int64_t>& counts, std::size_t k) {
  Tally t(counts.begin(), counts.end());
  std::stable_sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (t.size() > k) t.resize(k);
  return t;
}

inline CohortStats cohort_stats(const std::vector<const Timeline*>& cohort, Timestamp reference_date) {
  CohortStats s;
  s.accounts = static_cast<std::int64_t>(cohort.size());
  std::map<std::string, std::int64_t> langs, tags;
  std::vector<double> daily;
  for (const auto* tl : cohort) {
    const auto pf = profile_features(tl->account, reference_date);
    s.avg_age_days += static_cast<double>(pf.account_age_days);
    s.avg_followers += static_cast<double>(pf.followers);
    s.avg_following += static_cast<double>(pf.following);
    s.total_tweets += static_cast<std::int64_t>(tl->tweets.size());
    daily.push_back(behavioral_features(*tl).avg_tweets_per_day);
    for (const auto& t : tl->tweets) {
      langs[t.lang]++;
      for (const auto& h : t.hashtags) tags[h]++;
    }
  }
  const double n = static_cast<double>(s.accounts);
  s.avg_age_days /= n;
  s.avg_followers /= n;
  s.avg_following /= n;
  s.avg_tweets = static_cast<double>(s.total_tweets) / n;
  for (double d : daily) s.avg_daily_mean += d;
  s.avg_daily_mean /= n;
  for (double d : daily) s.avg_daily_sigma += (d - s.avg_daily_mean) * (d - s.avg_daily_mean);
  s.avg_daily_sigma = std::sqrt(s.avg_daily_sigma / n);
  s.languages = top_k(langs, 3);
  s.hashtags = top_k(tags, 10);
  return s;
}

inline CohortReport cohort_compare(const std::vector<const Timeline*>& flagged, const std::vector<const Timeline*>& unflagged,
                                   Timestamp reference_date = default_reference_date()) {
  if (flagged.empty() || unflagged.empty()) throw ValidationError("cohorts: both cohorts need at least one account");
  return {cohort_stats(flagged, reference_date), cohort_stats(unflagged, reference_date)};
}

namespace detail {

/// Two decimals without trailing zeros: 1621.70 -> "1621.7".
inline std::string short_decimal(double x) {
  std::string s = fmt::format("{:.2f}", x);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

inline std::string language_name(const std::string& code) {
  static const std::map<std::string, std::string> names = {
      {"ar", "Arabic"}, {"de", "German"}, {"en", "English"}, {"es", "Spanish"}, {"fr", "French"},
      {"it", "Italian"}, {"ja", "Japanese"}, {"nl", "Dutch"}, {"pt", "Portuguese"}, {"ru", "Russian"},
      {"tr", "Turkish"}, {"uk", "Ukrainian"}, {"und", "Undetermined"}};
  auto it = names.find(code);
  return it == names.end() ? code : it->second;
}

}  // namespace detail

inline std::string CohortReport::render_markdown() const {
  std::string out = "| | Flagged | Unflagged |\n|---|---|---|\n";
  auto row = [&](const std::string& name, const std::string& a, const std::string& b) {
    out += "| " + name + " | " + a + " | " + b + " |\n";
  };
  const auto& f = flagged;
  const auto& u = unflagged;
  row("Total # of Accounts", with_commas(f.accounts), with_commas(u.accounts));
  row("Avg Account Age (days)", detail::short_decimal(f.avg_age_days), detail::short_decimal(u.avg_age_days));
  row("Avg # of Followers", detail::short_decimal(f.avg_followers), detail::short_decimal(u.avg_followers));
  row("Avg # of Following", detail::short_decimal(f.avg_following), detail::short_decimal(u.avg_following));
  row("Total # of Tweets", with_commas(f.total_tweets), with_commas(u.total_tweets));
  row("Avg # of Tweets", detail::short_decimal(f.avg_tweets), detail::short_decimal(u.avg_tweets));
  row("Avg of avg daily # of tweets", mean_with_sigma(f.avg_daily_mean, f.avg_daily_sigma),
      mean_with_sigma(u.avg_daily_mean, u.avg_daily_sigma));

  auto paired = [&](const Tally& a, const Tally& b, auto label) {
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
      auto cell = [&](const Tally& t) {
        return i < t.size() ? label(t[i].first) + " | " + with_commas(t[i].second) : std::string(" | ");
      };
      out += "| " + cell(a) + " | " + cell(b) + " |\n";
    }
  };
  out += "\n| Flagged | | Unflagged | |\n|---|---|---|---|\n";
  out += "| Total tweets | " + with_commas(f.total_tweets) + " | Total tweets | " + with_commas(u.total_tweets) + " |\n";
  paired(f.languages, u.languages, [](const std::string& c) { return detail::language_name(c) + " tweets"; });

  out += "\n| Flagged | | Unflagged | |\n|---|---|---|---|\n";
  paired(f.hashtags, u.hashtags, [](const std::string& h) { return "#" + h; });
  return out;
}

}  // namespace trolldetect
