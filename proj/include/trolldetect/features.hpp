#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "trolldetect/corpus.hpp"
#include "trolldetect/stopwords.hpp"
#include "trolldetect/text.hpp"
#include "trolldetect/util/error.hpp"
#include "trolldetect/util/hash.hpp"
#include "trolldetect/util/time.hpp"
#include "trolldetect/util/utf8.hpp"

namespace trolldetect {

struct ProfileFeatures {
  std::int64_t account_age_days = 0;
  std::int64_t profile_length_chars = 0;
  std::int64_t followers = 0;
  std::int64_t following = 0;
  double follower_following_ratio = 0.0;

  static constexpr std::array<const char*, 5> kNames = {
      "account_age_days", "profile_length_chars", "followers", "following",
      "follower_following_ratio"};

  std::array<double, 5> values() const {
    return {static_cast<double>(account_age_days), static_cast<double>(profile_length_chars),
            static_cast<double>(followers), static_cast<double>(following), follower_following_ratio};
  }
};

/// Age is floor(days) from creation to `reference_date`; profile length
/// counts Unicode scalar values; a zero following count divides by 1.
inline ProfileFeatures profile_features(const Account& account, Timestamp reference_date) {
  if (account.created_at > reference_date) {
    throw ValidationError("account '" + account.id + "' was created after the reference date " +
                          format_date(reference_date));
  }
  ProfileFeatures f;
  f.account_age_days = days_between(account.created_at, reference_date);
  f.profile_length_chars = static_cast<std::int64_t>(utf8::length(account.description));
  f.followers = account.followers_count;
  f.following = account.following_count;
  f.follower_following_ratio = static_cast<double>(account.followers_count) /
                               static_cast<double>(std::max<std::int64_t>(account.following_count, 1));
  return f;
}

struct BehavioralFeatures {
  double avg_hashtag_words = 0.0;
  double avg_hashtag_chars = 0.0;
  double avg_mentions = 0.0;
  double avg_links = 0.0;
  double retweets_with_links_ratio = 0.0;
  double tweets_with_links_ratio = 0.0;
  double avg_tweets_per_day = 0.0;
  double std_tweets_per_day = 0.0;
  double retweet_rate = 0.0;
  double avg_tweet_chars = 0.0;

  static constexpr std::array<const char*, 10> kNames = {
      "avg_hashtag_words",       "avg_hashtag_chars",     "avg_mentions",
      "avg_links",               "retweets_with_links_ratio", "tweets_with_links_ratio",
      "avg_tweets_per_day",      "std_tweets_per_day",    "retweet_rate",
      "avg_tweet_chars"};

  std::array<double, 10> values() const {
    return {avg_hashtag_words,  avg_hashtag_chars,  avg_mentions, avg_links,
            retweets_with_links_ratio, tweets_with_links_ratio, avg_tweets_per_day,
            std_tweets_per_day, retweet_rate, avg_tweet_chars};
  }
};

/// Per-day counts over every UTC calendar day from the oldest to the newest
/// tweet, empty days included.
inline std::vector<std::int64_t> daily_counts(const Timeline& tl) {
  if (tl.tweets.empty()) return {};
  std::int64_t first = utc_day(tl.tweets.front().created_at);
  std::int64_t last = first;
  for (const auto& t : tl.tweets) {
    first = std::min(first, utc_day(t.created_at));
    last = std::max(last, utc_day(t.created_at));
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(last - first + 1), 0);
  for (const auto& t : tl.tweets) counts[static_cast<std::size_t>(utc_day(t.created_at) - first)]++;
  return counts;
}

inline BehavioralFeatures behavioral_features(const Timeline& tl) {
  BehavioralFeatures f;
  if (tl.tweets.empty()) return f;
  double tags = 0, tag_chars = 0, mentions = 0, links = 0, rt_links = 0, with_links = 0, rts = 0, chars = 0;
  for (const auto& t : tl.tweets) {
    tags += static_cast<double>(t.hashtags.size());
    for (const auto& h : t.hashtags) tag_chars += static_cast<double>(utf8::length(h));
    mentions += static_cast<double>(t.mentions.size());
    links += static_cast<double>(t.urls.size());
    if (!t.urls.empty()) {
      with_links += 1;
      if (t.is_retweet) rt_links += 1;
    }
    if (t.is_retweet) rts += 1;
    chars += static_cast<double>(utf8::length(t.text));
  }
  const auto n = static_cast<double>(tl.tweets.size());
  f.avg_hashtag_words = tags / n;
  f.avg_hashtag_chars = tag_chars / n;
  f.avg_mentions = mentions / n;
  f.avg_links = links / n;
  f.retweets_with_links_ratio = rt_links / n;
  f.tweets_with_links_ratio = with_links / n;
  f.retweet_rate = rts / n;
  f.avg_tweet_chars = chars / n;

  const auto days = daily_counts(tl);
  const auto d = static_cast<double>(days.size());
  f.avg_tweets_per_day = n / d;
  double ss = 0;
  for (auto c : days) ss += (static_cast<double>(c) - f.avg_tweets_per_day) * (static_cast<double>(c) - f.avg_tweets_per_day);
  f.std_tweets_per_day = std::sqrt(ss / d);
  return f;
}

/// Occurrence rate of each stop word among all word tokens in the timeline,
/// in kStopWords order.
using StopwordProfile = std::array<double, kStopWords.size()>;

inline StopwordProfile stopword_rates(const Timeline& tl) {
  StopwordProfile rates{};
  std::array<std::int64_t, kStopWords.size()> counts{};
  std::int64_t total = 0;
  const auto& index = stopword_index();
  for (const auto& t : tl.tweets) {
    for (const auto& tok : tokenize(t.text)) {
      ++total;
      if (auto it = index.find(tok); it != index.end()) counts[it->second]++;
    }
  }
  if (total == 0) return rates;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    rates[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return rates;
}

using LanguageDistribution = std::map<std::string, double>;

inline LanguageDistribution language_distribution(const Timeline& tl) {
  LanguageDistribution dist;
  if (tl.tweets.empty()) return dist;
  std::map<std::string, std::int64_t> counts;
  for (const auto& t : tl.tweets) counts[t.lang]++;
  const auto n = static_cast<double>(tl.tweets.size());
  for (const auto& [lang, c] : counts) dist[lang] = static_cast<double>(c) / n;
  return dist;
}

// ---------------------------------------------------------------------------
// Vocabulary

using NgramCounts = std::unordered_map<std::string, std::int64_t>;

inline void count_ngrams(const Timeline& tl, NgramCounts& counts) {
  for (const auto& t : tl.tweets) {
    for (auto& g : ngrams(t.text)) counts[std::move(g)]++;
  }
}

/// Merge step of the count-then-merge reduction; associative and
/// commutative, so the result does not depend on how the corpus was split.
inline void merge_counts(NgramCounts& into, const NgramCounts& part) {
  for (const auto& [term, c] : part) into[term] += c;
}

struct Vocabulary {
  struct Entry {
    std::string term;
    std::int64_t frequency = 0;
    bool operator==(const Entry&) const = default;
  };
  std::vector<Entry> entries;  // frequency desc, then term asc
  std::string hash;

  std::size_t size() const { return entries.size(); }

  static std::string compute_hash(const std::vector<Entry>& entries) {
    Sha256 h;
    for (const auto& e : entries) h.update(e.term).update("\t").update(std::to_string(e.frequency)).update("\n");
    return h.hex();
  }

  static Vocabulary top_k(const NgramCounts& counts, std::size_t k) {
    Vocabulary v;
    v.entries.reserve(counts.size());
    for (const auto& [term, c] : counts) v.entries.push_back({term, c});
    auto order = [](const Entry& a, const Entry& b) {
      return a.frequency != b.frequency ? a.frequency > b.frequency : a.term < b.term;
    };
    if (v.entries.size() > k) {
      std::partial_sort(v.entries.begin(), v.entries.begin() + static_cast<std::ptrdiff_t>(k), v.entries.end(), order);
      v.entries.resize(k);
    } else {
      std::sort(v.entries.begin(), v.entries.end(), order);
    }
    v.hash = compute_hash(v.entries);
    return v;
  }

  bool operator==(const Vocabulary&) const = default;
};

/// Top-k unigrams (stop words excluded) and bigrams (adjacent kept tokens
/// within one tweet) over every timeline in the dataset.
inline Vocabulary build_vocabulary(const Dataset& ds, std::size_t k = 5000) {
  NgramCounts counts;
  std::size_t tweets = 0;
  for (const auto& tl : ds.timelines) {
    tweets += tl.tweets.size();
    count_ngrams(tl, counts);
  }
  if (ds.timelines.empty() || tweets == 0) throw ValidationError("vocabulary: corpus has no tweets");
  return Vocabulary::top_k(counts, k);
}

// ---------------------------------------------------------------------------
// Schema

enum class Family { kProfile, kBehavior, kStopword, kLanguage, kBow };

inline constexpr std::array<Family, 5> kFamilies = {Family::kProfile, Family::kBehavior, Family::kStopword,
                                                    Family::kLanguage, Family::kBow};

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::kProfile: return "profile";
    case Family::kBehavior: return "behavior";
    case Family::kStopword: return "stopword";
    case Family::kLanguage: return "language";
    case Family::kBow: return "bow";
  }
  return "";
}

inline std::optional<Family> parse_family(std::string_view s) {
  for (auto f : kFamilies)
    if (to_string(f) == s) return f;
  return std::nullopt;
}

/// Column layout: 5 profile, 10 behavioral, 179 stop-word, L language
/// (lexicographic) and V vocabulary columns (vocabulary order).
struct FeatureSchema {
  static constexpr int kVersion = 1;

  std::vector<std::string> languages;
  Vocabulary vocabulary;
  std::string stopword_checksum;
  std::string hash;

  std::size_t size() const {
    return ProfileFeatures::kNames.size() + BehavioralFeatures::kNames.size() + kStopWords.size() +
           languages.size() + vocabulary.size();
  }

  /// [begin, end) column range of a family.
  std::pair<std::size_t, std::size_t> range(Family f) const {
    const std::size_t p = ProfileFeatures::kNames.size();
    const std::size_t b = p + BehavioralFeatures::kNames.size();
    const std::size_t s = b + kStopWords.size();
    const std::size_t l = s + languages.size();
    switch (f) {
      case Family::kProfile: return {0, p};
      case Family::kBehavior: return {p, b};
      case Family::kStopword: return {b, s};
      case Family::kLanguage: return {s, l};
      case Family::kBow: return {l, l + vocabulary.size()};
    }
    return {0, 0};
  }

  std::vector<std::string> column_names() const {
    std::vector<std::string> names;
    names.reserve(size());
    for (auto n : ProfileFeatures::kNames) names.push_back(std::string("profile:") + n);
    for (auto n : BehavioralFeatures::kNames) names.push_back(std::string("behavior:") + n);
    for (auto w : kStopWords) names.push_back("stopword:" + std::string(w));
    for (const auto& l : languages) names.push_back("lang:" + l);
    for (const auto& e : vocabulary.entries) names.push_back("bow:" + e.term);
    return names;
  }

  std::string languages_hash() const {
    Sha256 h;
    for (const auto& l : languages) h.update(l).update("\n");
    return h.hex();
  }

  std::string compute_hash() const {
    Sha256 h;
    h.update("schema-v").update(std::to_string(kVersion)).update("\n");
    h.update(stopword_checksum).update("\n");
    h.update(languages_hash()).update("\n");
    h.update(Vocabulary::compute_hash(vocabulary.entries)).update("\n");
    return h.hex();
  }

  void verify() const {
    if (stopword_checksum != trolldetect::stopword_checksum()) {
      throw ValidationError("schema: stop-word list checksum differs from this build");
    }
    if (vocabulary.hash != Vocabulary::compute_hash(vocabulary.entries)) {
      throw ValidationError("schema: vocabulary hash mismatch");
    }
    if (hash != compute_hash()) throw ValidationError("schema: hash does not match its vocabulary/language lists");
  }

  json to_json() const {
    json vocab = json::array();
    for (const auto& e : vocabulary.entries) vocab.push_back({e.term, e.frequency});
    return json{{"version", kVersion},
                {"hash", hash},
                {"stopword_checksum", stopword_checksum},
                {"stopwords", std::vector<std::string>(kStopWords.begin(), kStopWords.end())},
                {"languages", languages},
                {"languages_hash", languages_hash()},
                {"vocabulary", vocab},
                {"vocabulary_hash", vocabulary.hash},
                {"columns", column_names()}};
  }

  static FeatureSchema from_json(const json& j) {
    if (j.at("version") != kVersion) throw ValidationError("schema: unsupported version " + j.at("version").dump());
    FeatureSchema s;
    s.hash = j.at("hash").get<std::string>();
    s.stopword_checksum = j.at("stopword_checksum").get<std::string>();
    s.languages = j.at("languages").get<std::vector<std::string>>();
    for (const auto& e : j.at("vocabulary")) {
      s.vocabulary.entries.push_back({e.at(0).get<std::string>(), e.at(1).get<std::int64_t>()});
    }
    s.vocabulary.hash = j.at("vocabulary_hash").get<std::string>();
    s.verify();
    return s;
  }

  bool operator==(const FeatureSchema&) const = default;
};

inline FeatureSchema make_schema(std::vector<std::string> languages, Vocabulary vocabulary) {
  std::sort(languages.begin(), languages.end());
  languages.erase(std::unique(languages.begin(), languages.end()), languages.end());
  FeatureSchema s;
  s.languages = std::move(languages);
  s.vocabulary = std::move(vocabulary);
  s.stopword_checksum = stopword_checksum();
  s.hash = s.compute_hash();
  return s;
}

/// Languages are the union of codes observed in the training corpus.
inline FeatureSchema build_schema(const Dataset& ds, std::size_t vocab_size = 5000) {
  std::set<std::string> langs;
  for (const auto& tl : ds.timelines)
    for (const auto& t : tl.tweets) langs.insert(t.lang);
  return make_schema({langs.begin(), langs.end()}, build_vocabulary(ds, vocab_size));
}

// ---------------------------------------------------------------------------
// Assembly

struct FeatureVector {
  std::vector<double> values;
  std::vector<std::string> dropped_languages;  // observed but not in the schema
};

/// Precomputed lookups for repeated assembly against one schema.
class Assembler {
 public:
  explicit Assembler(const FeatureSchema& schema) : schema_(schema) {
    schema_.verify();
    for (std::size_t i = 0; i < schema_.languages.size(); ++i) lang_index_.emplace(schema_.languages[i], i);
    for (std::size_t i = 0; i < schema_.vocabulary.entries.size(); ++i) {
      vocab_index_.emplace(schema_.vocabulary.entries[i].term, i);
    }
  }

  const FeatureSchema& schema() const { return schema_; }

  FeatureVector assemble(const Timeline& tl, Timestamp reference_date) const {
    FeatureVector out;
    out.values.assign(schema_.size(), 0.0);
    std::size_t col = 0;
    for (double v : profile_features(tl.account, reference_date).values()) out.values[col++] = v;
    for (double v : behavioral_features(tl).values()) out.values[col++] = v;
    for (double v : stopword_rates(tl)) out.values[col++] = v;
    const std::size_t lang_base = col;
    for (const auto& [lang, frac] : language_distribution(tl)) {
      if (auto it = lang_index_.find(lang); it != lang_index_.end()) {
        out.values[lang_base + it->second] = frac;
      } else {
        out.dropped_languages.push_back(lang);
      }
    }
    const std::size_t bow_base = lang_base + schema_.languages.size();
    for (const auto& t : tl.tweets) {
      for (const auto& g : ngrams(t.text)) {
        if (auto it = vocab_index_.find(g); it != vocab_index_.end()) out.values[bow_base + it->second] += 1.0;
      }
    }
    for (double v : out.values) {
      if (!std::isfinite(v)) throw std::runtime_error("assemble: non-finite feature for account '" + tl.account.id + "'");
    }
    return out;
  }

 private:
  FeatureSchema schema_;
  std::unordered_map<std::string, std::size_t> lang_index_;
  std::unordered_map<std::string, std::size_t> vocab_index_;
};

/// Single-shot assembly; `vocabulary` must be the one the schema was built
/// with.
inline FeatureVector assemble(const Timeline& tl, const FeatureSchema& schema, const Vocabulary& vocabulary,
                              Timestamp reference_date) {
  if (vocabulary.hash != schema.vocabulary.hash || vocabulary.hash != Vocabulary::compute_hash(vocabulary.entries)) {
    throw ValidationError("assemble: vocabulary does not match the schema");
  }
  return Assembler(schema).assemble(tl, reference_date);
}

}  // namespace trolldetect
