#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "trolldetect/text.hpp"
#include "trolldetect/util/artifact.hpp"
#include "trolldetect/util/csv.hpp"
#include "trolldetect/util/error.hpp"
#include "trolldetect/util/format.hpp"
#include "trolldetect/util/time.hpp"

namespace trolldetect {

enum class Label { kTroll, kControl, kUnlabeled };

inline std::string_view to_string(Label l) {
  switch (l) {
    case Label::kTroll: return "troll";
    case Label::kControl: return "control";
    case Label::kUnlabeled: return "unlabeled";
  }
  return "unlabeled";
}

inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "troll") return Label::kTroll;
  if (s == "control") return Label::kControl;
  if (s == "unlabeled") return Label::kUnlabeled;
  return std::nullopt;
}

struct Tweet {
  std::string id;
  std::string account_id;
  std::string text;
  Timestamp created_at{};
  bool is_retweet = false;
  std::string lang = "und";
  std::vector<std::string> hashtags;
  std::vector<std::string> mentions;
  std::vector<std::string> urls;

  bool operator==(const Tweet&) const = default;
};

struct Account {
  std::string id;
  std::string screen_name;
  Timestamp created_at{};
  std::string description;
  std::int64_t followers_count = 0;
  std::int64_t following_count = 0;
  Label label = Label::kUnlabeled;

  bool operator==(const Account&) const = default;
};

struct Timeline {
  Account account;
  std::vector<Tweet> tweets;  // newest first

  bool operator==(const Timeline&) const = default;
};

struct DatasetMeta {
  std::vector<std::string> sources;  // file names, not full paths
  std::size_t cap = 200;
  std::string ingested_at;

  bool operator==(const DatasetMeta&) const = default;
};

struct Dataset {
  std::vector<Timeline> timelines;
  std::map<Label, std::size_t> counts;
  std::size_t orphan_tweets = 0;
  DatasetMeta meta;

  bool operator==(const Dataset&) const = default;

  std::size_t count(Label l) const {
    auto it = counts.find(l);
    return it == counts.end() ? 0 : it->second;
  }
};

// ---------------------------------------------------------------------------
// Language detection

class LanguageDetector {
 public:
  virtual ~LanguageDetector() = default;
  virtual std::string detect(std::string_view text) const = 0;
};

/// Stand-in detector: "ru" when Cyrillic letters outnumber the other word
/// characters, else "en". Not a real language identifier.
class CyrillicHeuristicDetector final : public LanguageDetector {
 public:
  std::string detect(std::string_view text) const override {
    std::size_t cyr = 0, other = 0;
    for (std::size_t pos = 0; pos < text.size();) {
      const char32_t cp = utf8::next(text, pos);
      if (!utf8::is_word_char(cp) || (cp >= '0' && cp <= '9') || cp == '_') continue;
      (utf8::is_cyrillic(cp) ? cyr : other)++;
    }
    return cyr > other ? "ru" : "en";
  }
};

// ---------------------------------------------------------------------------
// Record parsing

namespace detail {

inline std::string sanitize_utf8(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) utf8::append(out, utf8::next(s, pos));
  return out;
}

class RecordReader {
 public:
  RecordReader(const json& obj, std::string origin, std::size_t line)
      : obj_(obj), origin_(std::move(origin)), line_(line) {}

  [[noreturn]] void fail(std::string_view field, std::string_view why) const {
    throw ValidationError(fmt::format("{} line {}: field '{}': {}", origin_, line_, field, why));
  }

  void require_known(std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, _] : obj_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(key, "unknown field");
      }
    }
  }

  bool has(const char* key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }

  std::string string(const char* key) const {
    if (!obj_.contains(key)) fail(key, "missing");
    const auto& v = obj_.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return v.dump();
    fail(key, "expected a string");
  }

  std::string text(const char* key) const {
    if (!obj_.contains(key)) fail(key, "missing");
    const auto& v = obj_.at(key);
    if (v.is_null()) return {};
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::int64_t non_negative(const char* key) const {
    if (!obj_.contains(key)) fail(key, "missing");
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    const auto n = v.get<std::int64_t>();
    if (n < 0) fail(key, fmt::format("must be non-negative, got {}", n));
    return n;
  }

  Timestamp timestamp(const char* key) const {
    const auto s = string(key);
    try {
      return parse_timestamp(s);
    } catch (const ValidationError&) {
      fail(key, fmt::format("invalid ISO-8601 UTC timestamp '{}'", s));
    }
  }

  bool boolean(const char* key) const {
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) fail(key, "expected true/false");
    return v.get<bool>();
  }

  std::vector<std::string> tokens(const char* key) const {
    const auto& v = obj_.at(key);
    if (!v.is_array()) fail(key, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
      if (!e.is_string()) fail(key, "expected an array of strings");
      auto s = e.get<std::string>();
      if (s.empty() || std::any_of(s.begin(), s.end(), detail::is_ascii_space)) {
        fail(key, fmt::format("entry '{}' is empty or contains whitespace", s));
      }
      out.push_back(std::move(s));
    }
    return out;
  }

 private:
  const json& obj_;
  std::string origin_;
  std::size_t line_;
};

template <typename Fn>
void for_each_record(std::istream& in, const std::string& origin, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(fmt::format("{} line {}: malformed record ({})", origin, line_no, e.what()));
    }
    if (!obj.is_object()) {
      throw ValidationError(fmt::format("{} line {}: record must be a JSON object", origin, line_no));
    }
    fn(RecordReader(obj, origin, line_no));
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

/// Accounts file: one JSON object per line with exactly
/// {id, screen_name, created_at, description, followers_count,
///  following_count, label}.
inline Account parse_account(const detail::RecordReader& r) {
  r.require_known({"id", "screen_name", "created_at", "description", "followers_count",
                   "following_count", "label"});
  Account a;
  a.id = r.string("id");
  if (a.id.empty()) r.fail("id", "must be non-empty");
  a.screen_name = r.string("screen_name");
  a.created_at = r.timestamp("created_at");
  a.description = r.text("description");
  a.followers_count = r.non_negative("followers_count");
  a.following_count = r.non_negative("following_count");
  const auto label = parse_label(r.string("label"));
  if (!label) r.fail("label", "expected troll, control or unlabeled");
  a.label = *label;
  return a;
}

/// Accounts file: one JSON object per line with exactly
/// {id, screen_name, created_at, description, followers_count,
///  following_count, label}.
inline std::vector<Account> load_accounts(std::istream& in, const std::string& origin = "accounts") {
  std::vector<Account> out;
  std::unordered_set<std::string> seen;
  detail::for_each_record(in, origin, [&](const detail::RecordReader& r) {
    Account a = parse_account(r);
    if (!seen.insert(a.id).second) {
      throw ValidationError(fmt::format("{}: duplicate account id '{}'", origin, a.id));
    }
    out.push_back(std::move(a));
  });
  return out;
}

inline std::vector<Account> load_accounts(const std::string& path) {
  auto in = detail::open_input(path);
  return load_accounts(in, std::filesystem::path(path).filename().string());
}

inline Tweet parse_tweet(const detail::RecordReader& r, const LanguageDetector* detector = nullptr) {
  r.require_known({"id", "account_id", "created_at", "text", "is_retweet", "lang", "hashtags",
                   "mentions", "urls"});
  Tweet t;
  t.id = r.string("id");
  t.account_id = r.string("account_id");
  t.created_at = r.timestamp("created_at");
  t.text = r.text("text");
  t.is_retweet = r.has("is_retweet") ? r.boolean("is_retweet") : t.text.starts_with("RT @");
  if (r.has("lang")) {
    t.lang = r.string("lang");
    std::transform(t.lang.begin(), t.lang.end(), t.lang.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t.lang.empty()) t.lang = "und";
  }
  if (t.lang == "und" && detector != nullptr) t.lang = detector->detect(t.text);
  const bool derive = !r.has("hashtags") || !r.has("mentions") || !r.has("urls");
  Entities derived = derive ? extract_entities(t.text) : Entities{};
  t.hashtags = r.has("hashtags") ? r.tokens("hashtags") : std::move(derived.hashtags);
  t.mentions = r.has("mentions") ? r.tokens("mentions") : std::move(derived.mentions);
  t.urls = r.has("urls") ? r.tokens("urls") : std::move(derived.urls);
  return t;
}

/// Tweets file: {id, account_id, created_at, text} plus optional
/// {is_retweet, lang, hashtags, mentions, urls}. Missing entity lists are
/// derived from the text, a missing is_retweet from an "RT @" prefix, and a
/// missing lang becomes "und" (optionally overwritten by `detector`).
inline std::vector<Tweet> load_tweets(std::istream& in, const std::string& origin = "tweets",
                                      const LanguageDetector* detector = nullptr) {
  std::vector<Tweet> out;
  detail::for_each_record(in, origin, [&](const detail::RecordReader& r) {
    out.push_back(parse_tweet(r, detector));
  });
  return out;
}

inline std::vector<Tweet> load_tweets(const std::string& path,
                                      const LanguageDetector* detector = nullptr) {
  auto in = detail::open_input(path);
  return load_tweets(in, std::filesystem::path(path).filename().string(), detector);
}

// ---------------------------------------------------------------------------
// Record writing (inverse of the loaders; used by the converter and synth)

inline json account_record(const Account& a) {
  json j;
  j["id"] = a.id;
  j["screen_name"] = a.screen_name;
  j["created_at"] = format_timestamp(a.created_at);
  j["description"] = a.description;
  j["followers_count"] = a.followers_count;
  j["following_count"] = a.following_count;
  j["label"] = std::string(to_string(a.label));
  return j;
}

inline json tweet_record(const Tweet& t) {
  json j;
  j["id"] = t.id;
  j["account_id"] = t.account_id;
  j["created_at"] = format_timestamp(t.created_at);
  j["text"] = t.text;
  j["is_retweet"] = t.is_retweet;
  j["lang"] = t.lang;
  j["hashtags"] = t.hashtags;
  j["mentions"] = t.mentions;
  j["urls"] = t.urls;
  return j;
}

inline void write_records(const std::string& path, const std::vector<json>& records) {
  std::string body;
  for (const auto& r : records) body += canonical_dump(r) + "\n";
  write_file(path, body);
}

// ---------------------------------------------------------------------------
// Timelines

/// Tweet id order: numeric ids by value, anything else lexicographically.
inline bool tweet_id_less(const std::string& a, const std::string& b) {
  auto numeric = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (numeric(a) && numeric(b) && a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

/// Newest first; equal timestamps fall back to ascending tweet id.
inline bool timeline_order(const Tweet& x, const Tweet& y) {
  if (x.created_at != y.created_at) return x.created_at > y.created_at;
  return tweet_id_less(x.id, y.id);
}

inline Dataset build_timelines(std::vector<Account> accounts, std::vector<Tweet> tweets,
                               std::size_t cap = 200, DatasetMeta meta = {}) {
  if (cap == 0) throw ValidationError("timeline cap must be positive");
  Dataset ds;
  meta.cap = cap;
  ds.meta = std::move(meta);
  std::unordered_map<std::string, std::size_t> index;
  ds.timelines.reserve(accounts.size());
  for (auto& a : accounts) {
    if (!index.emplace(a.id, ds.timelines.size()).second) {
      throw ValidationError("duplicate account id '" + a.id + "'");
    }
    ds.counts[a.label]++;
    ds.timelines.push_back(Timeline{std::move(a), {}});
  }
  for (auto& t : tweets) {
    auto it = index.find(t.account_id);
    if (it == index.end()) {
      ++ds.orphan_tweets;
      continue;
    }
    ds.timelines[it->second].tweets.push_back(std::move(t));
  }
  for (auto& tl : ds.timelines) {
    auto& v = tl.tweets;
    if (v.size() > cap) {
      std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(cap), v.end(), timeline_order);
      v.resize(cap);
    } else {
      std::sort(v.begin(), v.end(), timeline_order);
    }
  }
  return ds;
}

/// Ingestion stamp that keeps re-runs byte-identical: SOURCE_DATE_EPOCH when
/// set, otherwise the newest instant present in the inputs.
inline std::string ingestion_stamp(const std::vector<Account>& accounts, const std::vector<Tweet>& tweets) {
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long long secs = std::strtoll(env, &end, 10);
    if (end != nullptr && *end == '\0') {
      return format_timestamp(Timestamp{std::chrono::seconds{secs}});
    }
  }
  Timestamp newest{};
  for (const auto& a : accounts) newest = std::max(newest, a.created_at);
  for (const auto& t : tweets) newest = std::max(newest, t.created_at);
  return format_timestamp(newest);
}

// ---------------------------------------------------------------------------
// Twitter election-integrity CSV release -> record files

/// Converts the platform's per-tweet CSV release (one row per tweet, account
/// fields repeated) into accounts/tweets records. Only the fields named in
/// our types are mapped; every account receives `label`.
inline std::pair<std::vector<Account>, std::vector<Tweet>> convert_release_csv(
    std::istream& in, Label label, const std::string& origin = "release.csv") {
  csv::Row header;
  if (!csv::read_row(in, header)) throw ValidationError(origin + ": empty file");
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required :
       {"tweetid", "userid", "user_screen_name", "user_profile_description", "follower_count",
        "following_count", "account_creation_date", "tweet_language", "tweet_text", "tweet_time",
        "is_retweet"}) {
    if (!col.contains(required)) {
      throw ValidationError(fmt::format("{}: missing column '{}'", origin, required));
    }
  }
  auto parse_list = [](const std::string& s) {
    // Lists appear as "[a, b]" or "['a', 'b']".
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == '[' || c == ']' || c == '\'' || c == '"' || c == ' ') continue;
      if (c == ',') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  };

  std::vector<Account> accounts;
  std::vector<Tweet> tweets;
  std::unordered_set<std::string> seen;
  csv::Row row;
  std::size_t line = 1;
  while (csv::read_row(in, row)) {
    ++line;
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() < header.size()) {
      throw ValidationError(fmt::format("{} row {}: expected {} columns, got {}", origin, line,
                                        header.size(), row.size()));
    }
    auto get = [&](const char* name) -> const std::string& { return row[col.at(name)]; };
    auto count = [&](const char* name) -> std::int64_t {
      try {
        const auto v = std::stoll(get(name));
        if (v < 0) throw std::out_of_range("negative");
        return v;
      } catch (const std::exception&) {
        throw ValidationError(fmt::format("{} row {}: field '{}': not a non-negative integer", origin,
                                          line, name));
      }
    };
    auto when = [&](const char* name) {
      try {
        return parse_timestamp(get(name));
      } catch (const ValidationError&) {
        throw ValidationError(fmt::format("{} row {}: field '{}': invalid timestamp '{}'", origin,
                                          line, name, get(name)));
      }
    };
    const auto& uid = get("userid");
    if (seen.insert(uid).second) {
      Account a;
      a.id = uid;
      a.screen_name = detail::sanitize_utf8(get("user_screen_name"));
      a.created_at = when("account_creation_date");
      a.description = detail::sanitize_utf8(get("user_profile_description"));
      a.followers_count = count("follower_count");
      a.following_count = count("following_count");
      a.label = label;
      accounts.push_back(std::move(a));
    }
    Tweet t;
    t.id = get("tweetid");
    t.account_id = uid;
    t.text = detail::sanitize_utf8(get("tweet_text"));
    t.created_at = when("tweet_time");
    const auto& rt = get("is_retweet");
    t.is_retweet = rt == "True" || rt == "true" || rt == "1";
    t.lang = get("tweet_language").empty() ? "und" : get("tweet_language");
    auto derived = extract_entities(t.text);
    t.hashtags = col.contains("hashtags") ? parse_list(get("hashtags")) : derived.hashtags;
    t.mentions = derived.mentions;  // the release lists mention ids, not names
    t.urls = col.contains("urls") ? parse_list(get("urls")) : derived.urls;
    tweets.push_back(std::move(t));
  }
  return {std::move(accounts), std::move(tweets)};
}

// ---------------------------------------------------------------------------
// Canonical dataset serialization

inline constexpr const char* kDatasetFormat = "trolldetect-dataset";
inline constexpr int kDatasetVersion = 1;

inline json dataset_to_json(const Dataset& ds) {
  json j;
  j["meta"] = {{"sources", ds.meta.sources}, {"cap", ds.meta.cap}, {"ingested_at", ds.meta.ingested_at}};
  json counts = json::object();
  for (const auto& [label, n] : ds.counts) counts[std::string(to_string(label))] = n;
  j["counts"] = counts;
  j["orphan_tweets"] = ds.orphan_tweets;
  json tls = json::array();
  for (const auto& tl : ds.timelines) {
    json tweets = json::array();
    for (const auto& t : tl.tweets) tweets.push_back(tweet_record(t));
    tls.push_back({{"account", account_record(tl.account)}, {"tweets", std::move(tweets)}});
  }
  j["timelines"] = std::move(tls);
  return j;
}

inline Dataset dataset_from_json(const json& j) {
  Dataset ds;
  const auto& meta = j.at("meta");
  ds.meta.sources = meta.at("sources").get<std::vector<std::string>>();
  ds.meta.cap = meta.at("cap").get<std::size_t>();
  ds.meta.ingested_at = meta.at("ingested_at").get<std::string>();
  ds.orphan_tweets = j.at("orphan_tweets").get<std::size_t>();
  for (const auto& [name, n] : j.at("counts").items()) {
    const auto label = parse_label(name);
    if (!label) throw ValidationError("dataset: unknown label '" + name + "'");
    ds.counts[*label] = n.get<std::size_t>();
  }
  std::map<Label, std::size_t> recount;
  std::size_t i = 0;
  for (const auto& tl : j.at("timelines")) {
    ++i;
    Timeline t{parse_account(detail::RecordReader(tl.at("account"), "dataset timeline", i)), {}};
    for (const auto& tw : tl.at("tweets")) {
      t.tweets.push_back(parse_tweet(detail::RecordReader(tw, "dataset timeline", i)));
    }
    recount[t.account.label]++;
    ds.timelines.push_back(std::move(t));
  }
  if (recount != ds.counts) throw ValidationError("dataset: label counts do not match timelines");
  return ds;
}

inline std::string serialize_dataset(const Dataset& ds, const Provenance& prov) {
  return encode_artifact(kDatasetFormat, kDatasetVersion, prov, dataset_to_json(ds), Encoding::kCbor);
}

struct LoadedDataset {
  Dataset dataset;
  Provenance provenance;
  std::string payload_sha256;
};

inline LoadedDataset deserialize_dataset(const std::string& bytes, const std::string& origin = "dataset") {
  auto art = decode_artifact(bytes, kDatasetFormat, kDatasetVersion, Encoding::kCbor, origin);
  return {dataset_from_json(art.payload), std::move(art.provenance), std::move(art.payload_sha256)};
}

inline LoadedDataset load_dataset(const std::string& path) {
  return deserialize_dataset(read_file(path), path);
}

// ---------------------------------------------------------------------------
// Summary table

struct LabelSummary {
  Label label = Label::kUnlabeled;
  std::size_t accounts = 0;
  std::size_t tweets = 0;
  double avg_age_days = 0.0;
  double avg_followers = 0.0;
  double avg_following = 0.0;
};

struct DatasetSummary {
  std::vector<LabelSummary> rows;  // troll, control, unlabeled (present labels only)
  std::size_t total_accounts = 0;

  const LabelSummary* find(Label l) const {
    for (const auto& r : rows)
      if (r.label == l) return &r;
    return nullptr;
  }

  std::string render_markdown() const {
    auto title = [](Label l) -> std::string {
      switch (l) {
        case Label::kTroll: return "Trolls";
        case Label::kControl: return "Control Accounts";
        case Label::kUnlabeled: return "Unlabeled";
      }
      return "";
    };
    std::string out = "|  |";
    std::string rule = "|---|";
    for (const auto& r : rows) {
      out += " " + title(r.label) + " |";
      rule += "---|";
    }
    out += "\n" + rule + "\n";
    auto line = [&](const std::string& name, auto cell) {
      out += "| " + name + " |";
      for (const auto& r : rows) out += " " + cell(r) + " |";
      out += "\n";
    };
    line("Total # of Accounts", [&](const LabelSummary& r) {
      return count_with_percent(static_cast<std::int64_t>(r.accounts), static_cast<std::int64_t>(total_accounts));
    });
    line("Total # of Tweets", [](const LabelSummary& r) { return with_commas(static_cast<std::int64_t>(r.tweets)); });
    line("Avg Account Age (days)", [](const LabelSummary& r) { return fmt::format("{:.1f}", r.avg_age_days); });
    line("Avg # of Followers", [](const LabelSummary& r) { return fmt::format("{:.1f}", r.avg_followers); });
    line("Avg # of Following", [](const LabelSummary& r) { return fmt::format("{:.1f}", r.avg_following); });
    return out;
  }
};

/// Per-label account count, tweet total and mean age/followers/following.
/// Ages are whole days up to `reference_date`.
inline DatasetSummary dataset_summary(const Dataset& ds, Timestamp reference_date = default_reference_date()) {
  if (ds.timelines.empty()) throw ValidationError("dataset summary: dataset is empty");
  DatasetSummary s;
  s.total_accounts = ds.timelines.size();
  for (Label l : {Label::kTroll, Label::kControl, Label::kUnlabeled}) {
    LabelSummary row;
    row.label = l;
    double age = 0, followers = 0, following = 0;
    for (const auto& tl : ds.timelines) {
      if (tl.account.label != l) continue;
      ++row.accounts;
      row.tweets += tl.tweets.size();
      age += static_cast<double>(days_between(tl.account.created_at, reference_date));
      followers += static_cast<double>(tl.account.followers_count);
      following += static_cast<double>(tl.account.following_count);
    }
    if (row.accounts == 0) continue;
    const auto n = static_cast<double>(row.accounts);
    row.avg_age_days = age / n;
    row.avg_followers = followers / n;
    row.avg_following = following / n;
    s.rows.push_back(row);
  }
  return s;
}

}  // namespace trolldetect
