#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "trolldetect/features.hpp"
#include "trolldetect/models/cv.hpp"
#include "trolldetect/models/model.hpp"
#include "trolldetect/sage.hpp"
#include "trolldetect/util/artifact.hpp"
#include "trolldetect/util/time.hpp"

namespace trolldetect {

struct SyntheticSpec {
  std::size_t controls = 5000;
  std::size_t trolls = 100;
  std::size_t unseen_controls = 1000;
  std::size_t unseen_trolls = 40;
  std::size_t min_tweets = 20;
  std::size_t max_tweets = 60;
  // troll signal knobs; all zero gives a null-signal corpus
  double troll_age_shift_days = 1000;
  double extra_daily_rate = 4;
  double ru_fraction = 0.1;
  double lexicon_rate = 0.3;
  double hashtag_rate = 0.3;
  std::uint64_t seed = 7;

  SyntheticSpec null_signal() const {
    SyntheticSpec s = *this;
    s.troll_age_shift_days = s.extra_daily_rate = s.ru_fraction = s.lexicon_rate = s.hashtag_rate = 0;
    return s;
  }
};

/// Everything a run depends on. Paths left empty in `run` mean "use a
/// synthetic corpus".
struct PipelineConfig {
  std::string accounts, tweets;              // labeled training inputs
  std::string score_accounts, score_tweets;  // unseen accounts
  std::string out_dir = "out";
  std::string reference_date = "2019-01-01";
  std::size_t cap = 200;
  std::size_t vocab_size = 5000;
  bool detect_lang = false;
  ModelKind model = ModelKind::kLogistic;
  double l2 = 1.0;
  double tol = 1e-4;
  int max_iter = 500;
  int max_depth = 10;
  int rounds = 50;
  int base_depth = 2;
  double threshold = 0.5;
  std::uint64_t seed = 7;
  std::size_t k = 10;
  std::string family = "all";
  unsigned workers = 1;
  std::size_t sage_top = 30;
  double sage_smoothing = 0.1;
  double sage_penalty = 0.1;
  std::size_t review_n = 50;
  SyntheticSpec synth;

  Timestamp reference() const { return parse_timestamp(reference_date); }

  std::optional<Family> family_mask() const {
    if (family == "all") return std::nullopt;
    auto f = parse_family(family);
    if (!f) throw ValidationError("config: unknown feature family '" + family + "'");
    return f;
  }

  ModelSpec model_spec() const {
    ModelSpec s;
    s.kind = model;
    s.lr.l2 = l2;
    s.lr.tol = tol;
    s.lr.max_iter = max_iter;
    s.tree.max_depth = max_depth;
    s.ada.rounds = rounds;
    s.ada.base_depth = base_depth;
    s.set_seed(seed);
    return s;
  }

  CvOptions cv_options() const {
    CvOptions o;
    o.k = k;
    o.seed = seed;
    o.family = family_mask();
    o.threshold = threshold;
    o.workers = workers;
    return o;
  }

  SageOptions sage_options() const {
    SageOptions o;
    o.smoothing = sage_smoothing;
    o.penalty_scale = sage_penalty;
    return o;
  }

  SyntheticSpec synthetic_spec() const {
    SyntheticSpec s = synth;
    s.seed = seed;
    return s;
  }

  /// Sets one key from its text form. Unknown keys and malformed values are
  /// errors.
  void set(const std::string& key, const std::string& value);

  /// Resolved settings. `out_dir` and `workers` cannot change any output
  /// byte, so they are left out.
  json to_json() const {
    return json{{"accounts", base_name(accounts)},
                {"tweets", base_name(tweets)},
                {"score_accounts", base_name(score_accounts)},
                {"score_tweets", base_name(score_tweets)},
                {"reference_date", reference_date},
                {"cap", cap},
                {"vocab_size", vocab_size},
                {"detect_lang", detect_lang},
                {"model", std::string(to_string(model))},
                {"l2", l2},
                {"tol", tol},
                {"max_iter", max_iter},
                {"max_depth", max_depth},
                {"rounds", rounds},
                {"base_depth", base_depth},
                {"threshold", threshold},
                {"seed", seed},
                {"k", k},
                {"family", family},
                {"sage_top", sage_top},
                {"sage_smoothing", sage_smoothing},
                {"sage_penalty", sage_penalty},
                {"review_n", review_n},
                {"synth",
                 {{"controls", synth.controls},
                  {"trolls", synth.trolls},
                  {"unseen_controls", synth.unseen_controls},
                  {"unseen_trolls", synth.unseen_trolls},
                  {"min_tweets", synth.min_tweets},
                  {"max_tweets", synth.max_tweets},
                  {"troll_age_shift_days", synth.troll_age_shift_days},
                  {"extra_daily_rate", synth.extra_daily_rate},
                  {"ru_fraction", synth.ru_fraction},
                  {"lexicon_rate", synth.lexicon_rate},
                  {"hashtag_rate", synth.hashtag_rate}}}};
  }

  std::string hash() const { return sha256_hex(canonical_dump(to_json())); }

  static std::string base_name(const std::string& p) {
    return p.empty() ? p : std::filesystem::path(p).filename().string();
  }
};

namespace detail {

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ValidationError("config: bad value '" + v + "' for " + key);
  return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size() && std::isfinite(d)) return d;
  } catch (const std::exception&) {
  }
  throw ValidationError("config: bad value '" + v + "' for " + key);
}

inline double parse_non_negative(const std::string& key, const std::string& v) {
  const double d = parse_real(key, v);
  if (d < 0) throw ValidationError("config: " + key + " must be >= 0");
  return d;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError("config: bad value '" + v + "' for " + key);
}

}  // namespace detail

inline void PipelineConfig::set(const std::string& key, const std::string& v) {
  using detail::parse_non_negative;
  using detail::parse_number;
  using detail::parse_real;
  if (key == "accounts") accounts = v;
  else if (key == "tweets") tweets = v;
  else if (key == "score_accounts") score_accounts = v;
  else if (key == "score_tweets") score_tweets = v;
  else if (key == "out_dir") out_dir = v;
  else if (key == "reference_date") {
    parse_timestamp(v);
    reference_date = v;
  } else if (key == "cap") cap = parse_number<std::size_t>(key, v);
  else if (key == "vocab_size") vocab_size = parse_number<std::size_t>(key, v);
  else if (key == "detect_lang") detect_lang = detail::parse_bool(key, v);
  else if (key == "model") {
    auto m = parse_model_kind(v);
    if (!m) throw ValidationError("config: model must be lr, dt or ada");
    model = *m;
  } else if (key == "l2") l2 = parse_non_negative(key, v);
  else if (key == "tol") tol = parse_real(key, v);
  else if (key == "max_iter") max_iter = parse_number<int>(key, v);
  else if (key == "max_depth") max_depth = parse_number<int>(key, v);
  else if (key == "rounds") rounds = parse_number<int>(key, v);
  else if (key == "base_depth") base_depth = parse_number<int>(key, v);
  else if (key == "threshold") threshold = parse_real(key, v);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, v);
  else if (key == "k") k = parse_number<std::size_t>(key, v);
  else if (key == "family") {
    family = v;
    family_mask();
  } else if (key == "workers") workers = parse_number<unsigned>(key, v);
  else if (key == "sage_top") sage_top = parse_number<std::size_t>(key, v);
  else if (key == "sage_smoothing") sage_smoothing = parse_non_negative(key, v);
  else if (key == "sage_penalty") sage_penalty = parse_non_negative(key, v);
  else if (key == "review_n") review_n = parse_number<std::size_t>(key, v);
  else if (key == "synth.controls") synth.controls = parse_number<std::size_t>(key, v);
  else if (key == "synth.trolls") synth.trolls = parse_number<std::size_t>(key, v);
  else if (key == "synth.unseen_controls") synth.unseen_controls = parse_number<std::size_t>(key, v);
  else if (key == "synth.unseen_trolls") synth.unseen_trolls = parse_number<std::size_t>(key, v);
  else if (key == "synth.min_tweets") synth.min_tweets = parse_number<std::size_t>(key, v);
  else if (key == "synth.max_tweets") synth.max_tweets = parse_number<std::size_t>(key, v);
  else if (key == "synth.troll_age_shift_days") synth.troll_age_shift_days = parse_non_negative(key, v);
  else if (key == "synth.extra_daily_rate") synth.extra_daily_rate = parse_non_negative(key, v);
  else if (key == "synth.ru_fraction") synth.ru_fraction = parse_non_negative(key, v);
  else if (key == "synth.lexicon_rate") synth.lexicon_rate = parse_non_negative(key, v);
  else if (key == "synth.hashtag_rate") synth.hashtag_rate = parse_non_negative(key, v);
  else throw ValidationError("config: unknown key '" + key + "'");
}

/// `key = value` lines; '#' starts a comment; blank lines are skipped.
inline std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(fmt::format("{}:{}: expected key = value", origin, n));
    auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ValidationError(fmt::format("{}:{}: empty key", origin, n));
    if (!out.emplace(key, trim(line.substr(eq + 1))).second) {
      throw ValidationError(fmt::format("{}:{}: '{}' set twice", origin, n, key));
    }
  }
  return out;
}

inline void apply_config_file(PipelineConfig& cfg, const std::string& path) {
  for (const auto& [k, v] : parse_config_text(read_file(path), path)) cfg.set(k, v);
}

}  // namespace trolldetect
