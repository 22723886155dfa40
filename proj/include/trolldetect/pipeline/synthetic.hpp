#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "trolldetect/corpus.hpp"
#include "trolldetect/pipeline/config.hpp"
#include "trolldetect/util/rng.hpp"

namespace trolldetect {

namespace synth_words {

inline constexpr std::array<std::string_view, 24> kFunction = {
    "the", "a",    "to",   "and", "of",   "in",  "is",   "for",  "on",  "it",  "that", "with",
    "this", "be", "are", "at", "was", "have", "my", "we", "you", "so", "just", "about"};

inline constexpr std::array<std::string_view, 160> kContent = {
    "coffee",   "morning",  "weekend",  "game",     "team",     "season",   "music",    "album",    "concert",
    "movie",    "series",   "episode",  "book",     "chapter",  "garden",   "flowers",  "weather",  "rain",
    "sunshine", "snow",     "beach",    "trip",     "flight",   "airport",  "hotel",    "city",     "park",
    "dog",      "cat",      "puppy",    "kitten",   "family",   "friends",  "birthday", "party",    "dinner",
    "lunch",    "breakfast","recipe",   "pizza",    "pasta",    "salad",    "cake",     "cookies",  "bread",
    "market",   "store",    "shopping", "sale",     "price",    "phone",    "laptop",   "app",      "update",
    "software", "code",     "project",  "meeting",  "office",   "work",     "job",      "career",   "school",
    "class",    "teacher",  "student",  "exam",     "study",    "library",  "science",  "space",    "rocket",
    "planet",   "moon",     "stars",    "photo",    "camera",   "video",    "stream",   "podcast",  "interview",
    "article",  "story",    "news",     "report",   "local",    "community","volunteer","charity",  "health",
    "doctor",   "hospital", "fitness",  "running",  "yoga",     "gym",      "workout",  "marathon", "bike",
    "car",      "traffic",  "train",    "bus",      "road",     "bridge",   "river",    "lake",     "mountain",
    "hiking",   "camping",  "forest",   "autumn",   "spring",   "summer",   "winter",   "holiday",  "vacation",
    "art",      "museum",   "gallery",  "painting", "design",   "fashion",  "style",    "shoes",    "jacket",
    "football", "baseball", "basketball","soccer",  "hockey",   "tennis",   "golf",     "score",    "win",
    "loss",     "coach",    "player",   "fans",     "stadium",  "tickets",  "show",     "theater",  "comedy",
    "drama",    "band",    "guitar",   "piano",    "song",     "lyrics",   "dance",    "festival"};

inline constexpr std::array<std::string_view, 8> kLexicon = {
    "marigold", "tundra", "kestrel", "obsidian", "lantern", "quarry", "saffron", "bastion"};

inline constexpr std::array<std::string_view, 12> kControlTags = {
    "news", "music", "sports", "weather", "food", "travel", "tech", "books", "art", "health", "movies", "NFL"};

inline constexpr std::array<std::string_view, 4> kTrollTags = {"MarigoldRising", "TundraWatch", "KestrelNews",
                                                               "BastionNow"};

inline constexpr std::array<std::string_view, 24> kRussian = {
    "на",     "не",      "что",   "это",     "как",     "для",    "все",   "так",
    "его",    "только",  "россия","новости", "сегодня", "время",  "люди",  "мир",
    "страна", "город",   "день",  "год",     "работа",  "жизнь",  "дом",   "правда"};

inline constexpr std::array<std::string_view, 12> kSpanish = {"hola", "gracias", "amigos", "fiesta", "playa", "comida",
                                                              "musica", "futbol", "ciudad", "noche", "familia", "viaje"};

inline constexpr std::array<std::string_view, 12> kGerman = {"hallo", "danke", "freunde", "wetter", "essen", "musik",
                                                             "fussball", "stadt", "nacht", "familie", "reise", "arbeit"};

}  // namespace synth_words

struct SyntheticCorpus {
  std::vector<Account> accounts;
  std::vector<Tweet> tweets;
  std::vector<Account> unseen_accounts;  // labels withheld
  std::vector<Tweet> unseen_tweets;
  std::vector<std::pair<std::string, bool>> unseen_truth;  // account id, generated as troll
};

namespace detail {

class SynthWriter {
 public:
  SynthWriter(const SyntheticSpec& spec, std::uint64_t seed, std::uint64_t id_base)
      : spec_(spec), rng_(seed), next_account_(id_base), next_tweet_(id_base * 1000) {}

  void account(bool troll, Label label, std::vector<Account>& accounts, std::vector<Tweet>& tweets) {
    const Timestamp ref = default_reference_date();
    Account a;
    a.id = std::to_string(next_account_++);
    a.screen_name = "user" + a.id;
    a.label = label;

    // Every account is drawn from the control process; the troll knobs then
    // shift it. With all knobs at zero both classes share one distribution.
    double age = rng_.uniform(200.0, 4000.0);
    const double followers = std::exp(rng_.normal() * 1.5 + 5.5);
    const double following = std::exp(rng_.normal() * 1.2 + 5.8);
    const auto desc_words = static_cast<std::size_t>(rng_.below(21));
    double rate = rng_.uniform(1.0, 6.0);
    const auto n = static_cast<std::size_t>(rng_.between(static_cast<std::int64_t>(spec_.min_tweets),
                                                         static_cast<std::int64_t>(spec_.max_tweets)));
    const double mix = rng_.uniform();
    double ru = 0, other = 0;
    std::string other_lang = "en";
    if (mix < 0.2) {
      ru = rng_.uniform(0.0, 0.15);
    } else if (mix < 0.3) {
      other = rng_.uniform(0.0, 0.3);
      other_lang = rng_.bernoulli(0.5) ? "es" : "de";
    }
    std::vector<std::string_view> favourites;
    for (int i = 0; i < 30; ++i) favourites.push_back(content_word());

    const double shift_draw = rng_.uniform(0.5, 1.5);
    const double rate_draw = rng_.uniform(0.5, 1.5);
    const double ru_draw = rng_.uniform(0.0, 2.0);
    double lexicon = 0, troll_tags = 0;
    if (troll) {
      age = std::max(150.0, age - spec_.troll_age_shift_days * shift_draw);
      rate += spec_.extra_daily_rate * rate_draw;
      ru = std::min(1.0, ru + spec_.ru_fraction * ru_draw);
      lexicon = spec_.lexicon_rate;
      troll_tags = spec_.hashtag_rate;
    }

    a.created_at = ref - std::chrono::seconds(static_cast<std::int64_t>(age * 86400.0));
    a.followers_count = static_cast<std::int64_t>(followers);
    a.following_count = static_cast<std::int64_t>(following);
    for (std::size_t i = 0; i < desc_words; ++i) {
      if (i) a.description += ' ';
      a.description += content_word();
    }

    const double span_days = std::ceil(static_cast<double>(n) / rate);
    const auto end = ref - std::chrono::seconds(static_cast<std::int64_t>(rng_.uniform(1.0, 60.0) * 86400.0));
    for (std::size_t i = 0; i < n; ++i) {
      Tweet t;
      t.id = std::to_string(next_tweet_++);
      t.account_id = a.id;
      t.created_at = end - std::chrono::seconds(static_cast<std::int64_t>(rng_.uniform(0.0, span_days) * 86400.0));
      const double u = rng_.uniform();
      std::vector<std::string> words;
      if (u < ru) {
        t.lang = "ru";
        for (auto k = rng_.between(4, 10); k > 0; --k) words.emplace_back(synth_words::kRussian[rng_.below(synth_words::kRussian.size())]);
      } else if (u < ru + other) {
        t.lang = other_lang;
        const auto& pool = other_lang == "es" ? synth_words::kSpanish : synth_words::kGerman;
        for (auto k = rng_.between(4, 10); k > 0; --k) words.emplace_back(pool[rng_.below(pool.size())]);
      } else {
        t.lang = "en";
        for (auto k = rng_.between(6, 14); k > 0; --k) {
          const double w = rng_.uniform();
          if (w < 0.4) words.emplace_back(synth_words::kFunction[rng_.below(synth_words::kFunction.size())]);
          else if (w < 0.7) words.emplace_back(favourites[rng_.below(favourites.size())]);
          else words.emplace_back(content_word());
        }
        if (rng_.bernoulli(lexicon)) {
          const auto at = rng_.below(words.size() + 1);
          const auto k = rng_.below(synth_words::kLexicon.size());
          words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), std::string(synth_words::kLexicon[k]));
        }
      }
      std::string text;
      if (rng_.bernoulli(0.25)) {
        text = fmt::format("RT @user{}: ", rng_.between(1, 500));
        t.is_retweet = true;
      }
      for (std::size_t w = 0; w < words.size(); ++w) {
        if (w) text += ' ';
        text += words[w];
      }
      if (rng_.bernoulli(0.2)) text += " #" + std::string(synth_words::kControlTags[rng_.below(synth_words::kControlTags.size())]);
      if (rng_.bernoulli(troll_tags)) text += " #" + std::string(synth_words::kTrollTags[rng_.below(synth_words::kTrollTags.size())]);
      if (rng_.bernoulli(0.3)) text += fmt::format(" @user{}", rng_.between(1, 500));
      if (rng_.bernoulli(0.3)) text += fmt::format(" https://t.co/{:08x}", static_cast<std::uint32_t>(rng_.next()));
      t.text = std::move(text);
      auto ents = extract_entities(t.text);
      t.hashtags = std::move(ents.hashtags);
      t.mentions = std::move(ents.mentions);
      t.urls = std::move(ents.urls);
      tweets.push_back(std::move(t));
    }
    accounts.push_back(std::move(a));
  }

 private:
  // Skewed towards the head of the pool, like real word frequencies.
  std::string_view content_word() {
    const double u = rng_.uniform();
    return synth_words::kContent[static_cast<std::size_t>(u * u * static_cast<double>(synth_words::kContent.size()))];
  }

  const SyntheticSpec& spec_;
  Rng rng_;
  std::uint64_t next_account_;
  std::uint64_t next_tweet_;
};

}  // namespace detail

/// Seeded troll/control corpus plus an unlabeled "unseen" set drawn from the
/// same two processes.
inline SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  if (spec.controls == 0 || spec.trolls == 0) throw ValidationError("synth: control and troll counts must be positive");
  if (spec.min_tweets == 0 || spec.max_tweets < spec.min_tweets) throw ValidationError("synth: bad tweets-per-account range");
  for (double knob : {spec.troll_age_shift_days, spec.extra_daily_rate, spec.ru_fraction, spec.lexicon_rate, spec.hashtag_rate}) {
    if (!(knob >= 0)) throw ValidationError("synth: signal knobs must be >= 0");
  }
  if (spec.ru_fraction > 0.5 || spec.lexicon_rate > 1 || spec.hashtag_rate > 1) {
    throw ValidationError("synth: ru_fraction must be <= 0.5 and rates <= 1");
  }
  SyntheticCorpus c;
  {
    detail::SynthWriter w(spec, derive_seed(spec.seed, "synth"), 100000);
    std::vector<bool> order(spec.controls, false);
    order.insert(order.end(), spec.trolls, true);
    Rng mix(derive_seed(spec.seed, "synth-order"));
    mix.shuffle(order);
    for (bool troll : order) w.account(troll, troll ? Label::kTroll : Label::kControl, c.accounts, c.tweets);
  }
  {
    detail::SynthWriter w(spec, derive_seed(spec.seed, "synth-unseen"), 900000);
    std::vector<bool> order(spec.unseen_controls, false);
    order.insert(order.end(), spec.unseen_trolls, true);
    Rng mix(derive_seed(spec.seed, "synth-unseen-order"));
    mix.shuffle(order);
    for (bool troll : order) {
      w.account(troll, Label::kUnlabeled, c.unseen_accounts, c.unseen_tweets);
      c.unseen_truth.emplace_back(c.unseen_accounts.back().id, troll);
    }
  }
  return c;
}

struct SyntheticFiles {
  std::string accounts, tweets, unseen_accounts, unseen_tweets, unseen_truth;
};

inline SyntheticFiles write_synthetic(const SyntheticCorpus& c, const std::string& dir) {
  const std::filesystem::path d(dir);
  SyntheticFiles f{(d / "accounts.jsonl").string(), (d / "tweets.jsonl").string(), (d / "unseen_accounts.jsonl").string(),
                   (d / "unseen_tweets.jsonl").string(), (d / "unseen_truth.csv").string()};
  auto records = [](const auto& items, auto fn) {
    std::vector<json> out;
    out.reserve(items.size());
    for (const auto& x : items) out.push_back(fn(x));
    return out;
  };
  write_records(f.accounts, records(c.accounts, account_record));
  write_records(f.tweets, records(c.tweets, tweet_record));
  write_records(f.unseen_accounts, records(c.unseen_accounts, account_record));
  write_records(f.unseen_tweets, records(c.unseen_tweets, tweet_record));
  std::string truth = "account_id,troll\n";
  for (const auto& [id, t] : c.unseen_truth) truth += id + (t ? ",1\n" : ",0\n");
  write_file(f.unseen_truth, truth);
  return f;
}

}  // namespace trolldetect
