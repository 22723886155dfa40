#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "trolldetect/stopwords.hpp"
#include "trolldetect/util/utf8.hpp"

namespace trolldetect {

struct Entities {
  std::vector<std::string> hashtags;
  std::vector<std::string> mentions;
  std::vector<std::string> urls;

  bool operator==(const Entities&) const = default;
};

namespace detail {

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool starts_url(std::string_view s, std::size_t pos) {
  auto rest = s.substr(pos);
  return rest.starts_with("http://") || rest.starts_with("https://");
}

inline std::size_t url_end(std::string_view s, std::size_t pos) {
  while (pos < s.size() && !is_ascii_space(s[pos])) ++pos;
  return pos;
}

}  // namespace detail

/// Hashtags and mentions are maximal word-character runs after '#' / '@'
/// (marker stripped, case kept); URLs are maximal non-whitespace runs
/// beginning "http://" or "https://". Text inside a URL is not scanned for
/// hashtags or mentions. Results are in text order.
inline Entities extract_entities(std::string_view text) {
  Entities out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (detail::starts_url(text, pos)) {
      const std::size_t end = detail::url_end(text, pos);
      out.urls.emplace_back(text.substr(pos, end - pos));
      pos = end;
      continue;
    }
    const char c = text[pos];
    if (c == '#' || c == '@') {
      std::size_t end = pos + 1;
      while (end < text.size()) {
        std::size_t probe = end;
        if (!utf8::is_word_char(utf8::next(text, probe))) break;
        end = probe;
      }
      if (end > pos + 1) {
        auto& bucket = c == '#' ? out.hashtags : out.mentions;
        bucket.emplace_back(text.substr(pos + 1, end - pos - 1));
        pos = end;
        continue;
      }
    }
    utf8::next(text, pos);
  }
  return out;
}

/// Lowercased word tokens. URLs are dropped, then the text is split on every
/// non-word character ('#' and '@' included, so entity markers vanish).
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (detail::starts_url(text, pos)) {
      flush();
      pos = detail::url_end(text, pos);
      continue;
    }
    const char32_t cp = utf8::next(text, pos);
    if (utf8::is_word_char(cp)) {
      utf8::append(current, utf8::to_lower(cp));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

/// Unigrams over non-stop-word tokens plus bigrams over adjacent kept
/// tokens ("a b"). Stop words are removed before pairing.
inline std::vector<std::string> ngrams(const std::vector<std::string>& tokens) {
  std::vector<const std::string*> kept;
  kept.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!is_stopword(t)) kept.push_back(&t);
  }
  std::vector<std::string> out;
  out.reserve(kept.size() * 2);
  for (const auto* t : kept) out.push_back(*t);
  for (std::size_t i = 1; i < kept.size(); ++i) out.push_back(*kept[i - 1] + " " + *kept[i]);
  return out;
}

inline std::vector<std::string> ngrams(std::string_view text) { return ngrams(tokenize(text)); }

}  // namespace trolldetect
