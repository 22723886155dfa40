#pragma once

#include <array>
#include <string>
#include <string_view>
#include <unordered_map>

#include "trolldetect/util/hash.hpp"

namespace trolldetect {

// The 179-entry English stop-word list. Order is significant: it fixes the
// stop-word column order of every feature schema. Entries containing an
// apostrophe can never match a token and always yield a zero rate; they are
// kept so the list stays verbatim.
inline constexpr std::array<std::string_view, 179> kStopWords = {
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're", "you've",
    "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him", "his", "himself",
    "she", "she's", "her", "hers", "herself", "it", "it's", "its", "itself", "they", "them",
    "their", "theirs", "themselves", "what", "which", "who", "whom", "this", "that", "that'll",
    "these", "those", "am", "is", "are", "was", "were", "be", "been", "being", "have", "has",
    "had", "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or",
    "because", "as", "until", "while", "of", "at", "by", "for", "with", "about", "against",
    "between", "into", "through", "during", "before", "after", "above", "below", "to", "from",
    "up", "down", "in", "out", "on", "off", "over", "under", "again", "further", "then", "once",
    "here", "there", "when", "where", "why", "how", "all", "any", "both", "each", "few", "more",
    "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than",
    "too", "very", "s", "t", "can", "will", "just", "don", "don't", "should", "should've", "now",
    "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't", "didn",
    "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven", "haven't", "isn",
    "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't", "needn", "needn't", "shan",
    "shan't", "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't",
    "wouldn", "wouldn't"};

/// Checksum of the embedded list; part of every schema and model bundle.
inline const std::string& stopword_checksum() {
  static const std::string sum = [] {
    Sha256 h;
    for (auto w : kStopWords) h.update(w).update("\n");
    return h.hex();
  }();
  return sum;
}

/// word -> position in kStopWords
inline const std::unordered_map<std::string, std::size_t>& stopword_index() {
  static const auto index = [] {
    std::unordered_map<std::string, std::size_t> m;
    for (std::size_t i = 0; i < kStopWords.size(); ++i) m.emplace(std::string(kStopWords[i]), i);
    return m;
  }();
  return index;
}

inline bool is_stopword(const std::string& token) { return stopword_index().contains(token); }

}  // namespace trolldetect
