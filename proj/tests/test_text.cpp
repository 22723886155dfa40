#include <gtest/gtest.h>

#include <set>

#include "trolldetect/stopwords.hpp"
#include "trolldetect/text.hpp"
#include "trolldetect/util/rng.hpp"

using namespace trolldetect;
using V = std::vector<std::string>;

TEST(Entities, Empty) { EXPECT_EQ(extract_entities(""), Entities{}); }

TEST(Entities, OneOfEach) {
  const auto e = extract_entities("#MAGA hello @jane https://t.co/x");
  EXPECT_EQ(e.hashtags, V{"MAGA"});
  EXPECT_EQ(e.mentions, V{"jane"});
  EXPECT_EQ(e.urls, V{"https://t.co/x"});
}

TEST(Entities, AdjacentMarkers) {
  const auto e = extract_entities("##a#b");
  EXPECT_EQ(e.hashtags, (V{"a", "b"}));
  EXPECT_TRUE(e.mentions.empty());
  EXPECT_TRUE(e.urls.empty());
}

TEST(Entities, UrlsAreOpaque) {
  const auto e = extract_entities("see http://x.y/#frag@z and #tag, @who. httpx://no");
  EXPECT_EQ(e.urls, V{"http://x.y/#frag@z"});
  EXPECT_EQ(e.hashtags, V{"tag"});
  EXPECT_EQ(e.mentions, V{"who"});
}

TEST(Entities, NonAsciiWordCharacters) {
  const auto e = extract_entities("#Россия_2018! @Zoë");
  EXPECT_EQ(e.hashtags, V{"Россия_2018"});
  EXPECT_EQ(e.mentions, V{"Zoë"});
}

TEST(Entities, IdempotentOnBareTag) {
  Rng rng(3);
  const std::string alphabet = "abcXYZ019_";
  for (int i = 0; i < 200; ++i) {
    std::string tag;
    for (auto n = rng.between(1, 12); n > 0; --n) tag.push_back(alphabet[rng.below(alphabet.size())]);
    const auto e = extract_entities("#" + tag);
    ASSERT_EQ(e.hashtags, V{tag});
    EXPECT_EQ(extract_entities("#" + e.hashtags[0]).hashtags, e.hashtags);
  }
}

TEST(Tokenize, SpecExamples) {
  EXPECT_EQ(tokenize("The cat, the CAT"), (V{"the", "cat", "the", "cat"}));
  EXPECT_EQ(tokenize("#MAGA https://x.co win!"), (V{"maga", "win"}));
  EXPECT_EQ(tokenize("don't"), (V{"don", "t"}));
  EXPECT_EQ(tokenize(""), V{});
  EXPECT_EQ(tokenize("snake_case ВОТ"), (V{"snake_case", "вот"}));
}

TEST(Ngrams, StopWordsRemovedBeforePairing) {
  EXPECT_EQ(ngrams("the dog"), V{"dog"});
  EXPECT_EQ(ngrams("the dog and the cat sat"), (V{"dog", "cat", "sat", "dog cat", "cat sat"}));
  EXPECT_EQ(ngrams("xx a zz"), (V{"xx", "zz", "xx zz"}));
}

TEST(StopWords, ListShape) {
  EXPECT_EQ(kStopWords.size(), 179u);
  EXPECT_EQ(std::set<std::string_view>(kStopWords.begin(), kStopWords.end()).size(), 179u);
  EXPECT_EQ(kStopWords.front(), "i");
  EXPECT_EQ(kStopWords.back(), "wouldn't");
  EXPECT_TRUE(is_stopword("the"));
  EXPECT_FALSE(is_stopword("cat"));
  EXPECT_EQ(stopword_checksum().size(), 64u);
}
