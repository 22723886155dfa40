#include <gtest/gtest.h>

#include <numeric>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "trolldetect/eval/agreement.hpp"
#include "trolldetect/eval/cohort.hpp"
#include "trolldetect/eval/review.hpp"

using namespace trolldetect;
using Cells = std::vector<std::vector<std::optional<double>>>;

namespace {

std::vector<std::string> ids(const std::string& prefix, int n) {
  std::vector<std::string> v;
  for (int i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i));
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Review sampling

TEST(Review, ExactPoolsAreTakenWhole) {
  const auto f = ids("f", 50), u = ids("u", 50);
  const auto s = sample_for_review(f, u, 50, 1);
  EXPECT_EQ(s.order.size(), 100u);
  EXPECT_EQ(std::set<std::string>(s.order.begin(), s.order.end()).size(), 100u);
  EXPECT_EQ(std::count_if(s.flagged.begin(), s.flagged.end(), [](const auto& kv) { return kv.second; }), 50);
  auto sorted = s.order;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_NE(sorted, s.order);
}

TEST(Review, DeterministicPerSeed) {
  const auto f = ids("f", 80), u = ids("u", 300);
  const auto a = sample_for_review(f, u, 50, 9);
  EXPECT_EQ(a.order, sample_for_review(f, u, 50, 9).order);
  EXPECT_NE(a.order, sample_for_review(f, u, 50, 10).order);
}

TEST(Review, UniformSelection) {
  const auto f = ids("f", 100), u = ids("u", 100);
  std::map<std::string, int> hits;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s)
    for (const auto& id : sample_for_review(f, u, 50, static_cast<std::uint64_t>(s)).order) hits[id]++;
  for (const auto& id : f) EXPECT_NEAR(hits[id] / double(seeds), 0.5, 0.02) << id;
  for (const auto& id : u) EXPECT_NEAR(hits[id] / double(seeds), 0.5, 0.02) << id;
}

TEST(Review, ErrorsAndKeyFiles) {
  EXPECT_THROW(sample_for_review(ids("f", 49), ids("u", 60), 50, 1), ValidationError);
  EXPECT_THROW(sample_for_review({"a", "b"}, {"b", "c"}, 1, 1), ValidationError);
  const auto s = sample_for_review(ids("f", 3), ids("u", 3), 2, 4);
  EXPECT_EQ(parse_review_key(review_key_csv(s)), s.flagged);
  EXPECT_EQ(review_sheet_csv(s).substr(0, 20), "position,account_id\n");
  EXPECT_EQ(review_sheet_csv(s).find("flag"), std::string::npos);
  EXPECT_THROW(parse_review_key("account_id,flagged\na,2\n"), ValidationError);
  EXPECT_THROW(parse_review_key("account_id,flagged\na,1\na,0\n"), ValidationError);
}

// ---------------------------------------------------------------------------
// Krippendorff's alpha

TEST(Alpha, PerfectAgreementIsExactlyOne) {
  EXPECT_EQ(krippendorff_alpha(make_rating_matrix({{3, 3, 3}, {1, 1, std::nullopt}, {5, 5, 5}})), 1.0);
  EXPECT_EQ(krippendorff_alpha(make_rating_matrix({{2, 2}, {2, 2}})), 1.0);
}

TEST(Alpha, SystematicDisagreementIsNegative) {
  const double a = krippendorff_alpha(make_rating_matrix({{1, 5}, {5, 1}}));
  EXPECT_LT(a, 0.0);
  EXPECT_NEAR(a, -0.5, 1e-12);
}

TEST(Alpha, MatchesDirectFormula) {
  Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const auto raters = static_cast<std::size_t>(rng.between(2, 5));
    auto cells = tdtest::random_ratings(rng, 20, raters, 0.2);
    cells[0] = std::vector<std::optional<double>>(raters, 1.0);
    cells[1] = std::vector<std::optional<double>>(raters, 5.0);
    EXPECT_NEAR(krippendorff_alpha(make_rating_matrix(cells)), tdtest::alpha_pairwise(cells), 1e-9);
  }
}

TEST(Alpha, PermutationInvariant) {
  Rng rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    auto cells = tdtest::random_ratings(rng, 15, 4, 0.1);
    cells[0] = {1.0, 1.0, 5.0, 5.0};
    const double a = krippendorff_alpha(make_rating_matrix(cells));
    auto rows = cells;
    rng.shuffle(rows);
    EXPECT_NEAR(krippendorff_alpha(make_rating_matrix(rows)), a, 1e-12);
    std::vector<std::size_t> perm{2, 0, 3, 1};
    Cells cols(cells.size(), std::vector<std::optional<double>>(4));
    for (std::size_t i = 0; i < cells.size(); ++i)
      for (std::size_t j = 0; j < 4; ++j) cols[i][j] = cells[i][perm[j]];
    EXPECT_NEAR(krippendorff_alpha(make_rating_matrix(cols)), a, 1e-12);
  }
}

TEST(Alpha, DuplicatingAnAgreeingRowDoesNotLowerAlpha) {
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    auto cells = tdtest::random_ratings(rng, 10, 3, 0.0);
    const double before = krippendorff_alpha(make_rating_matrix(cells));
    if (before <= 0) continue;
    cells.push_back({4.0, 4.0, 4.0});
    const double after = krippendorff_alpha(make_rating_matrix(cells));
    EXPECT_NEAR(after, tdtest::alpha_pairwise(cells), 1e-9);
    EXPECT_GE(after, before - 1e-12);
  }
}

TEST(Alpha, NeedsTwoPairableValues) {
  EXPECT_THROW(krippendorff_alpha(make_rating_matrix({{3, std::nullopt}, {std::nullopt, 4}})), ValidationError);
  EXPECT_THROW(make_rating_matrix({{1, 2}, {3}}), ValidationError);
}

TEST(Ratings, ParseCsv) {
  const auto m = parse_ratings_csv("account_id,rater_id,rating\na,r1,3\na,r2,4\nb,r2,5\n");
  EXPECT_EQ(m.accounts, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(m.raters, (std::vector<std::string>{"r1", "r2"}));
  EXPECT_EQ(m.cells[1][0], std::nullopt);
  EXPECT_EQ(m.cells[1][1], 5.0);
  EXPECT_THROW(parse_ratings_csv("account_id,rater_id,rating\na,r1,6\n"), ValidationError);
  EXPECT_THROW(parse_ratings_csv("account_id,rater_id,rating\na,r1,3\na,r1,4\n"), ValidationError);
  EXPECT_THROW(parse_ratings_csv("id,rater,rating\n"), ValidationError);
}

// ---------------------------------------------------------------------------
// Aggregation

TEST(Aggregate, MeansAndMissingCells) {
  auto m = make_rating_matrix({{3, 3, 4}, {5, std::nullopt, 4}, {1, 2, 1}});
  const auto rep = aggregate_ratings(m, {{"a1", true}, {"a2", true}, {"a3", false}});
  EXPECT_DOUBLE_EQ(rep.account_mean.at("a1"), 10.0 / 3.0);
  EXPECT_DOUBLE_EQ(rep.account_mean.at("a2"), 4.5);
  EXPECT_EQ(rep.flagged.accounts, 2u);
  EXPECT_EQ(rep.flagged.mean_above_3, 2u);
  EXPECT_EQ(rep.flagged.majority_above_3, 1u);
  EXPECT_DOUBLE_EQ(rep.flagged.median, (10.0 / 3.0 + 4.5) / 2);
  EXPECT_THROW(aggregate_ratings(m, {{"a1", true}}), ValidationError);
}

TEST(Aggregate, HalfOfFiftyFlaggedAboveThree) {
  Cells cells;
  std::map<std::string, bool> key;
  for (int i = 0; i < 50; ++i) {
    cells.push_back(i < 25 ? std::vector<std::optional<double>>{4, 4, 3} : std::vector<std::optional<double>>{3, 2, 3});
    cells.push_back({1, 2, 2});
  }
  auto m = make_rating_matrix(cells);
  for (std::size_t i = 0; i < m.rows(); ++i) key[m.accounts[i]] = i % 2 == 0;
  const auto rep = aggregate_ratings(m, key);
  EXPECT_EQ(rep.flagged.accounts, 50u);
  EXPECT_EQ(rep.flagged.mean_above_3, 25u);
  EXPECT_NE(rep.render_markdown().find("| Mean rating above 3 | 25 (50.0%) | 0 (0.0%) |"), std::string::npos)
      << rep.render_markdown();
}

TEST(Aggregate, Median) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
  EXPECT_EQ(median({}), 0.0);
}

// ---------------------------------------------------------------------------
// Cohorts

TEST(Cohorts, SingleAccountCohortsEchoTheAccount) {
  using tdtest::account;
  using tdtest::tweet;
  Timeline a{account("a", Label::kUnlabeled, "2018-12-02", 10, 4), {}};
  a.tweets = {tweet("3", "a", "2018-12-30", "#MAGA #Trump"), tweet("2", "a", "2018-12-29", "#MAGA x"),
              tweet("1", "a", "2018-12-28", "#MAGA", "es")};
  Timeline b{account("b", Label::kUnlabeled, "2017-01-01", 1, 2), {tweet("4", "b", "2018-12-01", "hi")}};
  const auto rep = cohort_compare({&a}, {&b});
  EXPECT_EQ(rep.flagged.accounts, 1);
  EXPECT_DOUBLE_EQ(rep.flagged.avg_age_days, 30);
  EXPECT_DOUBLE_EQ(rep.flagged.avg_followers, 10);
  EXPECT_DOUBLE_EQ(rep.flagged.avg_following, 4);
  EXPECT_EQ(rep.flagged.total_tweets, 3);
  EXPECT_DOUBLE_EQ(rep.flagged.avg_daily_mean, 1.0);
  EXPECT_DOUBLE_EQ(rep.flagged.avg_daily_sigma, 0.0);
  EXPECT_EQ(rep.flagged.hashtags, (Tally{{"MAGA", 3}, {"Trump", 1}}));
  EXPECT_EQ(rep.flagged.languages, (Tally{{"en", 2}, {"es", 1}}));
  EXPECT_THROW(cohort_compare({}, {&b}), ValidationError);
}

TEST(Cohorts, TopKOrder) {
  EXPECT_EQ(top_k({{"b", 2}, {"a", 2}, {"c", 5}, {"d", 1}}, 3), (Tally{{"c", 5}, {"a", 2}, {"b", 2}}));
}

TEST(Cohorts, PaperShapedFixtureRendersExactly) {
  const auto md = tdtest::paper_cohort_report().render_markdown();
  for (const auto& row : tdtest::paper_cohort_rows()) EXPECT_NE(md.find(row + "\n"), std::string::npos) << row << "\n" << md;
  EXPECT_NE(tdtest::paper_flag_summary().render_markdown().find("| # of Unique flagged accounts | 1,466 (3.7%) |"),
            std::string::npos);
}
