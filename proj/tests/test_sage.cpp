#include <gtest/gtest.h>

#include "sage_cases.hpp"
#include "support.hpp"

using namespace trolldetect;

namespace {

double max_abs_eta(const SageFit& fit) {
  double m = 0;
  for (double e : fit.eta) m = std::max(m, std::abs(e));
  return m;
}

SageOptions unpenalized() {
  SageOptions o;
  o.penalty_scale = 0;
  o.tol = 1e-12;
  o.max_iter = 5000;
  return o;
}

}  // namespace

TEST(Sage, IdenticalCorporaGiveZero) {
  const auto c = corpus_counts({{"cat", 40}, {"dog", 25}, {"bird", 3}, {"cat dog", 1}});
  const auto fit = sage_fit(c, c);
  EXPECT_TRUE(fit.converged);
  EXPECT_LE(max_abs_eta(fit), 1e-6);

  Rng rng(5);
  std::vector<double> w(300);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = 1.0 / static_cast<double>(j + 1);
  const auto big = tdtest::draw_corpus(rng, w, 50000);
  EXPECT_LE(max_abs_eta(sage_fit(big, big)), 1e-6);
}

TEST(Sage, SignFollowsLogOdds) {
  const auto fit = sage_fit(corpus_counts({{"a", 1}, {"b", 99}}), corpus_counts({{"a", 1}, {"b", 1}}));
  EXPECT_GT(fit.eta_of("b"), 0.0);
  EXPECT_LT(fit.eta_of("a"), 0.0);
}

TEST(Sage, UnpenalizedMatchesClosedForm) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    CorpusCounts t, b;
    const auto V = static_cast<std::size_t>(rng.between(2, 20));
    for (std::size_t j = 0; j < V; ++j) {
      t.add(tdtest::term_name(j), rng.between(1, 500));
      b.add(tdtest::term_name(j), rng.between(0, 500));
    }
    const auto fit = sage_fit(t, b, unpenalized());
    EXPECT_TRUE(fit.converged);
    EXPECT_LE(tdtest::closed_form_error(fit, t), 1e-6);
  }
}

TEST(Sage, SeededPerturbationIsSparse) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto p = tdtest::seeded_corpora(seed);
    const auto fit = sage_fit(p.treatment, p.base);
    EXPECT_GE(tdtest::near_zero_share(fit, p.seeded), 0.9);
    // The seeded terms should lead the ranking.
    const auto top = sage_report(fit, p.treatment, p.base, 5);
    for (const auto& r : top) EXPECT_TRUE(p.seeded.contains(r.term)) << r.term;
  }
}

TEST(Sage, ScalingBothCorporaKeepsRanking) {
  Rng rng(7);
  CorpusCounts t, b, t3, b3;
  for (std::size_t j = 0; j < 15; ++j) {
    const auto ct = rng.between(0, 200), cb = rng.between(1, 200);
    t.add(tdtest::term_name(j), ct);
    b.add(tdtest::term_name(j), cb);
    t3.add(tdtest::term_name(j), 3 * ct);
    b3.add(tdtest::term_name(j), 3 * cb);
  }
  SageOptions o;
  o.smoothing = 0;
  auto order = [](const std::vector<SageResult>& rows) {
    std::vector<std::string> v;
    for (const auto& r : rows) v.push_back(r.term);
    return v;
  };
  const auto r1 = sage_report(sage_fit(t, b, o), t, b, 15);
  const auto r3 = sage_report(sage_fit(t3, b3, o), t3, b3, 15);
  EXPECT_EQ(order(r1), order(r3));
  for (std::size_t i = 0; i < r1.size(); ++i) {
    EXPECT_DOUBLE_EQ(r1[i].treatment_rate, r3[i].treatment_rate);
    EXPECT_DOUBLE_EQ(r1[i].base_rate, r3[i].base_rate);
  }
}

TEST(Sage, ObjectiveNeverDecreases) {
  for (std::uint64_t seed : {4u, 5u}) {
    const auto p = tdtest::seeded_corpora(seed);
    const auto fit = sage_fit(p.treatment, p.base);
    ASSERT_GE(fit.objective.size(), 2u);
    for (std::size_t i = 1; i < fit.objective.size(); ++i) {
      EXPECT_GE(fit.objective[i], fit.objective[i - 1] - 1e-9 * std::abs(fit.objective[i - 1]));
    }
  }
}

TEST(Sage, AbsentTermIsNotPositive) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    CorpusCounts t, b;
    for (std::size_t j = 0; j < 12; ++j) {
      if (j % 3 != 0) t.add(tdtest::term_name(j), rng.between(1, 50));
      b.add(tdtest::term_name(j), rng.between(1, 50));
    }
    for (const auto& opt : {SageOptions{}, unpenalized()}) {
      const auto fit = sage_fit(t, b, opt);
      for (std::size_t j = 0; j < 12; j += 3) EXPECT_LE(fit.eta_of(tdtest::term_name(j)), 0.0);
    }
  }
}

TEST(Sage, NonConvergenceIsFlagged) {
  const auto p = tdtest::seeded_corpora(9);
  SageOptions o;
  o.max_iter = 1;
  o.tol = 1e-15;
  const auto fit = sage_fit(p.treatment, p.base, o);
  EXPECT_FALSE(fit.converged);
  EXPECT_EQ(fit.iterations, 1);
}

TEST(Sage, Errors) {
  const auto c = corpus_counts({{"a", 1}});
  EXPECT_THROW(sage_fit(CorpusCounts{}, c), ValidationError);
  EXPECT_THROW(sage_fit(c, CorpusCounts{}), ValidationError);
  SageOptions o;
  o.smoothing = 0;
  EXPECT_THROW(sage_fit(corpus_counts({{"b", 1}}), c, o), ValidationError);
  CorpusCounts neg;
  EXPECT_THROW(neg.add("x", -1), ValidationError);
}

TEST(SageReport, TiesAndTruncation) {
  SageFit fit;
  fit.terms = {"a", "b", "c", "d"};
  fit.eta = {0.0, 0.0, 0.0, 1.0};
  const auto t = corpus_counts({{"a", 5}, {"b", 9}, {"c", 5}, {"d", 1}});
  const auto b = corpus_counts({{"a", 1}});
  const auto rows = sage_report(fit, t, b, 10);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].term, "d");
  EXPECT_EQ(rows[1].term, "b");
  EXPECT_EQ(rows[2].term, "a");
  EXPECT_EQ(rows[3].term, "c");
  EXPECT_TRUE(sage_report(fit, t, b, 0).empty());
  EXPECT_DOUBLE_EQ(rows[1].treatment_rate, 0.45);
}

TEST(SageReport, CsvColumns) {
  SageResult r{"tune in", 1.234, 12498, 3, 12498.0 / 1.84e6, 3.0 / 1.84e6};
  SageResult z{"x,y", -0.001, 0, 1, 0.0, 0.5};
  EXPECT_EQ(sage_csv({r, z}),
            "rank,ngram,sage,treatment_count,treatment_rate,base_count,base_rate\n"
            "1,tune in,1.23,12498,0.0068,3,1.6e-06\n"
            "2,\"x,y\",0.00,0,0,1,0.5\n");
}

TEST(SageCounts, FromDataset) {
  using tdtest::account;
  using tdtest::tweet;
  const auto ds = build_timelines({account("a", Label::kTroll), account("b")},
                                  {tweet("1", "a", "2018-12-01", "the cat sat"), tweet("2", "b", "2018-12-01", "dog")});
  const auto t = corpus_counts(ds, Label::kTroll);
  EXPECT_EQ(t.count("cat sat"), 1);
  EXPECT_EQ(t.count("the"), 0);
  EXPECT_EQ(t.total, 3);
  EXPECT_EQ(corpus_counts(ds).total, 4);
}
