#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "support.hpp"
#include "trolldetect/models/cv.hpp"
#include "trolldetect/models/metrics.hpp"
#include "trolldetect/models/model.hpp"

using namespace trolldetect;

namespace {

struct Problem {
  Eigen::MatrixXd dense;
  SparseRows X;
  std::vector<int> y;
};

/// Labels from a noisy linear rule; about a third of the entries are zero.
Problem random_problem(Rng& rng, int n, int d, bool integer_values = false) {
  Problem p;
  p.dense = Eigen::MatrixXd::Zero(n, d);
  Eigen::VectorXd w(d);
  for (int j = 0; j < d; ++j) w[j] = rng.normal();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      if (rng.bernoulli(0.67)) p.dense(i, j) = integer_values ? static_cast<double>(rng.between(1, 4)) : rng.normal();
  for (int i = 0; i < n; ++i) p.y.push_back(p.dense.row(i).dot(w) + 0.5 * rng.normal() > 0 ? 1 : 0);
  if (std::count(p.y.begin(), p.y.end(), 1) == 0) p.y[0] = 1;
  if (std::count(p.y.begin(), p.y.end(), 0) == 0) p.y[0] = 0;
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) rows[i][j] = p.dense(i, j);
  p.X = tdtest::sparse(rows);
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Metrics

TEST(Auc, Examples) {
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{1, 1, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, std::vector<int>{1, 0, 1, 0}), 0.5);
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.9, 0.3, 0.5, 0.1}, std::vector<int>{1, 1, 0, 0}), 0.75);
  EXPECT_THROW(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), ValidationError);
}

TEST(Auc, MatchesPairCountingOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(rng.between(2, 60));
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.between(0, 8)) / 8.0;  // coarse grid forces ties
      y[i] = rng.bernoulli(0.4) ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_NEAR(auc(s, y), tdtest::auc_pairs(s, y), 1e-12);
  }
}

TEST(Auc, InvariantUnderMonotoneTransform) {
  Rng rng(12);
  std::vector<double> s(100), t(100);
  std::vector<int> y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    s[i] = rng.normal();
    t[i] = std::exp(3 * s[i]) + 7;
    y[i] = rng.bernoulli(0.5) ? 1 : 0;
  }
  EXPECT_DOUBLE_EQ(auc(s, y), auc(t, y));
}

TEST(Metrics, ImbalancedAllNegative) {
  std::vector<double> p(1000, 0.1);
  std::vector<int> y(1000, 0);
  for (int i = 0; i < 14; ++i) y[static_cast<std::size_t>(i)] = 1;
  const auto m = evaluate(p, y);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.986);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f1, 0.0);
  EXPECT_DOUBLE_EQ(m.auc, 0.5);
}

TEST(Metrics, ThresholdIsInclusive) {
  const auto m = evaluate(std::vector<double>{0.5, 0.49}, std::vector<int>{1, 0}, 0.5);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_TRUE(std::isnan(evaluate(std::vector<double>{0.5}, std::vector<int>{1}).auc));
}

// ---------------------------------------------------------------------------
// Logistic regression

TEST(Logistic, GradientMatchesFiniteDifferences) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_problem(rng, 30, 6);
    const auto st = Standardizer::fit(p.X);
    const LogisticObjective f(p.X, p.y, st, 1.0);
    Eigen::VectorXd theta(f.dim());
    for (Eigen::Index k = 0; k < theta.size(); ++k) theta[k] = 0.5 * rng.normal();
    EXPECT_LE(tdtest::gradient_check(f, theta), 1e-4);
  }
}

TEST(Logistic, LossDecreasesAndConverges) {
  Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = random_problem(rng, 80, 8);
    const auto m = train_logistic(p.X, p.y);
    ASSERT_GE(m.loss_history.size(), 2u);
    for (std::size_t i = 1; i < m.loss_history.size(); ++i) EXPECT_LT(m.loss_history[i], m.loss_history[i - 1]);
    EXPECT_TRUE(m.converged);
    EXPECT_LE(m.gradient_norm, 1e-4);
  }
}

TEST(Logistic, AffineColumnRescaleKeepsRanking) {
  Rng rng(23);
  auto p = random_problem(rng, 60, 5);
  Eigen::MatrixXd scaled = p.dense;
  scaled.col(2) = scaled.col(2) * 1000.0;
  scaled.col(3) = scaled.col(3) * 0.01;
  std::vector<std::vector<double>> rows(60, std::vector<double>(5));
  for (int i = 0; i < 60; ++i)
    for (int j = 0; j < 5; ++j) rows[i][j] = scaled(i, j);
  const auto Xs = tdtest::sparse(rows);
  LogisticOptions opt;
  opt.tol = 1e-8;
  opt.max_iter = 5000;
  const auto a = train_logistic(p.X, p.y, opt).predict_proba(p.X);
  const auto b = train_logistic(Xs, p.y, opt).predict_proba(Xs);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-6);
}

TEST(Logistic, DeterministicAndSeparable) {
  auto X = tdtest::sparse({{0}, {1}, {2}, {3}, {4}, {5}});
  const std::vector<int> y{0, 0, 0, 1, 1, 1};
  const auto a = train_logistic(X, y);
  const auto b = train_logistic(X, y);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
  const auto p = a.predict_proba(X);
  EXPECT_LT(p[2], 0.5);
  EXPECT_GT(p[3], 0.5);
  EXPECT_DOUBLE_EQ(auc(p, y), 1.0);
}

TEST(Logistic, ConstantColumnGetsZeroWeightAndBadInputThrows) {
  auto X = tdtest::sparse({{1, 0}, {1, 1}, {1, 2}, {1, 3}});
  const std::vector<int> y{0, 0, 1, 1};
  const auto m = train_logistic(X, y);
  EXPECT_NEAR(m.weights[0], 0.0, 1e-12);
  EXPECT_THROW(train_logistic(X, std::vector<int>{1, 1, 1, 1}), ValidationError);
  EXPECT_THROW(train_logistic(X, std::vector<int>{0, 1, 2, 1}), ValidationError);
  EXPECT_THROW(train_logistic(X, std::vector<int>{0, 1}), ValidationError);
  LogisticOptions neg;
  neg.l2 = -1;
  EXPECT_THROW(train_logistic(X, y, neg), ValidationError);
}

// ---------------------------------------------------------------------------
// Trees and boosting

TEST(Tree, RootSplitMatchesExhaustiveSearch) {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = random_problem(rng, 20, 4, trial % 2 == 0);
    const auto choice = best_root_split(p.X, p.y);
    const double best = tdtest::best_gini_gain(p.dense, p.y);
    EXPECT_NEAR(choice.gain, best, 1e-12);
    if (best > 0) {
      ASSERT_GE(choice.feature, 0);
      EXPECT_NEAR(tdtest::gini_gain(p.dense, p.y, choice.feature, choice.threshold), best, 1e-12);
    }
  }
}

TEST(Tree, TieBreaksToLowestColumnThenThreshold) {
  // Columns 0 and 1 are identical; both separate perfectly at 1.5.
  auto X = tdtest::sparse({{1, 1}, {1, 1}, {2, 2}, {2, 2}});
  const auto c = best_root_split(X, std::vector<int>{0, 0, 1, 1});
  EXPECT_EQ(c.feature, 0);
  EXPECT_DOUBLE_EQ(c.threshold, 1.5);
}

TEST(Tree, DepthLimitAndPurity) {
  Rng rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = random_problem(rng, 200, 6);
    const auto full = train_tree(p.X, p.y);
    EXPECT_LE(full.depth(), 10);
    const auto stump = train_tree(p.X, p.y, TreeOptions{1, 7});
    EXPECT_LE(stump.depth(), 1);
    EXPECT_EQ(TreeModel::from_json(full.to_json()).predict_proba(p.X), full.predict_proba(p.X));
  }
  auto X = tdtest::sparse({{0}, {1}, {2}, {3}});
  const auto t = train_tree(X, std::vector<int>{0, 1, 0, 1});
  EXPECT_EQ(t.predict_proba(X), (std::vector<double>{0, 1, 0, 1}));
}

TEST(Tree, SplitThresholdStaysBetweenNeighbours) {
  EXPECT_DOUBLE_EQ(split_threshold(1.0, 2.0), 1.5);
  const double lo = 1.0, hi = std::nextafter(1.0, 2.0);
  const double t = split_threshold(lo, hi);
  EXPECT_LE(lo, t);
  EXPECT_LT(t, hi);
}

TEST(AdaBoost, LearnsMajorityAndStopsWhenPerfect) {
  // Majority of three bits needs depth 3; boosted depth-2 trees get there.
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int b = 0; b < 8; ++b) {
    rows.push_back({double(b & 1), double((b >> 1) & 1), double((b >> 2) & 1)});
    y.push_back(((b & 1) + ((b >> 1) & 1) + ((b >> 2) & 1)) >= 2 ? 1 : 0);
  }
  const auto X = tdtest::sparse(rows);
  const auto single = train_tree(X, y, TreeOptions{2, 7});
  const auto sp = single.predict_proba(X);
  int tree_errors = 0;
  for (std::size_t i = 0; i < y.size(); ++i) tree_errors += (sp[i] >= 0.5) != (y[i] == 1);
  EXPECT_GT(tree_errors, 0);
  const auto m = train_adaboost(X, y);
  const auto p = m.predict_proba(X);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(p[i] >= 0.5, y[i] == 1) << i;

  const auto easy = tdtest::sparse({{0}, {1}, {2}, {3}});
  EXPECT_EQ(train_adaboost(easy, std::vector<int>{0, 0, 1, 1}).stages.size(), 1u);
  EXPECT_NEAR(stage_alpha(0.25), 0.5 * std::log(3.0), 1e-15);
}

TEST(AdaBoost, BeatsASingleStumpOnNoisyData) {
  Rng rng(33);
  auto p = random_problem(rng, 300, 5);
  AdaBoostOptions opt;
  opt.base_depth = 1;
  const auto boosted = train_adaboost(p.X, p.y, opt);
  const auto stump = train_tree(p.X, p.y, TreeOptions{1, 7});
  EXPECT_GT(auc(boosted.predict_proba(p.X), p.y), auc(stump.predict_proba(p.X), p.y));
  EXPECT_LE(boosted.stages.size(), 50u);
  EXPECT_EQ(BoostedModel::from_json(boosted.to_json()).predict_proba(p.X), boosted.predict_proba(p.X));
}

// ---------------------------------------------------------------------------
// Bundles

TEST(Bundle, RoundTripAndSchemaMismatch) {
  using tdtest::account;
  using tdtest::tweet;
  auto ds = build_timelines({account("a", Label::kTroll), account("b"), account("c", Label::kTroll), account("d")},
                            {tweet("1", "a", "2018-12-01", "cat cat"), tweet("2", "b", "2018-12-01", "dog"),
                             tweet("3", "c", "2018-12-01", "cat"), tweet("4", "d", "2018-12-01", "dog bird")});
  const auto m = featurize_dataset(ds, build_schema(ds, 10), default_reference_date(), nullptr).matrix;
  for (auto kind : {ModelKind::kLogistic, ModelKind::kTree, ModelKind::kAdaBoost}) {
    ModelSpec spec;
    spec.kind = kind;
    const auto b = train_bundle(m, spec, Provenance{"h", {}});
    const auto text = serialize_bundle(b);
    const auto back = deserialize_bundle(text);
    EXPECT_EQ(back.predict_proba(m), b.predict_proba(m));
    EXPECT_EQ(serialize_bundle(back), text);
  }
  LabeledMatrix other = m;
  other.schema = make_schema({"en", "fr"}, m.schema.vocabulary);
  const auto b = train_bundle(m, ModelSpec{}, Provenance{"h", {}});
  EXPECT_THROW(b.predict_proba(other), ValidationError);
}

// ---------------------------------------------------------------------------
// Cross-validation

TEST(Folds, StratifiedAndBalanced) {
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto k = static_cast<std::size_t>(rng.between(2, 10));
    const auto npos = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(k), 40));
    const auto nneg = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(k), 200));
    std::vector<int> y(npos, 1);
    y.resize(npos + nneg, 0);
    rng.shuffle(y);
    const auto fold = stratified_folds(y, k, static_cast<std::uint64_t>(trial));
    std::vector<std::size_t> size(k), pos(k);
    for (std::size_t i = 0; i < y.size(); ++i) {
      ASSERT_GE(fold[i], 0);
      ASSERT_LT(fold[i], static_cast<int>(k));
      size[static_cast<std::size_t>(fold[i])]++;
      pos[static_cast<std::size_t>(fold[i])] += static_cast<std::size_t>(y[i]);
    }
    EXPECT_LE(*std::max_element(size.begin(), size.end()) - *std::min_element(size.begin(), size.end()), 1u);
    EXPECT_LE(*std::max_element(pos.begin(), pos.end()) - *std::min_element(pos.begin(), pos.end()), 1u);
    EXPECT_EQ(stratified_folds(y, k, static_cast<std::uint64_t>(trial)), fold);
  }
  EXPECT_THROW(stratified_folds(std::vector<int>{1, 0, 0, 0}, 2, 1), ValidationError);
  EXPECT_THROW(stratified_folds(std::vector<int>{1, 1, 0, 0}, 1, 1), ValidationError);
}

namespace {

LabeledMatrix labelled_matrix(Rng& rng, int n, double signal) {
  using tdtest::account;
  using tdtest::tweet;
  std::vector<Account> accounts;
  std::vector<Tweet> tweets;
  for (int i = 0; i < n; ++i) {
    const bool troll = i % 5 == 0;
    const auto id = std::to_string(i);
    accounts.push_back(account(id, troll ? Label::kTroll : Label::kControl, "2018-01-01",
                               rng.between(0, 100), rng.between(0, 100)));
    const std::string word = (troll && rng.bernoulli(signal)) ? "marigold" : (rng.bernoulli(0.5) ? "cat" : "dog");
    tweets.push_back(tweet(id, id, "2018-12-01T10:00:00Z", word + " sat"));
  }
  auto ds = build_timelines(std::move(accounts), std::move(tweets));
  return featurize_dataset(ds, build_schema(ds, 20), default_reference_date(), nullptr).matrix;
}

}  // namespace

TEST(CrossValidation, OracleTrainerScoresPerfectly) {
  Rng rng(42);
  auto m = labelled_matrix(rng, 100, 1.0);
  // The first column holds the label, so a trainer that reads it back is perfect.
  std::vector<Eigen::Triplet<double, std::int64_t>> trip;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    trip.emplace_back(static_cast<std::int64_t>(r), 0, m.labels[r] == Label::kTroll ? 1.0 : 0.0);
    trip.emplace_back(static_cast<std::int64_t>(r), 1, 1.0);
  }
  m.X.setZero();
  m.X.setFromTriplets(trip.begin(), trip.end());
  Trainer oracle = [](const SparseRows&, std::span<const int>) -> Scorer {
    return [](const SparseRows& X) {
      std::vector<double> p;
      for (Eigen::Index r = 0; r < X.rows(); ++r) p.push_back(sparse_at(X, r, 0));
      return p;
    };
  };
  CvOptions opt;
  opt.k = 5;
  opt.family = Family::kProfile;
  const auto rep = cross_validate(m, oracle, opt, "oracle");
  EXPECT_EQ(rep.mean.precision, 1.0);
  EXPECT_EQ(rep.mean.recall, 1.0);
  EXPECT_EQ(rep.mean.auc, 1.0);
  EXPECT_EQ(rep.mean.accuracy, 1.0);
  EXPECT_EQ(rep.folds.size(), 5u);
}

TEST(CrossValidation, SignalIsFoundAndWorkersAgree) {
  Rng rng(43);
  const auto m = labelled_matrix(rng, 200, 0.9);
  CvOptions opt;
  opt.k = 5;
  const auto seq = cross_validate(m, ModelSpec{}, opt);
  EXPECT_GT(seq.mean.auc, 0.9);
  opt.workers = 3;
  const auto par = cross_validate(m, ModelSpec{}, opt);
  EXPECT_EQ(seq.to_csv(), par.to_csv());
  EXPECT_NE(seq.to_csv().find("\nmean,lr,all,"), std::string::npos);
}

TEST(CrossValidation, FamilyRestrictsColumns) {
  Rng rng(44);
  const auto m = labelled_matrix(rng, 100, 1.0);
  std::int64_t cols = 0;
  std::vector<int> rows(m.rows());
  std::iota(rows.begin(), rows.end(), 0);
  detail::fold_columns(m, rows, Family::kBehavior, cols);
  EXPECT_EQ(cols, 10);
  detail::fold_columns(m, {0}, Family::kBow, cols);
  // Row 0 is a troll tweeting "marigold sat": three nonzero n-grams.
  EXPECT_EQ(cols, 3);
}

TEST(CrossValidation, LabelShuffleHasNoSignal) {
  Rng rng(45);
  auto m = labelled_matrix(rng, 300, 1.0);
  double total = 0;
  for (int s = 0; s < 5; ++s) {
    Rng shuffle(derive_seed(static_cast<std::uint64_t>(s), "null"));
    shuffle.shuffle(m.labels);
    CvOptions opt;
    opt.k = 5;
    opt.seed = static_cast<std::uint64_t>(s);
    total += cross_validate(m, ModelSpec{}, opt).mean.auc;
  }
  EXPECT_NEAR(total / 5, 0.5, 0.1);
}
