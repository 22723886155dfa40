// trolldetect: command-line front end for the detection pipeline.
//
// Exit codes: 0 success, 1 invalid input or artifact, 2 anything else.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trolldetect/pipeline/run.hpp"
#include "trolldetect/version.hpp"

namespace td = trolldetect;

namespace {

// Settings given on the command line, applied after the config file.
struct Overrides {
  std::vector<std::pair<std::string, std::string>> values;

  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    return app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values.emplace_back(key, v); }, help);
  }
};

std::optional<td::Label> label_option(const std::string& s, const char* what) {
  if (s.empty() || s == "all") return std::nullopt;
  auto l = td::parse_label(s);
  if (!l) throw td::ValidationError(std::string(what) + ": expected troll, control, unlabeled or all");
  return l;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Troll-account detection: featurize timelines, train and validate classifiers, score unseen "
               "accounts, contrast vocabularies and measure rater agreement."};
  app.set_version_flag("--version", std::string(td::kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Overrides ov;
  std::string config_path, out_dir;
  app.add_option("--config", config_path, "key = value settings file (command-line values win)");
  app.add_option("--out-dir", out_dir, "directory that relative output paths are placed in");
  ov.add(&app, "--seed", "seed", "root seed for every random stream");

  // ingest
  std::string accounts, tweets, out, summary_out, ira_csv;
  auto* ingest = app.add_subcommand("ingest", "build capped timelines from account/tweet files");
  ingest->add_option("--accounts", accounts, "accounts JSONL");
  ingest->add_option("--tweets", tweets, "tweets JSONL");
  ingest->add_option("--ira-csv", ira_csv, "platform CSV release of troll tweets (converted, labeled troll)");
  ov.add(ingest, "--cap", "cap", "tweets kept per account (default 200)");
  ingest->add_flag_callback("--detect-lang", [&] { ov.values.emplace_back("detect_lang", "true"); },
                            "fill missing tweet languages with a script heuristic");
  ingest->add_option("--summary", summary_out, "also write the dataset summary table here");
  ingest->add_option("--out", out, "dataset artifact")->required();

  // featurize
  std::string dataset, schema_out, vectors_out;
  auto* featurize = app.add_subcommand("featurize", "build the feature schema and vectors");
  featurize->add_option("--dataset", dataset, "dataset artifact")->required();
  featurize->add_option("--schema-out", schema_out, "schema artifact")->required();
  featurize->add_option("--vectors-out", vectors_out, "vectors artifact")->required();
  ov.add(featurize, "--vocab-size", "vocab_size", "bag-of-words vocabulary size (default 5000)");
  ov.add(featurize, "--ref-date", "reference_date", "date account age is measured to (default 2019-01-01)");

  // train / cv
  std::string vectors, report;
  auto add_model_options = [&](CLI::App* sub) {
    ov.add(sub, "--model", "model", "lr, dt or ada");
    ov.add(sub, "--l2", "l2", "logistic regression L2 strength");
    ov.add(sub, "--max-iter", "max_iter", "logistic regression iteration limit");
    ov.add(sub, "--max-depth", "max_depth", "decision tree depth limit");
    ov.add(sub, "--rounds", "rounds", "AdaBoost rounds");
    ov.add(sub, "--base-depth", "base_depth", "AdaBoost base tree depth");
  };
  auto* train = app.add_subcommand("train", "fit a model bundle");
  train->add_option("--vectors", vectors, "vectors artifact")->required();
  add_model_options(train);
  ov.add(train, "--seed", "seed", "model seed");
  train->add_option("--out", out, "model bundle")->required();

  auto* cv = app.add_subcommand("cv", "stratified k-fold cross-validation");
  cv->add_option("--vectors", vectors, "vectors artifact")->required();
  add_model_options(cv);
  ov.add(cv, "--k", "k", "number of folds (default 10)");
  ov.add(cv, "--family", "family", "all, profile, behavior, language, stopword or bow");
  ov.add(cv, "--threshold", "threshold", "probability cut for precision/recall (default 0.5)");
  ov.add(cv, "--workers", "workers", "folds run concurrently");
  ov.add(cv, "--seed", "seed", "fold seed");
  cv->add_option("--report", report, "CSV report")->required();

  // score
  std::string bundle;
  auto* score = app.add_subcommand("score", "flag unseen accounts");
  score->add_option("--dataset", dataset, "dataset artifact")->required();
  score->add_option("--bundle", bundle, "model bundle")->required();
  ov.add(score, "--threshold", "threshold", "flag when probability >= this (default 0.5)");
  ov.add(score, "--ref-date", "reference_date", "date account age is measured to");
  score->add_option("--summary", summary_out, "also write the flag-rate table here");
  score->add_option("--out", out, "predictions CSV")->required();

  // sage
  std::string treatment, base, treatment_label = "all", base_label = "all";
  auto* sage = app.add_subcommand("sage", "rank n-grams distinguishing a treatment corpus from a base corpus");
  sage->add_option("--treatment", treatment, "treatment dataset")->required();
  sage->add_option("--base", base, "base dataset")->required();
  sage->add_option("--treatment-label", treatment_label, "only accounts with this label (default all)");
  sage->add_option("--base-label", base_label, "only accounts with this label (default all)");
  ov.add(sage, "--top", "sage_top", "rows to report (default 30)");
  ov.add(sage, "--smoothing", "sage_smoothing", "background pseudo-count (default 0.1)");
  ov.add(sage, "--penalty", "sage_penalty", "sparsity penalty scale; 0 disables (default 0.1)");
  sage->add_option("--out", out, "CSV report")->required();

  // agreement / cohorts / review-sample
  std::string ratings, key, predictions, sheet_out;
  auto* agreement = app.add_subcommand("agreement", "Krippendorff's alpha and rating summaries");
  agreement->add_option("--ratings", ratings, "CSV account_id,rater_id,rating")->required();
  agreement->add_option("--key", key, "CSV account_id,flagged")->required();
  agreement->add_option("--out", out, "markdown report")->required();

  auto* cohorts = app.add_subcommand("cohorts", "compare flagged and unflagged accounts");
  cohorts->add_option("--predictions", predictions, "predictions CSV")->required();
  cohorts->add_option("--dataset", dataset, "dataset the predictions were made on")->required();
  ov.add(cohorts, "--ref-date", "reference_date", "date account age is measured to");
  cohorts->add_option("--out", out, "markdown report")->required();

  auto* review = app.add_subcommand("review-sample", "blind sample of flagged and unflagged accounts for raters");
  review->add_option("--predictions", predictions, "predictions CSV")->required();
  ov.add(review, "--n", "review_n", "accounts per cohort (default 50)");
  review->add_option("--out", sheet_out, "rater sheet CSV")->required();
  review->add_option("--key", key, "hidden key CSV")->required();

  // synth / run
  auto add_synth_options = [&](CLI::App* sub) {
    ov.add(sub, "--controls", "synth.controls", "control accounts (default 5000)");
    ov.add(sub, "--trolls", "synth.trolls", "troll accounts (default 100)");
    ov.add(sub, "--unseen-controls", "synth.unseen_controls", "unlabeled control-like accounts");
    ov.add(sub, "--unseen-trolls", "synth.unseen_trolls", "unlabeled troll-like accounts");
    ov.add(sub, "--age-shift", "synth.troll_age_shift_days", "how much newer troll accounts are, in days");
    ov.add(sub, "--extra-daily-rate", "synth.extra_daily_rate", "extra troll tweets per day");
    ov.add(sub, "--ru-fraction", "synth.ru_fraction", "mean share of Russian troll tweets");
    ov.add(sub, "--lexicon-rate", "synth.lexicon_rate", "chance a troll tweet carries a lexicon word");
    ov.add(sub, "--hashtag-rate", "synth.hashtag_rate", "chance a troll tweet carries a troll hashtag");
    sub->add_flag_callback(
        "--null-signal",
        [&] {
          for (const char* k : {"synth.troll_age_shift_days", "synth.extra_daily_rate", "synth.ru_fraction",
                                "synth.lexicon_rate", "synth.hashtag_rate"})
            ov.values.emplace_back(k, "0");
        },
        "set every troll signal knob to zero");
  };
  auto* synth = app.add_subcommand("synth", "write a seeded synthetic troll/control corpus");
  add_synth_options(synth);
  synth->add_option("--out", out, "output directory")->required();

  auto* run = app.add_subcommand("run", "ingest, featurize, cross-validate, train, score and report");
  add_synth_options(run);
  add_model_options(run);
  ov.add(run, "--family", "family", "feature family for cross-validation");
  ov.add(run, "--workers", "workers", "folds run concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::ostream& log = std::clog;
  try {
    td::PipelineConfig cfg;
    if (!config_path.empty()) td::apply_config_file(cfg, config_path);
    for (const auto& [k, v] : ov.values) cfg.set(k, v);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    // Relative outputs land in --out-dir when one is given.
    auto place = [&](const std::string& p) {
      if (p.empty() || out_dir.empty() || std::filesystem::path(p).is_absolute()) return p;
      return (std::filesystem::path(out_dir) / p).string();
    };

    if (*ingest) {
      if (!ira_csv.empty()) {
        if (!accounts.empty() || !tweets.empty()) throw td::ValidationError("--ira-csv replaces --accounts/--tweets");
        std::ifstream in(ira_csv);
        if (!in) throw td::ValidationError("cannot open '" + ira_csv + "'");
        auto [accs, tws] = td::convert_release_csv(in, td::Label::kTroll, ira_csv);
        const auto stem = std::filesystem::path(place(out)).replace_extension().string();
        accounts = stem + ".accounts.jsonl";
        tweets = stem + ".tweets.jsonl";
        std::vector<td::json> ra, rt;
        for (const auto& x : accs) ra.push_back(td::account_record(x));
        for (const auto& x : tws) rt.push_back(td::tweet_record(x));
        td::write_records(accounts, ra);
        td::write_records(tweets, rt);
      }
      td::run_stage("ingest", [&] { td::stages::ingest(cfg, accounts, tweets, place(out), log, place(summary_out)); });
    } else if (*featurize) {
      td::run_stage("featurize",
                    [&] { td::stages::featurize(cfg, dataset, place(schema_out), place(vectors_out), log); });
    } else if (*train) {
      td::run_stage("train", [&] { td::stages::train(cfg, vectors, place(out), log); });
    } else if (*cv) {
      td::run_stage("cv", [&] { td::stages::cv(cfg, vectors, place(report), log); });
    } else if (*score) {
      td::run_stage("score", [&] { td::stages::score(cfg, dataset, bundle, place(out), log, place(summary_out)); });
    } else if (*sage) {
      td::run_stage("sage", [&] {
        td::stages::sage(cfg, treatment, base, label_option(treatment_label, "--treatment-label"),
                         label_option(base_label, "--base-label"), place(out), log);
      });
    } else if (*agreement) {
      td::run_stage("agreement", [&] { td::stages::agreement(cfg, ratings, key, place(out), log); });
    } else if (*cohorts) {
      td::run_stage("cohorts", [&] { td::stages::cohorts(cfg, predictions, dataset, place(out), log); });
    } else if (*review) {
      td::run_stage("review-sample",
                    [&] { td::stages::review_sample(cfg, predictions, place(sheet_out), place(key), log); });
    } else if (*synth) {
      td::run_stage("synth", [&] { td::stages::synth(cfg, place(out), log); });
    } else if (*run) {
      const auto artifacts = td::run_pipeline(cfg, log);
      for (const auto& [name, path] : artifacts.paths) std::cout << name << '\t' << path << '\n';
    }
  } catch (const td::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
