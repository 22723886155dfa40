#pragma once

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <unordered_map>

#include "trolldetect/corpus.hpp"
#include "trolldetect/eval/agreement.hpp"
#include "trolldetect/eval/cohort.hpp"
#include "trolldetect/eval/review.hpp"
#include "trolldetect/models/cv.hpp"
#include "trolldetect/models/scoring.hpp"
#include "trolldetect/pipeline/config.hpp"
#include "trolldetect/pipeline/synthetic.hpp"
#include "trolldetect/sage.hpp"
#include "trolldetect/vectors.hpp"

// One function per pipeline stage. Stages talk to each other only through
// the files they write, so the CLI subcommands and `run` share them.

namespace trolldetect::stages {

inline Provenance provenance(const PipelineConfig& cfg, std::initializer_list<std::pair<const char*, std::string>> inputs) {
  Provenance p;
  p.config_hash = cfg.hash();
  for (const auto& [name, path] : inputs) p.inputs[name] = sha256_file(path);
  return p;
}

inline void require_file(const std::string& what, const std::string& path) {
  if (path.empty()) throw ValidationError("no " + what + " path given");
  if (!std::filesystem::is_regular_file(path)) throw ValidationError(what + " file '" + path + "' does not exist");
}

inline SyntheticFiles synth(const PipelineConfig& cfg, const std::string& dir, std::ostream& log) {
  const auto spec = cfg.synthetic_spec();
  const auto corpus = generate_synthetic(spec);
  auto files = write_synthetic(corpus, dir);
  log << fmt::format("synth: {} control + {} troll accounts, {} tweets; {} unseen accounts -> {}\n", spec.controls,
                     spec.trolls, corpus.tweets.size(), corpus.unseen_accounts.size(), dir);
  return files;
}

inline Dataset ingest(const PipelineConfig& cfg, const std::string& accounts_path, const std::string& tweets_path,
                      const std::string& out, std::ostream& log, const std::string& summary_out = {}) {
  require_file("accounts", accounts_path);
  require_file("tweets", tweets_path);
  const CyrillicHeuristicDetector detector;
  auto accounts = load_accounts(accounts_path);
  auto tweets = load_tweets(tweets_path, cfg.detect_lang ? &detector : nullptr);
  DatasetMeta meta;
  meta.sources = {PipelineConfig::base_name(accounts_path), PipelineConfig::base_name(tweets_path)};
  meta.ingested_at = ingestion_stamp(accounts, tweets);
  auto ds = build_timelines(std::move(accounts), std::move(tweets), cfg.cap, meta);
  if (ds.orphan_tweets > 0) log << fmt::format("warning: {} tweets belong to no listed account\n", ds.orphan_tweets);
  const auto prov = provenance(cfg, {{"accounts", accounts_path}, {"tweets", tweets_path}});
  write_file(out, serialize_dataset(ds, prov));
  if (!summary_out.empty()) write_report(summary_out, dataset_summary(ds, cfg.reference()).render_markdown(), prov);
  log << fmt::format("ingest: {} accounts ({} troll, {} control, {} unlabeled) -> {}\n", ds.timelines.size(),
                     ds.count(Label::kTroll), ds.count(Label::kControl), ds.count(Label::kUnlabeled), out);
  return ds;
}

inline void featurize(const PipelineConfig& cfg, const std::string& dataset_path, const std::string& schema_out,
                      const std::string& vectors_out, std::ostream& log) {
  require_file("dataset", dataset_path);
  const auto loaded = load_dataset(dataset_path);
  const auto schema = build_schema(loaded.dataset, cfg.vocab_size);
  const auto fr = featurize_dataset(loaded.dataset, schema, cfg.reference(), &log);
  const auto prov = provenance(cfg, {{"dataset", dataset_path}});
  write_file(schema_out, serialize_schema(schema, prov));
  write_file(vectors_out, serialize_vectors(fr.matrix, prov));
  log << fmt::format("featurize: {} rows x {} columns ({} languages, {} n-grams) -> {}\n", fr.matrix.rows(),
                     schema.size(), schema.languages.size(), schema.vocabulary.size(), vectors_out);
}

inline ModelBundle train(const PipelineConfig& cfg, const std::string& vectors_path, const std::string& out,
                         std::ostream& log) {
  require_file("vectors", vectors_path);
  const auto loaded = load_vectors(vectors_path);
  auto bundle = train_bundle(loaded.matrix, cfg.model_spec(), provenance(cfg, {{"vectors", vectors_path}}));
  write_file(out, serialize_bundle(bundle));
  log << fmt::format("train: {} model on {} rows -> {}\n", to_string(cfg.model), bundle.training.at("rows").get<int>(), out);
  return bundle;
}

inline CvReport cv(const PipelineConfig& cfg, const std::string& vectors_path, const std::string& report,
                   std::ostream& log) {
  require_file("vectors", vectors_path);
  const auto loaded = load_vectors(vectors_path);
  auto rep = cross_validate(loaded.matrix, cfg.model_spec(), cfg.cv_options());
  write_report(report, rep.to_csv(), provenance(cfg, {{"vectors", vectors_path}}));
  log << fmt::format("cv: {} {}-fold on {}: precision {:.3f} recall {:.3f} f1 {:.3f} auc {:.3f} -> {}\n", rep.model,
                     rep.k, rep.family, rep.mean.precision, rep.mean.recall, rep.mean.f1, rep.mean.auc, report);
  return rep;
}

inline std::vector<Prediction> score(const PipelineConfig& cfg, const std::string& dataset_path,
                                     const std::string& bundle_path, const std::string& out, std::ostream& log,
                                     const std::string& summary_out = {}) {
  require_file("dataset", dataset_path);
  require_file("bundle", bundle_path);
  const auto loaded = load_dataset(dataset_path);
  const auto bundle = load_bundle(bundle_path);
  auto preds = score(loaded.dataset, bundle, cfg.threshold, cfg.reference(), &log);
  const auto prov = provenance(cfg, {{"dataset", dataset_path}, {"bundle", bundle_path}});
  write_report(out, predictions_csv(preds), prov);
  const auto summary = summarize(preds);
  if (!summary_out.empty()) write_report(summary_out, summary.render_markdown(), prov);
  log << fmt::format("score: {} of {} accounts flagged -> {}\n", count_with_percent(summary.flagged, summary.total),
                     with_commas(summary.total), out);
  return preds;
}

inline std::vector<SageResult> sage(const PipelineConfig& cfg, const std::string& treatment_path,
                                    const std::string& base_path, std::optional<Label> treatment_label,
                                    std::optional<Label> base_label, const std::string& out, std::ostream& log) {
  require_file("treatment dataset", treatment_path);
  require_file("base dataset", base_path);
  const auto treatment = corpus_counts(load_dataset(treatment_path).dataset, treatment_label);
  const auto base = corpus_counts(load_dataset(base_path).dataset, base_label);
  const auto fit = sage_fit(treatment, base, cfg.sage_options());
  if (!fit.converged) log << fmt::format("warning: sage did not converge in {} sweeps\n", fit.iterations);
  auto rows = sage_report(fit, treatment, base, cfg.sage_top);
  write_report(out, sage_csv(rows), provenance(cfg, {{"treatment", treatment_path}, {"base", base_path}}));
  log << fmt::format("sage: {} terms, {} sweeps -> {}\n", fit.terms.size(), fit.iterations, out);
  return rows;
}

/// With `allow_empty` a run that flags nobody (or everybody) still writes the
/// flag table and says why the comparison is missing.
inline std::optional<CohortReport> cohorts(const PipelineConfig& cfg, const std::string& predictions_path,
                                           const std::string& dataset_path, const std::string& out, std::ostream& log,
                                           bool allow_empty = false) {
  require_file("predictions", predictions_path);
  require_file("dataset", dataset_path);
  const auto preds = parse_predictions_csv(read_report(predictions_path).body, predictions_path);
  const auto loaded = load_dataset(dataset_path);
  std::unordered_map<std::string, const Timeline*> by_id;
  for (const auto& tl : loaded.dataset.timelines) by_id.emplace(tl.account.id, &tl);
  std::vector<const Timeline*> flagged, unflagged;
  for (const auto& p : preds) {
    auto it = by_id.find(p.account_id);
    if (it == by_id.end()) throw ValidationError("account '" + p.account_id + "' is not in " + dataset_path);
    (p.flagged ? flagged : unflagged).push_back(it->second);
  }
  const auto prov = provenance(cfg, {{"predictions", predictions_path}, {"dataset", dataset_path}});
  if (allow_empty && (flagged.empty() || unflagged.empty())) {
    write_report(out, summarize(preds).render_markdown() + "\nNo comparison: one cohort is empty.\n", prov);
    log << fmt::format("cohorts: {} flagged vs {} unflagged, comparison skipped -> {}\n", flagged.size(),
                       unflagged.size(), out);
    return std::nullopt;
  }
  auto rep = cohort_compare(flagged, unflagged, cfg.reference());
  write_report(out, summarize(preds).render_markdown() + "\n" + rep.render_markdown(), prov);
  log << fmt::format("cohorts: {} flagged vs {} unflagged -> {}\n", flagged.size(), unflagged.size(), out);
  return rep;
}

inline AgreementReport agreement(const PipelineConfig& cfg, const std::string& ratings_path,
                                 const std::string& key_path, const std::string& out, std::ostream& log) {
  require_file("ratings", ratings_path);
  require_file("key", key_path);
  const auto matrix = parse_ratings_csv(read_file(ratings_path), ratings_path);
  const auto key = parse_review_key(read_file(key_path), key_path);
  auto rep = aggregate_ratings(matrix, key);
  write_report(out, rep.render_markdown(), provenance(cfg, {{"ratings", ratings_path}, {"key", key_path}}));
  log << fmt::format("agreement: alpha {:.3f} over {} accounts -> {}\n", rep.alpha, matrix.rows(), out);
  return rep;
}

inline ReviewSample review_sample(const PipelineConfig& cfg, const std::string& predictions_path,
                                  const std::string& sheet_out, const std::string& key_out, std::ostream& log) {
  require_file("predictions", predictions_path);
  const auto preds = parse_predictions_csv(read_report(predictions_path).body, predictions_path);
  std::vector<std::string> flagged, unflagged;
  for (const auto& p : preds) (p.flagged ? flagged : unflagged).push_back(p.account_id);
  auto s = sample_for_review(flagged, unflagged, cfg.review_n, cfg.seed);
  const auto prov = provenance(cfg, {{"predictions", predictions_path}});
  write_report(sheet_out, review_sheet_csv(s), prov);
  write_report(key_out, review_key_csv(s), prov);
  log << fmt::format("review-sample: {} accounts -> {} (key: {})\n", s.order.size(), sheet_out, key_out);
  return s;
}

}  // namespace trolldetect::stages
