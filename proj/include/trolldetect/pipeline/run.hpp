#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "trolldetect/pipeline/stages.hpp"

namespace trolldetect {

struct RunArtifacts {
  std::map<std::string, std::string> paths;  // logical name -> file

  const std::string& at(const std::string& name) const { return paths.at(name); }
};

/// ingest -> featurize -> cv -> train -> score -> sage -> cohorts, all under
/// cfg.out_dir. Without training inputs a synthetic corpus is generated
/// first. Errors name the stage that failed.
inline RunArtifacts run_pipeline(const PipelineConfig& cfg, std::ostream& log = std::clog) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.out_dir);
  RunArtifacts a;
  auto path = [&](const std::string& name, const std::string& file) {
    return a.paths[name] = (dir / file).string();
  };

  std::string accounts = cfg.accounts, tweets = cfg.tweets;
  std::string new_accounts = cfg.score_accounts, new_tweets = cfg.score_tweets;
  if (accounts.empty() && tweets.empty()) {
    const auto files = run_stage("synth", [&] { return stages::synth(cfg, (dir / "synth").string(), log); });
    accounts = files.accounts;
    tweets = files.tweets;
    if (new_accounts.empty() && new_tweets.empty()) {
      new_accounts = files.unseen_accounts;
      new_tweets = files.unseen_tweets;
    }
  }

  run_stage("ingest", [&] {
    stages::ingest(cfg, accounts, tweets, path("dataset", "dataset.bin"), log, path("summary", "summary.md"));
    stages::ingest(cfg, new_accounts, new_tweets, path("new", "new.bin"), log);
  });
  run_stage("featurize", [&] {
    stages::featurize(cfg, a.at("dataset"), path("schema", "schema.json"), path("vectors", "vectors.bin"), log);
  });
  run_stage("cv", [&] { stages::cv(cfg, a.at("vectors"), path("cv", "cv.csv"), log); });
  run_stage("train", [&] { stages::train(cfg, a.at("vectors"), path("bundle", "model.bundle"), log); });
  run_stage("score", [&] {
    stages::score(cfg, a.at("new"), a.at("bundle"), path("predictions", "predictions.csv"), log, path("flags", "flags.md"));
  });
  run_stage("sage", [&] {
    stages::sage(cfg, a.at("dataset"), a.at("dataset"), Label::kTroll, Label::kControl, path("sage", "sage.csv"), log);
  });
  run_stage("cohorts", [&] {
    stages::cohorts(cfg, a.at("predictions"), a.at("new"), path("cohorts", "cohorts.md"), log, true);
  });
  return a;
}

}  // namespace trolldetect
