#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "trolldetect/features.hpp"
#include "trolldetect/models/adaboost.hpp"
#include "trolldetect/models/logistic.hpp"
#include "trolldetect/models/tree.hpp"
#include "trolldetect/vectors.hpp"

namespace trolldetect {

enum class ModelKind { kLogistic, kTree, kAdaBoost };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kLogistic: return "lr";
    case ModelKind::kTree: return "dt";
    case ModelKind::kAdaBoost: return "ada";
  }
  return "";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view s) {
  if (s == "lr") return ModelKind::kLogistic;
  if (s == "dt") return ModelKind::kTree;
  if (s == "ada") return ModelKind::kAdaBoost;
  return std::nullopt;
}

struct ModelSpec {
  ModelKind kind = ModelKind::kLogistic;
  LogisticOptions lr;
  TreeOptions tree;
  AdaBoostOptions ada;

  void set_seed(std::uint64_t seed) { lr.seed = tree.seed = ada.seed = seed; }

  json to_json() const {
    json j{{"kind", std::string(to_string(kind))}};
    switch (kind) {
      case ModelKind::kLogistic:
        j["l2"] = lr.l2;
        j["tol"] = lr.tol;
        j["max_iter"] = lr.max_iter;
        j["seed"] = lr.seed;
        break;
      case ModelKind::kTree:
        j["max_depth"] = tree.max_depth;
        j["seed"] = tree.seed;
        break;
      case ModelKind::kAdaBoost:
        j["rounds"] = ada.rounds;
        j["base_depth"] = ada.base_depth;
        j["seed"] = ada.seed;
        break;
    }
    return j;
  }

  static ModelSpec from_json(const json& j) {
    ModelSpec s;
    const auto kind = parse_model_kind(j.at("kind").get<std::string>());
    if (!kind) throw ValidationError("model spec: unknown kind " + j.at("kind").dump());
    s.kind = *kind;
    const auto seed = j.at("seed").get<std::uint64_t>();
    s.set_seed(seed);
    switch (s.kind) {
      case ModelKind::kLogistic:
        s.lr.l2 = j.at("l2").get<double>();
        s.lr.tol = j.at("tol").get<double>();
        s.lr.max_iter = j.at("max_iter").get<int>();
        break;
      case ModelKind::kTree: s.tree.max_depth = j.at("max_depth").get<int>(); break;
      case ModelKind::kAdaBoost:
        s.ada.rounds = j.at("rounds").get<int>();
        s.ada.base_depth = j.at("base_depth").get<int>();
        break;
    }
    return s;
  }
};

/// One fitted classifier of any kind.
struct TrainedModel {
  ModelKind kind = ModelKind::kLogistic;
  std::variant<LogisticModel, TreeModel, BoostedModel> params;

  std::vector<double> predict_proba(const SparseRows& X) const {
    return std::visit([&](const auto& m) { return m.predict_proba(X); }, params);
  }

  json to_json() const {
    return json{{"kind", std::string(to_string(kind))},
                {"params", std::visit([](const auto& m) { return m.to_json(); }, params)}};
  }

  static TrainedModel from_json(const json& j) {
    const auto kind = parse_model_kind(j.at("kind").get<std::string>());
    if (!kind) throw ValidationError("model: unknown kind " + j.at("kind").dump());
    TrainedModel m;
    m.kind = *kind;
    const auto& p = j.at("params");
    switch (*kind) {
      case ModelKind::kLogistic: m.params = LogisticModel::from_json(p); break;
      case ModelKind::kTree: m.params = TreeModel::from_json(p); break;
      case ModelKind::kAdaBoost: m.params = BoostedModel::from_json(p); break;
    }
    return m;
  }
};

inline TrainedModel train_model(const SparseRows& X, std::span<const int> y, const ModelSpec& spec) {
  TrainedModel m;
  m.kind = spec.kind;
  switch (spec.kind) {
    case ModelKind::kLogistic: m.params = train_logistic(X, y, spec.lr); break;
    case ModelKind::kTree: m.params = train_tree(X, y, spec.tree); break;
    case ModelKind::kAdaBoost: m.params = train_adaboost(X, y, spec.ada); break;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Model bundle: everything needed to score new accounts.

inline constexpr const char* kBundleFormat = "trolldetect-bundle";
inline constexpr int kBundleVersion = 1;

struct ModelBundle {
  FeatureSchema schema;
  ModelSpec spec;
  TrainedModel model;
  Standardizer standardization;  // training statistics, recorded for every model kind
  json training;                 // rows, positives, input digests
  Provenance provenance;

  std::vector<double> predict_proba(const LabeledMatrix& m) const {
    if (m.schema.hash != schema.hash) {
      throw ValidationError("score: feature schema " + m.schema.hash.substr(0, 12) + " does not match bundle schema " +
                            schema.hash.substr(0, 12));
    }
    return model.predict_proba(m.X);
  }
};

inline ModelBundle train_bundle(const LabeledMatrix& data, const ModelSpec& spec, const Provenance& prov) {
  const LabeledMatrix labeled = labeled_subset(data);
  const auto y = binary_labels(labeled.labels);
  ModelBundle b;
  b.schema = labeled.schema;
  b.spec = spec;
  b.model = train_model(labeled.X, y, spec);
  b.standardization = Standardizer::fit(labeled.X);
  const auto positives = std::count(y.begin(), y.end(), 1);
  b.training = json{{"rows", y.size()}, {"positives", positives}, {"negatives", static_cast<std::int64_t>(y.size()) - positives}};
  b.provenance = prov;
  return b;
}

inline std::string serialize_bundle(const ModelBundle& b) {
  json payload{{"schema", b.schema.to_json()},
               {"stopword_checksum", b.schema.stopword_checksum},
               {"spec", b.spec.to_json()},
               {"model", b.model.to_json()},
               {"standardization", b.standardization.to_json()},
               {"training", b.training}};
  return encode_artifact(kBundleFormat, kBundleVersion, b.provenance, payload, Encoding::kJsonText);
}

inline ModelBundle deserialize_bundle(const std::string& bytes, const std::string& origin = "bundle") {
  auto art = decode_artifact(bytes, kBundleFormat, kBundleVersion, Encoding::kJsonText, origin);
  const auto& p = art.payload;
  ModelBundle b;
  b.schema = FeatureSchema::from_json(p.at("schema"));
  if (p.at("stopword_checksum") != stopword_checksum()) {
    throw ValidationError(origin + ": stop-word list differs from this build");
  }
  b.spec = ModelSpec::from_json(p.at("spec"));
  b.model = TrainedModel::from_json(p.at("model"));
  b.standardization = Standardizer::from_json(p.at("standardization"));
  b.training = p.at("training");
  b.provenance = art.provenance;
  if (auto* lr = std::get_if<LogisticModel>(&b.model.params); lr != nullptr && lr->weights.size() != b.schema.size()) {
    throw ValidationError(origin + ": weight count does not match the schema");
  }
  return b;
}

inline ModelBundle load_bundle(const std::string& path) { return deserialize_bundle(read_file(path), path); }

}  // namespace trolldetect
