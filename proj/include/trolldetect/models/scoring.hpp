#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "trolldetect/models/model.hpp"
#include "trolldetect/util/csv.hpp"
#include "trolldetect/util/format.hpp"

namespace trolldetect {

struct Prediction {
  std::string account_id;
  Label label = Label::kUnlabeled;
  double probability = 0.0;
  bool flagged = false;
};

inline std::vector<Prediction> score(const LabeledMatrix& m, const ModelBundle& bundle, double threshold = 0.5) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ValidationError("score: threshold must lie in [0, 1]");
  const auto probs = bundle.predict_proba(m);
  std::vector<Prediction> out(m.rows());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = {m.ids[i], m.labels[i], probs[i], probs[i] >= threshold};
  }
  return out;
}

/// Featurizes `ds` against the bundle's own schema, then scores it.
inline std::vector<Prediction> score(const Dataset& ds, const ModelBundle& bundle, double threshold,
                                     Timestamp reference_date, std::ostream* log = &std::clog) {
  const auto fr = featurize_dataset(ds, bundle.schema, reference_date, log);
  return score(fr.matrix, bundle, threshold);
}

struct FlagSummary {
  std::int64_t total = 0;
  std::int64_t flagged = 0;

  double rate() const { return total > 0 ? static_cast<double>(flagged) / static_cast<double>(total) : 0.0; }

  std::string render_markdown() const {
    return "| | |\n|---|---|\n| # of Unique accounts | " + with_commas(total) + " |\n| # of Unique flagged accounts | " +
           count_with_percent(flagged, total) + " |\n";
  }
};

inline FlagSummary summarize(const std::vector<Prediction>& preds) {
  FlagSummary s;
  s.total = static_cast<std::int64_t>(preds.size());
  for (const auto& p : preds) s.flagged += p.flagged ? 1 : 0;
  return s;
}

inline std::string predictions_csv(const std::vector<Prediction>& preds) {
  std::string out = "account_id,label,probability,flagged\n";
  for (const auto& p : preds) {
    out += csv::escape(p.account_id) + "," + std::string(to_string(p.label)) + "," + fmt::format("{:.17g}", p.probability) +
           "," + (p.flagged ? "1" : "0") + "\n";
  }
  return out;
}

inline std::vector<Prediction> parse_predictions_csv(const std::string& text, const std::string& origin = "predictions") {
  std::istringstream in(text);
  csv::Row row;
  if (!csv::read_row(in, row) || row != csv::Row{"account_id", "label", "probability", "flagged"}) {
    throw ValidationError(origin + ": expected header account_id,label,probability,flagged");
  }
  std::vector<Prediction> out;
  std::size_t line = 1;
  while (csv::read_row(in, row)) {
    ++line;
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 4) throw ValidationError(fmt::format("{}:{}: expected 4 fields, got {}", origin, line, row.size()));
    Prediction p;
    p.account_id = row[0];
    const auto label = parse_label(row[1]);
    if (!label) throw ValidationError(fmt::format("{}:{}: bad label '{}'", origin, line, row[1]));
    p.label = *label;
    try {
      std::size_t used = 0;
      p.probability = std::stod(row[2], &used);
      if (used != row[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError(fmt::format("{}:{}: bad probability '{}'", origin, line, row[2]));
    }
    if (row[3] != "0" && row[3] != "1") throw ValidationError(fmt::format("{}:{}: flagged must be 0 or 1", origin, line));
    p.flagged = row[3] == "1";
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace trolldetect
