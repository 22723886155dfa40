#pragma once

#include "support.hpp"
#include "trolldetect/eval/cohort.hpp"
#include "trolldetect/models/scoring.hpp"

namespace tdtest {

/// Five tweets over three UTC days with every feature worked out by hand:
/// lengths 22/34/10/10/17, 18 word tokens, daily counts {3, 0, 2}.
inline Timeline golden_timeline() {
  Timeline tl{account("g", Label::kTroll, "2018-12-02", 10, 0, "Привет!"), {}};
  tl.tweets = {tweet("5", "g", "2018-12-30T09:00:00Z", "@x http://y.z Cat", "und"),
               tweet("4", "g", "2018-12-30T09:00:00Z", "на мат cat", "ru"),
               tweet("3", "g", "2018-12-28T18:00:00Z", "#a #bb dog"),
               tweet("2", "g", "2018-12-28T12:00:00Z", "RT @jane: #MAGA win https://t.co/x"),
               tweet("1", "g", "2018-12-28T10:00:00Z", "the cat sat on the mat")};
  return tl;
}

/// Cohort statistics carrying the published flagged/unflagged figures.
inline CohortReport paper_cohort_report() {
  CohortReport r;
  r.flagged = {1441, 1202.43, 2205.49, 1772.6, 3527171, 2447.72, 41.99, 24.5,
               {{"en", 3368336}, {"de", 6736}, {"ru", 3145}}, {{"MAGA", 3}, {"Trump", 1}}};
  r.unflagged = {1485, 2175.25, 1621.70, 1361.57, 3515765, 2268.12, 26.83, 16.9,
                 {{"en", 3339469}, {"es", 5767}, {"de", 3833}}, {{"Trump", 2}}};
  return r;
}

inline const std::vector<std::string>& paper_cohort_rows() {
  static const std::vector<std::string> rows = {
      "| Total # of Accounts | 1,441 | 1,485 |",
      "| Avg Account Age (days) | 1202.43 | 2175.25 |",
      "| Avg # of Followers | 2205.49 | 1621.7 |",
      "| Avg # of Following | 1772.6 | 1361.57 |",
      "| Total # of Tweets | 3,527,171 | 3,515,765 |",
      "| Avg # of Tweets | 2447.72 | 2268.12 |",
      "| Avg of avg daily # of tweets | 41.99 (σ=24.5) | 26.83 (σ=16.9) |",
      "| Total tweets | 3,527,171 | Total tweets | 3,515,765 |",
      "| English tweets | 3,368,336 | English tweets | 3,339,469 |",
      "| German tweets | 6,736 | Spanish tweets | 5,767 |",
      "| Russian tweets | 3,145 | German tweets | 3,833 |",
      "| #MAGA | 3 | #Trump | 2 |",
      "| #Trump | 1 |  |  |",
  };
  return rows;
}

inline FlagSummary paper_flag_summary() { return {39103, 1466}; }

}  // namespace tdtest
