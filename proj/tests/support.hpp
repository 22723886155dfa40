#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "trolldetect/corpus.hpp"
#include "trolldetect/vectors.hpp"

namespace tdtest {

using namespace trolldetect;

inline Account account(std::string id, Label label = Label::kControl, std::string created = "2018-01-01T00:00:00Z",
                       std::int64_t followers = 10, std::int64_t following = 5, std::string description = "") {
  Account a;
  a.id = std::move(id);
  a.screen_name = "u" + a.id;
  a.created_at = parse_timestamp(created);
  a.followers_count = followers;
  a.following_count = following;
  a.description = std::move(description);
  a.label = label;
  return a;
}

/// Tweet with entities derived from the text, the way ingest does it.
inline Tweet tweet(std::string id, std::string account_id, std::string created, std::string text,
                   std::string lang = "en") {
  Tweet t;
  t.id = std::move(id);
  t.account_id = std::move(account_id);
  t.created_at = parse_timestamp(created);
  t.is_retweet = text.starts_with("RT @");
  t.text = std::move(text);
  t.lang = std::move(lang);
  auto e = extract_entities(t.text);
  t.hashtags = e.hashtags;
  t.mentions = e.mentions;
  t.urls = e.urls;
  return t;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("trolldetect-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline SparseRows sparse(const std::vector<std::vector<double>>& dense) {
  const auto rows = static_cast<Eigen::Index>(dense.size());
  const auto cols = dense.empty() ? 0 : static_cast<Eigen::Index>(dense.front().size());
  std::vector<Eigen::Triplet<double, std::int64_t>> trip;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (dense[r][c] != 0.0) trip.emplace_back(r, c, dense[r][c]);
  SparseRows X(rows, cols);
  X.setFromTriplets(trip.begin(), trip.end());
  X.makeCompressed();
  return X;
}

}  // namespace tdtest
