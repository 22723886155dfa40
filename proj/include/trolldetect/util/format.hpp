#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <fmt/format.h>

namespace trolldetect {

/// 1466 -> "1,466"
inline std::string with_commas(std::int64_t n) {
  std::string digits = std::to_string(n < 0 ? -n : n);
  std::string out;
  const std::size_t lead = digits.size() % 3;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i >= lead && i != 0 && (i - lead) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return n < 0 ? "-" + out : out;
}

/// "1,466 (3.7%)"; a zero denominator renders as 0%.
inline std::string count_with_percent(std::int64_t count, std::int64_t total) {
  const double pct = total > 0 ? 100.0 * static_cast<double>(count) / static_cast<double>(total) : 0.0;
  return fmt::format("{} ({:.1f}%)", with_commas(count), pct);
}

/// "41.99 (σ=24.5)"
inline std::string mean_with_sigma(double mean, double sigma) {
  return fmt::format("{:.2f} (σ={:.1f})", mean, sigma);
}

/// Two significant figures, as used for corpus rates ("0.0068", "5.1e-09").
inline std::string two_sig(double x) { return fmt::format("{:.2g}", x); }

}  // namespace trolldetect
