#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace trolldetect {

// Bad input: malformed files, violated preconditions, mismatched artifacts.
// The CLI maps this to exit code 1; anything else is an internal error (2).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs fn, prefixing any error message with the stage name while keeping
// the error category.
template <typename Fn>
decltype(auto) run_stage(const std::string& stage, Fn&& fn) {
  try {
    return std::forward<Fn>(fn)();
  } catch (const ValidationError& e) {
    throw ValidationError("stage '" + stage + "': " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error("stage '" + stage + "': " + e.what());
  }
}

}  // namespace trolldetect
