#pragma once

#include <stdexcept>
#include <string>

namespace lasernoise {

/// Physical parameter outside its admissible domain (non-finite, non-positive rate, p > 1, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A linear noise model that cannot be built or evaluated (unstable drift, bad shapes).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Spectral estimation failed (empty train, too few segments, zero mean count).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal invariant. Never expected for valid inputs.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

[[noreturn]] void throw_invariant(const char* expr, const char* file, int line, const std::string& msg);

}  // namespace detail
}  // namespace lasernoise

#define LASERNOISE_ENSURE(cond, msg)                                               \
  do {                                                                             \
    if (!(cond)) ::lasernoise::detail::throw_invariant(#cond, __FILE__, __LINE__, (msg)); \
  } while (false)
