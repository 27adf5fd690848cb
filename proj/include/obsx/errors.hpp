#pragma once

#include <stdexcept>
#include <string>

namespace obsx {

/// Invalid caller input: bad shapes, non-finite values, unusable files.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Data that defeats the algorithm itself (e.g. every remaining candidate
/// sits below the power-function floor before anything was selected).
class DegenerateDataError : public std::runtime_error {
 public:
  explicit DegenerateDataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace obsx
