#pragma once

#include <stdexcept>
#include <string>

namespace omab {

/// Malformed, inconsistent, or unusable input data (files, logs, fixtures).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace omab
