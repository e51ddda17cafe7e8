#pragma once

#include <stdexcept>
#include <string>

namespace kmgr {

/// Malformed or inconsistent input data: bad file headers, schema
/// mismatches, shape conflicts, out-of-range labels.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numeric divergence during training or evaluation (NaN/Inf loss).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace kmgr
