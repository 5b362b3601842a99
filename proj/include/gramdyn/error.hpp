#pragma once

#include <stdexcept>
#include <string>

namespace gramdyn {

// An operation that needs every off-diagonal advantage to be strictly
// positive was handed a matrix with a zero entry.
class ImproperMatrixError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A checked construction failed its validation rules.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace gramdyn
