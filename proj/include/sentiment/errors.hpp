#pragma once

#include <stdexcept>
#include <string>

namespace sentiment {

/// Invalid input values or violated preconditions. CLI exit code 1.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing files, unreadable streams, malformed headers or persisted
/// artifacts. CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace sentiment
