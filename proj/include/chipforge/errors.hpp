#pragma once

#include <stdexcept>
#include <string>

namespace chipforge {

// Input violates a schema or a documented invariant. CLI exit code 1.
class MalformedInputError : public std::runtime_error {
 public:
  explicit MalformedInputError(const std::string& what) : std::runtime_error(what) {}
};

// File could not be read or written. CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A manifest record references an image that is not in the dataset.
class UnknownImageError : public MalformedInputError {
 public:
  explicit UnknownImageError(const std::string& what) : MalformedInputError(what) {}
};

// Manifest schema version does not match what this build writes.
class VersionMismatchError : public MalformedInputError {
 public:
  explicit VersionMismatchError(const std::string& what) : MalformedInputError(what) {}
};

// Exhaustive oracle called beyond its search bounds.
class InstanceTooLargeError : public std::logic_error {
 public:
  explicit InstanceTooLargeError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace chipforge
