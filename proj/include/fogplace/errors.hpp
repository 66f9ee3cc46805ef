#pragma once

#include <stdexcept>
#include <string>

namespace fogplace {

// Error taxonomy. Everything derives from std::runtime_error so callers can
// catch broadly; the distinct types exist because the CLI maps them to exit
// codes and tests assert on them.

struct MalformedTree : std::runtime_error {
  explicit MalformedTree(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureError : std::runtime_error {
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

struct UnassignedVnf : std::runtime_error {
  explicit UnassignedVnf(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownVnf : std::runtime_error {
  explicit UnknownVnf(const std::string& what) : std::runtime_error(what) {}
};

struct InfeasibleShape : std::runtime_error {
  explicit InfeasibleShape(const std::string& what) : std::runtime_error(what) {}
};

struct NoMoveAvailable : std::runtime_error {
  explicit NoMoveAvailable(const std::string& what) : std::runtime_error(what) {}
};

struct TooLarge : std::runtime_error {
  explicit TooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fogplace
