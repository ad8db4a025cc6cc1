#pragma once

#include <stdexcept>
#include <string>

namespace nlok {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (bad parameter, wrong geometry kind).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The mathematics refused: no root, stalled descent, quadrature failure.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Configuration-file or command-line problems. Carries the offending line or key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string key = {});
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

class FileNotFound : public ConfigError {
 public:
  explicit FileNotFound(const std::string& path);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace nlok
