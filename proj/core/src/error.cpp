#include "nlok/error.hpp"

#include <utility>

namespace nlok {

ConfigError::ConfigError(const std::string& what, int line, std::string key)
    : Error(what), line_(line), key_(std::move(key)) {}

FileNotFound::FileNotFound(const std::string& path)
    : ConfigError("file not found: " + path), path_(path) {}

}  // namespace nlok
