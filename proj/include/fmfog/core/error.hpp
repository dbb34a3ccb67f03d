// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fmfog {

// Error categories map onto CLI exit codes (see tools/fmfog.cpp).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct KeyError : std::runtime_error {
  explicit KeyError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IndexError : std::runtime_error {
  explicit IndexError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateInputError : std::runtime_error {
  explicit DegenerateInputError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fmfog
