#pragma once

#include <stdexcept>
#include <string>

namespace recurrify {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(std::string msg, int l, int c)
      : std::runtime_error("parse error at " + std::to_string(l) + ":" +
                           std::to_string(c) + ": " + std::move(msg)),
        line(l),
        col(c) {}
};

struct TypeError : std::runtime_error {
  explicit TypeError(const std::string &msg)
      : std::runtime_error("type error: " + msg) {}
};

// Raised when evaluation gets stuck. Impossible on well-typed closed input;
// seeing one means the typechecker let something bad through.
struct EvalError : std::logic_error {
  explicit EvalError(const std::string &msg)
      : std::logic_error("evaluator stuck: " + msg) {}
};

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string &msg)
      : std::runtime_error("semantic domain error: " + msg) {}
};

struct UnsupportedFunctor : std::runtime_error {
  explicit UnsupportedFunctor(const std::string &msg)
      : std::runtime_error("unsupported recursive-type functor: " + msg) {}
};

}  // namespace recurrify
