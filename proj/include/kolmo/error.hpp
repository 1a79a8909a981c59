#pragma once

#include <stdexcept>
#include <string>

namespace kolmo {

// Caller passed something outside an operation's contract (bad flag, bad
// limits, malformed text). Maps to exit status 2 in the CLI.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A well-formed request that the domain rejects: certification failures,
// out-of-limits atoms, insufficient work ceilings and the like.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

// Broken internal invariant. Seeing one of these is a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace kolmo
