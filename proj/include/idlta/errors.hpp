// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IDLTA_ERRORS_HPP_
#define IDLTA_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace idlta {

// Base of everything thrown by the library. `kind` is a stable
// machine-readable tag; the CLI emits it on its error line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& msg)
      : Error("invalid-input", msg) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg) : Error("format", msg) {}
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& msg)
      : Error("configuration", msg) {}
};

// Model parameters outside the FCM domain (e.g. alpha >= 1).
class ModelDomainError : public Error {
 public:
  explicit ModelDomainError(const std::string& msg)
      : Error("model-domain", msg) {}
};

class DegenerateDemixingError : public Error {
 public:
  explicit DegenerateDemixingError(const std::string& msg)
      : Error("degenerate-demixing", msg) {}
};

// A single demixing-row update hit a singular system; callers may skip
// the row and continue the sweep.
class IllConditionedUpdateError : public Error {
 public:
  explicit IllConditionedUpdateError(const std::string& msg)
      : Error("ill-conditioned-update", msg) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error("numerical", msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error("io", msg) {}
};

}  // namespace idlta

#endif  // IDLTA_ERRORS_HPP_
