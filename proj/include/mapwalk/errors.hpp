#pragma once

#include <stdexcept>
#include <string>

namespace mapwalk {

// Malformed input: law files, configs, literals.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computed structure violated an invariant that the theory guarantees.
// Always signals a bug upstream (or a corrupted input that slipped past
// validation), never a legitimate outcome.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Semigroup closure grew past the configured element cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A tuple law does not decompose as a shift-compatible invariant family.
class ClassificationError : public std::runtime_error {
 public:
  ClassificationError(const std::string& what, std::string residual)
      : std::runtime_error(what), residual_(std::move(residual)) {}
  const std::string& residual() const noexcept { return residual_; }

 private:
  std::string residual_;
};

}  // namespace mapwalk
