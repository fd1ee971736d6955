#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace matryoshka {

enum class ErrorKind {
  InvalidDimension,
  InvalidInput,
  SingularMatrix,
  DegenerateSpectrum,
  Overflow,
  NonStationary,
  InsufficientMoments,
  UnsupportedGamma,
};

std::string_view to_string(ErrorKind kind);

/// Typed failure raised by every numerical routine in the library.
///
/// `index()` carries the offending (zero-based) diagonal position where one
/// exists, e.g. the first zero pivot for SingularMatrix.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<std::size_t> index = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

  /// True for the failures the CLI reports as numerical (exit code 3).
  bool is_numerical() const noexcept;

 private:
  ErrorKind kind_;
  std::optional<std::size_t> index_;
};

}  // namespace matryoshka
