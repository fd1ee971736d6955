#include "matryoshka/error.hpp"

namespace matryoshka {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "InvalidDimension";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::NonStationary: return "NonStationary";
    case ErrorKind::InsufficientMoments: return "InsufficientMoments";
    case ErrorKind::UnsupportedGamma: return "UnsupportedGamma";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what),
      kind_(kind),
      index_(index) {}

bool Error::is_numerical() const noexcept {
  switch (kind_) {
    case ErrorKind::SingularMatrix:
    case ErrorKind::DegenerateSpectrum:
    case ErrorKind::Overflow:
    case ErrorKind::NonStationary:
      return true;
    default:
      return false;
  }
}

}  // namespace matryoshka
