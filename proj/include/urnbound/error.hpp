#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace urnbound {

enum class ErrorKind {
    InvalidDimension,
    NegativeEntry,
    RowSumNotOne,
    NotIrreducible,
    ComplexSpectrum,
    NotAnEigenvalue,
    NotDefective,
    NotRepeated,
    UnsupportedJordanStructure,
    BasisSingular,
    InvalidInitial,
    DimensionMismatch,
    LambdaOutOfRange,
    IndexOrder,
    NotEigenpair,
    NotJordanPair,
    InvalidArgument,
    TooLarge,
    GridMismatch,
    ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers branch on kind().
class UrnError : public std::runtime_error {
  public:
    UrnError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

}  // namespace urnbound
