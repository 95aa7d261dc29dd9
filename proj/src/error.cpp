#include "urnbound/error.hpp"

namespace urnbound {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidDimension: return "InvalidDimension";
        case ErrorKind::NegativeEntry: return "NegativeEntry";
        case ErrorKind::RowSumNotOne: return "RowSumNotOne";
        case ErrorKind::NotIrreducible: return "NotIrreducible";
        case ErrorKind::ComplexSpectrum: return "ComplexSpectrum";
        case ErrorKind::NotAnEigenvalue: return "NotAnEigenvalue";
        case ErrorKind::NotDefective: return "NotDefective";
        case ErrorKind::NotRepeated: return "NotRepeated";
        case ErrorKind::UnsupportedJordanStructure: return "UnsupportedJordanStructure";
        case ErrorKind::BasisSingular: return "BasisSingular";
        case ErrorKind::InvalidInitial: return "InvalidInitial";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::LambdaOutOfRange: return "LambdaOutOfRange";
        case ErrorKind::IndexOrder: return "IndexOrder";
        case ErrorKind::NotEigenpair: return "NotEigenpair";
        case ErrorKind::NotJordanPair: return "NotJordanPair";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace urnbound
