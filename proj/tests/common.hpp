#pragma once

#include <vector>

#include "urnbound/spectral.hpp"

namespace fixture {

inline urnbound::ReplacementMatrix two_color() { return urnbound::validate_matrix({{0.7, 0.3}, {0.4, 0.6}}); }

// Eigenvalues 1, 1/4, 1/4 with one eigenvector for 1/4.
inline urnbound::ReplacementMatrix jordan() {
    return urnbound::validate_matrix({{5.0 / 8, 3.0 / 8, 0.0}, {1.0 / 8, 3.0 / 8, 0.5}, {0.25, 0.25, 0.5}});
}

inline urnbound::ReplacementMatrix symmetric3() {
    return urnbound::validate_matrix({{0.5, 0.25, 0.25}, {0.25, 0.5, 0.25}, {0.25, 0.25, 0.5}});
}

inline urnbound::Vector unit(int d, int i) { return urnbound::Vector::Unit(d, i); }

}  // namespace fixture
