/*
 * bounds.hpp: Azuma–Hoeffding tails for centred linear color statistics.
 *
 * Every statistic is a combination Σ α_i C_n·ξ_i of basis vectors. After
 * subtracting the deterministic zeroth terms A, what remains is a sum of n
 * martingale differences with |difference_j| ≤ c_j, and
 *
 *     P(Σ α_i C_n·ξ_i − A > (n+1)t) ≤ exp(−2(n+1)²t² / Σ_j (2c_j)²).
 *
 * Here n is the number of draws, so C_n carries total mass n+1.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "urnbound/spectral.hpp"

namespace urnbound {

// max ξ − min ξ; bounds |χ·ξ − C·ξ/(j+1)| since C/(j+1) is a convex weight.
double spread(const Vector& xi);

// c_j = |λ|·spread(ξ)·T(λ, j, n) for 0 ≤ j ≤ n.
double increment_bound(const Vector& xi, double lambda, std::size_t j, std::size_t n);

// exp(−2s²/Σ(2c_j)²); s = 0 gives 1, all-zero c_j with s > 0 gives exactly 0.
double azuma_tail(double deviation, std::span<const double> increment_bounds);
double azuma_log_tail(double deviation, std::span<const double> increment_bounds);

struct ComboTerm {
    double alpha = 0.0;
    Vector vec;
    double lambda = 0.0;
    // Set when vec is a Jordan tail ξ_3; holds its eigenvector ξ_2.
    std::optional<Vector> jordan_head;
};

struct BoundReport {
    std::size_t n = 0;
    double t = 0.0;
    std::string statistic;
    std::vector<double> increment_bounds;
    double sum_sq = 0.0;
    double tail = 1.0;
    std::string regime;
    double rate_value = 0.0;
    double log_tail = 0.0;
    double centering = 0.0;  // A/(n+1): shift of the centred event
    std::optional<double> eigen_threshold;  // two-color: t·(ξ_1 − ξ_2)
    std::vector<std::string> flags;
};

nlohmann::ordered_json to_json(const BoundReport& report);

// Per-step bounds c_j (j = 0..n−1) for the combination at horizon n draws.
std::vector<double> combo_increment_bounds(std::span<const ComboTerm> combo, std::size_t n);

// Deterministic part A of Σ α_i C_n·ξ_i.
double combo_zeroth(std::span<const ComboTerm> combo, const Vector& initial, std::size_t n);

// Σ α_i ξ_i; the centred event is C_n·w > A + (n+1)t.
Vector combo_vector(std::span<const ComboTerm> combo);

BoundReport statistic_bound(std::span<const ComboTerm> combo, const Vector& initial, std::size_t n, double t,
                            std::string description = "combination");

// Single right vector of a decomposition, α = 1.
std::vector<ComboTerm> basis_combo(const SpectralDecomposition& s, std::size_t index);

// v − (π·v)1 expressed in the right-vector basis.
std::vector<ComboTerm> vector_combo(const SpectralDecomposition& s, const Vector& v);

// P(C_n[color] − π_color(n+1) > t(n+1)) through the eigen-combination.
BoundReport color_deviation_bound(const ReplacementMatrix& r, std::size_t color, const Vector& initial,
                                  std::size_t n, double t);

BoundReport vector_deviation_bound(const ReplacementMatrix& r, const Vector& v, const Vector& initial,
                                   std::size_t n, double t);

struct RateFunction {
    std::string label;  // "n", "n/log n" or "n^{2-2λ}"
    double value = 0.0;  // (n+1)²/dn_asymptotic(λ, n)
};

RateFunction rate_function(double lambda, std::size_t n);

}  // namespace urnbound
