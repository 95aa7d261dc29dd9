/*
 * decomposition.hpp: exact martingale expansions of linear color statistics.
 *
 * For a right eigenpair Rξ = λξ the one-step identity
 *
 *     C_{j+1}·ξ = (1 + λ/(j+1)) C_j·ξ + λ(χ_{j+1}·ξ − C_j·ξ/(j+1))
 *
 * iterates to
 *
 *     C_{n+1}·ξ = Π_{n+1}(λ) C_0·ξ + Σ_{j=0}^{n} T(λ,j,n) Δ_j,
 *
 * with Π_m(λ) = ∏_{j=0}^{m-1}(1 + λ/(j+1)) (growth_product),
 * T(λ,j,n) = ∏_{k=j+1}^{n}(1 + λ/(k+1)) (tail_product, 1 when j = n) and
 * Δ_j = λ(χ_{j+1}·ξ − C_j·ξ/(j+1)) a martingale difference.
 *
 * Index convention: scalar helpers use the (j, n) indices of the formula
 * above. Trajectory-level functions take a trajectory with N draws and
 * expand C_N, i.e. n = N − 1.
 *
 * For a Jordan pair (ξ_2, ξ_3) the tail vector picks up a second family of
 * increments weighted by K(i,n) (jordan_weight) and a second deterministic
 * term Z(n,λ) C_0·ξ_2 (appendix_zeroth).
 */

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "urnbound/spectral.hpp"
#include "urnbound/urn_process.hpp"

namespace urnbound {

// Residual tolerance for accepting (λ, ξ) or (λ, ξ_2, ξ_3) as eigen data.
inline constexpr double kEigenpairTolerance = 1e-8;

// Π_n(λ); λ ∈ (−1, 1] (λ = 1 telescopes to n + 1). Throws LambdaOutOfRange.
double growth_product(double lambda, std::size_t n);

// T(λ, j, n). Throws IndexOrder when j > n.
double tail_product(double lambda, std::size_t j, std::size_t n);

// T(λ, j, n) for j = 0..n by one backward pass.
std::vector<double> tail_products(double lambda, std::size_t n);

// A_n(λ) = Π_{n+1}(λ)·c0, the deterministic part of C_{n+1}·ξ.
double zeroth_term(double lambda, std::size_t n, double c0);

struct MartingaleExpansion {
    double lambda = 0.0;
    double zeroth = 0.0;
    std::vector<double> weights;     // T(λ, j, N−1)
    std::vector<double> increments;  // Δ_j
    double reconstructed = 0.0;      // zeroth + Σ weights·increments
    double direct = 0.0;             // C_N·ξ from the trajectory

    double residual() const;           // |reconstructed − direct|
    double relative_residual() const;  // residual / max(1, |direct|)
};

// Throws NotEigenpair when max|Rξ − λξ| > 1e-8.
MartingaleExpansion martingale_decompose(const Trajectory& traj, const Vector& xi, double lambda);

// Columns j, weight, increment, partial_sum; partial_sum starts from zeroth.
void write_expansion_csv(std::ostream& os, const MartingaleExpansion& e);

// Σ_{j=0}^{n} T(λ, j, n)².
double dn_exact(double lambda, std::size_t n);

// dn_exact for every n = 0..n_max via D_n = D_{n−1}(1 + λ/(n+1))² + 1.
std::vector<double> dn_exact_series(double lambda, std::size_t n_max);

enum class DnRegime { Negative, Zero, Subcritical, Critical, Supercritical };

std::string to_string(DnRegime regime);

struct DnAsymptotic {
    DnRegime regime = DnRegime::Zero;
    std::string growth;     // "n", "n log n" or "n^{2λ}"
    double constant = 0.0;  // calibrated C(λ)
    double growth_value = 0.0;
    double value = 0.0;     // C(λ)·g(n) ≥ dn_exact(λ, n)
};

// Explicit dominating bound for dn_exact. g is evaluated at n+1 so the bound
// is positive at n = 0; C(λ) is the maximum of dn_exact/g over all
// m ≤ max(10^6, n), cached per (λ, calibration horizon).
DnAsymptotic dn_asymptotic(double lambda, std::size_t n);

// Π_n(λ)·Γ(λ+1)/n^λ → 1.
double euler_ratio(double lambda, std::size_t n);

// K(i, n) = Σ_{j=i+1}^{n} T(λ,j,n)·1/(j+1)·∏_{l=i+1}^{j−1}(1 + λ/(l+1)).
// λ ∈ (−1,1)\{0}. Throws IndexOrder, LambdaOutOfRange.
double jordan_weight(double lambda, std::size_t i, std::size_t n);

// K(i, n) for i = 0..n in O(n), using the collapse
// K(i, n) = T(λ, i, n)·Σ_{j=i+1}^{n} 1/(j + 1 + λ).
std::vector<double> jordan_weights(double lambda, std::size_t n);

// (n/i)^λ (1 + log n)·max_{k≥2}(1 − 1/k)^λ, for 1 ≤ i ≤ n.
double jordan_weight_bound(double lambda, std::size_t i, std::size_t n);

// C with K(i,n) ≤ C·jordan_weight_bound(λ,i,n): 1 for λ ≥ 0, (3/2)^{−λ} for λ < 0.
double jordan_weight_constant(double lambda);

// Coefficient of C_0·ξ_2 in the expansion of C_{n+1}·ξ_3, evaluated term by
// term as a j = 0 term, a j = 1 term and the sum over j ≥ 2.
double appendix_zeroth(double lambda, std::size_t n);

// Same coefficient without the λ ≠ 0 restriction; at λ = 0 it is H_{n+1}.
double jordan_zeroth_coefficient(double lambda, std::size_t n);

// K(i, n) for i = 0..n without the λ ≠ 0 restriction.
std::vector<double> jordan_weights_unchecked(double lambda, std::size_t n);

struct JordanExpansion {
    double lambda = 0.0;
    double zeroth_xi3 = 0.0;                // Π_N(λ)·C_0·ξ_3
    double zeroth_xi2 = 0.0;                // Z(N−1, λ)·C_0·ξ_2
    std::vector<double> direct_weights;     // T(λ, j, N−1)
    std::vector<double> direct_increments;  // (χ_{j+1} − C_j/(j+1))·(ξ_2 + λξ_3)
    std::vector<double> nested_weights;     // K(i, N−1); empty when λ = 0
    std::vector<double> nested_increments;  // λ(χ_{i+1} − C_i/(i+1))·ξ_2
    double reconstructed = 0.0;
    double direct = 0.0;                    // C_N·ξ_3 from the trajectory

    double zeroth() const { return zeroth_xi3 + zeroth_xi2; }
    // Total martingale difference at step j.
    double difference(std::size_t j) const;
    double residual() const;
    double relative_residual() const;
};

// λ ≠ 0. Throws NotJordanPair, LambdaOutOfRange.
JordanExpansion jordan_decompose(const Trajectory& traj, const Vector& xi2, const Vector& xi3, double lambda);

// λ = 0: C_N·ξ_3 = C_0·ξ_3 + C_0·ξ_2·H_N + Σ_j (χ_{j+1} − C_j/(j+1))·ξ_2.
JordanExpansion repeated_zero_decompose(const Trajectory& traj, const Vector& xi2, const Vector& xi3);

// Columns j, weight, increment, partial_sum; weight is 1 and increment the
// total Jordan martingale difference at step j.
void write_expansion_csv(std::ostream& os, const JordanExpansion& e);

struct MartingaleSeries {
    double lambda = 0.0;
    std::vector<double> values;        // M_0..M_N
    std::vector<double> normalizers;   // Π_0(λ)..Π_N(λ)
    std::vector<double> compensators;  // Σ_{j<n} C_j·ξ_2/((j+1)Π_{j+1}(λ))
};

// M_n = C_n·ξ_3/Π_n(λ) − Σ_{j=0}^{n−1} C_j·ξ_2/((j+1)Π_{j+1}(λ)). λ ≠ 0.
MartingaleSeries dm_martingale(const Trajectory& traj, const Vector& xi2, const Vector& xi3, double lambda);

// For each j < N: Σ_i (C_j[i]/(j+1))·Δ_j^{(i)}, the exact conditional mean of
// the eigen increment over the d possible next draws.
std::vector<double> increment_conditional_means(const Trajectory& traj, const Vector& xi, double lambda);

// For each j < N: Σ_i (C_j[i]/(j+1))·M_{j+1}^{(i)} − M_j.
std::vector<double> dm_conditional_drifts(const Trajectory& traj, const Vector& xi2, const Vector& xi3,
                                          double lambda);

}  // namespace urnbound
