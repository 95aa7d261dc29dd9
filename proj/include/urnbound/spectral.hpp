/*
 * spectral.hpp: replacement matrices and their real spectral reduction.
 *
 * A balanced urn is driven by a row-stochastic irreducible matrix R. Every
 * linear color statistic C_n·v is reduced to the basis {1, ξ_2, ..., ξ_d} of
 * right eigenvectors (and, for a defective repeated eigenvalue, a Jordan pair
 * ξ_2, ξ_3 with Rξ_3 = ξ_2 + λξ_3). The coefficient of 1 is always π·v, where
 * π is the stationary (left Perron) vector.
 *
 * Conventions:
 *   - eigenvectors are scaled so max |ξ_i| = 1, sign chosen so the first
 *     nonzero component is positive;
 *   - a Jordan tail ξ_3 is pinned by ξ_3[p] = 0, p = first index where |ξ_2|
 *     attains its maximum;
 *   - eigenvalues within 1e-8 are one repeated eigenvalue; numerical rank
 *     uses singular values above 1e-9.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace urnbound {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr double kRepeatedTolerance = 1e-8;
inline constexpr double kRankTolerance = 1e-9;
inline constexpr double kImaginaryTolerance = 1e-9;

class ReplacementMatrix {
  public:
    // Validates and builds; see validate_matrix.
    explicit ReplacementMatrix(const Matrix& rows);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    const Matrix& matrix() const noexcept { return m_; }
    double operator()(std::size_t i, std::size_t j) const {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

  private:
    Matrix m_;
};

// Throws NegativeEntry, RowSumNotOne, NotIrreducible or InvalidDimension.
// Rows within 1e-12 of summing to 1 are renormalized.
ReplacementMatrix validate_matrix(const std::vector<std::vector<double>>& rows);

// Strong connectivity of the graph i -> j iff R[i][j] > 0.
bool is_irreducible(const Matrix& m);

// Left Perron vector: πR = π, Σπ = 1, π > 0.
Vector stationary_vector(const ReplacementMatrix& r);

struct EigenvalueInfo {
    double value = 0.0;
    std::size_t algebraic = 0;
    std::size_t geometric = 0;
};

// Eigenvalue 1 first, then the nonprincipal ones in descending order.
// Throws ComplexSpectrum, or LambdaOutOfRange for a nonprincipal |λ| = 1.
std::vector<EigenvalueInfo> real_spectrum(const ReplacementMatrix& r);

// d - rank(R - λI).
std::size_t geometric_multiplicity(const ReplacementMatrix& r, double lambda);

// Canonically scaled ξ with Rξ = λξ. Throws NotAnEigenvalue.
Vector right_eigenvector(const ReplacementMatrix& r, double lambda);

// Basis of the eigenspace, one canonical vector per geometric multiplicity.
std::vector<Vector> right_eigenspace(const ReplacementMatrix& r, double lambda);

struct JordanPair {
    Vector head;  // ξ_2, eigenvector
    Vector tail;  // ξ_3, Rξ_3 = ξ_2 + λξ_3
};

// Throws NotRepeated, NotDefective, UnsupportedJordanStructure.
JordanPair jordan_chain(const ReplacementMatrix& r, double lambda);

enum class VectorRole { Eigen, JordanHead, JordanTail };

struct RightVector {
    double lambda = 0.0;
    Vector vec;
    VectorRole role = VectorRole::Eigen;
    // For a JordanTail, index of its head within SpectralDecomposition::right_vectors.
    std::optional<std::size_t> head;
};

struct SpectralDecomposition {
    Vector pi;
    std::vector<EigenvalueInfo> eigenvalues;
    // The d-1 nonprincipal basis vectors, ordered like eigenvalues (head before tail).
    std::vector<RightVector> right_vectors;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(pi.size()); }
};

SpectralDecomposition decompose_spectrum(const ReplacementMatrix& r);

struct BasisCoefficients {
    double principal = 0.0;      // coefficient of the all-ones vector, equals π·v
    std::vector<double> alphas;  // aligned with right_vectors
};

// v = principal·1 + Σ alphas[i]·right_vectors[i].vec. Throws BasisSingular.
BasisCoefficients basis_coefficients(const SpectralDecomposition& s, const Vector& v);

// Coefficients of the color indicator e_color.
BasisCoefficients indicator_coefficients(const SpectralDecomposition& s, std::size_t color);

// max |Rξ - λξ|.
double eigen_residual(const Matrix& r, const Vector& xi, double lambda);

// max |Rξ_3 - ξ_2 - λξ_3|.
double jordan_residual(const Matrix& r, const Vector& head, const Vector& tail, double lambda);

}  // namespace urnbound
