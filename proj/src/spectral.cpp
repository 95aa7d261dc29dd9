#include "urnbound/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "urnbound/error.hpp"

namespace urnbound {
namespace {

constexpr double kSnapZero = 1e-14;
// Eigen's Hessenberg QR splits a defective pair by O(sqrt(eps)).
constexpr double kIterativeClusterTolerance = 1e-6;

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
    const auto d = rows.size();
    Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        if (rows[i].size() != d) {
            std::ostringstream msg;
            msg << "row " << i << " has " << rows[i].size() << " entries, expected " << d;
            throw UrnError(ErrorKind::InvalidDimension, msg.str());
        }
        for (std::size_t j = 0; j < d; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

bool reaches_all(const Matrix& m, bool transpose) {
    const auto d = m.rows();
    std::vector<bool> seen(static_cast<std::size_t>(d), false);
    std::vector<Eigen::Index> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const auto i = stack.back();
        stack.pop_back();
        for (Eigen::Index j = 0; j < d; ++j) {
            const double w = transpose ? m(j, i) : m(i, j);
            if (w > 0.0 && !seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = true;
                stack.push_back(j);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

Matrix shifted(const Matrix& m, double lambda) {
    return m - lambda * Matrix::Identity(m.rows(), m.cols());
}

void canonicalize(Vector& v) {
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    v /= std::abs(v(arg));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) <= kSnapZero) v(i) = 0.0;
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) != 0.0) {
            if (v(i) < 0.0) v = -v;
            break;
        }
    }
}

std::vector<double> closed_form_roots(const Matrix& m) {
    const double trace = m.trace();
    if (m.rows() == 2) return {trace - 1.0};

    // x^3 - tr x^2 + m2 x - det = (x - 1)(x^2 - (tr - 1)x + det).
    const double sum = trace - 1.0;
    const double product = m.determinant();
    const double disc = sum * sum - 4.0 * product;
    const double root = std::sqrt(std::abs(disc));
    if (root < kRepeatedTolerance) return {0.5 * sum, 0.5 * sum};
    if (disc < 0.0) {
        std::ostringstream msg;
        msg << "nonprincipal pair " << 0.5 * sum << " ± " << 0.5 * root << "i";
        throw UrnError(ErrorKind::ComplexSpectrum, msg.str());
    }
    // Cancellation-free pair.
    const double big = 0.5 * (sum + std::copysign(root, sum == 0.0 ? 1.0 : sum));
    const double small = big != 0.0 ? product / big : 0.5 * (sum - root);
    return {big, small};
}

std::vector<double> iterative_roots(const Matrix& m) {
    Eigen::EigenSolver<Matrix> solver(m, false);
    if (solver.info() != Eigen::Success) {
        throw UrnError(ErrorKind::ComplexSpectrum, "eigenvalue iteration did not converge");
    }
    std::vector<std::complex<double>> values(solver.eigenvalues().data(),
                                             solver.eigenvalues().data() + m.rows());
    auto principal = std::min_element(values.begin(), values.end(), [](auto a, auto b) {
        return std::abs(a - 1.0) < std::abs(b - 1.0);
    });
    values.erase(principal);
    std::sort(values.begin(), values.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });

    std::vector<double> roots;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i + 1;
        std::complex<double> sum = values[i];
        while (j < values.size() && std::abs(values[j] - values[i]) < kIterativeClusterTolerance) {
            sum += values[j];
            ++j;
        }
        const auto mean = sum / static_cast<double>(j - i);
        if (std::abs(mean.imag()) > kImaginaryTolerance) {
            std::ostringstream msg;
            msg << "nonprincipal eigenvalue " << mean.real() << " + " << mean.imag() << "i";
            throw UrnError(ErrorKind::ComplexSpectrum, msg.str());
        }
        for (std::size_t k = i; k < j; ++k) roots.push_back(mean.real());
        i = j;
    }
    return roots;
}

std::size_t rank_of(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& s = svd.singularValues();
    return static_cast<std::size_t>((s.array() > kRankTolerance).count());
}

const EigenvalueInfo& find_nonprincipal(const std::vector<EigenvalueInfo>& spectrum, double lambda) {
    for (std::size_t i = 1; i < spectrum.size(); ++i) {
        if (std::abs(spectrum[i].value - lambda) < kRepeatedTolerance) return spectrum[i];
    }
    std::ostringstream msg;
    msg << lambda << " is not a nonprincipal eigenvalue";
    throw UrnError(ErrorKind::NotAnEigenvalue, msg.str());
}

}  // namespace

ReplacementMatrix::ReplacementMatrix(const Matrix& rows) : m_(rows) {
    const auto d = m_.rows();
    if (d < 2 || m_.cols() != d) {
        throw UrnError(ErrorKind::InvalidDimension, "replacement matrix must be square with d >= 2");
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            if (!std::isfinite(m_(i, j)) || m_(i, j) < 0.0) {
                std::ostringstream msg;
                msg << "entry (" << i << "," << j << ") = " << m_(i, j);
                throw UrnError(ErrorKind::NegativeEntry, msg.str());
            }
        }
        const double sum = m_.row(i).sum();
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "row " << i << " sums to " << sum;
            throw UrnError(ErrorKind::RowSumNotOne, msg.str());
        }
        m_.row(i) /= sum;
    }
    if (!is_irreducible(m_)) {
        throw UrnError(ErrorKind::NotIrreducible, "color graph is not strongly connected");
    }
}

ReplacementMatrix validate_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2) throw UrnError(ErrorKind::InvalidDimension, "need d >= 2 colors");
    return ReplacementMatrix(rows_to_matrix(rows));
}

bool is_irreducible(const Matrix& m) {
    return reaches_all(m, false) && reaches_all(m, true);
}

Vector stationary_vector(const ReplacementMatrix& r) {
    const auto d = static_cast<Eigen::Index>(r.dim());
    Matrix a(d + 1, d);
    a.topRows(d) = (r.matrix() - Matrix::Identity(d, d)).transpose();
    a.row(d).setOnes();
    Vector b = Vector::Zero(d + 1);
    b(d) = 1.0;

    const auto qr = a.colPivHouseholderQr();
    Vector pi = qr.solve(b);
    pi += qr.solve(b - a * pi);
    pi /= pi.sum();
    return pi;
}

std::vector<EigenvalueInfo> real_spectrum(const ReplacementMatrix& r) {
    const Matrix& m = r.matrix();
    std::vector<double> roots = m.rows() <= 3 ? closed_form_roots(m) : iterative_roots(m);
    std::sort(roots.begin(), roots.end(), std::greater<>());

    std::vector<EigenvalueInfo> out{{1.0, 1, 1}};
    std::size_t i = 0;
    while (i < roots.size()) {
        std::size_t j = i + 1;
        double sum = roots[i];
        while (j < roots.size() && std::abs(roots[j] - roots[i]) < kRepeatedTolerance) {
            sum += roots[j];
            ++j;
        }
        const double value = sum / static_cast<double>(j - i);
        if (std::abs(value) >= 1.0 - kRowSumTolerance) {
            std::ostringstream msg;
            msg << "nonprincipal eigenvalue " << value << " lies on the unit circle (periodic matrix)";
            throw UrnError(ErrorKind::LambdaOutOfRange, msg.str());
        }
        out.push_back({value, j - i, geometric_multiplicity(r, value)});
        i = j;
    }
    return out;
}

std::size_t geometric_multiplicity(const ReplacementMatrix& r, double lambda) {
    return r.dim() - rank_of(shifted(r.matrix(), lambda));
}

std::vector<Vector> right_eigenspace(const ReplacementMatrix& r, double lambda) {
    const Matrix a = shifted(r.matrix(), lambda);
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const auto d = a.rows();
    const auto k = d - static_cast<Eigen::Index>((svd.singularValues().array() > kRankTolerance).count());
    if (k == 0) {
        std::ostringstream msg;
        msg << lambda << " is not an eigenvalue (smallest singular value "
            << svd.singularValues()(d - 1) << ")";
        throw UrnError(ErrorKind::NotAnEigenvalue, msg.str());
    }
    const Matrix null = svd.matrixV().rightCols(k);

    // Echelon form: identity on k pivot rows, so the basis is reproducible.
    Eigen::ColPivHouseholderQR<Matrix> qr(null.transpose());
    std::vector<Eigen::Index> pivots(static_cast<std::size_t>(k));
    for (Eigen::Index c = 0; c < k; ++c) pivots[static_cast<std::size_t>(c)] = qr.colsPermutation().indices()(c);
    std::sort(pivots.begin(), pivots.end());
    Matrix block(k, k);
    for (Eigen::Index c = 0; c < k; ++c) block.row(c) = null.row(pivots[static_cast<std::size_t>(c)]);
    const Matrix basis = null * block.inverse();

    std::vector<Vector> out;
    for (Eigen::Index c = 0; c < k; ++c) {
        Vector v = basis.col(c);
        canonicalize(v);
        out.push_back(std::move(v));
    }
    return out;
}

Vector right_eigenvector(const ReplacementMatrix& r, double lambda) {
    return right_eigenspace(r, lambda).front();
}

JordanPair jordan_chain(const ReplacementMatrix& r, double lambda) {
    const auto spectrum = real_spectrum(r);
    const auto& info = find_nonprincipal(spectrum, lambda);
    if (info.algebraic == 1) {
        throw UrnError(ErrorKind::NotRepeated, "eigenvalue has algebraic multiplicity 1");
    }
    if (info.geometric >= 2) {
        throw UrnError(ErrorKind::NotDefective, "eigenspace is not deficient; use right_eigenspace");
    }
    if (info.algebraic > 2) {
        throw UrnError(ErrorKind::UnsupportedJordanStructure, "Jordan chains longer than 2 are not supported");
    }

    const double lam = info.value;
    JordanPair pair;
    pair.head = right_eigenvector(r, lam);
    Eigen::Index pivot = 0;
    pair.head.cwiseAbs().maxCoeff(&pivot);

    const Matrix a = shifted(r.matrix(), lam);
    const auto d = a.rows();
    Matrix reduced(d, d - 1);
    for (Eigen::Index c = 0, k = 0; c < d; ++c) {
        if (c != pivot) reduced.col(k++) = a.col(c);
    }
    const auto qr = reduced.colPivHouseholderQr();
    Vector y = qr.solve(pair.head);
    y += qr.solve(pair.head - reduced * y);

    pair.tail = Vector::Zero(d);
    for (Eigen::Index c = 0, k = 0; c < d; ++c) {
        if (c != pivot) pair.tail(c) = y(k++);
    }
    if (jordan_residual(r.matrix(), pair.head, pair.tail, lam) > 1e-8) {
        throw UrnError(ErrorKind::NotDefective, "generalized eigenvector equation is inconsistent");
    }
    return pair;
}

SpectralDecomposition decompose_spectrum(const ReplacementMatrix& r) {
    SpectralDecomposition s;
    s.pi = stationary_vector(r);
    s.eigenvalues = real_spectrum(r);
    for (std::size_t e = 1; e < s.eigenvalues.size(); ++e) {
        const auto& info = s.eigenvalues[e];
        if (info.geometric == info.algebraic) {
            for (auto& v : right_eigenspace(r, info.value)) {
                s.right_vectors.push_back({info.value, std::move(v), VectorRole::Eigen, std::nullopt});
            }
        } else if (info.algebraic == 2 && info.geometric == 1) {
            auto pair = jordan_chain(r, info.value);
            const std::size_t head = s.right_vectors.size();
            s.right_vectors.push_back({info.value, std::move(pair.head), VectorRole::JordanHead, std::nullopt});
            s.right_vectors.push_back({info.value, std::move(pair.tail), VectorRole::JordanTail, head});
        } else {
            std::ostringstream msg;
            msg << "eigenvalue " << info.value << " has algebraic multiplicity " << info.algebraic
                << " and geometric multiplicity " << info.geometric;
            throw UrnError(ErrorKind::UnsupportedJordanStructure, msg.str());
        }
    }
    if (s.right_vectors.size() + 1 != r.dim()) {
        throw UrnError(ErrorKind::BasisSingular, "right vectors do not span the color space");
    }
    return s;
}

BasisCoefficients basis_coefficients(const SpectralDecomposition& s, const Vector& v) {
    const auto d = static_cast<Eigen::Index>(s.dim());
    if (v.size() != d) throw UrnError(ErrorKind::DimensionMismatch, "statistic vector has wrong dimension");
    Matrix basis(d, d);
    basis.col(0).setOnes();
    for (Eigen::Index c = 1; c < d; ++c) basis.col(c) = s.right_vectors[static_cast<std::size_t>(c - 1)].vec;

    Eigen::JacobiSVD<Matrix> svd(basis);
    const auto& sv = svd.singularValues();
    if (sv(d - 1) <= 1e-10 * sv(0)) {
        throw UrnError(ErrorKind::BasisSingular, "all-ones and right vectors are linearly dependent");
    }
    const auto lu = basis.fullPivLu();
    Vector x = lu.solve(v);
    x += lu.solve(v - basis * x);

    BasisCoefficients out;
    out.principal = x(0);
    out.alphas.assign(x.data() + 1, x.data() + d);
    return out;
}

BasisCoefficients indicator_coefficients(const SpectralDecomposition& s, std::size_t color) {
    if (color >= s.dim()) throw UrnError(ErrorKind::InvalidArgument, "color index out of range");
    return basis_coefficients(s, Vector::Unit(static_cast<Eigen::Index>(s.dim()), static_cast<Eigen::Index>(color)));
}

double eigen_residual(const Matrix& r, const Vector& xi, double lambda) {
    return (r * xi - lambda * xi).cwiseAbs().maxCoeff();
}

double jordan_residual(const Matrix& r, const Vector& head, const Vector& tail, double lambda) {
    return (r * tail - head - lambda * tail).cwiseAbs().maxCoeff();
}

}  // namespace urnbound
