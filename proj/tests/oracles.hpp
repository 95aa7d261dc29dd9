// Independent reference computations for the tests. Nothing here calls into
// the library except for plain data types; every quantity is recomputed the
// slow, obvious way.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// R = [[1-a, a], [b, 1-b]] solved by hand.
struct TwoByTwo {
    double a, b;
    Vec pi() const { return (Vec(2) << b / (a + b), a / (a + b)).finished(); }
    double lambda() const { return 1.0 - a - b; }
    // (a, -b) scaled so the max-abs entry is 1.
    Vec xi() const {
        Vec v(2);
        v << a, -b;
        return v / std::max(a, b);
    }
};

// det(xI - R) for a 3x3 matrix, coefficients from trace, principal minors, det.
inline double charpoly3(const Mat& r, double x) {
    const double tr = r.trace();
    const double minors = r(0, 0) * r(1, 1) - r(0, 1) * r(1, 0) + r(0, 0) * r(2, 2) - r(0, 2) * r(2, 0) +
                          r(1, 1) * r(2, 2) - r(1, 2) * r(2, 1);
    return x * x * x - tr * x * x + minors * x - r.determinant();
}

// ∏_{k=from}^{to} (1 + λ/(k+1)), empty product 1.
inline double product(double lambda, long from, long to) {
    double p = 1.0;
    for (long k = from; k <= to; ++k) p *= 1.0 + lambda / static_cast<double>(k + 1);
    return p;
}

inline double growth(double lambda, std::size_t n) { return product(lambda, 0, static_cast<long>(n) - 1); }

inline double tail(double lambda, std::size_t j, std::size_t n) {
    return product(lambda, static_cast<long>(j) + 1, static_cast<long>(n));
}

// Σ_j T(λ,j,n)², each T by direct multiplication. O(n²).
inline double dn(double lambda, std::size_t n) {
    double s = 0.0;
    for (std::size_t j = 0; j <= n; ++j) s += std::pow(tail(lambda, j, n), 2);
    return s;
}

// K(i,n) from its definition as a double loop. O(n²) per entry.
inline double jordan_weight(double lambda, std::size_t i, std::size_t n) {
    double s = 0.0;
    for (std::size_t j = i + 1; j <= n; ++j) {
        s += tail(lambda, j, n) / static_cast<double>(j + 1) *
             product(lambda, static_cast<long>(i) + 1, static_cast<long>(j) - 1);
    }
    return s;
}

// Coefficient of C_0·ξ_2 in C_{n+1}·ξ_3: Σ_j T(λ,j,n) Π_j(λ)/(j+1), with
// both products multiplied out afresh for every j.
inline double jordan_zeroth(double lambda, std::size_t n) {
    double s = 0.0;
    for (std::size_t j = 0; j <= n; ++j) s += tail(lambda, j, n) * growth(lambda, j) / static_cast<double>(j + 1);
    return s;
}

// Same coefficient by running the deterministic recurrence
// z_{j+1} = (1 + λ/(j+1)) z_j + Π_j/(j+1), z_0 = 0, and returning z_{n+1}.
inline double jordan_zeroth_recurrence(double lambda, std::size_t n) {
    double z = 0.0, pi = 1.0;
    for (std::size_t j = 0; j <= n; ++j) {
        const double f = 1.0 + lambda / static_cast<double>(j + 1);
        z = f * z + pi / static_cast<double>(j + 1);
        pi *= f;
    }
    return z;
}

// Π_n(λ) n^{-λ} Γ(λ+1) through lgamma: Π_n = Γ(n+1+λ)/(Γ(1+λ)Γ(n+1)).
inline double euler_ratio(double lambda, std::size_t n) {
    const double x = static_cast<double>(n);
    return std::exp(std::lgamma(x + 1.0 + lambda) - std::lgamma(x + 1.0) - lambda * std::log(x));
}

// P(C_n·v > threshold) by walking every draw sequence.
inline double path_tail(const Mat& r, const Vec& c0, std::size_t n, const Vec& v, double threshold) {
    double total = 0.0;
    std::function<void(const Vec&, std::size_t, double)> walk = [&](const Vec& c, std::size_t j, double p) {
        if (j == n) {
            if (c.dot(v) > threshold) total += p;
            return;
        }
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            if (c(i) <= 0.0) continue;
            walk(c + r.row(i).transpose(), j + 1, p * c(i) / static_cast<double>(j + 1));
        }
    };
    walk(c0, 0, 1.0);
    return total;
}

// Total probability of all paths, should be 1.
inline double path_mass(const Mat& r, const Vec& c0, std::size_t n) {
    return path_tail(r, c0, n, Vec::Zero(c0.size()), -1.0);
}

// Upper end of the Wilson score interval written out longhand.
inline double wilson(double hits, double n, double z) {
    const double p = hits / n;
    const double denom = 1.0 + z * z / n;
    const double centre = p + z * z / (2.0 * n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
    return (centre + half) / denom;
}

}  // namespace oracle
