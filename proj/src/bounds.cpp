#include "urnbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "urnbound/decomposition.hpp"
#include "urnbound/error.hpp"

namespace urnbound {
namespace {

constexpr double kZeroEigenvalue = 1e-12;

bool is_zero_eigen(const ComboTerm& term) {
    return !term.jordan_head && std::abs(term.lambda) < kZeroEigenvalue;
}

double sum_of_squares(std::span<const double> c) {
    double s = 0.0;
    for (double x : c) {
        if (!(x >= 0.0)) throw UrnError(ErrorKind::InvalidArgument, "increment bounds must be nonnegative");
        s += 4.0 * x * x;
    }
    return s;
}

}  // namespace

double spread(const Vector& xi) { return xi.maxCoeff() - xi.minCoeff(); }

double increment_bound(const Vector& xi, double lambda, std::size_t j, std::size_t n) {
    return std::abs(lambda) * spread(xi) * tail_product(lambda, j, n);
}

double azuma_log_tail(double deviation, std::span<const double> increment_bounds) {
    if (!(deviation >= 0.0)) throw UrnError(ErrorKind::InvalidArgument, "deviation must be nonnegative");
    const double sum_sq = sum_of_squares(increment_bounds);
    if (deviation == 0.0) return 0.0;
    if (sum_sq == 0.0) return -std::numeric_limits<double>::infinity();
    return -2.0 * deviation * deviation / sum_sq;
}

double azuma_tail(double deviation, std::span<const double> increment_bounds) {
    return std::exp(azuma_log_tail(deviation, increment_bounds));
}

nlohmann::ordered_json to_json(const BoundReport& report) {
    nlohmann::ordered_json j;
    j["n"] = report.n;
    j["t"] = report.t;
    j["statistic"] = report.statistic;
    j["increment_bounds"] = report.increment_bounds;
    j["sum_sq"] = report.sum_sq;
    j["tail"] = report.tail;
    j["regime"] = report.regime;
    j["rate_value"] = report.rate_value;
    j["log_tail"] = report.log_tail;
    j["centering"] = report.centering;
    if (report.eigen_threshold) j["eigen_threshold"] = *report.eigen_threshold;
    j["flags"] = report.flags;
    return j;
}

std::vector<double> combo_increment_bounds(std::span<const ComboTerm> combo, std::size_t n) {
    if (n == 0) return {};
    const std::size_t last = n - 1;
    std::vector<double> c(n, 0.0);
    for (const auto& term : combo) {
        const double a = std::abs(term.alpha);
        if (a == 0.0 || is_zero_eigen(term)) continue;
        const auto tails = tail_products(term.lambda, last);
        if (!term.jordan_head) {
            const double scale = a * std::abs(term.lambda) * spread(term.vec);
            for (std::size_t j = 0; j < n; ++j) c[j] += scale * tails[j];
            continue;
        }
        const Vector& head = *term.jordan_head;
        const double direct = spread(head + term.lambda * term.vec);
        const double nested = std::abs(term.lambda) * spread(head);
        const auto k = jordan_weights_unchecked(term.lambda, last);
        for (std::size_t j = 0; j < n; ++j) c[j] += a * (tails[j] * direct + k[j] * nested);
    }
    return c;
}

double combo_zeroth(std::span<const ComboTerm> combo, const Vector& initial, std::size_t n) {
    double a = 0.0;
    for (const auto& term : combo) {
        double z = growth_product(term.lambda, n) * initial.dot(term.vec);
        if (term.jordan_head && n > 0) {
            z += jordan_zeroth_coefficient(term.lambda, n - 1) * initial.dot(*term.jordan_head);
        }
        a += term.alpha * z;
    }
    return a;
}

Vector combo_vector(std::span<const ComboTerm> combo) {
    if (combo.empty()) throw UrnError(ErrorKind::InvalidArgument, "empty combination");
    Vector w = Vector::Zero(combo.front().vec.size());
    for (const auto& term : combo) w += term.alpha * term.vec;
    return w;
}

RateFunction rate_function(double lambda, std::size_t n) {
    const auto dn = dn_asymptotic(lambda, n);
    RateFunction f;
    switch (dn.regime) {
        case DnRegime::Critical: f.label = "n/log n"; break;
        case DnRegime::Supercritical: f.label = "n^{2-2λ}"; break;
        default: f.label = "n"; break;
    }
    const double m = static_cast<double>(n) + 1.0;
    f.value = m * m / dn.value;
    return f;
}

BoundReport statistic_bound(std::span<const ComboTerm> combo, const Vector& initial, std::size_t n, double t,
                            std::string description) {
    if (combo.empty()) throw UrnError(ErrorKind::InvalidArgument, "empty combination");
    if (!(t >= 0.0)) throw UrnError(ErrorKind::InvalidArgument, "threshold t must be nonnegative");

    BoundReport report;
    report.n = n;
    report.t = t;
    report.statistic = std::move(description);
    report.increment_bounds = combo_increment_bounds(combo, n);
    report.sum_sq = sum_of_squares(report.increment_bounds);
    const double m = static_cast<double>(n) + 1.0;
    report.log_tail = azuma_log_tail(m * t, report.increment_bounds);
    report.tail = std::exp(report.log_tail);
    report.centering = combo_zeroth(combo, initial, n) / m;

    const ComboTerm* dominant = nullptr;
    bool jordan = false;
    for (const auto& term : combo) {
        if (is_zero_eigen(term)) {
            if (term.alpha != 0.0 && std::find(report.flags.begin(), report.flags.end(), "zero_eigenvalue_constant") ==
                                         report.flags.end()) {
                report.flags.emplace_back("zero_eigenvalue_constant");
            }
            continue;
        }
        if (term.alpha == 0.0) continue;
        if (!dominant || term.lambda > dominant->lambda + kRepeatedTolerance) {
            dominant = &term;
            jordan = term.jordan_head.has_value();
        } else if (std::abs(term.lambda - dominant->lambda) < kRepeatedTolerance && term.jordan_head) {
            jordan = true;
        }
    }
    if (!dominant) {
        report.regime = "degenerate";
        report.rate_value = std::numeric_limits<double>::infinity();
        report.flags.emplace_back("no_martingale_part");
        return report;
    }
    auto rate = rate_function(dominant->lambda, n);
    report.regime = rate.label;
    report.rate_value = rate.value;
    if (jordan) {
        const double log_factor = 1.0 + std::log(std::max<double>(static_cast<double>(n), 1.0));
        report.regime += "+jordan";
        report.rate_value /= log_factor * log_factor;
    }
    return report;
}

std::vector<ComboTerm> basis_combo(const SpectralDecomposition& s, std::size_t index) {
    if (index >= s.right_vectors.size()) throw UrnError(ErrorKind::InvalidArgument, "basis index out of range");
    const auto& rv = s.right_vectors[index];
    ComboTerm term{1.0, rv.vec, rv.lambda, std::nullopt};
    if (rv.role == VectorRole::JordanTail) term.jordan_head = s.right_vectors[*rv.head].vec;
    return {term};
}

std::vector<ComboTerm> vector_combo(const SpectralDecomposition& s, const Vector& v) {
    const auto coeffs = basis_coefficients(s, v);
    std::vector<ComboTerm> combo;
    for (std::size_t i = 0; i < s.right_vectors.size(); ++i) {
        const auto& rv = s.right_vectors[i];
        ComboTerm term{coeffs.alphas[i], rv.vec, rv.lambda, std::nullopt};
        if (rv.role == VectorRole::JordanTail) term.jordan_head = s.right_vectors[*rv.head].vec;
        combo.push_back(std::move(term));
    }
    return combo;
}

BoundReport color_deviation_bound(const ReplacementMatrix& r, std::size_t color, const Vector& initial,
                                  std::size_t n, double t) {
    if (color >= r.dim()) throw UrnError(ErrorKind::InvalidArgument, "color index out of range");
    const auto s = decompose_spectrum(r);
    const auto combo =
        vector_combo(s, Vector::Unit(static_cast<Eigen::Index>(r.dim()), static_cast<Eigen::Index>(color)));
    std::ostringstream desc;
    desc << "C_n[" << color << "] - pi_" << color << "(n+1)";
    auto report = statistic_bound(combo, initial, n, t, desc.str());
    if (r.dim() == 2) {
        const Vector& xi = s.right_vectors.front().vec;
        report.eigen_threshold = t * (xi(0) - xi(1));
    }
    return report;
}

BoundReport vector_deviation_bound(const ReplacementMatrix& r, const Vector& v, const Vector& initial,
                                   std::size_t n, double t) {
    const auto s = decompose_spectrum(r);
    const auto combo = vector_combo(s, v);
    std::ostringstream desc;
    desc << "C_n.v - (pi.v)(n+1), v = (";
    for (Eigen::Index i = 0; i < v.size(); ++i) desc << (i ? "," : "") << v(i);
    desc << ")";
    return statistic_bound(combo, initial, n, t, desc.str());
}

}  // namespace urnbound
