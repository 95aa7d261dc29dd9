#include "urnbound/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <utility>

#include "urnbound/error.hpp"
#include "urnbound/io.hpp"

namespace urnbound {
namespace {

constexpr std::size_t kCalibrationHorizon = 1'000'000;
constexpr double kCriticalTolerance = 1e-12;
constexpr double kCalibrationSlack = 1.0 + 1e-9;

void require_open_unit(double lambda) {
    if (!(lambda > -1.0 && lambda < 1.0)) {
        std::ostringstream msg;
        msg << "lambda = " << lambda << " outside (-1, 1)";
        throw UrnError(ErrorKind::LambdaOutOfRange, msg.str());
    }
}

void require_nonzero(double lambda) {
    require_open_unit(lambda);
    if (lambda == 0.0) {
        throw UrnError(ErrorKind::LambdaOutOfRange, "lambda = 0 is handled by repeated_zero_decompose");
    }
}

std::vector<double> partial_harmonic_tails(double lambda, std::size_t n) {
    // s[i] = Σ_{j=i+1}^{n} 1/(j + 1 + λ)
    std::vector<double> s(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) s[i] = s[i + 1] + 1.0 / (static_cast<double>(i) + 2.0 + lambda);
    return s;
}

std::vector<double> jordan_weights_any(double lambda, std::size_t n) {
    auto k = tail_products(lambda, n);
    const auto s = partial_harmonic_tails(lambda, n);
    for (std::size_t i = 0; i <= n; ++i) k[i] *= s[i];
    return k;
}

double zeroth_coefficient_sum(double lambda, std::size_t n) {
    const auto tails = tail_products(lambda, n);
    // j = 0: all inner products empty.
    double total = tails[0];
    if (n >= 1) total += tails[1] * 0.5 * (1.0 + lambda);
    double prefix = 1.0 + lambda;  // ∏_{l=0}^{j-1}(1 + λ/(l+1)) at j = 1
    for (std::size_t j = 2; j <= n; ++j) {
        prefix *= 1.0 + lambda / static_cast<double>(j);
        total += tails[j] / static_cast<double>(j + 1) * prefix;
    }
    return total;
}

void check_eigenpair(const Matrix& r, const Vector& xi, double lambda) {
    if (xi.size() != r.rows()) throw UrnError(ErrorKind::DimensionMismatch, "eigenvector has wrong dimension");
    const double res = eigen_residual(r, xi, lambda);
    if (res > kEigenpairTolerance) {
        std::ostringstream msg;
        msg << "|R xi - lambda xi| = " << res;
        throw UrnError(ErrorKind::NotEigenpair, msg.str());
    }
}

void check_jordan_pair(const Matrix& r, const Vector& xi2, const Vector& xi3, double lambda) {
    if (xi2.size() != r.rows() || xi3.size() != r.rows()) {
        throw UrnError(ErrorKind::DimensionMismatch, "Jordan vectors have wrong dimension");
    }
    const double head = eigen_residual(r, xi2, lambda);
    const double tail = jordan_residual(r, xi2, xi3, lambda);
    if (head > kEigenpairTolerance || tail > kEigenpairTolerance || xi2.cwiseAbs().maxCoeff() == 0.0) {
        std::ostringstream msg;
        msg << "not a Jordan pair: head residual " << head << ", tail residual " << tail;
        throw UrnError(ErrorKind::NotJordanPair, msg.str());
    }
}

double relative(double residual, double direct) { return residual / std::max(1.0, std::abs(direct)); }

JordanExpansion jordan_expand(const Trajectory& traj, const Vector& xi2, const Vector& xi3, double lambda) {
    JordanExpansion e;
    e.lambda = lambda;
    const std::size_t steps = traj.horizon();
    const Vector& c0 = traj.initial.counts;
    e.zeroth_xi3 = growth_product(lambda, steps) * c0.dot(xi3);
    e.direct = traj.final_counts().dot(xi3);
    if (steps == 0) {
        e.reconstructed = e.zeroth_xi3;
        return e;
    }
    const std::size_t n = steps - 1;
    e.zeroth_xi2 = zeroth_coefficient_sum(lambda, n) * c0.dot(xi2);
    e.direct_weights = tail_products(lambda, n);
    if (lambda != 0.0) e.nested_weights = jordan_weights_any(lambda, n);

    const Vector combined = xi2 + lambda * xi3;
    CountTracker c(traj.matrix, c0);
    e.direct_increments.reserve(steps);
    e.nested_increments.reserve(lambda != 0.0 ? steps : 0);
    long double sum = 0.0L;
    for (std::size_t j = 0; j < steps; ++j) {
        const auto color = static_cast<Eigen::Index>(traj.draws[j]);
        const double scale = 1.0 / static_cast<double>(j + 1);
        e.direct_increments.push_back(combined(color) - c.counts().dot(combined) * scale);
        if (lambda != 0.0) e.nested_increments.push_back(lambda * (xi2(color) - c.counts().dot(xi2) * scale));
        sum += e.difference(j);
        c.draw(traj.draws[j]);
    }
    e.reconstructed = static_cast<double>(static_cast<long double>(e.zeroth()) + sum);
    return e;
}

}  // namespace

double growth_product(double lambda, std::size_t n) {
    if (!(lambda > -1.0 && lambda <= 1.0)) {
        std::ostringstream msg;
        msg << "lambda = " << lambda << " outside (-1, 1]";
        throw UrnError(ErrorKind::LambdaOutOfRange, msg.str());
    }
    double p = 1.0;
    for (std::size_t j = 0; j < n; ++j) p *= 1.0 + lambda / static_cast<double>(j + 1);
    return p;
}

double tail_product(double lambda, std::size_t j, std::size_t n) {
    if (j > n) throw UrnError(ErrorKind::IndexOrder, "tail_product requires j <= n");
    if (!(lambda > -1.0 && lambda <= 1.0)) throw UrnError(ErrorKind::LambdaOutOfRange, "lambda outside (-1, 1]");
    double p = 1.0;
    for (std::size_t k = j + 1; k <= n; ++k) p *= 1.0 + lambda / static_cast<double>(k + 1);
    return p;
}

std::vector<double> tail_products(double lambda, std::size_t n) {
    if (!(lambda > -1.0 && lambda <= 1.0)) throw UrnError(ErrorKind::LambdaOutOfRange, "lambda outside (-1, 1]");
    std::vector<double> t(n + 1, 1.0);
    for (std::size_t j = n; j-- > 0;) t[j] = t[j + 1] * (1.0 + lambda / static_cast<double>(j + 2));
    return t;
}

double zeroth_term(double lambda, std::size_t n, double c0) {
    require_open_unit(lambda);
    return growth_product(lambda, n + 1) * c0;
}

double MartingaleExpansion::residual() const { return std::abs(reconstructed - direct); }
double MartingaleExpansion::relative_residual() const { return relative(residual(), direct); }

MartingaleExpansion martingale_decompose(const Trajectory& traj, const Vector& xi, double lambda) {
    require_open_unit(lambda);
    check_eigenpair(traj.matrix, xi, lambda);

    MartingaleExpansion e;
    e.lambda = lambda;
    const std::size_t steps = traj.horizon();
    const Vector& c0 = traj.initial.counts;
    e.zeroth = growth_product(lambda, steps) * c0.dot(xi);
    e.direct = traj.final_counts().dot(xi);
    if (steps == 0) {
        e.reconstructed = e.zeroth;
        return e;
    }
    e.weights = tail_products(lambda, steps - 1);
    e.increments.reserve(steps);
    CountTracker c(traj.matrix, c0);
    long double sum = 0.0L;
    for (std::size_t j = 0; j < steps; ++j) {
        const auto color = static_cast<Eigen::Index>(traj.draws[j]);
        const double delta = lambda * (xi(color) - c.counts().dot(xi) / static_cast<double>(j + 1));
        e.increments.push_back(delta);
        sum += static_cast<long double>(e.weights[j]) * delta;
        c.draw(traj.draws[j]);
    }
    e.reconstructed = static_cast<double>(static_cast<long double>(e.zeroth) + sum);
    return e;
}

void write_expansion_csv(std::ostream& os, const MartingaleExpansion& e) {
    os << "j,weight,increment,partial_sum\n";
    double partial = e.zeroth;
    for (std::size_t j = 0; j < e.weights.size(); ++j) {
        partial += e.weights[j] * e.increments[j];
        os << j << ',' << format_double(e.weights[j]) << ',' << format_double(e.increments[j]) << ','
           << format_double(partial) << '\n';
    }
}

double dn_exact(double lambda, std::size_t n) {
    require_open_unit(lambda);
    const auto t = tail_products(lambda, n);
    double sum = 0.0;
    for (std::size_t j = n + 1; j-- > 0;) sum += t[j] * t[j];
    return sum;
}

std::vector<double> dn_exact_series(double lambda, std::size_t n_max) {
    require_open_unit(lambda);
    std::vector<double> d(n_max + 1);
    d[0] = 1.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double f = 1.0 + lambda / static_cast<double>(n + 1);
        d[n] = d[n - 1] * f * f + 1.0;
    }
    return d;
}

std::string to_string(DnRegime regime) {
    switch (regime) {
        case DnRegime::Negative: return "a";
        case DnRegime::Zero: return "zero";
        case DnRegime::Subcritical: return "b";
        case DnRegime::Critical: return "c";
        case DnRegime::Supercritical: return "d";
    }
    return "?";
}

namespace {

DnRegime classify(double lambda) {
    if (std::abs(lambda - 0.5) <= kCriticalTolerance) return DnRegime::Critical;
    if (lambda < 0.0) return DnRegime::Negative;
    if (lambda == 0.0) return DnRegime::Zero;
    if (lambda < 0.5) return DnRegime::Subcritical;
    return DnRegime::Supercritical;
}

double growth_at(DnRegime regime, double lambda, std::size_t n) {
    const double m = static_cast<double>(n) + 1.0;
    switch (regime) {
        case DnRegime::Critical: return m * (1.0 + std::log(m));
        case DnRegime::Supercritical: return std::pow(m, 2.0 * lambda);
        default: return m;
    }
}

double calibrated_constant(double lambda, DnRegime regime, std::size_t horizon) {
    static std::mutex mutex;
    static std::map<std::pair<double, std::size_t>, double> cache;
    const auto key = std::make_pair(lambda, horizon);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    double worst = 0.0;
    double d = 0.0;
    for (std::size_t n = 0; n <= horizon; ++n) {
        const double f = 1.0 + lambda / static_cast<double>(n + 1);
        d = n == 0 ? 1.0 : d * f * f + 1.0;
        worst = std::max(worst, d / growth_at(regime, lambda, n));
    }
    worst *= kCalibrationSlack;
    std::lock_guard lock(mutex);
    cache.emplace(key, worst);
    return worst;
}

}  // namespace

DnAsymptotic dn_asymptotic(double lambda, std::size_t n) {
    require_open_unit(lambda);
    DnAsymptotic out;
    out.regime = classify(lambda);
    switch (out.regime) {
        case DnRegime::Critical: out.growth = "n log n"; break;
        case DnRegime::Supercritical: out.growth = "n^{2λ}"; break;
        default: out.growth = "n"; break;
    }
    std::size_t horizon = kCalibrationHorizon;
    while (horizon < n) horizon *= 2;
    out.constant = out.regime == DnRegime::Zero ? 1.0 : calibrated_constant(lambda, out.regime, horizon);
    out.growth_value = growth_at(out.regime, lambda, n);
    out.value = out.constant * out.growth_value;
    return out;
}

double euler_ratio(double lambda, std::size_t n) {
    require_open_unit(lambda);
    if (n == 0) throw UrnError(ErrorKind::InvalidArgument, "euler_ratio requires n >= 1");
    return growth_product(lambda, n) * std::tgamma(lambda + 1.0) / std::pow(static_cast<double>(n), lambda);
}

double jordan_weight(double lambda, std::size_t i, std::size_t n) {
    if (i > n) throw UrnError(ErrorKind::IndexOrder, "jordan_weight requires i <= n");
    require_nonzero(lambda);
    double s = 0.0;
    for (std::size_t j = i + 1; j <= n; ++j) s += 1.0 / (static_cast<double>(j) + 1.0 + lambda);
    return tail_product(lambda, i, n) * s;
}

std::vector<double> jordan_weights(double lambda, std::size_t n) {
    require_nonzero(lambda);
    return jordan_weights_any(lambda, n);
}

double jordan_weight_bound(double lambda, std::size_t i, std::size_t n) {
    if (i == 0 || i > n) throw UrnError(ErrorKind::IndexOrder, "jordan_weight_bound requires 1 <= i <= n");
    require_open_unit(lambda);
    const double ratio = static_cast<double>(n) / static_cast<double>(i);
    const double max_factor = lambda < 0.0 ? std::pow(0.5, lambda) : 1.0;
    return std::pow(ratio, lambda) * (1.0 + std::log(static_cast<double>(n))) * max_factor;
}

double jordan_weight_constant(double lambda) {
    require_open_unit(lambda);
    return lambda < 0.0 ? std::pow(1.5, -lambda) : 1.0;
}

double appendix_zeroth(double lambda, std::size_t n) {
    require_nonzero(lambda);
    return zeroth_coefficient_sum(lambda, n);
}

double jordan_zeroth_coefficient(double lambda, std::size_t n) {
    require_open_unit(lambda);
    return zeroth_coefficient_sum(lambda, n);
}

std::vector<double> jordan_weights_unchecked(double lambda, std::size_t n) {
    require_open_unit(lambda);
    return jordan_weights_any(lambda, n);
}

double JordanExpansion::difference(std::size_t j) const {
    double d = direct_weights[j] * direct_increments[j];
    if (!nested_weights.empty()) d += nested_weights[j] * nested_increments[j];
    return d;
}

double JordanExpansion::residual() const { return std::abs(reconstructed - direct); }
double JordanExpansion::relative_residual() const { return relative(residual(), direct); }

JordanExpansion jordan_decompose(const Trajectory& traj, const Vector& xi2, const Vector& xi3, double lambda) {
    require_nonzero(lambda);
    check_jordan_pair(traj.matrix, xi2, xi3, lambda);
    return jordan_expand(traj, xi2, xi3, lambda);
}

JordanExpansion repeated_zero_decompose(const Trajectory& traj, const Vector& xi2, const Vector& xi3) {
    check_jordan_pair(traj.matrix, xi2, xi3, 0.0);
    return jordan_expand(traj, xi2, xi3, 0.0);
}

void write_expansion_csv(std::ostream& os, const JordanExpansion& e) {
    os << "j,weight,increment,partial_sum\n";
    double partial = e.zeroth();
    for (std::size_t j = 0; j < e.direct_weights.size(); ++j) {
        const double d = e.difference(j);
        partial += d;
        os << j << ",1," << format_double(d) << ',' << format_double(partial) << '\n';
    }
}

MartingaleSeries dm_martingale(const Trajectory& traj, const Vector& xi2, const Vector& xi3, double lambda) {
    require_nonzero(lambda);
    check_jordan_pair(traj.matrix, xi2, xi3, lambda);

    MartingaleSeries m;
    m.lambda = lambda;
    const std::size_t steps = traj.horizon();
    m.values.reserve(steps + 1);
    m.normalizers.reserve(steps + 1);
    m.compensators.reserve(steps + 1);

    CountTracker c(traj.matrix, traj.initial.counts);
    double pi_n = 1.0;
    double s = 0.0;
    for (std::size_t n = 0;; ++n) {
        m.normalizers.push_back(pi_n);
        m.compensators.push_back(s);
        m.values.push_back(c.counts().dot(xi3) / pi_n - s);
        if (n == steps) break;
        const double pi_next = pi_n * (1.0 + lambda / static_cast<double>(n + 1));
        s += c.counts().dot(xi2) / (static_cast<double>(n + 1) * pi_next);
        c.draw(traj.draws[n]);
        pi_n = pi_next;
    }
    return m;
}

std::vector<double> increment_conditional_means(const Trajectory& traj, const Vector& xi, double lambda) {
    require_open_unit(lambda);
    check_eigenpair(traj.matrix, xi, lambda);
    const auto d = static_cast<Eigen::Index>(traj.dim());
    std::vector<double> out;
    out.reserve(traj.horizon());
    CountTracker c(traj.matrix, traj.initial.counts);
    for (std::size_t j = 0; j < traj.horizon(); ++j) {
        const double scale = 1.0 / static_cast<double>(j + 1);
        const double centre = c.counts().dot(xi) * scale;
        double mean = 0.0;
        for (Eigen::Index i = 0; i < d; ++i) mean += c.counts()(i) * scale * lambda * (xi(i) - centre);
        out.push_back(mean);
        c.draw(traj.draws[j]);
    }
    return out;
}

std::vector<double> dm_conditional_drifts(const Trajectory& traj, const Vector& xi2, const Vector& xi3,
                                          double lambda) {
    const auto series = dm_martingale(traj, xi2, xi3, lambda);
    const auto d = static_cast<Eigen::Index>(traj.dim());
    std::vector<double> out;
    out.reserve(traj.horizon());
    CountTracker c(traj.matrix, traj.initial.counts);
    for (std::size_t j = 0; j < traj.horizon(); ++j) {
        const double scale = 1.0 / static_cast<double>(j + 1);
        const double pi_next = series.normalizers[j + 1];
        const double s_next = series.compensators[j + 1];
        double expected = 0.0;
        for (Eigen::Index i = 0; i < d; ++i) {
            const Vector next = c.peek(static_cast<std::size_t>(i));
            expected += c.counts()(i) * scale * (next.dot(xi3) / pi_next - s_next);
        }
        out.push_back(expected - series.values[j]);
        c.draw(traj.draws[j]);
    }
    return out;
}

}  // namespace urnbound
