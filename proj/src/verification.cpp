#include "urnbound/verification.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <boost/math/distributions/normal.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "urnbound/error.hpp"
#include "urnbound/io.hpp"
#include "urnbound/urn_process.hpp"

namespace urnbound {
namespace {

using Rational = boost::multiprecision::cpp_rational;
using DrawCounts = std::vector<std::uint32_t>;

constexpr long long kMaxDenominator = 10'000;

std::optional<Rational> as_small_fraction(double x) {
    for (long long q = 1; q <= kMaxDenominator; ++q) {
        const double p = std::round(x * static_cast<double>(q));
        if (std::abs(x - p / static_cast<double>(q)) <= 1e-14 * std::max(1.0, std::abs(x))) {
            return Rational(static_cast<long long>(p), q);
        }
    }
    return std::nullopt;
}

// Law of the draw-count vector k after n steps; C_n = C_0 + kR.
template <typename Number, typename CountsOf>
std::map<DrawCounts, Number> draw_count_law(std::size_t d, std::size_t n, CountsOf counts_of) {
    std::map<DrawCounts, Number> level;
    level.emplace(DrawCounts(d, 0), Number(1));
    for (std::size_t j = 0; j < n; ++j) {
        std::map<DrawCounts, Number> next;
        const Number mass(static_cast<long long>(j + 1));
        for (const auto& [k, p] : level) {
            const std::vector<Number> c = counts_of(k);
            for (std::size_t i = 0; i < d; ++i) {
                if (!(c[i] > Number(0))) continue;
                DrawCounts child = k;
                ++child[i];
                next[child] += p * c[i] / mass;
            }
        }
        level = std::move(next);
    }
    return level;
}

ExactDistribution rational_distribution(const std::vector<Rational>& c0, const std::vector<Rational>& r,
                                        std::size_t d, std::size_t n) {
    auto counts_of = [&](const DrawCounts& k) {
        std::vector<Rational> c = c0;
        for (std::size_t i = 0; i < d; ++i) {
            if (k[i] == 0) continue;
            for (std::size_t m = 0; m < d; ++m) c[m] += Rational(k[i]) * r[i * d + m];
        }
        return c;
    };
    const auto law = draw_count_law<Rational>(d, n, counts_of);

    std::map<std::vector<Rational>, Rational> merged;
    for (const auto& [k, p] : law) merged[counts_of(k)] += p;

    ExactDistribution dist;
    dist.n = n;
    dist.rational = true;
    for (const auto& [c, p] : merged) {
        Atom atom;
        atom.counts.resize(static_cast<Eigen::Index>(d));
        for (std::size_t m = 0; m < d; ++m) atom.counts(static_cast<Eigen::Index>(m)) = c[m].convert_to<double>();
        atom.probability = p.convert_to<long double>();
        atom.exact = p.str();
        dist.atoms.push_back(std::move(atom));
    }
    return dist;
}

ExactDistribution float_distribution(const Vector& initial, const Matrix& r, std::size_t n) {
    const auto d = static_cast<std::size_t>(r.rows());
    auto counts_of = [&](const DrawCounts& k) {
        std::vector<long double> c(initial.data(), initial.data() + d);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t m = 0; m < d; ++m) {
                c[m] += static_cast<long double>(k[i]) *
                        r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m));
            }
        }
        return c;
    };
    const auto law = draw_count_law<long double>(d, n, counts_of);

    // Identical compositions reached by different k differ only by float noise.
    std::map<std::vector<long long>, Atom> merged;
    for (const auto& [k, p] : law) {
        const auto c = counts_of(k);
        std::vector<long long> key(d);
        for (std::size_t m = 0; m < d; ++m) key[m] = std::llround(c[m] * 1e12L);
        auto [it, inserted] = merged.try_emplace(std::move(key));
        if (inserted) {
            it->second.counts.resize(static_cast<Eigen::Index>(d));
            for (std::size_t m = 0; m < d; ++m) {
                it->second.counts(static_cast<Eigen::Index>(m)) = static_cast<double>(c[m]);
            }
        }
        it->second.probability += p;
    }

    ExactDistribution dist;
    dist.n = n;
    for (auto& [key, atom] : merged) dist.atoms.push_back(std::move(atom));
    return dist;
}

}  // namespace

long double ExactDistribution::total_probability() const {
    long double s = 0.0L;
    for (const auto& a : atoms) s += a.probability;
    return s;
}

ExactDistribution exact_distribution(const Vector& initial, const ReplacementMatrix& r, std::size_t n) {
    const std::size_t d = r.dim();
    if (static_cast<std::size_t>(initial.size()) != d) {
        throw UrnError(ErrorKind::DimensionMismatch, "composition and matrix dimensions differ");
    }
    if (std::pow(static_cast<double>(d), static_cast<double>(n)) > kMaxEnumeratedPaths) {
        std::ostringstream msg;
        msg << d << "^" << n << " paths exceed the enumeration limit 2^24";
        throw UrnError(ErrorKind::TooLarge, msg.str());
    }

    std::vector<Rational> c0, rows;
    bool rational = true;
    for (std::size_t m = 0; m < d && rational; ++m) {
        auto q = as_small_fraction(initial(static_cast<Eigen::Index>(m)));
        if (q) c0.push_back(*q); else rational = false;
    }
    for (std::size_t i = 0; i < d && rational; ++i) {
        for (std::size_t m = 0; m < d && rational; ++m) {
            auto q = as_small_fraction(r(i, m));
            if (q) rows.push_back(*q); else rational = false;
        }
    }
    return rational ? rational_distribution(c0, rows, d, n) : float_distribution(initial, r.matrix(), n);
}

long double exact_tail(const ExactDistribution& dist, const Vector& v, double threshold) {
    long double p = 0.0L;
    for (const auto& atom : dist.atoms) {
        if (atom.counts.size() != v.size()) {
            throw UrnError(ErrorKind::DimensionMismatch, "statistic vector has wrong dimension");
        }
        if (atom.counts.dot(v) > threshold) p += atom.probability;
    }
    return p;
}

double wilson_upper(std::size_t hits, std::size_t replicas, double confidence) {
    if (replicas == 0 || hits > replicas) throw UrnError(ErrorKind::InvalidArgument, "need 0 <= hits <= replicas > 0");
    const double z = boost::math::quantile(boost::math::normal(), confidence);
    const double nn = static_cast<double>(replicas);
    const double p = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double centre = p + z2 / (2.0 * nn);
    const double width = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return std::clamp((centre + width) / (1.0 + z2 / nn), p, 1.0);
}

std::vector<double> replicate_statistic(const Vector& initial, const ReplacementMatrix& r, std::size_t n,
                                        const Vector& v, std::size_t replicas, std::uint64_t seed,
                                        unsigned threads) {
    if (static_cast<std::size_t>(v.size()) != r.dim()) {
        throw UrnError(ErrorKind::DimensionMismatch, "statistic vector has wrong dimension");
    }
    std::vector<double> values(replicas);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t rep = begin; rep < end; ++rep) {
            UrnSampler sampler(r, initial);
            Rng rng(seed, rep);
            for (std::size_t j = 0; j < n; ++j) sampler.step(rng);
            values[rep] = sampler.dot(v);
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(replicas, 1));
    if (workers == 1) {
        work(0, replicas);
        return values;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (replicas + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(replicas, begin + chunk);
        if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
    return values;
}

std::vector<EstimateReport> estimate_probabilities(const Vector& initial, const ReplacementMatrix& r,
                                                   std::size_t n, const Vector& v,
                                                   std::span<const double> thresholds, std::size_t replicas,
                                                   std::uint64_t seed, unsigned threads) {
    if (replicas < 1000) throw UrnError(ErrorKind::InvalidArgument, "Monte Carlo needs at least 1000 replicas");
    const auto values = replicate_statistic(initial, r, n, v, replicas, seed, threads);
    std::vector<EstimateReport> out;
    for (double threshold : thresholds) {
        EstimateReport rep;
        rep.replicas = replicas;
        rep.hits = static_cast<std::size_t>(
            std::count_if(values.begin(), values.end(), [threshold](double x) { return x > threshold; }));
        rep.p_hat = static_cast<double>(rep.hits) / static_cast<double>(replicas);
        rep.ci_upper = wilson_upper(rep.hits, replicas);
        out.push_back(rep);
    }
    return out;
}

EstimateReport estimate_probability(const Vector& initial, const ReplacementMatrix& r, std::size_t n,
                                    const StatisticEvent& event, std::size_t replicas, std::uint64_t seed,
                                    unsigned threads) {
    const double thresholds[] = {event.threshold};
    return estimate_probabilities(initial, r, n, event.v, thresholds, replicas, seed, threads).front();
}

std::string to_string(ProbabilityMode mode) { return mode == ProbabilityMode::Exact ? "exact" : "mc"; }

std::vector<DominanceRow> dominance_check(std::span<const BoundReport> bounds,
                                          std::span<const ProbabilityEntry> probabilities) {
    if (bounds.size() != probabilities.size()) {
        throw UrnError(ErrorKind::GridMismatch, "bound and probability grids differ in size");
    }
    std::vector<DominanceRow> rows;
    rows.reserve(bounds.size());
    for (std::size_t k = 0; k < bounds.size(); ++k) {
        DominanceRow row;
        row.n = bounds[k].n;
        row.t = bounds[k].t;
        row.bound = bounds[k].tail;
        row.probability = probabilities[k].probability;
        row.mode = probabilities[k].mode;
        row.margin = row.bound - row.probability;
        row.pass = row.probability <= row.bound;
        rows.push_back(row);
    }
    return rows;
}

bool all_pass(std::span<const DominanceRow> rows) {
    return std::all_of(rows.begin(), rows.end(), [](const DominanceRow& r) { return r.pass; });
}

void write_dominance_csv(std::ostream& os, std::span<const DominanceRow> rows) {
    os << "n,t,bound,probability,mode,margin,pass\n";
    for (const auto& r : rows) {
        os << r.n << ',' << format_double(r.t) << ',' << format_double(r.bound) << ','
           << format_double(r.probability) << ',' << to_string(r.mode) << ',' << format_double(r.margin) << ','
           << (r.pass ? "true" : "false") << '\n';
    }
}

}  // namespace urnbound
