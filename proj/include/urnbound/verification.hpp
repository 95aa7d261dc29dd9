/*
 * verification.hpp: ground truth for the deviation bounds.
 *
 * exact_distribution gives the full law of C_n for small n; estimate_* runs
 * seeded Monte Carlo replicas for large n; dominance_check compares either
 * against BoundReport tails.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "urnbound/bounds.hpp"
#include "urnbound/spectral.hpp"

namespace urnbound {

// d^n above this is refused.
inline constexpr double kMaxEnumeratedPaths = 16777216.0;  // 2^24

struct Atom {
    Vector counts;
    long double probability = 0.0L;
    std::string exact;  // "p/q" in rational mode, else empty
};

struct ExactDistribution {
    std::size_t n = 0;
    std::vector<Atom> atoms;  // sorted by counts, lexicographically
    bool rational = false;

    long double total_probability() const;
};

// Exact law of C_n. Probabilities are exact rationals when every entry of R
// and C_0 is a fraction with denominator ≤ 10^4, long double otherwise.
// Throws TooLarge when d^n > 2^24.
ExactDistribution exact_distribution(const Vector& initial, const ReplacementMatrix& r, std::size_t n);

// Σ of atom probabilities with C_n·v > threshold.
long double exact_tail(const ExactDistribution& dist, const Vector& v, double threshold);

struct StatisticEvent {
    Vector v;
    double threshold = 0.0;  // event C_n·v > threshold
};

struct EstimateReport {
    std::size_t replicas = 0;
    std::size_t hits = 0;
    double p_hat = 0.0;
    double ci_upper = 0.0;  // one-sided 99% Wilson score limit
    double bound = 0.0;
};

// One-sided upper Wilson score limit.
double wilson_upper(std::size_t hits, std::size_t replicas, double confidence = 0.99);

// C_n·v for every replica r, replica r driven by Rng(seed, r). Results do
// not depend on the thread count.
std::vector<double> replicate_statistic(const Vector& initial, const ReplacementMatrix& r, std::size_t n,
                                        const Vector& v, std::size_t replicas, std::uint64_t seed,
                                        unsigned threads = 1);

EstimateReport estimate_probability(const Vector& initial, const ReplacementMatrix& r, std::size_t n,
                                    const StatisticEvent& event, std::size_t replicas, std::uint64_t seed,
                                    unsigned threads = 1);

// One simulation batch shared by several thresholds on the same statistic.
std::vector<EstimateReport> estimate_probabilities(const Vector& initial, const ReplacementMatrix& r,
                                                   std::size_t n, const Vector& v,
                                                   std::span<const double> thresholds, std::size_t replicas,
                                                   std::uint64_t seed, unsigned threads = 1);

enum class ProbabilityMode { Exact, MonteCarlo };

std::string to_string(ProbabilityMode mode);

struct ProbabilityEntry {
    double probability = 0.0;
    ProbabilityMode mode = ProbabilityMode::Exact;
};

struct DominanceRow {
    std::size_t n = 0;
    double t = 0.0;
    double bound = 0.0;
    double probability = 0.0;
    ProbabilityMode mode = ProbabilityMode::Exact;
    double margin = 0.0;  // bound − probability
    bool pass = false;
};

// Row k passes iff probability_k ≤ bound_k. Throws GridMismatch.
std::vector<DominanceRow> dominance_check(std::span<const BoundReport> bounds,
                                          std::span<const ProbabilityEntry> probabilities);

bool all_pass(std::span<const DominanceRow> rows);

// Columns n, t, bound, probability, mode, margin, pass.
void write_dominance_csv(std::ostream& os, std::span<const DominanceRow> rows);

}  // namespace urnbound
