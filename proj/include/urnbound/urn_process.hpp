/*
 * urn_process.hpp: balanced urn evolution C_{n+1} = C_n + χ_{n+1} R.
 *
 * At time n the urn holds mass n+1; color i is drawn with probability
 * C_n[i]/(n+1) and row i of R is added.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "urnbound/rng.hpp"
#include "urnbound/spectral.hpp"

namespace urnbound {

struct ColorCount {
    Vector counts;
    std::size_t time = 0;

    double mass() const { return counts.sum(); }
};

// Checks Σ C_0 = 1 within 1e-9 and nonnegativity. Throws InvalidInitial.
ColorCount make_initial(const std::vector<double>& counts);

struct DrawIndicator {
    std::size_t chosen = 0;

    Vector as_vector(std::size_t dim) const {
        return Vector::Unit(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(chosen));
    }
};

// Index of the color selected by uniform u ∈ [0,1) among nonnegative counts.
std::size_t select_color(const double* counts, std::size_t dim, double u) noexcept;

// Counts held as C_0 + kR with integer draw tallies k, recomputed after each
// draw so rounding does not build up over long runs. Every count update in
// the library goes through this arithmetic, so replays are bit-identical to
// simulation.
class CountTracker {
  public:
    CountTracker(const Matrix& r, const Vector& initial);

    void draw(std::size_t color);
    const Vector& counts() const noexcept { return counts_; }
    // Counts after a draw of `color`, without committing it.
    Vector peek(std::size_t color) const;

  private:
    std::size_t dim_;
    std::vector<double> rows_;  // row-major copy of R
    Vector initial_;
    std::vector<double> tally_;
    Vector counts_;
};

// One draw from c, adding the row directly. Long runs use CountTracker.
std::pair<ColorCount, DrawIndicator> step(const ColorCount& c, const ReplacementMatrix& r, Rng& rng);

// Allocation-free sampler for long runs and Monte Carlo replicas.
class UrnSampler {
  public:
    UrnSampler(const ReplacementMatrix& r, const Vector& initial);

    std::size_t step(Rng& rng);
    const std::vector<double>& counts() const noexcept { return counts_; }
    std::size_t time() const noexcept { return time_; }
    double dot(const Vector& v) const;

  private:
    std::size_t dim_;
    std::vector<double> rows_;  // row-major copy of R
    std::vector<double> initial_;
    std::vector<double> tally_;
    std::vector<double> counts_;
    std::size_t time_ = 0;
};

struct Trajectory {
    Matrix matrix;
    ColorCount initial;
    std::vector<std::uint32_t> draws;  // draws[j] is the color of χ_{j+1}
    std::vector<Vector> counts;        // C_0..C_n when recorded, else empty
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    std::size_t horizon() const noexcept { return draws.size(); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
    // Recorded counts, or a replay from initial and draws.
    std::vector<Vector> count_history() const;
    Vector final_counts() const;
};

struct SimulateOptions {
    std::uint64_t stream = 0;
    bool record_counts = true;
};

Trajectory simulate(const ColorCount& initial, const ReplacementMatrix& r, std::size_t n, std::uint64_t seed,
                    SimulateOptions options = {});

// C_j·v for j = 0..n. Throws DimensionMismatch.
std::vector<double> linear_statistic(const Trajectory& traj, const Vector& v);

// Columns: time, count_0..count_{d-1}, draw (empty at time 0).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace urnbound
