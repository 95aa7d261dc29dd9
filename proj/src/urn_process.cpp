#include "urnbound/urn_process.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "urnbound/error.hpp"
#include "urnbound/io.hpp"

namespace urnbound {

ColorCount make_initial(const std::vector<double>& counts) {
    if (counts.empty()) throw UrnError(ErrorKind::InvalidInitial, "initial composition is empty");
    ColorCount c;
    c.counts = Vector::Map(counts.data(), static_cast<Eigen::Index>(counts.size()));
    for (double x : counts) {
        if (!std::isfinite(x) || x < 0.0) throw UrnError(ErrorKind::InvalidInitial, "negative initial count");
    }
    if (std::abs(c.mass() - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "initial composition sums to " << c.mass() << ", expected 1";
        throw UrnError(ErrorKind::InvalidInitial, msg.str());
    }
    return c;
}

std::size_t select_color(const double* counts, std::size_t dim, double u) noexcept {
    double total = 0.0;
    for (std::size_t i = 0; i < dim; ++i) total += counts[i];
    const double target = u * total;
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        if (counts[i] <= 0.0) continue;
        cumulative += counts[i];
        last_positive = i;
        if (target < cumulative) return i;
    }
    return last_positive;
}

namespace {

// c[m] = c0[m] + Σ_i k[i]·R[i][m], summed in index order. Shared by
// CountTracker and UrnSampler.
inline void rebuild_counts(double* c, const double* c0, const double* tally, const double* rows_major,
                           std::size_t d) noexcept {
    for (std::size_t m = 0; m < d; ++m) {
        double s = c0[m];
        for (std::size_t i = 0; i < d; ++i) s += tally[i] * rows_major[i * d + m];
        c[m] = s;
    }
}

std::vector<double> row_major(const Matrix& r) {
    const auto d = static_cast<std::size_t>(r.rows());
    std::vector<double> out(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out[i * d + j] = r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

}  // namespace

CountTracker::CountTracker(const Matrix& r, const Vector& initial)
    : dim_(static_cast<std::size_t>(r.rows())), rows_(row_major(r)), initial_(initial), tally_(dim_, 0.0),
      counts_(initial) {
    if (r.rows() != initial.size()) {
        throw UrnError(ErrorKind::DimensionMismatch, "composition and matrix dimensions differ");
    }
}

void CountTracker::draw(std::size_t color) {
    tally_[color] += 1.0;
    rebuild_counts(counts_.data(), initial_.data(), tally_.data(), rows_.data(), dim_);
}

Vector CountTracker::peek(std::size_t color) const {
    CountTracker next = *this;
    next.draw(color);
    return next.counts_;
}

std::pair<ColorCount, DrawIndicator> step(const ColorCount& c, const ReplacementMatrix& r, Rng& rng) {
    if (static_cast<std::size_t>(c.counts.size()) != r.dim()) {
        throw UrnError(ErrorKind::DimensionMismatch, "composition and matrix dimensions differ");
    }
    const std::size_t color = select_color(c.counts.data(), r.dim(), rng.uniform());
    ColorCount next{c.counts, c.time + 1};
    next.counts += r.matrix().row(static_cast<Eigen::Index>(color)).transpose();
    return {std::move(next), DrawIndicator{color}};
}

UrnSampler::UrnSampler(const ReplacementMatrix& r, const Vector& initial)
    : dim_(r.dim()),
      rows_(row_major(r.matrix())),
      initial_(initial.data(), initial.data() + initial.size()),
      tally_(dim_, 0.0),
      counts_(initial_) {
    if (counts_.size() != dim_) {
        throw UrnError(ErrorKind::DimensionMismatch, "composition and matrix dimensions differ");
    }
}

std::size_t UrnSampler::step(Rng& rng) {
    const std::size_t color = select_color(counts_.data(), dim_, rng.uniform());
    tally_[color] += 1.0;
    rebuild_counts(counts_.data(), initial_.data(), tally_.data(), rows_.data(), dim_);
    ++time_;
    return color;
}

double UrnSampler::dot(const Vector& v) const {
    double s = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) s += counts_[k] * v(static_cast<Eigen::Index>(k));
    return s;
}

std::vector<Vector> Trajectory::count_history() const {
    if (!counts.empty()) return counts;
    std::vector<Vector> out;
    out.reserve(draws.size() + 1);
    out.push_back(initial.counts);
    CountTracker c(matrix, initial.counts);
    for (auto color : draws) {
        c.draw(color);
        out.push_back(c.counts());
    }
    return out;
}

Vector Trajectory::final_counts() const {
    if (!counts.empty()) return counts.back();
    CountTracker c(matrix, initial.counts);
    for (auto color : draws) c.draw(color);
    return c.counts();
}

Trajectory simulate(const ColorCount& initial, const ReplacementMatrix& r, std::size_t n, std::uint64_t seed,
                    SimulateOptions options) {
    if (static_cast<std::size_t>(initial.counts.size()) != r.dim()) {
        throw UrnError(ErrorKind::DimensionMismatch, "composition and matrix dimensions differ");
    }
    Trajectory traj;
    traj.matrix = r.matrix();
    traj.initial = initial;
    traj.seed = seed;
    traj.stream = options.stream;
    traj.draws.reserve(n);
    if (options.record_counts) {
        traj.counts.reserve(n + 1);
        traj.counts.push_back(initial.counts);
    }

    Rng rng(seed, options.stream);
    CountTracker c(traj.matrix, initial.counts);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t color = select_color(c.counts().data(), r.dim(), rng.uniform());
        c.draw(color);
        traj.draws.push_back(static_cast<std::uint32_t>(color));
        if (options.record_counts) traj.counts.push_back(c.counts());
    }
    return traj;
}

std::vector<double> linear_statistic(const Trajectory& traj, const Vector& v) {
    if (static_cast<std::size_t>(v.size()) != traj.dim()) {
        throw UrnError(ErrorKind::DimensionMismatch, "statistic vector has wrong dimension");
    }
    std::vector<double> out;
    out.reserve(traj.horizon() + 1);
    CountTracker c(traj.matrix, traj.initial.counts);
    out.push_back(c.counts().dot(v));
    for (std::size_t j = 0; j < traj.horizon(); ++j) {
        c.draw(traj.draws[j]);
        out.push_back(c.counts().dot(v));
    }
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const auto d = traj.dim();
    os << "time";
    for (std::size_t k = 0; k < d; ++k) os << ",count_" << k;
    os << ",draw\n";
    CountTracker c(traj.matrix, traj.initial.counts);
    for (std::size_t j = 0; j <= traj.horizon(); ++j) {
        if (j > 0) c.draw(traj.draws[j - 1]);
        os << j;
        for (std::size_t k = 0; k < d; ++k) os << ',' << format_double(c.counts()(static_cast<Eigen::Index>(k)));
        os << ',';
        if (j > 0) os << traj.draws[j - 1];
        os << '\n';
    }
}

}  // namespace urnbound
