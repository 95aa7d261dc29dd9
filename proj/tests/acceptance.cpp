// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   acceptance [--cli PATH] [--only K]
//
// --cli points at the urnbound executable for the determinism check; without
// it that criterion runs the command line in-process.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "common.hpp"
#include "oracles.hpp"
#include "urnbound/bounds.hpp"
#include "urnbound/cli.hpp"
#include "urnbound/decomposition.hpp"
#include "urnbound/io.hpp"
#include "urnbound/spectral.hpp"
#include "urnbound/urn_process.hpp"
#include "urnbound/verification.hpp"

using namespace urnbound;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets, one per criterion.
constexpr double kReconstructionTol = 1e-9;      // 1, 2
constexpr double kReconstructionSeconds = 5.0;   // 1, 2
constexpr double kExactSeconds = 60.0;           // 3
constexpr double kMonteCarloSeconds = 600.0;     // 4
constexpr double kMartingaleTol = 1e-12;         // 5
constexpr double kSpectralTol = 1e-12;           // 6
constexpr double kEulerLow = 0.99, kEulerHigh = 1.01;  // 7
constexpr double kSlopeTol = 0.05;               // 8
constexpr double kCriticalVariation = 0.15;      // 8
constexpr double kRegimeSeconds = 120.0;         // 8
constexpr double kZerothCoefficientTol = 1e-12;  // 9
constexpr double kVanishingFactor = 2.0;         // 10

const std::vector<double> kThresholds = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

unsigned worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

Outcome reconstruction() {
    const auto start = Clock::now();
    const auto r = fixture::two_color();
    const auto s = decompose_spectrum(r);
    const auto& rv = s.right_vectors[0];
    const auto c0 = make_initial({1.0, 0.0});
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const auto traj = simulate(c0, r, 10000, 1001, {k, false});
        worst = std::max(worst, martingale_decompose(traj, rv.vec, rv.lambda).relative_residual());
    }
    const double secs = seconds_since(start);
    return {worst <= kReconstructionTol && secs <= kReconstructionSeconds,
            "max relative residual " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome jordan_reconstruction() {
    const auto start = Clock::now();
    const auto r = fixture::jordan();
    const auto pair = jordan_chain(r, 0.25);
    const auto c0 = make_initial({1.0, 0.0, 0.0});
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 50; ++k) {
        const auto traj = simulate(c0, r, 1000, 2002, {k, false});
        worst = std::max(worst, jordan_decompose(traj, pair.head, pair.tail, 0.25).relative_residual());
    }
    const double secs = seconds_since(start);
    return {worst <= kReconstructionTol && secs <= kReconstructionSeconds,
            "max relative residual " + fmt(worst) + ", " + fmt(secs) + " s"};
}

// Bounds for color 0 and the matching event vector.
struct ColorEvent {
    std::vector<BoundReport> bounds;
    std::vector<double> thresholds;
    Vector w;
};

ColorEvent color_event(const ReplacementMatrix& r, const Vector& c0, std::size_t n) {
    ColorEvent ev;
    const auto s = decompose_spectrum(r);
    ev.w = combo_vector(vector_combo(s, fixture::unit(static_cast<int>(r.dim()), 0)));
    for (double t : kThresholds) {
        ev.bounds.push_back(color_deviation_bound(r, 0, c0, n, t));
        ev.thresholds.push_back((ev.bounds.back().centering + t) * (static_cast<double>(n) + 1.0));
    }
    return ev;
}

Outcome exact_dominance() {
    const auto start = Clock::now();
    const auto r = fixture::two_color();
    const Vector c0 = fixture::unit(2, 0);
    const auto ev = color_event(r, c0, 14);
    const auto dist = exact_distribution(c0, r, 14);
    std::vector<ProbabilityEntry> probs;
    for (double thr : ev.thresholds) {
        probs.push_back({static_cast<double>(exact_tail(dist, ev.w, thr)), ProbabilityMode::Exact});
    }
    const auto rows = dominance_check(ev.bounds, probs);
    double min_margin = 1.0;
    for (const auto& row : rows) min_margin = std::min(min_margin, row.margin);
    const double secs = seconds_since(start);
    return {all_pass(rows) && secs <= kExactSeconds,
            std::to_string(rows.size()) + " thresholds, min margin " + fmt(min_margin) + ", " + fmt(secs) + " s"};
}

Outcome monte_carlo_dominance() {
    const auto start = Clock::now();
    const auto r = fixture::two_color();
    const Vector c0 = fixture::unit(2, 0);
    bool pass = true;
    std::ostringstream detail;
    for (std::size_t n : {1000u, 10000u}) {
        const auto ev = color_event(r, c0, n);
        const auto est = estimate_probabilities(c0, r, n, ev.w, ev.thresholds, 100000, 4004, worker_threads());
        std::vector<ProbabilityEntry> probs;
        for (const auto& e : est) probs.push_back({e.p_hat, ProbabilityMode::MonteCarlo});
        const auto rows = dominance_check(ev.bounds, probs);
        pass = pass && all_pass(rows);
        std::cout << "    n=" << n << '\n';
        for (std::size_t k = 0; k < rows.size(); ++k) {
            std::cout << "      t=" << fmt(rows[k].t) << " bound=" << fmt(rows[k].bound) << " p_hat=" << fmt(rows[k].probability)
                      << " ci99=" << fmt(est[k].ci_upper) << " margin=" << fmt(rows[k].margin) << '\n';
        }
    }
    const double secs = seconds_since(start);
    detail << "n in {1e3, 1e4}, 1e5 replicas, " << fmt(secs) << " s";
    return {pass && secs <= kMonteCarloSeconds, detail.str()};
}

Outcome martingale_property() {
    double worst_eigen = 0.0, worst_dm = 0.0;
    const auto two = fixture::two_color();
    const auto s2 = decompose_spectrum(two);
    const auto rj = fixture::jordan();
    const auto pair = jordan_chain(rj, 0.25);
    for (std::uint64_t k = 0; k < 10; ++k) {
        const auto t2 = simulate(make_initial({1.0, 0.0}), two, 1000, 5005, {k, false});
        for (double m : increment_conditional_means(t2, s2.right_vectors[0].vec, s2.right_vectors[0].lambda)) {
            worst_eigen = std::max(worst_eigen, std::abs(m));
        }
        const auto tj = simulate(make_initial({1.0, 0.0, 0.0}), rj, 1000, 5005, {k, false});
        for (double m : increment_conditional_means(tj, pair.head, 0.25)) worst_eigen = std::max(worst_eigen, std::abs(m));
        for (double m : dm_conditional_drifts(tj, pair.head, pair.tail, 0.25)) worst_dm = std::max(worst_dm, std::abs(m));
    }
    return {worst_eigen <= kMartingaleTol && worst_dm <= kMartingaleTol,
            "eigen increments " + fmt(worst_eigen) + ", DM drift " + fmt(worst_dm)};
}

Outcome spectral() {
    const auto rj = fixture::jordan();
    const auto pair = jordan_chain(rj, 0.25);
    const double eig = eigen_residual(rj.matrix(), pair.head, 0.25);
    const double jor = jordan_residual(rj.matrix(), pair.head, pair.tail, 0.25);
    double ind = 0.0;
    for (const auto& r : {fixture::two_color(), rj}) {
        const auto s = decompose_spectrum(r);
        for (std::size_t c = 0; c < r.dim(); ++c) {
            const auto coeffs = indicator_coefficients(s, c);
            Vector v = Vector::Constant(static_cast<Eigen::Index>(r.dim()), coeffs.principal);
            for (std::size_t i = 0; i < coeffs.alphas.size(); ++i) v += coeffs.alphas[i] * s.right_vectors[i].vec;
            ind = std::max(ind, (v - fixture::unit(static_cast<int>(r.dim()), static_cast<int>(c))).cwiseAbs().maxCoeff());
        }
    }
    return {eig <= kSpectralTol && jor <= kSpectralTol && ind <= kSpectralTol,
            "eigen " + fmt(eig) + ", jordan " + fmt(jor) + ", indicator " + fmt(ind)};
}

Outcome euler() {
    bool pass = true;
    std::string detail;
    for (double l : {-0.5, 0.3, 0.5, 0.9}) {
        const double x = euler_ratio(l, 10000);
        pass = pass && x >= kEulerLow && x <= kEulerHigh;
        detail += (detail.empty() ? "" : ", ") + fmt(l) + ": " + std::to_string(x);
    }
    return {pass, detail};
}

double loglog_slope(const std::vector<double>& series) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int k = 10; k <= 20; ++k, ++m) {
        const double x = std::log(std::ldexp(1.0, k));
        const double y = std::log(series[std::size_t{1} << k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

Outcome regimes() {
    const auto start = Clock::now();
    const std::size_t top = std::size_t{1} << 20;
    bool pass = true;
    std::string detail;
    for (auto [l, target] : {std::pair{-0.5, 1.0}, {0.25, 1.0}, {0.75, 1.5}, {0.9, 1.8}}) {
        const double slope = loglog_slope(dn_exact_series(l, top));
        pass = pass && std::abs(slope - target) <= kSlopeTol;
        detail += "slope(" + fmt(l) + ")=" + std::to_string(slope) + " ";
    }
    const auto crit = dn_exact_series(0.5, top);
    double lo = INFINITY, hi = 0.0;
    for (std::size_t n = top / 10; n <= top; ++n) {
        const double q = crit[n] / (static_cast<double>(n) * std::log(static_cast<double>(n)));
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    const double variation = (hi - lo) / lo;
    pass = pass && variation < kCriticalVariation;
    const double secs = seconds_since(start);
    detail += "critical variation " + fmt(variation) + ", " + fmt(secs) + " s";
    return {pass && secs <= kRegimeSeconds, detail};
}

Outcome zeroth_coefficient() {
    double worst = 0.0;
    for (double l : {-0.5, 0.25, 0.5, 0.75}) {
        for (std::size_t n = 0; n <= 1000; ++n) {
            const double ref = oracle::jordan_zeroth(l, n);
            worst = std::max(worst, std::abs(appendix_zeroth(l, n) - ref) / std::abs(ref));
        }
    }
    return {worst <= kZerothCoefficientTol, "max relative difference " + fmt(worst)};
}

double median_abs_ratio(const ReplacementMatrix& r, const Vector& v, std::size_t n) {
    auto values = replicate_statistic(fixture::unit(3, 0), r, n, v, 200, 10010, worker_threads());
    for (double& x : values) x = std::abs(x) / (static_cast<double>(n) + 1.0);
    std::nth_element(values.begin(), values.begin() + 100, values.end());
    const double upper = values[100];
    const double lower = *std::max_element(values.begin(), values.begin() + 100);
    return 0.5 * (lower + upper);
}

Outcome jordan_vanishing() {
    const auto r = fixture::jordan();
    const auto pair = jordan_chain(r, 0.25);
    const double early = median_abs_ratio(r, pair.tail, 1000);
    const double late = median_abs_ratio(r, pair.tail, 100000);
    return {early >= kVanishingFactor * late,
            "median at 1e3 " + fmt(early) + ", at 1e5 " + fmt(late) + ", factor " + fmt(early / late)};
}

std::string slurp_dir(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& p : files) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        all += p.filename().string() + '\n' + os.str();
    }
    return all;
}

Outcome determinism(const std::string& exe) {
    const auto root = fs::temp_directory_path() / "urnbound_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    const auto cfg = root / "urn.cfg";
    std::ofstream(cfg) << "matrix:\n  0.625, 0.375, 0\n  0.125, 0.375, 0.5\n  0.25, 0.25, 0.5\n"
                          "initial = 0.5, 0.5, 0\nhorizon = 300\nhorizons = 8, 300\n"
                          "thresholds = 0.05, 0.2\nreplicas = 2000\nseed = 123\nstatistic = eigen:1\n";

    const std::vector<std::string> commands = {"spectrum", "simulate", "decompose", "bound", "verify", "sweep"};
    int identical = 0;
    for (const auto& cmd : commands) {
        std::string outputs[2];
        for (int k = 0; k < 2; ++k) {
            const auto out = root / (cmd + std::to_string(k));
            int code = 0;
            if (!exe.empty()) {
                const std::string line = "\"" + exe + "\" " + cmd + " --config \"" + cfg.string() + "\" --out \"" +
                                         out.string() + "\" --threads " + std::to_string(k + 1) + " > /dev/null";
                code = std::system(line.c_str());
            } else {
                std::ostringstream sink;
                code = cli::run({cmd, "--config", cfg.string(), "--out", out.string(), "--threads", std::to_string(k + 1)},
                                sink, sink);
            }
            if (code != 0) return {false, cmd + " exited with " + std::to_string(code)};
            outputs[k] = slurp_dir(out);
        }
        identical += outputs[0] == outputs[1] && !outputs[0].empty();
    }
    return {identical == static_cast<int>(commands.size()),
            std::to_string(identical) + "/" + std::to_string(commands.size()) + " commands byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
    std::string exe;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--cli" && i + 1 < argc) exe = argv[++i];
        else if (a == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"eigen reconstruction", reconstruction},
        {"jordan reconstruction", jordan_reconstruction},
        {"azuma dominance, exact", exact_dominance},
        {"azuma dominance, monte carlo", monte_carlo_dominance},
        {"martingale property", martingale_property},
        {"spectral relations", spectral},
        {"euler ratio", euler},
        {"D_n regimes", regimes},
        {"jordan zeroth coefficient", zeroth_coefficient},
        {"jordan vanishing", jordan_vanishing},
        {"cli determinism", [&] { return determinism(exe); }},
    };

    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        if (only && static_cast<int>(k + 1) != only) continue;
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << k + 1 << "] " << criteria[k].first << ": " << o.detail
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
