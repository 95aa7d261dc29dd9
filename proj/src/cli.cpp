#include "urnbound/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <json.hpp>

#include "urnbound/bounds.hpp"
#include "urnbound/config.hpp"
#include "urnbound/decomposition.hpp"
#include "urnbound/error.hpp"
#include "urnbound/io.hpp"
#include "urnbound/spectral.hpp"
#include "urnbound/urn_process.hpp"
#include "urnbound/verification.hpp"

namespace urnbound::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Options {
    std::string command;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    std::string format = "csv";
};

struct Context {
    Options opts;
    ExperimentConfig cfg;
    std::string config_bytes;
    fs::path out_dir;
    unsigned threads = 1;
    std::vector<std::string> outputs;
};

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotIrreducible:
        case ErrorKind::ComplexSpectrum:
        case ErrorKind::UnsupportedJordanStructure:
        case ErrorKind::BasisSingular:
        case ErrorKind::LambdaOutOfRange:
            return kExitMatrix;
        default:
            return kExitConfig;
    }
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

void write_file(Context& ctx, const std::string& name, const std::string& body) {
    std::ofstream os(ctx.out_dir / name, std::ios::binary);
    if (!os) throw UrnError(ErrorKind::ConfigError, "cannot write " + (ctx.out_dir / name).string());
    os << body;
    ctx.outputs.push_back(name);
}

void write_json(Context& ctx, const std::string& name, const Json& j) { write_file(ctx, name, j.dump(2) + "\n"); }

std::string role_name(VectorRole role) {
    switch (role) {
        case VectorRole::Eigen: return "eigen";
        case VectorRole::JordanHead: return "jordan_head";
        case VectorRole::JordanTail: return "jordan_tail";
    }
    return "eigen";
}

std::string mode_name(VerifyMode mode) {
    switch (mode) {
        case VerifyMode::Auto: return "auto";
        case VerifyMode::Exact: return "exact";
        case VerifyMode::MonteCarlo: return "mc";
    }
    return "auto";
}

int cmd_spectrum(Context& ctx, const ReplacementMatrix& r, std::ostream& out) {
    const auto s = decompose_spectrum(r);
    Json j;
    j["matrix"] = ctx.cfg.matrix;
    j["pi"] = to_std(s.pi);
    Json eig = Json::array();
    for (const auto& e : s.eigenvalues) {
        eig.push_back({{"value", e.value}, {"algebraic", e.algebraic}, {"geometric", e.geometric}});
    }
    j["eigenvalues"] = eig;
    Json vecs = Json::array();
    for (const auto& rv : s.right_vectors) {
        Json v;
        v["lambda"] = rv.lambda;
        v["role"] = role_name(rv.role);
        if (rv.head) v["head"] = *rv.head;
        v["vector"] = to_std(rv.vec);
        v["residual"] = rv.role == VectorRole::JordanTail
                            ? jordan_residual(r.matrix(), s.right_vectors[*rv.head].vec, rv.vec, rv.lambda)
                            : eigen_residual(r.matrix(), rv.vec, rv.lambda);
        vecs.push_back(v);
    }
    j["right_vectors"] = vecs;
    Json ind = Json::array();
    for (std::size_t c = 0; c < r.dim(); ++c) {
        const auto coeffs = indicator_coefficients(s, c);
        Vector rebuilt = Vector::Constant(static_cast<Eigen::Index>(r.dim()), coeffs.principal);
        for (std::size_t i = 0; i < s.right_vectors.size(); ++i) rebuilt += coeffs.alphas[i] * s.right_vectors[i].vec;
        const Vector unit = Vector::Unit(static_cast<Eigen::Index>(r.dim()), static_cast<Eigen::Index>(c));
        ind.push_back({{"color", c},
                       {"principal", coeffs.principal},
                       {"alphas", coeffs.alphas},
                       {"residual", (rebuilt - unit).cwiseAbs().maxCoeff()}});
    }
    j["indicator_coefficients"] = ind;
    write_json(ctx, "spectrum.json", j);

    out << "pi =";
    for (Eigen::Index i = 0; i < s.pi.size(); ++i) out << ' ' << format_double(s.pi(i));
    out << "\neigenvalues =";
    for (const auto& e : s.eigenvalues) out << ' ' << format_double(e.value);
    out << '\n';
    return kExitOk;
}

int cmd_simulate(Context& ctx, const ReplacementMatrix& r, std::ostream& out) {
    const auto traj = simulate(make_initial(ctx.cfg.initial), r, ctx.cfg.horizon, ctx.cfg.seed);
    if (ctx.opts.format == "json") {
        Json j;
        j["seed"] = traj.seed;
        j["horizon"] = traj.horizon();
        j["initial"] = to_std(traj.initial.counts);
        j["draws"] = traj.draws;
        Json counts = Json::array();
        for (const auto& c : traj.count_history()) counts.push_back(to_std(c));
        j["counts"] = counts;
        write_json(ctx, "trajectory.json", j);
    } else {
        std::ostringstream os;
        write_trajectory_csv(os, traj);
        write_file(ctx, "trajectory.csv", os.str());
    }
    out << "final counts =";
    const Vector fin = traj.final_counts();
    for (Eigen::Index i = 0; i < fin.size(); ++i) out << ' ' << format_double(fin(i));
    out << '\n';
    return kExitOk;
}

int cmd_decompose(Context& ctx, const ReplacementMatrix& r, std::ostream& out) {
    if (ctx.cfg.statistic.kind != StatisticSelector::Kind::Eigen) {
        throw UrnError(ErrorKind::ConfigError, "decompose needs statistic = eigen:K");
    }
    const auto s = decompose_spectrum(r);
    const auto& rv = s.right_vectors.at(ctx.cfg.statistic.index);
    const auto traj = simulate(make_initial(ctx.cfg.initial), r, ctx.cfg.horizon, ctx.cfg.seed,
                               SimulateOptions{0, false});

    std::ostringstream csv;
    Json j;
    j["statistic"] = ctx.cfg.statistic.describe();
    j["lambda"] = rv.lambda;
    j["role"] = role_name(rv.role);
    j["horizon"] = traj.horizon();
    double residual = 0.0;
    if (rv.role == VectorRole::JordanTail) {
        const Vector& head = s.right_vectors[*rv.head].vec;
        const auto e = std::abs(rv.lambda) < kRepeatedTolerance ? repeated_zero_decompose(traj, head, rv.vec)
                                                                 : jordan_decompose(traj, head, rv.vec, rv.lambda);
        write_expansion_csv(csv, e);
        j["zeroth"] = e.zeroth();
        j["zeroth_xi3"] = e.zeroth_xi3;
        j["zeroth_xi2"] = e.zeroth_xi2;
        j["reconstructed"] = e.reconstructed;
        j["direct"] = e.direct;
        j["residual"] = e.residual();
        j["relative_residual"] = e.relative_residual();
        residual = e.relative_residual();
    } else {
        const auto e = martingale_decompose(traj, rv.vec, rv.lambda);
        write_expansion_csv(csv, e);
        j["zeroth"] = e.zeroth;
        j["reconstructed"] = e.reconstructed;
        j["direct"] = e.direct;
        j["residual"] = e.residual();
        j["relative_residual"] = e.relative_residual();
        residual = e.relative_residual();
    }
    write_file(ctx, "expansion.csv", csv.str());
    write_json(ctx, "decomposition.json", j);
    out << "relative residual = " << format_double(residual) << '\n';
    return kExitOk;
}

// The selected statistic as a basis combination plus its description.
struct Statistic {
    std::vector<ComboTerm> combo;
    std::string description;
    Vector w;  // event is C_n·w > (centering + t)(n+1)
};

Statistic resolve_statistic(const ExperimentConfig& cfg, const ReplacementMatrix& r,
                            const SpectralDecomposition& s) {
    Statistic st;
    const auto d = static_cast<Eigen::Index>(r.dim());
    switch (cfg.statistic.kind) {
        case StatisticSelector::Kind::Color:
            st.combo = vector_combo(s, Vector::Unit(d, static_cast<Eigen::Index>(cfg.statistic.index)));
            break;
        case StatisticSelector::Kind::Vector:
            st.combo = vector_combo(s, to_vector(cfg.statistic.vector));
            break;
        case StatisticSelector::Kind::Eigen:
            st.combo = basis_combo(s, cfg.statistic.index);
            break;
    }
    st.description = cfg.statistic.describe();
    st.w = combo_vector(st.combo);
    return st;
}

BoundReport make_bound(const ExperimentConfig& cfg, const ReplacementMatrix& r, const Statistic& st,
                       std::size_t n, double t) {
    const Vector c0 = to_vector(cfg.initial);
    if (cfg.statistic.kind == StatisticSelector::Kind::Color) {
        return color_deviation_bound(r, cfg.statistic.index, c0, n, t);
    }
    return statistic_bound(st.combo, c0, n, t, st.description);
}

bool use_exact(const ExperimentConfig& cfg, std::size_t d, std::size_t n) {
    switch (cfg.mode) {
        case VerifyMode::Exact: return true;
        case VerifyMode::MonteCarlo: return false;
        case VerifyMode::Auto: break;
    }
    return std::pow(static_cast<double>(d), static_cast<double>(n)) <= kMaxEnumeratedPaths;
}

// Bound and probability for every threshold at horizon n.
std::vector<DominanceRow> dominance_at(Context& ctx, const ReplacementMatrix& r, const Statistic& st, std::size_t n,
                                       std::vector<BoundReport>& reports) {
    const auto& cfg = ctx.cfg;
    std::vector<BoundReport> bounds;
    std::vector<double> thresholds;
    const double m = static_cast<double>(n) + 1.0;
    for (double t : cfg.thresholds) {
        bounds.push_back(make_bound(cfg, r, st, n, t));
        thresholds.push_back((bounds.back().centering + t) * m);
    }

    std::vector<ProbabilityEntry> probs;
    const Vector c0 = to_vector(cfg.initial);
    if (use_exact(cfg, r.dim(), n)) {
        const auto dist = exact_distribution(c0, r, n);
        for (double thr : thresholds) {
            probs.push_back({static_cast<double>(exact_tail(dist, st.w, thr)), ProbabilityMode::Exact});
        }
    } else {
        const auto est = estimate_probabilities(c0, r, n, st.w, thresholds, cfg.replicas, cfg.seed, ctx.threads);
        for (const auto& e : est) probs.push_back({e.p_hat, ProbabilityMode::MonteCarlo});
    }
    reports.insert(reports.end(), bounds.begin(), bounds.end());
    return dominance_check(bounds, probs);
}

int report_rows(std::span<const DominanceRow> rows, std::ostream& out) {
    for (const auto& row : rows) {
        out << "n=" << row.n << " t=" << format_double(row.t) << " bound=" << format_double(row.bound)
            << " p=" << format_double(row.probability) << " (" << to_string(row.mode) << ") "
            << (row.pass ? "pass" : "FAIL") << '\n';
    }
    return all_pass(rows) ? kExitOk : kExitDominance;
}

int cmd_bound(Context& ctx, const ReplacementMatrix& r, std::ostream& out) {
    const auto s = decompose_spectrum(r);
    const auto st = resolve_statistic(ctx.cfg, r, s);
    Json j = Json::array();
    for (double t : ctx.cfg.thresholds) {
        const auto rep = make_bound(ctx.cfg, r, st, ctx.cfg.horizon, t);
        j.push_back(to_json(rep));
        out << "t=" << format_double(t) << " tail=" << format_double(rep.tail) << " regime=" << rep.regime << '\n';
    }
    write_json(ctx, "bound.json", j);
    return kExitOk;
}

int cmd_verify(Context& ctx, const ReplacementMatrix& r, std::ostream& out) {
    const auto s = decompose_spectrum(r);
    const auto st = resolve_statistic(ctx.cfg, r, s);
    std::vector<BoundReport> reports;
    const auto rows = dominance_at(ctx, r, st, ctx.cfg.horizon, reports);
    std::ostringstream csv;
    write_dominance_csv(csv, rows);
    write_file(ctx, "dominance.csv", csv.str());
    return report_rows(rows, out);
}

int cmd_sweep(Context& ctx, const ReplacementMatrix& r, std::ostream& out) {
    const auto s = decompose_spectrum(r);
    const auto st = resolve_statistic(ctx.cfg, r, s);
    auto horizons = ctx.cfg.horizons;
    if (horizons.empty()) horizons.push_back(ctx.cfg.horizon);
    std::vector<BoundReport> reports;
    std::vector<DominanceRow> rows;
    for (std::size_t n : horizons) {
        const auto part = dominance_at(ctx, r, st, n, reports);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    std::ostringstream csv;
    write_dominance_csv(csv, rows);
    write_file(ctx, "sweep.csv", csv.str());
    Json j = Json::array();
    for (const auto& rep : reports) j.push_back(to_json(rep));
    write_json(ctx, "bounds.json", j);
    return report_rows(rows, out);
}

void write_manifest(Context& ctx) {
    Json j;
    j["tool"] = "urnbound";
    j["version"] = kVersion;
    j["command"] = ctx.opts.command;
    j["config_hash"] = config_hash(ctx.config_bytes);
    j["seed"] = ctx.cfg.seed;
    j["statistic"] = ctx.cfg.statistic.describe();
    j["mode"] = mode_name(ctx.cfg.mode);
    j["format"] = ctx.opts.format;
    j["outputs"] = ctx.outputs;
    std::ostringstream eigen, boost;
    eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
    boost << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '.' << BOOST_VERSION % 100;
    std::ostringstream json_version;
    json_version << NLOHMANN_JSON_VERSION_MAJOR << '.' << NLOHMANN_JSON_VERSION_MINOR << '.'
                 << NLOHMANN_JSON_VERSION_PATCH;
    j["versions"] = {{"eigen", eigen.str()},
                     {"boost", boost.str()},
                     {"nlohmann_json", json_version.str()},
                     {"compiler", __VERSION__}};
    ctx.outputs.push_back("manifest.json");
    j["outputs"] = ctx.outputs;
    std::ofstream os(ctx.out_dir / "manifest.json", std::ios::binary);
    os << j.dump(2) << '\n';
}

unsigned resolve_threads(const std::optional<unsigned>& flag) {
    if (flag) return std::max(1u, *flag);
    if (const char* env = std::getenv("URNBOUND_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context ctx;
    CLI::App app{"Balanced urn simulation, martingale decompositions and deviation bounds", "urnbound"};
    app.add_option("command", ctx.opts.command, "spectrum | simulate | decompose | bound | verify | sweep")
        ->required()
        ->check(CLI::IsMember({"spectrum", "simulate", "decompose", "bound", "verify", "sweep"}));
    app.add_option("--config", ctx.opts.config_path, "experiment config (key = value text or JSON)")->required();
    app.add_option("--seed", ctx.opts.seed, "overrides the config seed");
    app.add_option("--out", ctx.opts.out, "output directory, overrides the config");
    app.add_option("--threads", ctx.opts.threads, "Monte Carlo worker threads (env URNBOUND_THREADS)");
    app.add_option("--format", ctx.opts.format, "trajectory format for simulate")
        ->check(CLI::IsMember({"csv", "json"}));
    app.set_version_flag("--version", kVersion);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        std::ifstream in(ctx.opts.config_path, std::ios::binary);
        if (!in) throw UrnError(ErrorKind::ConfigError, "cannot read " + ctx.opts.config_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        ctx.config_bytes = buf.str();
        ctx.cfg = parse_config(ctx.config_bytes);
        if (ctx.opts.seed) ctx.cfg.seed = *ctx.opts.seed;
        if (ctx.opts.out) ctx.cfg.out = *ctx.opts.out;
        const bool needs_thresholds =
            ctx.opts.command == "bound" || ctx.opts.command == "verify" || ctx.opts.command == "sweep";
        validate_config(ctx.cfg, needs_thresholds);
        const auto r = validate_matrix(ctx.cfg.matrix);
        ctx.threads = resolve_threads(ctx.opts.threads);
        ctx.out_dir = ctx.cfg.out;
        fs::create_directories(ctx.out_dir);

        int code = kExitOk;
        const auto& c = ctx.opts.command;
        if (c == "spectrum") code = cmd_spectrum(ctx, r, out);
        else if (c == "simulate") code = cmd_simulate(ctx, r, out);
        else if (c == "decompose") code = cmd_decompose(ctx, r, out);
        else if (c == "bound") code = cmd_bound(ctx, r, out);
        else if (c == "verify") code = cmd_verify(ctx, r, out);
        else code = cmd_sweep(ctx, r, out);
        write_manifest(ctx);
        return code;
    } catch (const UrnError& e) {
        err << "urnbound: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        err << "urnbound: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace urnbound::cli
