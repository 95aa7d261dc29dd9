#include "urnbound/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "urnbound/error.hpp"

namespace urnbound {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw UrnError(ErrorKind::ConfigError, msg); }

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) fail("not a number: '" + std::string(s) + "'");
    return x;
}

std::uint64_t parse_unsigned(std::string_view s) {
    s = trim(s);
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        fail("not a nonnegative integer: '" + std::string(s) + "'");
    }
    return x;
}

template <typename F>
auto parse_list(std::string_view s, F parse_item) {
    std::vector<decltype(parse_item(s))> out;
    s = trim(s);
    if (s.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(parse_item(s.substr(start, comma == std::string_view::npos ? s.size() - start : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool looks_numeric_row(std::string_view s) {
    s = trim(s);
    if (s.empty()) return false;
    const char c = s.front();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
}

VerifyMode parse_mode(std::string_view s) {
    s = trim(s);
    if (s == "auto") return VerifyMode::Auto;
    if (s == "exact") return VerifyMode::Exact;
    if (s == "mc") return VerifyMode::MonteCarlo;
    fail("mode must be auto, exact or mc");
}

void apply_key(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    if (key == "initial") {
        cfg.initial = parse_list(value, parse_double);
    } else if (key == "horizon") {
        cfg.horizon = parse_unsigned(value);
    } else if (key == "horizons") {
        for (auto h : parse_list(value, parse_unsigned)) cfg.horizons.push_back(h);
    } else if (key == "thresholds") {
        cfg.thresholds = parse_list(value, parse_double);
    } else if (key == "replicas") {
        cfg.replicas = parse_unsigned(value);
    } else if (key == "seed") {
        cfg.seed = parse_unsigned(value);
    } else if (key == "statistic") {
        cfg.statistic = parse_statistic(value);
    } else if (key == "mode") {
        cfg.mode = parse_mode(value);
    } else if (key == "out") {
        cfg.out = std::string(trim(value));
    } else {
        fail("unknown key '" + std::string(key) + "'");
    }
}

}  // namespace

std::string StatisticSelector::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Color: os << "color:" << index; break;
        case Kind::Eigen: os << "eigen:" << index; break;
        case Kind::Vector:
            os << "vector:";
            for (std::size_t i = 0; i < vector.size(); ++i) os << (i ? "," : "") << vector[i];
            break;
    }
    return os.str();
}

StatisticSelector parse_statistic(std::string_view text) {
    text = trim(text);
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) fail("statistic must be color:K, eigen:K or vector:a,b,...");
    const auto kind = trim(text.substr(0, colon));
    const auto arg = text.substr(colon + 1);
    StatisticSelector sel;
    if (kind == "color") {
        sel.kind = StatisticSelector::Kind::Color;
        sel.index = parse_unsigned(arg);
    } else if (kind == "eigen") {
        sel.kind = StatisticSelector::Kind::Eigen;
        sel.index = parse_unsigned(arg);
    } else if (kind == "vector") {
        sel.kind = StatisticSelector::Kind::Vector;
        sel.vector = parse_list(arg, parse_double);
        if (sel.vector.empty()) fail("vector statistic needs components");
    } else {
        fail("unknown statistic kind '" + std::string(kind) + "'");
    }
    return sel;
}

ExperimentConfig parse_config_text(std::string_view text) {
    ExperimentConfig cfg;
    bool in_matrix = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        try {
            if (line == "matrix:") {
                if (!cfg.matrix.empty()) fail("matrix given twice");
                in_matrix = true;
                continue;
            }
            if (in_matrix && looks_numeric_row(line)) {
                cfg.matrix.push_back(parse_list(line, parse_double));
                continue;
            }
            in_matrix = false;
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) fail("expected key = value");
            apply_key(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const UrnError& e) {
            fail("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig parse_config_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("JSON config must be an object");

    ExperimentConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "matrix") {
                cfg.matrix = value.get<std::vector<std::vector<double>>>();
            } else if (key == "initial") {
                cfg.initial = value.get<std::vector<double>>();
            } else if (key == "horizon") {
                cfg.horizon = value.get<std::size_t>();
            } else if (key == "horizons") {
                cfg.horizons = value.get<std::vector<std::size_t>>();
            } else if (key == "thresholds") {
                cfg.thresholds = value.get<std::vector<double>>();
            } else if (key == "replicas") {
                cfg.replicas = value.get<std::size_t>();
            } else if (key == "seed") {
                cfg.seed = value.get<std::uint64_t>();
            } else if (key == "statistic") {
                cfg.statistic = parse_statistic(value.get<std::string>());
            } else if (key == "mode") {
                cfg.mode = parse_mode(value.get<std::string>());
            } else if (key == "out") {
                cfg.out = value.get<std::string>();
            } else {
                fail("unknown key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        fail(std::string("bad JSON value: ") + e.what());
    }
    return cfg;
}

ExperimentConfig parse_config(std::string_view text) {
    const auto body = trim(text);
    return !body.empty() && body.front() == '{' ? parse_config_json(text) : parse_config_text(text);
}

void validate_config(const ExperimentConfig& cfg, bool require_thresholds) {
    if (cfg.matrix.empty()) fail("missing matrix");
    const auto d = cfg.matrix.size();
    if (cfg.initial.empty()) fail("missing initial composition");
    if (cfg.initial.size() != d) fail("initial composition has wrong dimension");
    double sum = 0.0;
    for (double x : cfg.initial) {
        if (!(x >= 0.0)) fail("initial composition must be nonnegative");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail("initial composition must sum to 1");
    if (require_thresholds && cfg.thresholds.empty()) fail("thresholds list is empty");
    for (double t : cfg.thresholds) {
        if (!(t > 0.0)) fail("thresholds must be positive");
    }
    if (cfg.statistic.kind == StatisticSelector::Kind::Color && cfg.statistic.index >= d) {
        fail("statistic color index out of range");
    }
    if (cfg.statistic.kind == StatisticSelector::Kind::Eigen && cfg.statistic.index + 1 >= d) {
        fail("statistic eigen index out of range");
    }
    if (cfg.statistic.kind == StatisticSelector::Kind::Vector && cfg.statistic.vector.size() != d) {
        fail("statistic vector has wrong dimension");
    }
}

std::string config_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace urnbound
