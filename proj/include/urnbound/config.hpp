/*
 * config.hpp: experiment configuration files.
 *
 * Key-value text, one setting per line, '#' starts a comment. Matrix rows
 * follow a "matrix:" line as comma-separated numbers:
 *
 *     matrix:
 *       0.7, 0.3
 *       0.4, 0.6
 *     initial    = 1, 0
 *     horizon    = 14
 *     horizons   = 1000, 10000     # sweep grid, defaults to horizon
 *     thresholds = 0.05, 0.1, 0.15
 *     replicas   = 100000
 *     seed       = 7
 *     statistic  = color:0         # color:K | eigen:K | vector:a,b,...
 *     mode       = auto            # auto | exact | mc
 *     out        = out/two_color
 *
 * A JSON object with the same keys ("matrix" as an array of rows) is
 * accepted as well.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace urnbound {

struct StatisticSelector {
    enum class Kind { Color, Eigen, Vector };
    Kind kind = Kind::Color;
    std::size_t index = 0;
    std::vector<double> vector;

    std::string describe() const;
};

enum class VerifyMode { Auto, Exact, MonteCarlo };

struct ExperimentConfig {
    std::vector<std::vector<double>> matrix;
    std::vector<double> initial;
    std::size_t horizon = 100;
    std::vector<std::size_t> horizons;
    std::vector<double> thresholds;
    std::size_t replicas = 10000;
    std::uint64_t seed = 1;
    StatisticSelector statistic;
    VerifyMode mode = VerifyMode::Auto;
    std::string out = "out";
};

// Throws UrnError(ConfigError) on malformed input.
StatisticSelector parse_statistic(std::string_view text);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config_json(std::string_view text);
// Picks JSON when the first non-blank character is '{'.
ExperimentConfig parse_config(std::string_view text);

// Structural checks: matrix present and square, initial sums to 1 with the
// right dimension, thresholds positive; require_thresholds for bound/verify/sweep.
void validate_config(const ExperimentConfig& config, bool require_thresholds);

// FNV-1a 64-bit, hex.
std::string config_hash(std::string_view bytes);

}  // namespace urnbound
