#pragma once

#include "volvar/forecast.hpp"
#include "volvar/var.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace volvar {

// Run configuration, loaded from a JSON document with nested sections.
// Unknown keys are rejected. Defaults:
//
//   data_path       "bars.csv"
//   output_dir      "out"
//   seed            42              (also seeds LSTM initialisation)
//   p0              0.01            must lie in (0, 0.1]
//   refit_cadence   22
//   split           train_end / val_end / test_end as YYYY-MM-DD; when all
//                   three are omitted the panel is split 50/20/30 by day count
//   models          volatility: all six; quantile: EVT, SKST, H; source: price
//   lstm            lag 22, hidden_size 8, learning_rate 0.01, max_epochs 100,
//                   patience 10, val_fraction 0.1, grad_clip 5
//   arfima          max_p 1, max_q 1, truncation 500
struct RunConfig {
    std::string data_path = "bars.csv";
    std::string output_dir = "out";
    std::uint64_t seed = 42;
    double p0 = 0.01;
    int refit_cadence = 22;
    std::optional<Split> split;
    std::vector<VolModel> volatility_models{std::begin(kAllVolModels), std::end(kAllVolModels)};
    std::vector<QuantileMethod> quantile_methods{std::begin(kAllQuantileMethods), std::end(kAllQuantileMethods)};
    Source source = Source::Price;
    TrainConfig lstm;
    ArfimaOptions arfima;

    // Throws Error(InvalidConfig | InvalidSplit).
    void validate() const;

    std::vector<ModelSpec> specs() const;
    RollingConfig rolling() const;

    // Canonical form of every field that affects results (output_dir excluded).
    nlohmann::json canonical() const;
    std::string hash() const;
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

// Resolves the configured split against the panel dates, falling back to the
// 50/20/30 day-count split.
Split effective_split(const RunConfig& config, const std::vector<Date>& dates);

}  // namespace volvar
