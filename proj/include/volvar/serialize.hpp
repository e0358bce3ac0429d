#pragma once

#include "volvar/arfima.hpp"
#include "volvar/forecast.hpp"
#include "volvar/har.hpp"
#include "volvar/tails/tail_fit.hpp"

#include <json.hpp>

namespace volvar {

// Self-describing JSON documents: every object carries a "kind" tag, weights
// are written as full-precision decimals so a round trip is exact.
nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LstmParams& params);
LstmParams lstm_params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LstmForecaster& model);
LstmForecaster lstm_forecaster_from_json(const nlohmann::json& j);

nlohmann::json to_json(const HarCoefficients& coefs);
HarCoefficients har_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ArfimaParams& params);
ArfimaParams arfima_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GpdFit& fit);
GpdFit gpd_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SkstFit& fit);
SkstFit skst_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EmpiricalTail& tail);
EmpiricalTail empirical_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TailModel& model);
TailModel tail_model_from_json(const nlohmann::json& j);

Tail parse_tail(std::string_view name);

}  // namespace volvar
