#pragma once

#include "volvar/arfima.hpp"
#include "volvar/calendar.hpp"
#include "volvar/har.hpp"
#include "volvar/lstm.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace volvar {

enum class VolModel { LstmRv, Lstm, Har, Harq, Harqf, Arfima };

inline constexpr VolModel kAllVolModels[] = {VolModel::LstmRv, VolModel::Lstm,  VolModel::Har,
                                             VolModel::Harq,   VolModel::Harqf, VolModel::Arfima};

std::string_view to_string(VolModel model);
VolModel parse_vol_model(std::string_view name);
bool is_lstm(VolModel model);

// Chronological split by inclusive end dates: train <= train_end < val <= val_end < test <= test_end.
struct Split {
    Date train_end;
    Date val_end;
    Date test_end;
};

struct SplitIndices {
    std::size_t val_begin = 0;   // first validation index
    std::size_t test_begin = 0;  // first test index
    std::size_t test_end = 0;    // one past the last test index
};

SplitIndices resolve_split(const std::vector<Date>& dates, const Split& split);

// Series the forecaster sees. `target` is the RV being forecast (price or
// volume), `target_rq` its quarticity, `companion` the other RV channel used
// by the joint-input LSTM.
struct ForecastInputs {
    std::vector<Date> dates;
    std::vector<double> target;
    std::vector<double> target_rq;
    std::vector<double> companion;
};

struct RollingConfig {
    TrainConfig lstm;
    int refit_cadence = 22;
    ArfimaOptions arfima;
};

// LSTM on z-scored log RV. Scaling constants come from the fitting range only.
struct LstmForecaster {
    VolModel kind = VolModel::Lstm;
    LstmParams params;
    std::vector<double> channel_mean;
    std::vector<double> channel_scale;
    double target_mean = 0.0;
    double target_scale = 1.0;
    TrainConfig config;
    TrainingLog log;
};

// Trains on samples whose target index lies in [lag, end).
LstmForecaster fit_lstm_forecaster(VolModel kind, const ForecastInputs& inputs, std::size_t end,
                                   const TrainConfig& config);

// Forecast of target[t] from the lag values before t.
double lstm_forecast_at(const LstmForecaster& model, const ForecastInputs& inputs, std::size_t t);

struct ForecastSeries {
    VolModel model = VolModel::Har;
    std::vector<Date> dates;
    std::vector<double> forecast;
    std::vector<double> actual;
};

// One forecast per test day using data strictly before that day. Econometric
// models are refit on an expanding window every refit_cadence test days; the
// LSTM is trained once on train+validation (or taken from `pretrained`).
ForecastSeries rolling_forecast(VolModel model, const ForecastInputs& inputs, const Split& split,
                                const RollingConfig& config, const LstmForecaster* pretrained = nullptr);

}  // namespace volvar
