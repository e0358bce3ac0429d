#pragma once

#include "volvar/forecast.hpp"
#include "volvar/marketdata.hpp"
#include "volvar/tails/tail_fit.hpp"

#include <compare>
#include <map>
#include <string>
#include <vector>

namespace volvar {

enum class Side { Long, Short };
enum class Source { Price, Volume };

std::string_view to_string(Side side);
std::string_view to_string(Source source);
Source parse_source(std::string_view name);

struct ModelSpec {
    VolModel volatility = VolModel::Har;
    QuantileMethod quantile = QuantileMethod::Evt;
    double p0 = 0.01;
    Source source = Source::Price;

    auto operator<=>(const ModelSpec&) const = default;

    // e.g. "HAR-EVT"; volume-sourced specs carry a "/V" suffix.
    std::string name() const;
    void validate() const;
};

// The 6 x 3 grid in volatility-model-major order.
std::vector<ModelSpec> default_grid(double p0 = 0.01, Source source = Source::Price);

struct VarForecast {
    Date date;
    double var_long = 0.0;
    double var_short = 0.0;
    double rv_forecast = 0.0;
    double quantile_long = 0.0;   // left-tail standardized quantile
    double quantile_short = 0.0;  // right-tail standardized quantile
};

// |q| * sqrt(rv_forecast); pass the left-tail quantile for a long position and
// the right-tail quantile for a short one.
double var_from_forecast(double rv_forecast, double q);

// Static tail quantiles applied to a dynamic volatility forecast.
std::vector<VarForecast> assemble_var(const ForecastSeries& forecasts, const TailModel& left, const TailModel& right,
                                      double p0);

// Standardized close-to-close returns on days up to and including `last`.
StandardizedReturns fitting_returns(const DailyPanel& panel, const Date& last);

ForecastInputs forecast_inputs(const DailyPanel& panel, Source source);

struct GridOutput {
    std::map<ModelSpec, std::vector<VarForecast>> var;
    std::map<std::pair<VolModel, Source>, ForecastSeries> forecasts;
};

// Volatility forecasts are computed once per (model, source) and tails once per
// method; tails see training+validation returns only.
GridOutput run_grid(const DailyPanel& panel, const std::vector<ModelSpec>& specs, const Split& split,
                    const RollingConfig& config);

// CSV `date,model,quantile_method,side,var,rv_forecast`, 6 significant digits.
std::string var_csv(const std::map<ModelSpec, std::vector<VarForecast>>& var);

}  // namespace volvar
