#include "volvar/var.hpp"

#include "volvar/error.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace volvar {

std::string_view to_string(Side side) { return side == Side::Long ? "long" : "short"; }
std::string_view to_string(Source source) { return source == Source::Price ? "price" : "volume"; }

Source parse_source(std::string_view name) {
    if (name == "price") return Source::Price;
    if (name == "volume") return Source::Volume;
    fail(ErrorCode::InvalidConfig, "unknown source '" + std::string(name) + "'");
}

std::string ModelSpec::name() const {
    std::string s = std::string(to_string(volatility)) + "-" + std::string(to_string(quantile));
    if (source == Source::Volume) s += "/V";
    return s;
}

void ModelSpec::validate() const {
    if (!(p0 > 0.0 && p0 <= 0.1)) fail(ErrorCode::InvalidConfig, "p0 must lie in (0, 0.1]");
}

std::vector<ModelSpec> default_grid(double p0, Source source) {
    std::vector<ModelSpec> grid;
    for (VolModel v : kAllVolModels) {
        for (QuantileMethod q : kAllQuantileMethods) grid.push_back({v, q, p0, source});
    }
    return grid;
}

double var_from_forecast(double rv_forecast, double q) {
    if (!(rv_forecast > 0.0)) fail(ErrorCode::NonPositiveVariance, "volatility forecast must be positive");
    if (!std::isfinite(q)) fail(ErrorCode::NonFiniteValue, "tail quantile must be finite");
    return std::abs(q) * std::sqrt(rv_forecast);
}

std::vector<VarForecast> assemble_var(const ForecastSeries& forecasts, const TailModel& left, const TailModel& right,
                                      double p0) {
    const double q_long = left.quantile(p0);
    const double q_short = right.quantile(p0);
    std::vector<VarForecast> out;
    out.reserve(forecasts.dates.size());
    for (std::size_t i = 0; i < forecasts.dates.size(); ++i) {
        const double rv = forecasts.forecast[i];
        out.push_back({forecasts.dates[i], var_from_forecast(rv, q_long), var_from_forecast(rv, q_short), rv, q_long,
                       q_short});
    }
    return out;
}

StandardizedReturns fitting_returns(const DailyPanel& panel, const Date& last) {
    std::vector<double> r;
    for (std::size_t i = 0; i < panel.size() && panel.dates[i] <= last; ++i) {
        if (panel.ret[i]) r.push_back(*panel.ret[i]);
    }
    return standardize(r);
}

ForecastInputs forecast_inputs(const DailyPanel& panel, Source source) {
    ForecastInputs in;
    in.dates = panel.dates;
    if (source == Source::Price) {
        in.target = panel.rv_price;
        in.target_rq = panel.rq_price;
        in.companion = panel.rv_volume;
    } else {
        in.target = panel.rv_volume;
        in.target_rq = panel.rq_volume;
        in.companion = panel.rv_price;
    }
    return in;
}

GridOutput run_grid(const DailyPanel& panel, const std::vector<ModelSpec>& specs, const Split& split,
                    const RollingConfig& config) {
    GridOutput out;
    const StandardizedReturns z = fitting_returns(panel, split.val_end);

    std::map<QuantileMethod, std::pair<TailModel, TailModel>> tails;
    for (const auto& spec : specs) {
        spec.validate();
        try {
            const auto key = std::make_pair(spec.volatility, spec.source);
            if (!out.forecasts.count(key)) {
                out.forecasts.emplace(key, rolling_forecast(spec.volatility, forecast_inputs(panel, spec.source), split,
                                                            config));
            }
            if (!tails.count(spec.quantile)) {
                tails.emplace(spec.quantile, std::make_pair(fit_tail(spec.quantile, z, Tail::Left),
                                                            fit_tail(spec.quantile, z, Tail::Right)));
            }
            const auto& [left, right] = tails.at(spec.quantile);
            out.var[spec] = assemble_var(out.forecasts.at(key), left, right, spec.p0);
        } catch (const Error& e) {
            throw Error(e.code(), "spec " + spec.name() + ": " + e.message());
        }
    }
    return out;
}

std::string var_csv(const std::map<ModelSpec, std::vector<VarForecast>>& var) {
    std::string out = "date,model,quantile_method,side,var,rv_forecast\n";
    char buf[96];
    for (const auto& [spec, series] : var) {
        std::string model(to_string(spec.volatility));
        if (spec.source == Source::Volume) model += "/V";
        const std::string method(to_string(spec.quantile));
        for (const auto& f : series) {
            for (Side side : {Side::Long, Side::Short}) {
                std::snprintf(buf, sizeof(buf), ",%.6g,%.6g\n", side == Side::Long ? f.var_long : f.var_short,
                              f.rv_forecast);
                out += format_date(f.date) + "," + model + "," + method + "," + std::string(to_string(side)) + buf;
            }
        }
    }
    return out;
}

}  // namespace volvar
