#include "volvar/forecast.hpp"

#include "volvar/error.hpp"
#include "volvar/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace volvar {

std::string_view to_string(VolModel model) {
    switch (model) {
        case VolModel::LstmRv: return "LSTM-RV";
        case VolModel::Lstm: return "LSTM";
        case VolModel::Har: return "HAR";
        case VolModel::Harq: return "HARQ";
        case VolModel::Harqf: return "HARQF";
        case VolModel::Arfima: return "ARFIMA";
    }
    return "HAR";
}

VolModel parse_vol_model(std::string_view name) {
    for (VolModel m : kAllVolModels) {
        if (to_string(m) == name) return m;
    }
    fail(ErrorCode::InvalidConfig, "unknown volatility model '" + std::string(name) + "'");
}

bool is_lstm(VolModel model) { return model == VolModel::LstmRv || model == VolModel::Lstm; }

SplitIndices resolve_split(const std::vector<Date>& dates, const Split& split) {
    if (!(split.train_end < split.val_end && split.val_end < split.test_end)) {
        fail(ErrorCode::InvalidSplit, "split dates must satisfy train_end < val_end < test_end");
    }
    if (!std::is_sorted(dates.begin(), dates.end()) ||
        std::adjacent_find(dates.begin(), dates.end()) != dates.end()) {
        fail(ErrorCode::InvalidSplit, "series dates must be strictly increasing");
    }
    auto upper = [&](const Date& d) {
        return static_cast<std::size_t>(std::upper_bound(dates.begin(), dates.end(), d) - dates.begin());
    };
    SplitIndices idx{upper(split.train_end), upper(split.val_end), upper(split.test_end)};
    if (idx.val_begin == 0) fail(ErrorCode::InvalidSplit, "training segment is empty");
    if (idx.test_begin == idx.val_begin) fail(ErrorCode::InvalidSplit, "validation segment is empty");
    if (idx.test_end == idx.test_begin) fail(ErrorCode::InvalidSplit, "test segment is empty");
    return idx;
}

namespace {

double safe_log(double v) { return std::log(std::max(v, kVarianceFloor)); }

std::vector<std::vector<double>> log_channels(VolModel kind, const ForecastInputs& inputs) {
    std::vector<std::vector<double>> ch;
    ch.emplace_back();
    for (double v : inputs.target) ch.back().push_back(safe_log(v));
    if (kind == VolModel::LstmRv) {
        if (inputs.companion.size() != inputs.target.size()) {
            fail(ErrorCode::DimensionMismatch, "LSTM-RV needs a companion RV channel");
        }
        ch.emplace_back();
        for (double v : inputs.companion) ch.back().push_back(safe_log(v));
    }
    return ch;
}

InputSequence window_at(const LstmForecaster& m, const std::vector<std::vector<double>>& ch, std::size_t t) {
    const auto lag = static_cast<std::size_t>(m.config.lag);
    InputSequence seq;
    seq.reserve(lag);
    for (std::size_t s = t - lag; s < t; ++s) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(ch.size()));
        for (std::size_t c = 0; c < ch.size(); ++c) {
            x(static_cast<Eigen::Index>(c)) = (ch[c][s] - m.channel_mean[c]) / m.channel_scale[c];
        }
        seq.push_back(std::move(x));
    }
    return seq;
}

double scale_of(std::span<const double> v) {
    const double s = sample_std(v);
    return s > 0.0 ? s : 1.0;
}

}  // namespace

LstmForecaster fit_lstm_forecaster(VolModel kind, const ForecastInputs& inputs, std::size_t end,
                                   const TrainConfig& config) {
    if (!is_lstm(kind)) fail(ErrorCode::InvalidParameter, "not an LSTM model");
    config.validate();
    if (end > inputs.target.size()) fail(ErrorCode::InvalidParameter, "fitting range exceeds data");
    const auto lag = static_cast<std::size_t>(config.lag);
    if (end <= lag) fail(ErrorCode::TooFewObservations, "fitting range shorter than the LSTM lag");

    const auto ch = log_channels(kind, inputs);
    LstmForecaster m;
    m.kind = kind;
    m.config = config;
    for (const auto& c : ch) {
        const std::span<const double> fit_range(c.data(), end);
        m.channel_mean.push_back(mean(fit_range));
        m.channel_scale.push_back(scale_of(fit_range));
    }
    m.target_mean = m.channel_mean[0];
    m.target_scale = m.channel_scale[0];

    std::vector<TrainingSample> samples;
    samples.reserve(end - lag);
    for (std::size_t t = lag; t < end; ++t) {
        samples.push_back({window_at(m, ch, t), (ch[0][t] - m.target_mean) / m.target_scale});
    }
    auto trained = train_lstm(samples, config);
    m.params = std::move(trained.params);
    m.log = std::move(trained.log);
    return m;
}

double lstm_forecast_at(const LstmForecaster& model, const ForecastInputs& inputs, std::size_t t) {
    if (t < static_cast<std::size_t>(model.config.lag) || t > inputs.target.size()) {
        fail(ErrorCode::WindowTooShort, "not enough history for an LSTM forecast");
    }
    const auto ch = log_channels(model.kind, inputs);
    const double z = lstm_forward(model.params, window_at(model, ch, t)).prediction;
    return std::max(std::exp(model.target_mean + model.target_scale * z), kVarianceFloor);
}

ForecastSeries rolling_forecast(VolModel model, const ForecastInputs& inputs, const Split& split,
                                const RollingConfig& config, const LstmForecaster* pretrained) {
    if (config.refit_cadence < 1) fail(ErrorCode::InvalidConfig, "refit_cadence must be >= 1");
    const std::size_t n = inputs.target.size();
    if (inputs.dates.size() != n) fail(ErrorCode::DimensionMismatch, "dates and target differ in length");
    const auto idx = resolve_split(inputs.dates, split);

    ForecastSeries out;
    out.model = model;
    const std::span<const double> rv(inputs.target);
    const std::span<const double> rq(inputs.target_rq);

    std::optional<LstmForecaster> trained;
    if (pretrained && pretrained->kind != model) {
        fail(ErrorCode::InvalidParameter, "pretrained forecaster kind does not match the requested model");
    }
    const LstmForecaster* lstm = pretrained;
    if (is_lstm(model) && !lstm) {
        trained = fit_lstm_forecaster(model, inputs, idx.test_begin, config.lstm);
        lstm = &*trained;
    }
    std::vector<std::vector<double>> channels;
    if (is_lstm(model)) channels = log_channels(model, inputs);

    std::optional<HarCoefficients> har;
    std::optional<ArfimaParams> arfima;
    std::vector<double> log_rv;
    if (model == VolModel::Arfima) {
        for (double v : inputs.target) log_rv.push_back(safe_log(v));
    }
    const HarVariant variant = model == VolModel::Harq    ? HarVariant::Harq
                               : model == VolModel::Harqf ? HarVariant::Harqf
                                                          : HarVariant::Har;

    for (std::size_t t = idx.test_begin; t < idx.test_end; ++t) {
        const bool refit = (t - idx.test_begin) % static_cast<std::size_t>(config.refit_cadence) == 0;
        double f = 0.0;
        switch (model) {
            case VolModel::LstmRv:
            case VolModel::Lstm: {
                const double z = lstm_forward(lstm->params, window_at(*lstm, channels, t)).prediction;
                f = std::max(std::exp(lstm->target_mean + lstm->target_scale * z), kVarianceFloor);
                break;
            }
            case VolModel::Har:
            case VolModel::Harq:
            case VolModel::Harqf: {
                if (refit) {
                    RvSeries history{{inputs.dates.begin(), inputs.dates.begin() + static_cast<std::ptrdiff_t>(t)},
                                     {rv.begin(), rv.begin() + static_cast<std::ptrdiff_t>(t)},
                                     variant == HarVariant::Har
                                         ? std::vector<double>{}
                                         : std::vector<double>(rq.begin(), rq.begin() + static_cast<std::ptrdiff_t>(t))};
                    har = har_fit(history, variant);
                }
                if (t < kHarMonth) fail(ErrorCode::WindowTooShort, "HAR needs 22 days of history");
                f = har_forecast(*har, rv.subspan(t - kHarMonth, kHarMonth),
                                 variant == HarVariant::Har ? std::span<const double>{}
                                                            : rq.subspan(t - kHarMonth, kHarMonth));
                break;
            }
            case VolModel::Arfima: {
                const std::span<const double> history(log_rv.data(), t);
                if (refit) arfima = arfima_fit(history, config.arfima).best;
                f = std::max(std::exp(arfima_forecast(*arfima, history)), kVarianceFloor);
                break;
            }
        }
        out.dates.push_back(inputs.dates[t]);
        out.forecast.push_back(f);
        out.actual.push_back(inputs.target[t]);
    }
    return out;
}

}  // namespace volvar
