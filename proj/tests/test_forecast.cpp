#include "volvar/error.hpp"
#include "volvar/forecast.hpp"
#include "volvar/numeric.hpp"
#include "volvar/synth.hpp"
#include "volvar/var.hpp"

#include <gtest/gtest.h>

using namespace volvar;

namespace {

const DailyPanel& sample_panel() {
    static const DailyPanel panel = [] {
        SynthConfig cfg;
        cfg.days = 420;
        cfg.bars_per_day = 24;
        cfg.seed = 11;
        return build_daily_panel(generate_synthetic(cfg));
    }();
    return panel;
}

Split split_at(const std::vector<Date>& d, std::size_t train_end, std::size_t val_end, std::size_t test_end) {
    return {d[train_end], d[val_end], d[test_end]};
}

RollingConfig fast_config() {
    RollingConfig cfg;
    cfg.lstm.lag = 5;
    cfg.lstm.hidden_size = 3;
    cfg.lstm.max_epochs = 5;
    cfg.refit_cadence = 10;
    cfg.arfima.truncation = 100;
    return cfg;
}

}  // namespace

TEST(ResolveSplit, IndicesAndErrors) {
    const auto& d = sample_panel().dates;
    const auto idx = resolve_split(d, split_at(d, 199, 299, 349));
    EXPECT_EQ(idx.val_begin, 200u);
    EXPECT_EQ(idx.test_begin, 300u);
    EXPECT_EQ(idx.test_end, 350u);
    for (const Split& bad : {split_at(d, 299, 199, 349), split_at(d, 199, 299, 299), split_at(d, 199, 199, 349)}) {
        try {
            resolve_split(d, bad);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidSplit);
        }
    }
}

TEST(RollingForecast, OneDayTestRangeGivesOneForecast) {
    const auto& p = sample_panel();
    const auto f = rolling_forecast(VolModel::Har, forecast_inputs(p, Source::Price), split_at(p.dates, 199, 299, 300),
                                    fast_config());
    ASSERT_EQ(f.dates.size(), 1u);
    EXPECT_EQ(f.dates[0], p.dates[300]);
    EXPECT_EQ(f.actual[0], p.rv_price[300]);
}

TEST(RollingForecast, HarMatchesHandRolledLoop) {
    const auto& p = sample_panel();
    const auto cfg = fast_config();
    const auto inputs = forecast_inputs(p, Source::Price);
    const auto split = split_at(p.dates, 199, 299, 419);
    for (VolModel model : {VolModel::Har, VolModel::Harq, VolModel::Harqf}) {
        const HarVariant v = model == VolModel::Har ? HarVariant::Har
                             : model == VolModel::Harq ? HarVariant::Harq : HarVariant::Harqf;
        const auto f = rolling_forecast(model, inputs, split, cfg);
        ASSERT_EQ(f.forecast.size(), 120u);
        HarCoefficients c;
        for (std::size_t k = 0; k < 120; ++k) {
            const std::size_t t = 300 + k;
            if (k % 10 == 0) {
                RvSeries hist;
                hist.dates.assign(p.dates.begin(), p.dates.begin() + t);
                hist.rv.assign(p.rv_price.begin(), p.rv_price.begin() + t);
                if (v != HarVariant::Har) hist.rq.assign(p.rq_price.begin(), p.rq_price.begin() + t);
                c = har_fit(hist, v);
            }
            const std::span<const double> w(p.rv_price.data() + t - 22, 22);
            const std::span<const double> q = v == HarVariant::Har ? std::span<const double>{}
                                                                   : std::span<const double>(p.rq_price.data() + t - 22, 22);
            EXPECT_EQ(f.forecast[k], har_forecast(c, w, q)) << to_string(model) << " day " << k;
        }
    }
}

TEST(RollingForecast, FuturePerturbationDoesNotLeak) {
    const auto& p = sample_panel();
    const auto cfg = fast_config();
    const auto split = split_at(p.dates, 199, 299, 339);
    const auto base = forecast_inputs(p, Source::Price);
    set_quiet(true);
    for (VolModel model : kAllVolModels) {
        const auto f = rolling_forecast(model, base, split, cfg);
        for (std::size_t cut : {300u, 317u, 331u}) {
            auto poisoned = base;
            for (std::size_t t = cut; t < poisoned.target.size(); ++t) {
                poisoned.target[t] *= 50.0;
                poisoned.target_rq[t] *= 7.0;
                poisoned.companion[t] *= 3.0;
            }
            const auto g = rolling_forecast(model, poisoned, split, cfg);
            // The forecast for day `cut` uses data through cut - 1 only.
            for (std::size_t t = 300; t <= cut; ++t) {
                EXPECT_EQ(f.forecast[t - 300], g.forecast[t - 300]) << to_string(model) << " cut " << cut;
            }
        }
    }
    set_quiet(false);
}

TEST(RollingForecast, LstmIsDeterministicAndAcceptsPretrained) {
    const auto& p = sample_panel();
    const auto cfg = fast_config();
    const auto inputs = forecast_inputs(p, Source::Price);
    const auto split = split_at(p.dates, 199, 299, 339);
    const auto a = rolling_forecast(VolModel::LstmRv, inputs, split, cfg);
    const auto model = fit_lstm_forecaster(VolModel::LstmRv, inputs, 300, cfg.lstm);
    const auto b = rolling_forecast(VolModel::LstmRv, inputs, split, cfg, &model);
    EXPECT_EQ(a.forecast, b.forecast);
    for (double v : a.forecast) EXPECT_GT(v, 0.0);
    EXPECT_THROW(rolling_forecast(VolModel::Lstm, inputs, split, cfg, &model), Error);
}

TEST(VolModelNames, RoundTrip) {
    for (VolModel m : kAllVolModels) EXPECT_EQ(parse_vol_model(to_string(m)), m);
    EXPECT_THROW(parse_vol_model("GARCH"), Error);
}
