#include "volvar/backtest.hpp"
#include "volvar/error.hpp"
#include "volvar/numeric.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace volvar;

namespace {

ViolationSeries series_of(const std::vector<int>& ind, double p0 = 0.01) {
    ViolationSeries v;
    for (std::size_t i = 0; i < ind.size(); ++i) v.dates.push_back(add_days(volvar::testing::date(2020, 1, 1), i));
    v.indicators = ind;
    v.p0 = p0;
    return v;
}

std::vector<int> with_hits(std::size_t n, std::size_t x) {
    std::vector<int> ind(n, 0);
    for (std::size_t k = 0; k < x; ++k) ind[k * (n / x)] = 1;
    return ind;
}

}  // namespace

TEST(Violations, StrictInequalities) {
    ReturnSeries r;
    std::vector<VarForecast> var;
    const std::vector<double> ret{-0.05, -0.02, -0.03, 0.04, 0.03};
    for (std::size_t i = 0; i < ret.size(); ++i) {
        const Date d = add_days(volvar::testing::date(2020, 1, 1), i);
        r.dates.push_back(d);
        r.values.push_back(ret[i]);
        var.push_back({d, 0.03, 0.03, 1.0, -1, 1});
    }
    EXPECT_EQ(violations(r, var, Side::Long, 0.01).indicators, (std::vector<int>{1, 0, 0, 0, 0}));
    EXPECT_EQ(violations(r, var, Side::Short, 0.01).indicators, (std::vector<int>{0, 0, 0, 1, 0}));
    var[2].date = add_days(var[2].date, 30);
    try {
        violations(r, var, Side::Long, 0.01);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DateMisalignment);
    }
}

TEST(Kupiec, HandValues) {
    EXPECT_NEAR(kupiec_statistic(1000, 10, 0.01), 0.0, 1e-10);
    const double lr20 = -2.0 * (20 * std::log(0.01 / 0.02) + 980 * std::log(0.99 / 0.98));
    EXPECT_NEAR(kupiec_statistic(1000, 20, 0.01), lr20, 1e-10);
    EXPECT_NEAR(kupiec_statistic(1000, 20, 0.01), 7.83, 0.01);
    EXPECT_NEAR(kupiec_statistic(1000, 0, 0.01), -2000.0 * std::log(0.99), 1e-10);
    EXPECT_NEAR(kupiec_statistic(1000, 0, 0.01), 20.10, 0.01);
    const auto t = kupiec_uc(series_of(with_hits(1000, 20)));
    EXPECT_NEAR(t.statistic, lr20, 1e-10);
    EXPECT_NEAR(t.p_value, chi2_survival(lr20, 1.0), 1e-15);
}

TEST(Kupiec, MinimumAtNominalRateAndIncreasingAway) {
    for (std::size_t x = 10; x < 40; ++x) EXPECT_LT(kupiec_statistic(1000, x, 0.01), kupiec_statistic(1000, x + 1, 0.01));
    for (std::size_t x = 1; x <= 10; ++x) EXPECT_GT(kupiec_statistic(1000, x - 1, 0.01), kupiec_statistic(1000, x, 0.01));
    EXPECT_THROW(kupiec_uc(series_of(with_hits(249, 3))), Error);
}

TEST(Christoffersen, AlternatingSeriesHandValue) {
    const std::vector<int> ind{0, 1, 0, 1, 0, 1, 0, 1};
    const auto c = transition_counts(ind);
    EXPECT_EQ(c.n01, 4u);
    EXPECT_EQ(c.n10, 3u);
    EXPECT_EQ(c.n00, 0u);
    EXPECT_EQ(c.n11, 0u);
    const double expected = -2.0 * (4 * std::log(4.0 / 7.0) + 3 * std::log(3.0 / 7.0));
    EXPECT_NEAR(christoffersen_ind(std::span<const int>(ind)).statistic, expected, 1e-12);
}

TEST(Christoffersen, EqualConditionalRatesGiveZero) {
    // n00=2, n01=1, n10=2, n11=1: both conditional rates are 1/3.
    const std::vector<int> ind{0, 0, 0, 1, 0, 1, 1};
    const auto c = transition_counts(ind);
    ASSERT_EQ(c.n00 * (c.n10 + c.n11), c.n10 * (c.n00 + c.n01));
    EXPECT_NEAR(christoffersen_ind(std::span<const int>(ind)).statistic, 0.0, 1e-12);
}

TEST(Christoffersen, DegenerateSeries) {
    for (int v : {0, 1}) {
        const std::vector<int> ind(300, v);
        try {
            christoffersen_ind(std::span<const int>(ind));
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::DegenerateSeries);
        }
    }
}

TEST(ConditionalCoverage, Additivity) {
    for (std::size_t x : {3u, 10u, 17u, 40u}) {
        const auto v = series_of(with_hits(1000, x));
        const auto t = conditional_coverage(v);
        EXPECT_NEAR(t.lr_cc, t.lr_uc + t.lr_ind, 1e-10);
        EXPECT_NEAR(t.p_cc, std::exp(-t.lr_cc / 2.0), 1e-12);
        EXPECT_DOUBLE_EQ(t.violation_ratio, x / 1000.0);
        EXPECT_GE(t.lr_uc, 0.0);
        EXPECT_GE(t.lr_ind, 0.0);
    }
    EXPECT_NEAR(chi2_survival(5.0, 2.0), 0.0821, 1e-4);
    EXPECT_NEAR(chi2_survival(5.0, 2.0), std::exp(-2.5), 1e-14);
    EXPECT_EQ(chi2_survival(0.0, 2.0), 1.0);
}

TEST(AccuracyScores, HandValues) {
    const std::vector<double> actual{1, 2}, forecast{2, 4};
    const auto s = accuracy_scores(actual, forecast);
    EXPECT_DOUBLE_EQ(s.mse, 2.5);
    EXPECT_DOUBLE_EQ(s.mae, 1.5);
    // |1 - 2| / 1 and |2 - 4| / 2 are both 1.
    EXPECT_DOUBLE_EQ(s.mape, 1.0);
    EXPECT_NEAR(s.qlike, 0.5 - std::log(0.5) - 1.0, 1e-15);
    EXPECT_NEAR(s.qlike, 0.19315, 1e-5);
}

TEST(AccuracyScores, IdentityAndHomogeneity) {
    const std::vector<double> a{0.3, 1.2, 0.8, 2.0}, f{0.5, 1.0, 0.9, 1.5};
    const auto zero = accuracy_scores(a, a);
    EXPECT_EQ(zero.mse, 0.0);
    EXPECT_EQ(zero.mae, 0.0);
    EXPECT_EQ(zero.qlike, 0.0);
    EXPECT_EQ(zero.mape, 0.0);
    const auto base = accuracy_scores(a, f);
    std::vector<double> a3, f3;
    for (double v : a) a3.push_back(3 * v);
    for (double v : f) f3.push_back(3 * v);
    const auto scaled = accuracy_scores(a3, f3);
    EXPECT_NEAR(scaled.mse, 9 * base.mse, 1e-12);
    EXPECT_NEAR(scaled.mae, 3 * base.mae, 1e-12);
    EXPECT_NEAR(scaled.qlike, base.qlike, 1e-12);
    EXPECT_NEAR(scaled.mape, base.mape, 1e-12);
    EXPECT_THROW(accuracy_scores(a, std::vector<double>{1, 2}), Error);
    EXPECT_THROW(accuracy_scores(std::vector<double>{1, 0}, std::vector<double>{1, 1}), Error);
}

TEST(RankModels, OrderAndTieBreak) {
    auto spec = [](VolModel v) { return ModelSpec{v, QuantileMethod::Evt, 0.01, Source::Price}; };
    auto tests = [](double cc, double ratio) {
        CoverageTests t;
        t.lr_cc = cc;
        t.violation_ratio = ratio;
        return t;
    };
    std::map<ModelSpec, CoverageTests> m{{spec(VolModel::Har), tests(0.5335, 0.01)},
                                         {spec(VolModel::LstmRv), tests(0.4601, 0.01)},
                                         {spec(VolModel::Arfima), tests(0.8267, 0.01)}};
    auto ranked = rank_models(m);
    ASSERT_EQ(ranked.size(), 3u);
    EXPECT_EQ(ranked[0].spec.volatility, VolModel::LstmRv);
    EXPECT_EQ(ranked[1].spec.volatility, VolModel::Har);
    EXPECT_EQ(ranked[2].spec.volatility, VolModel::Arfima);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(ranked[i].rank, i + 1);

    std::map<ModelSpec, CoverageTests> tie{{spec(VolModel::Har), tests(1.0, 0.0182)},
                                           {spec(VolModel::Harq), tests(1.0, 0.0144)},
                                           {spec(VolModel::Lstm), tests(std::nan(""), 0.01)}};
    ranked = rank_models(tie);
    EXPECT_EQ(ranked[0].spec.volatility, VolModel::Harq);
    EXPECT_EQ(ranked[2].spec.volatility, VolModel::Lstm);

    EXPECT_EQ(rank_models({{spec(VolModel::Har), tests(3, 0.02)}}).at(0).rank, 1);
}

TEST(BacktestSeries, NoViolationsReportsUndefinedIndependence) {
    ReturnSeries r;
    std::vector<VarForecast> var;
    for (std::size_t i = 0; i < 300; ++i) {
        const Date d = add_days(volvar::testing::date(2020, 1, 1), i);
        r.dates.push_back(d);
        r.values.push_back(0.001);
        var.push_back({d, 0.05, 0.05, 1.0, -1, 1});
    }
    const auto t = backtest_series(r, var, Side::Long, 0.01);
    EXPECT_EQ(t.violation_ratio, 0.0);
    EXPECT_NEAR(t.lr_uc, -600.0 * std::log(0.99), 1e-10);
    EXPECT_TRUE(std::isnan(t.lr_ind));
    EXPECT_TRUE(std::isnan(t.lr_cc));
}

TEST(BacktestSeries, TrueQuantileControlsSize) {
    // Standard normal returns against the exact 1% quantile.
    const double q = 2.3263478740408408;
    int rejections = 0;
    double ratio_sum = 0.0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        const auto x = volvar::testing::normal_sample(1000, 7000 + s);
        ReturnSeries r;
        std::vector<VarForecast> var;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const Date d = add_days(volvar::testing::date(2000, 1, 1), i);
            r.dates.push_back(d);
            r.values.push_back(x[i]);
            var.push_back({d, q, q, 1.0, -q, q});
        }
        const auto v = violations(r, var, Side::Long, 0.01);
        const auto uc = kupiec_uc(v);
        rejections += uc.p_value < 0.05;
        ratio_sum += static_cast<double>(v.count()) / 1000.0;
    }
    EXPECT_LE(rejections, seeds / 10);
    EXPECT_NEAR(ratio_sum / seeds, 0.01, 0.003);
}

TEST(ReportCsv, Shapes) {
    std::vector<BacktestRow> rows;
    for (const auto& spec : default_grid()) {
        for (Side side : {Side::Long, Side::Short}) rows.push_back({spec, side, CoverageTests{}, 1});
    }
    const auto csv = backtest_csv(rows);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 37);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "model,quantile_method,side,violation_ratio,lr_uc,p_uc,lr_ind,p_ind,lr_cc,p_cc,rank");

    const std::vector<AccuracyRow> one{{"HAR", {1, 2, 3, 4}}};
    EXPECT_EQ(accuracy_csv(one), "model,mse,mae,qlike,mape\nHAR,1,2,3,4\n");
    const AccuracyRow ref{"LSTM-RV", {1, 1, 1, 1}};
    const std::vector<AccuracyRow> base{{"HAR", {2, 4, 1, 0.5}}};
    EXPECT_EQ(improvement_csv(ref, base),
              "baseline,metric,improvement_pct\nHAR,mse,50\nHAR,mae,75\nHAR,qlike,0\nHAR,mape,-100\n");
}
