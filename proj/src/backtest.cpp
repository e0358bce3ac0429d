#include "volvar/backtest.hpp"

#include "volvar/error.hpp"
#include "volvar/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace volvar {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// x ln p with 0 ln 0 := 0.
double xlogy(double x, double p) { return x == 0.0 ? 0.0 : x * std::log(p); }

std::string g(double v, const char* fmt = "%.6g") {
    if (std::isnan(v)) return "nan";
    char buf[48];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

}  // namespace

std::size_t ViolationSeries::count() const {
    return static_cast<std::size_t>(std::count(indicators.begin(), indicators.end(), 1));
}

ViolationSeries violations(const ReturnSeries& returns, std::span<const VarForecast> var, Side side, double p0) {
    if (returns.dates.size() != var.size() || returns.values.size() != var.size()) {
        fail(ErrorCode::DateMisalignment, "returns and VaR series differ in length");
    }
    ViolationSeries v;
    v.side = side;
    v.p0 = p0;
    v.dates = returns.dates;
    v.indicators.reserve(var.size());
    for (std::size_t t = 0; t < var.size(); ++t) {
        if (returns.dates[t] != var[t].date) {
            fail(ErrorCode::DateMisalignment, "return dated " + format_date(returns.dates[t]) + " paired with VaR dated " +
                                                  format_date(var[t].date));
        }
        const double r = returns.values[t];
        const bool hit = side == Side::Long ? r < -var[t].var_long : r > var[t].var_short;
        v.indicators.push_back(hit ? 1 : 0);
    }
    return v;
}

double kupiec_statistic(std::size_t n, std::size_t x, double p0) {
    if (!(p0 > 0.0 && p0 < 1.0)) fail(ErrorCode::InvalidParameter, "p0 must lie in (0,1)");
    if (x > n) fail(ErrorCode::InvalidParameter, "violations exceed observations");
    const double nd = static_cast<double>(n), xd = static_cast<double>(x);
    const double pi_hat = xd / nd;
    const double ll_null = xlogy(nd - xd, 1.0 - p0) + xlogy(xd, p0);
    const double ll_alt = xlogy(nd - xd, 1.0 - pi_hat) + xlogy(xd, pi_hat);
    return std::max(0.0, -2.0 * (ll_null - ll_alt));
}

LrTest kupiec_uc(const ViolationSeries& v) {
    const std::size_t n = v.indicators.size();
    if (n < 250) fail(ErrorCode::TooFewObservations, "Kupiec test needs at least 250 observations");
    const double lr = kupiec_statistic(n, v.count(), v.p0);
    return {lr, chi2_survival(lr, 1.0)};
}

TransitionCounts transition_counts(std::span<const int> indicators) {
    TransitionCounts c;
    for (std::size_t t = 1; t < indicators.size(); ++t) {
        const int a = indicators[t - 1], b = indicators[t];
        if (a == 0 && b == 0) ++c.n00;
        else if (a == 0 && b == 1) ++c.n01;
        else if (a == 1 && b == 0) ++c.n10;
        else ++c.n11;
    }
    return c;
}

LrTest christoffersen_ind(std::span<const int> indicators) {
    const auto ones = std::count(indicators.begin(), indicators.end(), 1);
    if (ones == 0 || static_cast<std::size_t>(ones) == indicators.size()) {
        fail(ErrorCode::DegenerateSeries, "independence test needs both violations and non-violations");
    }
    const auto c = transition_counts(indicators);
    const double n00 = static_cast<double>(c.n00), n01 = static_cast<double>(c.n01);
    const double n10 = static_cast<double>(c.n10), n11 = static_cast<double>(c.n11);
    const double pi01 = n00 + n01 > 0 ? n01 / (n00 + n01) : 0.0;
    const double pi11 = n10 + n11 > 0 ? n11 / (n10 + n11) : 0.0;
    const double pi = (n01 + n11) / (n00 + n01 + n10 + n11);
    const double ll_null = xlogy(n00 + n10, 1.0 - pi) + xlogy(n01 + n11, pi);
    const double ll_alt = xlogy(n00, 1.0 - pi01) + xlogy(n01, pi01) + xlogy(n10, 1.0 - pi11) + xlogy(n11, pi11);
    const double lr = std::max(0.0, -2.0 * (ll_null - ll_alt));
    return {lr, chi2_survival(lr, 1.0)};
}

LrTest christoffersen_ind(const ViolationSeries& v) { return christoffersen_ind(v.indicators); }

CoverageTests conditional_coverage(const ViolationSeries& v) {
    const auto uc = kupiec_uc(v);
    const auto ind = christoffersen_ind(v);
    CoverageTests t;
    t.violation_ratio = static_cast<double>(v.count()) / static_cast<double>(v.indicators.size());
    t.lr_uc = uc.statistic;
    t.p_uc = uc.p_value;
    t.lr_ind = ind.statistic;
    t.p_ind = ind.p_value;
    t.lr_cc = uc.statistic + ind.statistic;
    t.p_cc = chi2_survival(t.lr_cc, 2.0);
    return t;
}

AccuracyScores accuracy_scores(std::span<const double> actual, std::span<const double> forecast) {
    if (actual.size() != forecast.size()) fail(ErrorCode::DimensionMismatch, "actual and forecast differ in length");
    if (actual.empty()) fail(ErrorCode::TooFewObservations, "accuracy scores of empty series");
    CompensatedSum se, ae, ql, ape;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double y = actual[i], f = forecast[i];
        if (!(y > 0.0) || !(f > 0.0)) fail(ErrorCode::NonPositiveVariance, "accuracy scores need positive values");
        const double d = y - f;
        se.add(d * d);
        ae.add(std::abs(d));
        const double ratio = y / f;
        ql.add(ratio - std::log(ratio) - 1.0);
        ape.add(std::abs(d / y));
    }
    const double n = static_cast<double>(actual.size());
    return {se.value() / n, ae.value() / n, ql.value() / n, ape.value() / n};
}

std::vector<RankedRow> rank_models(const std::map<ModelSpec, CoverageTests>& results) {
    std::vector<RankedRow> rows;
    for (const auto& [spec, tests] : results) rows.push_back({spec, tests, tests.lr_cc, 0});
    std::sort(rows.begin(), rows.end(), [](const RankedRow& a, const RankedRow& b) {
        const bool an = std::isnan(a.statistic), bn = std::isnan(b.statistic);
        if (an != bn) return bn;
        if (!an && a.statistic != b.statistic) return a.statistic < b.statistic;
        const double da = std::abs(a.tests.violation_ratio - a.spec.p0);
        const double db = std::abs(b.tests.violation_ratio - b.spec.p0);
        if (da != db) return da < db;
        return a.spec.name() < b.spec.name();
    });
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<int>(i + 1);
    return rows;
}

ReturnSeries panel_returns(const DailyPanel& panel) {
    ReturnSeries r;
    for (std::size_t i = 0; i < panel.size(); ++i) {
        if (!panel.ret[i]) continue;
        r.dates.push_back(panel.dates[i]);
        r.values.push_back(*panel.ret[i]);
    }
    return r;
}

CoverageTests backtest_series(const ReturnSeries& returns, std::span<const VarForecast> var, Side side, double p0) {
    if (var.empty()) fail(ErrorCode::TooFewObservations, "empty VaR series");
    // Align the return series to the VaR dates.
    const auto first = std::lower_bound(returns.dates.begin(), returns.dates.end(), var.front().date);
    const auto offset = static_cast<std::size_t>(first - returns.dates.begin());
    if (offset + var.size() > returns.dates.size()) {
        fail(ErrorCode::DateMisalignment, "returns do not cover the VaR dates");
    }
    ReturnSeries window{{returns.dates.begin() + static_cast<std::ptrdiff_t>(offset),
                         returns.dates.begin() + static_cast<std::ptrdiff_t>(offset + var.size())},
                        {returns.values.begin() + static_cast<std::ptrdiff_t>(offset),
                         returns.values.begin() + static_cast<std::ptrdiff_t>(offset + var.size())}};
    const auto v = violations(window, var, side, p0);
    try {
        return conditional_coverage(v);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateSeries) throw;
        const auto uc = kupiec_uc(v);
        CoverageTests t;
        t.violation_ratio = static_cast<double>(v.count()) / static_cast<double>(v.indicators.size());
        t.lr_uc = uc.statistic;
        t.p_uc = uc.p_value;
        t.lr_ind = t.p_ind = t.lr_cc = t.p_cc = kNaN;
        return t;
    }
}

std::vector<BacktestRow> backtest_grid(const ReturnSeries& returns,
                                       const std::map<ModelSpec, std::vector<VarForecast>>& var) {
    std::vector<BacktestRow> out;
    for (Side side : {Side::Long, Side::Short}) {
        std::map<ModelSpec, CoverageTests> results;
        for (const auto& [spec, series] : var) {
            try {
                results[spec] = backtest_series(returns, series, side, spec.p0);
            } catch (const Error& e) {
                throw Error(e.code(), "spec " + spec.name() + ": " + e.message());
            }
        }
        for (const auto& row : rank_models(results)) out.push_back({row.spec, side, row.tests, row.rank});
    }
    return out;
}

std::string backtest_csv(std::span<const BacktestRow> rows) {
    std::string out = "model,quantile_method,side,violation_ratio,lr_uc,p_uc,lr_ind,p_ind,lr_cc,p_cc,rank\n";
    for (const auto& r : rows) {
        std::string model(to_string(r.spec.volatility));
        if (r.spec.source == Source::Volume) model += "/V";
        const auto& t = r.tests;
        out += model + "," + std::string(to_string(r.spec.quantile)) + "," + std::string(to_string(r.side)) + "," +
               g(t.violation_ratio) + "," + g(t.lr_uc) + "," + g(t.p_uc) + "," + g(t.lr_ind) + "," + g(t.p_ind) + "," +
               g(t.lr_cc) + "," + g(t.p_cc) + "," + std::to_string(r.rank) + "\n";
    }
    return out;
}

std::string accuracy_csv(std::span<const AccuracyRow> rows) {
    std::string out = "model,mse,mae,qlike,mape\n";
    for (const auto& r : rows) {
        out += r.model + "," + g(r.scores.mse) + "," + g(r.scores.mae) + "," + g(r.scores.qlike) + "," +
               g(r.scores.mape) + "\n";
    }
    return out;
}

std::string improvement_csv(const AccuracyRow& reference, std::span<const AccuracyRow> baselines) {
    std::string out = "baseline,metric,improvement_pct\n";
    auto pct = [](double base, double ref) { return base != 0.0 ? (base - ref) / base * 100.0 : kNaN; };
    for (const auto& b : baselines) {
        out += b.model + ",mse," + g(pct(b.scores.mse, reference.scores.mse)) + "\n";
        out += b.model + ",mae," + g(pct(b.scores.mae, reference.scores.mae)) + "\n";
        out += b.model + ",qlike," + g(pct(b.scores.qlike, reference.scores.qlike)) + "\n";
        out += b.model + ",mape," + g(pct(b.scores.mape, reference.scores.mape)) + "\n";
    }
    return out;
}

}  // namespace volvar
