#pragma once

#include "volvar/marketdata.hpp"
#include "volvar/var.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace volvar {

struct ViolationSeries {
    std::vector<Date> dates;
    std::vector<int> indicators;
    Side side = Side::Long;
    double p0 = 0.01;

    std::size_t count() const;
};

struct CoverageTests {
    double violation_ratio = 0.0;
    double lr_uc = 0.0;
    double p_uc = 1.0;
    double lr_ind = 0.0;
    double p_ind = 1.0;
    double lr_cc = 0.0;
    double p_cc = 1.0;
};

struct AccuracyScores {
    double mse = 0.0;
    double mae = 0.0;
    double qlike = 0.0;
    double mape = 0.0;
};

struct LrTest {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Long: I_t = 1 iff R_t < -VaR_t. Short: I_t = 1 iff R_t > VaR_t. Dates must
// match one-to-one.
ViolationSeries violations(const ReturnSeries& returns, std::span<const VarForecast> var, Side side, double p0);

// Kupiec likelihood ratio against the nominal rate p0; needs n >= 250.
LrTest kupiec_uc(const ViolationSeries& v);
// Closed form used by kupiec_uc, exposed for tabulation.
double kupiec_statistic(std::size_t n, std::size_t x, double p0);

struct TransitionCounts {
    std::size_t n00 = 0, n01 = 0, n10 = 0, n11 = 0;
};
TransitionCounts transition_counts(std::span<const int> indicators);

// First-order Markov independence test; degenerate series (all 0 or all 1)
// raise DegenerateSeries.
LrTest christoffersen_ind(const ViolationSeries& v);
LrTest christoffersen_ind(std::span<const int> indicators);

// lr_cc = lr_uc + lr_ind, referred to chi-square(2).
CoverageTests conditional_coverage(const ViolationSeries& v);

AccuracyScores accuracy_scores(std::span<const double> actual, std::span<const double> forecast);

struct RankedRow {
    ModelSpec spec;
    CoverageTests tests;
    double statistic = 0.0;
    int rank = 0;
};

// Ascending by lr_cc (NaN last), ties by |violation_ratio - p0|, then name.
std::vector<RankedRow> rank_models(const std::map<ModelSpec, CoverageTests>& results);

// Close-to-close returns in the panel (first day skipped).
ReturnSeries panel_returns(const DailyPanel& panel);

// Coverage tests for one spec and side. When the independence test is
// undefined (no violations, or nothing but violations) its fields and lr_cc
// are reported as NaN.
CoverageTests backtest_series(const ReturnSeries& returns, std::span<const VarForecast> var, Side side, double p0);

struct BacktestRow {
    ModelSpec spec;
    Side side = Side::Long;
    CoverageTests tests;
    int rank = 0;
};

std::vector<BacktestRow> backtest_grid(const ReturnSeries& returns,
                                       const std::map<ModelSpec, std::vector<VarForecast>>& var);

// model,quantile_method,side,violation_ratio,lr_uc,p_uc,lr_ind,p_ind,lr_cc,p_cc,rank
std::string backtest_csv(std::span<const BacktestRow> rows);

struct AccuracyRow {
    std::string model;
    AccuracyScores scores;
};
// model,mse,mae,qlike,mape
std::string accuracy_csv(std::span<const AccuracyRow> rows);

// baseline,metric,improvement_pct with (baseline - reference) / baseline * 100.
std::string improvement_csv(const AccuracyRow& reference, std::span<const AccuracyRow> baselines);

}  // namespace volvar
