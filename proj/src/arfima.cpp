#include "volvar/arfima.hpp"

#include "volvar/error.hpp"
#include "volvar/numeric.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace volvar {

std::vector<double> frac_diff_weights(double d, std::size_t count) {
    if (!std::isfinite(d)) fail(ErrorCode::InvalidParameter, "fractional order must be finite");
    std::vector<double> w(count);
    if (count == 0) return w;
    w[0] = 1.0;
    for (std::size_t k = 1; k < count; ++k) {
        const double kd = static_cast<double>(k);
        w[k] = w[k - 1] * (kd - 1.0 - d) / kd;
    }
    return w;
}

std::vector<double> frac_diff(std::span<const double> series, double d, std::size_t truncation) {
    if (truncation > series.size()) {
        fail(ErrorCode::InvalidParameter, "truncation exceeds series length");
    }
    const auto w = frac_diff_weights(d, truncation + 1);
    std::vector<double> y(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) {
        const std::size_t kmax = std::min(t, truncation);
        double acc = 0.0;
        for (std::size_t k = 0; k <= kmax; ++k) acc += w[k] * series[t - k];
        y[t] = acc;
    }
    return y;
}

bool roots_outside_unit_circle(std::span<const double> c) {
    const auto k = static_cast<Eigen::Index>(c.size());
    if (k == 0) return true;
    // Roots of 1 - sum c_i z^i outside |z| = 1 <=> eigenvalues of the companion
    // matrix of z^k - c_1 z^{k-1} - ... - c_k inside it.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) companion(0, i) = c[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
    const Eigen::VectorXcd eig = companion.eigenvalues();
    for (Eigen::Index i = 0; i < k; ++i) {
        if (std::abs(eig(i)) >= 1.0 - 1e-8) return false;
    }
    return true;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ArmaSolution {
    double intercept = 0.0;
    std::vector<double> ar, ma;
    double sse = kInf;
};

// Residual recursion shared by fitting and forecasting. Residuals before
// `start` are taken as zero.
double arma_sse(std::span<const double> y, std::size_t start, double c, std::span<const double> ar,
                std::span<const double> ma, std::vector<double>* residuals = nullptr) {
    std::vector<double> e(y.size(), 0.0);
    double sse = 0.0;
    for (std::size_t t = start; t < y.size(); ++t) {
        double pred = c;
        for (std::size_t i = 0; i < ar.size(); ++i) pred += ar[i] * y[t - 1 - i];
        for (std::size_t j = 0; j < ma.size(); ++j) pred += ma[j] * e[t - 1 - j];
        e[t] = y[t] - pred;
        sse += e[t] * e[t];
        if (!std::isfinite(sse)) return kInf;
    }
    if (residuals) *residuals = std::move(e);
    return sse;
}

ArmaSolution fit_arma_css(std::span<const double> y, std::size_t start, int p, int q) {
    const std::size_t rows = y.size() - start;
    ArmaSolution sol;

    // AR part by OLS gives the exact CSS optimum when q == 0 and a start otherwise.
    Eigen::MatrixXd X(rows, p + 1);
    Eigen::VectorXd target(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = start + r;
        X(static_cast<Eigen::Index>(r), 0) = 1.0;
        for (int i = 0; i < p; ++i) X(static_cast<Eigen::Index>(r), i + 1) = y[t - 1 - static_cast<std::size_t>(i)];
        target(static_cast<Eigen::Index>(r)) = y[t];
    }
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(target);
    sol.intercept = beta(0);
    sol.ar.assign(beta.data() + 1, beta.data() + 1 + p);
    sol.ma.assign(static_cast<std::size_t>(q), 0.0);
    if (!roots_outside_unit_circle(sol.ar)) {
        std::fill(sol.ar.begin(), sol.ar.end(), 0.0);
    }
    sol.sse = arma_sse(y, start, sol.intercept, sol.ar, sol.ma);
    if (q == 0 && roots_outside_unit_circle(sol.ar)) return sol;

    auto objective = [&](std::span<const double> x) {
        const std::span<const double> ar = x.subspan(1, static_cast<std::size_t>(p));
        const std::span<const double> ma = x.subspan(1 + static_cast<std::size_t>(p), static_cast<std::size_t>(q));
        std::vector<double> neg_ma(ma.begin(), ma.end());
        for (double& v : neg_ma) v = -v;
        if (!roots_outside_unit_circle(ar) || !roots_outside_unit_circle(neg_ma)) return kInf;
        return arma_sse(y, start, x[0], ar, ma);
    };
    std::vector<double> x0{sol.intercept};
    x0.insert(x0.end(), sol.ar.begin(), sol.ar.end());
    x0.insert(x0.end(), sol.ma.begin(), sol.ma.end());
    NelderMeadOptions opts;
    opts.initial_step = 0.05;
    opts.tolerance = 1e-10;
    opts.max_evaluations = 400 * static_cast<int>(x0.size());
    const auto res = nelder_mead(objective, x0, opts);
    if (res.value < sol.sse) {
        sol.intercept = res.x[0];
        sol.ar.assign(res.x.begin() + 1, res.x.begin() + 1 + p);
        sol.ma.assign(res.x.begin() + 1 + p, res.x.end());
        sol.sse = res.value;
    }
    return sol;
}

}  // namespace

ArfimaFit arfima_fit(std::span<const double> log_rv, const ArfimaOptions& options) {
    const std::size_t n = log_rv.size();
    if (n < 200) fail(ErrorCode::TooFewObservations, "ARFIMA fit needs at least 200 observations");
    if (options.max_p < 0 || options.max_q < 0 || options.truncation < 1) {
        fail(ErrorCode::InvalidParameter, "ARFIMA orders must be >= 0 and truncation >= 1");
    }
    for (double v : log_rv) {
        if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "ARFIMA input contains non-finite values");
    }

    const double mu = mean(log_rv);
    std::vector<double> z(log_rv.begin(), log_rv.end());
    for (double& v : z) v -= mu;
    const std::size_t truncation = std::min(options.truncation, n - 1);
    const std::size_t start = static_cast<std::size_t>(std::max(options.max_p, options.max_q));
    const double n_eff = static_cast<double>(n - start);

    ArfimaFit fit;
    fit.best.aic = kInf;
    for (int step = 0; step <= 9; ++step) {
        const double d = 0.05 * step;
        const auto y = frac_diff(z, d, truncation);
        for (int p = 0; p <= options.max_p; ++p) {
            for (int q = 0; q <= options.max_q; ++q) {
                const auto sol = fit_arma_css(y, start, p, q);
                if (!std::isfinite(sol.sse) || !(sol.sse > 0.0)) continue;
                const double sigma2 = sol.sse / n_eff;
                // Parameters: intercept, d, AR and MA terms (sigma2 is common to all).
                const double aic = n_eff * std::log(sigma2) + 2.0 * static_cast<double>(p + q + 2);
                fit.grid.push_back({d, p, q, aic});
                if (aic < fit.best.aic) {
                    fit.best.d = d;
                    fit.best.ar = sol.ar;
                    fit.best.ma = sol.ma;
                    fit.best.intercept = sol.intercept;
                    fit.best.mean = mu;
                    fit.best.sigma2 = sigma2;
                    fit.best.aic = aic;
                    fit.best.truncation = truncation;
                }
            }
        }
    }
    if (!std::isfinite(fit.best.aic)) fail(ErrorCode::NoFiniteLikelihood, "no ARFIMA grid point had a finite likelihood");
    return fit;
}

double arfima_forecast(const ArfimaParams& params, std::span<const double> history) {
    const std::size_t n = history.size();
    const std::size_t p = params.ar.size(), q = params.ma.size();
    if (n < std::max(p, q) + 1) fail(ErrorCode::WindowTooShort, "ARFIMA forecast history too short");

    std::vector<double> z(history.begin(), history.end());
    for (double& v : z) v -= params.mean;
    const std::size_t truncation = std::min(params.truncation, n);
    const auto y = frac_diff(z, params.d, std::min(truncation, n - 1));

    std::vector<double> e;
    arma_sse(y, std::max(p, q), params.intercept, params.ar, params.ma, &e);
    double y_next = params.intercept;
    for (std::size_t i = 0; i < p; ++i) y_next += params.ar[i] * y[n - 1 - i];
    for (std::size_t j = 0; j < q; ++j) y_next += params.ma[j] * e[n - 1 - j];

    // Undo the differencing: y_n = z_n + sum_{k>=1} w_k z_{n-k}.
    const auto w = frac_diff_weights(params.d, truncation + 1);
    double lagged = 0.0;
    for (std::size_t k = 1; k <= truncation; ++k) lagged += w[k] * z[n - k];
    return params.mean + (y_next - lagged);
}

}  // namespace volvar
