#include "volvar/numeric.hpp"

#include "volvar/error.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

namespace volvar {

double mean(std::span<const double> values) {
    if (values.empty()) fail(ErrorCode::TooFewObservations, "mean of empty series");
    CompensatedSum sum;
    for (double v : values) sum.add(v);
    return sum.value() / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
    if (values.size() < 2) fail(ErrorCode::TooFewObservations, "std needs at least 2 observations");
    const double m = mean(values);
    CompensatedSum ss;
    for (double v : values) ss.add((v - m) * (v - m));
    return std::sqrt(ss.value() / static_cast<double>(values.size() - 1));
}

MinimizeResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                           std::vector<double> start, const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    auto eval = [&](const std::vector<double>& x, int& count) {
        ++count;
        const double v = objective(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    MinimizeResult result;
    if (n == 0) {
        result.value = eval(start, result.evaluations);
        result.x = std::move(start);
        result.converged = true;
        return result;
    }

    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double step = start[i] != 0.0 ? options.initial_step * std::max(1.0, std::abs(start[i]))
                                            : options.initial_step;
        simplex[i + 1][i] += step;
    }
    int count = 0;
    for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i], count);

    constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    while (count < options.max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        if (std::isfinite(values[worst]) &&
            std::abs(values[worst] - values[best]) <=
                options.tolerance * (std::abs(values[best]) + options.tolerance)) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
        }
        for (std::size_t j = 0; j < n; ++j) trial[j] = centroid[j] + alpha * (centroid[j] - simplex[worst][j]);
        const double f_reflect = eval(trial, count);

        if (f_reflect < values[best]) {
            for (std::size_t j = 0; j < n; ++j) trial2[j] = centroid[j] + gamma * (trial[j] - centroid[j]);
            const double f_expand = eval(trial2, count);
            if (f_expand < f_reflect) {
                simplex[worst] = trial2;
                values[worst] = f_expand;
            } else {
                simplex[worst] = trial;
                values[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < values[second]) {
            simplex[worst] = trial;
            values[worst] = f_reflect;
            continue;
        }
        const bool outside = f_reflect < values[worst];
        for (std::size_t j = 0; j < n; ++j) {
            trial2[j] = outside ? centroid[j] + rho * (trial[j] - centroid[j])
                                : centroid[j] + rho * (simplex[worst][j] - centroid[j]);
        }
        const double f_contract = eval(trial2, count);
        if (f_contract < std::min(f_reflect, values[worst])) {
            simplex[worst] = trial2;
            values[worst] = f_contract;
            continue;
        }
        // shrink toward best
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j)
                simplex[i][j] = simplex[best][j] + sigma * (simplex[i][j] - simplex[best][j]);
            values[i] = eval(simplex[i], count);
        }
    }

    const auto best_it = std::min_element(values.begin(), values.end());
    const auto best_idx = static_cast<std::size_t>(best_it - values.begin());
    result.x = simplex[best_idx];
    result.value = *best_it;
    result.evaluations = count;
    return result;
}

ScalarOptimum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                      double tolerance, int max_iterations) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iterations && (b - a) > tolerance; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? ScalarOptimum{c, fc} : ScalarOptimum{d, fd};
}

double chi2_survival(double statistic, double degrees_of_freedom) {
    if (!(degrees_of_freedom > 0.0)) fail(ErrorCode::InvalidParameter, "chi-square dof must be positive");
    if (std::isnan(statistic)) return std::numeric_limits<double>::quiet_NaN();
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(degrees_of_freedom / 2.0, statistic / 2.0);
}

namespace {
std::atomic<bool> g_quiet{false};
}

void set_quiet(bool quiet) { g_quiet.store(quiet); }
bool is_quiet() { return g_quiet.load(); }

void log_warning(std::string_view message) {
    if (!is_quiet()) std::cerr << "warning: " << message << '\n';
}

void log_info(std::string_view message) {
    if (!is_quiet()) std::cerr << message << '\n';
}

}  // namespace volvar
