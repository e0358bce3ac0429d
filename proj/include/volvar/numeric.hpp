#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace volvar {

// Neumaier's variant of Kahan summation. Order-dependent, so two callers that
// feed the same values in the same order get bit-identical results.
class CompensatedSum {
public:
    void add(double value) noexcept {
        const double t = sum_ + value;
        if ((sum_ >= 0 ? sum_ : -sum_) >= (value >= 0 ? value : -value)) {
            compensation_ += (sum_ - t) + value;
        } else {
            compensation_ += (value - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

double mean(std::span<const double> values);
// Sample standard deviation (n - 1 denominator).
double sample_std(std::span<const double> values);

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    double initial_step = 0.1;
    double tolerance = 1e-10;
    int max_evaluations = 5000;
};

// Derivative-free simplex minimizer. The returned point is the best vertex
// seen, so the result is never worse than the starting point.
MinimizeResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                           std::vector<double> start, const NelderMeadOptions& options = {});

// Golden-section search for the maximum of a unimodal function on [lo, hi].
struct ScalarOptimum {
    double x = 0.0;
    double value = 0.0;
};
ScalarOptimum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                      double tolerance = 1e-8, int max_iterations = 200);

// Upper tail probability of the chi-square distribution.
double chi2_survival(double statistic, double degrees_of_freedom);

void set_quiet(bool quiet);
bool is_quiet();
void log_warning(std::string_view message);
void log_info(std::string_view message);

}  // namespace volvar
