#include "volvar/tails/historical.hpp"

#include "volvar/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace volvar {

EmpiricalTail EmpiricalTail::from_sample(std::span<const double> sample, Tail tail) {
    if (sample.empty()) fail(ErrorCode::TooFewObservations, "empirical tail needs a non-empty sample");
    EmpiricalTail out{{sample.begin(), sample.end()}, tail};
    std::sort(out.sorted.begin(), out.sorted.end());
    return out;
}

double type7_quantile(std::span<const double> sorted, double prob) {
    if (sorted.empty()) fail(ErrorCode::TooFewObservations, "quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) fail(ErrorCode::InvalidParameter, "probability must lie in [0,1]");
    const double h = static_cast<double>(sorted.size() - 1) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double hist_quantile(const EmpiricalTail& tail, double p) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidParameter, "p must lie in (0,1)");
    if (tail.sorted.empty()) fail(ErrorCode::TooFewObservations, "empty empirical tail");
    if (static_cast<double>(tail.sorted.size()) * p < 1.0 - 1e-9) {
        fail(ErrorCode::TooFewObservations, "historical quantile at p=" + std::to_string(p) + " needs at least 1/p = " +
                                                std::to_string(1.0 / p) + " observations, got " +
                                                std::to_string(tail.sorted.size()));
    }
    return type7_quantile(tail.sorted, tail.tail == Tail::Left ? p : 1.0 - p);
}

}  // namespace volvar
