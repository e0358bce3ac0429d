#pragma once

#include "volvar/tails/gpd.hpp"

#include <span>
#include <vector>

namespace volvar {

struct EmpiricalTail {
    std::vector<double> sorted;  // ascending
    Tail tail = Tail::Left;

    static EmpiricalTail from_sample(std::span<const double> sample, Tail tail);
};

// Linear interpolation between order statistics (Hyndman-Fan type 7).
double type7_quantile(std::span<const double> sorted, double prob);

// Signed quantile of the sample: Q(p) for the left tail, Q(1 - p) for the
// right tail. Needs n * p >= 1.
double hist_quantile(const EmpiricalTail& tail, double p);

}  // namespace volvar
