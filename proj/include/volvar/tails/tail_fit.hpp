#pragma once

#include "volvar/tails/gpd.hpp"
#include "volvar/tails/historical.hpp"
#include "volvar/tails/skewed_t.hpp"

#include <string_view>
#include <variant>

namespace volvar {

enum class QuantileMethod { Evt, Skst, Historical };

inline constexpr QuantileMethod kAllQuantileMethods[] = {QuantileMethod::Evt, QuantileMethod::Skst,
                                                         QuantileMethod::Historical};

std::string_view to_string(QuantileMethod method);
QuantileMethod parse_quantile_method(std::string_view name);

// One fitted tail of the standardized-return distribution.
struct TailModel {
    QuantileMethod method = QuantileMethod::Historical;
    Tail tail = Tail::Left;
    std::variant<GpdFit, SkstFit, EmpiricalTail> fit;
    // Set when EVT had too few exceedances and historical simulation was used.
    bool fallback = false;

    // Signed standardized-return quantile at tail probability p0: negative
    // for the left tail in practice, positive for the right.
    double quantile(double p0) const;
};

// EVT falls back to historical simulation (with a warning) when fewer than 30
// observations exceed the threshold.
TailModel fit_tail(QuantileMethod method, const StandardizedReturns& returns, Tail tail);

}  // namespace volvar
