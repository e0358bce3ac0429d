#include "volvar/tails/tail_fit.hpp"

#include "volvar/error.hpp"
#include "volvar/numeric.hpp"

#include <string>

namespace volvar {

std::string_view to_string(QuantileMethod method) {
    switch (method) {
        case QuantileMethod::Evt: return "EVT";
        case QuantileMethod::Skst: return "SKST";
        case QuantileMethod::Historical: return "H";
    }
    return "H";
}

QuantileMethod parse_quantile_method(std::string_view name) {
    for (QuantileMethod m : kAllQuantileMethods) {
        if (to_string(m) == name) return m;
    }
    fail(ErrorCode::InvalidConfig, "unknown quantile method '" + std::string(name) + "'");
}

double TailModel::quantile(double p0) const {
    if (!(p0 > 0.0 && p0 < 1.0)) fail(ErrorCode::InvalidParameter, "p0 must lie in (0,1)");
    if (const auto* gpd = std::get_if<GpdFit>(&fit)) {
        const double q = evt_quantile(*gpd, p0);
        return tail == Tail::Left ? -q : q;
    }
    if (const auto* skst = std::get_if<SkstFit>(&fit)) {
        return skst_quantile(*skst, tail == Tail::Left ? p0 : 1.0 - p0);
    }
    return hist_quantile(std::get<EmpiricalTail>(fit), p0);
}

TailModel fit_tail(QuantileMethod method, const StandardizedReturns& returns, Tail tail) {
    TailModel model;
    model.method = method;
    model.tail = tail;
    switch (method) {
        case QuantileMethod::Evt: {
            const double u = select_threshold(returns, tail);
            const auto excess = exceedances(returns.values, u, tail);
            if (excess.size() < kMinExceedances) {
                log_warning("EVT " + std::string(to_string(tail)) + " tail has " + std::to_string(excess.size()) +
                            " exceedances; falling back to historical simulation");
                model.fit = EmpiricalTail::from_sample(returns.values, tail);
                model.fallback = true;
                break;
            }
            model.fit = fit_gpd(returns, tail);
            break;
        }
        case QuantileMethod::Skst:
            model.fit = skst_fit(returns);
            break;
        case QuantileMethod::Historical:
            model.fit = EmpiricalTail::from_sample(returns.values, tail);
            break;
    }
    return model;
}

}  // namespace volvar
