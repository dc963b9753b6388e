#include "bspm/charts.hpp"

#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace bspm {

namespace {

void check_scale(double sigma_ybar) {
    if (!std::isfinite(sigma_ybar) || sigma_ybar <= 0.0) {
        throw std::invalid_argument("chart scale sigma_ybar must be positive and finite");
    }
}

void check_center(double center) {
    if (!std::isfinite(center)) {
        throw std::invalid_argument("chart center must be finite");
    }
}

// Strict inequality: a statistic sitting exactly on a limit is in control.
bool outside(Limits const& limits, double statistic) {
    return statistic > limits.ucl || statistic < limits.lcl;
}

void check_not_signaled(ChartState const& state) {
    if (state.signaled) {
        throw std::logic_error("chart has already signaled; start a new run");
    }
}

}  // namespace

EwmaSpec::EwmaSpec(double tau, double L, double center, double sigma_ybar)
    : tau_(tau), L_(L), center_(center), sigma_ybar_(sigma_ybar) {
    if (!(tau > 0.0 && tau <= 1.0)) {
        throw std::invalid_argument("EWMA tau must lie in (0, 1]");
    }
    if (!std::isfinite(L) || L <= 0.0) {
        throw std::invalid_argument("EWMA L must be positive and finite");
    }
    check_center(center);
    check_scale(sigma_ybar);
    half_width_ = L * sigma_ybar * std::sqrt(tau / (2.0 - tau));
}

CusumSpec::CusumSpec(double h, double center, double sigma_ybar)
    : h_(h), center_(center), sigma_ybar_(sigma_ybar) {
    if (!(h > 0.0) || std::isnan(h)) {
        throw std::invalid_argument("CUSUM h must be positive");
    }
    check_center(center);
    check_scale(sigma_ybar);
}

Limits ewma_limits(EwmaSpec const& spec) {
    return {spec.center() - spec.half_width(), spec.center(),
            spec.center() + spec.half_width()};
}

ChartState ewma_start(EwmaSpec const& spec) {
    return {spec.center(), 0, false};
}

ChartState ewma_step(EwmaSpec const& spec, ChartState const& state,
                     double ybar_estimate) {
    check_not_signaled(state);
    double const tau = spec.tau();
    double const z = tau * ybar_estimate + (1.0 - tau) * state.statistic;
    return {z, state.step + 1, outside(ewma_limits(spec), z)};
}

Limits cusum_limits(CusumSpec const& spec) {
    double const half = spec.h() * spec.sigma_ybar();
    return {-half, spec.center(), half};
}

ChartState cusum_start(CusumSpec const&) {
    return {0.0, 0, false};
}

ChartState cusum_step(CusumSpec const& spec, ChartState const& state,
                      double ybar_estimate) {
    check_not_signaled(state);
    double const c = (ybar_estimate - spec.center()) + state.statistic;
    return {c, state.step + 1, outside(cusum_limits(spec), c)};
}

ChartSpec make_chart(ChartDesign const& design, double center, double sigma_ybar) {
    if (auto const* ewma = std::get_if<EwmaDesign>(&design)) {
        return EwmaSpec(ewma->tau, ewma->L, center, sigma_ybar);
    }
    return CusumSpec(std::get<CusumDesign>(design).h, center, sigma_ybar);
}

Limits chart_limits(ChartSpec const& spec) {
    return std::visit(
        [](auto const& s) {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, EwmaSpec>) {
                return ewma_limits(s);
            } else {
                return cusum_limits(s);
            }
        },
        spec);
}

ChartState chart_start(ChartSpec const& spec) {
    if (auto const* ewma = std::get_if<EwmaSpec>(&spec)) {
        return ewma_start(*ewma);
    }
    return cusum_start(std::get<CusumSpec>(spec));
}

ChartState chart_step(ChartSpec const& spec, ChartState const& state,
                      double ybar_estimate) {
    if (auto const* ewma = std::get_if<EwmaSpec>(&spec)) {
        return ewma_step(*ewma, state, ybar_estimate);
    }
    return cusum_step(std::get<CusumSpec>(spec), state, ybar_estimate);
}

double design_constant(ChartDesign const& design) {
    if (auto const* ewma = std::get_if<EwmaDesign>(&design)) {
        return ewma->L;
    }
    return std::get<CusumDesign>(design).h;
}

ChartDesign with_constant(ChartDesign design, double constant) {
    if (auto* ewma = std::get_if<EwmaDesign>(&design)) {
        ewma->L = constant;
    } else {
        std::get<CusumDesign>(design).h = constant;
    }
    return design;
}

}  // namespace bspm
