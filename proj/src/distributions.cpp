#include "bspm/distributions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bspm {

namespace {

void require_positive_finite(double value, char const* what) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw std::invalid_argument(std::string(what) +
                                    " must be positive and finite, got " +
                                    std::to_string(value));
    }
}

// Sequential-search inversion; adequate for small means.
std::uint64_t poisson_inversion(RandomStream& stream, double lambda) {
    double p = std::exp(-lambda);
    double cdf = p;
    double const u = stream.uniform();
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

// Hormann's transformed rejection with squeeze (PTRS), lambda >= 10.
std::uint64_t poisson_ptrs(RandomStream& stream, double lambda) {
    double const slam = std::sqrt(lambda);
    double const loglam = std::log(lambda);
    double const b = 0.931 + 2.53 * slam;
    double const a = -0.059 + 0.02483 * b;
    double const inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    double const vr = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        double const u = stream.uniform() - 0.5;
        double const v = stream.uniform();
        double const us = 0.5 - std::fabs(u);
        double const k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= vr) {
            return static_cast<std::uint64_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -lambda + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

}  // namespace

GammaParams::GammaParams(double shape, double rate) : shape_(shape), rate_(rate) {
    require_positive_finite(shape, "gamma shape");
    require_positive_finite(rate, "gamma rate");
}

NegBinParams::NegBinParams(double size, double denom) : size_(size), denom_(denom) {
    require_positive_finite(size, "negative binomial size");
    require_positive_finite(denom, "negative binomial denom");
}

double sample_normal(RandomStream& stream, double mean, double sd) {
    if (!std::isfinite(mean) || !std::isfinite(sd) || sd < 0.0) {
        throw std::invalid_argument("sample_normal: need finite mean and sd >= 0");
    }
    if (sd == 0.0) {
        return mean;
    }
    return mean + sd * stream.standard_normal();
}

std::uint64_t sample_poisson(RandomStream& stream, double lambda) {
    require_positive_finite(lambda, "poisson lambda");
    return lambda < 10.0 ? poisson_inversion(stream, lambda)
                         : poisson_ptrs(stream, lambda);
}

// Marsaglia & Tsang (2000); shape < 1 boosted through shape + 1.
double sample_gamma(RandomStream& stream, GammaParams const& params) {
    double const shape = params.shape();
    double boost = 1.0;
    double alpha = shape;
    if (shape < 1.0) {
        boost = std::pow(stream.uniform(), 1.0 / shape);
        alpha = shape + 1.0;
    }
    double const d = alpha - 1.0 / 3.0;
    double const c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = stream.standard_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double const u = stream.uniform();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
            return boost * d * v / params.rate();
        }
    }
}

double gamma_log_pdf(GammaParams const& params, double lambda) {
    require_positive_finite(lambda, "gamma_pdf argument");
    double const shape = params.shape();
    double const rate = params.rate();
    return shape * std::log(rate) - std::lgamma(shape) +
           (shape - 1.0) * std::log(lambda) - rate * lambda;
}

double gamma_pdf(GammaParams const& params, double lambda) {
    return std::exp(gamma_log_pdf(params, lambda));
}

double negbin_log_pmf(NegBinParams const& params, std::uint64_t y) {
    double const r = params.size();
    double const d = params.denom();
    double const k = static_cast<double>(y);
    // log C(r + k - 1, k) + r log(d / (d + 1)) - k log(d + 1)
    return std::lgamma(r + k) - std::lgamma(r) - std::lgamma(k + 1.0) +
           r * (std::log(d) - std::log1p(d)) - k * std::log1p(d);
}

double negbin_pmf(NegBinParams const& params, std::uint64_t y) {
    return std::exp(negbin_log_pmf(params, y));
}

}  // namespace bspm
