#pragma once

#include <cstdint>

#include "bspm/random.hpp"

namespace bspm {

/// Gamma law in shape/rate form: f(x) = rate^shape / Gamma(shape) x^(shape-1) e^(-rate x).
class GammaParams {
  public:
    GammaParams(double shape, double rate);

    double shape() const { return shape_; }
    double rate() const { return rate_; }
    double mean() const { return shape_ / rate_; }
    double variance() const { return shape_ / (rate_ * rate_); }

    friend bool operator==(GammaParams const&, GammaParams const&) = default;

  private:
    double shape_;
    double rate_;
};

/*!
 * Negative Binomial law arising as a Gamma(size, denom) mixture of Poissons.
 *
 * The number of failures before the size-th success with success
 * probability p = denom / (denom + 1). The size is real-valued, so the
 * binomial coefficient is the Gamma-function generalization.
 */
class NegBinParams {
  public:
    NegBinParams(double size, double denom);

    double size() const { return size_; }
    double denom() const { return denom_; }
    double success_probability() const { return denom_ / (denom_ + 1.0); }
    double mean() const { return size_ / denom_; }
    double variance() const { return size_ * (denom_ + 1.0) / (denom_ * denom_); }

    friend bool operator==(NegBinParams const&, NegBinParams const&) = default;

  private:
    double size_;
    double denom_;
};

double sample_normal(RandomStream& stream, double mean, double sd);
std::uint64_t sample_poisson(RandomStream& stream, double lambda);
double sample_gamma(RandomStream& stream, GammaParams const& params);

double gamma_log_pdf(GammaParams const& params, double lambda);
double gamma_pdf(GammaParams const& params, double lambda);

double negbin_log_pmf(NegBinParams const& params, std::uint64_t y);
double negbin_pmf(NegBinParams const& params, std::uint64_t y);

}  // namespace bspm
