#pragma once

#include <cstddef>
#include <variant>

#include "bspm/distributions.hpp"

namespace bspm {

/// Normal likelihood with known variance and a Normal prior on the mean.
class NormalConjugate {
  public:
    NormalConjugate(double mu0, double sigma0_sq, double sigma_sq);

    double mu0() const { return mu0_; }
    double sigma0_sq() const { return sigma0_sq_; }
    double sigma_sq() const { return sigma_sq_; }

    friend bool operator==(NormalConjugate const&, NormalConjugate const&) = default;

  private:
    double mu0_;
    double sigma0_sq_;
    double sigma_sq_;
};

/// Poisson likelihood with a Gamma(alpha, beta) prior, beta an inverse scale.
class PoissonGammaConjugate {
  public:
    PoissonGammaConjugate(double alpha, double beta);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double prior_mean() const { return alpha_ / beta_; }

    friend bool operator==(PoissonGammaConjugate const&,
                           PoissonGammaConjugate const&) = default;

  private:
    double alpha_;
    double beta_;
};

using ConjugateModel = std::variant<NormalConjugate, PoissonGammaConjugate>;

/// Subgroup size and mean of the observed sample.
class SampleSummary {
  public:
    SampleSummary(std::size_t n, double xbar);

    std::size_t n() const { return n_; }
    double xbar() const { return xbar_; }
    double total() const { return static_cast<double>(n_) * xbar_; }

    friend bool operator==(SampleSummary const&, SampleSummary const&) = default;

  private:
    std::size_t n_;
    double xbar_;
};

/*!
 * Variances of the posterior, the posterior predictive, and the Bayes
 * estimator of the posterior predictive (the "ybar" law the charts use).
 */
struct VarianceTriple {
    double posterior;
    double predictive;
    double ybar;
};

VarianceTriple normal_variances(NormalConjugate const& model, std::size_t n);

GammaParams pg_posterior(PoissonGammaConjugate const& model,
                         SampleSummary const& summary);
NegBinParams pg_predictive(PoissonGammaConjugate const& model,
                           SampleSummary const& summary);
VarianceTriple pg_variances(PoissonGammaConjugate const& model,
                            SampleSummary const& summary);

/// Exponential(rate) prior expressed as Gamma(1, rate).
PoissonGammaConjugate exponential_prior(double rate);

/// Family-dispatching variance triple; `summary.xbar()` is ignored for Normal.
VarianceTriple variances(ConjugateModel const& model, SampleSummary const& summary);

}  // namespace bspm
