#pragma once

#include <string>
#include <string_view>

#include "bspm/conjugate.hpp"

namespace bspm {

enum class LossKind { self, plf, llf };

/*!
 * Loss function selecting the Bayes estimator of the process mean.
 *
 * SELF gives the posterior mean, PLF the square root of the second moment,
 * and LLF (Linex) gives -(1/c) ln E[exp(-c theta)]. Positive c penalizes
 * overestimation more heavily.
 */
class LossFunction {
  public:
    static constexpr double kDefaultLinexC = 1.0;

    static LossFunction self() { return LossFunction(LossKind::self, 0.0); }
    static LossFunction plf() { return LossFunction(LossKind::plf, 0.0); }
    static LossFunction llf(double c = kDefaultLinexC);

    LossKind kind() const { return kind_; }
    //! Linex asymmetry constant; zero for the other kinds.
    double c() const { return c_; }

    friend bool operator==(LossFunction const&, LossFunction const&) = default;

  private:
    LossFunction(LossKind kind, double c) : kind_(kind), c_(c) {}

    LossKind kind_;
    double c_;
};

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view name);

double bayes_mean_normal(LossFunction const& loss, NormalConjugate const& model,
                         SampleSummary const& summary);
double bayes_mean_pg(LossFunction const& loss, PoissonGammaConjugate const& model,
                     SampleSummary const& summary);
double bayes_mean(LossFunction const& loss, ConjugateModel const& model,
                  SampleSummary const& summary);

struct HyperparamSolution {
    double alpha;
    double beta;
};

/// Gamma prior (alpha, beta) with mean mu0 and variance sigma0_sq.
HyperparamSolution solve_gamma_hyperparams(double mu0, double sigma0_sq);

}  // namespace bspm
