#include "bspm/conjugate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bspm {

namespace {

void check_positive(double value, char const* what) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw std::invalid_argument(std::string(what) + " must be positive and finite");
    }
}

void check_poisson_sample(SampleSummary const& summary) {
    if (summary.xbar() < 0.0) {
        throw std::invalid_argument("Poisson sample mean must be nonnegative");
    }
}

}  // namespace

NormalConjugate::NormalConjugate(double mu0, double sigma0_sq, double sigma_sq)
    : mu0_(mu0), sigma0_sq_(sigma0_sq), sigma_sq_(sigma_sq) {
    if (!std::isfinite(mu0)) {
        throw std::invalid_argument("prior mean must be finite");
    }
    check_positive(sigma0_sq, "prior variance");
    check_positive(sigma_sq, "likelihood variance");
}

PoissonGammaConjugate::PoissonGammaConjugate(double alpha, double beta)
    : alpha_(alpha), beta_(beta) {
    check_positive(alpha, "gamma prior alpha");
    check_positive(beta, "gamma prior beta");
}

SampleSummary::SampleSummary(std::size_t n, double xbar) : n_(n), xbar_(xbar) {
    if (n == 0) {
        throw std::invalid_argument("sample size must be at least 1");
    }
    if (!std::isfinite(xbar)) {
        throw std::invalid_argument("sample mean must be finite");
    }
}

VarianceTriple normal_variances(NormalConjugate const& model, std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("normal_variances: n must be at least 1");
    }
    double const s2 = model.sigma_sq();
    double const s02 = model.sigma0_sq();
    double const nn = static_cast<double>(n);
    double const posterior = s2 * s02 / (s2 + nn * s02);
    return {posterior, s2 + posterior, s2 / nn + posterior};
}

GammaParams pg_posterior(PoissonGammaConjugate const& model,
                         SampleSummary const& summary) {
    check_poisson_sample(summary);
    return {summary.total() + model.alpha(),
            static_cast<double>(summary.n()) + model.beta()};
}

NegBinParams pg_predictive(PoissonGammaConjugate const& model,
                           SampleSummary const& summary) {
    GammaParams const post = pg_posterior(model, summary);
    return {post.shape(), post.rate()};
}

VarianceTriple pg_variances(PoissonGammaConjugate const& model,
                            SampleSummary const& summary) {
    GammaParams const post = pg_posterior(model, summary);
    double const shape = post.shape();
    double const rate = post.rate();
    double const posterior = shape / (rate * rate);
    double const predictive = posterior * (rate + 1.0);
    return {posterior, predictive, predictive / static_cast<double>(summary.n())};
}

PoissonGammaConjugate exponential_prior(double rate) {
    check_positive(rate, "exponential prior rate");
    return {1.0, rate};
}

VarianceTriple variances(ConjugateModel const& model, SampleSummary const& summary) {
    if (auto const* normal = std::get_if<NormalConjugate>(&model)) {
        return normal_variances(*normal, summary.n());
    }
    return pg_variances(std::get<PoissonGammaConjugate>(model), summary);
}

}  // namespace bspm
