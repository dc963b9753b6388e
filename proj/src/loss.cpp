#include "bspm/loss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bspm {

LossFunction LossFunction::llf(double c) {
    if (!std::isfinite(c) || c == 0.0) {
        throw std::invalid_argument("Linex constant c must be finite and nonzero (use SELF for c = 0)");
    }
    return LossFunction(LossKind::llf, c);
}

std::string_view to_string(LossKind kind) {
    switch (kind) {
    case LossKind::self: return "self";
    case LossKind::plf: return "plf";
    case LossKind::llf: return "llf";
    }
    return "?";
}

LossKind parse_loss_kind(std::string_view name) {
    if (name == "self") return LossKind::self;
    if (name == "plf") return LossKind::plf;
    if (name == "llf") return LossKind::llf;
    throw std::invalid_argument("unknown loss function '" + std::string(name) + "'");
}

double bayes_mean_normal(LossFunction const& loss, NormalConjugate const& model,
                         SampleSummary const& summary) {
    double const s2 = model.sigma_sq();
    double const s02 = model.sigma0_sq();
    double const nn = static_cast<double>(summary.n());
    double const mean_self =
        (nn * summary.xbar() * s02 + s2 * model.mu0()) / (s2 + nn * s02);
    double const predictive_var = normal_variances(model, summary.n()).predictive;

    switch (loss.kind()) {
    case LossKind::self:
        return mean_self;
    case LossKind::plf:
        // sqrt(E[Y^2 | x]) under the Normal posterior predictive.
        return std::sqrt(predictive_var + mean_self * mean_self);
    case LossKind::llf:
        return mean_self - 0.5 * loss.c() * predictive_var;
    }
    throw std::logic_error("unhandled loss kind");
}

double bayes_mean_pg(LossFunction const& loss, PoissonGammaConjugate const& model,
                     SampleSummary const& summary) {
    GammaParams const post = pg_posterior(model, summary);
    double const shape = post.shape();
    double const rate = post.rate();

    switch (loss.kind()) {
    case LossKind::self:
        return shape / rate;
    case LossKind::plf:
        return std::sqrt(shape + shape * shape) / rate;
    case LossKind::llf: {
        double const c = loss.c();
        if (c <= -rate) {
            throw std::invalid_argument(
                "Linex constant c must exceed -(n + beta) for the Gamma posterior");
        }
        // -(1/c) ln (rate / (rate + c))^shape
        return shape * std::log1p(c / rate) / c;
    }
    }
    throw std::logic_error("unhandled loss kind");
}

double bayes_mean(LossFunction const& loss, ConjugateModel const& model,
                  SampleSummary const& summary) {
    if (auto const* normal = std::get_if<NormalConjugate>(&model)) {
        return bayes_mean_normal(loss, *normal, summary);
    }
    return bayes_mean_pg(loss, std::get<PoissonGammaConjugate>(model), summary);
}

HyperparamSolution solve_gamma_hyperparams(double mu0, double sigma0_sq) {
    if (!(mu0 > 0.0) || !(sigma0_sq > 0.0) || !std::isfinite(mu0) ||
        !std::isfinite(sigma0_sq)) {
        throw std::invalid_argument("prior mean and variance must be positive and finite");
    }
    double const beta = mu0 / sigma0_sq;
    return {mu0 * beta, beta};
}

}  // namespace bspm
