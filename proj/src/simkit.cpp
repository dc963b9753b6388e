#include "bspm/simkit.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "bspm/distributions.hpp"

namespace bspm {

namespace {

constexpr double kGridSlack = 1e-9;
constexpr double kMinBracketWidth = 1e-3;
constexpr int kMaxBracketDoublings = 5;

// Runs body(i) for i in [0, count) on `workers` threads. Each index is
// written by exactly one call, so results do not depend on scheduling.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body const& body) {
    workers = static_cast<unsigned>(
        std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(count, 1)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }

    constexpr std::size_t kChunk = 64;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        try {
            for (;;) {
                std::size_t const begin = next.fetch_add(kChunk);
                if (begin >= count) {
                    return;
                }
                std::size_t const end = std::min(count, begin + kChunk);
                for (std::size_t i = begin; i < end; ++i) {
                    body(i);
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next.store(count);
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& thread : pool) {
        thread.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

struct MeanSd {
    double mean;
    double sd;
};

// Two-pass, in index order; sample sd with the m - 1 denominator.
MeanSd mean_sd(std::vector<double> const& values) {
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    double const mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

bool is_normal(ConjugateModel const& model) {
    return std::holds_alternative<NormalConjugate>(model);
}

// One plotted point: the subgroup and the value fed to the chart.
struct PlottedPoint {
    double subgroup_mean;
    double value;
};

class PointGenerator {
  public:
    PointGenerator(ExperimentConfig const& config, MonitoringDesign const& design,
                   double shift)
        : config_(config),
          design_(design),
          shifted_mean_(shift_mean(config.process, shift)),
          offset_(shifted_mean_ - config.process.in_control_mean()) {
        if (config.scheme == Scheme::predictive && !is_normal(config.model)) {
            auto const& pg = std::get<PoissonGammaConjugate>(config.model);
            posterior_.emplace(pg_posterior(
                pg, SampleSummary(config.n, config.process.in_control_mean())));
        }
    }

    PlottedPoint next(RandomStream& stream) const {
        double const mean = subgroup_mean(stream);
        if (config_.scheme == Scheme::predictive) {
            return {mean, mean};
        }
        return {mean, bayes_mean(config_.loss, config_.model,
                                 SampleSummary(config_.n, mean))};
    }

  private:
    double subgroup_mean(RandomStream& stream) const {
        std::size_t const n = config_.n;
        double sum = 0.0;
        bool const normal = is_normal(config_.model);
        if (config_.scheme == Scheme::estimator) {
            if (normal) {
                double const sd = config_.process.process_sd();
                for (std::size_t j = 0; j < n; ++j) {
                    sum += sample_normal(stream, shifted_mean_, sd);
                }
            } else {
                for (std::size_t j = 0; j < n; ++j) {
                    sum += static_cast<double>(sample_poisson(stream, shifted_mean_));
                }
            }
        } else if (normal) {
            double const location = design_.center + offset_;
            double const sd = std::sqrt(design_.variances.predictive);
            for (std::size_t j = 0; j < n; ++j) {
                sum += sample_normal(stream, location, sd);
            }
        } else {
            for (std::size_t j = 0; j < n; ++j) {
                double const rate = sample_gamma(stream, *posterior_) + offset_;
                sum += static_cast<double>(sample_poisson(stream, rate));
            }
        }
        return sum / static_cast<double>(n);
    }

    ExperimentConfig const& config_;
    MonitoringDesign const& design_;
    double shifted_mean_;
    double offset_;
    std::optional<GammaParams> posterior_;
};

double reported_run_length(ExperimentConfig const& config, RunOutcome const& outcome) {
    if (outcome.censored || config.count == RunLengthCount::signal) {
        return static_cast<double>(outcome.steps);
    }
    return static_cast<double>(outcome.steps - 1);
}

}  // namespace

//---------------------------------------------------------------------------//

ProcessSpec ProcessSpec::normal(double mean, double sd) {
    if (!std::isfinite(mean)) {
        throw std::invalid_argument("process mean must be finite");
    }
    if (!std::isfinite(sd) || sd <= 0.0) {
        throw std::invalid_argument("process sd must be positive and finite");
    }
    return ProcessSpec(Family::normal, mean, sd);
}

ProcessSpec ProcessSpec::poisson(double lambda) {
    if (!std::isfinite(lambda) || lambda <= 0.0) {
        throw std::invalid_argument("Poisson lambda must be positive and finite");
    }
    return ProcessSpec(Family::poisson, lambda, std::sqrt(lambda));
}

double shift_mean(ProcessSpec const& process, double delta) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("shift delta must be finite and nonnegative");
    }
    return process.in_control_mean() + delta * process.process_sd();
}

ShiftGrid::ShiftGrid(double start, double stop, double step)
    : start_(start), stop_(stop), step_(step) {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
        throw std::invalid_argument("shift grid bounds must be finite");
    }
    if (step <= 0.0) {
        throw std::invalid_argument("shift grid step must be positive");
    }
    if (start > stop) {
        throw std::invalid_argument("shift grid start must not exceed stop");
    }
}

std::vector<double> ShiftGrid::values() const {
    std::vector<double> grid;
    for (std::size_t k = 0;; ++k) {
        double const value = start_ + static_cast<double>(k) * step_;
        if (value > stop_ + kGridSlack) {
            break;
        }
        grid.push_back(std::abs(value - stop_) <= kGridSlack ? stop_ : value);
    }
    return grid;
}

void validate(ExperimentConfig const& config) {
    if (config.n == 0) {
        throw std::invalid_argument("subgroup size n must be at least 1");
    }
    if (config.m == 0) {
        throw std::invalid_argument("iteration count m must be at least 1");
    }
    if (config.max_steps == 0) {
        throw std::invalid_argument("max_steps must be at least 1");
    }
    bool const normal_model = is_normal(config.model);
    bool const normal_process = config.process.family() == Family::normal;
    if (normal_model != normal_process) {
        throw std::invalid_argument(
            "process family and conjugate model family must agree");
    }
    if (!config.shifts.values().empty() && config.shifts.start() < 0.0) {
        throw std::invalid_argument("shifts must be nonnegative");
    }
    // Design point must be evaluable (catches Linex c <= -(n + beta)).
    design_monitoring(config);
}

MonitoringDesign design_monitoring(ExperimentConfig const& config) {
    SampleSummary const design_point(config.n, config.process.in_control_mean());
    double const center = bayes_mean(config.loss, config.model, design_point);
    VarianceTriple const triple = variances(config.model, design_point);
    double const scale = std::sqrt(config.scheme == Scheme::predictive
                                       ? triple.predictive
                                       : triple.ybar);
    return {center, scale, triple, make_chart(config.chart, center, scale)};
}

RunOutcome run_length_once(ExperimentConfig const& config, double shift,
                           RandomStream& stream) {
    validate(config);
    return run_length_once(config, design_monitoring(config), shift, stream);
}

RunOutcome run_length_once(ExperimentConfig const& config,
                           MonitoringDesign const& design, double shift,
                           RandomStream& stream, SubgroupObserver const& observer) {
    using Clock = std::chrono::steady_clock;
    Clock::time_point const started =
        config.measure_time ? Clock::now() : Clock::time_point{};

    PointGenerator const generator(config, design, shift);
    ChartState state = chart_start(design.chart);
    while (!state.signaled && state.step < config.max_steps) {
        PlottedPoint const point = generator.next(stream);
        if (observer) {
            observer(SampleSummary(config.n, point.subgroup_mean), point.value);
        }
        state = chart_step(design.chart, state, point.value);
    }

    double elapsed = 0.0;
    if (config.measure_time) {
        elapsed = std::chrono::duration<double>(Clock::now() - started).count();
    }
    return {state.step, elapsed, !state.signaled};
}

RunLengthSummary simulate_shift(ExperimentConfig const& config, double shift) {
    MonitoringDesign const design = design_monitoring(config);
    std::vector<double> lengths(config.m);
    std::vector<double> times(config.m);
    std::vector<unsigned char> censored(config.m);

    parallel_for(config.m, resolve_worker_count(config.threads), [&](std::size_t i) {
        RandomStream stream(config.seed, i);
        RunOutcome const outcome = run_length_once(config, design, shift, stream);
        lengths[i] = reported_run_length(config, outcome);
        times[i] = outcome.elapsed;
        censored[i] = outcome.censored ? 1 : 0;
    });

    MeanSd const rl = mean_sd(lengths);
    MeanSd const ts = mean_sd(times);
    std::size_t const n_censored =
        static_cast<std::size_t>(std::count(censored.begin(), censored.end(), 1));
    return {shift, rl.mean, rl.sd, ts.mean, ts.sd, n_censored};
}

std::vector<RunLengthSummary> simulate(ExperimentConfig const& config) {
    validate(config);
    std::vector<RunLengthSummary> out;
    for (double shift : config.shifts.values()) {
        out.push_back(simulate_shift(config, shift));
    }
    return out;
}

CalibrationResult calibrate(ExperimentConfig const& config, double target_arl0,
                            double tolerance, CalibrationBracket bracket) {
    if (!(target_arl0 > 1.0) || !std::isfinite(target_arl0)) {
        throw std::invalid_argument("target ARL0 must exceed 1");
    }
    if (!(tolerance > 0.0)) {
        throw std::invalid_argument("calibration tolerance must be positive");
    }
    if (!(bracket.low > 0.0) || !(bracket.high > bracket.low) ||
        !std::isfinite(bracket.high)) {
        throw std::invalid_argument("calibration bracket must satisfy 0 < low < high");
    }

    ExperimentConfig trial = config;
    std::size_t evaluations = 0;
    auto arl0_at = [&](double constant) {
        trial.chart = with_constant(config.chart, constant);
        validate(trial);
        ++evaluations;
        return simulate_shift(trial, 0.0).arl;
    };
    auto done = [&](double constant, double achieved, double lo, double hi) {
        return CalibrationResult{constant, achieved, evaluations, {lo, hi}};
    };

    double lo = bracket.low;
    double hi = bracket.high;

    double const arl_lo = arl0_at(lo);
    if (std::abs(arl_lo - target_arl0) <= tolerance) {
        return done(lo, arl_lo, lo, hi);
    }
    if (arl_lo > target_arl0) {
        throw CalibrationError("calibration bracket low end already exceeds the target ARL0 (" +
                               std::to_string(arl_lo) + ")");
    }

    double arl_hi = arl0_at(hi);
    for (int doubling = 0; arl_hi < target_arl0 - tolerance; ++doubling) {
        if (doubling == kMaxBracketDoublings) {
            throw CalibrationError("calibration bracket does not reach the target ARL0 "
                                   "after expanding high to " + std::to_string(hi) +
                                   " (ARL0 " + std::to_string(arl_hi) + ")");
        }
        lo = hi;
        hi *= 2.0;
        arl_hi = arl0_at(hi);
    }
    if (std::abs(arl_hi - target_arl0) <= tolerance) {
        return done(hi, arl_hi, lo, hi);
    }

    double mid = 0.5 * (lo + hi);
    double arl_mid = 0.0;
    for (;;) {
        mid = 0.5 * (lo + hi);
        arl_mid = arl0_at(mid);
        if (std::abs(arl_mid - target_arl0) <= tolerance) {
            break;
        }
        if (arl_mid < target_arl0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < kMinBracketWidth) {
            break;
        }
    }
    return done(mid, arl_mid, std::min(lo, mid), std::max(hi, mid));
}

unsigned resolve_worker_count(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    if (char const* env = std::getenv("BAYES_SPM_THREADS")) {
        char* end = nullptr;
        long const value = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && value > 0) {
            return static_cast<unsigned>(value);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace bspm
