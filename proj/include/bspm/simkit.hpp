#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "bspm/charts.hpp"
#include "bspm/conjugate.hpp"
#include "bspm/loss.hpp"
#include "bspm/random.hpp"

namespace bspm {

enum class Family { normal, poisson };

/// The data-generating process being monitored.
class ProcessSpec {
  public:
    static ProcessSpec normal(double mean, double sd);
    //! Poisson process; its standard deviation is sqrt(lambda).
    static ProcessSpec poisson(double lambda);

    Family family() const { return family_; }
    double in_control_mean() const { return mean_; }
    double process_sd() const { return sd_; }

    friend bool operator==(ProcessSpec const&, ProcessSpec const&) = default;

  private:
    ProcessSpec(Family family, double mean, double sd)
        : family_(family), mean_(mean), sd_(sd) {}

    Family family_;
    double mean_;
    double sd_;
};

/// Out-of-control mean after a shift of `delta` process standard deviations.
double shift_mean(ProcessSpec const& process, double delta);

/// Arithmetic grid start, start + step, ... up to and including stop.
class ShiftGrid {
  public:
    ShiftGrid(double start, double stop, double step);

    double start() const { return start_; }
    double stop() const { return stop_; }
    double step() const { return step_; }
    std::vector<double> values() const;

    friend bool operator==(ShiftGrid const&, ShiftGrid const&) = default;

  private:
    double start_;
    double stop_;
    double step_;
};

/*!
 * How each plotted point is produced.
 *
 * `predictive`: every time step draws n values from the posterior
 * predictive law of the design point, N(center + shift, sigma_ppd^2) for
 * the Normal family and Poisson(theta + shift), theta ~ Gamma(posterior)
 * for the Poisson family, and plots their mean. Limits scale with the
 * posterior-predictive standard deviation. This is the scheme behind the
 * reference ARL/SDRL sensitivity results.
 *
 * `estimator`: every time step draws a fresh subgroup of n observations
 * from the (shifted) process, plots the subgroup's Bayes estimator against
 * the fixed prior, and scales limits by sigma_ybar.
 */
enum class Scheme { predictive, estimator };

/*!
 * Run-length convention: `preceding` counts the in-control points plotted
 * before the signal (an immediate signal has run length 0); `signal` is the
 * index of the signaling point.
 */
enum class RunLengthCount { preceding, signal };

inline constexpr std::uint64_t kDefaultMaxSteps = 50'000;

struct ExperimentConfig {
    ProcessSpec process;
    ConjugateModel model;
    LossFunction loss;
    ChartDesign chart;
    std::size_t n = 10;
    std::size_t m = 10'000;
    ShiftGrid shifts{0.0, 2.5, 0.25};
    std::uint64_t seed = 1;
    std::uint64_t max_steps = kDefaultMaxSteps;
    Scheme scheme = Scheme::predictive;
    RunLengthCount count = RunLengthCount::preceding;
    bool measure_time = true;
    //! Worker count; 0 defers to BAYES_SPM_THREADS, then the hardware.
    unsigned threads = 0;

    friend bool operator==(ExperimentConfig const&, ExperimentConfig const&) = default;
};

void validate(ExperimentConfig const& config);

/// Chart constants fixed at design time from the in-control process mean.
struct MonitoringDesign {
    double center;
    double scale;
    VarianceTriple variances;
    ChartSpec chart;
};

MonitoringDesign design_monitoring(ExperimentConfig const& config);

struct RunOutcome {
    std::uint64_t steps;  //!< index of the signaling point, or max_steps
    double elapsed;       //!< seconds; zero when timing is disabled
    bool censored;
};

//! Called once per plotted point with the subgroup and the plotted value.
using SubgroupObserver = std::function<void(SampleSummary const&, double)>;

RunOutcome run_length_once(ExperimentConfig const& config, double shift,
                           RandomStream& stream);
RunOutcome run_length_once(ExperimentConfig const& config,
                           MonitoringDesign const& design, double shift,
                           RandomStream& stream,
                           SubgroupObserver const& observer = {});

struct RunLengthSummary {
    double shift;
    double arl;
    double sdrl;
    double ats;
    double sdts;
    std::size_t censored;
};

std::vector<RunLengthSummary> simulate(ExperimentConfig const& config);

//! ARL/SDRL at a single shift using iteration streams 0..m-1.
RunLengthSummary simulate_shift(ExperimentConfig const& config, double shift);

struct CalibrationBracket {
    double low;
    double high;
};

struct CalibrationResult {
    double constant;
    double achieved_arl0;
    std::size_t iterations_used;
    CalibrationBracket bracket;
};

class CalibrationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/*!
 * Find the chart constant (h or L) whose in-control ARL hits the target.
 *
 * Every candidate reuses the same iteration streams, which makes the
 * estimated ARL a nondecreasing function of the constant, so plain
 * bisection applies. High is doubled up to five times if the initial
 * bracket falls short of the target.
 */
CalibrationResult calibrate(ExperimentConfig const& config, double target_arl0,
                            double tolerance, CalibrationBracket bracket);

unsigned resolve_worker_count(unsigned requested);

}  // namespace bspm
