#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "bspm/simkit.hpp"

using namespace bspm;

namespace {

ExperimentConfig normal_config(double h = 6.0, std::size_t m = 400) {
    ExperimentConfig c{.process = ProcessSpec::normal(0.0, 1.0),
                       .model = NormalConjugate(5.0, 4.0, 1.0),
                       .loss = LossFunction::self(),
                       .chart = CusumDesign{h}};
    c.m = m;
    c.seed = 42;
    c.measure_time = false;
    return c;
}

ExperimentConfig poisson_config(double h = 4.0, std::size_t m = 300) {
    ExperimentConfig c{.process = ProcessSpec::poisson(5.0),
                       .model = PoissonGammaConjugate(6.25, 1.25),
                       .loss = LossFunction::self(),
                       .chart = CusumDesign{h}};
    c.m = m;
    c.seed = 7;
    c.measure_time = false;
    return c;
}

}  // namespace

TEST_CASE("shift_mean") {
    CHECK(shift_mean(ProcessSpec::normal(0, 1), 0.25) == 0.25);
    CHECK(shift_mean(ProcessSpec::normal(3, 2), 0.0) == 3.0);
    CHECK(shift_mean(ProcessSpec::poisson(5), 0.0) == 5.0);
    CHECK(shift_mean(ProcessSpec::poisson(5), 1.0) == doctest::Approx(7.236068).epsilon(1e-7));
    CHECK_THROWS_AS(shift_mean(ProcessSpec::normal(0, 1), -0.1), std::invalid_argument);
    CHECK_THROWS_AS(ProcessSpec::poisson(0.0), std::invalid_argument);
    CHECK_THROWS_AS(ProcessSpec::normal(0, 0), std::invalid_argument);
}

TEST_CASE("ShiftGrid") {
    auto const g = ShiftGrid(0, 2.5, 0.25).values();
    REQUIRE(g.size() == 11);
    CHECK(g.front() == 0.0);
    CHECK(g[4] == 1.0);
    CHECK(g.back() == 2.5);
    auto const tenths = ShiftGrid(0, 1, 0.1).values();
    REQUIRE(tenths.size() == 11);
    CHECK(tenths.back() == 1.0);
    CHECK(ShiftGrid(1.5, 1.5, 1).values() == std::vector<double>{1.5});
    CHECK_THROWS_AS(ShiftGrid(1, 0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(ShiftGrid(0, 1, 0), std::invalid_argument);
}

TEST_CASE("validate") {
    auto c = normal_config();
    CHECK_NOTHROW(validate(c));
    c.n = 0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = normal_config();
    c.m = 0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = normal_config();
    c.max_steps = 0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = normal_config();
    c.model = PoissonGammaConjugate(1, 1);
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    auto p = poisson_config();
    p.loss = LossFunction::llf(-12.0);
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
}

TEST_CASE("design point") {
    auto c = normal_config();
    auto const d = design_monitoring(c);
    CHECK(d.center == doctest::Approx(5.0 / 41).epsilon(1e-14));
    CHECK(d.scale == doctest::Approx(std::sqrt(1 + 4.0 / 41)).epsilon(1e-14));
    c.scheme = Scheme::estimator;
    CHECK(design_monitoring(c).scale == doctest::Approx(std::sqrt(0.1 + 4.0 / 41)).epsilon(1e-14));
    CHECK(chart_limits(design_monitoring(c).chart).ucl ==
          doctest::Approx(6 * std::sqrt(0.1 + 4.0 / 41)).epsilon(1e-14));
}

TEST_CASE("run_length_once edge cases") {
    for (Scheme scheme : {Scheme::predictive, Scheme::estimator}) {
        auto c = normal_config();
        c.scheme = scheme;
        RandomStream s(1, 0);
        auto const immediate = run_length_once(c, 1e6, s);
        CHECK(immediate.steps == 1);
        CHECK(!immediate.censored);

        c.chart = CusumDesign{std::numeric_limits<double>::infinity()};
        c.max_steps = 250;
        RandomStream t(1, 0);
        auto const capped = run_length_once(c, 0.0, t);
        CHECK(capped.censored);
        CHECK(capped.steps == 250);
    }
    auto c = normal_config();
    RandomStream a(9, 3), b(9, 3);
    auto const x = run_length_once(c, 0.5, a);
    auto const y = run_length_once(c, 0.5, b);
    CHECK(x.steps == y.steps);
    CHECK(x.censored == y.censored);
}

TEST_CASE("plotted values per scheme") {
    auto c = normal_config();
    c.loss = LossFunction::plf();
    auto const d = design_monitoring(c);
    RandomStream s(3, 0);
    int points = 0;
    run_length_once(c, d, 0.0, s, [&](SampleSummary const& sub, double value) {
        CHECK(value == sub.xbar());
        ++points;
    });
    CHECK(points > 0);

    c.scheme = Scheme::estimator;
    auto const e = design_monitoring(c);
    RandomStream t(3, 0);
    run_length_once(c, e, 0.0, t, [&](SampleSummary const& sub, double value) {
        CHECK(value == bayes_mean(c.loss, c.model, sub));
    });
}

TEST_CASE("predictive scheme draws at the design point") {
    auto c = normal_config(std::numeric_limits<double>::infinity());
    c.max_steps = 20'000;
    auto const d = design_monitoring(c);
    RandomStream s(5, 0);
    double sum = 0, sumsq = 0;
    std::size_t k = 0;
    run_length_once(c, d, 1.0, s, [&](SampleSummary const& sub, double) {
        sum += sub.xbar();
        sumsq += sub.xbar() * sub.xbar();
        ++k;
    });
    double const mean = sum / k;
    double const var = sumsq / k - mean * mean;
    double const expected_var = (1 + 4.0 / 41) / 10;
    CHECK(std::abs(mean - (d.center + 1.0)) < 5 * std::sqrt(expected_var / k));
    CHECK(std::abs(var / expected_var - 1) < 0.05);
}

TEST_CASE("simulate is independent of worker count") {
    for (auto base : {normal_config(4.0, 300), poisson_config(4.0, 300)}) {
        base.shifts = ShiftGrid(0, 1, 0.5);
        base.threads = 1;
        auto const one = simulate(base);
        base.threads = 4;
        auto const four = simulate(base);
        REQUIRE(one.size() == 3);
        for (std::size_t i = 0; i < one.size(); ++i) {
            CHECK(one[i].arl == four[i].arl);
            CHECK(one[i].sdrl == four[i].sdrl);
            CHECK(one[i].censored == four[i].censored);
            CHECK(one[i].ats == 0.0);
        }
    }
}

TEST_CASE("run-length conventions differ by exactly one") {
    auto c = normal_config(5.0, 300);
    c.shifts = ShiftGrid(0, 1, 1);
    auto const preceding = simulate(c);
    c.count = RunLengthCount::signal;
    auto const signal = simulate(c);
    for (std::size_t i = 0; i < preceding.size(); ++i) {
        CHECK(signal[i].arl == doctest::Approx(preceding[i].arl + 1).epsilon(1e-12));
        CHECK(signal[i].sdrl == doctest::Approx(preceding[i].sdrl).epsilon(1e-9));
        CHECK(signal[i].arl >= 1.0);
    }
}

TEST_CASE("censored runs report the cap") {
    auto c = normal_config(std::numeric_limits<double>::infinity(), 12);
    c.max_steps = 40;
    c.shifts = ShiftGrid(0, 0, 1);
    auto const s = simulate(c);
    CHECK(s[0].censored == 12);
    CHECK(s[0].arl == 40.0);
    CHECK(s[0].sdrl == 0.0);
}

TEST_CASE("ARL is nondecreasing in the chart constant") {
    for (ChartDesign design : {ChartDesign{CusumDesign{1}}, ChartDesign{EwmaDesign{0.2, 1}}}) {
        for (Scheme scheme : {Scheme::predictive, Scheme::estimator}) {
            auto c = normal_config(1.0, 100);
            c.chart = design;
            c.scheme = scheme;
            double prev = -1;
            for (double k : {1.0, 1.5, 2.0, 2.5}) {
                c.chart = with_constant(design, k);
                double const arl = simulate_shift(c, 0.0).arl;
                CHECK(arl >= prev);
                prev = arl;
            }
        }
    }
    auto p = poisson_config(1.0, 100);
    double prev = -1;
    for (double h : {1.0, 2.0, 3.0, 4.0}) {
        p.chart = CusumDesign{h};
        double const arl = simulate_shift(p, 0.0).arl;
        CHECK(arl >= prev);
        prev = arl;
    }
}

TEST_CASE("timing columns") {
    auto c = normal_config(3.0, 100);
    c.measure_time = true;
    auto const s = simulate_shift(c, 0.0);
    CHECK(s.ats > 0.0);
    CHECK(s.sdts >= 0.0);
    CHECK(std::isfinite(s.ats));
}

TEST_CASE("Poisson estimator ordering on simulated subgroups") {
    auto p = poisson_config(4.0, 1);
    auto const d = design_monitoring(p);
    auto const& model = std::get<PoissonGammaConjugate>(p.model);
    for (std::uint64_t i = 0; i < 50; ++i) {
        RandomStream s(p.seed, i);
        run_length_once(p, d, 0.5, s, [&](SampleSummary const& sub, double) {
            double const self = bayes_mean_pg(LossFunction::self(), model, sub);
            CHECK(bayes_mean_pg(LossFunction::plf(), model, sub) >= self);
            CHECK(self >= bayes_mean_pg(LossFunction::llf(1.0), model, sub));
        });
    }
}

TEST_CASE("calibrate") {
    auto c = normal_config(1.0, 150);
    SUBCASE("target met at the low end returns it immediately") {
        double const arl = simulate_shift(c, 0.0).arl;
        auto const r = calibrate(c, arl, 1e-9, {1.0, 10.0});
        CHECK(r.constant == 1.0);
        CHECK(r.iterations_used == 1);
    }
    SUBCASE("bisection hits the target") {
        auto const r = calibrate(c, 100.0, 5.0, {0.5, 8.0});
        CHECK(std::abs(r.achieved_arl0 - 100.0) <= 5.0);
        CHECK(r.bracket.low <= r.constant);
        CHECK(r.constant <= r.bracket.high);
        auto check = c;
        check.chart = CusumDesign{r.constant};
        CHECK(simulate_shift(check, 0.0).arl == r.achieved_arl0);
    }
    SUBCASE("high end is expanded") {
        auto const r = calibrate(c, 100.0, 5.0, {0.5, 1.0});
        CHECK(std::abs(r.achieved_arl0 - 100.0) <= 5.0);
        CHECK(r.constant > 1.0);
    }
    SUBCASE("EWMA L") {
        auto e = c;
        e.chart = EwmaDesign{0.2, 1.0};
        auto const r = calibrate(e, 150.0, 5.0, {0.5, 5.0});
        CHECK(std::abs(r.achieved_arl0 - 150.0) <= 5.0);
    }
    SUBCASE("unreachable targets fail") {
        CHECK_THROWS_AS(calibrate(c, 370.0, 10.0, {0.1, 0.12}), CalibrationError);
        CHECK_THROWS_AS(calibrate(c, 2.0, 0.5, {5.0, 10.0}), CalibrationError);
        CHECK_THROWS_AS(calibrate(c, 0.5, 1.0, {1.0, 2.0}), std::invalid_argument);
        CHECK_THROWS_AS(calibrate(c, 100.0, 1.0, {2.0, 1.0}), std::invalid_argument);
    }
}

TEST_CASE("worker count resolution") {
    CHECK(resolve_worker_count(3) == 3);
    setenv("BAYES_SPM_THREADS", "2", 1);
    CHECK(resolve_worker_count(0) == 2);
    setenv("BAYES_SPM_THREADS", "junk", 1);
    CHECK(resolve_worker_count(0) >= 1);
    unsetenv("BAYES_SPM_THREADS");
}
