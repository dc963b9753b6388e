#include "bspm/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace bspm::cli {

namespace {

// Flag values as typed, before cross-flag validation.
struct RawFlags {
    std::string model;
    double mu0 = 0, sigma0 = 0, sigma = 1, mu = 0;
    double alpha = 0, beta = 0, rate = 0, lambda = 0;
    std::string loss = "self";
    double c = LossFunction::kDefaultLinexC;
    std::string chart = "cusum";
    double h = 0, tau = 0, L = 0;
    std::size_t n = 10;
    std::size_t m = 10'000;
    std::string shifts = "0:2.5:0.25";
    std::uint64_t seed = 1;
    std::uint64_t max_steps = kDefaultMaxSteps;
    std::string scheme = "predictive";
    std::string run_length = "preceding";
    std::string timing = "wall";
    unsigned threads = 0;
    std::string out;
    std::string format = "csv";
    double target = 370, tol = 10, low = 0.1, high = 10;
    double xbar = 0;
};

class FlagSet {
  public:
    explicit FlagSet(CLI::App* app) : app_(app) {}

    template <class T>
    void add(std::string const& name, T& target, std::string const& help) {
        options_[name] = app_->add_option(name, target, help);
    }

    bool given(std::string const& name) const {
        auto it = options_.find(name);
        return it != options_.end() && it->second->count() > 0;
    }

    CLI::App* app() const { return app_; }

  private:
    CLI::App* app_;
    std::map<std::string, CLI::Option*> options_;
};

void add_model_flags(FlagSet& f, RawFlags& r) {
    f.add("--model", r.model, "normal | poisson-gamma | poisson-exp");
    f.add("--mu0", r.mu0, "prior mean");
    f.add("--sigma0", r.sigma0, "prior standard deviation");
    f.add("--sigma", r.sigma, "known process standard deviation (normal)");
    f.add("--mu", r.mu, "in-control process mean (normal, default 0)");
    f.add("--alpha", r.alpha, "gamma prior shape");
    f.add("--beta", r.beta, "gamma prior inverse scale");
    f.add("--rate", r.rate, "exponential prior rate (poisson-exp)");
    f.add("--lambda", r.lambda, "in-control Poisson mean (default: prior mean)");
    f.add("--loss", r.loss, "self | plf | llf");
    f.add("--c", r.c, "Linex constant (llf only, default 1)");
    f.add("--n", r.n, "subgroup size");
}

void add_run_flags(FlagSet& f, RawFlags& r) {
    f.add("--chart", r.chart, "cusum | ewma");
    f.add("--h", r.h, "CUSUM decision interval multiplier");
    f.add("--tau", r.tau, "EWMA smoothing constant");
    f.add("--L", r.L, "EWMA limit width multiplier");
    f.add("--m", r.m, "Monte Carlo iterations per shift");
    f.add("--shifts", r.shifts, "shift grid start:stop:step");
    f.add("--seed", r.seed, "master seed");
    f.add("--max-steps", r.max_steps, "run-length cap");
    f.add("--scheme", r.scheme, "predictive | estimator");
    f.add("--run-length", r.run_length, "preceding | signal");
    f.add("--timing", r.timing, "wall | off");
    f.add("--threads", r.threads, "worker threads (0: BAYES_SPM_THREADS or hardware)");
    f.add("--out", r.out, "output file (default stdout)");
}

double parse_double(std::string const& text, std::string const& flag) {
    std::size_t used = 0;
    double value = 0;
    try {
        value = std::stod(text, &used);
    } catch (std::exception const&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw UsageError(flag + ": '" + text + "' is not a number");
    }
    return value;
}

ShiftGrid parse_shifts(std::string const& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) {
        parts.push_back(part);
    }
    if (parts.size() != 3) {
        throw UsageError("--shifts: expected start:stop:step, got '" + text + "'");
    }
    try {
        return ShiftGrid(parse_double(parts[0], "--shifts"),
                         parse_double(parts[1], "--shifts"),
                         parse_double(parts[2], "--shifts"));
    } catch (std::invalid_argument const& e) {
        throw UsageError(std::string("--shifts: ") + e.what());
    }
}

std::string fmt_exact(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void forbid(FlagSet const& f, std::initializer_list<char const*> names,
            std::string const& context) {
    for (char const* name : names) {
        if (f.given(name)) {
            throw UsageError(std::string(name) + " is not valid with " + context);
        }
    }
}

void require(FlagSet const& f, std::initializer_list<char const*> names,
             std::string const& context) {
    for (char const* name : names) {
        if (!f.given(name)) {
            throw UsageError(std::string(name) + " is required with " + context);
        }
    }
}

struct ModelChoice {
    ModelKind kind;
    ConjugateModel model;
    ProcessSpec process;
};

ModelChoice build_model(FlagSet const& f, RawFlags const& r) {
    if (r.model == "normal") {
        std::string const ctx = "--model normal";
        forbid(f, {"--alpha", "--beta", "--rate", "--lambda"}, ctx);
        require(f, {"--mu0", "--sigma0"}, ctx);
        if (!(r.sigma0 > 0) || !(r.sigma > 0)) {
            throw UsageError("--sigma0 and --sigma must be positive");
        }
        return {ModelKind::normal,
                NormalConjugate(r.mu0, r.sigma0 * r.sigma0, r.sigma * r.sigma),
                ProcessSpec::normal(r.mu, r.sigma)};
    }
    if (r.model == "poisson-gamma") {
        std::string const ctx = "--model poisson-gamma";
        forbid(f, {"--rate", "--sigma", "--mu"}, ctx);
        bool const direct = f.given("--alpha") || f.given("--beta");
        bool const moments = f.given("--mu0") || f.given("--sigma0");
        if (direct == moments) {
            throw UsageError("--model poisson-gamma needs either --alpha/--beta or --mu0/--sigma0");
        }
        double alpha = r.alpha;
        double beta = r.beta;
        if (direct) {
            require(f, {"--alpha", "--beta"}, ctx);
        } else {
            require(f, {"--mu0", "--sigma0"}, ctx);
            if (!(r.mu0 > 0) || !(r.sigma0 > 0)) {
                throw UsageError("--mu0 and --sigma0 must be positive for the gamma prior");
            }
            HyperparamSolution const s = solve_gamma_hyperparams(r.mu0, r.sigma0 * r.sigma0);
            alpha = s.alpha;
            beta = s.beta;
        }
        PoissonGammaConjugate const pg(alpha, beta);
        double const lambda = f.given("--lambda") ? r.lambda : pg.prior_mean();
        return {ModelKind::poisson_gamma, pg, ProcessSpec::poisson(lambda)};
    }
    if (r.model == "poisson-exp") {
        std::string const ctx = "--model poisson-exp";
        forbid(f, {"--alpha", "--beta", "--mu0", "--sigma0", "--sigma", "--mu"}, ctx);
        require(f, {"--rate"}, ctx);
        PoissonGammaConjugate const pg = exponential_prior(r.rate);
        double const lambda = f.given("--lambda") ? r.lambda : pg.prior_mean();
        return {ModelKind::poisson_exp, pg, ProcessSpec::poisson(lambda)};
    }
    throw UsageError("--model: expected normal, poisson-gamma or poisson-exp, got '" +
                     r.model + "'");
}

LossFunction build_loss(FlagSet const& f, RawFlags const& r,
                        std::vector<std::string>& notes) {
    LossKind kind;
    try {
        kind = parse_loss_kind(r.loss);
    } catch (std::invalid_argument const&) {
        throw UsageError("--loss: expected self, plf or llf, got '" + r.loss + "'");
    }
    if (kind != LossKind::llf) {
        forbid(f, {"--c"}, "--loss " + r.loss);
        return kind == LossKind::self ? LossFunction::self() : LossFunction::plf();
    }
    if (!f.given("--c")) {
        notes.push_back("--loss llf without --c; using the default Linex constant c = " +
                        format_number(LossFunction::kDefaultLinexC));
    }
    if (r.c == 0.0) {
        throw UsageError("--c must be nonzero (c = 0 is the squared-error loss)");
    }
    return LossFunction::llf(r.c);
}

ChartDesign build_chart(FlagSet const& f, RawFlags const& r, Subcommand sub) {
    bool const need_constant = sub == Subcommand::simulate;
    if (r.chart == "cusum") {
        forbid(f, {"--tau", "--L"}, "--chart cusum");
        if (need_constant) {
            require(f, {"--h"}, "--chart cusum");
        }
        double const h = f.given("--h") ? r.h : r.low;
        if (!(h > 0)) {
            throw UsageError("--h must be positive");
        }
        return CusumDesign{h};
    }
    if (r.chart == "ewma") {
        forbid(f, {"--h"}, "--chart ewma");
        require(f, {"--tau"}, "--chart ewma");
        if (need_constant) {
            require(f, {"--L"}, "--chart ewma");
        }
        double const L = f.given("--L") ? r.L : r.low;
        if (!(r.tau > 0 && r.tau <= 1)) {
            throw UsageError("--tau must lie in (0, 1]");
        }
        if (!(L > 0)) {
            throw UsageError("--L must be positive");
        }
        return EwmaDesign{r.tau, L};
    }
    throw UsageError("--chart: expected cusum or ewma, got '" + r.chart + "'");
}

template <class Enum>
Enum pick(std::string const& flag, std::string const& value,
          std::initializer_list<std::pair<char const*, Enum>> choices) {
    std::string names;
    for (auto const& [name, e] : choices) {
        if (value == name) {
            return e;
        }
        names += names.empty() ? name : std::string(" | ") + name;
    }
    throw UsageError(flag + ": expected " + names + ", got '" + value + "'");
}

std::string_view model_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::normal: return "normal";
    case ModelKind::poisson_gamma: return "poisson-gamma";
    case ModelKind::poisson_exp: return "poisson-exp";
    }
    return "?";
}

std::string_view subcommand_name(Subcommand sub) {
    switch (sub) {
    case Subcommand::simulate: return "simulate";
    case Subcommand::calibrate: return "calibrate";
    case Subcommand::estimate: return "estimate";
    }
    return "?";
}

std::string join(std::vector<std::string> const& parts) {
    std::string out;
    for (auto const& p : parts) {
        if (!out.empty()) {
            out += ' ';
        }
        out += p;
    }
    return out;
}

void write_file(std::string const& path, std::string const& content) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    file << content;
    file.close();
    if (!file) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

}  // namespace

//---------------------------------------------------------------------------//

CliConfig parse_config(std::vector<std::string> const& args) {
    RawFlags raw;
    CLI::App app{"Bayesian EWMA/CUSUM control charts: run-length simulation, "
                 "calibration and estimator reports",
                 "bayes-spm"};
    app.set_help_flag("--help", "print this help");
    app.require_subcommand(1);

    CLI::App* sim = app.add_subcommand("simulate", "ARL/SDRL/ATS/SDTS over a shift grid");
    CLI::App* cal = app.add_subcommand("calibrate", "find h or L for a target in-control ARL");
    CLI::App* est = app.add_subcommand("estimate", "Bayes estimate and variances for one sample");

    FlagSet sim_flags(sim), cal_flags(cal), est_flags(est);
    for (FlagSet* f : {&sim_flags, &cal_flags, &est_flags}) {
        f->app()->set_help_flag("--help", "print this help");
        add_model_flags(*f, raw);
    }
    for (FlagSet* f : {&sim_flags, &cal_flags}) {
        add_run_flags(*f, raw);
    }
    sim_flags.add("--format", raw.format, "csv | table");
    cal_flags.add("--target", raw.target, "target in-control ARL");
    cal_flags.add("--tol", raw.tol, "accepted |ARL0 - target|");
    cal_flags.add("--low", raw.low, "bracket low end");
    cal_flags.add("--high", raw.high, "bracket high end");
    est_flags.add("--xbar", raw.xbar, "observed sample mean");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (CLI::CallForHelp const&) {
        CLI::App const* target = &app;
        for (CLI::App* sub : {sim, cal, est}) {
            if (sub->parsed()) {
                target = sub;
            }
        }
        throw HelpRequested(target->help());
    } catch (CLI::ParseError const& e) {
        throw UsageError(e.what());
    }

    FlagSet const* flags = sim->parsed() ? &sim_flags : cal->parsed() ? &cal_flags : &est_flags;
    Subcommand const sub = sim->parsed()   ? Subcommand::simulate
                           : cal->parsed() ? Subcommand::calibrate
                                           : Subcommand::estimate;

    if (!flags->given("--model")) {
        throw UsageError("--model is required");
    }

    std::vector<std::string> notes;
    try {
        ModelChoice const model = build_model(*flags, raw);
        LossFunction const loss = build_loss(*flags, raw, notes);
        ChartDesign const chart =
            sub == Subcommand::estimate ? ChartDesign{CusumDesign{1.0}}
                                        : build_chart(*flags, raw, sub);

        ExperimentConfig experiment{.process = model.process,
                                    .model = model.model,
                                    .loss = loss,
                                    .chart = chart};
        experiment.n = raw.n;
        if (raw.n == 0) {
            throw UsageError("--n must be at least 1");
        }

        CliConfig config{.subcommand = sub,
                         .model_kind = model.kind,
                         .experiment = experiment,
                         .output_path = {},
                         .format = OutputFormat::csv,
                         .calibration = {},
                         .xbar = std::nullopt,
                         .notes = {}};

        if (sub == Subcommand::estimate) {
            require(*flags, {"--n", "--xbar"}, "estimate");
            if (model.kind != ModelKind::normal && raw.xbar < 0) {
                throw UsageError("--xbar must be nonnegative for Poisson models");
            }
            config.xbar = raw.xbar;
            config.notes = std::move(notes);
            return config;
        }

        ExperimentConfig& e = config.experiment;
        e.m = raw.m;
        e.shifts = parse_shifts(raw.shifts);
        e.seed = raw.seed;
        e.max_steps = raw.max_steps;
        e.scheme = pick<Scheme>("--scheme", raw.scheme,
                                {{"predictive", Scheme::predictive},
                                 {"estimator", Scheme::estimator}});
        e.count = pick<RunLengthCount>("--run-length", raw.run_length,
                                       {{"preceding", RunLengthCount::preceding},
                                        {"signal", RunLengthCount::signal}});
        e.measure_time = pick<bool>("--timing", raw.timing, {{"wall", true}, {"off", false}});
        e.threads = raw.threads;
        config.output_path = raw.out;

        if (sub == Subcommand::simulate) {
            config.format = pick<OutputFormat>("--format", raw.format,
                                               {{"csv", OutputFormat::csv},
                                                {"table", OutputFormat::table}});
        } else {
            config.calibration = {raw.target, raw.tol, {raw.low, raw.high}};
            if (!(raw.target > 1)) {
                throw UsageError("--target must exceed 1");
            }
            if (!(raw.tol > 0)) {
                throw UsageError("--tol must be positive");
            }
            if (!(raw.low > 0 && raw.high > raw.low)) {
                throw UsageError("--low/--high must satisfy 0 < low < high");
            }
        }
        validate(e);
        config.notes = std::move(notes);
        return config;
    } catch (std::invalid_argument const& e) {
        throw UsageError(e.what());
    }
}

std::vector<std::string> to_args(CliConfig const& config) {
    ExperimentConfig const& e = config.experiment;
    std::vector<std::string> a{std::string(subcommand_name(config.subcommand)),
                               "--model", std::string(model_name(config.model_kind))};
    auto put = [&](char const* flag, std::string value) {
        a.emplace_back(flag);
        a.push_back(std::move(value));
    };

    if (auto const* normal = std::get_if<NormalConjugate>(&e.model)) {
        put("--mu0", fmt_exact(normal->mu0()));
        put("--sigma0", fmt_exact(std::sqrt(normal->sigma0_sq())));
        put("--sigma", fmt_exact(std::sqrt(normal->sigma_sq())));
        put("--mu", fmt_exact(e.process.in_control_mean()));
    } else {
        auto const& pg = std::get<PoissonGammaConjugate>(e.model);
        if (config.model_kind == ModelKind::poisson_exp) {
            put("--rate", fmt_exact(pg.beta()));
        } else {
            put("--alpha", fmt_exact(pg.alpha()));
            put("--beta", fmt_exact(pg.beta()));
        }
        put("--lambda", fmt_exact(e.process.in_control_mean()));
    }
    put("--loss", std::string(to_string(e.loss.kind())));
    if (e.loss.kind() == LossKind::llf) {
        put("--c", fmt_exact(e.loss.c()));
    }
    put("--n", std::to_string(e.n));

    if (config.subcommand == Subcommand::estimate) {
        put("--xbar", fmt_exact(config.xbar.value_or(0.0)));
        return a;
    }

    if (auto const* ewma = std::get_if<EwmaDesign>(&e.chart)) {
        put("--chart", "ewma");
        put("--tau", fmt_exact(ewma->tau));
        put("--L", fmt_exact(ewma->L));
    } else {
        put("--chart", "cusum");
        put("--h", fmt_exact(std::get<CusumDesign>(e.chart).h));
    }
    put("--m", std::to_string(e.m));
    put("--shifts", fmt_exact(e.shifts.start()) + ":" + fmt_exact(e.shifts.stop()) + ":" +
                        fmt_exact(e.shifts.step()));
    put("--seed", std::to_string(e.seed));
    put("--max-steps", std::to_string(e.max_steps));
    put("--scheme", e.scheme == Scheme::predictive ? "predictive" : "estimator");
    put("--run-length", e.count == RunLengthCount::preceding ? "preceding" : "signal");
    put("--timing", e.measure_time ? "wall" : "off");
    if (e.threads != 0) {
        put("--threads", std::to_string(e.threads));
    }
    if (!config.output_path.empty()) {
        put("--out", config.output_path);
    }
    if (config.subcommand == Subcommand::simulate) {
        put("--format", config.format == OutputFormat::csv ? "csv" : "table");
    } else {
        put("--target", fmt_exact(config.calibration.target));
        put("--tol", fmt_exact(config.calibration.tolerance));
        put("--low", fmt_exact(config.calibration.bracket.low));
        put("--high", fmt_exact(config.calibration.bracket.high));
    }
    return a;
}

std::vector<ResultRow> to_rows(std::vector<RunLengthSummary> const& summaries) {
    std::vector<ResultRow> rows;
    rows.reserve(summaries.size());
    for (auto const& s : summaries) {
        rows.push_back({s.shift, s.arl, s.sdrl, s.ats, s.sdts, s.censored});
    }
    return rows;
}

std::string format_number(double value) {
    if (value == 0.0) {
        return "0";  // also folds -0
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

std::string render_csv(std::vector<ResultRow> const& rows) {
    std::string out = "shift,arl,sdrl,ats,sdts,censored\n";
    for (auto const& r : rows) {
        out += format_number(r.shift) + ',' + format_number(r.arl) + ',' +
               format_number(r.sdrl) + ',' + format_number(r.ats_seconds) + ',' +
               format_number(r.sdts_seconds) + ',' + std::to_string(r.censored) + '\n';
    }
    return out;
}

std::string render_table(std::vector<ResultRow> const& rows, CliConfig const& config) {
    std::ostringstream os;
    ExperimentConfig const& e = config.experiment;
    MonitoringDesign const design = design_monitoring(e);
    Limits const limits = chart_limits(design.chart);

    os << "# bayes-spm " << join(to_args(config)) << '\n';
    os << "# chart " << (std::holds_alternative<EwmaDesign>(e.chart) ? "ewma" : "cusum")
       << "  center " << format_number(design.center) << "  scale "
       << format_number(design.scale) << "  limits [" << format_number(limits.lcl) << ", "
       << format_number(limits.ucl) << "]\n";
    os << "# loss " << to_string(e.loss.kind()) << "  n " << e.n << "  m " << e.m
       << "  seed " << e.seed << '\n';

    constexpr int w = 12;
    os << std::setw(8) << "shift" << std::setw(w) << "ARL" << std::setw(w) << "SDRL"
       << std::setw(w) << "ATS" << std::setw(w) << "SDTS" << std::setw(10) << "censored"
       << '\n';
    for (auto const& r : rows) {
        os << std::setw(8) << format_number(r.shift) << std::setw(w) << format_number(r.arl)
           << std::setw(w) << format_number(r.sdrl) << std::setw(w)
           << format_number(r.ats_seconds) << std::setw(w) << format_number(r.sdts_seconds)
           << std::setw(10) << r.censored << '\n';
    }
    return os.str();
}

void emit_results(std::vector<ResultRow> const& rows, OutputFormat format,
                  std::string const& path, CliConfig const* config) {
    if (rows.empty()) {
        throw std::invalid_argument("emit_results: no rows to write");
    }
    if (format == OutputFormat::table && config == nullptr) {
        throw std::invalid_argument("emit_results: table format needs the run configuration");
    }
    std::string const content =
        format == OutputFormat::csv ? render_csv(rows) : render_table(rows, *config);
    write_file(path, content);
}

std::string estimate_report(CliConfig const& config) {
    ExperimentConfig const& e = config.experiment;
    if (!config.xbar) {
        throw std::invalid_argument("estimate needs a sample mean");
    }
    SampleSummary const sample(e.n, *config.xbar);
    double const estimate = bayes_mean(e.loss, e.model, sample);
    VarianceTriple const v = variances(e.model, sample);

    auto num = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.7g", x);
        return std::string(buf);
    };

    std::ostringstream os;
    if (auto const* normal = std::get_if<NormalConjugate>(&e.model)) {
        os << "model                normal (mu0 " << num(normal->mu0()) << ", sigma0^2 "
           << num(normal->sigma0_sq()) << ", sigma^2 " << num(normal->sigma_sq()) << ")\n";
    } else {
        auto const& pg = std::get<PoissonGammaConjugate>(e.model);
        os << "model                poisson-gamma (alpha " << num(pg.alpha()) << ", beta "
           << num(pg.beta()) << ")\n";
    }
    os << "loss                 " << to_string(e.loss.kind());
    if (e.loss.kind() == LossKind::llf) {
        os << " (c " << num(e.loss.c()) << ")";
    }
    os << '\n';
    os << "n                    " << e.n << '\n';
    os << "xbar                 " << num(sample.xbar()) << '\n';
    os << "estimate             " << num(estimate) << '\n';
    os << "posterior_variance   " << num(v.posterior) << '\n';
    os << "predictive_variance  " << num(v.predictive) << '\n';
    os << "ybar_variance        " << num(v.ybar) << '\n';
    return os.str();
}

std::string calibration_report(CalibrationResult const& result, CliConfig const& config) {
    std::ostringstream os;
    char const* name = std::holds_alternative<EwmaDesign>(config.experiment.chart) ? "L" : "h";
    os << name << "              " << format_number(result.constant) << '\n';
    os << "achieved_arl0  " << format_number(result.achieved_arl0) << '\n';
    os << "target_arl0    " << format_number(config.calibration.target) << " +/- "
       << format_number(config.calibration.tolerance) << '\n';
    os << "evaluations    " << result.iterations_used << '\n';
    os << "bracket        " << format_number(result.bracket.low) << ' '
       << format_number(result.bracket.high) << '\n';
    return os.str();
}

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
    std::optional<CliConfig> parsed;
    try {
        parsed = parse_config(args);
    } catch (HelpRequested const& help) {
        out << help.what();
        return 0;
    } catch (UsageError const& e) {
        err << "error: " << e.what() << "\nrun 'bayes-spm --help' for usage\n";
        return 2;
    }
    CliConfig const& config = *parsed;
    for (auto const& note : config.notes) {
        err << "note: " << note << '\n';
    }

    try {
        switch (config.subcommand) {
        case Subcommand::simulate: {
            auto const rows = to_rows(simulate(config.experiment));
            if (config.output_path.empty()) {
                out << (config.format == OutputFormat::csv ? render_csv(rows)
                                                           : render_table(rows, config));
            } else {
                emit_results(rows, config.format, config.output_path, &config);
            }
            break;
        }
        case Subcommand::calibrate: {
            CalibrationResult const result =
                calibrate(config.experiment, config.calibration.target,
                          config.calibration.tolerance, config.calibration.bracket);
            out << calibration_report(result, config);
            if (!config.output_path.empty()) {
                write_file(config.output_path,
                           "constant,achieved_arl0,evaluations,low,high\n" +
                               format_number(result.constant) + ',' +
                               format_number(result.achieved_arl0) + ',' +
                               std::to_string(result.iterations_used) + ',' +
                               format_number(result.bracket.low) + ',' +
                               format_number(result.bracket.high) + '\n');
            }
            break;
        }
        case Subcommand::estimate:
            out << estimate_report(config);
            break;
        }
    } catch (std::invalid_argument const& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

}  // namespace bspm::cli
