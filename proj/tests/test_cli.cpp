#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bspm/cli.hpp"

using namespace bspm;
using namespace bspm::cli;

namespace {

std::vector<std::string> split(std::string const& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    for (std::string w; is >> w;) {
        out.push_back(w);
    }
    return out;
}

std::vector<std::string> cusum_args() {
    return split("simulate --model normal --chart cusum --loss self --mu0 5 --sigma0 2 "
                 "--sigma 1 --n 10 --h 6 --m 10000 --shifts 0:2.5:0.25 --seed 42 --out t4.csv");
}

std::string slurp(std::filesystem::path const& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::string const& line) {
    std::ostringstream out, err;
    int const code = run(split(line), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("parse a full CUSUM sensitivity command") {
    auto const c = parse_config(cusum_args());
    CHECK(c.subcommand == Subcommand::simulate);
    CHECK(c.model_kind == ModelKind::normal);
    auto const& e = c.experiment;
    CHECK(std::get<NormalConjugate>(e.model) == NormalConjugate(5, 4, 1));
    CHECK(e.process == ProcessSpec::normal(0, 1));
    CHECK(e.loss == LossFunction::self());
    CHECK(std::get<CusumDesign>(e.chart).h == 6.0);
    CHECK(e.n == 10);
    CHECK(e.m == 10'000);
    CHECK(e.shifts == ShiftGrid(0, 2.5, 0.25));
    CHECK(e.seed == 42);
    CHECK(c.output_path == "t4.csv");
    CHECK(c.format == OutputFormat::csv);
    CHECK(c.notes.empty());
}

TEST_CASE("Linex default is announced") {
    auto args = cusum_args();
    args[6] = "llf";
    auto const c = parse_config(args);
    CHECK(c.experiment.loss == LossFunction::llf(1.0));
    REQUIRE(c.notes.size() == 1);
    CHECK(c.notes[0].find("c = 1") != std::string::npos);

    auto const r = invoke("estimate --model normal --mu0 5 --sigma0 2 --loss llf --n 10 --xbar 1");
    CHECK(r.code == 0);
    CHECK(r.err.find("note:") != std::string::npos);
}

TEST_CASE("usage errors") {
    auto const bad = [](std::string const& line) {
        CHECK_THROWS_AS(parse_config(split(line)), UsageError);
    };
    bad("simulate --model normal --mu0 0 --sigma0 1 --chart ewma --tau 0.2 --h 6");
    bad("simulate --model normal --mu0 0 --sigma0 1 --chart cusum --h 6 --tau 0.2");
    bad("simulate --model normal --mu0 0 --sigma0 1 --chart cusum --h 6 --L 3");
    bad("simulate --model normal --mu0 0 --sigma0 1 --h 6 --alpha 2");
    bad("simulate --model poisson-gamma --alpha 2 --beta 1 --mu0 3 --sigma0 1 --h 6");
    bad("simulate --model poisson-exp --rate 1 --alpha 1 --h 6");
    bad("simulate --model normal --mu0 0 --sigma0 1 --h six");
    bad("simulate --model normal --mu0 0 --sigma0 1 --h 6 --bogus 1");
    bad("simulate --model normal --mu0 0 --sigma0 1 --h 6 --shifts 0:1");
    bad("simulate --model normal --mu0 0 --sigma0 1 --h 6 --loss self --c 2");
    bad("simulate --model normal --mu0 0 --sigma0 1 --h 6 --loss llf --c 0");
    bad("simulate --model normal --mu0 0 --sigma0 1");
    bad("simulate --model gaussian --mu0 0 --sigma0 1 --h 6");
    bad("estimate --model normal --mu0 0 --sigma0 1 --n 10");
    bad("simulate --mu0 0 --sigma0 1 --h 6");
    bad("frobnicate");

    try {
        parse_config(split("simulate --model normal --mu0 0 --sigma0 1 --chart ewma --tau 0.2 --h 6"));
    } catch (UsageError const& e) {
        CHECK(std::string(e.what()).find("--h") != std::string::npos);
    }
    auto const r = invoke("simulate --model normal --mu0 0 --sigma0 1 --chart ewma --tau 0.2 --h 6");
    CHECK(r.code == 2);
    CHECK(r.out.empty());
}

TEST_CASE("poisson hyperparameter entry") {
    auto const direct = parse_config(split("simulate --model poisson-gamma --alpha 6.25 --beta 1.25 --h 4"));
    auto const moments = parse_config(split("simulate --model poisson-gamma --mu0 5 --sigma0 2 --h 4"));
    CHECK(direct.experiment.model == moments.experiment.model);
    CHECK(direct.experiment.process == ProcessSpec::poisson(5.0));

    auto const ex = parse_config(split("simulate --model poisson-exp --rate 0.2 --h 4"));
    CHECK(std::get<PoissonGammaConjugate>(ex.experiment.model) == PoissonGammaConjugate(1, 0.2));
    CHECK(ex.experiment.process.in_control_mean() == doctest::Approx(5.0));
    auto const with_lambda = parse_config(split("simulate --model poisson-exp --rate 0.2 --lambda 3 --h 4"));
    CHECK(with_lambda.experiment.process == ProcessSpec::poisson(3.0));
}

TEST_CASE("to_args round-trips") {
    std::vector<std::string> lines{
        "simulate --model normal --mu0 5 --sigma0 2 --n 10 --h 6 --m 500 --seed 3 --format table",
        "simulate --model normal --mu0 -1.3 --sigma0 0.7 --sigma 2.5 --mu 0.1 --loss llf --c 0.01 "
        "--chart ewma --tau 0.15 --L 2.9 --shifts 0:1:0.1 --scheme estimator --run-length signal "
        "--timing off --threads 3 --out x.csv",
        "simulate --model poisson-gamma --mu0 10 --sigma0 4 --loss plf --h 3.3 --max-steps 999",
        "calibrate --model poisson-exp --rate 0.2 --chart cusum --target 200 --tol 4 --low 1 --high 7",
        "calibrate --model normal --mu0 5 --sigma0 2 --chart ewma --tau 0.1",
        "estimate --model poisson-gamma --alpha 4 --beta 1.25 --n 10 --xbar 5 --loss llf --c -0.5",
    };
    for (auto const& line : lines) {
        CAPTURE(line);
        auto const c = parse_config(split(line));
        auto const again = parse_config(to_args(c));
        CHECK(again == c);
        CHECK(to_args(again) == to_args(c));
    }
}

TEST_CASE("table header parses back to the same config") {
    auto const c = parse_config(split(
        "simulate --model normal --mu0 10 --sigma0 4 --loss plf --n 20 --h 4.18 --m 100 "
        "--shifts 0:0.5:0.25 --format table --timing off"));
    std::vector<ResultRow> rows{{0, 370.5, 300.25, 0, 0, 0}};
    std::string const table = render_table(rows, c);
    std::string const first = table.substr(0, table.find('\n'));
    std::string const prefix = "# bayes-spm ";
    REQUIRE(first.rfind(prefix, 0) == 0);
    CHECK(parse_config(split(first.substr(prefix.size()))) == c);
}

TEST_CASE("number and CSV formatting") {
    CHECK(format_number(382.56) == "382.56");
    CHECK(format_number(314.006) == "314.006");
    CHECK(format_number(2.1e-7) == "2.1e-07");
    CHECK(format_number(1.85e-6) == "1.85e-06");
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1.0 / 3) == "0.333333");
    CHECK(format_number(25.148912) == "25.1489");

    std::vector<ResultRow> rows{{0, 382.56, 314.006, 2.1e-7, 1.85e-6, 0},
                                {0.25, 25.1489, 6.4, 1e-7, 2e-7, 3}};
    CHECK(render_csv(rows) ==
          "shift,arl,sdrl,ats,sdts,censored\n"
          "0,382.56,314.006,2.1e-07,1.85e-06,0\n"
          "0.25,25.1489,6.4,1e-07,2e-07,3\n");
}

TEST_CASE("emit_results") {
    auto const dir = std::filesystem::temp_directory_path() / "bspm_cli_test";
    std::filesystem::create_directories(dir);
    std::vector<ResultRow> rows{{0, 382.56, 314.006, 2.1e-7, 1.85e-6, 0}};

    auto const a = dir / "a.csv";
    auto const b = dir / "b.csv";
    emit_results(rows, OutputFormat::csv, a.string());
    emit_results(rows, OutputFormat::csv, b.string());
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) == "shift,arl,sdrl,ats,sdts,censored\n0,382.56,314.006,2.1e-07,1.85e-06,0\n");

    auto const empty = dir / "empty.csv";
    std::filesystem::remove(empty);
    CHECK_THROWS(emit_results({}, OutputFormat::csv, empty.string()));
    CHECK(!std::filesystem::exists(empty));

    CHECK_THROWS_AS(emit_results(rows, OutputFormat::csv, (dir / "missing" / "x.csv").string()),
                    std::runtime_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("estimate subcommand") {
    auto const normal = invoke(
        "estimate --model normal --mu0 5 --sigma0 2 --sigma 1 --loss self --n 10 --xbar 1.2");
    CHECK(normal.code == 0);
    CHECK(normal.out.find("estimate             1.292683\n") != std::string::npos);
    CHECK(normal.out.find("ybar_variance        0.197561\n") != std::string::npos);

    auto const pg = invoke("estimate --model poisson-gamma --alpha 4 --beta 1.25 --loss self --n 10 --xbar 5");
    CHECK(pg.code == 0);
    CHECK(pg.out.find("estimate             4.8\n") != std::string::npos);
    CHECK(pg.out.find("predictive_variance  5.226667\n") != std::string::npos);

    auto const ex = invoke("estimate --model poisson-exp --rate 0.2 --loss plf --n 10 --xbar 5");
    auto const g1 = invoke("estimate --model poisson-gamma --alpha 1 --beta 0.2 --loss plf --n 10 --xbar 5");
    CHECK(ex.code == 0);
    CHECK(ex.out == g1.out);
}

TEST_CASE("simulate and calibrate through run") {
    auto const dir = std::filesystem::temp_directory_path() / "bspm_cli_run";
    std::filesystem::create_directories(dir);
    std::string const base =
        "simulate --model normal --mu0 5 --sigma0 2 --n 10 --h 3 --m 200 --shifts 0:1:0.5 "
        "--timing off --seed 9";
    auto const r1 = invoke(base + " --threads 1");
    auto const r2 = invoke(base + " --threads 3");
    CHECK(r1.code == 0);
    CHECK(r1.out == r2.out);
    CHECK(r1.out.rfind("shift,arl,sdrl,ats,sdts,censored\n", 0) == 0);

    auto const file = dir / "out.csv";
    auto const r3 = invoke(base + " --out " + file.string());
    CHECK(r3.code == 0);
    CHECK(r3.out.empty());
    CHECK(slurp(file) == r1.out);

    auto const cal = invoke("calibrate --model normal --mu0 5 --sigma0 2 --n 10 --m 200 --target 50 "
                            "--tol 3 --low 0.5 --high 6 --timing off --out " +
                            (dir / "cal.csv").string());
    CHECK(cal.code == 0);
    CHECK(cal.out.find("achieved_arl0") != std::string::npos);
    CHECK(slurp(dir / "cal.csv").rfind("constant,achieved_arl0,evaluations,low,high\n", 0) == 0);

    auto const fail = invoke("calibrate --model normal --mu0 5 --sigma0 2 --n 10 --m 100 --target 370 "
                             "--low 0.1 --high 0.11");
    CHECK(fail.code == 3);
    auto const unwritable = invoke(base + " --out " + (dir / "no" / "such" / "f.csv").string());
    CHECK(unwritable.code == 3);

    auto const help = invoke("--help");
    CHECK(help.code == 0);
    CHECK(help.out.find("simulate") != std::string::npos);
    std::filesystem::remove_all(dir);
}
