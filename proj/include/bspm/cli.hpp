#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bspm/simkit.hpp"

namespace bspm::cli {

enum class Subcommand { simulate, calibrate, estimate };
enum class OutputFormat { csv, table };
enum class ModelKind { normal, poisson_gamma, poisson_exp };

/// Bad flags or flag combinations; maps to exit code 2.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// `--help` was given; carries the rendered help text.
class HelpRequested : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct CalibrationRequest {
    double target = 370.0;
    double tolerance = 10.0;
    CalibrationBracket bracket{0.1, 10.0};

    friend bool operator==(CalibrationRequest const& a, CalibrationRequest const& b) {
        return a.target == b.target && a.tolerance == b.tolerance &&
               a.bracket.low == b.bracket.low && a.bracket.high == b.bracket.high;
    }
};

struct CliConfig {
    Subcommand subcommand;
    ModelKind model_kind;
    ExperimentConfig experiment;
    std::string output_path;  //!< empty writes to stdout
    OutputFormat format = OutputFormat::csv;
    CalibrationRequest calibration;
    std::optional<double> xbar;  //!< estimate only
    std::vector<std::string> notes;  //!< diagnostics for stderr

    friend bool operator==(CliConfig const& a, CliConfig const& b) {
        return a.subcommand == b.subcommand && a.model_kind == b.model_kind &&
               a.experiment == b.experiment && a.output_path == b.output_path &&
               a.format == b.format && a.calibration == b.calibration &&
               a.xbar == b.xbar;
    }
};

/// One output row per shift, ascending.
struct ResultRow {
    double shift;
    double arl;
    double sdrl;
    double ats_seconds;
    double sdts_seconds;
    std::size_t censored;
};

/// Parses arguments (program name excluded), e.g. {"simulate", "--model", ...}.
CliConfig parse_config(std::vector<std::string> const& args);

/// Canonical argument list that parses back to `config`.
std::vector<std::string> to_args(CliConfig const& config);

std::vector<ResultRow> to_rows(std::vector<RunLengthSummary> const& summaries);

/// Six significant digits, trailing zeros dropped ("%.6g").
std::string format_number(double value);

std::string render_csv(std::vector<ResultRow> const& rows);
std::string render_table(std::vector<ResultRow> const& rows, CliConfig const& config);

/// Writes rows to `path`; throws on empty rows (before touching the file)
/// or an unwritable path.
void emit_results(std::vector<ResultRow> const& rows, OutputFormat format,
                  std::string const& path, CliConfig const* config = nullptr);

std::string estimate_report(CliConfig const& config);
std::string calibration_report(CalibrationResult const& result, CliConfig const& config);

/// Full command-line entry point; returns the process exit code.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace bspm::cli
