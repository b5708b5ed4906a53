#pragma once

#include "ddehopf/normalform.hpp"
#include "ddehopf/simulate.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ddehopf::cli {

enum ExitCode : int
{
    kOk = 0,
    kVerifyFailed = 1,
    kNumerical = 2,
    kOutOfScope = 3,
    kBlowUp = 4,
    kUsage = 64,
};

int exit_code_for(ErrorKind kind) noexcept;

// ----- sectioned key-value files -------------------------------------------------------------------------------------

struct IniValue
{
    std::string text;
    int line = 0;
};

/// section -> key -> value. Keys before any section header land in section "".
using IniFile = std::map<std::string, std::map<std::string, IniValue>>;

/// Throws Error{InvalidConfig} naming `origin` and the line on malformed input or duplicate keys.
IniFile parse_ini(std::string_view text, std::string const& origin);

IniFile read_ini(std::string const& path);

/// Model from the [model] and optional [constants] sections. Throws InvalidModel or parse errors.
ModelSpec model_from_ini(IniFile const& ini, std::string const& origin);

/// Built-in name or path to a model file.
ModelSpec resolve_model(std::string const& name_or_path);

// ----- run configuration ---------------------------------------------------------------------------------------------

struct Range
{
    double lo = 0.0;
    double hi = 0.0;
    std::optional<double> step;
};

/// "lo:hi" or "lo:hi:step". Throws InvalidConfig.
Range parse_range(std::string_view text, bool with_step);

/// "a,b". Throws InvalidConfig.
std::array<double, 2> parse_pair(std::string_view text);

/// Locale-independent strict double. Throws InvalidConfig naming `what`.
double parse_number(std::string_view text, std::string_view what);

struct RunConfig
{
    std::optional<std::string> model;          ///< built-in name or model file path
    std::optional<ModelSpec> inline_model;     ///< [model] section of the config file itself
    std::optional<double> tau;
    std::optional<std::array<double, 2>> guess;
    std::optional<Range> scan_lam;
    std::optional<Range> scan_mu;
    int scan_points = 40;
    std::optional<double> lam;
    std::optional<double> mu;
    std::optional<Range> lam_range;
    std::optional<Range> omega_range;
    int points = 100;
    SimConfig sim;
    std::optional<double> tolerance;
    std::string out;
    int workers = 0;
    bool no_header = false;

    /// The single model source with any tau override applied. Throws InvalidConfig when there is none or two.
    [[nodiscard]] ModelSpec model_spec() const;
};

/// Reads a config file into `cfg`; values present in the file replace the ones in `cfg`. Every section is checked,
/// but only [run], [model], [constants], [sim] and the section named `command` are applied.
void load_config(std::string const& path, RunConfig& cfg, std::string_view command);

// ----- output --------------------------------------------------------------------------------------------------------

/// Shortest round-trip form with at most 17 significant digits, '.' decimal separator.
std::string format_double(double v);

void write_report_text(DegeneracyReport const& r, std::ostream& os);

/// `[degeneracy-report]` header followed by one `key = value` line per field.
void write_report_keyvalue(DegeneracyReport const& r, std::ostream& os);

void write_sweep_csv(std::span<SweepRecord const> records, std::ostream& os);

// ----- verification --------------------------------------------------------------------------------------------------

struct VerifyCheck
{
    std::string name;
    bool pass = false;
    double residual = 0.0;   ///< worst observed discrepancy
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyOptions
{
    std::optional<double> tolerance;   ///< overrides every check's own tolerance
    int random_samples = 100;
    std::uint64_t seed = 20240601;
    /// Negates f21 in every Taylor table fed to the closed K1 path.
    bool flip_f21_sign = false;
};

std::vector<VerifyCheck> run_verify(VerifyOptions const& opts = {});

void write_verify(std::span<VerifyCheck const> checks, std::ostream& os);

// ----- subcommands ---------------------------------------------------------------------------------------------------

int cmd_analyze(RunConfig const& cfg, std::ostream& out, std::ostream& err);
int cmd_hopf_curve(RunConfig const& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(RunConfig const& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(RunConfig const& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(RunConfig const& cfg, std::ostream& out, std::ostream& err);

} // namespace ddehopf::cli
