#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qstab::cli {

inline constexpr const char* kSchemaVersion = "1.0.0";

enum ExitCode : int { kPass = 0, kFail = 1, kInvalid = 2, kInconclusive = 3 };

/// Effective configuration of one run. Flags override values from the
/// key=value config file; the whole struct is echoed into the report.
struct RunConfig {
    std::string command;

    int dim = 2;
    int codim = 1;
    std::string norm = "euclidean";
    std::string gram;  ///< rows "a,b;c,d" for --norm weighted
    std::string map = "quadratic";
    std::string form;    ///< coefficient matrices "rows|rows|..."; identity when empty
    std::string linear;  ///< m x n matrix for --map linear; identity pattern when empty

    std::string r = "1/2";
    double d = 1.0;
    std::optional<double> delta;
    std::string noise = "none";

    int samples = 2000;
    std::optional<double> radius_max;
    std::uint64_t seed = 42;
    int iters = 26;
    double tol = 1e-10;

    int n_min = 1;
    int n_max = 16;
    std::optional<int> per_shell;
    double decay_tol = 1e-2;

    std::string grid;  ///< "p,q,u,v;p,q,u,v;..."; {1,2,3}^4 when empty
    std::string x;
    std::string y;

    std::string out;
    bool emit_samples = false;
    std::string config;
};

struct Report {
    nlohmann::ordered_json json;
    int exit_code = kPass;
    /// CSV sample dump (certify pairs or profile shells), empty unless requested.
    std::string csv;
};

/// Parses argv (argv[0] is the program name). Throws ParameterError on any
/// invalid flag, value, or unknown config-file key. Returns nullopt when
/// --help was requested; the help text then goes to `help`.
std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& help);

Report run(const RunConfig& config);

Report run_certify(const RunConfig& config);
Report run_detect_ip(const RunConfig& config);
Report run_exponents(const RunConfig& config);
Report run_profile(const RunConfig& config);
Report run_residual(const RunConfig& config);

/// Full command-line entry: parse, run, write the report to --out (or
/// `out`), write the CSV dump when requested, print errors to `err`.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qstab::cli
