#include "qstab/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qstab/asymptotics.hpp"
#include "qstab/errors.hpp"
#include "qstab/geometry.hpp"
#include "qstab/perturb.hpp"
#include "qstab/quadratic.hpp"
#include "qstab/space.hpp"
#include "qstab/stability.hpp"

namespace qstab::cli {

using json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Text parsing

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

double parse_real(std::string text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.erase(text.begin());
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
        throw ParameterError("cannot parse number '" + text + "'");
    return v;
}

Vector parse_vector(const std::string& text, int expected, const std::string& what) {
    if (text.empty()) throw ParameterError(what + " is required");
    const auto parts = split(text, ',');
    Vector v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_real(parts[i]);
    if (v.size() != expected)
        throw ParameterError(what + " has " + std::to_string(v.size()) + " entries, expected " +
                             std::to_string(expected));
    return v;
}

/// "a,b;c,d" -> [[a,b],[c,d]]
Matrix parse_matrix(const std::string& text, int rows, int cols, const std::string& what) {
    const auto row_text = split(text, ';');
    if (static_cast<int>(row_text.size()) != rows)
        throw ParameterError(what + " needs " + std::to_string(rows) + " rows");
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) m.row(i) = parse_vector(row_text[static_cast<std::size_t>(i)], cols, what).transpose();
    return m;
}

json vec_json(const Eigen::Ref<const Vector>& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json mat_json(const Matrix& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
    return a;
}

json to_json(const EquationParams& p) {
    json j;
    j["r"] = p.r();
    j["s"] = p.s();
    j["rs"] = p.rs();
    j["r_text"] = p.describe();
    j["rational_r"] = p.rational_r();
    if (p.fraction()) j["r_fraction"] = {{"num", p.fraction()->num}, {"den", p.fraction()->den}};
    j["near_degenerate"] = p.near_degenerate();
    return j;
}

json to_json(const StabilityConstants& c) {
    return json{{"d", c.d},         {"delta", c.delta},       {"M", c.M},
                {"K", c.K},         {"C_restricted", c.C_restricted}, {"C_global", c.C_global},
                {"C_approx", c.C_approx}};
}

json to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["dim"] = c.dim;
    j["codim"] = c.codim;
    j["norm"] = c.norm;
    j["gram"] = c.gram;
    j["map"] = c.map;
    j["form"] = c.form;
    j["linear"] = c.linear;
    j["r"] = c.r;
    j["d"] = c.d;
    j["delta"] = c.delta ? json(*c.delta) : json(nullptr);
    j["noise"] = c.noise;
    j["samples"] = c.samples;
    j["radius_max"] = c.radius_max ? json(*c.radius_max) : json(nullptr);
    j["seed"] = c.seed;
    j["iters"] = c.iters;
    j["tol"] = c.tol;
    j["n_min"] = c.n_min;
    j["n_max"] = c.n_max;
    j["per_shell"] = c.per_shell ? json(*c.per_shell) : json(nullptr);
    j["decay_tol"] = c.decay_tol;
    j["grid"] = c.grid;
    j["x"] = c.x;
    j["y"] = c.y;
    j["emit_samples"] = c.emit_samples;
    return j;
}

// ---------------------------------------------------------------------------
// Config -> domain objects

SpaceSpec make_space(const RunConfig& c) {
    if (c.norm == "euclidean") return SpaceSpec::euclidean(c.dim);
    if (c.norm == "sup") return SpaceSpec::sup_norm(c.dim);
    if (c.norm == "weighted") {
        if (c.gram.empty()) throw ParameterError("--norm weighted requires --gram");
        return SpaceSpec::weighted_quadratic(parse_matrix(c.gram, c.dim, c.dim, "--gram"));
    }
    if (c.norm.rfind("p:", 0) == 0) {
        const std::string p = c.norm.substr(2);
        if (p == "inf") return SpaceSpec::sup_norm(c.dim);
        return SpaceSpec::p_norm(c.dim, parse_real(p));
    }
    throw ParameterError("unknown norm '" + c.norm + "'");
}

QuadraticFormd make_form(const RunConfig& c, std::vector<std::string>& warnings) {
    std::vector<Matrix> coeffs;
    if (c.form.empty()) {
        coeffs.assign(static_cast<std::size_t>(c.codim), Matrix::Identity(c.dim, c.dim));
    } else {
        const auto blocks = split(c.form, '|');
        if (static_cast<int>(blocks.size()) != c.codim)
            throw ParameterError("--form needs one matrix per codomain coordinate (separated by '|')");
        for (const auto& b : blocks) coeffs.push_back(parse_matrix(b, c.dim, c.dim, "--form"));
    }
    bool symmetrized = false;
    QuadraticFormd q = make_quadratic(c.dim, c.codim, coeffs, &symmetrized);
    if (symmetrized) warnings.emplace_back("coefficient matrix was not symmetric and was replaced by (B + B^T)/2");
    return q;
}

MapHandle make_map(const RunConfig& c, const SpaceSpec& space, std::vector<std::string>& warnings) {
    if (c.map == "quadratic") {
        const NoiseModel noise = parse_noise(c.noise, c.dim, c.seed);
        return make_perturbed(make_form(c, warnings), noise, space);
    }
    if (c.noise != "none") throw ParameterError("--noise applies to --map quadratic only");
    if (c.map == "cubic") return make_cubic(c.dim, c.codim);
    if (c.map == "linear") {
        Matrix l = Matrix::Zero(c.codim, c.dim);
        if (c.linear.empty()) {
            for (int k = 0; k < std::min(c.codim, c.dim); ++k) l(k, k) = 1.0;
        } else {
            l = parse_matrix(c.linear, c.codim, c.dim, "--linear");
        }
        return make_odd_witness(l);
    }
    throw ParameterError("unknown map '" + c.map + "'");
}

double radius_for(const RunConfig& c) {
    const double r = c.radius_max.value_or(std::max(2.0, c.d));
    if (!(r > 0.0)) throw ParameterError("--radius-max must be > 0");
    return r;
}

void require_samples(const RunConfig& c) {
    if (c.samples < 1) throw ParameterError("--samples must be >= 1");
}

std::vector<Exponents> make_grid(const std::string& text) {
    if (text.empty()) return default_exponent_grid();
    std::vector<Exponents> grid;
    for (const auto& tuple : split(text, ';')) {
        const Vector e = parse_vector(tuple, 4, "exponent tuple");
        grid.push_back(Exponents::make(e[0], e[1], e[2], e[3]));
    }
    if (grid.empty()) throw ParameterError("exponent grid must be nonempty");
    return grid;
}

Report finish(const RunConfig& c, json results, int exit_code, const std::string& status,
              const std::vector<std::string>& warnings) {
    Report rep;
    rep.json["schema_version"] = kSchemaVersion;
    rep.json["command"] = c.command;
    rep.json["config"] = to_json(c);
    rep.json["results"] = std::move(results);
    rep.json["summary"] = json{{"status", status}, {"pass", exit_code == kPass}, {"exit_code", exit_code},
                               {"warnings", warnings}};
    rep.exit_code = exit_code;
    return rep;
}

std::string csv_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Subcommands

Report run_certify(const RunConfig& c) {
    require_samples(c);
    std::vector<std::string> warnings;
    const SpaceSpec space = make_space(c);
    if (space.is_quasi_norm()) warnings.emplace_back("p < 1 defines a quasi-norm, not a norm");
    const EquationParams params = EquationParams::parse(c.r);
    const MapHandle f = make_map(c, space, warnings);
    if (c.delta && !(*c.delta >= 0.0)) throw ParameterError("--delta must be >= 0");

    const Sampler sampler{c.seed, c.samples, radius_for(c), RestrictedPairsMode{c.d}};
    CertifyOptions opts;
    opts.max_iters = c.iters;
    opts.tol = c.tol;
    opts.delta_override = c.delta;
    const StabilityCertificate cert = certify(f, params, c.d, space, sampler, opts);
    for (const auto& w : cert.warnings) warnings.push_back(w);

    json res;
    res["params"] = to_json(params);
    res["d"] = cert.d;
    res["delta_hat"] = cert.delta_hat;
    res["delta_override"] = cert.delta_override ? json(*cert.delta_override) : json(nullptr);
    res["bound_basis"] = cert.delta_override ? "analytic delta override" : "bound computed from observed delta_hat";
    res["constants"] = to_json(cert.constants);
    res["bound_used"] = cert.bound_used;
    res["max_deviation"] = cert.max_deviation;
    res["pass"] = cert.pass;
    res["status"] = to_string(cert.status);
    res["evenness_defect"] = cert.evenness_defect;
    res["unconverged_probes"] = cert.unconverged_probes;
    res["seed"] = cert.seed;
    res["pair_count"] = cert.pair_count;
    res["probe_count"] = static_cast<int>(cert.probes.size());
    json probes = json::array();
    for (std::size_t i = 0; i < cert.probes.size(); ++i) {
        probes.push_back(json{{"x", vec_json(cert.probes[i])},
                              {"Q", vec_json(cert.q_samples[i])},
                              {"deviation", cert.deviations[i]}});
    }
    res["probes"] = std::move(probes);

    int code = kPass;
    if (cert.status == CertificateStatus::Fail) code = kFail;
    if (cert.status == CertificateStatus::Inconclusive) code = kInconclusive;
    Report rep = finish(c, std::move(res), code, to_string(cert.status), warnings);

    if (c.emit_samples) {
        std::ostringstream csv;
        for (int i = 1; i <= c.dim; ++i) csv << "x" << i << ",";
        for (int i = 1; i <= c.dim; ++i) csv << "y" << i << ",";
        csv << "residual_norm\n";
        for (std::size_t k = 0; k < cert.residuals.pairs.size(); ++k) {
            const auto& [x, y] = cert.residuals.pairs[k];
            for (Eigen::Index i = 0; i < x.size(); ++i) csv << csv_number(x[i]) << ",";
            for (Eigen::Index i = 0; i < y.size(); ++i) csv << csv_number(y[i]) << ",";
            csv << csv_number(cert.residuals.residual_norms[k]) << "\n";
        }
        rep.csv = csv.str();
    }
    return rep;
}

Report run_detect_ip(const RunConfig& c) {
    require_samples(c);
    std::vector<std::string> warnings;
    const SpaceSpec space = make_space(c);
    if (space.is_quasi_norm()) warnings.emplace_back("p < 1 defines a quasi-norm, not a norm");
    const Sampler sampler{c.seed, c.samples, c.radius_max.value_or(1.0), BallMode{}};
    const InnerProductVerdict v = detect_inner_product(space, sampler, c.tol);

    json res;
    res["space"] = space.describe();
    res["accepted"] = v.accepted;
    res["max_parallelogram_defect"] = v.max_parallelogram_defect;
    res["max_normalized_defect"] = v.max_normalized_defect;
    res["witness"] = json{{"x", vec_json(v.worst_pair.first)}, {"y", vec_json(v.worst_pair.second)}};
    res["recovered_gram"] = v.recovered_gram ? mat_json(*v.recovered_gram) : json(nullptr);
    res["bilinearity_defect"] = v.bilinearity_defect ? json(*v.bilinearity_defect) : json(nullptr);
    res["pair_count"] = v.pair_count;
    res["seed"] = v.seed;
    res["tol"] = v.tol;
    return finish(c, std::move(res), v.accepted ? kPass : kFail, v.accepted ? "accepted" : "rejected", warnings);
}

Report run_exponents(const RunConfig& c) {
    require_samples(c);
    std::vector<std::string> warnings;
    const SpaceSpec space = make_space(c);
    const EquationParams params = EquationParams::parse(c.r);
    if (!(params.r() > 0.0 && params.r() < 1.0))
        warnings.emplace_back("the exponent-forcing result assumes 0 < r < 1");
    const auto grid = make_grid(c.grid);
    const Sampler sampler{c.seed, c.samples, c.radius_max.value_or(1.0), BallMode{}};
    const auto table = exponent_scan(space, params, grid, sampler, c.tol);

    json rows = json::array();
    json flagged = json::array();
    for (const auto& row : table) {
        const json exps = json::array({row.exps.p, row.exps.q, row.exps.u, row.exps.v});
        rows.push_back(json{{"exponents", exps},
                            {"sup_defect", row.sup_defect},
                            {"sup_normalized_defect", row.sup_normalized_defect},
                            {"evaluated", row.evaluated},
                            {"excluded", row.excluded},
                            {"flagged", row.flagged}});
        if (row.flagged) flagged.push_back(exps);
    }
    json res;
    res["space"] = space.describe();
    res["params"] = to_json(params);
    res["constants"] = to_json(stability_constants(params, c.d, c.delta.value_or(0.0)));
    res["tol"] = c.tol;
    res["seed"] = c.seed;
    res["table"] = std::move(rows);
    res["flagged"] = std::move(flagged);
    return finish(c, std::move(res), kPass, "scanned", warnings);
}

Report run_profile(const RunConfig& c) {
    std::vector<std::string> warnings;
    if (c.n_min < 0 || c.n_max <= c.n_min) throw ParameterError("--n-min/--n-max need 0 <= n_min < n_max");
    if (c.n_max - c.n_min + 1 < 4) throw ParameterError("profile needs at least 4 shells (n_max - n_min >= 3)");
    const int per_shell = c.per_shell.value_or(c.samples);
    if (per_shell < 1) throw ParameterError("--per-shell must be >= 1");
    const SpaceSpec space = make_space(c);
    const EquationParams params = EquationParams::parse(c.r);
    const MapHandle f = make_map(c, space, warnings);

    const ShellProfile profile = shell_delta_profile(f, params, space, c.n_min, c.n_max, per_shell, c.seed);
    const AsymptoticVerdict v = asymptotic_verdict(profile, c.decay_tol);

    json shells = json::array();
    for (int k = 0; k < profile.shells(); ++k) {
        shells.push_back(json{{"n", profile.shell_index(k)},
                              {"delta_n", profile.delta[static_cast<std::size_t>(k)]},
                              {"count", profile.counts[static_cast<std::size_t>(k)]}});
    }
    json res;
    res["params"] = to_json(params);
    res["shells"] = std::move(shells);
    res["verdict"] = to_string(v.kind);
    res["rule"] = json{{"decay_tol", v.decay_tol},
                       {"tail_window", v.tail_window},
                       {"tail_max", v.tail_max},
                       {"monotone_window", v.monotone_window},
                       {"tail_non_decreasing", v.tail_non_decreasing},
                       {"jitter", v.jitter}};
    const int tail_start = profile.shell_index(profile.shells() - v.tail_window);
    res["constants"] = to_json(stability_constants(params, tail_start, v.tail_max));
    res["seed"] = c.seed;

    int code = kInconclusive;
    if (v.kind == AsymptoticVerdictKind::AsymptoticallyQuadratic) code = kPass;
    if (v.kind == AsymptoticVerdictKind::PersistentDefect) code = kFail;
    Report rep = finish(c, std::move(res), code, to_string(v.kind), warnings);
    if (c.emit_samples) {
        std::ostringstream csv;
        csv << "shell,delta_n\n";
        for (int k = 0; k < profile.shells(); ++k)
            csv << profile.shell_index(k) << "," << csv_number(profile.delta[static_cast<std::size_t>(k)]) << "\n";
        rep.csv = csv.str();
    }
    return rep;
}

Report run_residual(const RunConfig& c) {
    std::vector<std::string> warnings;
    const SpaceSpec space = make_space(c);
    const EquationParams params = EquationParams::parse(c.r);
    const MapHandle f = make_map(c, space, warnings);
    const Vector x = parse_vector(c.x, c.dim, "--x");
    const Vector y = parse_vector(c.y, c.dim, "--y");

    const Vector rq = residual_q(f, x, y);
    const Vector rgq = residual_gq(f, params, x, y);
    const ChainDefects chain = chain_defects(parity_decompose(f), params, x, y);

    json res;
    res["params"] = to_json(params);
    res["x"] = vec_json(x);
    res["y"] = vec_json(y);
    res["q_residual"] = vec_json(rq);
    res["q_residual_norm"] = codomain_norm(rq);
    res["gq_residual"] = vec_json(rgq);
    res["gq_residual_norm"] = codomain_norm(rgq);
    res["chain"] = json{{"rx_scaling", chain.rx_scaling},
                        {"sy_scaling", chain.sy_scaling},
                        {"doubling", chain.doubling},
                        {"even_expansion", chain.even_expansion}};
    res["constants"] = to_json(stability_constants(params, c.d, c.delta.value_or(codomain_norm(rgq))));
    return finish(c, std::move(res), kPass, "evaluated", warnings);
}

Report run(const RunConfig& c) {
    if (c.command == "certify") return run_certify(c);
    if (c.command == "detect-ip") return run_detect_ip(c);
    if (c.command == "exponents") return run_exponents(c);
    if (c.command == "profile") return run_profile(c);
    if (c.command == "residual") return run_residual(c);
    throw ParameterError("unknown subcommand '" + c.command + "'");
}

// ---------------------------------------------------------------------------
// Argument parsing

std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& help) {
    RunConfig cfg;
    CLI::App app{"Hyers-Ulam stability laboratory for quadratic functional equations", "qstab"};
    app.require_subcommand(1, 1);
    app.set_config("--config", "", "flat key=value config file; flags override its values");
    app.allow_config_extras(CLI::config_extras_mode::error);

    app.add_option("--dim", cfg.dim, "domain dimension n");
    app.add_option("--codim", cfg.codim, "codomain dimension m");
    app.add_option("--norm", cfg.norm, "euclidean | p:<v> | sup | weighted");
    app.add_option("--gram", cfg.gram, "weighted-norm matrix rows, e.g. \"2,0;0,3\"");
    app.add_option("--map", cfg.map, "quadratic | cubic | linear");
    app.add_option("--form", cfg.form, "quadratic-form matrices, rows ';' and coordinates '|'");
    app.add_option("--linear", cfg.linear, "m x n matrix for --map linear");
    app.add_option("--r", cfg.r, "r as a decimal or an exact fraction p/q");
    app.add_option("--d", cfg.d, "restricted-domain radius d");
    app.add_option("--delta", cfg.delta, "analytic delta override");
    app.add_option("--noise", cfg.noise, "none | constant:<c> | uniform:<delta> | decay:<c>,<alpha> | sine:<c>");
    app.add_option("--samples", cfg.samples, "sample count");
    app.add_option("--radius-max", cfg.radius_max, "sampling ball radius");
    app.add_option("--seed", cfg.seed, "64-bit seed");
    app.add_option("--iters", cfg.iters, "direct-method iterations");
    app.add_option("--tol", cfg.tol, "relative tolerance");
    app.add_option("--n-min", cfg.n_min, "first shell");
    app.add_option("--n-max", cfg.n_max, "last shell (inclusive)");
    app.add_option("--per-shell", cfg.per_shell, "pairs per shell (default: --samples)");
    app.add_option("--decay-tol", cfg.decay_tol, "asymptotic verdict tolerance");
    app.add_option("--grid", cfg.grid, "exponent tuples \"p,q,u,v;...\"");
    app.add_option("--x", cfg.x, "x for residual, comma separated");
    app.add_option("--y", cfg.y, "y for residual, comma separated");
    app.add_option("--out", cfg.out, "report path (default: stdout)");
    app.add_flag("--emit-samples", cfg.emit_samples, "write a CSV sample dump next to the report");

    for (const char* name : {"certify", "detect-ip", "exponents", "profile", "residual"}) {
        app.add_subcommand(name)->fallthrough();
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();  // program name
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        help << app.help();
        return std::nullopt;
    } catch (const CLI::CallForAllHelp&) {
        help << app.help("", CLI::AppFormatMode::All);
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw ParameterError(e.what());
    }
    cfg.command = app.get_subcommands().front()->get_name();
    return cfg;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        const auto cfg = parse_args(args, out);
        if (!cfg) return kPass;
        const auto start = std::chrono::steady_clock::now();
        Report rep = run(*cfg);
        const auto stop = std::chrono::steady_clock::now();
        rep.json["runtime_ms"] = std::chrono::duration<double, std::milli>(stop - start).count();

        const std::string text = rep.json.dump(2) + "\n";
        if (cfg->out.empty()) {
            out << text;
        } else {
            std::ofstream f(cfg->out);
            if (!f) throw ParameterError("cannot open output file '" + cfg->out + "'");
            f << text;
        }
        if (cfg->emit_samples && !rep.csv.empty()) {
            const std::string path = cfg->out.empty() ? "qstab_samples.csv" : cfg->out + ".csv";
            std::ofstream f(path);
            if (!f) throw ParameterError("cannot open sample file '" + path + "'");
            f << rep.csv;
        }
        for (const auto& w : rep.json["summary"]["warnings"]) err << "warning: " << w.get<std::string>() << "\n";
        return rep.exit_code;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const UndefinedValueError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const ExtractionError& e) {
        err << "inconclusive: " << e.what() << "\n";
        return kInconclusive;
    }
}

}  // namespace qstab::cli
