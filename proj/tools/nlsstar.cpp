// Command-line front end for the star-graph NLS toolkit.
//
// Single records print as JSON, sweeps as CSV; --format overrides.
// Exit codes: 0 success, 2 invalid input, 3 search failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "nlsstar/nlsstar.hpp"

namespace {

using nlohmann::ordered_json;
using namespace nlsstar;

constexpr int kExitDomain = 2;
constexpr int kExitSearch = 3;

struct Common {
    std::string format;
    std::string output;
    std::string profile;
    double quad_tol = kDefaultQuadTolerance;
    double omega_rel_tol = SolverTolerances{}.omega_rel;
    double rel_tol = CriticalMassOptions{}.rel_tol;
};

SolverTolerances solver_tolerances(const Common& c) {
    SolverTolerances t;
    t.quad_abs = c.quad_tol;
    t.omega_rel = c.omega_rel_tol;
    return t;
}

// Applies --profile before explicit tolerance flags are honoured.
void apply_profile(Common& c, const CLI::App& app) {
    if (c.profile.empty()) return;
    double quad = c.quad_tol, omega = c.omega_rel_tol, rel = c.rel_tol;
    if (c.profile == "fast") {
        quad = 1e-9, omega = 1e-8, rel = 1e-7;
    } else if (c.profile == "precise") {
        quad = 1e-14, omega = 1e-13, rel = 1e-12;
    }
    if (app.count("--quad-tol") == 0) c.quad_tol = quad;
    if (app.count("--omega-rel-tol") == 0) c.omega_rel_tol = omega;
    if (app.count("--rel-tol") == 0) c.rel_tol = rel;
}

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--format", c.format,
                    "Output format (default: json for records, csv for sweeps)")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("-o,--output", c.output,
                    "Output file; relative paths resolve under $NLSSTAR_OUTPUT_DIR when set");
    cmd->add_option("--profile", c.profile, "Tolerance bundle")
        ->check(CLI::IsMember({"fast", "precise"}));
    cmd->add_option("--quad-tol", c.quad_tol, "Quadrature tolerance")->capture_default_str();
    cmd->add_option("--omega-rel-tol", c.omega_rel_tol, "Relative tolerance on omega")
        ->capture_default_str();
    cmd->add_option("--rel-tol", c.rel_tol, "Relative tolerance of threshold searches")
        ->capture_default_str();
}

std::filesystem::path resolve_output(const std::string& name) {
    std::filesystem::path path(name);
    if (path.is_relative()) {
        if (const char* dir = std::getenv("NLSSTAR_OUTPUT_DIR"); dir && *dir)
            path = std::filesystem::path(dir) / path;
    }
    return path;
}

void emit(const Common& c, const std::string& text) {
    if (c.output.empty()) {
        std::cout << text;
        return;
    }
    const auto path = resolve_output(c.output);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    out << text;
}

std::string num(double x) { return fmt::format("{}", x); }

// Flat records: JSON object or a two-line CSV with the keys as header.
std::string render_record(const ordered_json& record, const std::string& format) {
    if (format == "json") return record.dump(2) + "\n";
    std::string header, row;
    for (auto it = record.begin(); it != record.end(); ++it) {
        if (!header.empty()) {
            header += ',';
            row += ',';
        }
        header += it.key();
        const auto& v = it.value();
        if (v.is_string()) row += v.get<std::string>();
        else if (v.is_number_float()) row += num(v.get<double>());
        else row += v.dump();
    }
    return header + "\n" + row + "\n";
}

ordered_json report_json(const ExistenceReport& r) {
    return {{"p", r.params.p()},
            {"q", r.params.q()},
            {"N", r.n_edges},
            {"mu", r.mu},
            {"radial_energy", r.radial_energy},
            {"line_energy", r.line_energy},
            {"margin", r.margin},
            {"verdict", to_string(r.verdict)},
            {"regime", to_string(r.regime)},
            {"boundary", r.boundary}};
}

std::vector<double> linspace(double a, double b, int steps) {
    std::vector<double> out;
    if (steps <= 0) return {a};
    for (int i = 0; i <= steps; ++i) out.push_back(a + (b - a) * i / steps);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ground states of the doubly nonlinear NLS on star graphs"};
    app.require_subcommand(1);

    Common common;
    double p = 4.0, q = 3.0, mu = 1.0;
    int n_edges = 3, bump_count = 0;

    auto add_pq = [&](CLI::App* cmd) {
        cmd->add_option("--p", p, "Power of the standard nonlinearity, 2 < p < 6")->required();
        cmd->add_option("--q", q, "Power of the vertex nonlinearity, 2 < q < 4")->required();
    };

    // soliton
    auto* soliton = app.add_subcommand("soliton", "Line soliton at given mass or frequency");
    std::optional<double> sol_mu, sol_omega;
    soliton->add_option("--p", p, "Power nonlinearity, 2 < p < 6")->required();
    auto* mu_opt = soliton->add_option("--mu", sol_mu, "Mass");
    auto* om_opt = soliton->add_option("--omega", sol_omega, "Frequency");
    mu_opt->excludes(om_opt);
    add_common(soliton, common);

    // stationary
    auto* stationary = app.add_subcommand("stationary", "Stationary state eta_J at mass mu");
    add_pq(stationary);
    stationary->add_option("-n,--n", n_edges, "Number of half-lines N")->capture_default_str();
    stationary->add_option("-j,--j", bump_count, "Edges carrying the soliton peak J")
        ->capture_default_str();
    stationary->add_option("--mu", mu, "Mass")->required();
    add_common(stationary, common);

    // exists
    auto* exists = app.add_subcommand("exists", "Ground-state existence verdict");
    add_pq(exists);
    exists->add_option("-n,--n", n_edges, "Number of half-lines N")->capture_default_str();
    exists->add_option("--mu", mu, "Mass")->required();
    add_common(exists, common);

    // critical-mass
    auto* crit_mass = app.add_subcommand("critical-mass", "Mass threshold for existence");
    add_pq(crit_mass);
    crit_mass->add_option("-n,--n", n_edges, "Number of half-lines N")->capture_default_str();
    add_common(crit_mass, common);

    // critical-n
    auto* crit_n = app.add_subcommand("critical-n", "Critical edge count in the balanced case");
    int n_cap = 10000;
    crit_n->add_option("--p", p, "Power nonlinearity, 2 < p < 6")->required();
    crit_n->add_option("--cap", n_cap, "Largest N examined")->capture_default_str();
    add_common(crit_n, common);

    // r-curve
    auto* r_cmd = app.add_subcommand("r-curve", "R(p) = I(sqrt(p/(p+18)))/I(0) on a grid");
    double p_min = 2.1, p_max = 5.99;
    int steps = 200;
    r_cmd->add_option("--p-min", p_min)->capture_default_str();
    r_cmd->add_option("--p-max", p_max)->capture_default_str();
    r_cmd->add_option("--steps", steps, "Number of intervals")->capture_default_str();
    add_common(r_cmd, common);

    // phase-diagram
    auto* phase = app.add_subcommand("phase-diagram", "Existence verdicts over a grid");
    std::vector<double> p_list{4.0}, q_list{2.5, 3.0, 3.5}, mu_list{0.5, 1.0, 2.0, 4.0};
    std::vector<int> n_list{3};
    unsigned threads = 0;
    phase->add_option("--p", p_list, "p values")->delimiter(',')->capture_default_str();
    phase->add_option("--q", q_list, "q values")->delimiter(',')->capture_default_str();
    phase->add_option("-n,--n", n_list, "N values")->delimiter(',')->capture_default_str();
    phase->add_option("--mu", mu_list, "Mass values")->delimiter(',')->capture_default_str();
    phase->add_option("--threads", threads, "Worker threads, 0 = hardware concurrency");
    add_common(phase, common);

    // stability
    auto* stability = app.add_subcommand("stability", "Hessian test of the reduced energy");
    double fd_step = 1e-4;
    add_pq(stability);
    stability->add_option("-n,--n", n_edges, "Number of half-lines N")->capture_default_str();
    stability->add_option("--mu", mu, "Mass")->required();
    stability->add_option("--step", fd_step, "Relative finite-difference step")
        ->capture_default_str();
    add_common(stability, common);

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Discrete constrained minimization");
    double length = 40.0, dx = 0.005, noise = 0.01;
    std::uint64_t seed = 1;
    std::string init = "stationary";
    std::string field_csv;
    MinimizeOptions min_opts;
    add_pq(oracle);
    oracle->add_option("-n,--n", n_edges, "Number of half-lines N")->capture_default_str();
    oracle->add_option("--mu", mu, "Mass")->required();
    oracle->add_option("--L", length, "Edge truncation length")->capture_default_str();
    oracle->add_option("--dx", dx, "Grid spacing")->capture_default_str();
    oracle->add_option("--init", init, "Initial field")
        ->check(CLI::IsMember({"stationary", "far-soliton"}))
        ->capture_default_str();
    oracle->add_option("--noise", noise, "Relative multiplicative noise on the initial field")
        ->capture_default_str();
    oracle->add_option("--seed", seed, "Noise seed")->capture_default_str();
    oracle->add_option("--max-iter", min_opts.max_iter)->capture_default_str();
    oracle->add_option("--tol", min_opts.tol, "Relative energy decrease to stop")
        ->capture_default_str();
    oracle->add_option("--field-csv", field_csv, "Write the final field as CSV");
    add_common(oracle, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitDomain;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        if (common.format.empty()) common.format = cmd == r_cmd || cmd == phase ? "csv" : "json";
        apply_profile(common, *cmd);
        const SolverTolerances tol = solver_tolerances(common);

        if (cmd == soliton) {
            if (!sol_mu && !sol_omega) throw DomainError("soliton: give either --mu or --omega");
            const Soliton s = sol_mu ? soliton_of_mass(p, *sol_mu)
                                     : make_soliton(p, *sol_omega);
            emit(common, render_record({{"p", s.p},
                                        {"omega", s.omega},
                                        {"mass", s.mass},
                                        {"energy", s.energy},
                                        {"theta_p", theta_p(p)}},
                                       common.format));
        } else if (cmd == stationary) {
            const auto s = solve_stationary(NonlinearParams(p, q), n_edges, bump_count, mu, tol);
            emit(common, render_record({{"p", p},
                                        {"q", q},
                                        {"N", n_edges},
                                        {"J", bump_count},
                                        {"mu", mu},
                                        {"omega", s.omega},
                                        {"t", s.t},
                                        {"shift", s.shift},
                                        {"mass", s.mass},
                                        {"vertex_value", s.vertex_value},
                                        {"energy", s.energy},
                                        {"regime", to_string(s.params.regime())}},
                                       common.format));
        } else if (cmd == exists) {
            const auto r = exists_ground_state(NonlinearParams(p, q), n_edges, mu, tol);
            emit(common, render_record(report_json(r), common.format));
        } else if (cmd == crit_mass) {
            CriticalMassOptions opts;
            opts.rel_tol = common.rel_tol;
            opts.solver = tol;
            const auto r = critical_mass(NonlinearParams(p, q), n_edges, opts);
            emit(common, render_record({{"p", p},
                                        {"q", q},
                                        {"N", n_edges},
                                        {"mu_critical", r.mu_critical},
                                        {"bracket_low", r.bracket.low},
                                        {"bracket_high", r.bracket.high},
                                        {"iterations", r.iterations},
                                        {"side", to_string(r.side)},
                                        {"regime", to_string(r.params.regime())}},
                                       common.format));
        } else if (cmd == crit_n) {
            const int n_p = critical_N(p, n_cap);
            emit(common, render_record({{"p", p}, {"N_p", n_p}}, common.format));
        } else if (cmd == r_cmd) {
            detail::require(p_min <= p_max, "r-curve: need p-min <= p-max");
            const auto curve = r_curve(linspace(p_min, p_max, steps));
            if (common.format == "json") {
                ordered_json rows = ordered_json::array();
                for (const auto& pt : curve)
                    rows.push_back({{"p", pt.p}, {"R", pt.r}, {"condcrit_lhs", 3.0 * pt.r}});
                emit(common, rows.dump(2) + "\n");
            } else {
                std::string out = "p,R,condcrit_lhs\n";
                for (const auto& pt : curve)
                    out += fmt::format("{},{},{}\n", pt.p, pt.r, 3.0 * pt.r);
                emit(common, out);
            }
        } else if (cmd == phase) {
            std::vector<ExponentPair> pairs;
            for (double pp : p_list)
                for (double qq : q_list) pairs.push_back({pp, qq});
            const auto cells = phase_diagram(pairs, n_list, mu_list, threads, tol);
            if (common.format == "json") {
                ordered_json rows = ordered_json::array();
                for (const auto& c : cells) {
                    if (c.report) {
                        rows.push_back(report_json(*c.report));
                    } else {
                        rows.push_back({{"p", c.p}, {"q", c.q}, {"N", c.n_edges}, {"mu", c.mu},
                                        {"error", c.error}});
                    }
                }
                emit(common, rows.dump(2) + "\n");
            } else {
                std::string out = "p,q,N,mu,radial_energy,line_energy,margin,verdict,boundary\n";
                for (const auto& c : cells) {
                    if (c.report) {
                        const auto& r = *c.report;
                        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", c.p, c.q, c.n_edges,
                                           c.mu, r.radial_energy, r.line_energy, r.margin,
                                           to_string(r.verdict), r.boundary);
                    } else {
                        out += fmt::format("{},{},{},{},nan,nan,nan,error,false\n", c.p, c.q,
                                           c.n_edges, c.mu);
                        std::cerr << fmt::format("cell p={} q={} N={} mu={}: {}\n", c.p, c.q,
                                                 c.n_edges, c.mu, c.error);
                    }
                }
                emit(common, out);
            }
        } else if (cmd == stability) {
            const NonlinearParams params(p, q);
            const auto c = hessian_check(params, n_edges, mu, fd_step, common.quad_tol);
            const auto verdict = exists_ground_state(params, n_edges, mu, tol);
            ordered_json rec{{"p", p},
                             {"q", q},
                             {"N", n_edges},
                             {"mu", mu},
                             {"e_mm", c.e_mm},
                             {"e_hh", c.e_hh},
                             {"eigenvalues", c.eigenvalues},
                             {"multiplicities", c.multiplicities},
                             {"cross_term", c.cross_term},
                             {"cross_relative", c.cross_relative},
                             {"richardson_consistent", c.richardson_consistent},
                             {"positive_definite", c.positive_definite},
                             {"ground_state_exists", verdict.verdict == Verdict::exists},
                             {"step", c.step}};
            if (common.format == "csv") {
                rec.erase("eigenvalues");
                rec.erase("multiplicities");
                rec["lambda_mass_sum"] = c.eigenvalues[0];
                rec["lambda_mass_diff"] = c.eigenvalues[1];
                rec["lambda_vertex"] = c.eigenvalues[2];
            }
            emit(common, render_record(rec, common.format));
        } else if (cmd == oracle) {
            const NonlinearParams params(p, q);
            const GridSpec grid(n_edges, length, dx);
            const auto state = solve_stationary(params, n_edges, 0, mu, tol);
            DiscreteField start(grid);
            if (init == "stationary") {
                start = sample_stationary(state, grid);
            } else {
                const double omega = omega_of_mass_line(p, mu);
                const double centre = 0.5 * length;
                start = sample_field(grid, [&](int e, double x) {
                    return e == 0 ? soliton_value(p, omega, x - centre) : 0.0;
                });
            }
            if (noise > 0.0) start = perturb(start, noise, seed);
            const auto res = minimize(params, grid, mu, start, min_opts);
            double gn_slack = std::numeric_limits<double>::infinity();
            for (const auto& h : res.history)
                gn_slack = std::min(gn_slack,
                                    h.energy - gn_coercivity_bound(params, mu, h.kinetic_norm));
            emit(common, render_record({{"p", p},
                                        {"q", q},
                                        {"N", n_edges},
                                        {"mu", mu},
                                        {"L", length},
                                        {"dx", dx},
                                        {"init", init},
                                        {"energy", res.energy},
                                        {"iterations", res.iterations},
                                        {"converged", res.converged},
                                        {"vertex_value", res.field.vertex},
                                        {"mass", discrete_mass(res.field)},
                                        {"radial_energy", state.energy},
                                        {"radial_vertex_value", state.vertex_value},
                                        {"line_energy", line_energy(p, mu)},
                                        {"min_gn_slack", gn_slack}},
                                       common.format));
            if (!field_csv.empty()) {
                std::ostringstream csv;
                write_field_csv(csv, res.field);
                Common file = common;
                file.output = field_csv;
                emit(file, csv.str());
            }
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const SearchFailure& e) {
        std::cerr << "search failure: " << e.what() << '\n';
        return kExitSearch;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
