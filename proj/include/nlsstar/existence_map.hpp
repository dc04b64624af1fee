#pragma once

/**
 * @file existence_map.hpp
 * @brief Ground-state existence on S_N, the critical mass and the critical
 *        edge count.
 *
 * Ground states at mass μ exist iff the radial level F_rad(μ), the energy of
 * η_0 at that mass, does not exceed the line level E(μ). Both scale as
 * μ^{2β+1} up to the vertex correction, so everything is phrased through
 *
 *     K(μ) = F_rad(μ) / μ^{2β+1},       exists ⇔ K(μ) + θ_p ≤ 0.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nlsstar/errors.hpp"
#include "nlsstar/quadrature.hpp"
#include "nlsstar/roots.hpp"
#include "nlsstar/soliton_line.hpp"
#include "nlsstar/stationary_states.hpp"

namespace nlsstar {

enum class Verdict { exists, not_exists };

inline const char* to_string(Verdict v) {
    return v == Verdict::exists ? "exists" : "not_exists";
}

/// Relative width of the band around margin = 0 flagged as boundary.
inline constexpr double kBoundaryRelTol = 1e-9;

struct ExistenceReport {
    NonlinearParams params;
    int n_edges;
    double mu;
    double radial_energy;
    double line_energy;
    double margin;
    Verdict verdict;
    Regime regime;
    bool boundary;
};

enum class CriticalSide { exists_below, exists_above };

inline const char* to_string(CriticalSide s) {
    return s == CriticalSide::exists_below ? "exists_below" : "exists_above";
}

struct CriticalMassResult {
    NonlinearParams params;
    int n_edges;
    double mu_critical;
    roots::Bracket bracket;
    std::size_t iterations;
    CriticalSide side;
};

struct CriticalMassOptions {
    double rel_tol = 1e-10;
    double mu_min = 1e-8;
    double mu_max = 1e8;
    SolverTolerances solver{};
};

inline ExistenceReport exists_ground_state(const NonlinearParams& params, int n_edges, double mu,
                                           const SolverTolerances& tol = {}) {
    detail::check_positive(mu, "mass");
    const double radial = energy_eta(params, n_edges, 0, mu, tol);
    const double line = line_energy(params.p(), mu);
    const double margin = radial - line;
    const bool boundary = std::abs(margin) <= kBoundaryRelTol * std::abs(line);
    const Verdict verdict = margin <= 0.0 || boundary ? Verdict::exists : Verdict::not_exists;
    return {params, n_edges, mu, radial, line, margin, verdict, params.regime(), boundary};
}

inline double K_value(const NonlinearParams& params, int n_edges, double mu,
                      const SolverTolerances& tol = {}) {
    detail::check_positive(mu, "mass");
    return energy_eta(params, n_edges, 0, mu, tol) / std::pow(mu, 2.0 * params.beta() + 1.0);
}

/// K'(μ) = (p+2-2q)/(q(6-p)) · η_0(0)^q / μ^{2β+2}.
inline double K_derivative(const NonlinearParams& params, int n_edges, double mu,
                           const SolverTolerances& tol = {}) {
    detail::check_positive(mu, "mass");
    const double p = params.p();
    const double q = params.q();
    const auto state = solve_stationary(params, n_edges, 0, mu, tol);
    return (p + 2.0 - 2.0 * q) / (q * (6.0 - p)) * std::pow(state.vertex_value, q) /
           std::pow(mu, 2.0 * params.beta() + 2.0);
}

inline CriticalMassResult critical_mass(const NonlinearParams& params, int n_edges,
                                        const CriticalMassOptions& opts = {}) {
    detail::require(n_edges >= 2, "a star graph needs at least 2 half-lines");
    if (params.regime() == Regime::balanced) {
        throw RegimeError(
            "critical_mass is undefined for balanced exponents q = p/2 + 1: existence "
            "does not depend on the mass there");
    }
    if (n_edges == 2) {
        throw NoThresholdError(
            "critical_mass: with N = 2 ground states exist for every mass, no threshold");
    }
    detail::require(opts.rel_tol > 0.0 && opts.rel_tol < 1.0, "rel_tol must lie in (0, 1)");
    detail::require(opts.mu_min > 0.0 && opts.mu_min < opts.mu_max, "invalid mass bounds");

    const bool weak = params.regime() == Regime::weak_vertex;
    const double theta = theta_p(params.p());
    // Oriented so that it increases through the root in both regimes.
    auto oriented = [&](double mu) {
        const double g = K_value(params, n_edges, mu, opts.solver) + theta;
        return weak ? g : -g;
    };
    const auto bracket = roots::expand_geometric(oriented, 1.0, 2.0, opts.mu_min, opts.mu_max,
                                                 "critical mass search");
    const CriticalSide side = weak ? CriticalSide::exists_below : CriticalSide::exists_above;
    if (bracket.low == bracket.high) {
        return {params, n_edges, bracket.low, bracket, 0, side};
    }
    auto in_log = [&](double log_mu) { return oriented(std::exp(log_mu)); };
    const auto root = roots::bisect(in_log, {std::log(bracket.low), std::log(bracket.high)},
                                    0.5 * opts.rel_tol);
    const roots::Bracket mu_bracket{std::exp(root.bracket.low), std::exp(root.bracket.high)};
    return {params, n_edges, std::exp(root.root), mu_bracket, root.iterations, side};
}

/// Energy of the radial exponential competitor u = c e^{-κx} on every edge.
inline double trial_exponential_energy(const NonlinearParams& params, int n_edges, double mu) {
    detail::require(n_edges >= 2, "a star graph needs at least 2 half-lines");
    detail::check_positive(mu, "mass");
    const double p = params.p();
    const double q = params.q();
    const double n2 = static_cast<double>(n_edges) * n_edges;
    const double vertex_exp = q / (4.0 - q);
    const double bulk_exp = (p - q + 2.0) / (4.0 - q);
    return -(1.0 / q - 0.25) * std::pow(2.0 / n2, vertex_exp) * std::pow(mu, vertex_exp) -
           n2 / (p * p) * std::pow(2.0 / n2, bulk_exp) * std::pow(mu, bulk_exp);
}

/// N · I(√(p/(p+2N²))) / I(0); ground states exist at every mass in the
/// balanced regime iff this is ≤ 2.
inline double condcrit_lhs(double p, int n_edges) {
    detail::check_quad_exponent(p);
    detail::require(n_edges >= 1, "edge count must be positive");
    const double n2 = static_cast<double>(n_edges) * n_edges;
    const double t = std::sqrt(p / (p + 2.0 * n2));
    return n_edges * integral_I(p, t) / integral_I(p, 0.0);
}

/// Closed-form upper bound of condcrit_lhs for p < 4; true when it certifies
/// condcrit_lhs(p, N) ≤ 2.
inline bool critical_N_lower_bound(double p, int n_edges) {
    detail::require(std::isfinite(p) && p > 2.0 && p < 4.0,
                    "critical_N_lower_bound requires 2 < p < 4, got p=" + std::to_string(p));
    detail::require(n_edges >= 1, "edge count must be positive");
    const double n = n_edges;
    const double ratio = p / (p + 2.0 * n * n);
    const double bound = 2.0 * n / (p - 2.0) *
                         std::pow(1.0 - ratio, (4.0 - p) / (p - 2.0)) * (1.0 - std::sqrt(ratio));
    return bound <= 2.0;
}

/// Largest N with condcrit_lhs(p, N) ≤ 2.
inline int critical_N(double p, int cap = 10000) {
    detail::check_line_exponent(p);
    detail::require(cap >= 2, "critical_N cap must be at least 2");
    int n = 2;
    if (p < 4.0) {
        while (n < cap && critical_N_lower_bound(p, n + 1)) ++n;
    }
    while (n < cap) {
        if (condcrit_lhs(p, n + 1) > 2.0) return n;
        ++n;
    }
    throw SearchFailure("critical_N: condition still holds at the cap N=" + std::to_string(cap));
}

/// G(N) = N⁴ - 2πN³ + π²N² - 6πN + 3π².
inline double g_polynomial(int n) {
    detail::require(n >= 1, "g_polynomial requires N >= 1");
    constexpr double pi = std::numbers::pi;
    const double x = n;
    return x * x * x * x - 2.0 * pi * x * x * x + pi * pi * x * x - 6.0 * pi * x + 3.0 * pi * pi;
}

/// R(p) = I(√(p/(p+18))) / I(0), so that condcrit_lhs(p, 3) = 3 R(p).
inline double r_value(double p) {
    detail::check_quad_exponent(p);
    return integral_I(p, std::sqrt(p / (p + 18.0))) / integral_I(p, 0.0);
}

struct RPoint {
    double p;
    double r;
};

inline std::vector<RPoint> r_curve(const std::vector<double>& p_grid) {
    std::vector<RPoint> out;
    out.reserve(p_grid.size());
    for (double p : p_grid) out.push_back({p, r_value(p)});
    return out;
}

/// Closed-form R'(p), differentiating both the exponent and the lower limit.
inline double r_derivative(double p) {
    detail::check_quad_exponent(p);
    const double t = std::sqrt(p / (p + 18.0));
    const double e = mass_exponent(p);
    const double de = -2.0 / ((p - 2.0) * (p - 2.0));
    const double dt = 9.0 * std::sqrt(p + 18.0) / (std::sqrt(p) * (p + 18.0) * (p + 18.0));
    const double full = integral_I(p, 0.0);
    const double tail = integral_I(p, t);
    const double log_full = integral_I_log(p, 0.0, 1.0);
    const double log_tail = integral_I_log(p, t, 1.0);
    const double d_tail = -dt * std::pow(18.0 / (p + 18.0), e) + de * log_tail;
    const double d_full = de * log_full;
    return (d_tail * full - tail * d_full) / (full * full);
}

struct PhaseCell {
    double p;
    double q;
    int n_edges;
    double mu;
    std::optional<ExistenceReport> report;
    std::string error;
};

struct ExponentPair {
    double p;
    double q;
};

/// One row per (p, q, N, μ) in nested grid order; failures are recorded in
/// the row instead of aborting the scan.
inline std::vector<PhaseCell> phase_diagram(const std::vector<ExponentPair>& params_grid,
                                            const std::vector<int>& n_list,
                                            const std::vector<double>& mu_grid,
                                            unsigned threads = 0,
                                            const SolverTolerances& tol = {}) {
    std::vector<PhaseCell> cells;
    cells.reserve(params_grid.size() * n_list.size() * mu_grid.size());
    for (const auto& pq : params_grid)
        for (int n : n_list)
            for (double mu : mu_grid) cells.push_back({pq.p, pq.q, n, mu, std::nullopt, {}});

    auto run_cell = [&tol](PhaseCell& cell) {
        try {
            cell.report = exists_ground_state(NonlinearParams(cell.p, cell.q), cell.n_edges,
                                              cell.mu, tol);
        } catch (const std::exception& ex) {
            cell.error = ex.what();
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, cells.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(cells[i]);
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    return cells;
}

}  // namespace nlsstar
