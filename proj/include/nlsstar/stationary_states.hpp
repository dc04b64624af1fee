#pragma once

/**
 * @file stationary_states.hpp
 * @brief Positive stationary states η_J^ω on the star graph S_N.
 *
 * On J edges η is the soliton shifted away from the vertex, φ_ω(x - a), so
 * the edge contains the peak; on the other N - J edges it is the tail
 * φ_ω(x + a). Continuity is automatic; the flux condition at the vertex
 * reduces to
 *
 *     f(t) = t / (1 - t²)^{(q-2)/(p-2)}
 *          = (p/2)^{(q-2)/(p-2)} ω^{(2q-2-p)/(2(p-2))} / (N - 2J),
 *
 * with t = tanh((p/2 - 1)√ω a). The root is computed in the rapidity
 * y = artanh(t) so that t → 1 (large ω in the weak-vertex regime) keeps
 * full relative accuracy in 1 - t and 1 - t².
 */

#include <cmath>
#include <numbers>
#include <string>

#include "nlsstar/errors.hpp"
#include "nlsstar/quadrature.hpp"
#include "nlsstar/roots.hpp"
#include "nlsstar/soliton_line.hpp"

namespace nlsstar {

struct StarTopology {
    int n_edges;

    explicit StarTopology(int n) : n_edges(n) {
        detail::require(n >= 2, "a star graph needs at least 2 half-lines, got " +
                                    std::to_string(n));
    }
};

struct SolverTolerances {
    double quad_abs = kDefaultQuadTolerance;
    /// Relative tolerance on ω when inverting the mass map.
    double omega_rel = 1e-10;
    /// |f(t) - rhs| ≤ matching_residual · (1 + rhs).
    double matching_residual = 1e-12;
};

/// Root of the vertex matching equation in several equivalent forms.
struct MatchingSolution {
    double t;           ///< tanh(y) ∈ (0, 1)
    double complement;  ///< 1 - t
    double sech2;       ///< 1 - t²
    double rapidity;    ///< y = artanh(t)
};

struct StationaryState {
    NonlinearParams params;
    StarTopology topology;
    int bump_count;
    double omega;
    double t;
    double shift;
    double mass;
    double vertex_value;
    double energy;
};

namespace detail {

inline void check_bump_count(int n_edges, int bump_count) {
    require(n_edges >= 2, "a star graph needs at least 2 half-lines");
    require(bump_count >= 0 && 2 * bump_count <= n_edges - 1,
            "bump count J must satisfy 0 <= J <= (N-1)/2, got J=" +
                std::to_string(bump_count) + " for N=" + std::to_string(n_edges));
}

inline double log_sinh(double y) {
    if (y < 1.0) return std::log(std::sinh(y));
    return y - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * y));
}

inline double log_cosh(double y) {
    return y - std::numbers::ln2 + std::log1p(std::exp(-2.0 * std::abs(y)));
}

inline double matching_power(const NonlinearParams& params) {
    return (params.q() - 2.0) / (params.p() - 2.0);
}

inline double matching_omega_power(const NonlinearParams& params) {
    return (2.0 * params.q() - 2.0 - params.p()) / (2.0 * (params.p() - 2.0));
}

inline double log_matching_rhs(const NonlinearParams& params, int n_edges, int bump_count,
                               double omega) {
    return matching_power(params) * std::log(0.5 * params.p()) +
           matching_omega_power(params) * std::log(omega) -
           std::log(static_cast<double>(n_edges - 2 * bump_count));
}

inline MatchingSolution matching_from_rapidity(double y) {
    const double e = std::exp(-2.0 * y);
    return {std::tanh(y), 2.0 * e / (1.0 + e), sech2(y), y};
}

}  // namespace detail

inline MatchingSolution solve_matching(const NonlinearParams& params, int n_edges,
                                       int bump_count, double omega,
                                       const SolverTolerances& tol = {}) {
    detail::check_bump_count(n_edges, bump_count);
    detail::check_positive(omega, "omega");
    const double k = detail::matching_power(params);
    const double log_rhs = detail::log_matching_rhs(params, n_edges, bump_count, omega);

    // ln f(tanh y) = ln sinh y + (2k - 1) ln cosh y, strictly increasing in y.
    auto g = [&](double y) {
        return detail::log_sinh(y) + (2.0 * k - 1.0) * detail::log_cosh(y) - log_rhs;
    };
    auto g_dg = [&](double y) {
        return std::pair{g(y), 1.0 / std::tanh(y) + (2.0 * k - 1.0) * std::tanh(y)};
    };
    const auto bracket =
        roots::expand_geometric(g, 1.0, 2.0, 1e-300, 350.0, "vertex matching equation");
    double y = bracket.low;
    if (bracket.low != bracket.high) {
        y = roots::safeguarded_newton(g_dg, bracket, 4.0 * std::numeric_limits<double>::epsilon() *
                                                         bracket.high)
                .root;
    }
    const auto sol = detail::matching_from_rapidity(y);

    const double rhs = std::exp(log_rhs);
    const double f = sol.t / std::pow(sol.sech2, k);
    if (!(std::abs(f - rhs) <= tol.matching_residual * (1.0 + rhs) * (1.0 + y))) {
        throw SearchFailure("vertex matching equation: residual " +
                            std::to_string(std::abs(f - rhs)) + " above tolerance");
    }
    return sol;
}

/// Unique t ∈ (0,1) solving the vertex matching equation.
inline double solve_t(const NonlinearParams& params, int n_edges, int bump_count,
                      double omega, const SolverTolerances& tol = {}) {
    return solve_matching(params, n_edges, bump_count, omega, tol).t;
}

inline double shift_from_t(double p, double omega, double t) {
    detail::check_line_exponent(p);
    detail::check_positive(omega, "omega");
    detail::require(t > 0.0 && t < 1.0, "shift_from_t: t must lie in (0, 1)");
    return std::atanh(t) / ((0.5 * p - 1.0) * std::sqrt(omega));
}

namespace detail {

inline double mass_from_matching(const NonlinearParams& params, int n_edges, int bump_count,
                                 double omega, const MatchingSolution& m, double quad_tol) {
    const double p = params.p();
    const double tails = (n_edges - 2 * bump_count) * integral_I_complement(p, m.complement, quad_tol);
    const double bumps =
        bump_count > 0 ? 2.0 * bump_count * integral_I(p, 0.0, quad_tol) : 0.0;
    return half_mass_prefactor(p, omega) * (bumps + tails);
}

inline double vertex_value_from_matching(double p, double omega, const MatchingSolution& m) {
    return std::pow(0.5 * p * omega * m.sech2, 1.0 / (p - 2.0));
}

}  // namespace detail

/// ‖η_J^ω‖² = 2(p/2)^{2/(p-2)} ω^{(6-p)/(2(p-2))}/(p-2) · [2J I(0) + (N-2J) I(t)].
inline double mass_eta(const NonlinearParams& params, int n_edges, int bump_count,
                       double omega, const SolverTolerances& tol = {}) {
    const auto m = solve_matching(params, n_edges, bump_count, omega, tol);
    return detail::mass_from_matching(params, n_edges, bump_count, omega, m, tol.quad_abs);
}

/// Analytic d‖η_J^ω‖²/dω, including the implicit t'(ω).
inline double dmass_domega(const NonlinearParams& params, int n_edges, int bump_count,
                           double omega, const SolverTolerances& tol = {}) {
    const auto m = solve_matching(params, n_edges, bump_count, omega, tol);
    const double p = params.p();
    const double q = params.q();
    const double k = detail::matching_power(params);
    const double s = detail::matching_omega_power(params);
    const double r = (6.0 - p) / (2.0 * (p - 2.0));
    const double c = std::pow(0.5 * p, 2.0 / (p - 2.0));
    const double free_edges = n_edges - 2 * bump_count;
    const double w_pow = std::pow(omega, r - 1.0);

    double bumps = 0.0;
    if (bump_count > 0) {
        bumps = c * (6.0 - p) / ((p - 2.0) * (p - 2.0)) * 2.0 * bump_count * w_pow *
                integral_I(p, 0.0, tol.quad_abs);
    }
    const double t = m.t;
    const double t_prime = std::pow(0.5 * p, k) * (2.0 * q - 2.0 - p) /
                           (2.0 * (p - 2.0) * free_edges) * std::pow(omega, s - 1.0) *
                           std::pow(m.sech2, k + 1.0) / (t * t * (2.0 * k - 1.0) + 1.0);
    const double bracket = r * integral_I_complement(p, m.complement, tol.quad_abs) -
                           omega * std::pow(m.sech2, mass_exponent(p)) * t_prime;
    return bumps + 2.0 * c / (p - 2.0) * free_edges * w_pow * bracket;
}

/// Unique ω with ‖η_J^ω‖² = μ.
inline double omega_of_mass_eta(const NonlinearParams& params, int n_edges, int bump_count,
                                double mu, const SolverTolerances& tol = {}) {
    detail::check_bump_count(n_edges, bump_count);
    detail::check_positive(mu, "mass");
    auto mismatch = [&](double omega) {
        return mass_eta(params, n_edges, bump_count, omega, tol) - mu;
    };
    const double seed = omega_of_mass_line(params.p(), 2.0 * mu / n_edges);
    const auto bracket =
        roots::expand_geometric(mismatch, seed, 4.0, 1e-250, 1e250, "mass inversion for omega");
    if (bracket.low == bracket.high) return bracket.low;

    // Newton in ln ω on ln(mass) - ln(μ).
    auto fdf = [&](double log_omega) {
        const double omega = std::exp(log_omega);
        const double mass = mass_eta(params, n_edges, bump_count, omega, tol);
        const double slope = dmass_domega(params, n_edges, bump_count, omega, tol);
        return std::pair{std::log(mass) - std::log(mu), omega * slope / mass};
    };
    const auto root = roots::safeguarded_newton(
        fdf, {std::log(bracket.low), std::log(bracket.high)}, tol.omega_rel);
    return std::exp(root.root);
}

inline StationaryState solve_stationary(const NonlinearParams& params, int n_edges,
                                        int bump_count, double mu,
                                        const SolverTolerances& tol = {}) {
    const double omega = omega_of_mass_eta(params, n_edges, bump_count, mu, tol);
    const auto m = solve_matching(params, n_edges, bump_count, omega, tol);
    const double p = params.p();
    const double q = params.q();
    const double vertex = detail::vertex_value_from_matching(p, omega, m);
    const double energy = detail::virial_energy_factor(p) * omega * mu +
                          (2.0 / (p + 2.0) - 1.0 / q) * std::pow(vertex, q);
    const double shift = m.rapidity / ((0.5 * p - 1.0) * std::sqrt(omega));
    const double mass =
        detail::mass_from_matching(params, n_edges, bump_count, omega, m, tol.quad_abs);
    return {params, StarTopology(n_edges), bump_count, omega, m.t, shift, mass, vertex, energy};
}

/// F_{p,q}(η_J^ω) at mass μ from the virial/Nehari identity.
inline double energy_eta(const NonlinearParams& params, int n_edges, int bump_count, double mu,
                         const SolverTolerances& tol = {}) {
    return solve_stationary(params, n_edges, bump_count, mu, tol).energy;
}

/// Value of η on `edge` (edges [0, J) carry the peak) at distance x ≥ 0.
inline double eta_value(const StationaryState& s, int edge, double x) {
    const double shifted = edge < s.bump_count ? x - s.shift : x + s.shift;
    return soliton_value(s.params.p(), s.omega, shifted);
}

inline double eta_derivative(const StationaryState& s, int edge, double x) {
    const double shifted = edge < s.bump_count ? x - s.shift : x + s.shift;
    return soliton_derivative(s.params.p(), s.omega, shifted);
}

inline double eta_second_derivative(const StationaryState& s, int edge, double x) {
    const double shifted = edge < s.bump_count ? x - s.shift : x + s.shift;
    return soliton_second_derivative(s.params.p(), s.omega, shifted);
}

}  // namespace nlsstar
