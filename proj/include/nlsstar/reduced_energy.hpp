#pragma once

/**
 * @file reduced_energy.hpp
 * @brief Energy restricted to the multi-soliton manifold and the Hessian
 *        test for local minimality of the radial state.
 *
 * A point P = (m_1, ..., m_{N-1}, h) stands for the function that on edge i
 * is the unique soliton piece φ_ω(x + a) of mass m_i and endpoint value h
 * (the N-th edge takes the remaining mass). Pieces are parametrized by the
 * signed rapidity y = (p/2 - 1)√ω a: y ≥ 0 is a decaying tail, y < 0 contains
 * the peak. At fixed h the piece mass is strictly decreasing in y, from +∞ to
 * 0, so every (m, h) with m, h > 0 is attained exactly once.
 */

#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "nlsstar/discrete_field.hpp"
#include "nlsstar/discrete_oracle.hpp"
#include "nlsstar/errors.hpp"
#include "nlsstar/quadrature.hpp"
#include "nlsstar/roots.hpp"
#include "nlsstar/soliton_line.hpp"
#include "nlsstar/stationary_states.hpp"

namespace nlsstar {

struct SolitonPiece {
    double p;
    double omega;
    double shift;
    double mass;
    double endpoint_value;
};

struct ReducedPoint {
    std::vector<double> masses;  ///< m_1..m_{N-1}
    double vertex_value;
    double total_mass;
    NonlinearParams params;
    int n_edges;

    double last_mass() const {
        return total_mass - std::accumulate(masses.begin(), masses.end(), 0.0);
    }
};

struct StabilityCertificate {
    double e_mm;
    double e_hh;
    /// N·e_mm, e_mm and N·e_hh with multiplicities 1, N-2, 1.
    std::array<double, 3> eigenvalues;
    std::array<int, 3> multiplicities;
    double cross_term;
    /// |∂²r/∂m₁∂h|·m̄·h̄ / max(|e_mm| m̄², |e_hh| h̄²).
    double cross_relative;
    bool richardson_consistent;
    bool positive_definite;
    double step;
};

/// Rapidity beyond which pieces are considered numerically degenerate.
inline constexpr double kMaxRapidity = 300.0;

namespace detail {

// 1 - tanh(y) without cancellation for either sign of y.
inline double tanh_complement(double y) { return 2.0 / (1.0 + std::exp(2.0 * y)); }

struct PieceIntegrals {
    double mass;
    double kinetic;
    double potential;
};

inline PieceIntegrals piece_integrals(double p, double omega, double y, double tol) {
    const double e = mass_exponent(p);
    const double sigma = 0.5 * p * omega;
    const double b = (0.5 * p - 1.0) * std::sqrt(omega);
    const double c = tanh_complement(y);
    const double s2 = std::pow(sigma, 2.0 / (p - 2.0));
    return {s2 / b * tail_moment(e, c, 0, tol), omega * s2 / b * tail_moment(e, c, 2, tol),
            std::pow(sigma, p / (p - 2.0)) / b * tail_moment(e + 1.0, c, 0, tol)};
}

inline double omega_from_rapidity(double p, double h, double y) {
    const double ch = std::cosh(y);
    return std::pow(h, p - 2.0) * ch * ch / (0.5 * p);
}

// ln of the piece mass at endpoint value h and rapidity y, with d/dy.
inline std::pair<double, double> log_piece_mass(double p, double h, double y, double tol) {
    const double omega = omega_from_rapidity(p, h, y);
    const double e = mass_exponent(p);
    const double c = tanh_complement(y);
    const double moment = tail_moment(e, c, 0, tol);
    const double sigma = 0.5 * p * omega;
    const double b = (0.5 * p - 1.0) * std::sqrt(omega);
    const double log_mass = 2.0 / (p - 2.0) * std::log(sigma) - std::log(b) + std::log(moment);
    // d/dy ln T = -sech^{2e+2}(y) / T
    const double sech_pow = std::pow(sech2(y), e + 1.0);
    const double slope = (6.0 - p) / (p - 2.0) * std::tanh(y) - sech_pow / moment;
    return {log_mass, slope};
}

}  // namespace detail

/// Forward map (ω, a) ↦ piece with mass ∫₀^∞ φ_ω(x + a)² and endpoint φ_ω(a).
inline SolitonPiece piece_from_shape(double p, double omega, double shift,
                                     double tol = kDefaultQuadTolerance) {
    detail::check_line_exponent(p);
    detail::check_positive(omega, "omega");
    const double y = (0.5 * p - 1.0) * std::sqrt(omega) * shift;
    const auto ints = detail::piece_integrals(p, omega, y, tol);
    return {p, omega, shift, ints.mass, soliton_value(p, omega, shift)};
}

/// The unique piece with half-line mass m and endpoint value h.
inline SolitonPiece solve_piece(double p, double m, double h,
                                double tol = kDefaultQuadTolerance) {
    detail::check_line_exponent(p);
    detail::check_positive(m, "piece mass");
    detail::check_positive(h, "endpoint value");
    const double log_m = std::log(m);
    // Increasing in y: ln m - ln mass(y).
    auto fdf = [&](double y) {
        const auto [lm, slope] = detail::log_piece_mass(p, h, y, tol);
        return std::pair{log_m - lm, -slope};
    };
    double low = -1.0;
    double high = 1.0;
    while (fdf(low).first > 0.0) {
        high = low;
        low *= 2.0;
        if (low < -kMaxRapidity)
            throw InfeasiblePair("solve_piece: mass too large for the endpoint value", m, h,
                                 -kMaxRapidity, high);
    }
    while (fdf(high).first < 0.0) {
        low = high;
        high *= 2.0;
        if (high > kMaxRapidity)
            throw InfeasiblePair("solve_piece: mass too small for the endpoint value", m, h,
                                 low, kMaxRapidity);
    }
    const double y = roots::safeguarded_newton(fdf, {low, high}, 1e-15 * std::max(1.0, high - low))
                         .root;
    const double omega = detail::omega_from_rapidity(p, h, y);
    const double shift = y / ((0.5 * p - 1.0) * std::sqrt(omega));
    return {p, omega, shift, m, h};
}

/// e(m, h) = ½‖φ'‖² - (1/p)‖φ‖_p^p on the half-line - h^q/(qN).
inline double half_line_energy(const SolitonPiece& piece, const NonlinearParams& params,
                               int n_edges, double tol = kDefaultQuadTolerance) {
    detail::require(n_edges >= 2, "a star graph needs at least 2 half-lines");
    const double p = params.p();
    const double q = params.q();
    const double y = (0.5 * p - 1.0) * std::sqrt(piece.omega) * piece.shift;
    const auto ints = detail::piece_integrals(p, piece.omega, y, tol);
    return 0.5 * ints.kinetic - ints.potential / p -
           std::pow(piece.endpoint_value, q) / (q * n_edges);
}

inline double edge_energy(const NonlinearParams& params, int n_edges, double m, double h,
                          double tol = kDefaultQuadTolerance) {
    return half_line_energy(solve_piece(params.p(), m, h, tol), params, n_edges, tol);
}

inline void validate(const ReducedPoint& point) {
    detail::require(point.n_edges >= 2, "a star graph needs at least 2 half-lines");
    detail::require(static_cast<int>(point.masses.size()) == point.n_edges - 1,
                    "reduced point needs N-1 masses");
    for (double m : point.masses) detail::check_positive(m, "edge mass");
    detail::check_positive(point.vertex_value, "vertex value");
    detail::require(point.last_mass() > 0.0, "edge masses exceed the total mass");
}

/// r(P) = Σ_{i<N} e(m_i, h) + e(μ - Σ m_i, h).
inline double reduced_r(const ReducedPoint& point, double tol = kDefaultQuadTolerance) {
    validate(point);
    double total = 0.0;
    for (int i = 0; i < point.n_edges; ++i) {
        const double m = i + 1 < point.n_edges ? point.masses[i] : point.last_mass();
        try {
            total += edge_energy(point.params, point.n_edges, m, point.vertex_value, tol);
        } catch (const InfeasiblePair& ex) {
            throw InfeasiblePair(std::string(ex.what()) + " (edge " + std::to_string(i) + ")",
                                 ex.mass(), ex.endpoint_value(), ex.bracket_low(),
                                 ex.bracket_high(), i);
        }
    }
    return total;
}

/// P̄ = (μ/N, ..., μ/N, η_0(0)).
inline ReducedPoint stationary_point(const NonlinearParams& params, int n_edges, double mu,
                                     const SolverTolerances& tol = {}) {
    const auto state = solve_stationary(params, n_edges, 0, mu, tol);
    return {std::vector<double>(n_edges - 1, mu / n_edges), state.vertex_value, mu, params,
            n_edges};
}

namespace detail {

inline double coordinate(const ReducedPoint& p, int i) {
    return i + 1 < p.n_edges ? p.masses[i] : p.vertex_value;
}

inline double& coordinate(ReducedPoint& p, int i) {
    return i + 1 < p.n_edges ? p.masses[i] : p.vertex_value;
}

}  // namespace detail

/// Central-difference gradient in (m_1, ..., m_{N-1}, h).
inline std::vector<double> reduced_gradient(const ReducedPoint& point, double rel_step = 1e-5,
                                            double tol = kDefaultQuadTolerance) {
    std::vector<double> grad(point.n_edges);
    for (int i = 0; i < point.n_edges; ++i) {
        const double d = rel_step * detail::coordinate(point, i);
        ReducedPoint plus = point;
        ReducedPoint minus = point;
        detail::coordinate(plus, i) += d;
        detail::coordinate(minus, i) -= d;
        grad[i] = (reduced_r(plus, tol) - reduced_r(minus, tol)) / (2.0 * d);
    }
    return grad;
}

/// Central-difference Hessian in (m_1, ..., m_{N-1}, h), row-major N×N.
inline std::vector<double> dense_reduced_hessian(const ReducedPoint& point,
                                                 double rel_step = 1e-4,
                                                 double tol = kDefaultQuadTolerance) {
    const int n = point.n_edges;
    std::vector<double> hess(static_cast<std::size_t>(n) * n);
    const double r0 = reduced_r(point, tol);
    auto shifted = [&](int i, double di, int j, double dj) {
        ReducedPoint q = point;
        detail::coordinate(q, i) += di;
        detail::coordinate(q, j) += dj;
        return reduced_r(q, tol);
    };
    for (int i = 0; i < n; ++i) {
        const double di = rel_step * detail::coordinate(point, i);
        hess[i * n + i] = (shifted(i, di, i, 0.0) - 2.0 * r0 + shifted(i, -di, i, 0.0)) / (di * di);
        for (int j = i + 1; j < n; ++j) {
            const double dj = rel_step * detail::coordinate(point, j);
            const double v = (shifted(i, di, j, dj) - shifted(i, di, j, -dj) -
                              shifted(i, -di, j, dj) + shifted(i, -di, j, -dj)) /
                             (4.0 * di * dj);
            hess[i * n + j] = v;
            hess[j * n + i] = v;
        }
    }
    return hess;
}

namespace detail {

struct SecondDerivatives {
    double e_mm;
    double e_hh;
};

inline SecondDerivatives edge_second_derivatives(const NonlinearParams& params, int n_edges,
                                                 double m, double h, double step, double tol) {
    auto e = [&](double mm, double hh) { return edge_energy(params, n_edges, mm, hh, tol); };
    const double e0 = e(m, h);
    const double dm = step * m;
    const double dh = step * h;
    return {(e(m + dm, h) - 2.0 * e0 + e(m - dm, h)) / (dm * dm),
            (e(m, h + dh) - 2.0 * e0 + e(m, h - dh)) / (dh * dh)};
}

}  // namespace detail

/// Second-order test for r at P̄ using finite differences with relative `step`.
inline StabilityCertificate hessian_check(const NonlinearParams& params, int n_edges, double mu,
                                          double step = 1e-4,
                                          double tol = kDefaultQuadTolerance) {
    detail::require(n_edges >= 2, "a star graph needs at least 2 half-lines");
    detail::require(step > 1e-6 && step < 1e-2,
                    "finite-difference step must lie in (1e-6, 1e-2), got " + std::to_string(step));
    const auto bar = stationary_point(params, n_edges, mu);
    const double m = mu / n_edges;
    const double h = bar.vertex_value;
    try {
        const auto d = detail::edge_second_derivatives(params, n_edges, m, h, step, tol);
        const auto half = detail::edge_second_derivatives(params, n_edges, m, h, 0.5 * step, tol);
        const bool consistent = std::signbit(d.e_mm) == std::signbit(half.e_mm) &&
                                std::signbit(d.e_hh) == std::signbit(half.e_hh);

        const double dm = step * m;
        const double dh = step * h;
        auto r_at = [&](double sm, double sh) {
            ReducedPoint q = bar;
            q.masses[0] += sm * dm;
            q.vertex_value += sh * dh;
            return reduced_r(q, tol);
        };
        const double cross =
            (r_at(1, 1) - r_at(1, -1) - r_at(-1, 1) + r_at(-1, -1)) / (4.0 * dm * dh);
        const double scale = std::max(std::abs(d.e_mm) * m * m, std::abs(d.e_hh) * h * h);
        const double n = n_edges;
        return {d.e_mm,
                d.e_hh,
                {n * d.e_mm, d.e_mm, n * d.e_hh},
                {1, n_edges - 2, 1},
                cross,
                std::abs(cross) * m * h / scale,
                consistent,
                d.e_mm > 0.0 && d.e_hh > 0.0,
                step};
    } catch (const InfeasiblePair& ex) {
        throw InfeasiblePair(std::string(ex.what()) +
                                 "; reduce the finite-difference step and retry",
                             ex.mass(), ex.endpoint_value(), ex.bracket_low(), ex.bracket_high(),
                             ex.edge());
    }
}

/// Multi-soliton transformation: keeps the per-edge masses and |u(0)|.
inline ReducedPoint project_to_manifold(const DiscreteField& field,
                                        const NonlinearParams& params) {
    const double h = std::abs(field.vertex);
    detail::require(h > 0.0 && std::isfinite(h),
                    "projection needs a nonzero vertex value");
    const int n = field.grid.n_edges;
    std::vector<double> masses(n - 1);
    for (int e = 0; e + 1 < n; ++e) masses[e] = discrete_edge_mass(field, e);
    return {std::move(masses), h, discrete_mass(field), params, n};
}

}  // namespace nlsstar
