#pragma once

/**
 * @file discrete_oracle.hpp
 * @brief Finite-difference energy on the truncated star and a mass-constrained
 *        minimizer used to cross-check the analytic ground states.
 *
 * Each edge carries nodes x_i = i·dx, i = 0..n-1, with the vertex node shared.
 * Integrals use the trapezoidal rule and u' the forward difference, so the
 * kinetic term is a midpoint rule and the scheme is second order for fields
 * smooth on every edge.
 *
 * The minimizer takes preconditioned gradient steps: the Euclidean gradient
 * is mapped through (K + cW)^{-1}, with K the discrete stiffness matrix and W
 * the trapezoidal weights, projected onto the tangent space of the mass
 * sphere in that inner product, and the iterate is rescaled to the target
 * mass after every step. The linear solve is exact and costs O(N n): each
 * edge is tridiagonal and only the vertex couples them.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "nlsstar/discrete_field.hpp"
#include "nlsstar/errors.hpp"
#include "nlsstar/soliton_line.hpp"
#include "nlsstar/stationary_states.hpp"

namespace nlsstar {

struct EnergyParts {
    double kinetic;    ///< ∫|u'|²
    double potential;  ///< ∫|u|^p
    double vertex;     ///< |u(0)|^q
};

struct IterateRecord {
    double energy;
    double kinetic_norm;  ///< ‖u'‖₂
    double mass;
};

struct MinimizeOptions {
    int max_iter = 5000;
    /// Stop once |ΔE| ≤ tol·max(1, |E|) on an accepted step.
    double tol = 1e-13;
    /// Shift c of the preconditioner; ≤ 0 picks the Lagrange multiplier of the initial field.
    double preconditioner_shift = 0.0;
    double armijo = 1e-4;
    int max_backtracks = 60;
    bool record_history = true;
};

struct MinimizeResult {
    DiscreteField field;
    double energy;
    int iterations;
    bool converged;
    std::vector<IterateRecord> history;
};

namespace detail {

inline double trapezoid_weight(const GridSpec& g, std::size_t node) {
    return node + 1 == g.nodes_per_edge() ? 0.5 * g.dx : g.dx;
}

}  // namespace detail

inline EnergyParts energy_parts(const DiscreteField& f, double p, double q) {
    const GridSpec& g = f.grid;
    const std::size_t n = g.nodes_per_edge();
    const double u0 = std::abs(f.vertex);
    double kin = 0.0;
    double pot = g.n_edges * 0.5 * g.dx * std::pow(u0, p);
    for (int e = 0; e < g.n_edges; ++e) {
        const auto& v = f.edges[e];
        double prev = f.vertex;
        for (std::size_t i = 1; i < n; ++i) {
            const double cur = v[i - 1];
            const double d = cur - prev;
            kin += d * d;
            pot += detail::trapezoid_weight(g, i) * std::pow(std::abs(cur), p);
            prev = cur;
        }
    }
    return {kin / g.dx, pot, std::pow(u0, q)};
}

inline double discrete_energy(const DiscreteField& f, const NonlinearParams& params) {
    const auto parts = energy_parts(f, params.p(), params.q());
    return 0.5 * parts.kinetic - parts.potential / params.p() - parts.vertex / params.q();
}

/// Trapezoidal mass of one edge; the vertex contributes dx/2 to every edge.
inline double discrete_edge_mass(const DiscreteField& f, int edge) {
    const GridSpec& g = f.grid;
    double m = 0.5 * g.dx * f.vertex * f.vertex;
    const auto& v = f.edges[edge];
    for (std::size_t i = 1; i < g.nodes_per_edge(); ++i)
        m += detail::trapezoid_weight(g, i) * v[i - 1] * v[i - 1];
    return m;
}

inline double discrete_mass(const DiscreteField& f) {
    double m = 0.0;
    for (int e = 0; e < f.grid.n_edges; ++e) m += discrete_edge_mass(f, e);
    return m;
}

/// ‖u'‖₂ with forward differences.
inline double discrete_kinetic_norm(const DiscreteField& f) {
    double kin = 0.0;
    for (const auto& v : f.edges) {
        double prev = f.vertex;
        for (double cur : v) {
            kin += (cur - prev) * (cur - prev);
            prev = cur;
        }
    }
    return std::sqrt(kin / f.grid.dx);
}

inline DiscreteField renormalize(DiscreteField f, double mu) {
    detail::check_positive(mu, "mass");
    const double m = discrete_mass(f);
    detail::require(m > 0.0 && std::isfinite(m), "cannot renormalize a field with zero mass");
    f *= std::sqrt(mu / m);
    return f;
}

/// Samples η_J on the grid; the last node is set to 0 (Dirichlet).
inline DiscreteField sample_stationary(const StationaryState& s, const GridSpec& grid) {
    auto f = sample_field(grid, [&s](int e, double x) { return eta_value(s, e, x); });
    f.vertex = s.vertex_value;
    for (auto& e : f.edges) e.back() = 0.0;
    return f;
}

/// Lower bound ½k² - (1/p)μ^{(p+2)/4}k^{(p-2)/2} - (1/q)μ^{q/4}k^{q/2} on the
/// energy of any u with mass μ and ‖u'‖₂ = k, from ‖u‖²_∞ ≤ ‖u‖₂‖u'‖₂.
inline double gn_coercivity_bound(const NonlinearParams& params, double mu, double kinetic) {
    detail::require(kinetic >= 0.0, "kinetic norm must be non-negative");
    detail::require(mu >= 0.0, "mass must be non-negative");
    const double p = params.p();
    const double q = params.q();
    return 0.5 * kinetic * kinetic -
           std::pow(mu, 0.25 * (p + 2.0)) * std::pow(kinetic, 0.5 * (p - 2.0)) / p -
           std::pow(mu, 0.25 * q) * std::pow(kinetic, 0.5 * q) / q;
}

namespace detail {

// Flat layout: [vertex, edge0 nodes 1..n-2, edge1 nodes 1..n-2, ...]; the far
// node of every edge is pinned to zero and not stored.
struct FlatLayout {
    int n_edges;
    std::size_t interior;  // n - 2 free nodes per edge
    std::size_t size() const { return 1 + n_edges * interior; }
    std::size_t at(int edge, std::size_t node) const { return 1 + edge * interior + node - 1; }
};

inline std::vector<double> flatten(const DiscreteField& f, const FlatLayout& l) {
    std::vector<double> z(l.size());
    z[0] = f.vertex;
    for (int e = 0; e < l.n_edges; ++e)
        for (std::size_t i = 1; i <= l.interior; ++i) z[l.at(e, i)] = f.edges[e][i - 1];
    return z;
}

inline void unflatten(const std::vector<double>& z, const FlatLayout& l, DiscreteField& f) {
    f.vertex = z[0];
    for (int e = 0; e < l.n_edges; ++e) {
        for (std::size_t i = 1; i <= l.interior; ++i) f.edges[e][i - 1] = z[l.at(e, i)];
        f.edges[e].back() = 0.0;
    }
}

inline std::vector<double> mass_weights(const GridSpec& g, const FlatLayout& l) {
    std::vector<double> w(l.size(), g.dx);
    w[0] = 0.5 * g.dx * g.n_edges;
    return w;
}

// Euclidean gradient of the discrete energy with the far nodes pinned.
inline std::vector<double> energy_gradient(const std::vector<double>& z, const FlatLayout& l,
                                           const GridSpec& g, double p, double q) {
    std::vector<double> grad(l.size());
    const double inv_dx = 1.0 / g.dx;
    const double u0 = z[0];
    double g0 = -0.5 * g.dx * g.n_edges * std::pow(std::abs(u0), p - 2.0) * u0 -
                std::pow(std::abs(u0), q - 2.0) * u0;
    for (int e = 0; e < l.n_edges; ++e) {
        const std::size_t base = l.at(e, 1);
        g0 += (u0 - z[base]) * inv_dx;
        for (std::size_t i = 1; i <= l.interior; ++i) {
            const std::size_t k = base + i - 1;
            const double left = i == 1 ? u0 : z[k - 1];
            const double right = i == l.interior ? 0.0 : z[k + 1];
            const double u = z[k];
            grad[k] = (2.0 * u - left - right) * inv_dx -
                      g.dx * std::pow(std::abs(u), p - 2.0) * u;
        }
    }
    grad[0] = g0;
    return grad;
}

// Exact solve of (K + cW) x = r on the star.
class StarPreconditioner {
public:
    StarPreconditioner(const GridSpec& g, const FlatLayout& l, double shift)
        : l_(l), inv_dx_(1.0 / g.dx) {
        diag_ = 2.0 * inv_dx_ + shift * g.dx;
        vertex_diag_ = g.n_edges * (inv_dx_ + 0.5 * shift * g.dx);
        // Thomas factorization of the per-edge tridiagonal block, shared by all edges.
        const std::size_t m = l.interior;
        c_prime_.resize(m);
        denom_.resize(m);
        double c_prev = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double d = diag_ + inv_dx_ * c_prev;  // off-diagonals are -1/dx
            denom_[i] = d;
            c_prime_[i] = -inv_dx_ / d;
            c_prev = c_prime_[i];
        }
        std::vector<double> unit(m, 0.0);
        unit[0] = 1.0;
        coupling_ = unit;
        solve_block(coupling_.data());
    }

    std::vector<double> solve(const std::vector<double>& r) const {
        std::vector<double> x(r);
        double rhs0 = r[0];
        for (int e = 0; e < l_.n_edges; ++e) {
            double* block = x.data() + l_.at(e, 1);
            solve_block(block);
            rhs0 += inv_dx_ * block[0];
        }
        const double u0 = rhs0 / (vertex_diag_ - l_.n_edges * inv_dx_ * inv_dx_ * coupling_[0]);
        x[0] = u0;
        for (int e = 0; e < l_.n_edges; ++e) {
            double* block = x.data() + l_.at(e, 1);
            for (std::size_t i = 0; i < l_.interior; ++i) block[i] += u0 * inv_dx_ * coupling_[i];
        }
        return x;
    }

private:
    void solve_block(double* b) const {
        const std::size_t m = l_.interior;
        b[0] /= denom_[0];
        for (std::size_t i = 1; i < m; ++i) b[i] = (b[i] + inv_dx_ * b[i - 1]) / denom_[i];
        for (std::size_t i = m - 1; i-- > 0;) b[i] -= c_prime_[i] * b[i + 1];
    }

    FlatLayout l_;
    double inv_dx_;
    double diag_;
    double vertex_diag_;
    std::vector<double> c_prime_;
    std::vector<double> denom_;
    std::vector<double> coupling_;
};

inline double weighted_dot(const std::vector<double>& a, const std::vector<double>& b,
                           const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
    return s;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace detail

/// Mass-constrained descent from `init`. The far node of every edge is set
/// to zero (Dirichlet at x = L) and the field is rescaled to mass μ.
inline MinimizeResult minimize(const NonlinearParams& params, const GridSpec& grid, double mu,
                               const DiscreteField& init, const MinimizeOptions& opts = {}) {
    detail::check_positive(mu, "mass");
    detail::require(init.grid.n_edges == grid.n_edges &&
                        init.grid.nodes_per_edge() == grid.nodes_per_edge(),
                    "initial field does not live on the requested grid");
    detail::require(grid.nodes_per_edge() >= 3, "grid too coarse for minimization");
    const double p = params.p();
    const double q = params.q();

    DiscreteField field = init;
    for (auto& e : field.edges) e.back() = 0.0;
    field = renormalize(field, mu);

    const detail::FlatLayout layout{grid.n_edges, grid.nodes_per_edge() - 2};
    const auto w = detail::mass_weights(grid, layout);

    double shift = opts.preconditioner_shift;
    if (shift <= 0.0) {
        // ω from the Nehari-type identity ωμ = -‖u'‖² + ∫|u|^p + |u(0)|^q.
        const auto parts = energy_parts(field, p, q);
        shift = std::max(0.1, (-parts.kinetic + parts.potential + parts.vertex) / mu);
    }
    const detail::StarPreconditioner precond(grid, layout, shift);

    auto z = detail::flatten(field, layout);
    auto scale_to_mass = [&](std::vector<double>& v) {
        const double m = detail::weighted_dot(v, v, w);
        const double s = std::sqrt(mu / m);
        for (double& x : v) x *= s;
    };
    auto energy_of = [&](const std::vector<double>& v) {
        detail::unflatten(v, layout, field);
        return discrete_energy(field, params);
    };

    MinimizeResult result{field, energy_of(z), 0, false, {}};
    auto record = [&] {
        if (!opts.record_history) return;
        detail::unflatten(z, layout, field);
        result.history.push_back(
            {result.energy, discrete_kinetic_norm(field), discrete_mass(field)});
    };
    record();

    double alpha = 1.0;
    std::vector<double> trial(z.size());
    for (int it = 0; it < opts.max_iter; ++it) {
        const auto grad = detail::energy_gradient(z, layout, grid, p, q);
        auto d = precond.solve(grad);
        const auto wz = [&] {
            std::vector<double> v(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) v[i] = w[i] * z[i];
            return v;
        }();
        const auto v = precond.solve(wz);
        const double coef = detail::dot(wz, d) / detail::dot(wz, v);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] -= coef * v[i];
        const double slope = detail::dot(grad, d);
        if (!(slope > 0.0)) {
            result.converged = true;
            break;
        }

        alpha = std::min(1.0, 2.0 * alpha);
        bool accepted = false;
        double e_new = result.energy;
        for (int b = 0; b < opts.max_backtracks; ++b) {
            for (std::size_t i = 0; i < z.size(); ++i) trial[i] = z[i] - alpha * d[i];
            scale_to_mass(trial);
            e_new = energy_of(trial);
            if (e_new <= result.energy - opts.armijo * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // No descent left at floating-point resolution.
            result.converged = true;
            break;
        }
        const double decrease = result.energy - e_new;
        z.swap(trial);
        result.energy = e_new;
        result.iterations = it + 1;
        record();
        if (decrease <= opts.tol * std::max(1.0, std::abs(e_new))) {
            result.converged = true;
            break;
        }
    }
    detail::unflatten(z, layout, field);
    result.field = field;
    return result;
}

}  // namespace nlsstar
