#pragma once

// Solitons of u'' + u^{p-1} = ωu on the real line.
//
//   φ_ω(x) = [ (p/2) ω sech²((p/2 - 1)√ω x) ]^{1/(p-2)}
//
// and the line ground-state level E(μ) = -θ_p μ^{2β+1}.

#include <cmath>
#include <string>

#include "nlsstar/errors.hpp"
#include "nlsstar/quadrature.hpp"

namespace nlsstar {

enum class Regime { weak_vertex, balanced, strong_vertex };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::weak_vertex: return "weak_vertex";
        case Regime::balanced: return "balanced";
        case Regime::strong_vertex: return "strong_vertex";
    }
    return "unknown";
}

/// Absolute tolerance on q - (p/2 + 1) for the balanced regime.
inline constexpr double kBalancedTolerance = 1e-12;

namespace detail {

inline void check_line_exponent(double p) {
    require(std::isfinite(p) && p > 2.0 && p < 6.0,
            "exponent p must lie in the open window (2, 6), got " + std::to_string(p));
}

inline void check_positive(double value, const char* name) {
    require(std::isfinite(value) && value > 0.0,
            std::string(name) + " must be positive and finite, got " + std::to_string(value));
}

// sech²(z) without overflow.
inline double sech2(double z) {
    const double e = std::exp(-2.0 * std::abs(z));
    const double d = 1.0 + e;
    return 4.0 * e / (d * d);
}

}  // namespace detail

/// The exponent pair (p, q): standard power p ∈ (2,6), vertex power q ∈ (2,4).
class NonlinearParams {
public:
    NonlinearParams(double p, double q) : p_(p), q_(q) {
        detail::check_line_exponent(p);
        detail::require(std::isfinite(q) && q > 2.0 && q < 4.0,
                        "vertex exponent q must lie in the open window (2, 4), got " +
                            std::to_string(q));
    }

    /// Builds the balanced pair q = p/2 + 1 exactly.
    static NonlinearParams balanced(double p) { return {p, 0.5 * p + 1.0}; }

    double p() const noexcept { return p_; }
    double q() const noexcept { return q_; }
    double alpha() const noexcept { return 2.0 / (6.0 - p_); }
    double beta() const noexcept { return (p_ - 2.0) / (6.0 - p_); }

    Regime regime() const noexcept {
        const double gap = q_ - (0.5 * p_ + 1.0);
        if (std::abs(gap) <= kBalancedTolerance) return Regime::balanced;
        return gap < 0.0 ? Regime::weak_vertex : Regime::strong_vertex;
    }

    bool operator==(const NonlinearParams&) const = default;

private:
    double p_;
    double q_;
};

struct Soliton {
    double p;
    double omega;
    double mass;
    double energy;
};

inline double soliton_value(double p, double omega, double x) {
    detail::check_line_exponent(p);
    detail::check_positive(omega, "omega");
    const double b = (0.5 * p - 1.0) * std::sqrt(omega);
    return std::pow(0.5 * p * omega * detail::sech2(b * x), 1.0 / (p - 2.0));
}

/// φ_ω'(x) = -√ω tanh((p/2-1)√ω x) φ_ω(x).
inline double soliton_derivative(double p, double omega, double x) {
    const double b = (0.5 * p - 1.0) * std::sqrt(omega);
    return -std::sqrt(omega) * std::tanh(b * x) * soliton_value(p, omega, x);
}

inline double soliton_second_derivative(double p, double omega, double x) {
    const double b = (0.5 * p - 1.0) * std::sqrt(omega);
    const double phi = soliton_value(p, omega, x);
    const double th = std::tanh(b * x);
    // d/dx[-√ω tanh φ] = -√ω (b sech² φ + tanh φ')
    return -std::sqrt(omega) * (b * detail::sech2(b * x) * phi + th * (-std::sqrt(omega) * th * phi));
}

namespace detail {

// 2 (p/2)^{2/(p-2)} ω^{(6-p)/(2(p-2))} / (p-2): mass of the half-soliton per unit I.
inline double half_mass_prefactor(double p, double omega) {
    return 2.0 * std::pow(0.5 * p, 2.0 / (p - 2.0)) *
           std::pow(omega, (6.0 - p) / (2.0 * (p - 2.0))) / (p - 2.0);
}

// -(6-p)/(2(p+2)): energy per unit ωμ of a stationary state with no vertex term.
inline double virial_energy_factor(double p) { return -(6.0 - p) / (2.0 * (p + 2.0)); }

}  // namespace detail

inline double soliton_mass(double p, double omega) {
    detail::check_line_exponent(p);
    detail::check_positive(omega, "omega");
    return 2.0 * detail::half_mass_prefactor(p, omega) * integral_I(p, 0.0);
}

/// Closed-form inverse of soliton_mass.
inline double omega_of_mass_line(double p, double mu) {
    detail::check_line_exponent(p);
    detail::check_positive(mu, "mass");
    const double scale = 4.0 * std::pow(0.5 * p, 2.0 / (p - 2.0)) * integral_I(p, 0.0);
    return std::pow(mu * (p - 2.0) / scale, 2.0 * (p - 2.0) / (6.0 - p));
}

inline double theta_p(double p) {
    detail::check_line_exponent(p);
    return -detail::virial_energy_factor(p) * omega_of_mass_line(p, 1.0);
}

/// E(μ) = -θ_p μ^{2β+1}, evaluated as -(6-p)/(2(p+2)) ω(μ) μ.
inline double line_energy(double p, double mu) {
    return detail::virial_energy_factor(p) * omega_of_mass_line(p, mu) * mu;
}

inline Soliton make_soliton(double p, double omega) {
    const double mass = soliton_mass(p, omega);
    return {p, omega, mass, detail::virial_energy_factor(p) * omega * mass};
}

inline Soliton soliton_of_mass(double p, double mu) {
    const double omega = omega_of_mass_line(p, mu);
    return {p, omega, mu, detail::virial_energy_factor(p) * omega * mu};
}

}  // namespace nlsstar
