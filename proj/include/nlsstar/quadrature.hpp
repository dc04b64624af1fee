#pragma once

/**
 * @file quadrature.hpp
 * @brief Singular parameter integrals of the soliton family.
 *
 * Every mass, p-norm and kinetic integral of a (shifted) soliton reduces,
 * after the substitution s = tanh(b x), to a tail moment
 *
 *     T_k(γ, t) = ∫_t^1 s^k (1 - s²)^γ ds,      t ∈ (-1, 1), k ∈ {0, 2},
 *
 * with γ = (4-p)/(p-2) for the mass. For p > 4 the exponent is negative and
 * the integrand blows up at s = 1. We integrate in the complement variable
 * u = 1 - s, where the singularity sits at u = 0 and 1 - s² = u(2 - u) is
 * evaluated without cancellation, using double-exponential (tanh-sinh)
 * quadrature which clusters nodes at both endpoints.
 *
 * Callers that know 1 - t more accurately than t itself (tails far from the
 * vertex) pass the complement directly.
 */

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "nlsstar/errors.hpp"

namespace nlsstar {

inline constexpr double kDefaultQuadTolerance = 1e-12;

struct IntegralParams {
    double p;
    double lower;
    double abs_tol = kDefaultQuadTolerance;
};

namespace detail {

inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
    thread_local boost::math::quadrature::tanh_sinh<double> rule;
    return rule;
}

inline void check_quad_exponent(double p) {
    require(std::isfinite(p) && p > 2.0 && p <= 6.0,
            "quadrature exponent p must lie in (2, 6], got " + std::to_string(p));
}

inline void check_tolerance(double tol) {
    require(std::isfinite(tol) && tol > 0.0, "quadrature tolerance must be positive");
}

// ln(u (2 - u)) for u in (0, 2), accurate at both ends.
inline double log_one_minus_s2(double u) {
    if (u < 0.5) return std::numbers::ln2 + std::log(u) + std::log1p(-0.5 * u);
    const double s = 1.0 - u;
    return std::log1p(-s * s);
}

// ∫_0^c (u(2-u))^γ (1-u)^k du for c ∈ [0, 1].
inline double complement_moment(double gamma, double c, int s_power, double tol) {
    if (c <= 0.0) return 0.0;
    auto integrand = [gamma, s_power](double u) {
        if (u <= 0.0) return 0.0;
        const double w = std::exp(gamma * log_one_minus_s2(u));
        if (s_power == 0) return w;
        const double s = 1.0 - u;
        return w * s * s;
    };
    return tanh_sinh_rule().integrate(integrand, 0.0, c, tol);
}

}  // namespace detail

/// Exponent (4-p)/(p-2) of the mass integrand.
inline double mass_exponent(double p) { return (4.0 - p) / (p - 2.0); }

/// T_k(γ, 1 - complement) = ∫_{1-complement}^1 s^k (1 - s²)^γ ds.
///
/// `complement` ∈ [0, 2] so the lower limit ranges over [-1, 1]; `s_power`
/// must be 0 or 2; γ > -1 for integrability.
inline double tail_moment(double gamma, double complement, int s_power = 0,
                          double tol = kDefaultQuadTolerance) {
    detail::require(std::isfinite(gamma) && gamma > -1.0,
                    "tail_moment: exponent must exceed -1");
    detail::require(complement >= 0.0 && complement <= 2.0,
                    "tail_moment: complement must lie in [0, 2]");
    detail::require(s_power == 0 || s_power == 2, "tail_moment: s_power must be 0 or 2");
    detail::check_tolerance(tol);
    if (complement <= 1.0) return detail::complement_moment(gamma, complement, s_power, tol);
    // Lower limit is negative; the integrand is even in s.
    const double full = detail::complement_moment(gamma, 1.0, s_power, tol);
    return 2.0 * full - detail::complement_moment(gamma, 2.0 - complement, s_power, tol);
}

/// I(lower) = ∫_lower^1 (1 - s²)^{(4-p)/(p-2)} ds.
inline double integral_I(const IntegralParams& params) {
    detail::check_quad_exponent(params.p);
    detail::require(std::isfinite(params.lower) && params.lower >= 0.0 && params.lower <= 1.0,
                    "integral_I: lower limit must lie in [0, 1]");
    detail::check_tolerance(params.abs_tol);
    return detail::complement_moment(mass_exponent(params.p), 1.0 - params.lower, 0,
                                     params.abs_tol);
}

inline double integral_I(double p, double lower, double abs_tol = kDefaultQuadTolerance) {
    return integral_I(IntegralParams{p, lower, abs_tol});
}

/// I evaluated from the complement c = 1 - lower, c ∈ [0, 1].
inline double integral_I_complement(double p, double complement,
                                    double abs_tol = kDefaultQuadTolerance) {
    detail::check_quad_exponent(p);
    detail::require(complement >= 0.0 && complement <= 1.0,
                    "integral_I_complement: complement must lie in [0, 1]");
    return detail::complement_moment(mass_exponent(p), complement, 0, abs_tol);
}

/// ∫_lower^upper (1 - s²)^{(4-p)/(p-2)} ln(1 - s²) ds. Always ≤ 0.
inline double integral_I_log(double p, double lower, double upper,
                             double abs_tol = kDefaultQuadTolerance) {
    detail::check_quad_exponent(p);
    detail::require(lower >= 0.0 && lower <= upper && upper <= 1.0,
                    "integral_I_log: need 0 <= lower <= upper <= 1");
    detail::check_tolerance(abs_tol);
    if (lower == upper) return 0.0;
    const double gamma = mass_exponent(p);
    auto integrand = [gamma](double u) {
        if (u <= 0.0) return 0.0;
        const double log_w = detail::log_one_minus_s2(u);
        return std::exp(gamma * log_w) * log_w;
    };
    return detail::tanh_sinh_rule().integrate(integrand, 1.0 - upper, 1.0 - lower, abs_tol);
}

}  // namespace nlsstar
