#pragma once

// Bracketed scalar root finding for monotone maps.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "nlsstar/errors.hpp"

namespace nlsstar::roots {

struct Bracket {
    double low;
    double high;
};

struct RootResult {
    double root;
    Bracket bracket;
    std::size_t iterations;
};

/// Grows [low, high] geometrically around `start` (x > 0) until the
/// increasing function `f` changes sign, staying inside [min_x, max_x].
template <class F>
Bracket expand_geometric(F&& f, double start, double factor, double min_x, double max_x,
                         const std::string& what) {
    double low = start;
    double high = start;
    double f_start = f(start);
    if (f_start == 0.0) return {start, start};
    if (f_start < 0.0) {
        double f_high = f_start;
        while (f_high < 0.0) {
            low = high;
            high *= factor;
            if (high > max_x) {
                throw SearchFailure(what + ": bracket expansion exceeded upper bound " +
                                    std::to_string(max_x) + " (last probe " +
                                    std::to_string(low) + ")");
            }
            f_high = f(high);
        }
    } else {
        double f_low = f_start;
        while (f_low > 0.0) {
            high = low;
            low /= factor;
            if (low < min_x) {
                throw SearchFailure(what + ": bracket expansion exceeded lower bound " +
                                    std::to_string(min_x) + " (last probe " +
                                    std::to_string(high) + ")");
            }
            f_low = f(low);
        }
    }
    return {low, high};
}

/// Safeguarded Newton on an increasing function with a valid bracket.
/// `fdf(x)` returns {f(x), f'(x)}. Falls back to bisection whenever the
/// Newton step leaves the bracket or fails to halve it.
template <class FdF>
RootResult safeguarded_newton(FdF&& fdf, Bracket bracket, double x_tol,
                              std::size_t max_iter = 200) {
    double low = bracket.low;
    double high = bracket.high;
    double x = 0.5 * (low + high);
    double step_prev = high - low;
    double step = step_prev;
    std::size_t it = 0;
    for (; it < max_iter; ++it) {
        auto [fx, dfx] = fdf(x);
        if (fx == 0.0) return {x, {x, x}, it};
        if (fx < 0.0) low = x; else high = x;

        const double newton = x - fx / dfx;
        const bool usable = std::isfinite(newton) && newton > low && newton < high &&
                            std::abs(newton - x) < 0.5 * std::abs(step_prev);
        step_prev = step;
        if (usable) {
            step = newton - x;
            x = newton;
        } else {
            x = 0.5 * (low + high);
            step = high - low;
        }
        if (std::abs(step) <= x_tol || high - low <= x_tol) {
            ++it;
            break;
        }
    }
    return {x, {low, high}, it};
}

/// Plain bisection on an increasing function; stops when the bracket is
/// narrower than x_tol or can no longer be split in floating point.
template <class F>
RootResult bisect(F&& f, Bracket bracket, double x_tol, std::size_t max_iter = 400) {
    double low = bracket.low;
    double high = bracket.high;
    std::size_t it = 0;
    for (; it < max_iter && high - low > x_tol; ++it) {
        const double mid = 0.5 * (low + high);
        if (mid <= low || mid >= high) break;
        const double fm = f(mid);
        if (fm == 0.0) return {mid, {mid, mid}, it + 1};
        if (fm < 0.0) low = mid; else high = mid;
    }
    return {0.5 * (low + high), {low, high}, it};
}

}  // namespace nlsstar::roots
