// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "nlsstar/nlsstar.hpp"
#include "oracles.hpp"
#include "random_fields.hpp"

using namespace nlsstar;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
        if (!ok) {
            pass = false;
            detail += " [x]";
        }
    }
};

struct Criterion {
    int id;
    std::string title;
    std::function<Outcome()> body;
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome balanced_identities() {
    Outcome o;
    const double a = condcrit_lhs(4, 3);
    const double b = condcrit_lhs(4, 4);
    const double c = condcrit_lhs(6, 3);
    o.check(std::abs(a - 3 * (1 - std::sqrt(2.0 / 11.0))) <= 1e-10, fmt::format("lhs(4,3)={:.12f}", a));
    o.check(std::abs(b - 8.0 / 3.0) <= 1e-10, fmt::format("lhs(4,4)={:.12f}", b));
    o.check(std::abs(c - 2.0) <= 1e-9, fmt::format("lhs(6,3)={:.12f}", c));
    return o;
}

Outcome critical_n_near_four_and_six() {
    Outcome o;
    for (double p : {4.0, 3.9, 4.1, 5.95, 5.99}) {
        const int n = critical_N(p);
        o.check(n == 3, fmt::format("N_{}={}", p, n));
    }
    return o;
}

Outcome critical_n_divergence() {
    Outcome o;
    std::vector<int> values;
    for (double p : {2.5, 2.2, 2.05}) {
        const int n = critical_N(p);
        int certified = 0;
        for (int k = 2; k <= n + 50; ++k)
            if (critical_N_lower_bound(p, k)) certified = k;
        values.push_back(n);
        o.check(certified >= 2 && certified <= n,
                fmt::format("p={}: N_p={} certified>={}", p, n, certified));
    }
    o.check(values[0] < values[1] && values[1] < values[2], "strictly increasing");
    return o;
}

Outcome log_integral_and_r_slope() {
    Outcome o;
    const double li = integral_I_log(6, 0, 1);
    o.check(std::abs(li + std::numbers::pi * std::numbers::ln2) <= 1e-8,
            fmt::format("I_log(6)={:.12f}", li));
    const double d = r_derivative(5.999);
    const double h = 1e-5;
    const double fd = (r_value(5.999) - r_value(5.999 - h)) / h;
    o.check(d > 0, fmt::format("R'(5.999)={:.6g}", d));
    o.check(rel(d, fd) <= 1e-3, fmt::format("one-sided FD rel err {:.2e}", rel(d, fd)));
    return o;
}

Outcome g_polynomial_positive() {
    Outcome o;
    bool all = true;
    for (int n = 5; n <= 100; ++n) all = all && g_polynomial(n) > 0;
    o.check(all, "G(N)>0 for N=5..100");
    const double g5 = g_polynomial(5);
    const double exact = 625 - 280 * std::numbers::pi + 28 * std::numbers::pi * std::numbers::pi;
    o.check(std::abs(g5 - exact) <= 1e-6, fmt::format("G(5)={:.8f} vs 625-280pi+28pi^2", g5));
    return o;
}

Outcome soliton_closed_forms() {
    Outcome o;
    for (double w : {0.25, 1.0, 9.0}) {
        const double m = soliton_mass(4, w);
        o.check(std::abs(m - 4 * std::sqrt(w)) <= 1e-10, fmt::format("mass(4,{})={:.12g}", w, m));
    }
    const double th = theta_p(4);
    o.check(std::abs(th - 1.0 / 96.0) <= 1e-8, fmt::format("theta_4={:.12g}", th));
    const double w1 = omega_of_mass_line(4, 1.0);
    const double direct = -2.0 * oracle::half_line_action(4, w1, 0.0, 0.0);
    o.check(rel(th, direct) <= 1e-6, fmt::format("quadrature rel err {:.2e}", rel(th, direct)));
    return o;
}

Outcome stationary_chain() {
    Outcome o;
    const NonlinearParams pq(4, 3);
    const double t_exact = std::sqrt(2.0 / 11.0);
    const double mu = 6 * (1 - t_exact);
    const double t = solve_t(pq, 3, 0, 1.0);
    const double m = mass_eta(pq, 3, 0, 1.0);
    const auto s = solve_stationary(pq, 3, 0, mu);
    o.check(std::abs(t - t_exact) <= 1e-9, fmt::format("t={:.12f}", t));
    o.check(std::abs(m - mu) <= 1e-9, fmt::format("mass={:.12f}", m));
    o.check(std::abs(s.energy + mu / 6) <= 1e-9, fmt::format("energy={:.12f}", s.energy));
    double direct = -std::pow(s.vertex_value, 3.0) / 3.0;
    for (int e = 0; e < 3; ++e) direct += oracle::half_line_action(4, s.omega, -s.shift, 0.0);
    o.check(rel(s.energy, direct) <= 1e-6, fmt::format("quadrature rel err {:.2e}", rel(s.energy, direct)));
    return o;
}

Outcome threshold_monotonicity() {
    Outcome o;
    for (double q : {2.5, 3.5}) {
        const NonlinearParams pq(4, q);
        const auto r = critical_mass(pq, 3);
        std::vector<Verdict> v;
        for (double f : {0.5, 0.9, 1.1, 2.0})
            v.push_back(exists_ground_state(pq, 3, f * r.mu_critical).verdict);
        int switches = 0;
        for (std::size_t i = 1; i < v.size(); ++i) switches += v[i] != v[i - 1];
        const bool weak = pq.regime() == Regime::weak_vertex;
        const Verdict first = weak ? Verdict::exists : Verdict::not_exists;
        o.check(switches == 1 && v.front() == first,
                fmt::format("q={}: mu_c={:.8g} in {} iterations, one {} switch", q, r.mu_critical,
                            r.iterations, weak ? "exists->not" : "not->exists"));
        for (double mu : {1.0, r.mu_critical}) {
            const double kd = K_derivative(pq, 3, mu);
            const double h = 1e-4 * mu;
            const double fd = (K_value(pq, 3, mu + h) - K_value(pq, 3, mu - h)) / (2 * h);
            o.check((weak ? kd > 0 : kd < 0) && rel(kd, fd) <= 1e-5,
                    fmt::format("K'({:.4g})={:.4e} FD rel err {:.1e}", mu, kd, rel(kd, fd)));
        }
    }
    return o;
}

Outcome trial_ordering() {
    Outcome o;
    const double v = trial_exponential_energy(NonlinearParams(4, 3), 3, 1.0);
    o.check(std::abs(v + 31.0 / 4374.0) <= 1e-12, fmt::format("trial(4,3,3,1)={:.12g}", v));
    int ok = 0;
    int total = 0;
    for (double p : {3.0, 4.0, 5.0})
        for (double q : {2.5, 3.0, 3.5})
            for (double mu : {0.5, 1.0, 2.0}) {
                const NonlinearParams pq(p, q);
                const double trial = trial_exponential_energy(pq, 3, mu);
                const double radial = energy_eta(pq, 3, 0, mu);
                ok += radial <= trial && trial <= 0;
                ++total;
            }
    o.check(ok == total, fmt::format("F_rad <= trial <= 0 on {}/{} cells", ok, total));
    return o;
}

Outcome stability_grid() {
    Outcome o;
    int cells = 0, definite = 0, nonexistence = 0, cross_ok = 0, spectra = 0, spectra_ok = 0;
    double worst_cross = 0.0, worst_spectrum = 0.0;
    for (double p : {3.0, 4.0, 5.0}) {
        std::set<double> qs;
        for (double q : {2.5, 0.5 * p + 1.0, 3.5})
            if (q > 2.0 && q < 4.0) qs.insert(q);
        for (double q : qs)
            for (int n : {3, 5})
                for (double mu : {0.5, 1.0, 5.0}) {
                    const NonlinearParams pq(p, q);
                    const auto c = hessian_check(pq, n, mu);
                    ++cells;
                    definite += c.positive_definite;
                    cross_ok += c.cross_relative <= 1e-4;
                    worst_cross = std::max(worst_cross, c.cross_relative);
                    nonexistence += c.positive_definite &&
                                    exists_ground_state(pq, n, mu).verdict == Verdict::not_exists;
                    if (n == 5) {
                        const auto bar = stationary_point(pq, n, mu);
                        const auto flat = dense_reduced_hessian(bar);
                        Eigen::MatrixXd hess(n, n);
                        for (int i = 0; i < n; ++i)
                            for (int j = 0; j < n; ++j) hess(i, j) = flat[i * n + j];
                        const Eigen::VectorXd ev =
                            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hess).eigenvalues();
                        std::vector<double> expected{c.e_mm, c.e_mm, c.e_mm, n * c.e_mm,
                                                     n * c.e_hh};
                        std::sort(expected.begin(), expected.end());
                        double worst = 0.0;
                        for (int i = 0; i < n; ++i) worst = std::max(worst, rel(ev(i), expected[i]));
                        worst_spectrum = std::max(worst_spectrum, worst);
                        ++spectra;
                        spectra_ok += worst <= 1e-3;
                    }
                }
    }
    o.check(definite == cells, fmt::format("positive definite {}/{}", definite, cells));
    o.check(nonexistence >= 2, fmt::format("{} certified cells without ground states", nonexistence));
    o.check(cross_ok == cells, fmt::format("max cross {:.1e}", worst_cross));
    o.check(spectra_ok == spectra,
            fmt::format("N=5 spectra {}/{} (max rel err {:.1e})", spectra_ok, spectra, worst_spectrum));
    return o;
}

Outcome oracle_agreement() {
    Outcome o;
    const NonlinearParams balanced(4, 3);
    const auto s = solve_stationary(balanced, 3, 0, 1.0);
    const GridSpec grid(3, 40, 0.005);
    const auto res = minimize(balanced, grid, 1.0, perturb(sample_stationary(s, grid), 0.01, 1));
    o.check(std::abs(res.energy - s.energy) <= 5e-3,
            fmt::format("min {:.8f} vs {:.8f}", res.energy, s.energy));

    const double coarse = discrete_energy(sample_stationary(s, GridSpec(3, 80, 0.01)), balanced);
    const double fine = discrete_energy(sample_stationary(s, GridSpec(3, 80, 0.005)), balanced);
    const double slope = std::log2(std::abs(coarse - s.energy) / std::abs(fine - s.energy));
    o.check(slope >= 1.7 && slope <= 2.3, fmt::format("Richardson slope {:.3f}", slope));

    const NonlinearParams weak(4, 2.5);
    const double mu = 1.4 * critical_mass(weak, 3).mu_critical;
    const double w = omega_of_mass_line(4, mu);
    const auto far = sample_field(grid, [&](int e, double x) {
        return e == 0 ? soliton_value(4, w, x - 20) : 0.0;
    });
    const auto res2 = minimize(weak, grid, mu, far);
    const double line = line_energy(4, mu);
    const double radial = energy_eta(weak, 3, 0, mu);
    o.check(res2.energy > line - 5e-3 && res2.energy < radial,
            fmt::format("mu={:.4g}: {:.6f} in ({:.6f}, {:.6f})", mu, res2.energy, line - 5e-3, radial));
    return o;
}

Outcome projection() {
    Outcome o;
    const NonlinearParams pq(4, 2.5);
    const GridSpec grid(3, 30, 0.005);
    int ok = 0;
    double worst = -1e300;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto f = test_fields::random_positive_field(grid, seed);
        const double gap = reduced_r(project_to_manifold(f, pq)) - discrete_energy(f, pq);
        ok += gap <= 5e-3;
        worst = std::max(worst, gap);
    }
    o.check(ok == 20, fmt::format("r(Sigma f) <= F(f)+5e-3 on {}/20 (max gap {:.3e})", ok, worst));

    const auto s = solve_stationary(pq, 3, 0, 1.0);
    const auto field = sample_stationary(s, GridSpec(3, 40, 0.005));
    const auto point = project_to_manifold(field, pq);
    double mass_err = 0.0;
    for (double m : point.masses) mass_err = std::max(mass_err, rel(m, 1.0 / 3.0));
    const double energy_err = std::abs(reduced_r(point) - discrete_energy(field, pq));
    o.check(mass_err <= 1e-4 && energy_err <= 1e-4 && point.vertex_value == s.vertex_value,
            fmt::format("fixed point: mass err {:.1e}, energy err {:.1e}", mass_err, energy_err));
    return o;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "balanced-threshold identities", balanced_identities},
        {2, "critical edge count near p=4 and p=6", critical_n_near_four_and_six},
        {3, "critical edge count diverges toward p=2", critical_n_divergence},
        {4, "log-integral identity and R'(p) near 6", log_integral_and_r_slope},
        {5, "G-polynomial positivity", g_polynomial_positive},
        {6, "soliton closed forms", soliton_closed_forms},
        {7, "stationary-state identity chain", stationary_chain},
        {8, "threshold monotonicity", threshold_monotonicity},
        {9, "exponential trial ordering", trial_ordering},
        {10, "stability certificate grid", stability_grid},
        {11, "discrete oracle agreement", oracle_agreement},
        {12, "multi-soliton projection", projection},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.body();
        } catch (const std::exception& ex) {
            out.pass = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start).count();
        failures += !out.pass;
        std::printf("%s %2d %s: %s (%.0f ms)\n", out.pass ? "PASS" : "FAIL", c.id,
                    c.title.c_str(), out.detail.c_str(), ms);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
