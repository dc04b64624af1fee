#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "nlsstar/existence_map.hpp"
#include "oracles.hpp"

using namespace nlsstar;

namespace {

int count_switches(const std::vector<Verdict>& v) {
    int switches = 0;
    for (std::size_t i = 1; i < v.size(); ++i) switches += v[i] != v[i - 1];
    return switches;
}

}  // namespace

TEST(Exists, BalancedEdgeCountDecides) {
    EXPECT_EQ(exists_ground_state(NonlinearParams(4, 3), 3, 1.0).verdict, Verdict::exists);
    const auto r = exists_ground_state(NonlinearParams(4, 3), 4, 1.0);
    EXPECT_EQ(r.verdict, Verdict::not_exists);
    EXPECT_EQ(r.regime, Regime::balanced);
    EXPECT_FALSE(r.boundary);
    EXPECT_NEAR(r.margin, r.radial_energy - r.line_energy, 1e-16);
}

TEST(Exists, BalancedMarginScalesExactly) {
    const NonlinearParams pq(4, 3);
    const double power = 2 * pq.beta() + 1;
    const double ref = exists_ground_state(pq, 3, 1.0).margin;
    for (double mu : {0.5, 2.0, 4.0}) {
        const double scaled = exists_ground_state(pq, 3, mu).margin / std::pow(mu, power);
        EXPECT_NEAR(scaled / ref, 1.0, 1e-8);
    }
}

TEST(Exists, TwoEdgesAlwaysAdmitGroundStates) {
    for (double p : {2.5, 3.5, 4.5, 5.5})
        for (double q : {2.2, 3.0, 3.8})
            for (double mu : {0.05, 1.0, 20.0}) {
                const auto r = exists_ground_state(NonlinearParams(p, q), 2, mu);
                EXPECT_LT(r.margin, 0.0);
                EXPECT_EQ(r.verdict, Verdict::exists);
            }
}

TEST(KFunction, DerivativeSignsAndFiniteDifferences) {
    EXPECT_NEAR(K_derivative(NonlinearParams(4, 3), 3, 1.0), 0.0, 1e-10);
    const NonlinearParams weak(4, 2.5);
    const double h = 1e-4;
    const double fd = (K_value(weak, 3, 1 + h) - K_value(weak, 3, 1 - h)) / (2 * h);
    const double kd = K_derivative(weak, 3, 1.0);
    EXPECT_GT(kd, 0.0);
    EXPECT_NEAR(kd / fd, 1.0, 1e-5);
    EXPECT_LT(K_derivative(NonlinearParams(4, 3.5), 3, 1.0), 0.0);
    for (double mu : {0.3, 3.0}) {
        const NonlinearParams s(3.2, 3.3);
        const double d = 1e-4 * mu;
        const double f = (K_value(s, 4, mu + d) - K_value(s, 4, mu - d)) / (2 * d);
        EXPECT_NEAR(K_derivative(s, 4, mu) / f, 1.0, 1e-5);
    }
}

TEST(CriticalMass, WeakVertexLosesGroundStatesAboveThreshold) {
    const NonlinearParams pq(4, 2.5);
    const auto r = critical_mass(pq, 3);
    EXPECT_EQ(r.side, CriticalSide::exists_below);
    EXPECT_LE(r.bracket.high - r.bracket.low, 1e-10 * r.mu_critical * 1.01);
    EXPECT_EQ(exists_ground_state(pq, 3, 0.9 * r.mu_critical).verdict, Verdict::exists);
    EXPECT_EQ(exists_ground_state(pq, 3, 1.1 * r.mu_critical).verdict, Verdict::not_exists);

    // Small masses: the exponential competitor already beats the soliton.
    const double small = r.mu_critical / 10;
    EXPECT_LT(trial_exponential_energy(pq, 3, small), line_energy(4, small));
}

TEST(CriticalMass, StrongVertexGainsGroundStatesAboveThreshold) {
    const NonlinearParams pq(4, 3.5);
    const auto r = critical_mass(pq, 3);
    EXPECT_EQ(r.side, CriticalSide::exists_above);
    EXPECT_EQ(exists_ground_state(pq, 3, 0.9 * r.mu_critical).verdict, Verdict::not_exists);
    EXPECT_EQ(exists_ground_state(pq, 3, 1.1 * r.mu_critical).verdict, Verdict::exists);
}

TEST(CriticalMass, AgreesWithDenseScanOracle) {
    for (auto pq : {NonlinearParams(4, 2.5), NonlinearParams(3, 3.5), NonlinearParams(5, 2.5)}) {
        const double theta = theta_p(pq.p());
        double prev_mu = 1e-3;
        double prev = K_value(pq, 3, prev_mu) + theta;
        double found = -1;
        for (double mu = prev_mu * 1.05; mu < 1e4; mu *= 1.05) {
            const double g = K_value(pq, 3, mu) + theta;
            if ((g > 0) != (prev > 0)) {
                found = std::sqrt(mu * prev_mu);
                break;
            }
            prev = g;
            prev_mu = mu;
        }
        ASSERT_GT(found, 0);
        EXPECT_NEAR(critical_mass(pq, 3).mu_critical / found, 1.0, 0.03);
    }
}

TEST(CriticalMass, SingleSignChangeNearRoot) {
    const NonlinearParams pq(4, 2.5);
    const auto r = critical_mass(pq, 3);
    const double theta = theta_p(4);
    int changes = 0;
    double prev = K_value(pq, 3, r.mu_critical / 2) + theta;
    for (int i = 1; i < 64; ++i) {
        const double mu = r.mu_critical / 2 * std::pow(4.0, i / 63.0);
        const double g = K_value(pq, 3, mu) + theta;
        changes += (g > 0) != (prev > 0);
        prev = g;
    }
    EXPECT_EQ(changes, 1);
}

TEST(CriticalMass, Errors) {
    EXPECT_THROW(critical_mass(NonlinearParams(4, 3), 3), RegimeError);
    EXPECT_THROW(critical_mass(NonlinearParams(4, 2.5), 2), NoThresholdError);
    CriticalMassOptions narrow;
    narrow.mu_max = 4.0;
    EXPECT_THROW(critical_mass(NonlinearParams(4, 2.5), 3, narrow), SearchFailure);
}

TEST(TrialEnergy, ValueOrderingAndScaling) {
    EXPECT_NEAR(trial_exponential_energy(NonlinearParams(4, 3), 3, 1.0), -31.0 / 4374.0, 1e-15);
    EXPECT_LE(energy_eta(NonlinearParams(4, 3), 3, 0, 1.0),
              trial_exponential_energy(NonlinearParams(4, 3), 3, 1.0));
    for (double p : {3.0, 4.0, 5.0})
        for (double q : {2.5, 3.0, 3.5}) {
            const NonlinearParams pq(p, q);
            const double lo = std::pow(2.0, q / (4 - q));
            const double hi = std::pow(2.0, (p - q + 2) / (4 - q));
            const double ratio = trial_exponential_energy(pq, 4, 2.0) /
                                 trial_exponential_energy(pq, 4, 1.0);
            EXPECT_GE(ratio, std::min(lo, hi) - 1e-12);
            EXPECT_LE(ratio, std::max(lo, hi) + 1e-12);
        }
}

TEST(Condcrit, PaperIdentities) {
    EXPECT_NEAR(condcrit_lhs(4, 3), 3 * (1 - std::sqrt(2.0 / 11.0)), 1e-12);
    EXPECT_NEAR(condcrit_lhs(4, 4), 8.0 / 3.0, 1e-12);
    EXPECT_NEAR(condcrit_lhs(6, 3), 2.0, 1e-10);
    EXPECT_LT(condcrit_lhs(6, 2), 2.0);
}

TEST(Condcrit, NonDecreasingInEdgeCount) {
    for (double p : {2.2, 3.0, 4.0, 5.0, 6.0}) {
        double prev = condcrit_lhs(p, 2);
        EXPECT_LT(prev, 2.0);
        for (int n = 3; n <= 12; ++n) {
            const double cur = condcrit_lhs(p, n);
            EXPECT_GE(cur, prev);
            prev = cur;
        }
    }
}

TEST(Condcrit, MatchesBetaOracle) {
    for (double p : {2.3, 3.7, 5.1})
        for (int n : {2, 5, 17}) {
            const double t = std::sqrt(p / (p + 2.0 * n * n));
            EXPECT_NEAR(condcrit_lhs(p, n), n * oracle::integral_I(p, t) / oracle::integral_I(p, 0),
                        1e-11);
        }
}

TEST(CriticalN, NearFourAndSix) {
    for (double p : {4.0, 3.9, 4.1, 5.95, 5.99}) EXPECT_EQ(critical_N(p), 3) << p;
}

TEST(CriticalN, GrowsTowardTwo) {
    const int a = critical_N(2.5);
    const int b = critical_N(2.2);
    const int c = critical_N(2.05);
    EXPECT_LT(a, b);
    EXPECT_LT(b, c);
    EXPECT_LE(condcrit_lhs(2.05, c), 2.0);
    EXPECT_GT(condcrit_lhs(2.05, c + 1), 2.0);
    EXPECT_GE(critical_N(2.001), 30);
}

TEST(CriticalN, DefinitionHoldsOnScan) {
    for (double p : {2.3, 2.8, 3.3, 4.6, 5.3}) {
        const int n = critical_N(p);
        EXPECT_LE(condcrit_lhs(p, n), 2.0);
        EXPECT_GT(condcrit_lhs(p, n + 1), 2.0);
        EXPECT_GE(n, 3);
    }
}

TEST(CriticalN, CapExhaustionIsASearchFailure) {
    EXPECT_THROW(critical_N(2.001, 10), SearchFailure);
}

TEST(LowerBound, CertifiesLargeEdgeCountsNearTwo) {
    EXPECT_TRUE(critical_N_lower_bound(2.01, 5));
    EXPECT_TRUE(critical_N_lower_bound(2.002, 10));
    EXPECT_TRUE(critical_N_lower_bound(2.0004, 20));
    EXPECT_FALSE(critical_N_lower_bound(3.9, 50));
    EXPECT_THROW(critical_N_lower_bound(4.0, 3), DomainError);
}

TEST(LowerBound, DominatesTheCondition) {
    for (double p : {2.01, 2.05, 2.2, 2.5, 3.0, 3.5})
        for (int n = 2; n <= 40; ++n)
            if (critical_N_lower_bound(p, n)) {
                EXPECT_LE(condcrit_lhs(p, n), 2.0) << p << " " << n;
                EXPECT_GE(critical_N(p), n);
            }
}

TEST(GPolynomial, ValueAndPositivity) {
    constexpr double pi = std::numbers::pi;
    EXPECT_NEAR(g_polynomial(5), 625 - 280 * pi + 28 * pi * pi, 1e-10);
    EXPECT_NEAR(g_polynomial(5), 21.70298023, 1e-8);
    for (int n = 5; n <= 100; ++n) EXPECT_GT(g_polynomial(n), 0.0);
    EXPECT_THROW(g_polynomial(0), DomainError);
}

TEST(RCurve, EndpointAndDerivative) {
    EXPECT_NEAR(r_value(6), 2.0 / 3.0, 1e-12);
    const auto curve = r_curve({2.1, 3.0, 5.99});
    ASSERT_EQ(curve.size(), 3u);
    for (const auto& pt : curve) EXPECT_LT(3 * pt.r, 2.0);
    for (double p : {3.0, 4.0, 5.0, 5.9}) {
        const double h = 1e-5;
        const double fd = (r_value(p + h) - r_value(p - h)) / (2 * h);
        EXPECT_NEAR(r_derivative(p) / fd, 1.0, 1e-3) << p;
    }
    const double h = 1e-5;
    const double one_sided = (r_value(5.999) - r_value(5.999 - h)) / h;
    EXPECT_GT(r_derivative(5.999), 0.0);
    EXPECT_NEAR(r_derivative(5.999) / one_sided, 1.0, 1e-3);
}

TEST(PhaseDiagram, SingleCellMatchesDirectCall) {
    const auto cells = phase_diagram({{4, 2.5}}, {3}, {1.0});
    ASSERT_EQ(cells.size(), 1u);
    ASSERT_TRUE(cells[0].report);
    const auto direct = exists_ground_state(NonlinearParams(4, 2.5), 3, 1.0);
    EXPECT_EQ(cells[0].report->margin, direct.margin);
    EXPECT_EQ(cells[0].report->verdict, direct.verdict);
}

TEST(PhaseDiagram, MonotoneColumnsAndGridOrder) {
    std::vector<double> mus;
    for (double mu = 0.5; mu < 40; mu *= 1.5) mus.push_back(mu);
    const auto cells = phase_diagram({{4, 2.5}, {4, 3.5}}, {3}, mus, 3);
    ASSERT_EQ(cells.size(), 2 * mus.size());
    std::vector<Verdict> weak, strong;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        EXPECT_EQ(cells[i].mu, mus[i]);
        weak.push_back(cells[i].report->verdict);
        strong.push_back(cells[mus.size() + i].report->verdict);
    }
    EXPECT_EQ(weak.front(), Verdict::exists);
    EXPECT_EQ(weak.back(), Verdict::not_exists);
    EXPECT_EQ(count_switches(weak), 1);
    EXPECT_EQ(strong.front(), Verdict::not_exists);
    EXPECT_EQ(strong.back(), Verdict::exists);
    EXPECT_EQ(count_switches(strong), 1);
}

TEST(PhaseDiagram, RecordsCellErrorsWithoutAborting) {
    const auto cells = phase_diagram({{4, 2.5}, {7, 3}}, {3, 1}, {1.0, -1.0});
    ASSERT_EQ(cells.size(), 8u);
    EXPECT_TRUE(cells[0].report.has_value());
    EXPECT_TRUE(cells[0].error.empty());
    for (std::size_t i = 1; i < cells.size(); ++i) {
        EXPECT_FALSE(cells[i].report.has_value()) << i;
        EXPECT_FALSE(cells[i].error.empty()) << i;
    }
}

TEST(PhaseDiagram, ThreadCountDoesNotChangeResults) {
    const std::vector<ExponentPair> grid{{3, 2.3}, {4, 3}, {5, 3.7}};
    const auto serial = phase_diagram(grid, {3, 4}, {0.5, 2, 8}, 1);
    const auto pooled = phase_diagram(grid, {3, 4}, {0.5, 2, 8}, 4);
    ASSERT_EQ(serial.size(), pooled.size());
    for (std::size_t i = 0; i < serial.size(); ++i)
        EXPECT_EQ(serial[i].report->margin, pooled[i].report->margin);
}
