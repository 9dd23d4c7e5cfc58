#include <gtest/gtest.h>

#include <cmath>

#include "cjlab/funceq.hpp"

using namespace cjlab;

namespace {
const RealCarrier R{};

RealVec v(double x) { return RealVec::scalar(x); }

SampledFunction<RealCarrier> rule(std::function<double(double)> g) {
    SampledFunction<RealCarrier> f;
    f.rule = [g](const RealVec& x) { return RealVec::scalar(g(x[0])); };
    f.grid = real_grid(R, {1, 3, 5}, 3, 40);
    return f;
}
}  // namespace

TEST(Defect, Examples) {
    const auto lin = rule([](double x) { return 2.5 * x; });
    const auto off = rule([](double x) { return x + 7.0; });
    for (double x : {-3.0, 0.5, 1.0})
        for (double y : {0.0, 2.0, -1.25})
            for (double z : {1.0, 5.0}) {
                EXPECT_EQ(defect(R, lin, v(x), v(y), v(z)).norm(), 0.0);
                EXPECT_EQ(defect(R, off, v(x), v(y), v(z)).norm(), 0.0);
            }
    const auto sq = rule([](double x) { return x * x; });
    // ((x+z)^2 + y^2)/2 - x^2 - z^2 at (0,2,0).
    EXPECT_DOUBLE_EQ(defect(R, sq, v(0), v(2), v(0))[0], 2.0);
}

TEST(Defect, Symmetries) {
    const auto f = rule([](double x) { return x + 0.3 * std::pow(std::fabs(x), 1.5); });
    const auto g = rule([](double x) { return x + 0.3 * std::pow(std::fabs(x), 1.5) + 4.0 * x; });
    for (double x : {-1.0, 0.5, 3.0})
        for (double y : {0.25, 2.0})
            for (double z : {-0.75, 1.0}) {
                EXPECT_EQ(defect(R, f, v(x), v(y), v(z))[0], defect(R, f, v(x), v(-y), v(z))[0]);
                const double jensen = 2 * f(v((x + z) / 2))[0] - f(v(x))[0] - f(v(z))[0];
                EXPECT_NEAR(defect(R, f, v(x), v(0), v(z))[0], jensen, 1e-14);
                EXPECT_NEAR(defect(R, g, v(x), v(y), v(z))[0], defect(R, f, v(x), v(y), v(z))[0], 1e-13);
            }
}

TEST(Control, Examples) {
    EXPECT_EQ(control_eval(R, ControlFunction::power_sum(1, 1), v(1), v(2), v(1)), 4.0L);
    EXPECT_EQ(control_eval(R, ControlFunction::power_sum(3, 0.5), v(0), v(0), v(0)), 0.0L);
    EXPECT_EQ(control_eval(R, ControlFunction::power_product(2, 1, 1, 1), v(1), v(2), v(3)), 12.0L);
    EXPECT_THROW(ControlFunction::power_sum(-1, 1), ConfigError);
    EXPECT_THROW(ControlFunction::power_sum(1, 0), ConfigError);
    EXPECT_THROW(ControlFunction::power_product(1, 1, -2, 1), ConfigError);
}

TEST(Control, XiHypotheses) {
    std::vector<long double> ts;
    for (int k = -10; k <= 10; ++k) ts.push_back(std::ldexp(1.0L, k));
    // Q_2: |2| = 1/2. ξ(t)=t^{1/2}: ξ(2) = √2 < 2 and ξ(2t) = √2 ξ(t).
    EXPECT_TRUE(xi_sum_hypothesis(ControlFunction::xi_sum(1, 0.5), 0.5L, ts));
    // ξ(t)=t^2: ξ(2) = 4 >= 2.
    EXPECT_FALSE(xi_sum_hypothesis(ControlFunction::xi_sum(1, 2), 0.5L, ts));
    // ξ(|2|) < |2| needs (1/2)^s < 1/2, i.e. s > 1.
    EXPECT_TRUE(xi_product_hypothesis(ControlFunction::xi_product(1, 2), 0.5L, ts));
    EXPECT_FALSE(xi_product_hypothesis(ControlFunction::xi_product(1, 0.25), 0.5L, ts));
}

TEST(FitTheta, AdditiveIsZero) {
    const auto f = rule([](double x) { return -3.0 * x; });
    const auto rep = fit_theta(R, f, ControlFunction::power_sum(1, 0.5), standard_triples(R, f.grid, 10, 10));
    EXPECT_EQ(rep.theta, 0.0);
    EXPECT_GT(rep.samples, 0u);
}

TEST(FitTheta, PowerPerturbationAtMostTwoEpsilon) {
    const double eps = 0.1, r = 0.5;
    const auto f = make_perturbed(R, 1.0, Perturbation::power(eps, r), real_grid(R, {1, 3, 5}, 3, 40));
    const auto triples = standard_triples(R, f.grid, 10, 10);
    const auto rep = fit_theta(R, f, ControlFunction::power_sum(1, r), triples);
    EXPECT_GE(rep.theta, 0.0);
    EXPECT_LE(rep.theta, 2 * eps);
    // Oracle: brute-force maximum of the ratio over the same sample.
    long double best = 0;
    for (const auto& t : triples) {
        const double x = t.x[0], y = t.y[0], z = t.z[0];
        auto g = [&](double s) { return s + eps * std::sqrt(std::fabs(s)); };
        const double d = std::fabs(g((x + y + z) / 2) + g((x - y + z) / 2) - g(x) - g(z));
        const double w = std::sqrt(std::fabs(x)) + std::sqrt(std::fabs(y)) + std::sqrt(std::fabs(z));
        if (w > 0) best = std::max<long double>(best, d / w);
    }
    EXPECT_NEAR(rep.theta, static_cast<double>(best), 1e-14);
    EXPECT_LE(worst_defect_excess(R, f, rep.fitted, triples), 0.0L);
}

TEST(FitTheta, SquareIsFinite) {
    const auto f = rule([](double x) { return x * x; });
    const auto rep = fit_theta(R, f, ControlFunction::power_sum(1, 2), standard_triples(R, f.grid, 6, 6));
    EXPECT_TRUE(std::isfinite(rep.theta));
    EXPECT_GT(rep.theta, 0.0);
}

TEST(FitTheta, MonotoneInSample) {
    const auto f = make_perturbed(R, 1.0, Perturbation::power(0.2, 0.25), real_grid(R, {1, 3, 5}, 3, 40));
    const auto phi = ControlFunction::power_sum(1, 0.25);
    const auto small = standard_triples(R, f.grid, 2, 2, 3);
    auto big = standard_triples(R, f.grid, 8, 8, 6);
    big.insert(big.end(), small.begin(), small.end());
    EXPECT_LE(fit_theta(R, f, phi, small).theta, fit_theta(R, f, phi, big).theta);
}

TEST(FitTheta, Unfittable) {
    const auto f = make_perturbed(R, 1.0, Perturbation::power(0.1, 1.0), real_grid(R, {1, 3}, 1, 10));
    std::vector<Triple<RealCarrier>> ts{{v(0), v(2), v(1)}};
    EXPECT_THROW(fit_theta(R, f, ControlFunction::power_product(1, 1, 1, 1), ts), DomainError);
}

TEST(Perturbed, Examples) {
    const auto grid = real_grid(R, {1, 3, 5}, 3, 40);
    const auto id = make_perturbed(R, 1.0, Perturbation::none(), grid);
    EXPECT_EQ(defect(R, id, v(1), v(2), v(3)).norm(), 0.0);
    const auto f = make_perturbed(R, 1.0, Perturbation::power(0.1, 0.5), grid);
    EXPECT_DOUBLE_EQ(f(v(1))[0], 1.1);
    EXPECT_EQ(f(v(0))[0], 0.0);
    for (const auto& x : grid.points)
        EXPECT_NEAR(std::fabs(f(x)[0] - x[0]), 0.1 * std::sqrt(std::fabs(x[0])), 1e-15);
    EXPECT_THROW(make_perturbed(R, 1.0, Perturbation::valuation_shift(1, 1, 0, 0), grid), ConfigError);
}

TEST(Perturbed, ValuationShift) {
    const PadicCarrier P{};
    const auto grid = padic_grid(P, {{1, 1}, {3, 1}, {1, 3}}, 2, 64);
    const auto f = make_perturbed(P, P.rational(1), Perturbation::valuation_shift(1, 1, 3, 2), grid);
    // δ(x) = 2^{3 + 2 v(x)}; x = 12 has v = 2.
    const auto x = P.rational(12);
    const auto d = f(x) - x, want = P.rational(128);
    EXPECT_TRUE(agrees_to(d, want, precision_floor(d, want)));
    EXPECT_EQ(d.valuation(), 7);
    EXPECT_TRUE(f(P.zero()).is_zero());
    EXPECT_THROW(make_perturbed(P, P.rational(1), Perturbation::power(0.1, 1), grid), ConfigError);
}

TEST(Grid, RealDefaultHas25Points) {
    const auto g = real_grid(R, {1, 3, 5}, 3, 40);
    EXPECT_EQ(g.size(), 25u);
    EXPECT_EQ(g.ids.front(), "x0");
}
