#include <gtest/gtest.h>

#include <vector>

#include "cjlab/spaces.hpp"

using namespace cjlab;

namespace {
const TNorm kAll[] = {TNorm::Minimum, TNorm::Product, TNorm::Lukasiewicz};

std::vector<double> unit_grid(int n) {
    std::vector<double> g;
    for (int i = 0; i <= n; ++i) g.push_back(static_cast<double>(i) / n);
    return g;
}
}  // namespace

TEST(TNorm, Examples) {
    EXPECT_DOUBLE_EQ(tnorm_apply(TNorm::Minimum, 0.3, 0.7), 0.3);
    EXPECT_DOUBLE_EQ(tnorm_apply(TNorm::Product, 0.42, 1.0), 0.42);
    EXPECT_DOUBLE_EQ(tnorm_apply(TNorm::Lukasiewicz, 0.5, 0.5), 0.0);
    EXPECT_THROW(tnorm_apply(TNorm::Minimum, 1.5, 0.2), DomainError);
    EXPECT_THROW(tnorm_apply(TNorm::Product, -0.1, 0.2), DomainError);
}

TEST(TNorm, Iterate) {
    const std::vector<double> a{0.9, 0.8, 0.7}, b{0.5, 0.5, 0.5}, one{0.37};
    EXPECT_DOUBLE_EQ(tnorm_iterate(TNorm::Minimum, a), 0.7);
    EXPECT_DOUBLE_EQ(tnorm_iterate(TNorm::Product, b), 0.125);
    for (auto t : kAll) EXPECT_DOUBLE_EQ(tnorm_iterate(t, one), 0.37);
    EXPECT_THROW(tnorm_iterate(TNorm::Minimum, std::vector<double>{}), DomainError);
}

TEST(TNorm, Axioms) {
    const auto g = unit_grid(20);
    for (auto t : kAll)
        for (double x : g) {
            EXPECT_NEAR(tnorm_apply(t, x, 1.0), x, kUnitTolerance);
            for (double y : g) {
                EXPECT_NEAR(tnorm_apply(t, x, y), tnorm_apply(t, y, x), kUnitTolerance);
                for (double z : g) {
                    EXPECT_NEAR(tnorm_apply(t, tnorm_apply(t, x, y), z), tnorm_apply(t, x, tnorm_apply(t, y, z)),
                                kUnitTolerance);
                    if (y <= z) EXPECT_LE(tnorm_apply(t, x, y), tnorm_apply(t, x, z) + kUnitTolerance);
                }
            }
        }
}

TEST(Distribution, Examples) {
    const auto h2 = DistributionFunction::step_at(2.0);
    EXPECT_EQ(dist_eval(h2, 3.0), 1.0);
    EXPECT_EQ(dist_eval(h2, 2.0), 0.0);
    EXPECT_EQ(dist_eval(DistributionFunction::induced(0.0), 0.01), 1.0);
    EXPECT_DOUBLE_EQ(dist_eval(DistributionFunction::induced(1.0), 1.0), 0.5);
    EXPECT_EQ(dist_eval(DistributionFunction::induced(1.0), 0.0), 0.0);
}

TEST(Distribution, MonotoneAndBounded) {
    const auto ts = log_grid(1e-6, 1e3, 100);
    for (double u : {0.0, 0.5, 3.0}) {
        const auto mu = DistributionFunction::induced(u);
        double prev = 0.0;
        for (double t : ts) {
            const double v = mu(t);
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
            if (u > 0.0) {
                EXPECT_GT(v, prev);
            } else {
                EXPECT_GE(v, prev);
            }
            prev = v;
        }
    }
}

TEST(Fuzzy, Examples) {
    const FuzzyNorm n(1.0, 1.0);
    EXPECT_EQ(fuzzy_eval(n, 0.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(fuzzy_eval(n, 1.0, 1.0), 0.5);
    EXPECT_EQ(fuzzy_eval(FuzzyNorm(2.0, 3.0), 1.0, -1.0), 0.0);
    EXPECT_THROW(FuzzyNorm(0.0, 1.0), ConfigError);
}

TEST(Fuzzy, ScalingAndTriangle) {
    const FuzzyNorm n(2.0, 0.5);
    const auto ts = log_grid(1e-3, 1e2, 25);
    for (double x : {0.25, 1.0, 7.0})
        for (double c : {-3.0, 0.5, 2.0})
            for (double t : ts) EXPECT_NEAR(n(std::fabs(c) * x, t), n(x, t / std::fabs(c)), kUnitTolerance);
    // N4 with s + t: ‖x+y‖ <= ‖x‖+‖y‖.
    for (double x : {0.0, 1.0, 4.0})
        for (double y : {0.5, 2.0})
            for (double s : ts)
                for (double t : ts)
                    EXPECT_GE(n(x + y, s + t), std::min(n(x, s), n(y, t)) - kUnitTolerance);
}

TEST(RnAxioms, InducedSpaceHasNoViolations) {
    NormedSetting s;
    s.kind = SettingKind::Random;
    const std::vector<double> xs{0.0, 0.5, -1.0, 2.0, 3.5}, cs{-2.0, 0.5, 3.0};
    const auto ts = log_grid(1e-3, 1e3, 15);
    for (auto t : kAll) {
        s.tnorm = t;
        const auto rep = rn_axioms_check(s, xs, cs, ts);
        EXPECT_TRUE(rep.ok()) << to_string(t);
        EXPECT_GT(rep.checks, 0u);
    }
    s.kind = SettingKind::Fuzzy;
    EXPECT_THROW(rn_axioms_check(s, xs, cs, ts), ConfigError);
}

TEST(Setting, Parse) {
    EXPECT_EQ(setting_kind_from_string("fuzzy"), SettingKind::Fuzzy);
    EXPECT_EQ(tnorm_from_string("lukasiewicz"), TNorm::Lukasiewicz);
    EXPECT_THROW(setting_kind_from_string("banach"), ConfigError);
}
