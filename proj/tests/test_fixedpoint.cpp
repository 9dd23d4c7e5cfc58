#include <gtest/gtest.h>

#include <cmath>

#include "cjlab/fixedpoint.hpp"

using namespace cjlab;

namespace {
const RealCarrier R{};
const PadicCarrier P{};

Grid<RealCarrier> grid25() { return real_grid(R, {1, 3, 5}, 3, 40); }
}  // namespace

TEST(GenMetric, Examples) {
    const auto g = grid25();
    const auto phi = ControlFunction::power_sum(2.0, 0.5);
    const auto f = make_perturbed(R, 1.0, Perturbation::power(0.3, 0.5), g);
    const auto id = make_perturbed(R, 1.0, Perturbation::none(), g);
    EXPECT_EQ(gen_metric(R, f, f, phi).value, 0.0L);
    // Ratio ε‖x‖^r / (θ(2+2^r)‖x‖^r) is constant.
    const double want = 0.3 / (2.0 * (2 + std::sqrt(2.0)));
    EXPECT_NEAR(static_cast<double>(gen_metric(R, f, id, phi).value), want, 1e-15);
    // g - h = φ(·,2·,·).
    auto h = id;
    h.rule = [phi](const RealVec& x) {
        const double n = x.norm();
        return x + RealVec::scalar(static_cast<double>(phi(n, 2 * n, n)));
    };
    EXPECT_NEAR(static_cast<double>(gen_metric(R, h, id, phi).value), 1.0, 1e-15);
    // Offsets at 0 where φ vanishes make the distance infinite.
    const auto c = make_perturbed(R, 1.0, Perturbation::power(0.1, 0.0), g);
    EXPECT_TRUE(gen_metric(R, c, id, phi).infinite);
}

TEST(ApplyJ, Examples) {
    const auto g = grid25();
    const ContractionOperator down{Direction::Downscale, 0.5L};
    const auto lin = make_perturbed(R, 4.0, Perturbation::none(), g);
    const auto jl = apply_J(R, lin, down);
    for (const auto& x : g.points) EXPECT_EQ(jl(x), lin(x));
    EXPECT_EQ(jl.grid.depth, g.depth - 1);
    auto sq = lin;
    sq.rule = [](const RealVec& x) { return RealVec::scalar(x[0] * x[0]); };
    const auto js = apply_J(R, sq, down);
    for (const auto& x : g.points) EXPECT_DOUBLE_EQ(js(x)[0], x[0] * x[0] / 2);
    auto cst = lin;
    cst.rule = [](const RealVec&) { return RealVec::scalar(1.5); };
    EXPECT_EQ(apply_J(R, cst, down)(RealVec::scalar(7))[0], 3.0);
    cst.grid.depth = 0;
    EXPECT_THROW(apply_J(R, cst, down), DepthError);
}

TEST(FixedPoint, Additive) {
    const auto g = grid25();
    const auto f = make_perturbed(R, 1.5, Perturbation::none(), g);
    const auto phi = ControlFunction::power_sum(1, 2);
    const ContractionOperator op{Direction::Downscale, declared_lipschitz(phi, Direction::Downscale, 2)};
    const auto r = iterate_to_fixed_point(R, f, op, phi, 40);
    EXPECT_EQ(r.d_f_Jf.value, 0.0L);
    EXPECT_EQ(r.radius, 0.0L);
    for (const auto& p : r.extraction.points) EXPECT_EQ(p.A, p.fx);
}

TEST(FixedPoint, UpscaleClosedFormDistance) {
    const double eps = 0.1, r = 0.5, theta = 0.7;
    const auto g = grid25();
    const auto f = make_perturbed(R, 1.0, Perturbation::power(eps, r), g);
    const auto phi = ControlFunction::power_sum(theta, r);
    const ContractionOperator op{Direction::Upscale, declared_lipschitz(phi, Direction::Upscale, 2)};
    EXPECT_NEAR(static_cast<double>(op.lipschitz), std::pow(2.0, r - 1), 1e-15);
    const auto res = iterate_to_fixed_point(R, f, op, phi, 40);
    const double want = eps * (1 - std::pow(2.0, r - 1)) / (theta * (2 + std::pow(2.0, r)));
    // The orbit reaches 2^39 x, where f(y) - f(2y)/2 cancels about 8 digits.
    EXPECT_NEAR(static_cast<double>(res.d_f_Jf.value), want, 1e-8 * want);
    EXPECT_TRUE(res.decay_ok) << res.decay_witness;
    EXPECT_TRUE(res.apriori_ok) << res.apriori_witness;
    for (const auto& p : res.extraction.points) EXPECT_NEAR(p.A[0], p.x[0], 1e-6);
}

TEST(FixedPoint, AgreesWithDirect) {
    const auto g = grid25();
    const auto f = make_perturbed(R, 1.0, Perturbation::power(0.1, 2.0), g);
    const auto phi = ControlFunction::power_sum(1, 2);
    const ContractionOperator op{Direction::Downscale, declared_lipschitz(phi, Direction::Downscale, 2)};
    const auto fp = iterate_to_fixed_point(R, f, op, phi, 40);
    const auto dm = extract(R, f, Direction::Downscale, 40);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(fp.extraction.points[i].A, dm.points[i].A);
}

TEST(FixedPoint, PadicDistanceWithinAlphaOverTwo) {
    // ‖Df‖ <= φ and φ(x/2,y/2,z/2) <= αφ/|2| give d(f,Jf) <= α/|2|.
    const auto grid = padic_grid(P, {{1, 1}, {3, 1}, {1, 3}}, 2, 64);
    const auto f = make_perturbed(P, P.rational(1), Perturbation::valuation_shift(1, 1, 3, 0), grid);
    const auto fit = fit_theta(P, f, ControlFunction::power_sum(1, 0.5), standard_triples(P, grid, 64, 0));
    const long double alpha = declared_lipschitz(fit.fitted, Direction::Downscale, P.two());
    EXPECT_NEAR(static_cast<double>(alpha), std::pow(2.0, -0.5), 1e-15);
    const auto res = iterate_to_fixed_point(P, f, {Direction::Downscale, alpha}, fit.fitted, 64);
    EXPECT_LE(res.d_f_Jf.value, alpha / P.two() * (1 + 1e-12L));
    EXPECT_TRUE(res.decay_ok) << res.decay_witness;
    EXPECT_TRUE(res.apriori_ok) << res.apriori_witness;
}

TEST(Lipschitz, ProbesRespectDeclaredConstant) {
    const auto g = grid25();
    const auto f = make_perturbed(R, 1.0, Perturbation::power(0.1, 1.5), g);
    const auto core = make_perturbed(R, 1.0, Perturbation::none(), g);
    const auto phi = ControlFunction::power_sum(1, 1.5);
    const ContractionOperator op{Direction::Downscale, declared_lipschitz(phi, Direction::Downscale, 2)};
    const auto rep = lipschitz_probe(R, op, phi, probe_pairs(R, f, core, op, 42), g, 20);
    EXPECT_TRUE(rep.pass) << static_cast<double>(rep.max_ratio);
    EXPECT_EQ(rep.measured, 9u);
    // Identical pair is skipped.
    const auto same = lipschitz_probe(R, op, phi, {{core, core, "same"}}, g, 5);
    EXPECT_EQ(same.skipped, 1u);
    // A too-small declared constant is caught.
    const ContractionOperator tight{Direction::Downscale, op.lipschitz / 2};
    EXPECT_FALSE(lipschitz_probe(R, tight, phi, probe_pairs(R, f, core, tight, 42), g, 20).pass);
}

TEST(Lipschitz, PadicPairDifferingByControl) {
    const auto grid = padic_grid(P, {{1, 1}, {3, 1}}, 2, 64);
    const auto f = make_perturbed(P, P.rational(1), Perturbation::valuation_shift(1, 1, 2, 0), grid);
    const auto core = make_perturbed(P, P.rational(1), Perturbation::none(), grid);
    const auto phi = ControlFunction::power_sum(1, 0.5);
    const ContractionOperator op{Direction::Downscale, declared_lipschitz(phi, Direction::Downscale, P.two())};
    const auto rep = lipschitz_probe(P, op, phi, probe_pairs(P, f, core, op, 3), grid, 20);
    EXPECT_TRUE(rep.pass) << static_cast<double>(rep.max_ratio);
    EXPECT_GT(rep.measured, 0u);
}
