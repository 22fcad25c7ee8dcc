#include "biot/verification.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace biot;

namespace {

SeparableTerm term(double s, std::vector<double> px, std::vector<double> py, std::vector<double> pz = {1.0})
{
  SeparableTerm t;
  t.scale = s;
  t.factors[0].poly = std::move(px);
  t.factors[1].poly = std::move(py);
  t.factors[2].poly = std::move(pz);
  return t;
}

/// Linear fields, contained in every discrete space.
ExactSolution linear_solution(double scale, double lambda)
{
  std::array<ScalarField, 3> u;
  u[0].re = {term(scale, {1, 2}, {1})};
  u[0].im = {term(scale, {1}, {0, 1})};
  u[1].re = {term(-scale, {0, 1}, {1})};
  ScalarField p;
  p.re = {term(scale, {1, 1}, {1})};
  p.im = {term(0.5 * scale, {1}, {0, 1})};
  ScalarField fb;
  fb.re = {term(scale, {0, 1}, {1})};
  return ExactSolution(2, u, p, fb, lambda);
}

ManufacturedCase base_case(int degree, double delta1)
{
  ManufacturedCase c;
  c.degree = degree;
  c.stab = {delta1, 0.0};
  return c;
}

} // namespace

TEST(Errors, InterpolantOfDiscreteFieldsHasZeroError)
{
  const auto prm = derive_coefficients(RawMaterial{});
  const Mesh m = generate_unit_square(4);
  const Discretization disc(m, 1);
  const auto ex = linear_solution(1.0, prm.lambda);
  const auto e = compute_error(disc, prm, interpolate(disc, ex), ex);
  EXPECT_LT(e.total, 1e-12);
}

TEST(Errors, TotalIsQuadraticSumOfFields)
{
  const auto prm = derive_coefficients(RawMaterial{});
  const Mesh m = generate_unit_square(4);
  const Discretization disc(m, 1);
  const auto ex = manufactured_2d(prm);
  const auto e = compute_error(disc, prm, interpolate(disc, ex), ex);
  EXPECT_GT(e.total, 0.0);
  EXPECT_NEAR(e.total * e.total, e.err_u * e.err_u + e.err_p * e.err_p + e.err_phi * e.err_phi,
              1e-12 * e.total * e.total);
  EXPECT_NEAR(e.h, std::sqrt(2.0) / 4.0, 1e-15);
  EXPECT_EQ(e.dofs, disc.dofs().size());
}

TEST(Errors, NormMatrixAgreesWithQuadratureError)
{
  const auto prm = derive_coefficients(RawMaterial{});
  const Mesh m = generate_unit_square(3);
  const Discretization disc(m, 1);
  const auto a = linear_solution(1.0, prm.lambda);
  const auto b = linear_solution(0.3, prm.lambda);
  const auto xa = interpolate(disc, a);
  const auto xb = interpolate(disc, b);
  CVector diff(xa.size());
  for (std::size_t i = 0; i < xa.size(); ++i)
    diff[i] = xa[i] - xb[i];
  const auto gram = assemble_norm_matrix(disc, prm);
  const double quad = compute_error(disc, prm, xa, b).total;
  EXPECT_NEAR(u_norm(gram, diff), quad, 1e-10 * quad);
}

TEST(Errors, DiscreteNormDominatesContinuousNorm)
{
  const auto prm = derive_coefficients(RawMaterial{});
  const Mesh m = generate_unit_square(4);
  const Discretization disc(m, 1);
  const auto ex = manufactured_2d(prm);
  const auto x = interpolate(disc, ex);
  const auto plain = compute_error(disc, prm, x, ex);
  const auto mesh_dep = compute_error(disc, prm, x, ex, Stabilization{0.5, 1.0});
  ASSERT_TRUE(mesh_dep.discrete_total.has_value());
  EXPECT_GE(*mesh_dep.discrete_total, plain.total);
  EXPECT_FALSE(plain.discrete_total.has_value());
}

TEST(Slopes, PowerLawIsRecovered)
{
  const std::vector<double> h{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> e;
  for (double x : h)
    e.push_back(3.0 * x * x);
  EXPECT_NEAR(least_squares_slope(h, e), 2.0, 1e-12);
  e[0] = 100.0; // only the last three levels count
  EXPECT_NEAR(least_squares_slope(h, e), 2.0, 1e-12);
}

class InterpolationRate : public ::testing::TestWithParam<int>
{
};

TEST_P(InterpolationRate, MatchesPolynomialDegree)
{
  const int k = GetParam();
  const auto prm = derive_coefficients(RawMaterial{});
  const auto ex = manufactured_2d(prm);
  std::vector<double> h, e;
  for (int n : {8, 16, 32}) {
    const Mesh m = generate_unit_square(n);
    const Discretization disc(m, k);
    const auto r = compute_error(disc, prm, interpolate(disc, ex), ex);
    h.push_back(r.h);
    e.push_back(r.total);
  }
  const double s = least_squares_slope(h, e);
  EXPECT_GT(s, k - 0.1);
  EXPECT_LT(s, k + 0.3);
}

INSTANTIATE_TEST_SUITE_P(Degrees, InterpolationRate, ::testing::Values(1, 2));

TEST(Manufactured, QuadraticBeatsLinear)
{
  const auto r1 = run_manufactured(base_case(1, 0.5), 16);
  const auto r2 = run_manufactured(base_case(2, 0.5), 16);
  EXPECT_LT(r2.error.total, r1.error.total);
  EXPECT_TRUE(r1.solve.converged);
}

TEST(Manufactured, ErrorDecreasesUnderRefinement)
{
  const std::vector<int> levels{4, 8, 16};
  const auto res = convergence_study(base_case(1, 0.0), levels);
  ASSERT_TRUE(res.complete);
  ASSERT_EQ(res.runs.size(), 3u);
  EXPECT_GT(res.runs[0].error.total, res.runs[1].error.total);
  EXPECT_GT(res.runs[1].error.total, res.runs[2].error.total);
  EXPECT_GT(res.slopes.total, 0.8);
}

TEST(Sweeps, BaselinePoissonRatioReproducesSingleRun)
{
  const auto c = base_case(1, 0.5);
  const std::vector<double> nus{0.4}, d2{0.0};
  const auto sweep = nu_sweep(c, 8, nus, d2);
  const auto single = run_manufactured(c, 8);
  ASSERT_EQ(sweep.size(), 1u);
  EXPECT_EQ(sweep[0].error.total, single.error.total);
  EXPECT_EQ(sweep[0].nu, 0.4);
}

TEST(Sweeps, PressureStabilizationIsMildAtModeratePermeability)
{
  const std::vector<double> kappas{0.1}, d2{0.0, 1e-2};
  const auto runs = kappa_sweep(base_case(1, 0.5), 8, kappas, d2);
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[0].delta2, 0.0);
  EXPECT_EQ(runs[1].delta2, 1e-2);
  EXPECT_LT(std::abs(runs[0].error.total - runs[1].error.total), 0.25 * runs[0].error.total);
}

TEST(Sweeps, ParallelMatchesSequential)
{
  const std::vector<double> kappas{1e-1, 1e-3}, d2{0.0, 1.0};
  const auto seq = kappa_sweep(base_case(1, 0.5), 4, kappas, d2, false);
  const auto par = kappa_sweep(base_case(1, 0.5), 4, kappas, d2, true);
  ASSERT_EQ(seq.size(), 4u);
  ASSERT_EQ(par.size(), 4u);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    EXPECT_EQ(seq[i].kappa, par[i].kappa);
    EXPECT_EQ(seq[i].delta2, par[i].delta2);
    EXPECT_EQ(seq[i].error.total, par[i].error.total);
  }
  EXPECT_EQ(seq[0].kappa, 1e-1);
  EXPECT_EQ(seq[1].kappa, 1e-1);
  EXPECT_EQ(seq[2].kappa, 1e-3);
}

TEST(Spectrum, LowFrequencyBelowFirstEigenvalue)
{
  const auto prm = derive_coefficients(RawMaterial{});
  const std::vector<int> clamped{1, 2, 3, 4};
  const auto coarse = elasticity_spectrum(generate_unit_square(4), 1, prm, clamped, 6);
  const auto fine = elasticity_spectrum(generate_unit_square(8), 1, prm, clamped, 6);
  EXPECT_EQ(fine.m_bar, 0u);
  EXPECT_DOUBLE_EQ(fine.omega2, 1.0);
  ASSERT_EQ(fine.eigenvalues.size(), 6u);
  for (std::size_t i = 0; i + 1 < fine.eigenvalues.size(); ++i)
    EXPECT_LE(fine.eigenvalues[i], fine.eigenvalues[i + 1]);
  // conforming refinement lowers every Rayleigh-Ritz eigenvalue
  for (std::size_t i = 0; i < 6; ++i)
    EXPECT_LE(fine.eigenvalues[i], coarse.eigenvalues[i] * (1.0 + 1e-12));
  EXPECT_NEAR(fine.gap, (fine.eigenvalues[0] - 1.0) / (1.0 + fine.eigenvalues[0]), 1e-12);
}

TEST(InfSup, IdentityOperatorGivesUnitConstant)
{
  Eigen::MatrixXd n(3, 3);
  n << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  EXPECT_NEAR(discrete_infsup(n.cast<cplx>(), n), 1.0, 1e-12);
  EXPECT_NEAR(discrete_infsup((2.0 * n).cast<cplx>(), n), 2.0, 1e-12);
}

TEST(InfSup, IndefiniteGramIsRejected)
{
  Eigen::MatrixXd n(2, 2);
  n << 1, 2, 2, 1;
  EXPECT_THROW(discrete_infsup(Eigen::MatrixXcd::Identity(2, 2), n), SolverError);
}

TEST(Profiles, SecondDifferenceSignChanges)
{
  std::vector<cplx> linear, cubic, zigzag;
  for (int i = 0; i < 21; ++i) {
    const double x = -1.0 + 0.1 * i;
    linear.emplace_back(2.0 * x + 1.0, -x);
    cubic.emplace_back(x * x * x, 0.0);
    zigzag.emplace_back(i % 2 ? 1.0 : -1.0, 0.0);
  }
  EXPECT_EQ(second_difference_sign_changes(linear), 0u);
  EXPECT_EQ(second_difference_sign_changes(cubic), 1u);
  EXPECT_EQ(second_difference_sign_changes(zigzag), 18u);
  std::vector<cplx> imag_only;
  for (int i = 0; i < 41; ++i)
    imag_only.emplace_back(1.0, std::sin(0.25 * i));
  EXPECT_GE(second_difference_sign_changes(imag_only), 2u);
}

TEST(Profiles, LinearPressureIsSampledExactly)
{
  const auto prm = derive_coefficients(RawMaterial{});
  const Mesh m = generate_unit_square(5);
  const Discretization disc(m, 2);
  const auto ex = linear_solution(1.0, prm.lambda);
  const auto x = interpolate(disc, ex);
  const Vec3 a{0.5, 0.0, 0.0}, b{0.5, 1.0, 0.0};
  const auto vals = sample_pressure(disc, x, a, b, 11);
  ASSERT_EQ(vals.size(), 11u);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const Vec3 pt{0.5, 0.1 * static_cast<double>(i), 0.0};
    EXPECT_LT(std::abs(vals[i] - ex.p(pt)), 1e-13);
  }
}

TEST(Layered, BoundaryCoversAllSides)
{
  LayeredConfig cfg;
  cfg.n = 6;
  const Mesh m = layered_mesh(cfg);
  const auto spec = layered_boundary(m, 1e-2, 1e-2);
  EXPECT_NO_THROW(spec.validate(m));
  EXPECT_EQ(spec.conditions.at(3).displacement, DisplacementCondition::dirichlet);
  EXPECT_EQ(spec.conditions.at(1).pressure, PressureCondition::dirichlet);
}

TEST(Layered, SmallRunIsFiniteAndConverges)
{
  LayeredConfig cfg;
  cfg.n = 12;
  cfg.omegas = {50.0};
  cfg.samples = 50;
  const Mesh m = layered_mesh(cfg);
  const Discretization disc(m, 1);
  const auto runs = layered_experiment(cfg, disc);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_TRUE(runs[0].finite);
  EXPECT_TRUE(runs[0].report.converged);
  EXPECT_DOUBLE_EQ(runs[0].delta1, 1.0 / 2500.0);
  EXPECT_EQ(runs[0].profile.size(), 50u);
}
