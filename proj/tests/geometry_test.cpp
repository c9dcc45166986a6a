#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace jordan;
using jordan::testing::diag_point;
using jordan::testing::entry;
using jordan::testing::near_unit;

namespace {

ImmersionPair default_pair(const CatalogEntry& e) { return ImmersionPair(e.algebra, e.default_gamma); }

std::vector<CatalogEntry> geometry_entries() {
  return {entry(Family::RealLine),
          entry(Family::ComplexField),
          make_algebra(FamilyTag::quadratic_real(jordan::testing::qf_form())),
          entry(Family::SymReal, 3),
          entry(Family::HermComplex, 3),
          entry(Family::SkewHermQuat, 2),
          entry(Family::FullReal, 3),
          entry(Family::TruncPoly, 4),
          catalog_direct_sum({entry(Family::RealLine), entry(Family::SymReal, 3)})};
}

ImmersionPair mixed_weights_pair() {
  auto sum = catalog_direct_sum({entry(Family::RealLine), entry(Family::SymReal, 3)}, std::vector<double>{2.0, 1.0});
  return default_pair(sum);
}

}  // namespace

TEST(Zeta, AtUnit) {
  Rng rng(30);
  for (const auto& e : geometry_entries()) {
    ImmersionPair pair = default_pair(e);
    const Vector u = pair.unit();
    ZetaFrame f(pair, u);
    const Matrix& gamma = pair.gamma_matrix();
    EXPECT_NEAR(f.zeta(u), 1.0, 1e-12) << e.name;
    EXPECT_LT((f.d_zeta() - gamma).cwiseAbs().maxCoeff(), 1e-12) << e.name;
    for (int i = 0; i < 5; ++i) {
      Vector a = rng.normal_vector(pair.dim()), v = rng.normal_vector(pair.dim());
      Vector w = rng.normal_vector(pair.dim()), s = rng.normal_vector(pair.dim());
      const Algebra& j = pair.algebra();
      EXPECT_NEAR(f.zeta(a), -a.dot(gamma * u), 1e-12) << e.name;
      // D^2 zeta(a, v, w) = -2 gamma(a, v w)
      EXPECT_NEAR(a.dot(f.d2(v, w)), -2 * a.dot(gamma * mul(j, v, w)), 1e-10) << e.name;
      // D^3 zeta(a, v, w, s) = 2 gamma(a, s(wv) + w(sv) + (sw)v)
      Vector cubic = mul(j, s, mul(j, w, v)) + mul(j, w, mul(j, s, v)) + mul(j, mul(j, s, w), v);
      EXPECT_NEAR(a.dot(f.d3(v, w, s)), 2 * a.dot(gamma * cubic), 1e-9) << e.name;
    }
  }
}

TEST(Zeta, DerivativesMatchFiniteDifferences) {
  Rng rng(31);
  for (const auto& e : geometry_entries()) {
    ImmersionPair pair = default_pair(e);
    const int n = pair.dim();
    for (int i = 0; i < 3; ++i) {
      Vector x = near_unit(pair.algebra(), rng);
      ZetaFrame f(pair, x);
      const double h = 1e-5 * (1 + x.norm());
      auto field = [&](const Vector& y) { return zeta_form(pair, y); };
      Matrix jac = (4 * fd::jacobian(field, x, h / 2) - fd::jacobian(field, x, h)) / 3;
      EXPECT_LT((jac - f.d_zeta()).norm(), 1e-6 * (1 + f.d_zeta().norm())) << e.name;
      Vector v = rng.unit_vector(n), w = rng.unit_vector(n), s = rng.unit_vector(n);
      auto dz = [&](double t) { return Matrix(ZetaFrame(pair, x + t * w).d_zeta()); };
      Vector fd2 = (4 * (dz(h / 2) - dz(-h / 2)) / h - (dz(h) - dz(-h)) / (2 * h)) * v / 3;
      EXPECT_LT((fd2 - f.d2(v, w)).norm(), 1e-6 * (1 + fd2.norm())) << e.name;
      auto d2 = [&](double t) { return Vector(ZetaFrame(pair, x + t * s).d2(v, w)); };
      Vector fd3 = (4 * (d2(h / 2) - d2(-h / 2)) / h - (d2(h) - d2(-h)) / (2 * h)) / 3;
      EXPECT_LT((fd3 - f.d3(v, w, s)).norm(), 1e-6 * (1 + fd3.norm())) << e.name;
      EXPECT_LT(closedness_residual(pair, x), 1e-7) << e.name;
    }
  }
}

TEST(Zeta, InversionInvariance) {
  Rng rng(32);
  for (const auto& e : geometry_entries()) {
    ImmersionPair pair = default_pair(e);
    const int n = pair.dim();
    for (int i = 0; i < 3; ++i) {
      Vector x = near_unit(pair.algebra(), rng);
      ZetaFrame f(pair, x), g(pair, f.inverse());
      Vector u = rng.normal_vector(n), v = rng.normal_vector(n);
      Vector ut = -f.p().partialPivLu().solve(u), vt = -f.p().partialPivLu().solve(v);
      double lhs = ut.dot(g.d_zeta() * vt), rhs = u.dot(f.d_zeta() * v);
      EXPECT_NEAR(lhs, rhs, 1e-9 * (1 + std::abs(rhs))) << e.name;
      EXPECT_NEAR(g.zeta(ut), -f.zeta(u), 1e-9 * (1 + std::abs(f.zeta(u)))) << e.name;
    }
  }
}

TEST(Zeta, HomotheticScaling) {
  Rng rng(33);
  for (const auto& e : geometry_entries()) {
    ImmersionPair pair = default_pair(e);
    Vector x = near_unit(pair.algebra(), rng);
    ZetaFrame f(pair, x);
    const double r_cubic = parallel_cubic_residual(pair, x);
    const double r_sphere = hypersphere_residual(pair, x);
    for (double lambda : {0.5, 3.0}) {
      ZetaFrame fl(pair, lambda * x);
      EXPECT_LT((lambda * fl.zeta() - f.zeta()).norm(), 1e-12 * (1 + f.zeta().norm())) << e.name;
      EXPECT_LT((lambda * lambda * fl.d_zeta() - f.d_zeta()).norm(), 1e-11 * (1 + f.d_zeta().norm())) << e.name;
      EXPECT_NEAR(parallel_cubic_residual(pair, lambda * x), r_cubic, 1e-9) << e.name;
      EXPECT_NEAR(hypersphere_residual(pair, lambda * x), r_sphere, 1e-9) << e.name;
    }
  }
}

TEST(Zeta, DirectSumIsBlockwise) {
  auto r = entry(Family::RealLine);
  auto s = entry(Family::SymReal, 3);
  auto sum = catalog_direct_sum({r, s});
  Matrix gamma = Matrix::Zero(7, 7);
  gamma(0, 0) = -1.0;
  gamma.block(1, 1, 6, 6) = s.default_gamma.matrix();
  ImmersionPair whole(sum.algebra, TraceForm(gamma), false);
  ImmersionPair left(r.algebra, r.default_gamma), right(s.algebra, s.default_gamma);
  Vector x(7);
  x << 2.5, diag_point({1, 2, 3});
  x.tail(6) += 0.1 * Vector::Ones(6);
  Vector z = zeta_form(whole, x);
  EXPECT_NEAR(z(0), zeta_form(left, x.head(1))(0), 1e-14);
  EXPECT_LT((z.tail(6) - zeta_form(right, x.tail(6))).norm(), 1e-13);
}

TEST(Potential, CanonicalValues) {
  auto s = entry(Family::SymReal, 3);
  auto phi = PotentialSpec::canonical(s);
  EXPECT_NEAR(phi(diag_point({1, 2, 3})), std::log(6.0) / 3.0, 1e-15);
  EXPECT_NEAR(phi(s.algebra.unit()), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(phi.homogeneity(), 1.0);

  auto t = PotentialSpec::canonical(entry(Family::TruncPoly, 3));
  Vector p(3);
  p << 2, 1, 0;  // log 2 + 1/2 - 1/8
  EXPECT_NEAR(t(p), std::log(2.0) + 0.375, 1e-15);
}

TEST(Potential, DirectSumAdds) {
  auto r = entry(Family::RealLine);
  auto s = entry(Family::SymReal, 3);
  PotentialSpec sum({{r, PotentialKind::RealLog, 0.5}, {s, PotentialKind::RealLog, 0.25}});
  PotentialSpec left({{r, PotentialKind::RealLog, 0.5}}), right({{s, PotentialKind::RealLog, 0.25}});
  Vector x(7);
  x << 3.0, diag_point({1, 2, 3});
  EXPECT_NEAR(sum(x), left(x.head(1)) + right(x.tail(6)), 1e-14);
  EXPECT_NEAR(sum.homogeneity(), 0.5 + 1.5, 1e-15);
}

TEST(Potential, GradientIsScaledZeta) {
  Rng rng(34);
  std::vector<PotentialSpec> potentials;
  for (const auto& e : geometry_entries())
    if (e.omega.blocks.size() == 1) potentials.push_back(PotentialSpec::canonical(e));
  potentials.push_back(PotentialSpec({{entry(Family::ComplexField), PotentialKind::ComplexLog, Complex(1, 0.25)}}));
  potentials.push_back(PotentialSpec({{entry(Family::RealLine), PotentialKind::RealLog, 2.0},
                                      {entry(Family::SymReal, 3), PotentialKind::RealLog, 1.0 / 6}}));
  for (const auto& phi : potentials) {
    ImmersionPair pair = phi.pair();
    const double nu = phi.homogeneity();
    for (int i = 0; i < 3; ++i) {
      Vector x = near_unit(phi.algebra(), rng, 0.2);
      Vector grad = fd::gradient([&](const Vector& y) { return phi(y); }, x, {1e-4, 0, 0, 0, true});
      Vector expected = nu * zeta_form(pair, x);
      EXPECT_LT((grad - expected).norm(), 1e-7 * (1 + expected.norm())) << phi.algebra().family();
      for (double lambda : {0.5, 3.0})
        EXPECT_NEAR(phi(lambda * x), phi(x) + nu * std::log(lambda), 1e-12 * (1 + std::abs(phi(x))));
    }
  }
}

TEST(Potential, LineIntegralRecoversPotential) {
  Rng rng(35);
  for (const auto& e : {entry(Family::SymReal, 3), entry(Family::HermComplex, 3), entry(Family::ComplexField)}) {
    auto phi = PotentialSpec::canonical(e);
    ImmersionPair pair = phi.pair();
    Vector x = near_unit(e.algebra, rng, 0.2);
    EXPECT_NEAR(phi.homogeneity() * potential_line_integral(pair, x, e.algebra.unit()), phi(x), 1e-10) << e.name;
  }
  auto s = entry(Family::SymReal, 3);
  ImmersionPair pair = default_pair(s);
  EXPECT_NEAR(potential_line_integral(pair, diag_point({1, 2, 3}), s.algebra.unit()), std::log(6.0) / 3, 1e-12);
}

TEST(Potential, PathThroughSingularSetIsRejected) {
  auto s = entry(Family::SymReal, 3);
  ImmersionPair pair = default_pair(s);
  EXPECT_THROW(potential_line_integral(pair, diag_point({-1, -1, 1}), s.algebra.unit()), PathError);
}

TEST(Potential, SpecErrors) {
  auto s = entry(Family::SymReal, 3);
  EXPECT_THROW(PotentialSpec({}), SpecError);
  EXPECT_THROW(PotentialSpec({{s, PotentialKind::ComplexLog, 1.0}}), SpecError);
  EXPECT_THROW(PotentialSpec({{s, PotentialKind::TruncLog, 1.0}}), SpecError);
  EXPECT_THROW(PotentialSpec({{s, PotentialKind::RealLog, Complex(1, 1)}}), SpecError);
  EXPECT_THROW(PotentialSpec({{s, PotentialKind::RealLog, 0.0}}), SpecError);
  EXPECT_THROW(PotentialSpec({{entry(Family::TruncPoly, 3), PotentialKind::RealLog, 1.0}}), SpecError);
  EXPECT_THROW(PotentialSpec::canonical(s)(diag_point({1, 0, 3})), DomainError);
}

TEST(Residuals, ParallelCubicHoldsOnCatalogPairs) {
  Rng rng(36);
  for (const auto& e : geometry_entries()) {
    ImmersionPair pair = default_pair(e);
    for (int i = 0; i < 5; ++i) {
      Vector x = near_unit(pair.algebra(), rng);
      EXPECT_LT(parallel_cubic_residual(pair, x), 1e-7) << e.name;
    }
  }
}

TEST(Residuals, HypersphereOnlyForCanonicalForm) {
  Rng rng(37);
  for (const auto& e : geometry_entries()) {
    if (!is_semisimple(e.algebra)) continue;
    ImmersionPair pair = default_pair(e);
    Vector x = near_unit(pair.algebra(), rng);
    EXPECT_LT(hypersphere_residual(pair, x), 1e-8) << e.name;
  }
  ImmersionPair mixed = mixed_weights_pair();
  Vector x = near_unit(mixed.algebra(), rng);
  EXPECT_GT(hypersphere_residual(mixed, x), 1e-3);
  EXPECT_LT(parallel_cubic_residual(mixed, x), 1e-7);
}

TEST(Residuals, QuadricDetectsDegreeTwo) {
  Rng rng(38);
  auto q = make_algebra(FamilyTag::quadratic_real(jordan::testing::qf_form()));
  ImmersionPair qp = default_pair(q);
  EXPECT_LT(quadric_residual(qp, near_unit(q.algebra, rng)), 1e-9);
  auto s = entry(Family::SymReal, 3);
  ImmersionPair sp = default_pair(s);
  EXPECT_GT(quadric_residual(sp, near_unit(s.algebra, rng)), 1e-3);
}

TEST(Residuals, CentralElementOfCanonicalPair) {
  auto s = entry(Family::SymReal, 3);
  Vector z = central_element_from_pair(default_pair(s));
  EXPECT_LT((z + 6.0 * s.algebra.unit()).norm(), 1e-10);
}

TEST(Residuals, PerturbedAlgebraFailsJordanIdentity) {
  auto s = entry(Family::SymReal, 3);
  Rng rng(7);
  Matrix c = s.algebra.structure_matrix();
  Matrix noise = 0.05 * Matrix(rng.normal_vector(c.size()).reshaped(c.rows(), c.cols()));
  // keep the product commutative and the unit exact
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) noise.col(a + 6 * b) = noise.col(b + 6 * a) = 0.5 * (noise.col(a + 6 * b) + noise.col(b + 6 * a));
  Algebra perturbed(c + noise, std::nullopt, "perturbed");
  EXPECT_GT(check_jordan_identity(perturbed).max_residual, 1e-3);
}

TEST(Logderivative, IdentitiesHold) {
  Rng rng(39);
  for (const auto& e : geometry_entries()) {
    ImmersionPair pair = default_pair(e);
    Vector x = near_unit(pair.algebra(), rng);
    auto report = logderivative_identities(pair, x);
    EXPECT_LT(report.max_abs, 1e-6) << e.name;
  }
  // at e: D_u log det P = 2 t(u)
  auto r = entry(Family::RealLine);
  Vector x(1);
  x << 2.0;
  EXPECT_NEAR(-ZetaFrame(default_pair(r), x).p().inverse()(0, 0), -0.25, 1e-15);
}

TEST(Reconstruction, RecoversCatalogAlgebrasAtUnit) {
  for (const auto& e : {entry(Family::SymReal, 3), entry(Family::ComplexField),
                        make_algebra(FamilyTag::quadratic_real(jordan::testing::qf_form())),
                        catalog_direct_sum({entry(Family::RealLine), entry(Family::RealLine), entry(Family::RealLine)})}) {
    PotentialSpec phi = e.omega.blocks.size() == 1
                            ? PotentialSpec::canonical(e)
                            : PotentialSpec({{entry(Family::RealLine), PotentialKind::RealLog, 1.0},
                                             {entry(Family::RealLine), PotentialKind::RealLog, 1.0},
                                             {entry(Family::RealLine), PotentialKind::RealLog, 1.0}});
    auto rec = algebra_from_potential(sampler_from(phi), e.algebra.unit());
    const Matrix& expected = e.algebra.structure_matrix();
    EXPECT_LT((rec.algebra.structure_matrix() - expected).cwiseAbs().maxCoeff(), 1e-5 * expected.cwiseAbs().maxCoeff())
        << e.name;
    EXPECT_LT(rec.unit_defect, 1e-5) << e.name;
    EXPECT_NEAR(rec.homogeneity, phi.homogeneity(), 1e-9) << e.name;
  }
}

TEST(Reconstruction, AwayFromUnitGivesIsotope) {
  auto s = entry(Family::SymReal, 3);
  Vector p = diag_point({1, 2, 3});
  auto rec = algebra_from_potential(sampler_from(PotentialSpec::canonical(s)), p);
  EXPECT_LT(rec.unit_defect, 1e-5);
  EXPECT_LT(check_jordan_identity(rec.algebra, 50).max_residual, 1e-5);
}

TEST(Reconstruction, RejectsNonHomogeneousInput) {
  PotentialSampler bad{[](const Vector& x) { return x.squaredNorm(); }, {}};
  EXPECT_THROW(algebra_from_potential(bad, Vector::Ones(2)), InputError);
}

TEST(Pullback, TensorsVanishOnPosition) {
  Rng rng(40);
  auto s = entry(Family::SymReal, 3);
  auto phi = PotentialSpec::canonical(s);
  auto sampler = sampler_from(phi);
  Vector x = near_unit(s.algebra, rng, 0.2);
  auto t = pullback_tensors(sampler, x);
  EXPECT_LT(t.metric_on_position, 1e-5);
  EXPECT_LT(t.cubic_on_position, 1e-4);
  EXPECT_LT(t.nabla_on_position, 1e-3);
  // canonical potential: hypersphere and parallel cubic form
  EXPECT_LT(t.tchebycheff.cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_LT(t.nabla_cubic.max_abs(), 1e-3);
}

TEST(Pullback, GradientIdentitiesOfHomogeneousPotential) {
  // F_a x^a = 1 and F_ab x^b = -F_a for F = phi / nu
  Rng rng(41);
  auto s = entry(Family::HermComplex, 3);
  auto phi = PotentialSpec::canonical(s);
  Vector x = near_unit(s.algebra, rng, 0.2);
  fd::Field f = [&](const Vector& y) { return phi(y) / phi.homogeneity(); };
  Vector g = fd::gradient(f, x);
  Matrix h = fd::hessian(f, x);
  EXPECT_NEAR(g.dot(x), 1.0, 1e-6);
  EXPECT_LT((h * x + g).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_NEAR(x.dot(h * x), -1.0, 1e-5);
}

TEST(Graph, SeriesTerminatesAndHessianIsGamma) {
  auto [nil, gamma] = trunc_poly_nil_ideal(4);
  GraphPotential f(nil, gamma, GraphKind::JordanSeries);
  EXPECT_EQ(f(Vector::Zero(3)), 0.0);
  Vector x(3);
  x << 0.3, -0.2, 0.5;
  EXPECT_EQ(f.eval(x).last_term, 4);
  for (GraphKind kind : {GraphKind::Cubic, GraphKind::AssociativeSeries, GraphKind::JordanSeries}) {
    GraphPotential g(nil, gamma, kind);
    Matrix h = fd::hessian([&](const Vector& y) { return g(y); }, Vector::Zero(3), reconstruction_steps());
    EXPECT_LT((h - gamma.matrix()).cwiseAbs().maxCoeff(), 1e-8) << graph_kind_name(kind);
  }
}

TEST(Graph, JordanSeriesHasParallelCubicForm) {
  Rng rng(42);
  auto [nil, gamma] = trunc_poly_nil_ideal(5);
  Matrix basis = Matrix::Identity(4, 4) + 0.3 * Matrix(rng.normal_vector(16).reshaped(4, 4));
  auto [j, form] = change_basis(nil, gamma, basis);
  GraphPotential f(j, form, GraphKind::JordanSeries);
  for (int i = 0; i < 5; ++i) {
    Vector x = 0.5 * rng.normal_vector(4);
    EXPECT_LT(graph_parallel_residual([&](const Vector& y) { return f(y); }, x), 1e-4);
  }
}

TEST(Graph, CubicPotentialHasConstantHessianDeterminant) {
  auto [nil, gamma] = trunc_poly_nil_ideal(5);
  GraphPotential f(nil, gamma, GraphKind::Cubic);
  const double d0 = gamma.matrix().determinant();
  Rng rng(43);
  for (int i = 0; i < 5; ++i) {
    Vector x = rng.normal_vector(4);
    Matrix h = fd::hessian([&](const Vector& y) { return f(y); }, x, reconstruction_steps());
    EXPECT_NEAR(h.determinant(), d0, 1e-6);
  }
}

TEST(Graph, Preconditions) {
  auto s = entry(Family::SymReal, 3);
  EXPECT_THROW(GraphPotential(s.algebra, s.default_gamma, GraphKind::Cubic), PreconditionError);
  auto [nil, gamma] = trunc_poly_nil_ideal(4);
  EXPECT_THROW(GraphPotential(nil, TraceForm(Matrix::Identity(3, 3)), GraphKind::Cubic), PreconditionError);
}
