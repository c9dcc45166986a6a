#include <gtest/gtest.h>

#include <map>

#include "test_support.hpp"

using namespace jordan;
using jordan::testing::diag_point;
using jordan::testing::entry;
using jordan::testing::near_unit;

namespace {

// Expansion along the first row: pf(A) = sum_j (-1)^{j+1} a_{0j} pf(A without rows/cols 0, j).
double pfaffian_by_expansion(const Matrix& a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 1.0;
  double total = 0;
  for (Eigen::Index j = 1; j < n; ++j) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 1; k < n; ++k)
      if (k != j) keep.push_back(k);
    Matrix minor(n - 2, n - 2);
    for (std::size_t r = 0; r < keep.size(); ++r)
      for (std::size_t c = 0; c < keep.size(); ++c) minor(r, c) = a(keep[r], keep[c]);
    total += ((j % 2) ? 1.0 : -1.0) * a(0, j) * pfaffian_by_expansion(minor);
  }
  return total;
}

Matrix random_skew(Rng& rng, int n) {
  Matrix m = rng.normal_vector(n * n).reshaped(n, n);
  return m - m.transpose();
}

}  // namespace

TEST(Pfaffian, Examples) {
  Matrix j(2, 2);
  j << 0, 1, -1, 0;
  EXPECT_DOUBLE_EQ(pfaffian<double>(j), 1.0);

  Matrix blocks = Matrix::Zero(6, 6);
  const double a[3] = {2.0, -3.0, 0.5};
  for (int k = 0; k < 3; ++k) {
    blocks(2 * k, 2 * k + 1) = a[k];
    blocks(2 * k + 1, 2 * k) = -a[k];
  }
  EXPECT_NEAR(pfaffian<double>(blocks), -3.0, 1e-14);
  EXPECT_THROW(pfaffian<double>(Matrix::Zero(3, 3)), UsageError);
  EXPECT_THROW(pfaffian<double>(Matrix::Identity(4, 4)), UsageError);
}

TEST(Pfaffian, MatchesCofactorExpansion) {
  Rng rng(20);
  for (int n : {4, 6, 8}) {
    for (int i = 0; i < 10; ++i) {
      Matrix s = random_skew(rng, n);
      double expected = pfaffian_by_expansion(s);
      EXPECT_NEAR(pfaffian<double>(s), expected, 1e-10 * (1 + std::abs(expected)));
      EXPECT_NEAR(expected * expected, s.determinant(), 1e-9 * (1 + std::abs(s.determinant())));
    }
  }
}

TEST(Pfaffian, ComplexEntries) {
  Rng rng(21);
  Matrix re = random_skew(rng, 6), im = random_skew(rng, 6);
  CMatrix s = re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
  Complex pf = pfaffian<Complex>(s);
  EXPECT_LT(std::abs(pf * pf - s.determinant()), 1e-9 * (1 + std::abs(s.determinant())));
}

TEST(Octonions, NormIsMultiplicative) {
  Rng rng(22);
  for (const HypercomplexTable* table : {&cayley_octonion_table(), &split_octonion_table()}) {
    for (int i = 0; i < 100; ++i) {
      std::array<double, 8> a{}, b{};
      for (int k = 0; k < 8; ++k) a[k] = rng.normal(), b[k] = rng.normal();
      Octonion<double> x(table, a), y(table, b);
      double lhs = (x * y).norm(), rhs = x.norm() * y.norm();
      EXPECT_NEAR(lhs, rhs, 1e-12 * (1 + std::abs(rhs))) << table->name;
    }
  }
}

TEST(Octonions, AlternativeButNotAssociative) {
  Rng rng(23);
  const auto* t = &cayley_octonion_table();
  std::array<double, 8> a{}, b{}, c{};
  for (int k = 0; k < 8; ++k) a[k] = rng.normal(), b[k] = rng.normal(), c[k] = rng.normal();
  Octonion<double> x(t, a), y(t, b), z(t, c);
  auto diff = [](const Octonion<double>& p, const Octonion<double>& q) {
    double s = 0;
    for (int k = 0; k < 8; ++k) s += std::abs(p[k] - q[k]);
    return s;
  };
  EXPECT_LT(diff((x * x) * y, x * (x * y)), 1e-12);
  EXPECT_GT(diff((x * y) * z, x * (y * z)), 1e-3);
}

TEST(Octonions, SplitTableHasSignatureFourFour) {
  const auto& t = split_octonion_table();
  int positive = 0;
  for (int i = 0; i < 8; ++i) positive += t.norm_sign[i] > 0;
  EXPECT_EQ(positive, 4);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(cayley_octonion_table().norm_sign[i], 1);
}

TEST(Catalog, TableHasSeventeenRows) {
  EXPECT_EQ(catalog_table().size(), 17u);
  EXPECT_EQ(table_families_smallest().size(), 17u);
}

TEST(Catalog, DimensionsFollowTheTable) {
  const std::map<std::string, int> expected = {
      {"ComplexField", 2},           {"QuadraticFactorComplex", 6}, {"SymComplex", 12},
      {"FullComplex", 18},           {"SkewSplitQuatComplex", 30},  {"SplitOctHerm3Complex", 54},
      {"RealLine", 1},               {"QuadraticFactorReal", 3},    {"FullReal", 9},
      {"FullQuat", 16},              {"SymReal", 6},                {"HermComplex", 9},
      {"HermQuat", 15},              {"SkewSplitQuatReal", 15},     {"SkewHermQuat", 10},
      {"OctHerm3", 27},              {"SplitOctHerm3Real", 27}};
  for (const auto& tag : table_families_smallest()) {
    auto e = make_algebra(tag);
    EXPECT_EQ(e.algebra.dim(), expected.at(family_name(tag.family))) << e.name;
  }
  EXPECT_EQ(entry(Family::SymReal, 4).algebra.dim(), 10);
  EXPECT_EQ(entry(Family::FullQuat, 3).algebra.dim(), 36);
}

TEST(Catalog, ParameterRangeIsEnforced) {
  EXPECT_THROW(entry(Family::SymReal, 2), UsageError);
  EXPECT_THROW(entry(Family::FullQuat, 1), UsageError);
  EXPECT_THROW(entry(Family::TruncPoly, 1), UsageError);
}

TEST(Catalog, ComplexFieldOperator) {
  auto c = entry(Family::ComplexField);
  Vector x(2);
  x << 0.7, -1.3;
  Matrix l(2, 2);
  l << 0.7, 1.3, -1.3, 0.7;
  EXPECT_LT((l_operator(c.algebra, x) - l).norm(), 1e-15);
}

TEST(Catalog, JordanIdentityOnLargerParameters) {
  for (const auto& tag : {FamilyTag::make(Family::SymReal, 4), FamilyTag::make(Family::HermQuat, 3),
                          FamilyTag::make(Family::SkewSplitQuatReal, 4), FamilyTag::make(Family::FullComplex, 3)}) {
    auto e = make_algebra(tag);
    EXPECT_LT(check_jordan_identity(e.algebra, 50).max_residual, 1e-9) << e.name;
  }
}

TEST(ClosedForms, DetPExamples) {
  auto s = entry(Family::SymReal, 3);
  Vector x = diag_point({1, 2, 3});
  EXPECT_NEAR(closed_form_detP_real(s.omega, x), 1296.0, 1e-9);
  EXPECT_NEAR(log_det(p_operator(s.algebra, x)).value(), 1296.0, 1e-8);

  auto q = make_algebra(FamilyTag::quadratic_real(jordan::testing::qf_form()));
  Vector y(3);
  y << 2, 0, 1;
  EXPECT_NEAR(closed_form_detP_real(q.omega, y), 27.0, 1e-12);
  EXPECT_NEAR(log_det(p_operator(q.algebra, y)).value(), 27.0, 1e-10);

  for (const auto& tag : table_families_smallest()) {
    auto e = make_algebra(tag);
    EXPECT_NEAR(closed_form_detP_real(e.omega, e.algebra.unit()), 1.0, 1e-10) << e.name;
  }
}

TEST(ClosedForms, OmegaExamples) {
  auto s = entry(Family::SymReal, 3);
  EXPECT_NEAR(omega(s.omega, diag_point({1, 2, 3})), 36.0, 1e-12);
  auto q = make_algebra(FamilyTag::quadratic_real(jordan::testing::qf_form()));
  Vector y(3);
  y << 2, 0, 1;
  EXPECT_NEAR(omega(q.omega, y), std::pow(3.0, 1.5), 1e-12);
  for (const auto& tag : table_families_smallest()) {
    auto e = make_algebra(tag);
    EXPECT_NEAR(omega(e.omega, e.algebra.unit()), 1.0, 1e-10) << e.name;
  }
}

TEST(ClosedForms, DetPAgreesOnRandomPoints) {
  Rng rng(24);
  for (const auto& tag : table_families_smallest()) {
    auto e = make_algebra(tag);
    const double tol = e.algebra.dim() >= 27 ? 1e-5 : 1e-7;
    for (int i = 0; i < 10; ++i) {
      Vector x = e.algebra.unit() + 0.5 * rng.normal_vector(e.algebra.dim());
      double numeric = log_det(p_operator(e.algebra, x)).value();
      double closed = closed_form_detP_real(e.omega, x);
      EXPECT_LT(std::abs(numeric - closed), tol * std::abs(closed)) << e.name;
    }
  }
}

TEST(ClosedForms, OmegaLaws) {
  Rng rng(25);
  for (const auto& tag : table_families_smallest()) {
    auto e = make_algebra(tag);
    const int n = e.algebra.dim();
    const bool complex = is_complex_family(tag.family);
    for (int i = 0; i < 5; ++i) {
      Vector x = e.algebra.unit() + 0.4 * rng.normal_vector(n);
      double w = omega(e.omega, x);
      for (double lambda : {0.5, 3.0})
        EXPECT_NEAR(omega(e.omega, lambda * x) / (std::pow(lambda, n) * w), 1.0, 1e-10) << e.name;
      double detp = std::abs(log_det(p_operator(e.algebra, x)).value());
      // on realified algebras omega = |det P^C| and det P = |det P^C|^2
      if (complex) EXPECT_NEAR(w, std::abs(closed_form_detP(e.omega, x)), 1e-9 * w) << e.name;
      EXPECT_NEAR(w * w / detp, 1.0, n >= 27 ? 1e-5 : 1e-7) << e.name;
    }
  }
}

TEST(ClosedForms, TwistedIsotopes) {
  for (const auto& tag : {FamilyTag::twisted(Family::SymReal, 3, {1, 1, -1}),
                          FamilyTag::twisted(Family::HermComplex, 3, {1, -1, 1}),
                          FamilyTag::twisted(Family::OctHerm3, 3, {1, 1, -1})}) {
    auto e = make_algebra(tag);
    EXPECT_LT(check_jordan_identity(e.algebra, 50).max_residual, 1e-9) << e.name;
    Rng rng(26);
    for (int i = 0; i < 5; ++i) {
      Vector x = e.algebra.unit() + 0.3 * rng.normal_vector(e.algebra.dim());
      double numeric = log_det(p_operator(e.algebra, x)).value();
      double closed = closed_form_detP_real(e.omega, x);
      EXPECT_LT(std::abs(numeric - closed), 1e-6 * std::abs(closed)) << e.name;
    }
  }
}

TEST(ClosedForms, DirectSumMultipliesOmega) {
  auto r = entry(Family::RealLine);
  auto s = entry(Family::SymReal, 3);
  auto sum = catalog_direct_sum({r, s});
  Vector x(7);
  x << 2.0, diag_point({1, 2, 3});
  EXPECT_NEAR(omega(sum.omega, x), 2.0 * 36.0, 1e-10);
  EXPECT_NEAR(sum.default_gamma(sum.algebra.unit(), sum.algebra.unit()), -1.0, 1e-14);
}

TEST(ClosedForms, UnitComponent) {
  auto s = entry(Family::SymReal, 3);
  EXPECT_TRUE(in_unit_component(s.omega, diag_point({1, 2, 3})));
  EXPECT_FALSE(in_unit_component(s.omega, diag_point({1, -2, 3})));
  auto r3 = catalog_direct_sum({entry(Family::RealLine), entry(Family::RealLine), entry(Family::RealLine)});
  EXPECT_FALSE(in_unit_component(r3.omega, Vector(Vector::Constant(3, -1.0))));
}

TEST(TruncPoly, Structure) {
  auto [j, gamma] = trunc_poly_algebra(3);
  Vector t = Vector::Unit(3, 1), t2 = Vector::Unit(3, 2);
  EXPECT_LT((mul(j, t, t) - t2).norm(), 1e-15);
  EXPECT_LT(mul(j, t2, t).norm(), 1e-15);
  EXPECT_NEAR(gamma(j.unit(), j.unit()), -1.0, 1e-15);
  EXPECT_LT(associativity_defect(j, gamma), 1e-15);
  EXPECT_TRUE(is_nondegenerate(gamma));
}

TEST(TruncPoly, LogAtOne) {
  Vector e = Vector::Unit(4, 0);
  EXPECT_DOUBLE_EQ(trunc_poly_log_at_one(e), 0.0);
  Vector p(2);
  p << 2, 3;  // log 2 + 3/2
  EXPECT_NEAR(trunc_poly_log_at_one(p), std::log(2.0) + 1.5, 1e-15);
  EXPECT_THROW(trunc_poly_log_at_one(Vector(Vector::Unit(3, 1))), NotInvertibleError);
}

TEST(TruncPoly, LogGradientIsZeta) {
  // D_u (log p)(1) = (u * p^{-1})(1)
  auto [j, gamma] = trunc_poly_algebra(5);
  Rng rng(27);
  for (int i = 0; i < 10; ++i) {
    Vector p = rng.normal_vector(5);
    p(0) = 1.0 + std::abs(p(0));
    Vector pinv = inverse(j, p);
    fd::Field f = [](const Vector& y) { return trunc_poly_log_at_one(y); };
    Vector grad = fd::gradient(f, p);
    for (int a = 0; a < 5; ++a) {
      double expected = mul(j, Vector(Vector::Unit(5, a)), pinv).sum();
      EXPECT_NEAR(grad(a), expected, 1e-6 * (1 + std::abs(expected)));
    }
  }
}

TEST(TruncPoly, NilIdealHasVanishingTraceForm) {
  for (int n = 2; n <= 6; ++n) {
    auto [nil, gamma] = trunc_poly_nil_ideal(n);
    EXPECT_LT(g_matrix(nil).cwiseAbs().maxCoeff(), 1e-12) << n;
    EXPECT_TRUE(is_nondegenerate(gamma));
    EXPECT_LT(associativity_defect(nil, gamma), 1e-15);
  }
}
