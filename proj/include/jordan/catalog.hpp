#ifndef JORDAN_CATALOG_HPP
#define JORDAN_CATALOG_HPP

#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <array>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jordan/algebra.hpp"
#include "jordan/octonion.hpp"
#include "jordan/pfaffian.hpp"

namespace jordan {

enum class Family {
  RealLine,
  ComplexField,
  QuadraticFactorReal,
  QuadraticFactorComplex,
  SymReal,
  SymComplex,
  FullReal,
  FullComplex,
  HermComplex,
  FullQuat,
  HermQuat,
  SkewSplitQuatReal,
  SkewSplitQuatComplex,
  SkewHermQuat,
  OctHerm3,
  SplitOctHerm3Real,
  SplitOctHerm3Complex,
  TruncPoly,
  Custom,
};

inline const std::vector<std::pair<Family, std::string>>& family_names() {
  static const std::vector<std::pair<Family, std::string>> names = {
      {Family::RealLine, "RealLine"},
      {Family::ComplexField, "ComplexField"},
      {Family::QuadraticFactorReal, "QuadraticFactorReal"},
      {Family::QuadraticFactorComplex, "QuadraticFactorComplex"},
      {Family::SymReal, "SymReal"},
      {Family::SymComplex, "SymComplex"},
      {Family::FullReal, "FullReal"},
      {Family::FullComplex, "FullComplex"},
      {Family::HermComplex, "HermComplex"},
      {Family::FullQuat, "FullQuat"},
      {Family::HermQuat, "HermQuat"},
      {Family::SkewSplitQuatReal, "SkewSplitQuatReal"},
      {Family::SkewSplitQuatComplex, "SkewSplitQuatComplex"},
      {Family::SkewHermQuat, "SkewHermQuat"},
      {Family::OctHerm3, "OctHerm3"},
      {Family::SplitOctHerm3Real, "SplitOctHerm3Real"},
      {Family::SplitOctHerm3Complex, "SplitOctHerm3Complex"},
      {Family::TruncPoly, "TruncPoly"},
      {Family::Custom, "Custom"},
  };
  return names;
}

inline std::string family_name(Family f) {
  for (const auto& [k, v] : family_names())
    if (k == f) return v;
  return "Custom";
}

inline std::optional<Family> family_from_name(const std::string& name) {
  for (const auto& [k, v] : family_names())
    if (v == name) return k;
  return std::nullopt;
}

// Realified complex families.
inline bool is_complex_family(Family f) {
  switch (f) {
    case Family::ComplexField:
    case Family::QuadraticFactorComplex:
    case Family::SymComplex:
    case Family::FullComplex:
    case Family::SkewSplitQuatComplex:
    case Family::SplitOctHerm3Complex:
      return true;
    default:
      return false;
  }
}

// Families that accept a diagonal signature twist.
inline bool is_twistable_family(Family f) {
  return f == Family::SymReal || f == Family::HermComplex || f == Family::HermQuat ||
         f == Family::OctHerm3;
}

struct FamilyTag {
  Family family = Family::Custom;
  int m = 0;              // matrix size, vector-space size, or truncation degree
  std::vector<int> twist;  // diagonal signature of a twisted isotope, empty if untwisted
  Matrix q;                // form of QuadraticFactorReal

  static FamilyTag make(Family f, int m = 0) {
    FamilyTag t;
    t.family = f;
    t.m = m;
    return t;
  }
  static FamilyTag quadratic_real(const Matrix& q) {
    FamilyTag t;
    t.family = Family::QuadraticFactorReal;
    t.m = static_cast<int>(q.rows());
    t.q = q;
    return t;
  }
  static FamilyTag twisted(Family base, int m, std::vector<int> signature) {
    FamilyTag t;
    t.family = base;
    t.m = m;
    t.twist = std::move(signature);
    return t;
  }

  bool is_twisted() const {
    return std::any_of(twist.begin(), twist.end(), [](int s) { return s < 0; });
  }
  std::string name() const {
    std::string s = family_name(family);
    if (m > 0 && family != Family::RealLine && family != Family::ComplexField &&
        family != Family::OctHerm3 && family != Family::SplitOctHerm3Real &&
        family != Family::SplitOctHerm3Complex)
      s += "(" + std::to_string(m) + ")";
    if (is_twisted()) {
      s += "[";
      for (int v : twist) s += v > 0 ? '+' : '-';
      s += "]";
    }
    return s;
  }
};

// One block of a closed-form omega description: on the block coordinates,
// the native determinant of P is det_factor * base^det_exponent (complex for
// realified families) and omega = |base|^omega_exponent.
struct OmegaBlock {
  FamilyTag tag;
  int offset = 0;
  int dim = 0;
  bool complex = false;
  int det_exponent = 0;
  double omega_exponent = 0;
  Complex det_factor = 1.0;
  int base_degree = 0;
  std::string base_name;
  Vector unit;
  std::function<Complex(const Vector&)> base;
  std::function<bool(const Vector&)> in_component;
};

struct OmegaSpec {
  std::vector<OmegaBlock> blocks;

  int dim() const {
    int n = 0;
    for (const auto& b : blocks) n = std::max(n, b.offset + b.dim);
    return n;
  }
  Vector unit() const {
    Vector e = Vector::Zero(dim());
    for (const auto& b : blocks) e.segment(b.offset, b.dim) = b.unit;
    return e;
  }
};

inline Complex block_base(const OmegaBlock& b, const Vector& x) {
  return b.base(x.segment(b.offset, b.dim));
}

// Native determinant of P_x: det P^C on realified blocks, det P on real ones.
inline Complex closed_form_detP(const OmegaSpec& spec, const Vector& x) {
  require_dim(x, spec.dim(), "closed_form_detP");
  Complex d = 1.0;
  for (const auto& b : spec.blocks) d *= b.det_factor * std::pow(block_base(b, x), b.det_exponent);
  return d;
}

// Determinant of the real operator P_x (|det P^C|^2 on realified blocks).
inline double closed_form_detP_real(const OmegaSpec& spec, const Vector& x) {
  require_dim(x, spec.dim(), "closed_form_detP_real");
  double d = 1.0;
  for (const auto& b : spec.blocks) {
    Complex v = b.det_factor * std::pow(block_base(b, x), b.det_exponent);
    d *= b.complex ? std::norm(v) : v.real();
  }
  return d;
}

inline double log_omega(const OmegaSpec& spec, const Vector& x) {
  require_dim(x, spec.dim(), "omega");
  double s = 0;
  for (const auto& b : spec.blocks) s += b.omega_exponent * std::log(std::abs(block_base(b, x)));
  return s;
}

inline double omega(const OmegaSpec& spec, const Vector& x) { return std::exp(log_omega(spec, x)); }

inline bool in_unit_component(const OmegaSpec& spec, const Vector& x) {
  require_dim(x, spec.dim(), "in_unit_component");
  for (const auto& b : spec.blocks)
    if (!b.in_component(x.segment(b.offset, b.dim))) return false;
  return true;
}

struct CatalogEntry {
  std::string name;
  FamilyTag tag;
  Algebra algebra;
  Matrix g;                // canonical form t(x*y)
  OmegaSpec omega;
  TraceForm default_gamma;  // normalized so that gamma(e,e) = -1
};

namespace detail {

inline int signature_positive(const Eigen::VectorXd& eig, double tol) {
  return static_cast<int>((eig.array() > tol).count());
}

// Real roots in [0, 1] of t -> f(e + t (x - e)), a polynomial of the given
// degree. Used as a conservative component test: a straight segment from e
// that never crosses the zero set stays in e's component.
inline bool segment_avoids_zero(const std::function<double(const Vector&)>& f, const Vector& e,
                                const Vector& x, int degree) {
  const int d = std::max(degree, 1);
  Eigen::VectorXd nodes(d + 1), values(d + 1);
  for (int i = 0; i <= d; ++i) {
    nodes(i) = 0.5 - 0.5 * std::cos(M_PI * (2.0 * i + 1) / (2.0 * (d + 1)));
    values(i) = f(e + nodes(i) * (x - e));
  }
  Matrix vander(d + 1, d + 1);
  for (int i = 0; i <= d; ++i)
    for (int k = 0; k <= d; ++k) vander(i, k) = std::pow(nodes(i), k);
  Eigen::VectorXd coeffs = vander.fullPivLu().solve(values);
  double scale = coeffs.cwiseAbs().maxCoeff();
  if (scale == 0) return false;
  int top = d;
  while (top > 0 && std::abs(coeffs(top)) <= 1e-13 * scale) --top;
  double fe = f(e), fx = f(x);
  if (fe == 0 || fx == 0 || (fe > 0) != (fx > 0)) return false;
  if (top == 0) return true;
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
  solver.compute(Eigen::VectorXd(coeffs.head(top + 1)));
  for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
    Complex r = solver.roots()(i);
    if (std::abs(r.imag()) <= 1e-6 * (1 + std::abs(r)) && r.real() >= -1e-9 && r.real() <= 1 + 1e-9)
      return false;
  }
  return true;
}

// Matrix models: a real-linear basis of complex matrices and a product on them.
struct MatrixModel {
  std::vector<CMatrix> basis;
  std::vector<std::string> labels;
  std::function<CMatrix(const CMatrix&, const CMatrix&)> product;
  Matrix stacked;
  Eigen::ColPivHouseholderQR<Matrix> qr;

  void finalize() {
    const Eigen::Index rows = basis.front().size();
    stacked.resize(2 * rows, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) stacked.col(static_cast<Eigen::Index>(k)) = flatten(basis[k]);
    qr.compute(stacked);
  }
  Vector flatten(const CMatrix& a) const {
    Vector v(2 * a.size());
    Eigen::Index i = 0;
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      for (Eigen::Index r = 0; r < a.rows(); ++r) {
        v(i) = a(r, c).real();
        v(a.size() + i) = a(r, c).imag();
        ++i;
      }
    return v;
  }
  int dim() const { return static_cast<int>(basis.size()); }

  template <class Scalar>
  CMatrix embed(const VectorT<Scalar>& x) const {
    CMatrix a = CMatrix::Zero(basis.front().rows(), basis.front().cols());
    for (int k = 0; k < dim(); ++k) a += Complex(x(k)) * basis[static_cast<std::size_t>(k)];
    return a;
  }
  Vector coords(const CMatrix& a) const {
    Vector f = flatten(a);
    Vector x = qr.solve(f);
    double defect = (stacked * x - f).norm();
    if (defect > 1e-10 * std::max(1.0, f.norm()))
      throw InconsistencyError("matrix is not in the span of the family basis");
    return x;
  }

  Algebra build(const CMatrix& identity, const std::string& family) const {
    const int n = dim();
    Matrix c(n, static_cast<Eigen::Index>(n) * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        c.col(a + static_cast<Eigen::Index>(n) * b) =
            coords(product(basis[static_cast<std::size_t>(a)], basis[static_cast<std::size_t>(b)]));
    return Algebra(std::move(c), coords(identity), family, labels);
  }
};

inline CMatrix unit_matrix(int rows, int r, int c, Complex v = 1.0) {
  CMatrix a = CMatrix::Zero(rows, rows);
  a(r, c) = v;
  return a;
}

// Complex 2m x 2m image of an m x m quaternion matrix with the single entry
// coeff * unit at (r, c); unit 0..3 means 1, i, j, k.
inline CMatrix quaternion_entry(int m, int r, int c, int unit, double coeff = 1.0) {
  CMatrix s = CMatrix::Zero(2 * m, 2 * m);
  Complex z = 0, w = 0;
  const Complex i(0, 1);
  switch (unit) {
    case 0: z = coeff; break;
    case 1: z = coeff * i; break;
    case 2: w = coeff; break;
    default: w = coeff * i; break;
  }
  s(r, c) += z;
  s(r, m + c) += w;
  s(m + r, c) += -std::conj(w);
  s(m + r, m + c) += std::conj(z);
  return s;
}

inline const char* quaternion_unit_name(int u) {
  static const char* names[] = {"1", "i", "j", "k"};
  return names[u];
}

inline std::string pos(int r, int c) { return std::to_string(r + 1) + std::to_string(c + 1); }

inline CMatrix jordan_product(const CMatrix& a, const CMatrix& b) { return (a * b + b * a) / 2.0; }

inline std::shared_ptr<MatrixModel> sym_model(int m, bool hermitian) {
  auto mm = std::make_shared<MatrixModel>();
  for (int i = 0; i < m; ++i) {
    mm->basis.push_back(unit_matrix(m, i, i));
    mm->labels.push_back("E" + pos(i, i));
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      mm->basis.push_back(unit_matrix(m, i, j) + unit_matrix(m, j, i));
      mm->labels.push_back("E" + pos(i, j) + "+E" + pos(j, i));
    }
  if (hermitian) {
    const Complex im(0, 1);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        mm->basis.push_back(im * (unit_matrix(m, i, j) - unit_matrix(m, j, i)));
        mm->labels.push_back("i(E" + pos(i, j) + "-E" + pos(j, i) + ")");
      }
  }
  mm->product = jordan_product;
  mm->finalize();
  return mm;
}

inline std::shared_ptr<MatrixModel> full_model(int m) {
  auto mm = std::make_shared<MatrixModel>();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      mm->basis.push_back(unit_matrix(m, i, j));
      mm->labels.push_back("E" + pos(i, j));
    }
  mm->product = jordan_product;
  mm->finalize();
  return mm;
}

inline std::shared_ptr<MatrixModel> full_quat_model(int m) {
  auto mm = std::make_shared<MatrixModel>();
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c)
      for (int u = 0; u < 4; ++u) {
        mm->basis.push_back(quaternion_entry(m, r, c, u));
        mm->labels.push_back(std::string(quaternion_unit_name(u)) + "@" + pos(r, c));
      }
  mm->product = jordan_product;
  mm->finalize();
  return mm;
}

inline std::shared_ptr<MatrixModel> herm_quat_model(int m) {
  auto mm = std::make_shared<MatrixModel>();
  for (int r = 0; r < m; ++r) {
    mm->basis.push_back(quaternion_entry(m, r, r, 0));
    mm->labels.push_back("1@" + pos(r, r));
  }
  for (int r = 0; r < m; ++r)
    for (int c = r + 1; c < m; ++c)
      for (int u = 0; u < 4; ++u) {
        double back = u == 0 ? 1.0 : -1.0;  // conjugate entry below the diagonal
        mm->basis.push_back(quaternion_entry(m, r, c, u) + quaternion_entry(m, c, r, u, back));
        mm->labels.push_back(std::string(quaternion_unit_name(u)) + "@" + pos(r, c) + "+conj");
      }
  mm->product = jordan_product;
  mm->finalize();
  return mm;
}

// Quaternionic skew-Hermitian matrices with S*T = (S L T + T L S)/2, where
// L is the image of the quaternion i times the identity.
inline std::shared_ptr<MatrixModel> skew_herm_quat_model(int m, CMatrix& lambda) {
  auto mm = std::make_shared<MatrixModel>();
  for (int r = 0; r < m; ++r)
    for (int u = 1; u < 4; ++u) {
      mm->basis.push_back(quaternion_entry(m, r, r, u));
      mm->labels.push_back(std::string(quaternion_unit_name(u)) + "@" + pos(r, r));
    }
  for (int r = 0; r < m; ++r)
    for (int c = r + 1; c < m; ++c)
      for (int u = 0; u < 4; ++u) {
        double back = u == 0 ? -1.0 : 1.0;  // entry below is -conj(entry above)
        mm->basis.push_back(quaternion_entry(m, r, c, u) + quaternion_entry(m, c, r, u, back));
        mm->labels.push_back(std::string(quaternion_unit_name(u)) + "@" + pos(r, c) + "-conj");
      }
  lambda = CMatrix::Zero(2 * m, 2 * m);
  for (int r = 0; r < m; ++r) lambda += quaternion_entry(m, r, r, 1);
  CMatrix l = lambda;
  mm->product = [l](const CMatrix& a, const CMatrix& b) { return CMatrix((a * l * b + b * l * a) / 2.0); };
  mm->finalize();
  return mm;
}

// Skew-symmetric 2m x 2m matrices with S*T = (S J T + T J S)/2.
inline std::shared_ptr<MatrixModel> skew_split_model(int m, CMatrix& j) {
  auto mm = std::make_shared<MatrixModel>();
  const int n = 2 * m;
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c) {
      mm->basis.push_back(unit_matrix(n, r, c) - unit_matrix(n, c, r));
      mm->labels.push_back("E" + pos(r, c) + "-E" + pos(c, r));
    }
  j = CMatrix::Zero(n, n);
  j.topRightCorner(m, m) = CMatrix::Identity(m, m);
  j.bottomLeftCorner(m, m) = -CMatrix::Identity(m, m);
  CMatrix jj = j;
  mm->product = [jj](const CMatrix& a, const CMatrix& b) { return CMatrix((a * jj * b + b * jj * a) / 2.0); };
  mm->finalize();
  return mm;
}

// Hermitian 3x3 matrices over an 8-dimensional hypercomplex algebra, with
// coordinates (d1, d2, d3, a12[8], a23[8], a31[8]).
template <class T>
struct OctMatrix3 {
  std::array<std::array<Octonion<T>, 3>, 3> a;

  OctMatrix3(const HypercomplexTable* table, const VectorT<T>& x)
      : a{{{Octonion<T>(table), Octonion<T>(table), Octonion<T>(table)},
           {Octonion<T>(table), Octonion<T>(table), Octonion<T>(table)},
           {Octonion<T>(table), Octonion<T>(table), Octonion<T>(table)}}} {
    for (int i = 0; i < 3; ++i) a[i][i][0] = x(i);
    for (int k = 0; k < 8; ++k) {
      a[0][1][k] = x(3 + k);
      a[1][2][k] = x(11 + k);
      a[2][0][k] = x(19 + k);
    }
    a[1][0] = a[0][1].conj();
    a[2][1] = a[1][2].conj();
    a[0][2] = a[2][0].conj();
  }

  // Jordan product (AB + BA)/2 returned in coordinates.
  VectorT<T> jordan(const OctMatrix3& o) const {
    VectorT<T> out(27);
    auto entry = [&](int r, int c) {
      Octonion<T> s(a[0][0].table());
      for (int k = 0; k < 3; ++k) s = s + a[r][k] * o.a[k][c] + o.a[r][k] * a[k][c];
      return s * T(0.5);
    };
    for (int i = 0; i < 3; ++i) out(i) = entry(i, i)[0];
    Octonion<T> p12 = entry(0, 1), p23 = entry(1, 2), p31 = entry(2, 0);
    for (int k = 0; k < 8; ++k) {
      out(3 + k) = p12[k];
      out(11 + k) = p23[k];
      out(19 + k) = p31[k];
    }
    return out;
  }

  // Generic norm a11 a22 a33 - a11 n(a23) - a22 n(a31) - a33 n(a12) + tr((a12 a23) a31).
  T det() const {
    const T d1 = a[0][0][0], d2 = a[1][1][0], d3 = a[2][2][0];
    return d1 * d2 * d3 - d1 * a[1][2].norm() - d2 * a[2][0].norm() - d3 * a[0][1].norm() +
           ((a[0][1] * a[1][2]) * a[2][0]).trace();
  }
};

inline Algebra octonion_herm3_algebra(const HypercomplexTable* table, const std::string& family) {
  const int n = 27;
  Matrix c(n, n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      OctMatrix3<double> ma(table, Vector(Vector::Unit(n, a)));
      OctMatrix3<double> mb(table, Vector(Vector::Unit(n, b)));
      c.col(a + n * b) = ma.jordan(mb);
    }
  Vector e = Vector::Zero(n);
  e.head(3).setOnes();
  std::vector<std::string> labels = {"d1", "d2", "d3"};
  for (const char* p : {"a12", "a23", "a31"})
    for (int k = 0; k < 8; ++k) labels.push_back(std::string(p) + "_" + std::to_string(k));
  return Algebra(std::move(c), e, family, labels);
}

inline Algebra quadratic_factor_algebra(const Matrix& q, const Vector& e, const std::string& family) {
  const int m = static_cast<int>(q.rows());
  Matrix c(m, m * m);
  Vector qe = q * e;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Vector x = Vector::Unit(m, a), y = Vector::Unit(m, b);
      c.col(a + m * b) = qe.dot(x) * y + qe.dot(y) * x - x.dot(q * y) * e;
    }
  return Algebra(std::move(c), e, family);
}

inline std::vector<double> poly_mul_trunc(const std::vector<double>& p, const std::vector<double>& q,
                                          std::size_t n) {
  std::vector<double> r(n, 0.0);
  for (std::size_t i = 0; i < std::min(n, p.size()); ++i)
    for (std::size_t j = 0; i + j < n && j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

inline double real_base(const OmegaBlock& b, const Vector& x) { return b.base(x).real(); }

}  // namespace detail

// Truncated polynomial algebra R[t]/(t^n) with gamma(p, q) = -(p*q)(1).
inline std::pair<Algebra, TraceForm> trunc_poly_algebra(int n) {
  if (n < 2) throw UsageError("TruncPoly needs n >= 2");
  Matrix c = Matrix::Zero(n, n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; a + b < n; ++b) c(a + b, a + n * b) = 1.0;
  std::vector<std::string> labels;
  for (int k = 0; k < n; ++k) labels.push_back("t^" + std::to_string(k));
  Algebra j(std::move(c), Vector(Vector::Unit(n, 0)), "TruncPoly(" + std::to_string(n) + ")", labels);
  Matrix gamma(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) gamma(a, b) = a + b < n ? -1.0 : 0.0;
  return {std::move(j), TraceForm(gamma)};
}

// Ideal of polynomials without constant term in R[t]/(t^n), basis t..t^{n-1},
// with the nondegenerate associative form (t^a, t^b) -> [a + b == n].
inline std::pair<Algebra, TraceForm> trunc_poly_nil_ideal(int n) {
  if (n < 2) throw UsageError("nil ideal needs n >= 2");
  const int d = n - 1;
  Matrix c = Matrix::Zero(d, d * d);
  for (int a = 1; a <= d; ++a)
    for (int b = 1; a + b < n; ++b) c(a + b - 1, (a - 1) + d * (b - 1)) = 1.0;
  std::vector<std::string> labels;
  for (int k = 1; k <= d; ++k) labels.push_back("t^" + std::to_string(k));
  Algebra j(std::move(c), std::nullopt, "TruncPolyNilIdeal(" + std::to_string(n) + ")", labels);
  Matrix gamma = Matrix::Zero(d, d);
  for (int a = 1; a <= d; ++a) gamma(a - 1, n - a - 1) = 1.0;
  return {std::move(j), TraceForm(gamma)};
}

// (log p)(1): the truncated series of log|p(t)| summed at t = 1.
inline double trunc_poly_log_at_one(const Vector& p) {
  const std::size_t n = static_cast<std::size_t>(p.size());
  if (n == 0) throw UsageError("empty polynomial");
  if (p(0) == 0.0) throw NotInvertibleError("polynomial with p(0) = 0 has no logarithm");
  std::vector<double> q(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) q[k] = p(static_cast<Eigen::Index>(k)) / p(0);
  std::vector<double> qk = q;
  double total = std::log(std::abs(p(0)));
  for (std::size_t j = 1; j < n; ++j) {
    double sum = std::accumulate(qk.begin(), qk.end(), 0.0);
    total += (j % 2 ? 1.0 : -1.0) * sum / static_cast<double>(j);
    qk = detail::poly_mul_trunc(qk, q, n);
  }
  return total;
}

inline int family_min_parameter(Family f) {
  switch (f) {
    case Family::QuadraticFactorReal:
    case Family::QuadraticFactorComplex:
    case Family::SymReal:
    case Family::SymComplex:
    case Family::FullReal:
    case Family::FullComplex:
    case Family::HermComplex:
    case Family::HermQuat:
    case Family::SkewSplitQuatReal:
    case Family::SkewSplitQuatComplex:
      return 3;
    case Family::FullQuat:
    case Family::SkewHermQuat:
    case Family::TruncPoly:
      return 2;
    default:
      return 0;
  }
}

namespace detail {

inline OmegaBlock make_block(const FamilyTag& tag, int dim, int det_exponent, double omega_exponent,
                             int base_degree, std::string base_name, Vector unit,
                             std::function<Complex(const Vector&)> base) {
  OmegaBlock b;
  b.tag = tag;
  b.dim = dim;
  b.complex = is_complex_family(tag.family);
  b.det_exponent = det_exponent;
  b.omega_exponent = omega_exponent;
  b.base_degree = base_degree;
  b.base_name = std::move(base_name);
  b.unit = std::move(unit);
  b.base = std::move(base);
  return b;
}

inline void set_segment_component(OmegaBlock& b) {
  OmegaBlock copy = b;
  auto f = [copy](const Vector& y) { return copy.base(y).real(); };
  Vector e = b.unit;
  int degree = b.base_degree;
  b.in_component = [f, e, degree](const Vector& x) {
    return segment_avoids_zero(f, e, x, degree);
  };
}

inline void set_nonzero_component(OmegaBlock& b) {
  auto base = b.base;
  b.in_component = [base](const Vector& x) { return std::abs(base(x)) > 0; };
}

inline void set_sign_component(OmegaBlock& b) {
  auto base = b.base;
  double sign_e = base(b.unit).real();
  b.in_component = [base, sign_e](const Vector& x) {
    double v = base(x).real();
    return v != 0 && (v > 0) == (sign_e > 0);
  };
}

// Signature of the Hermitian matrix embed(x) compared with that of embed(e).
inline void set_signature_component(OmegaBlock& b, std::shared_ptr<MatrixModel> model) {
  auto count = [model](const Vector& x) {
    CMatrix a = model->embed(x);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();
    double tol = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    if ((ev.array().abs() <= tol).any()) return -1;
    return signature_positive(ev, tol);
  };
  int target = count(b.unit);
  b.in_component = [count, target](const Vector& x) { return count(x) == target; };
}

inline Vector twist_vector(const FamilyTag& tag, int m) {
  if (tag.twist.empty()) return Vector::Ones(m);
  if (static_cast<int>(tag.twist.size()) != m) throw UsageError("twist signature must have m entries");
  int neg = 0;
  Vector g(m);
  for (int i = 0; i < m; ++i) {
    if (tag.twist[static_cast<std::size_t>(i)] != 1 && tag.twist[static_cast<std::size_t>(i)] != -1)
      throw UsageError("twist signature entries must be +1 or -1");
    g(i) = tag.twist[static_cast<std::size_t>(i)];
    neg += g(i) < 0;
  }
  if (2 * neg > m) throw UsageError("twist signature needs at least as many +1 as -1 entries");
  return g;
}

inline CatalogEntry finish_entry(const FamilyTag& tag, Algebra algebra, OmegaBlock block) {
  Matrix g = g_matrix(algebra);
  double n = algebra.dim();
  OmegaSpec spec;
  spec.blocks.push_back(std::move(block));
  return CatalogEntry{tag.name(), tag, algebra, g, std::move(spec), TraceForm(-g / n)};
}

inline CatalogEntry make_matrix_family(const FamilyTag& tag, std::shared_ptr<MatrixModel> model,
                                       const CMatrix& identity, int det_exponent, double omega_exponent,
                                       int base_degree, const std::string& base_name,
                                       std::function<Complex(const CMatrix&)> invariant) {
  Algebra alg = model->build(identity, tag.name());
  std::shared_ptr<const MatrixModel> cm = model;
  OmegaBlock b = make_block(tag, alg.dim(), det_exponent, omega_exponent, base_degree, base_name, alg.unit(),
                            [cm, invariant](const Vector& x) { return invariant(cm->embed(x)); });
  return finish_entry(tag, std::move(alg), std::move(b));
}

inline Complex cdet(const CMatrix& a) { return a.determinant(); }

inline CatalogEntry make_twisted_matrix_family(const FamilyTag& tag, std::shared_ptr<MatrixModel> model,
                                               const CMatrix& gamma_matrix, int det_exponent,
                                               double omega_exponent, int base_degree,
                                               const std::string& base_name,
                                               std::function<Complex(const CMatrix&)> invariant,
                                               bool signature_test) {
  Algebra base = model->build(CMatrix::Identity(gamma_matrix.rows(), gamma_matrix.cols()), tag.name());
  Vector gamma = model->coords(gamma_matrix);
  Complex gamma_det = std::pow(invariant(gamma_matrix), det_exponent);
  Algebra alg = tag.is_twisted() ? isotope(base, gamma) : base;
  Algebra named(alg.structure_matrix(), alg.unit(), tag.name(), model->labels);
  std::shared_ptr<const MatrixModel> cm = model;
  OmegaBlock b = make_block(tag, named.dim(), det_exponent, omega_exponent, base_degree, base_name,
                            named.unit(), [cm, invariant](const Vector& x) { return invariant(cm->embed(x)); });
  b.det_factor = tag.is_twisted() ? gamma_det : Complex(1.0);
  if (signature_test)
    set_signature_component(b, model);
  else
    set_segment_component(b);
  return finish_entry(tag, std::move(named), std::move(b));
}

// Complexification of a real split form, realified; the closed form is
// evaluated on complex coordinates of the same basis.
inline CatalogEntry make_complexified(const FamilyTag& tag, const Algebra& real_form, int det_exponent,
                                      int base_degree, const std::string& base_name,
                                      std::function<Complex(const CVector&)> invariant) {
  Algebra alg = realify(complexify(real_form), tag.name());
  OmegaBlock b = make_block(tag, alg.dim(), det_exponent, det_exponent, base_degree, base_name, alg.unit(),
                            [invariant](const Vector& x) { return invariant(complex_coordinates(x)); });
  set_nonzero_component(b);
  return finish_entry(tag, std::move(alg), std::move(b));
}

}  // namespace detail

inline void validate_tag(const FamilyTag& tag) {
  const int lo = family_min_parameter(tag.family);
  if (tag.family == Family::Custom) throw UsageError("custom algebras are not catalog entries");
  if (lo > 0 && tag.m < lo)
    throw UsageError(family_name(tag.family) + " needs parameter >= " + std::to_string(lo));
  if (!tag.twist.empty() && !is_twistable_family(tag.family))
    throw UsageError(family_name(tag.family) + " does not take a signature twist");
  if (tag.family == Family::QuadraticFactorReal) {
    if (tag.q.rows() != tag.q.cols() || tag.q.rows() < 3)
      throw UsageError("QuadraticFactorReal needs a square form of size >= 3");
    if ((tag.q - tag.q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw UsageError("QuadraticFactorReal form must be symmetric");
    if (tag.q(0, 0) <= 0) throw UsageError("QuadraticFactorReal form must be positive on the first basis vector");
    if (std::abs(tag.q.determinant()) < 1e-12) throw UsageError("QuadraticFactorReal form is degenerate");
  }
  if (tag.family == Family::OctHerm3 && !tag.twist.empty() && tag.twist.size() != 3)
    throw UsageError("OctHerm3 twist needs 3 entries");
}

inline CatalogEntry make_algebra(const FamilyTag& tag_in) {
  FamilyTag tag = tag_in;
  if (tag.family == Family::OctHerm3 && tag.m == 0) tag.m = 3;
  validate_tag(tag);
  const int m = tag.m;
  using namespace detail;
  switch (tag.family) {
    case Family::RealLine: {
      Algebra alg(Matrix::Ones(1, 1), Vector::Ones(1), tag.name(), {"1"});
      OmegaBlock b = make_block(tag, 1, 2, 1.0, 1, "x", Vector::Ones(1),
                                [](const Vector& x) { return Complex(x(0)); });
      set_sign_component(b);
      return finish_entry(tag, std::move(alg), std::move(b));
    }
    case Family::ComplexField: {
      Algebra line(Matrix::Ones(1, 1), Vector::Ones(1), "RealLine", {"1"});
      return make_complexified(tag, line, 2, 1, "z", [](const CVector& z) { return z(0); });
    }
    case Family::QuadraticFactorReal: {
      const Matrix q = (tag.q + tag.q.transpose()) / 2;
      Vector e = Vector::Unit(m, 0) / std::sqrt(q(0, 0));
      Algebra alg = quadratic_factor_algebra(q, e, tag.name());
      OmegaBlock b = make_block(tag, m, m, m / 2.0, 2, "x^T Q x", e,
                                [q](const Vector& x) { return Complex(x.dot(q * x)); });
      Eigen::SelfAdjointEigenSolver<Matrix> es(q);
      const bool two_sheets = (es.eigenvalues().array() > 0).count() == 1;
      Vector qe = q * e;
      b.in_component = [q, qe, two_sheets](const Vector& x) {
        return x.dot(q * x) > 0 && (!two_sheets || qe.dot(x) > 0);
      };
      return finish_entry(tag, std::move(alg), std::move(b));
    }
    case Family::QuadraticFactorComplex: {
      Matrix q = Matrix::Identity(m, m);
      Algebra real = quadratic_factor_algebra(q, Vector::Unit(m, 0), "QuadraticFactorReal");
      return make_complexified(tag, real, m, 2, "x^T x",
                               [](const CVector& z) { return Complex(z.transpose() * z); });
    }
    case Family::SymReal: {
      auto model = sym_model(m, false);
      Vector g = twist_vector(tag, m);
      CMatrix gm = g.cast<Complex>().asDiagonal();
      return make_twisted_matrix_family(tag, model, gm, m + 1, (m + 1) / 2.0, m, "det A", cdet, true);
    }
    case Family::SymComplex: {
      auto model = sym_model(m, false);
      Algebra real = model->build(CMatrix::Identity(m, m), "SymReal");
      return make_complexified(tag, real, m + 1, m, "det A",
                               [model](const CVector& z) { return model->embed(z).determinant(); });
    }
    case Family::FullReal: {
      auto model = full_model(m);
      auto entry = make_matrix_family(tag, model, CMatrix::Identity(m, m), 2 * m, m, m, "det A", cdet);
      set_sign_component(entry.omega.blocks.front());
      return entry;
    }
    case Family::FullComplex: {
      auto model = full_model(m);
      Algebra real = model->build(CMatrix::Identity(m, m), "FullReal");
      return make_complexified(tag, real, 2 * m, m, "det A",
                               [model](const CVector& z) { return model->embed(z).determinant(); });
    }
    case Family::HermComplex: {
      auto model = sym_model(m, true);
      Vector g = twist_vector(tag, m);
      CMatrix gm = g.cast<Complex>().asDiagonal();
      auto det = [](const CMatrix& a) { return Complex(a.determinant().real()); };
      return make_twisted_matrix_family(tag, model, gm, 2 * m, m, m, "det A", det, true);
    }
    case Family::FullQuat: {
      auto model = full_quat_model(m);
      auto det = [](const CMatrix& a) { return Complex(a.determinant().real()); };
      auto entry = make_matrix_family(tag, model, CMatrix::Identity(2 * m, 2 * m), 4 * m, 2.0 * m, 2 * m,
                                      "det S", det);
      set_sign_component(entry.omega.blocks.front());
      return entry;
    }
    case Family::HermQuat: {
      auto model = herm_quat_model(m);
      Vector g = twist_vector(tag, m);
      CMatrix gm = CMatrix::Zero(2 * m, 2 * m);
      for (int i = 0; i < m; ++i) gm += g(i) * quaternion_entry(m, i, i, 0);
      auto det = [](const CMatrix& a) { return Complex(a.determinant().real()); };
      return make_twisted_matrix_family(tag, model, gm, 2 * m - 1, m - 0.5, 2 * m, "det S", det, true);
    }
    case Family::SkewSplitQuatReal: {
      CMatrix j;
      auto model = skew_split_model(m, j);
      auto pf = [](const CMatrix& a) { return Complex(pfaffian<double>(a.real())); };
      auto entry = make_matrix_family(tag, model, CMatrix(-j), 2 * (2 * m - 1), 2.0 * m - 1, m, "pf S", pf);
      set_sign_component(entry.omega.blocks.front());
      return entry;
    }
    case Family::SkewSplitQuatComplex: {
      CMatrix j;
      auto model = skew_split_model(m, j);
      Algebra real = model->build(CMatrix(-j), "SkewSplitQuatReal");
      return make_complexified(tag, real, 2 * (2 * m - 1), m, "pf S",
                               [model](const CVector& z) { return pfaffian<Complex>(model->embed(z)); });
    }
    case Family::SkewHermQuat: {
      CMatrix lambda;
      auto model = skew_herm_quat_model(m, lambda);
      auto det = [](const CMatrix& a) { return Complex(a.determinant().real()); };
      auto entry = make_matrix_family(tag, model, CMatrix(-lambda), 2 * m + 1, m + 0.5, 2 * m, "det S", det);
      set_segment_component(entry.omega.blocks.front());
      return entry;
    }
    case Family::OctHerm3:
    case Family::SplitOctHerm3Real: {
      const HypercomplexTable* table =
          tag.family == Family::OctHerm3 ? &cayley_octonion_table() : &split_octonion_table();
      Algebra base = octonion_herm3_algebra(table, tag.name());
      auto det = [table](const Vector& x) { return Complex(OctMatrix3<double>(table, x).det()); };
      Vector g = twist_vector(tag, 3);
      Vector gamma = Vector::Zero(27);
      gamma.head(3) = g;
      Algebra alg = tag.is_twisted() ? isotope(base, gamma) : base;
      Algebra named(alg.structure_matrix(), alg.unit(), tag.name(), base.labels());
      OmegaBlock b = make_block(tag, 27, 18, 9.0, 3, "det A", named.unit(), det);
      b.det_factor = tag.is_twisted() ? std::pow(det(gamma), 18) : Complex(1.0);
      set_segment_component(b);
      return finish_entry(tag, std::move(named), std::move(b));
    }
    case Family::SplitOctHerm3Complex: {
      const HypercomplexTable* table = &split_octonion_table();
      Algebra real = octonion_herm3_algebra(table, "SplitOctHerm3Real");
      return make_complexified(tag, real, 18, 3, "det A",
                               [table](const CVector& z) { return OctMatrix3<Complex>(table, z).det(); });
    }
    case Family::TruncPoly: {
      auto [alg, gamma] = trunc_poly_algebra(m);
      OmegaBlock b = make_block(tag, m, 2 * m, m, 1, "p0", alg.unit(),
                                [](const Vector& x) { return Complex(x(0)); });
      set_sign_component(b);
      CatalogEntry entry = finish_entry(tag, std::move(alg), std::move(b));
      entry.default_gamma = gamma;
      return entry;
    }
    case Family::Custom:
      break;
  }
  throw UsageError("unknown family");
}

// Form whose weighted block sums define trace forms on direct sums: g on
// semi-simple entries and -n * gamma(default) otherwise; both equal n at e.
inline Matrix canonical_block_form(const CatalogEntry& entry) {
  return -static_cast<double>(entry.algebra.dim()) * entry.default_gamma.matrix();
}

inline CatalogEntry catalog_direct_sum(const std::vector<CatalogEntry>& parts,
                                       std::optional<std::vector<double>> weights = std::nullopt) {
  if (parts.empty()) throw UsageError("direct sum needs at least one part");
  if (weights && weights->size() != parts.size()) throw UsageError("one weight per direct-sum part");
  std::vector<Algebra> algebras;
  OmegaSpec spec;
  int total = 0;
  for (const auto& p : parts) total += p.algebra.dim();
  Matrix g = Matrix::Zero(total, total), weighted = Matrix::Zero(total, total);
  int offset = 0;
  std::string name = "DirectSum(";
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& p = parts[k];
    const int d = p.algebra.dim();
    algebras.push_back(p.algebra);
    for (auto b : p.omega.blocks) {
      b.offset += offset;
      spec.blocks.push_back(std::move(b));
    }
    g.block(offset, offset, d, d) = p.g;
    double w = weights ? (*weights)[k] : 1.0;
    weighted.block(offset, offset, d, d) = w * canonical_block_form(p);
    name += (k ? "," : "") + p.name;
    offset += d;
  }
  name += ")";
  Algebra sum = direct_sum(algebras);
  Vector e = sum.unit();
  double gee = e.dot(weighted * e);
  if (gee == 0) throw UsageError("weights give gamma(e,e) = 0");
  FamilyTag tag;
  tag.family = Family::Custom;
  return CatalogEntry{name, tag, std::move(sum), g, std::move(spec), TraceForm(-weighted / gee)};
}

struct CatalogRow {
  std::string family;
  std::string space;
  std::string field;  // "complex" (realified) or "real"
  std::string real_dim;
  std::string range;
  std::string potential;
  std::string omega;
  int min_parameter = 0;
  bool parametrized = false;
};

inline const std::vector<CatalogRow>& catalog_table() {
  static const std::vector<CatalogRow> rows = {
      {"ComplexField", "C", "complex", "2", "-", "Re(c log x)", "|x|^2", 0, false},
      {"QuadraticFactorComplex", "C^m", "complex", "2m", "m>=3", "Re(c log x^T x)", "|x^T x|^m", 3, true},
      {"SymComplex", "S_m(C)", "complex", "m(m+1)", "m>=3", "Re(c log det A)", "|det A|^(m+1)", 3, true},
      {"FullComplex", "M_m(C)", "complex", "2m^2", "m>=3", "Re(c log det A)", "|det A|^(2m)", 3, true},
      {"SkewSplitQuatComplex", "A_2m(C)", "complex", "2m(2m-1)", "m>=3", "Re(c log pf A)",
       "|pf A|^(2(2m-1))", 3, true},
      {"SplitOctHerm3Complex", "H_3(O,C)", "complex", "54", "-", "Re(c log det A)", "|det A|^18", 0, false},
      {"RealLine", "R", "real", "1", "-", "a log|x|", "|x|", 0, false},
      {"QuadraticFactorReal", "R^m", "real", "m", "m>=3", "a log|x^T Q x|", "|x^T Q x|^(m/2)", 3, true},
      {"FullReal", "M_m(R)", "real", "m^2", "m>=3", "a log|det A|", "|det A|^m", 3, true},
      {"FullQuat", "M_m(H)", "real", "4m^2", "m>=2", "a log det S", "(det S)^(2m)", 2, true},
      {"SymReal", "S_m(R)", "real", "m(m+1)/2", "m>=3", "a log|det A|", "|det A|^((m+1)/2)", 3, true},
      {"HermComplex", "H_m(C)", "real", "m^2", "m>=3", "a log|det A|", "|det A|^m", 3, true},
      {"HermQuat", "H_m(H)", "real", "m(2m-1)", "m>=3", "a log det S", "(det S)^(m-1/2)", 3, true},
      {"SkewSplitQuatReal", "A_2m(R)", "real", "m(2m-1)", "m>=3", "a log|pf A|", "|pf A|^(2m-1)", 3, true},
      {"SkewHermQuat", "SH_m(H)", "real", "m(2m+1)", "m>=2", "a log det S", "(det S)^(m+1/2)", 2, true},
      {"OctHerm3", "H_3(Oct)", "real", "27", "-", "a log|det A|", "|det A|^9", 0, false},
      {"SplitOctHerm3Real", "H_3(O,R)", "real", "27", "-", "a log|det A|", "|det A|^9", 0, false},
  };
  return rows;
}

// The table families at their smallest parameter.
inline std::vector<FamilyTag> table_families_smallest() {
  std::vector<FamilyTag> tags;
  for (const auto& row : catalog_table()) {
    Family f = *family_from_name(row.family);
    if (f == Family::QuadraticFactorReal) {
      Matrix q = Matrix::Identity(3, 3);
      q(2, 2) = -1;
      tags.push_back(FamilyTag::quadratic_real(q));
    } else {
      tags.push_back(FamilyTag::make(f, row.min_parameter));
    }
  }
  return tags;
}

}  // namespace jordan

#endif  // JORDAN_CATALOG_HPP
