#ifndef JORDAN_ALGEBRA_HPP
#define JORDAN_ALGEBRA_HPP

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jordan/error.hpp"
#include "jordan/linalg.hpp"

namespace jordan {

// Finite-dimensional commutative algebra given by a dense structure tensor.
//
// The tensor C[g][a][b] is stored as an n x n^2 matrix whose column a + n*b
// holds the vector e_a * e_b, so that the block of columns [n*b, n*b + n) is
// the multiplication operator of the basis vector e_b.
template <class Scalar>
class BasicAlgebra {
 public:
  using VectorType = VectorT<Scalar>;
  using MatrixType = MatrixT<Scalar>;

  // A negative unit_tol skips the unit check (used for reconstructed algebras,
  // whose unit is only accurate to finite-difference precision).
  BasicAlgebra(MatrixType structure, std::optional<VectorType> unit,
               std::string family = "custom", std::vector<std::string> labels = {},
               double unit_tol = 1e-8)
      : n_(static_cast<int>(structure.rows())),
        c_(std::move(structure)),
        unit_(std::move(unit)),
        family_(std::move(family)),
        labels_(std::move(labels)) {
    if (n_ <= 0) throw UsageError("algebra dimension must be positive");
    if (c_.cols() != static_cast<Eigen::Index>(n_) * n_)
      throw UsageError("structure matrix must be n x n^2");
    if (!labels_.empty() && static_cast<int>(labels_.size()) != n_)
      throw UsageError("basis label count does not match dimension");
    symmetrize();
    if (unit_) {
      require_dim(*unit_, n_, "unit element");
      if (unit_tol >= 0) check_unit(unit_tol);
    }
  }

  // Build from a flat tensor indexed [(g*n + a)*n + b].
  static BasicAlgebra from_tensor(int n, const std::vector<Scalar>& c,
                                  std::optional<VectorType> unit,
                                  std::string family = "custom") {
    if (n <= 0 || c.size() != static_cast<std::size_t>(n) * n * n)
      throw UsageError("structure tensor must have n^3 entries");
    MatrixType m(n, static_cast<Eigen::Index>(n) * n);
    for (int g = 0; g < n; ++g)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) m(g, a + n * b) = c[(static_cast<std::size_t>(g) * n + a) * n + b];
    return BasicAlgebra(std::move(m), std::move(unit), std::move(family));
  }

  int dim() const { return n_; }
  Scalar structure(int g, int a, int b) const { return c_(g, a + n_ * b); }
  const MatrixType& structure_matrix() const { return c_; }
  // Multiplication operator of the basis vector e_b.
  auto basis_operator(int b) const { return c_.middleCols(static_cast<Eigen::Index>(n_) * b, n_); }

  bool has_unit() const { return unit_.has_value(); }
  const std::optional<VectorType>& unit_if_any() const { return unit_; }
  const VectorType& unit() const {
    if (!unit_) throw UnsupportedError("operation requires a unital algebra");
    return *unit_;
  }

  const std::string& family() const { return family_; }
  const std::vector<std::string>& labels() const { return labels_; }

  double max_structure_constant() const { return c_.cwiseAbs().maxCoeff(); }

 private:
  void symmetrize() {
    for (int a = 0; a < n_; ++a)
      for (int b = a + 1; b < n_; ++b) {
        auto ab = c_.col(a + n_ * b);
        auto ba = c_.col(b + n_ * a);
        VectorType avg = (ab + ba) / Scalar(2);
        ab = avg;
        ba = avg;
      }
  }

  void check_unit(double tol) const {
    MatrixType le = MatrixType::Zero(n_, n_);
    for (int b = 0; b < n_; ++b) le += (*unit_)(b)*basis_operator(b);
    double defect = (le - MatrixType::Identity(n_, n_)).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, max_structure_constant() * unit_->cwiseAbs().maxCoeff());
    if (defect > tol * scale)
      throw UsageError("unit element does not act as identity (defect " + std::to_string(defect) + ")");
  }

  int n_;
  MatrixType c_;
  std::optional<VectorType> unit_;
  std::string family_;
  std::vector<std::string> labels_;
};

using Algebra = BasicAlgebra<double>;
using ComplexAlgebra = BasicAlgebra<Complex>;

// Symmetric bilinear form on an algebra's coordinate space.
class TraceForm {
 public:
  TraceForm() = default;
  explicit TraceForm(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) throw UsageError("trace form must be a square matrix");
    m_ = (m + m.transpose()) / 2;
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(const Vector& x, const Vector& y) const {
    require_dim(x, dim(), "trace form argument");
    require_dim(y, dim(), "trace form argument");
    return x.dot(m_ * y);
  }
  TraceForm scaled(double s) const { return TraceForm(s * m_); }

 private:
  Matrix m_;
};

template <class Scalar>
VectorT<Scalar> mul(const BasicAlgebra<Scalar>& j, const VectorT<Scalar>& x,
                    const VectorT<Scalar>& y) {
  require_dim(x, j.dim(), "mul");
  require_dim(y, j.dim(), "mul");
  MatrixT<Scalar> outer = x * y.transpose();
  return j.structure_matrix() * Eigen::Map<const VectorT<Scalar>>(outer.data(), outer.size());
}

template <class Scalar>
MatrixT<Scalar> l_operator(const BasicAlgebra<Scalar>& j, const VectorT<Scalar>& x) {
  require_dim(x, j.dim(), "l_operator");
  MatrixT<Scalar> l = MatrixT<Scalar>::Zero(j.dim(), j.dim());
  for (int b = 0; b < j.dim(); ++b)
    if (x(b) != Scalar(0)) l += x(b) * j.basis_operator(b);
  return l;
}

template <class Scalar>
MatrixT<Scalar> p_operator(const BasicAlgebra<Scalar>& j, const VectorT<Scalar>& x) {
  MatrixT<Scalar> l = l_operator(j, x);
  return Scalar(2) * l * l - l_operator(j, VectorT<Scalar>(l * x));
}

// Polarized quadratic representation {x,y} = L_x L_y + L_y L_x - L_{x*y},
// applied to v. Equals P_x v when x == y.
template <class Scalar>
VectorT<Scalar> polarized_p_apply(const BasicAlgebra<Scalar>& j, const VectorT<Scalar>& x,
                                  const VectorT<Scalar>& y, const VectorT<Scalar>& v) {
  return mul(j, x, mul(j, y, v)) + mul(j, y, mul(j, x, v)) - mul(j, mul(j, x, y), v);
}

// Linear functional t(x) = tr L_x as a coefficient vector.
template <class Scalar>
VectorT<Scalar> trace_vector(const BasicAlgebra<Scalar>& j) {
  const int n = j.dim();
  VectorT<Scalar> tau(n);
  for (int b = 0; b < n; ++b) tau(b) = j.basis_operator(b).trace();
  return tau;
}

template <class Scalar>
Scalar trace_t(const BasicAlgebra<Scalar>& j, const VectorT<Scalar>& x) {
  require_dim(x, j.dim(), "trace_t");
  return trace_vector(j).cwiseProduct(x).sum();
}

// Matrix of the canonical form g(x, y) = t(x * y).
template <class Scalar>
MatrixT<Scalar> g_matrix(const BasicAlgebra<Scalar>& j) {
  const int n = j.dim();
  VectorT<Scalar> row = j.structure_matrix().transpose() * trace_vector(j);
  return Eigen::Map<const MatrixT<Scalar>>(row.data(), n, n);
}

template <class Scalar>
Scalar bilinear_g(const BasicAlgebra<Scalar>& j, const VectorT<Scalar>& x,
                  const VectorT<Scalar>& y) {
  return trace_t(j, mul(j, x, y));
}

inline TraceForm canonical_form(const Algebra& j) { return TraceForm(g_matrix(j)); }

struct InvertibilityCertificate {
  bool invertible = false;
  LogDet det;         // det P_x
  double rcond = 0;   // reciprocal condition estimate of P_x
  double threshold;   // value the test compared against (rcond, or |det P_x| when a tolerance is given)
};

inline constexpr double kDefaultRcondThreshold = 1e-13;

// Default: P_x numerically nonsingular (rcond above 1e-13). With tol given,
// the test is |det P_x| > tol instead.
inline InvertibilityCertificate is_invertible(const Algebra& j, const Vector& x,
                                              std::optional<double> tol = std::nullopt) {
  j.unit();
  require_dim(x, j.dim(), "is_invertible");
  Matrix p = p_operator(j, x);
  Eigen::PartialPivLU<Matrix> lu(p);
  InvertibilityCertificate c;
  c.det = log_det(p);
  c.rcond = lu.rcond();
  if (tol) {
    c.threshold = *tol;
    c.invertible = c.det.sign != 0 && c.det.log_abs > std::log(*tol);
  } else {
    c.threshold = kDefaultRcondThreshold;
    c.invertible = c.det.sign != 0 && c.rcond > kDefaultRcondThreshold;
  }
  return c;
}

inline Vector inverse(const Algebra& j, const Vector& x) {
  if (!is_invertible(j, x).invertible) throw NotInvertibleError("element is not invertible (det P_x ~ 0)");
  return p_operator(j, x).partialPivLu().solve(x);
}

template <class Scalar>
VectorT<Scalar> power(const BasicAlgebra<Scalar>& j, const VectorT<Scalar>& x, int k) {
  if (k < 0) throw UsageError("power: exponent must be nonnegative");
  require_dim(x, j.dim(), "power");
  if (k == 0) return j.unit();
  VectorT<Scalar> p = x;
  for (int i = 1; i < k; ++i) p = mul(j, x, p);
  return p;
}

template <class Scalar>
VectorT<Scalar> exponential(const BasicAlgebra<Scalar>& j, const VectorT<Scalar>& u) {
  const VectorT<Scalar>& e = j.unit();
  MatrixT<Scalar> expl = l_operator(j, u).exp();
  return expl * e;
}

// Algebra on the same space with x *_u y = x*(y*u) + y*(x*u) - (x*y)*u.
inline Algebra isotope(const Algebra& j, const Vector& u) {
  require_dim(u, j.dim(), "isotope");
  const int n = j.dim();
  Matrix lu = l_operator(j, u);
  Matrix c(n, static_cast<Eigen::Index>(n) * n);
  for (int b = 0; b < n; ++b) {
    Matrix lb = j.basis_operator(b);
    Vector bu = lu.col(b);
    c.middleCols(static_cast<Eigen::Index>(n) * b, n) = lb * lu - lu * lb + l_operator(j, bu);
  }
  std::optional<Vector> unit;
  if (j.has_unit() && is_invertible(j, u).invertible) unit = inverse(j, u);
  return Algebra(std::move(c), std::move(unit), "isotope(" + j.family() + ")", j.labels());
}

template <class Scalar>
BasicAlgebra<Scalar> direct_sum(const std::vector<BasicAlgebra<Scalar>>& parts) {
  if (parts.empty()) throw UsageError("direct_sum needs at least one part");
  int total = 0;
  bool unital = true;
  bool labelled = true;
  for (const auto& p : parts) {
    total += p.dim();
    unital = unital && p.has_unit();
    labelled = labelled && !p.labels().empty();
  }
  MatrixT<Scalar> c = MatrixT<Scalar>::Zero(total, static_cast<Eigen::Index>(total) * total);
  VectorT<Scalar> unit = VectorT<Scalar>::Zero(total);
  std::vector<std::string> labels;
  std::string family = "direct_sum(";
  int offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& p = parts[k];
    const int m = p.dim();
    for (int b = 0; b < m; ++b)
      for (int a = 0; a < m; ++a)
        c.block(offset, (offset + a) + static_cast<Eigen::Index>(total) * (offset + b), m, 1) =
            p.structure_matrix().col(a + static_cast<Eigen::Index>(m) * b);
    if (unital) unit.segment(offset, m) = p.unit();
    if (labelled)
      for (const auto& l : p.labels()) labels.push_back(l);
    family += (k ? "," : "") + p.family();
    offset += m;
  }
  family += ")";
  std::optional<VectorT<Scalar>> u;
  if (unital) u = unit;
  return BasicAlgebra<Scalar>(std::move(c), std::move(u), family, labels);
}

struct JordanIdentityReport {
  double max_residual = 0;
  int samples = 0;
  bool pass = false;
};

namespace detail {
template <class Scalar>
VectorT<Scalar> random_element(Rng& rng, Eigen::Index n) {
  VectorT<Scalar> v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<Scalar, Complex>) {
      double re = rng.normal();
      v(i) = Complex(re, rng.normal());
    } else {
      v(i) = rng.normal();
    }
  }
  return v;
}
}  // namespace detail

// Max over sampled pairs of |x*(x^2*y) - x^2*(x*y)| / (|x|^3 |y| s^3), where s
// is the largest structure constant.
template <class Scalar>
JordanIdentityReport check_jordan_identity(const BasicAlgebra<Scalar>& j, int samples = 200,
                                           double tol = 1e-9, std::uint64_t seed = kDefaultSeed) {
  Rng rng(seed);
  double s = std::max(j.max_structure_constant(), 1e-300);
  JordanIdentityReport r;
  for (int i = 0; i < samples; ++i) {
    VectorT<Scalar> x = detail::random_element<Scalar>(rng, j.dim());
    VectorT<Scalar> y = detail::random_element<Scalar>(rng, j.dim());
    VectorT<Scalar> x2 = mul(j, x, x);
    VectorT<Scalar> defect = mul(j, x, VectorT<Scalar>(mul(j, x2, y))) - mul(j, x2, VectorT<Scalar>(mul(j, x, y)));
    double scale = std::pow(x.norm(), 3) * y.norm() * s * s * s;
    r.max_residual = std::max(r.max_residual, defect.norm() / (scale + 1e-300));
  }
  r.samples = samples;
  r.pass = r.max_residual <= tol;
  return r;
}

inline double min_singular_value(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().minCoeff();
}

inline bool is_nondegenerate(const TraceForm& gamma, double tol = 1e-10) {
  Eigen::JacobiSVD<Matrix> svd(gamma.matrix());
  const auto& s = svd.singularValues();
  return s.maxCoeff() > 0 && s.minCoeff() > tol * s.maxCoeff();
}

inline bool is_semisimple(const Algebra& j, double tol = 1e-10) {
  return is_nondegenerate(TraceForm(g_matrix(j)), tol);
}

// Largest relative defect of gamma(u*v, w) = gamma(u, v*w), checked on the
// basis in the operator form gamma L_b = L_b^T gamma.
inline double associativity_defect(const Algebra& j, const TraceForm& gamma) {
  if (gamma.dim() != j.dim()) throw UsageError("trace form dimension does not match the algebra");
  const Matrix& m = gamma.matrix();
  double worst = 0;
  double gnorm = m.norm();
  for (int b = 0; b < j.dim(); ++b) {
    Matrix lb = j.basis_operator(b);
    double scale = gnorm * lb.norm();
    if (scale == 0) continue;
    worst = std::max(worst, (m * lb - lb.transpose() * m).norm() / scale);
  }
  return worst;
}

inline void validate_trace_form(const Algebra& j, const TraceForm& gamma, double tol = 1e-9) {
  if (gamma.dim() != j.dim()) throw UsageError("trace form dimension does not match the algebra");
  double defect = associativity_defect(j, gamma);
  if (defect > tol)
    throw UsageError("form is not associative (defect " + std::to_string(defect) + ")");
  if (!is_nondegenerate(gamma)) throw DegeneracyError("trace form is degenerate");
}

struct StructuralReport {
  bool nil_algebra = false;
  bool associative = false;
  std::optional<bool> degree_two;  // only defined for unital algebras
};

inline bool is_degree_two(const Algebra& j, int samples = 20, double tol = 1e-9,
                          std::uint64_t seed = kDefaultSeed) {
  const Vector& e = j.unit();
  if (j.dim() <= 2) return true;
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    Vector u = rng.normal_vector(j.dim());
    Matrix span(j.dim(), 3);
    span << e / e.norm(), u / u.norm(), mul(j, u, u).normalized();
    Eigen::JacobiSVD<Matrix> svd(span);
    if (svd.singularValues()(2) > tol * svd.singularValues()(0)) return false;
  }
  return true;
}

inline StructuralReport structural_predicates(const Algebra& j, int samples = 20, double tol = 1e-9,
                                              std::uint64_t seed = kDefaultSeed) {
  const int n = j.dim();
  Rng rng(seed);
  StructuralReport r{true, true, std::nullopt};
  for (int i = 0; i < samples; ++i) {
    Vector u = rng.normal_vector(n);
    Vector v = rng.normal_vector(n);
    Matrix lu = l_operator(j, u);
    Matrix lv = l_operator(j, v);
    double lnorm = lu.norm();
    Matrix lk = lu;
    for (int k = 1; k <= n && r.nil_algebra; ++k) {
      if (std::abs(lk.trace()) > tol * n * std::pow(lnorm, k) + 1e-300) r.nil_algebra = false;
      lk = lk * lu;
    }
    if ((lu * lv - lv * lu).norm() > tol * lu.norm() * lv.norm()) r.associative = false;
  }
  if (j.has_unit()) r.degree_two = is_degree_two(j, samples, tol, seed);
  return r;
}

struct CentralElement {
  Vector z;
  double residual = 0;             // |L_z - gamma^{-1} sigma| relative
  double commutator_residual = 0;  // max_b |[L_z, L_b]| relative
};

inline CentralElement solve_central_element(const Algebra& j, const TraceForm& gamma,
                                            const TraceForm& sigma, double tol = 1e-8) {
  const Vector& e = j.unit();
  if (gamma.dim() != j.dim() || sigma.dim() != j.dim())
    throw UsageError("trace form dimension does not match the algebra");
  if (!is_nondegenerate(gamma)) throw DegeneracyError("gamma is degenerate");
  Matrix m = gamma.matrix().partialPivLu().solve(sigma.matrix());
  CentralElement out;
  out.z = m * e;
  Matrix lz = l_operator(j, out.z);
  double scale = std::max(1.0, m.norm());
  out.residual = (lz - m).norm() / scale;
  for (int b = 0; b < j.dim(); ++b) {
    Matrix lb = j.basis_operator(b);
    double s = std::max(1e-300, lz.norm() * lb.norm());
    out.commutator_residual = std::max(out.commutator_residual, (lz * lb - lb * lz).norm() / s);
  }
  if (out.residual > tol || out.commutator_residual > tol)
    throw InconsistencyError("gamma^{-1} sigma is not a multiplication by a central element (residual " +
                             std::to_string(std::max(out.residual, out.commutator_residual)) + ")");
  return out;
}

// The form (u, v) -> g(z*u, v) for a central element z.
inline TraceForm form_from_central_element(const Algebra& j, const Matrix& g, const Vector& z) {
  return TraceForm(g * l_operator(j, z));
}

inline ComplexAlgebra complexify(const Algebra& j) {
  std::optional<CVector> unit;
  if (j.has_unit()) unit = j.unit().cast<Complex>();
  return ComplexAlgebra(j.structure_matrix().cast<Complex>(), unit, j.family(), j.labels());
}

// Real form of a complex algebra in coordinates (Re z, Im z).
inline Algebra realify(const ComplexAlgebra& j, std::string family = {}) {
  const int n = j.dim();
  const int m = 2 * n;
  Matrix c = Matrix::Zero(m, static_cast<Eigen::Index>(m) * m);
  auto put = [&](int a, int b, const CVector& v) {
    Eigen::Index col = a + static_cast<Eigen::Index>(m) * b;
    c.col(col).head(n) = v.real();
    c.col(col).tail(n) = v.imag();
  };
  const Complex i(0, 1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      CVector v = j.structure_matrix().col(a + static_cast<Eigen::Index>(n) * b);
      put(a, b, v);
      put(n + a, b, i * v);
      put(a, n + b, i * v);
      put(n + a, n + b, -v);
    }
  std::optional<Vector> unit;
  if (j.has_unit()) {
    Vector u(m);
    u << j.unit().real(), j.unit().imag();
    unit = u;
  }
  std::vector<std::string> labels;
  if (!j.labels().empty()) {
    for (const auto& l : j.labels()) labels.push_back("re " + l);
    for (const auto& l : j.labels()) labels.push_back("im " + l);
  }
  return Algebra(std::move(c), unit, family.empty() ? "realified(" + j.family() + ")" : family, labels);
}

// Complex coordinates z = x_re + i x_im of a realified element.
inline CVector complex_coordinates(const Vector& x) {
  if (x.size() % 2) throw UsageError("realified coordinates must have even length");
  const Eigen::Index n = x.size() / 2;
  CVector z(n);
  for (Eigen::Index k = 0; k < n; ++k) z(k) = Complex(x(k), x(n + k));
  return z;
}

}  // namespace jordan

#endif  // JORDAN_ALGEBRA_HPP
