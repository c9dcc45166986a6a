#ifndef JORDAN_GEOMETRY_HPP
#define JORDAN_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jordan/algebra.hpp"
#include "jordan/catalog.hpp"
#include "jordan/error.hpp"
#include "jordan/fd.hpp"
#include "jordan/linalg.hpp"

namespace jordan {

// Unital Jordan algebra with a non-degenerate associative form. The
// hypersurfaces it describes are the integral manifolds of the kernel of
// zeta(u) = -gamma(u, x^{-1}).
class ImmersionPair {
 public:
  // With normalize set, gamma is rescaled so that gamma(e,e) = -1.
  ImmersionPair(Algebra algebra, TraceForm gamma, bool normalize = true)
      : algebra_(std::move(algebra)), gamma_(std::move(gamma)) {
    const Vector& e = algebra_.unit();
    if (gamma_.dim() != algebra_.dim()) throw UsageError("trace form dimension does not match the algebra");
    double gee = gamma_(e, e);
    if (normalize) {
      if (std::abs(gee) <= 1e-12 * std::max(1.0, gamma_.matrix().norm()))
        throw UsageError("gamma(e,e) = 0: the pair cannot be normalized");
      gamma_ = gamma_.scaled(-1.0 / gee);
      gee = -1.0;
    }
    validate_trace_form(algebra_, gamma_);
    normalized_ = std::abs(gamma_(e, e) + 1.0) <= 1e-10;
    gamma_lu_ = gamma_.matrix().partialPivLu();
  }

  const Algebra& algebra() const { return algebra_; }
  const TraceForm& gamma() const { return gamma_; }
  const Matrix& gamma_matrix() const { return gamma_.matrix(); }
  bool normalized() const { return normalized_; }
  int dim() const { return algebra_.dim(); }
  const Vector& unit() const { return algebra_.unit(); }
  Vector gamma_solve(const Vector& v) const { return gamma_lu_.solve(v); }
  Matrix gamma_solve(const Matrix& m) const { return gamma_lu_.solve(m); }

 private:
  Algebra algebra_;
  TraceForm gamma_;
  bool normalized_ = false;
  Eigen::PartialPivLU<Matrix> gamma_lu_;
};

// The 1-form zeta and its analytic derivatives at one point. Covectors are
// returned as coordinate vectors: zeta(u) = zeta().dot(u).
class ZetaFrame {
 public:
  ZetaFrame(const ImmersionPair& pair, const Vector& x) : pair_(&pair), x_(x) {
    require_dim(x, pair.dim(), "point");
    if (!is_invertible(pair.algebra(), x).invertible)
      throw DomainError("point is not invertible (det P_x ~ 0)");
    p_ = p_operator(pair.algebra(), x);
    p_lu_ = p_.partialPivLu();
    inverse_ = p_lu_.solve(x);
  }

  const Vector& point() const { return x_; }
  const Vector& inverse() const { return inverse_; }
  const Matrix& p() const { return p_; }

  Vector zeta() const { return -(pair_->gamma_matrix() * inverse_); }
  double zeta(const Vector& u) const { return zeta().dot(u); }

  // gamma P_x^{-1}
  Matrix d_zeta() const { return pair_->gamma_matrix() * p_lu_.solve(Matrix::Identity(x_.size(), x_.size())); }

  // Covector D^2 zeta(., v, w) = -gamma P^{-1} Q(w) P^{-1} v with Q(w) = D_w P.
  Vector d2(const Vector& v, const Vector& w) const {
    Vector pv = p_lu_.solve(v);
    return -(pair_->gamma_matrix() * p_lu_.solve(dp(w, pv)));
  }

  // Covector D^3 zeta(., v, w, s).
  Vector d3(const Vector& v, const Vector& w, const Vector& s) const {
    Vector pv = p_lu_.solve(v);
    Vector a = p_lu_.solve(dp(s, p_lu_.solve(dp(w, pv))));
    Vector b = p_lu_.solve(dp(w, p_lu_.solve(dp(s, pv))));
    Vector c = p_lu_.solve(2.0 * polarized_p_apply(pair_->algebra(), s, w, pv));
    return pair_->gamma_matrix() * (a + b - c);
  }

  // Psi = (D zeta)^{-1} = P gamma^{-1}, applied to a covector.
  Vector psi(const Vector& covector) const { return p_ * pair_->gamma_solve(covector); }

  Tensor3 d2_tensor() const {
    const int n = static_cast<int>(x_.size());
    Tensor3 t(n);
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        Vector col = d2(Vector::Unit(n, b), Vector::Unit(n, c));
        for (int a = 0; a < n; ++a) t(a, b, c) = t(a, c, b) = col(a);
      }
    return t;
  }

  Tensor4 d3_tensor() const {
    const int n = static_cast<int>(x_.size());
    Tensor4 t(n);
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Vector col = d3(Vector::Unit(n, b), Vector::Unit(n, c), Vector::Unit(n, d));
          for (int a = 0; a < n; ++a) t(a, b, c, d) = col(a);
        }
    return t;
  }

  // Difference tensor K(a, b) = -1/2 Psi D^2 zeta(a, b, .).
  Vector difference(const Vector& a, const Vector& b) const { return -0.5 * psi(d2(a, b)); }

  // Condition number of D zeta.
  double condition() const {
    Eigen::JacobiSVD<Matrix> svd(d_zeta());
    const auto& s = svd.singularValues();
    return s.minCoeff() > 0 ? s.maxCoeff() / s.minCoeff() : INFINITY;
  }

  void require_nondegenerate(double max_condition = 1e12) const {
    if (condition() > max_condition) throw DegeneracyError("D zeta is numerically singular at the point");
  }

 private:
  // (D_w P_x) y = 2 P(x, w) y
  Vector dp(const Vector& w, const Vector& y) const { return 2.0 * polarized_p_apply(pair_->algebra(), x_, w, y); }

  const ImmersionPair* pair_;
  Vector x_;
  Matrix p_;
  Eigen::PartialPivLU<Matrix> p_lu_;
  Vector inverse_;
};

inline double zeta(const ImmersionPair& pair, const Vector& x, const Vector& u) {
  require_dim(u, pair.dim(), "tangent vector");
  return ZetaFrame(pair, x).zeta(u);
}
inline Vector zeta_form(const ImmersionPair& pair, const Vector& x) { return ZetaFrame(pair, x).zeta(); }
inline Matrix d_zeta(const ImmersionPair& pair, const Vector& x) { return ZetaFrame(pair, x).d_zeta(); }
inline Tensor3 d2_zeta(const ImmersionPair& pair, const Vector& x) { return ZetaFrame(pair, x).d2_tensor(); }
inline Tensor4 d3_zeta(const ImmersionPair& pair, const Vector& x) { return ZetaFrame(pair, x).d3_tensor(); }

// K(gamma_index, a, b) = component gamma_index of K(e_a, e_b).
inline Tensor3 difference_tensor(const ImmersionPair& pair, const Vector& x) {
  ZetaFrame f(pair, x);
  f.require_nondegenerate();
  const int n = pair.dim();
  Tensor3 k(n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      Vector v = f.difference(Vector::Unit(n, a), Vector::Unit(n, b));
      for (int c = 0; c < n; ++c) k(c, a, b) = k(c, b, a) = v(c);
    }
  return k;
}

struct ResidualOptions {
  int directions = 24;
  std::uint64_t seed = kDefaultSeed;
};

struct ResidualReport {
  double max_abs = 0;
  double rms = 0;
  int samples_used = 0;
  std::map<std::string, double> breakdown;

  void add(double r) {
    max_abs = std::max(max_abs, r);
    rms = std::sqrt((rms * rms * samples_used + r * r) / (samples_used + 1));
    ++samples_used;
  }
};

namespace detail {
constexpr double kTiny = 1e-30;

inline double sum_abs(std::initializer_list<double> v) {
  double s = 0;
  for (double x : v) s += std::abs(x);
  return s;
}
}  // namespace detail

// Residual of D^3 zeta = 1/2 Psi (D^2 zeta (x) D^2 zeta) symmetrized, on
// random direction quadruples, each relative to the sum of term magnitudes.
inline double parallel_cubic_residual(const ImmersionPair& pair, const Vector& x, const ResidualOptions& opt = {}) {
  ZetaFrame f(pair, x);
  f.require_nondegenerate();
  Rng rng(opt.seed);
  const int n = pair.dim();
  double worst = 0;
  for (int i = 0; i < opt.directions; ++i) {
    Vector a = rng.unit_vector(n), b = rng.unit_vector(n), c = rng.unit_vector(n), d = rng.unit_vector(n);
    double lhs = a.dot(f.d3(b, c, d));
    double t1 = 0.5 * f.d2(a, b).dot(f.psi(f.d2(c, d)));
    double t2 = 0.5 * f.d2(a, c).dot(f.psi(f.d2(b, d)));
    double t3 = 0.5 * f.d2(a, d).dot(f.psi(f.d2(b, c)));
    double r = std::abs(lhs - t1 - t2 - t3) / (detail::sum_abs({lhs, t1, t2, t3}) + detail::kTiny);
    worst = std::max(worst, r);
  }
  return worst;
}

// Norm of D^2 zeta(., b, c) Psi^{bc} + 2n zeta, relative to its two parts.
inline double hypersphere_residual(const ImmersionPair& pair, const Vector& x) {
  ZetaFrame f(pair, x);
  f.require_nondegenerate();
  const int n = pair.dim();
  const Matrix ginv = pair.gamma_solve(Matrix(Matrix::Identity(n, n)));
  Vector w = Vector::Zero(n);
  for (int c = 0; c < n; ++c)
    w += 2.0 * polarized_p_apply(pair.algebra(), x, Vector(Vector::Unit(n, c)), Vector(ginv.col(c)));
  Vector contraction = -(pair.gamma_matrix() * f.p().partialPivLu().solve(w));
  Vector z = f.zeta();
  Vector t = contraction + 2.0 * n * z;
  return t.norm() / (contraction.norm() + 2.0 * n * z.norm() + detail::kTiny);
}

inline double quadric_residual(const ImmersionPair& pair, const Vector& x, const ResidualOptions& opt = {}) {
  ZetaFrame f(pair, x);
  f.require_nondegenerate();
  Rng rng(opt.seed);
  const int n = pair.dim();
  const Matrix dz = f.d_zeta();
  const Vector z = f.zeta();
  double worst = 0;
  for (int i = 0; i < opt.directions; ++i) {
    Vector a = rng.unit_vector(n), b = rng.unit_vector(n), c = rng.unit_vector(n);
    double t0 = a.dot(f.d2(b, c));
    double t1 = 2 * a.dot(dz * b) * z.dot(c);
    double t2 = 2 * a.dot(dz * c) * z.dot(b);
    double t3 = 2 * b.dot(dz * c) * z.dot(a);
    double t4 = 4 * z.dot(a) * z.dot(b) * z.dot(c);
    double r = std::abs(t0 + t1 + t2 + t3 + t4) / (detail::sum_abs({t0, t1, t2, t3, t4}) + detail::kTiny);
    worst = std::max(worst, r);
  }
  return worst;
}

// Antisymmetric part of the finite-difference Jacobian of zeta, relative.
// Steps h and h/2 are combined to cancel the O(h^2) truncation term.
inline double closedness_residual(const ImmersionPair& pair, const Vector& x, double h = 1e-5) {
  auto field = [&pair](const Vector& y) { return zeta_form(pair, y); };
  const double step = h * (1 + x.norm());
  Matrix jac = (4 * fd::jacobian(field, x, step / 2) - fd::jacobian(field, x, step)) / 3;
  return (jac - jac.transpose()).norm() / (jac.norm() + detail::kTiny);
}

// Element z with g(u, v) = gamma(z*u, v).
inline Vector central_element_from_pair(const ImmersionPair& pair) {
  if (!pair.normalized()) throw UsageError("central element needs a normalized pair");
  return solve_central_element(pair.algebra(), pair.gamma(), TraceForm(g_matrix(pair.algebra()))).z;
}

// ---------------------------------------------------------------------------
// Potentials

enum class PotentialKind { RealLog, ComplexLog, TruncLog };

inline std::string potential_kind_name(PotentialKind k) {
  switch (k) {
    case PotentialKind::RealLog: return "real-log";
    case PotentialKind::ComplexLog: return "complex-log";
    case PotentialKind::TruncLog: return "trunc-log";
  }
  return "?";
}

inline std::optional<PotentialKind> potential_kind_from_name(const std::string& s) {
  if (s == "real-log") return PotentialKind::RealLog;
  if (s == "complex-log") return PotentialKind::ComplexLog;
  if (s == "trunc-log") return PotentialKind::TruncLog;
  return std::nullopt;
}

// One summand of a potential on one catalog block:
//   real-log    a log(omega / omega(e))
//   complex-log Re(c k Log(base / base(e))), k the det exponent of the block
//   trunc-log   a (log p)(1)
struct PotentialBlock {
  CatalogEntry entry;
  PotentialKind kind = PotentialKind::RealLog;
  Complex coefficient = 1.0;
};

struct PotentialValue {
  double value = 0;
  bool branch_warning = false;  // a complex-log term sits next to the principal cut
};

class PotentialSpec {
 public:
  static constexpr double kBranchTolerance = 1e-6;

  explicit PotentialSpec(std::vector<PotentialBlock> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw SpecError("potential needs at least one block");
    int offset = 0;
    std::vector<Algebra> algebras;
    for (const auto& b : blocks_) {
      const Family fam = b.entry.tag.family;
      if (b.entry.omega.blocks.size() != 1) throw SpecError("potential blocks must be single catalog families");
      if ((b.kind == PotentialKind::TruncLog) != (fam == Family::TruncPoly))
        throw SpecError("trunc-log terms apply exactly to TruncPoly blocks");
      if (b.kind == PotentialKind::ComplexLog && !is_complex_family(fam))
        throw SpecError("complex-log term on a real family " + b.entry.name);
      if (b.kind != PotentialKind::ComplexLog && b.coefficient.imag() != 0)
        throw SpecError("complex coefficient on a real-log term");
      if (b.coefficient == Complex(0)) throw SpecError("zero potential coefficient");
      offsets_.push_back(offset);
      base_at_unit_.push_back(b.entry.omega.blocks.front().base(b.entry.algebra.unit()));
      offset += b.entry.algebra.dim();
      algebras.push_back(b.entry.algebra);
    }
    algebra_ = direct_sum(algebras);
  }

  // The canonical potential of one catalog entry: (1/n) log omega, or
  // (log p)(1) for truncated polynomials.
  static PotentialSpec canonical(const CatalogEntry& entry) {
    if (entry.tag.family == Family::TruncPoly) return PotentialSpec({{entry, PotentialKind::TruncLog, 1.0}});
    return PotentialSpec({{entry, PotentialKind::RealLog, 1.0 / entry.algebra.dim()}});
  }

  const std::vector<PotentialBlock>& blocks() const { return blocks_; }
  const Algebra& algebra() const { return *algebra_; }
  int dim() const { return algebra_->dim(); }
  int offset(std::size_t k) const { return offsets_[k]; }

  double block_homogeneity(std::size_t k) const {
    const auto& b = blocks_[k];
    if (b.kind == PotentialKind::TruncLog) return b.coefficient.real();
    return b.coefficient.real() * b.entry.algebra.dim();
  }
  double homogeneity() const {
    double nu = 0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) nu += block_homogeneity(k);
    return nu;
  }

  // Trace form whose zeta is the gradient of this potential.
  TraceForm gamma() const {
    const int n = dim();
    Matrix gamma = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto& b = blocks_[k];
      const int d = b.entry.algebra.dim();
      Matrix gk;
      switch (b.kind) {
        case PotentialKind::RealLog:
          gk = -b.coefficient.real() * b.entry.g;
          break;
        case PotentialKind::ComplexLog: {
          // c e in realified coordinates, with i (re, im) = (-im, re)
          const Vector& e = b.entry.algebra.unit();
          const int h = d / 2;
          Vector ie(d);
          ie << -e.tail(h), e.head(h);
          Vector z = b.coefficient.real() * e + b.coefficient.imag() * ie;
          gk = -b.entry.g * l_operator(b.entry.algebra, z);
          break;
        }
        case PotentialKind::TruncLog:
          gk = b.coefficient.real() * b.entry.default_gamma.matrix();
          break;
      }
      gamma.block(offsets_[k], offsets_[k], d, d) = gk;
    }
    return TraceForm(gamma);
  }

  // The pair of this potential, normalized when the homogeneity is nonzero.
  ImmersionPair pair() const { return ImmersionPair(*algebra_, gamma(), homogeneity() != 0); }

  bool in_domain(const Vector& x) const {
    require_dim(x, dim(), "potential argument");
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto& b = blocks_[k];
      if (std::abs(b.entry.omega.blocks.front().base(segment(k, x))) == 0) return false;
    }
    return true;
  }

  PotentialValue eval(const Vector& x) const {
    require_dim(x, dim(), "potential argument");
    PotentialValue out;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto& b = blocks_[k];
      const OmegaBlock& ob = b.entry.omega.blocks.front();
      Vector xk = segment(k, x);
      Complex base = ob.base(xk);
      if (std::abs(base) == 0) throw DomainError("potential undefined: block " + b.entry.name + " is singular");
      switch (b.kind) {
        case PotentialKind::RealLog:
          out.value += b.coefficient.real() * ob.omega_exponent *
                       (std::log(std::abs(base)) - std::log(std::abs(base_at_unit_[k])));
          break;
        case PotentialKind::ComplexLog: {
          Complex ratio = base / base_at_unit_[k];
          if (std::numbers::pi - std::abs(std::arg(ratio)) < kBranchTolerance) out.branch_warning = true;
          out.value += (b.coefficient * static_cast<double>(ob.det_exponent) * std::log(ratio)).real();
          break;
        }
        case PotentialKind::TruncLog:
          out.value += b.coefficient.real() * trunc_poly_log_at_one(xk);
          break;
      }
    }
    return out;
  }

  double operator()(const Vector& x) const { return eval(x).value; }

 private:
  Vector segment(std::size_t k, const Vector& x) const {
    return x.segment(offsets_[k], blocks_[k].entry.algebra.dim());
  }

  std::vector<PotentialBlock> blocks_;
  std::vector<int> offsets_;
  std::vector<Complex> base_at_unit_;
  std::optional<Algebra> algebra_;
};

inline PotentialValue potential_eval(const PotentialSpec& spec, const Vector& x) { return spec.eval(x); }

namespace detail {

// Golden-section minimum of f on [lo, hi].
inline double golden_minimum(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double a = hi - r * (hi - lo), b = lo + r * (hi - lo);
  double fa = f(a), fb = f(b);
  while (hi - lo > tol) {
    if (fa < fb) {
      hi = b, b = a, fb = fa;
      a = hi - r * (hi - lo), fa = f(a);
    } else {
      lo = a, a = b, fa = fb;
      b = lo + r * (hi - lo), fb = f(b);
    }
  }
  return (lo + hi) / 2;
}

}  // namespace detail

// Integral of zeta along a path sigma: [0,1] -> J with derivative dsigma,
// by composite 8-point Gauss-Legendre quadrature. The path must stay in the
// invertible set with a constant sign of det P: checked at every node, and at
// a refined minimum of log|det P| between nodes, since crossings of the
// singular set can keep the sign of det P.
inline double potential_path_integral(const ImmersionPair& pair, const std::function<Vector(double)>& sigma,
                                      const std::function<Vector(double)>& dsigma, int panels = 64) {
  static constexpr std::array<double, 8> nodes = {
      -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
      0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
  static constexpr std::array<double, 8> weights = {
      0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
      0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  if (panels < 1) throw UsageError("path integral needs at least one panel");
  const Algebra& j = pair.algebra();
  const int start_sign = is_invertible(j, sigma(0.0)).det.sign;
  auto check = [&](double t) {
    InvertibilityCertificate cert = is_invertible(j, sigma(t));
    if (!cert.invertible || cert.det.sign != start_sign)
      throw PathError("path leaves the invertible component near t = " + std::to_string(t));
    return cert.det.log_abs;
  };
  std::vector<double> ts{0.0}, logdet{check(0.0)};
  double total = 0;
  const double width = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * width;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      double t = mid + 0.5 * width * nodes[i];
      ts.push_back(t);
      logdet.push_back(check(t));
      total += 0.5 * width * weights[i] * ZetaFrame(pair, sigma(t)).zeta(dsigma(t));
    }
  }
  ts.push_back(1.0);
  logdet.push_back(check(1.0));
  auto log_abs = [&](double t) { return log_det(p_operator(j, sigma(t))).log_abs; };
  for (std::size_t k = 1; k + 1 < ts.size(); ++k)
    if (logdet[k] < logdet[k - 1] && logdet[k] <= logdet[k + 1])
      check(detail::golden_minimum(log_abs, ts[k - 1], ts[k + 1], 1e-12));
  return total;
}

// Straight segment from base to x.
inline double potential_line_integral(const ImmersionPair& pair, const Vector& x, const Vector& base,
                                      int panels = 64) {
  require_dim(x, pair.dim(), "line integral endpoint");
  require_dim(base, pair.dim(), "line integral base point");
  const Vector dir = x - base;
  return potential_path_integral(
      pair, [&](double t) -> Vector { return base + t * dir; }, [&](double) -> Vector { return dir; }, panels);
}

// ---------------------------------------------------------------------------
// Potentials given only as black-box functions.

struct PotentialSampler {
  std::function<double(const Vector&)> value;
  std::function<bool(const Vector&)> in_domain;  // empty: everywhere
  bool contains(const Vector& x) const { return !in_domain || in_domain(x); }
};

inline PotentialSampler sampler_from(const PotentialSpec& spec) {
  return {[spec](const Vector& x) { return spec(x); }, [spec](const Vector& x) { return spec.in_domain(x); }};
}

// Estimate nu from F(2p) - F(p) and confirm F(a p) = nu log a + F(p).
inline double homogeneity_degree(const PotentialSampler& s, const Vector& p, double tol = 1e-9) {
  const double f = s.value(p);
  const double nu = (s.value(2.0 * p) - f) / std::log(2.0);
  for (double a : {0.5, 3.0}) {
    if (!s.contains(a * p)) throw InputError("scaled point leaves the potential's domain");
    double err = std::abs(s.value(a * p) - f - nu * std::log(a));
    if (err > tol * (1 + std::abs(f) + std::abs(nu * std::log(a))))
      throw InputError("potential is not logarithmically homogeneous (defect " + std::to_string(err) + ")");
  }
  if (std::abs(nu) < 1e-12) throw InputError("potential has zero homogeneity");
  return nu;
}

// Step sizes used when derivatives of a sampled potential feed reconstructed
// algebras; Richardson extrapolation lets the steps stay large enough for
// roundoff to be harmless.
inline fd::Steps reconstruction_steps() { return {1e-3, 1e-3, 2e-3, 2e-3, true}; }

struct Reconstruction {
  Algebra algebra;
  TraceForm gamma;     // Hessian of F / nu at the point
  double homogeneity;  // nu
  double unit_defect;  // max_b |K(e_b, point) - e_b|
};

inline Reconstruction algebra_from_potential(const PotentialSampler& sampler, const Vector& point,
                                             const fd::Steps& steps = reconstruction_steps()) {
  if (!sampler.contains(point)) throw DomainError("reconstruction point outside the potential's domain");
  const double nu = homogeneity_degree(sampler, point);
  fd::Field f = [&](const Vector& x) { return sampler.value(x) / nu; };
  const int n = static_cast<int>(point.size());
  Matrix h = fd::hessian(f, point, steps);
  if (!is_nondegenerate(TraceForm(h), 1e-10)) throw DegeneracyError("Hessian of the potential is degenerate");
  Tensor3 t = fd::third(f, point, steps);
  Matrix hinv = h.inverse();
  Matrix c = Matrix::Zero(n, static_cast<Eigen::Index>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Vector tab(n);
      for (int d = 0; d < n; ++d) tab(d) = t(a, b, d);
      c.col(a + static_cast<Eigen::Index>(n) * b) = -0.5 * hinv * tab;
    }
  Algebra alg(std::move(c), point, "reconstructed", {}, -1.0);
  Matrix lp = l_operator(alg, point);
  double defect = (lp - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  return {std::move(alg), TraceForm(h), nu, defect};
}

// Tensors on the hypersurface pulled back to the cone, from derivatives of
// F / nu; each should vanish on the position vector.
struct PullbackTensors {
  Matrix metric;        // F'' + F' F'
  Tensor3 cubic;        // F''' + 2 F''F' (3 terms) + 4 F'F'F'
  Vector tchebycheff;   // F''' F''^{-1} + 2n F'
  Tensor4 nabla_cubic;  // F'''' - 1/2 F''^{-1}(F''' F''' (3 terms))
  double metric_on_position = 0;
  double cubic_on_position = 0;
  double nabla_on_position = 0;
};

namespace detail {

// F'''' - 1/2 H^{rs} (F_abr F_cds + F_acr F_bds + F_adr F_bcs)
inline Tensor4 levi_civita_fourth(const Matrix& hinv, const Tensor3& t3, const Tensor4& t4) {
  const int n = t3.dim();
  // u(a,b,s) = sum_r H^{rs} T(a,b,r)
  Tensor3 u(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int s = 0; s < n; ++s) {
        double v = 0;
        for (int r = 0; r < n; ++r) v += hinv(r, s) * t3(a, b, r);
        u(a, b, s) = v;
      }
  Tensor4 out(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = 0;
          for (int k = 0; k < n; ++k) s += u(a, b, k) * t3(c, d, k) + u(a, c, k) * t3(b, d, k) + u(a, d, k) * t3(b, c, k);
          out(a, b, c, d) = t4(a, b, c, d) - 0.5 * s;
        }
  return out;
}

}  // namespace detail

inline PullbackTensors pullback_tensors(const PotentialSampler& sampler, const Vector& point,
                                        const fd::Steps& steps = reconstruction_steps()) {
  if (!sampler.contains(point)) throw DomainError("point outside the potential's domain");
  const double nu = homogeneity_degree(sampler, point);
  fd::Field f = [&](const Vector& x) { return sampler.value(x) / nu; };
  const int n = static_cast<int>(point.size());
  Vector g = fd::gradient(f, point, steps);
  Matrix h = fd::hessian(f, point, steps);
  if (!is_nondegenerate(TraceForm(h), 1e-10)) throw DegeneracyError("Hessian of the potential is degenerate");
  Tensor3 t3 = fd::third(f, point, steps);
  Tensor4 t4 = fd::fourth(f, point, steps);
  Matrix hinv = h.inverse();

  PullbackTensors out;
  out.metric = h + g * g.transpose();
  out.cubic = Tensor3(n);
  out.tchebycheff = 2.0 * n * g;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        out.cubic(a, b, c) = t3(a, b, c) + 2 * (h(a, b) * g(c) + h(a, c) * g(b) + h(b, c) * g(a)) +
                             4 * g(a) * g(b) * g(c);
        out.tchebycheff(a) += t3(a, b, c) * hinv(b, c);
      }
  out.nabla_cubic = detail::levi_civita_fourth(hinv, t3, t4);

  out.metric_on_position = (out.metric * point).cwiseAbs().maxCoeff();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0;
      for (int c = 0; c < n; ++c) s += out.cubic(a, b, c) * point(c);
      out.cubic_on_position = std::max(out.cubic_on_position, std::abs(s));
      for (int c = 0; c < n; ++c) {
        double s4 = 0;
        for (int d = 0; d < n; ++d) s4 += out.nabla_cubic(a, b, c, d) * point(d);
        out.nabla_on_position = std::max(out.nabla_on_position, std::abs(s4));
      }
    }
  return out;
}

// Finite-difference checks of D_u x^{-1} = -P_x^{-1} u and
// D_u log|det P_x| = 2 g(x^{-1}, u) on random directions.
inline ResidualReport logderivative_identities(const ImmersionPair& pair, const Vector& x,
                                               const ResidualOptions& opt = {}, double h = 1e-5) {
  const Algebra& j = pair.algebra();
  ZetaFrame f(pair, x);
  const Matrix g = g_matrix(j);
  const double step = h * (1 + x.norm());
  Rng rng(opt.seed);
  ResidualReport report;
  double inv_worst = 0, det_worst = 0;
  auto logdet = [&](const Vector& y) { return log_det(p_operator(j, y)).log_abs; };
  for (int i = 0; i < opt.directions; ++i) {
    Vector u = rng.unit_vector(j.dim());
    Vector fd_inv = (inverse(j, x + step * u) - inverse(j, x - step * u)) / (2 * step);
    Vector an_inv = -f.p().partialPivLu().solve(u);
    double r1 = (fd_inv - an_inv).norm() / (an_inv.norm() + detail::kTiny);
    double fd_det = (logdet(x + step * u) - logdet(x - step * u)) / (2 * step);
    double an_det = 2 * f.inverse().dot(g * u);
    double r2 = std::abs(fd_det - an_det) / (std::abs(an_det) + 1.0);
    inv_worst = std::max(inv_worst, r1);
    det_worst = std::max(det_worst, r2);
    report.add(std::max(r1, r2));
  }
  report.breakdown["inverse_derivative"] = inv_worst;
  report.breakdown["log_det_derivative"] = det_worst;
  return report;
}

// ---------------------------------------------------------------------------
// Graph potentials of nilpotent algebras

enum class GraphKind { Cubic, AssociativeSeries, JordanSeries };

inline std::string graph_kind_name(GraphKind k) {
  switch (k) {
    case GraphKind::Cubic: return "cubic";
    case GraphKind::AssociativeSeries: return "assoc-series";
    case GraphKind::JordanSeries: return "jordan-series";
  }
  return "?";
}

struct GraphValue {
  double value = 0;
  int last_term = 1;  // largest k whose term was nonzero
};

class GraphPotential {
 public:
  GraphPotential(Algebra algebra, TraceForm gamma, GraphKind kind)
      : algebra_(std::move(algebra)), gamma_(std::move(gamma)), kind_(kind) {
    StructuralReport s = structural_predicates(algebra_);
    if (!s.nil_algebra) throw PreconditionError("graph potential needs a nil algebra");
    if (kind_ == GraphKind::AssociativeSeries && !s.associative)
      throw PreconditionError("assoc-series potential needs an associative algebra");
    if (kind_ == GraphKind::JordanSeries && !check_jordan_identity(algebra_).pass)
      throw PreconditionError("jordan-series potential needs a Jordan algebra");
    if (gamma_.dim() != algebra_.dim()) throw UsageError("trace form dimension does not match the algebra");
    if (associativity_defect(algebra_, gamma_) > 1e-9) throw PreconditionError("gamma is not associative");
    if (!is_nondegenerate(gamma_)) throw PreconditionError("gamma is degenerate");
  }

  const Algebra& algebra() const { return algebra_; }
  const TraceForm& gamma() const { return gamma_; }
  GraphKind kind() const { return kind_; }

  GraphValue eval(const Vector& x) const {
    require_dim(x, algebra_.dim(), "graph potential argument");
    GraphValue out;
    const int n = algebra_.dim();
    const int last = kind_ == GraphKind::Cubic ? 3 : n + 1;
    Vector xk = x;  // x^{k-1}
    const double scale = std::max(1.0, x.norm());
    double factorial = 1;
    for (int k = 2; k <= last; ++k) {
      factorial *= k;
      if (k > 2) xk = mul(algebra_, x, xk);
      if (xk.norm() <= 1e-14 * std::pow(scale, k - 1)) break;
      double coeff = 0;
      switch (kind_) {
        case GraphKind::Cubic: coeff = k == 2 ? 0.5 : -1.0 / 3.0; break;
        case GraphKind::AssociativeSeries: coeff = std::pow(-2.0, k - 2) / factorial; break;
        case GraphKind::JordanSeries: coeff = (k % 2 ? -1.0 : 1.0) / k; break;
      }
      out.value += coeff * gamma_(x, xk);
      out.last_term = k;
    }
    return out;
  }

  double operator()(const Vector& x) const { return eval(x).value; }

 private:
  Algebra algebra_;
  TraceForm gamma_;
  GraphKind kind_;
};

inline GraphValue graph_potential(const Algebra& j, const TraceForm& gamma, GraphKind kind, const Vector& x) {
  return GraphPotential(j, gamma, kind).eval(x);
}

// Max |F'''' - 1/2 F''^{-1}(F''' F''')| for a graph function: zero exactly
// when the graph has parallel cubic form for the Levi-Civita connection.
inline double graph_parallel_residual(const fd::Field& f, const Vector& x,
                                      const fd::Steps& steps = reconstruction_steps()) {
  Matrix h = fd::hessian(f, x, steps);
  if (!is_nondegenerate(TraceForm(h), 1e-10)) throw DegeneracyError("graph Hessian is degenerate");
  Tensor4 r = detail::levi_civita_fourth(h.inverse(), fd::third(f, x, steps), fd::fourth(f, x, steps));
  return r.max_abs();
}

// The same algebra in a new basis: columns of b are the new basis vectors.
inline std::pair<Algebra, TraceForm> change_basis(const Algebra& j, const TraceForm& gamma, const Matrix& b) {
  const int n = j.dim();
  if (b.rows() != n || b.cols() != n) throw UsageError("basis matrix has the wrong size");
  Eigen::PartialPivLU<Matrix> lu(b);
  Matrix c(n, static_cast<Eigen::Index>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int d = 0; d < n; ++d)
      c.col(a + static_cast<Eigen::Index>(n) * d) = lu.solve(mul(j, Vector(b.col(a)), Vector(b.col(d))));
  std::optional<Vector> unit;
  if (j.has_unit()) unit = lu.solve(j.unit());
  return {Algebra(std::move(c), unit, j.family()), TraceForm(b.transpose() * gamma.matrix() * b)};
}

}  // namespace jordan

#endif  // JORDAN_GEOMETRY_HPP
