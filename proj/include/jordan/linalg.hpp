#ifndef JORDAN_LINALG_HPP
#define JORDAN_LINALG_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "jordan/error.hpp"

namespace jordan {

using Complex = std::complex<double>;

template <class Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using MatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorT<double>;
using Matrix = MatrixT<double>;
using CVector = VectorT<Complex>;
using CMatrix = MatrixT<Complex>;

inline constexpr std::uint64_t kDefaultSeed = 42;

// Sign and log-magnitude of a determinant, so degree-2n quantities never
// overflow for the larger catalog algebras.
struct LogDet {
  int sign = 0;  // 0 when the matrix is numerically singular
  double log_abs = -INFINITY;

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

inline LogDet log_det(const Matrix& a) {
  if (a.rows() != a.cols()) throw UsageError("log_det: matrix is not square");
  if (a.rows() == 0) return {1, 0.0};
  Eigen::PartialPivLU<Matrix> lu(a);
  const Matrix& m = lu.matrixLU();
  LogDet out{static_cast<int>(lu.permutationP().determinant()), 0.0};
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double d = m(i, i);
    if (d == 0.0 || !std::isfinite(d)) return {0, -INFINITY};
    if (d < 0) out.sign = -out.sign;
    out.log_abs += std::log(std::abs(d));
  }
  return out;
}

template <class Scalar>
void require_dim(const VectorT<Scalar>& x, Eigen::Index n, const char* what) {
  if (x.size() != n) {
    throw UsageError(std::string(what) + ": expected length " + std::to_string(n) +
                     ", got " + std::to_string(x.size()));
  }
}

// Dense rank-3 tensor T(i,j,k), row-major in (i,j,k).
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

  double max_abs() const {
    double m = 0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  // Largest deviation from full symmetry under index permutations.
  double symmetry_defect() const {
    double m = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) {
          double v = (*this)(i, j, k);
          m = std::max({m, std::abs(v - (*this)(j, i, k)), std::abs(v - (*this)(i, k, j)),
                        std::abs(v - (*this)(k, j, i))});
        }
    return m;
  }

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }
  int n_ = 0;
  std::vector<double> data_;
};

class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n)
      : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }

  double max_abs() const {
    double m = 0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::size_t index(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l;
  }
  int n_ = 0;
  std::vector<double> data_;
};

// Seeded generator for standard-normal sample points.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }
  Vector unit_vector(Eigen::Index n) {
    Vector v = normal_vector(n);
    double norm = v.norm();
    return norm > 0 ? Vector(v / norm) : unit_vector(n);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline double relative_difference(double a, double b) {
  double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

template <class Derived1, class Derived2>
double relative_difference(const Eigen::MatrixBase<Derived1>& a,
                           const Eigen::MatrixBase<Derived2>& b) {
  double scale = std::max(a.norm(), b.norm());
  return scale == 0 ? 0.0 : (a - b).norm() / scale;
}

}  // namespace jordan

#endif  // JORDAN_LINALG_HPP
