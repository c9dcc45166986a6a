#ifndef JORDAN_FD_HPP
#define JORDAN_FD_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "jordan/linalg.hpp"

// Central finite differences of scalar fields, used as an independent check
// on analytic derivatives.
namespace jordan::fd {

using Field = std::function<double(const Vector&)>;

struct Steps {
  double first = 1e-5;
  double second = 1e-5;
  double third = 1e-3;
  double fourth = 1e-3;
  bool richardson = false;  // combine steps h and h/2 to cancel the O(h^2) term

  // Steps relative to the point: h * (1 + |x|).
  Steps at(const Vector& x) const {
    double s = 1.0 + x.norm();
    return {first * s, second * s, third * s, fourth * s, richardson};
  }
};

// Composition of central differences along the listed coordinate axes (with
// repetition); k axes use 2^k evaluations.
inline double composed_difference(const Field& f, const Vector& x, const std::vector<int>& axes, double h) {
  const int k = static_cast<int>(axes.size());
  double sum = 0;
  Vector y(x.size());
  for (int mask = 0; mask < (1 << k); ++mask) {
    y = x;
    int sign = 1;
    for (int i = 0; i < k; ++i) {
      if (mask & (1 << i)) {
        y(axes[static_cast<std::size_t>(i)]) -= h;
        sign = -sign;
      } else {
        y(axes[static_cast<std::size_t>(i)]) += h;
      }
    }
    sum += sign * f(y);
  }
  return sum / std::pow(2 * h, k);
}

inline double partial(const Field& f, const Vector& x, const std::vector<int>& axes, double h,
                      bool richardson) {
  double coarse = composed_difference(f, x, axes, h);
  if (!richardson) return coarse;
  double fine = composed_difference(f, x, axes, h / 2);
  return (4 * fine - coarse) / 3;
}

// Directional derivative (d/ds) f(x + s v) at s = 0.
inline double directional(const Field& f, const Vector& x, const Vector& v, double h) {
  return (f(x + h * v) - f(x - h * v)) / (2 * h);
}

inline Vector gradient(const Field& f, const Vector& x, const Steps& steps = {}) {
  const Steps s = steps.at(x);
  Vector g(x.size());
  for (int a = 0; a < x.size(); ++a) g(a) = partial(f, x, {a}, s.first, s.richardson);
  return g;
}

inline Matrix hessian(const Field& f, const Vector& x, const Steps& steps = {}) {
  const Steps s = steps.at(x);
  const int n = static_cast<int>(x.size());
  Matrix h(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) h(a, b) = h(b, a) = partial(f, x, {a, b}, s.second, s.richardson);
  return h;
}

inline Tensor3 third(const Field& f, const Vector& x, const Steps& steps = {}) {
  const Steps s = steps.at(x);
  const int n = static_cast<int>(x.size());
  Tensor3 t(n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = b; c < n; ++c) {
        double v = partial(f, x, {a, b, c}, s.third, s.richardson);
        const std::array<int, 3> i{a, b, c};
        for (auto [p, q, r] : {std::array<int, 3>{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}})
          t(i[p], i[q], i[r]) = v;
      }
  return t;
}

inline Tensor4 fourth(const Field& f, const Vector& x, const Steps& steps = {}) {
  const Steps s = steps.at(x);
  const int n = static_cast<int>(x.size());
  Tensor4 t(n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = b; c < n; ++c)
        for (int d = c; d < n; ++d) {
          double v = partial(f, x, {a, b, c, d}, s.fourth, s.richardson);
          std::array<int, 4> i{a, b, c, d};
          std::sort(i.begin(), i.end());
          do {
            t(i[0], i[1], i[2], i[3]) = v;
          } while (std::next_permutation(i.begin(), i.end()));
        }
  return t;
}

// Jacobian of a vector field by central differences, column b = d/dx_b.
inline Matrix jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h) {
  const int n = static_cast<int>(x.size());
  Matrix jac;
  for (int b = 0; b < n; ++b) {
    Vector xp = x, xm = x;
    xp(b) += h;
    xm(b) -= h;
    Vector col = (f(xp) - f(xm)) / (2 * h);
    if (b == 0) jac.resize(col.size(), n);
    jac.col(b) = col;
  }
  return jac;
}

}  // namespace jordan::fd

#endif  // JORDAN_FD_HPP
