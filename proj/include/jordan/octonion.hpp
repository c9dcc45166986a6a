#ifndef JORDAN_OCTONION_HPP
#define JORDAN_OCTONION_HPP

#include <array>
#include <cmath>
#include <string>

#include "jordan/error.hpp"

namespace jordan {

// Signed multiplication table of a hypercomplex algebra on basis e_0 = 1,
// e_1, ..., e_{size-1}: e_a e_b = sign[a][b] * e_{index[a][b]}.
struct HypercomplexTable {
  int size = 0;
  std::array<std::array<int, 8>, 8> index{};
  std::array<std::array<int, 8>, 8> sign{};
  std::array<int, 8> conj_sign{};  // conjugation keeps 1 and negates the rest
  std::array<int, 8> norm_sign{};  // n(a) = sum norm_sign[i] a_i^2
  std::string name;
};

namespace detail {

inline void finish_table(HypercomplexTable& t) {
  for (int i = 0; i < t.size; ++i) {
    t.conj_sign[i] = i == 0 ? 1 : -1;
    if (t.index[i][i] != 0) throw InconsistencyError("basis element squares outside the reals");
    t.norm_sign[i] = t.conj_sign[i] * t.sign[i][i];
  }
}

inline HypercomplexTable quaternion_table_impl() {
  HypercomplexTable t;
  t.size = 4;
  t.name = "quaternion";
  // 1, i, j, k
  const int idx[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  const int sgn[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      t.index[a][b] = idx[a][b];
      t.sign[a][b] = sgn[a][b];
    }
  finish_table(t);
  return t;
}

// Octonions as pairs of quaternions, (a,b)(c,d) = (ac - conj(d) b, d a + b conj(c)).
inline HypercomplexTable cayley_table_impl() {
  const HypercomplexTable q = quaternion_table_impl();
  using Quat = std::array<double, 4>;
  auto qmul = [&](const Quat& x, const Quat& y) {
    Quat r{};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) r[q.index[a][b]] += q.sign[a][b] * x[a] * y[b];
    return r;
  };
  auto qconj = [](Quat x) {
    for (int i = 1; i < 4; ++i) x[i] = -x[i];
    return x;
  };
  HypercomplexTable t;
  t.size = 8;
  t.name = "cayley-dickson octonion";
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      Quat x1{}, x2{}, y1{}, y2{};
      (a < 4 ? x1 : x2)[a % 4] = 1;
      (b < 4 ? y1 : y2)[b % 4] = 1;
      Quat lo = qmul(x1, y1), t2 = qmul(qconj(y2), x2);
      Quat hi = qmul(y2, x1), t4 = qmul(x2, qconj(y1));
      std::array<double, 8> r{};
      for (int i = 0; i < 4; ++i) {
        r[i] = lo[i] - t2[i];
        r[4 + i] = hi[i] + t4[i];
      }
      for (int i = 0; i < 8; ++i)
        if (r[i] != 0) {
          t.index[a][b] = i;
          t.sign[a][b] = r[i] > 0 ? 1 : -1;
        }
    }
  finish_table(t);
  return t;
}

// Split octonions on the basis 1, j, k, jk, l, jl, kl, (jk)l generated by
// three units with j^2 = k^2 = l^2 = 1.
inline HypercomplexTable split_table_impl() {
  HypercomplexTable t;
  t.size = 8;
  t.name = "split octonion";
  // Entries are +-(1 + basis index); row a, column b gives e_a e_b.
  const int table[8][8] = {
      {1, 2, 3, 4, 5, 6, 7, 8},          // 1
      {2, 1, 4, 3, 6, 5, -8, -7},        // j
      {3, -4, 1, -2, 7, 8, 5, 6},        // k
      {4, -3, 2, -1, 8, 7, -6, -5},      // jk
      {5, -6, -7, -8, 1, -2, -3, -4},    // l
      {6, -5, -8, -7, 2, -1, 4, 3},      // jl
      {7, 8, -5, 6, 3, -4, -1, -2},      // kl
      {8, 7, -6, 5, 4, -3, 2, 1},        // (jk)l
  };
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      t.index[a][b] = std::abs(table[a][b]) - 1;
      t.sign[a][b] = table[a][b] > 0 ? 1 : -1;
    }
  finish_table(t);
  return t;
}

}  // namespace detail

inline const HypercomplexTable& quaternion_table() {
  static const HypercomplexTable t = detail::quaternion_table_impl();
  return t;
}
inline const HypercomplexTable& cayley_octonion_table() {
  static const HypercomplexTable t = detail::cayley_table_impl();
  return t;
}
inline const HypercomplexTable& split_octonion_table() {
  static const HypercomplexTable t = detail::split_table_impl();
  return t;
}

// Element of an 8-dimensional hypercomplex algebra with coefficients in T
// (double for the real forms, std::complex<double> for the complexification).
template <class T>
class Octonion {
 public:
  explicit Octonion(const HypercomplexTable* table = &cayley_octonion_table()) : table_(table) {
    c_.fill(T(0));
  }
  Octonion(const HypercomplexTable* table, const std::array<T, 8>& c) : c_(c), table_(table) {}

  static Octonion scalar(const HypercomplexTable* table, T s) {
    Octonion o(table);
    o.c_[0] = s;
    return o;
  }

  T& operator[](int i) { return c_[i]; }
  const T& operator[](int i) const { return c_[i]; }
  const HypercomplexTable* table() const { return table_; }

  Octonion conj() const {
    Octonion o(*this);
    for (int i = 0; i < 8; ++i) o.c_[i] *= T(table_->conj_sign[i]);
    return o;
  }
  // n(a) = a conj(a), bilinear in the coefficients (not a modulus).
  T norm() const {
    T s(0);
    for (int i = 0; i < 8; ++i) s += T(table_->norm_sign[i]) * c_[i] * c_[i];
    return s;
  }
  // a + conj(a)
  T trace() const { return T(2) * c_[0]; }

  Octonion operator+(const Octonion& o) const {
    Octonion r(*this);
    for (int i = 0; i < 8; ++i) r.c_[i] += o.c_[i];
    return r;
  }
  Octonion operator-(const Octonion& o) const {
    Octonion r(*this);
    for (int i = 0; i < 8; ++i) r.c_[i] -= o.c_[i];
    return r;
  }
  Octonion operator*(T s) const {
    Octonion r(*this);
    for (auto& v : r.c_) v *= s;
    return r;
  }
  Octonion operator*(const Octonion& o) const {
    Octonion r(table_);
    for (int a = 0; a < 8; ++a) {
      if (c_[a] == T(0)) continue;
      for (int b = 0; b < 8; ++b)
        r.c_[table_->index[a][b]] += T(table_->sign[a][b]) * c_[a] * o.c_[b];
    }
    return r;
  }

 private:
  std::array<T, 8> c_;
  const HypercomplexTable* table_;
};

}  // namespace jordan

#endif  // JORDAN_OCTONION_HPP
