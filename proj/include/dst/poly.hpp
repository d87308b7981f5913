#pragma once

// Dense univariate polynomials in the spectral parameter and 2x2 matrices
// over them. Generic over any commutative ring with 0/1 constructible from
// int (double, std::complex<double>, mpq_class).

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

#include "dst/common.hpp"

namespace dst {

template <class S>
class LambdaPoly {
 public:
  LambdaPoly() = default;
  /// Coefficients lowest degree first.
  explicit LambdaPoly(std::vector<S> coeffs) : c_(std::move(coeffs)) { trim(); }
  LambdaPoly(S constant) : c_{std::move(constant)} { trim(); }  // NOLINT

  static LambdaPoly monomial(std::size_t k, S coeff = S(1)) {
    std::vector<S> c(k + 1, S(0));
    c[k] = std::move(coeff);
    return LambdaPoly(std::move(c));
  }
  /// λ + c
  static LambdaPoly linear(S c0, S c1 = S(1)) {
    return LambdaPoly(std::vector<S>{std::move(c0), std::move(c1)});
  }

  bool is_zero() const { return c_.empty(); }
  /// Degree; -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<S>& coeffs() const { return c_; }
  S coeff(std::size_t k) const { return k < c_.size() ? c_[k] : S(0); }

  template <class T>
  T operator()(const T& x) const {
    T acc = T(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + T(*it);
    return acc;
  }

  /// p(-λ)
  LambdaPoly reflected() const {
    std::vector<S> c = c_;
    for (std::size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
    return LambdaPoly(std::move(c));
  }

  LambdaPoly& operator+=(const LambdaPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), S(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
  }
  LambdaPoly& operator-=(const LambdaPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), S(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
  }
  friend LambdaPoly operator+(LambdaPoly a, const LambdaPoly& b) { return a += b; }
  friend LambdaPoly operator-(LambdaPoly a, const LambdaPoly& b) { return a -= b; }
  friend LambdaPoly operator-(const LambdaPoly& a) {
    std::vector<S> c = a.c_;
    for (auto& x : c) x = -x;
    return LambdaPoly(std::move(c));
  }
  friend LambdaPoly operator*(const LambdaPoly& a, const LambdaPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<S> c(a.c_.size() + b.c_.size() - 1, S(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return LambdaPoly(std::move(c));
  }
  friend bool operator==(const LambdaPoly& a, const LambdaPoly& b) { return a.c_ == b.c_; }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == S(0)) c_.pop_back();
  }
  std::vector<S> c_;
};

/// Max-norm of the coefficient vector.
template <class S>
double coeff_max_norm(const LambdaPoly<S>& p) {
  double m = 0.0;
  for (const auto& c : p.coeffs()) m = std::max(m, magnitude(c));
  return m;
}

/// Constant 2x2 matrix, row-major [[a, b], [c, d]].
template <class S>
struct Mat2 {
  S a{}, b{}, c{}, d{};

  static Mat2 identity() { return {S(1), S(0), S(0), S(1)}; }
  static Mat2 diag(S x, S y) { return {x, S(0), S(0), y}; }

  S& at(int i, int j) { return i == 0 ? (j == 0 ? a : b) : (j == 0 ? c : d); }
  const S& at(int i, int j) const { return i == 0 ? (j == 0 ? a : b) : (j == 0 ? c : d); }

  S trace() const { return a + d; }
  S det() const { return a * d - b * c; }
  /// Adjugate [[d, -b], [-c, a]].
  Mat2 adjugate() const { return {d, -b, -c, a}; }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend Mat2 operator-(const Mat2& x, const Mat2& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend Mat2 operator*(const S& s, const Mat2& x) {
    return {s * x.a, s * x.b, s * x.c, s * x.d};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

template <class S>
double max_norm(const Mat2<S>& m) {
  return std::max({magnitude(m.a), magnitude(m.b), magnitude(m.c), magnitude(m.d)});
}

template <class S>
Mat2<S> inverse(const Mat2<S>& m) {
  const S det = m.det();
  return (S(1) / det) * m.adjugate();
}

/// 2x2 matrix of λ-polynomials.
template <class S>
struct PolyMatrix2 {
  using Poly = LambdaPoly<S>;
  Poly a11, a12, a21, a22;

  static PolyMatrix2 identity() { return {Poly(S(1)), Poly(), Poly(), Poly(S(1))}; }
  static PolyMatrix2 constant(const Mat2<S>& m) { return {Poly(m.a), Poly(m.b), Poly(m.c), Poly(m.d)}; }

  Poly& at(int i, int j) { return i == 0 ? (j == 0 ? a11 : a12) : (j == 0 ? a21 : a22); }
  const Poly& at(int i, int j) const {
    return i == 0 ? (j == 0 ? a11 : a12) : (j == 0 ? a21 : a22);
  }

  Poly trace() const { return a11 + a22; }
  Poly det() const { return a11 * a22 - a12 * a21; }
  int degree() const {
    return std::max({a11.degree(), a12.degree(), a21.degree(), a22.degree()});
  }

  template <class T>
  Mat2<T> operator()(const T& x) const {
    return {a11(x), a12(x), a21(x), a22(x)};
  }
  /// M(-λ)
  PolyMatrix2 reflected() const {
    return {a11.reflected(), a12.reflected(), a21.reflected(), a22.reflected()};
  }

  friend PolyMatrix2 operator*(const PolyMatrix2& x, const PolyMatrix2& y) {
    return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22,
            x.a21 * y.a11 + x.a22 * y.a21, x.a21 * y.a12 + x.a22 * y.a22};
  }
  friend PolyMatrix2 operator+(const PolyMatrix2& x, const PolyMatrix2& y) {
    return {x.a11 + y.a11, x.a12 + y.a12, x.a21 + y.a21, x.a22 + y.a22};
  }
  friend PolyMatrix2 operator-(const PolyMatrix2& x, const PolyMatrix2& y) {
    return {x.a11 - y.a11, x.a12 - y.a12, x.a21 - y.a21, x.a22 - y.a22};
  }
  friend PolyMatrix2 operator*(const Poly& s, const PolyMatrix2& x) {
    return {s * x.a11, s * x.a12, s * x.a21, s * x.a22};
  }
  friend bool operator==(const PolyMatrix2&, const PolyMatrix2&) = default;
};

template <class S>
double coeff_max_norm(const PolyMatrix2<S>& m) {
  return std::max({coeff_max_norm(m.a11), coeff_max_norm(m.a12),
                   coeff_max_norm(m.a21), coeff_max_norm(m.a22)});
}

}  // namespace dst
