#pragma once

// Normal-ordered Weyl algebra over ℚ: finite sums c · ∏ q_i^{a_i} ∂_i^{b_i}
// with every q to the left of every ∂, [∂_i, q_j] = δ_ij. Momenta are
// r_i = −η ∂_i, so [q_i, r_j] = η δ_ij.
//
// On top of it: polynomials in two commuting spectral variables (λ, μ) with
// operator coefficients, and small dense matrices of those.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "dst/common.hpp"

namespace dst {

inline constexpr int kMaxSites = 8;

/// Exponent multi-index: e[i] = power of q_i, e[kMaxSites + i] = power of ∂_i.
struct Mono {
  std::array<std::uint8_t, 2 * kMaxSites> e{};
  auto operator<=>(const Mono&) const = default;
  int q(int i) const { return e[i]; }
  int d(int i) const { return e[kMaxSites + i]; }
};

class WeylOp {
 public:
  using Terms = std::map<Mono, mpq_class>;

  explicit WeylOp(int n_sites = 1);
  static WeylOp constant(int n, const mpq_class& c);
  static WeylOp q(int n, int i);                          // 0-based site
  static WeylOp d(int n, int i);                          // ∂_i
  static WeylOp r(int n, int i, const mpq_class& eta);    // −η ∂_i

  int n_sites() const { return n_; }
  bool is_zero() const { return terms_.empty(); }
  const Terms& terms() const { return terms_; }
  mpq_class constant_term() const;
  /// Adds c · monomial, dropping zeros.
  void add_term(const Mono& m, const mpq_class& c);

  WeylOp& operator+=(const WeylOp& o);
  WeylOp& operator-=(const WeylOp& o);
  WeylOp& operator*=(const mpq_class& c);
  friend WeylOp operator+(WeylOp a, const WeylOp& b) { return a += b; }
  friend WeylOp operator-(WeylOp a, const WeylOp& b) { return a -= b; }
  friend WeylOp operator-(WeylOp a) { return a *= mpq_class(-1); }
  friend WeylOp operator*(WeylOp a, const mpq_class& c) { return a *= c; }
  friend WeylOp operator*(const mpq_class& c, WeylOp a) { return a *= c; }
  friend WeylOp operator*(const WeylOp& a, const WeylOp& b);
  friend bool operator==(const WeylOp& a, const WeylOp& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

  std::string to_string() const;

 private:
  int n_;
  Terms terms_;
};

/// Exact product, re-normal-ordered via ∂^b q^c = Σ_k C(b,k) c!/(c−k)! q^{c−k} ∂^{b−k}.
WeylOp weyl_mul(const WeylOp& a, const WeylOp& b);
WeylOp commutator(const WeylOp& a, const WeylOp& b);

/// Commutative polynomials in q_1..q_N (the representation space).
using QExp = std::array<std::uint8_t, kMaxSites>;
using QPoly = std::map<QExp, mpq_class>;

/// op applied to p (∂ acting as differentiation).
QPoly apply(const WeylOp& op, const QPoly& p, int n_sites);

/// Classical symbol: q^a ∂^b ↦ (−1/η)^{|b|} q^a r^b, returned with the same
/// exponent layout (the ∂ slots now count powers of r).
WeylOp symbol(const WeylOp& op, const mpq_class& eta);

/// Polynomial in (λ, μ) with operator coefficients; key = (deg λ, deg μ).
class OpPoly {
 public:
  using Key = std::pair<int, int>;
  using Terms = std::map<Key, WeylOp>;

  explicit OpPoly(int n_sites = 1) : n_(n_sites) {}
  static OpPoly constant(const WeylOp& op);
  static OpPoly scalar(int n, const mpq_class& c);
  /// a·λ + b·μ + c
  static OpPoly linear(int n, const mpq_class& a, const mpq_class& b, const mpq_class& c);
  /// The spectral variable v (0 = λ, 1 = μ) times c.
  static OpPoly var(int n, int v, const mpq_class& c = 1);

  int n_sites() const { return n_; }
  bool is_zero() const { return terms_.empty(); }
  const Terms& terms() const { return terms_; }
  WeylOp coeff(int dl, int dm = 0) const;
  /// Highest power of the given variable (−1 if zero).
  int degree(int v = 0) const;
  void add(const Key& k, const WeylOp& op);

  OpPoly& operator+=(const OpPoly& o);
  OpPoly& operator-=(const OpPoly& o);
  OpPoly& operator*=(const mpq_class& c);
  friend OpPoly operator+(OpPoly a, const OpPoly& b) { return a += b; }
  friend OpPoly operator-(OpPoly a, const OpPoly& b) { return a -= b; }
  friend OpPoly operator*(OpPoly a, const mpq_class& c) { return a *= c; }
  friend OpPoly operator*(const OpPoly& a, const OpPoly& b);
  friend bool operator==(const OpPoly& a, const OpPoly& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

  /// v ↦ −v
  OpPoly negate_var(int v) const;
  /// λ ↔ μ
  OpPoly swap_vars() const;
  /// Substitute the given variable by a rational value.
  OpPoly eval_var(int v, const mpq_class& x) const;

 private:
  int n_;
  Terms terms_;
};

OpPoly commutator(const OpPoly& a, const OpPoly& b);

/// Dense rows×cols matrix of OpPoly.
class OpMatrix {
 public:
  OpMatrix(int rows, int cols, int n_sites);
  static OpMatrix identity(int dim, int n_sites);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int n_sites() const { return n_; }
  OpPoly& operator()(int i, int j) { return e_[i * cols_ + j]; }
  const OpPoly& operator()(int i, int j) const { return e_[i * cols_ + j]; }

  OpPoly trace() const;
  OpMatrix transpose() const;  // no reordering of operator factors
  OpMatrix negate_var(int v) const;

  friend OpMatrix operator*(const OpMatrix& a, const OpMatrix& b);
  friend OpMatrix operator+(const OpMatrix& a, const OpMatrix& b);
  friend OpMatrix operator-(const OpMatrix& a, const OpMatrix& b);
  friend bool operator==(const OpMatrix& a, const OpMatrix& b) { return a.e_ == b.e_; }

 private:
  int rows_, cols_, n_;
  std::vector<OpPoly> e_;
};

/// A ⊗ I and I ⊗ A for 2×2 A (basis e1⊗e1, e1⊗e2, e2⊗e1, e2⊗e2).
OpMatrix embed_first(const OpMatrix& a);
OpMatrix embed_second(const OpMatrix& a);

/// Outcome of an exact identity check; witness describes the first mismatch.
struct ExactCheck {
  bool pass = true;
  std::string witness;
};

ExactCheck compare(const OpMatrix& lhs, const OpMatrix& rhs);
ExactCheck compare(const OpPoly& lhs, const OpPoly& rhs);

std::string to_string(const mpq_class& x);

}  // namespace dst
