#pragma once

// Quantum DST chain over the exact Weyl engine.
//
//   L_n(λ) = [[λ − η q_n ∂_n, q_n], [−η ∂_n, 1]],   T = L_N ⋯ L_1
//   R(x)   = x·I + η P            (the usual I + ηP/x with the denominator cleared)
//   U(λ)   = T(λ) K−(λ − η/2, ξ−) σ₂Tᵗ(−λ)σ₂ = [[A, B], [C, D]]
//   τ(λ)   = tr[K+(λ + η/2, ξ+) U(λ)]
//
// τ commutes with itself only with the K+ argument shifted by +η/2; with that
// shift τ = ξ+(A + D) + (λ + η/2) B holds literally.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dst/weyl.hpp"

namespace dst {

struct QParams {
  int n = 1;
  mpq_class eta = 1;
  mpq_class xi_minus = 0;
  mpq_class xi_plus = 0;
};

/// Spectral variable slot: 0 = λ, 1 = μ.
OpMatrix qlax(int site, const QParams& p, int var = 0);
OpMatrix qmonodromy(const QParams& p, int var = 0);
/// [[t22(−v), −t12(−v)], [−t21(−v), t11(−v)]]; operator factors are not reordered.
OpMatrix sigma2_transpose_neg(const OpMatrix& t, int var);

/// [[ξ, v + s], [0, ξ]] and [[ξ, 0], [v + s, ξ]] as constant-operator matrices.
OpMatrix qK_minus(int n, int var, const mpq_class& shift, const mpq_class& xi);
OpMatrix qK_plus(int n, int var, const mpq_class& shift, const mpq_class& xi);

/// (aλ + bμ + c)·I₄ + η'P
OpMatrix r_cleared(int n, const mpq_class& a, const mpq_class& b, const mpq_class& c,
                   const mpq_class& eta);

OpMatrix qU(const QParams& p, int var = 0);
OpPoly qtau(const QParams& p, int var = 0);
/// τ with an arbitrary K+ shift (for probing).
OpPoly qtau_shifted(const QParams& p, const mpq_class& kplus_shift, int var = 0);

/// Throws CostGuard when n exceeds the limit and force is off.
void cost_guard(const QParams& p, int limit, bool force, const char* what);

/// R(λ−μ) T¹(λ) T²(μ) = T²(μ) T¹(λ) R(λ−μ). eta_rhs replaces η in the right-hand R only.
ExactCheck rtt_check(const QParams& p, bool force = false,
                     const std::optional<mpq_class>& eta_rhs = std::nullopt);

/// R(λ−μ) K−¹(λ) R(λ+μ) K−²(μ) = K−²(μ) R(λ+μ) K−¹(λ) R(λ−μ)
ExactCheck reflection_K_minus(const QParams& p);
/// R(−λ+μ) K+¹ᵗ(λ+s) R(−λ−μ−2η) K+²ᵗ(μ+s) = K+²ᵗ(μ+s) R(−λ−μ−2η) K+¹ᵗ(λ+s) R(−λ+μ).
/// Holds for s = η (K+ taken in the shifted variable); s = 0 is the literal reading.
ExactCheck reflection_K_plus(const QParams& p, const mpq_class& shift);
/// R(λ−μ) U¹(λ) R(λ+μ−η) U²(μ) = U²(μ) R(λ+μ−η) U¹(λ) R(λ−μ)
ExactCheck reflection_U(const QParams& p, bool force = false);

/// [τ(λ), τ(μ)] = 0
ExactCheck tau_commutativity(const QParams& p, bool force = false);
ExactCheck tau_commutativity_shifted(const QParams& p, const mpq_class& kplus_shift,
                                     bool force = false);
/// τ = ξ+(A + D) + (λ + η/2) B
ExactCheck tau_decomposition(const QParams& p);

struct OrderingMatch {
  std::string name;
  bool match;
};

struct HqReport {
  WeylOp extracted{1};            // (−1)^N [λ^{2N}] τ / 2
  std::vector<OrderingMatch> orderings;
  std::string matched;            // first matching ordering
  WeylOp witness{1};              // difference for the first candidate when nothing matches
  mpq_class leading_sign = 0;     // [λ^{2N+2}] τ (a scalar)
  int tau_degree = 0;
};

/// Compares (−1)^N [λ^{2N}] τ / 2 with
///   Σ q_{i+1} r_i − ½ Σ (q_i r_i)² − η²/8 + ξ+ r_N + ξ− q_1
/// for each ordering of (q_i r_i)². Throws NoOrderingMatches (witness in the message).
HqReport hq_extract(const QParams& p, bool force = false);

/// Ĥ_q with the given ordering of (q_i r_i)²: "qrqr", "qqrr", "rqrq", "rrqq", "sym".
WeylOp hq_candidate(const QParams& p, const std::string& ordering);

/// Classical symbol of the extracted Ĥ_q extrapolated to η → 0 (exactly, from
/// η, η/2, η/3 with a fourth point confirming the quadratic η-dependence),
/// against Σ q_{i+1} r_i − ½ Σ q_i² r_i² + ξ− q_1 + ξ+ r_N. Symbol layout: ∂ slots count r.
struct ClassicalLimit {
  bool quadratic_in_eta;
  bool matches_classical;
  WeylOp limit{1};
};
ClassicalLimit hq_classical_limit(const QParams& p, bool force = false);

struct Abcd {
  OpPoly A{1}, B{1}, C{1}, D{1}, Dstar{1};
};
/// Entries of U plus D*(λ) = 2λD(λ) − ηA(λ).
Abcd abcd_operators(const QParams& p, int var = 0);

/// [B(λ), B(μ)] = 0
ExactCheck check_BB(const QParams& p, bool force = false);
/// (λ−μ)(λ+μ)2μ A(λ)B(μ) = 2μ(λ−μ−η)(λ+μ−η) B(μ)A(λ) + η(2μ−η)(λ+μ) B(λ)A(μ) − η(λ−μ) B(λ)D*(μ)
ExactCheck check_AB(const QParams& p, bool force = false);

enum class DBVariant {
  Corrected,     // first coefficient (λ−μ+η)(λ+μ+η)/((λ−μ)(λ+μ))
  Printed,       // first coefficient (λ−μ+η)(λ+μ−η)/((λ−μ)(λ+μ))
  DropFactor,    // corrected, but without the (2λ+η) factors (negative control)
};
/// D*(λ)B(μ) relation, cleared by (λ−μ)(λ+μ)2μ.
ExactCheck check_DB(const QParams& p, DBVariant v = DBVariant::Corrected, bool force = false);

/// Leading structure of A, D, B against the asymptotic forms
///   A ~ (−1)^N r_N {λ^{2N} + (S + η/2) λ^{2N−1}},  D ~ (−1)^N r_N {λ^{2N} + (S − η/2) λ^{2N−1}},
///   B = (−1)^N (λ − η/2){λ^{2N} + …}
struct Asymptotics {
  bool A_leading, A_next, D_leading, D_next, B_degree, B_leading, B_vanishes_at_half_eta;
};
Asymptotics abcd_asymptotics(const QParams& p);

/// Exact matrices of a λ-polynomial operator on homogeneous polynomials of
/// degree m in n variables, one matrix per power of λ.
struct DegreeRep {
  int n = 1, m = 0;
  std::vector<QExp> basis;                                // lexicographic
  std::vector<std::vector<std::vector<mpq_class>>> coeff;  // [power][row][col]
  Eigen::MatrixXcd evaluate(const cplx& lambda) const;
  Eigen::MatrixXcd power(std::size_t k) const;
};

std::vector<QExp> degree_basis(int n, int m);
/// Throws DegreeNotPreserved if op moves a basis vector out of degree m.
DegreeRep rep_on_degree(const OpPoly& op, int n, int m);

}  // namespace dst
