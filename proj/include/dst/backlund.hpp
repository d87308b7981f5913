#pragma once

// Bäcklund transformation (x, X) ↦ (y, Y) of the periodic / quasiperiodic
// chain, generated by
//
//   G_σ(x, y) = Σ_i [(x_i − y_{i+1})/y_i + σ log((x_i − y_{i+1})/y_i)],
//   X_i = −∂G/∂x_i,  Y_i = ∂G/∂y_i,  y_{N+1} = ξ y_1,  X_0 = ξ X_N.
//
// The dressing matrix is g(λ; s, S) = [[1, s], [−S, λ − s S]]. Every local
// identity below holds with the s-slot filled by −y (not +y); see
// bt_local_identity_residual.

#include <optional>
#include <variant>
#include <vector>

#include "dst/lax.hpp"

namespace dst {

/// [[1, s], [−S, λ−σ−sS]]; det = λ−σ.
template <class S>
Mat2<S> g_matrix(const S& lambda, const S& sigma, const S& s, const S& S_);

struct NewtonOptions {
  int max_iter = 50;
  double tol = 1e-12;
  int continuation_steps = 10;
};

template <class S>
using BTClosure = std::variant<Periodic, Quasiperiodic<S>>;

template <class S>
struct BTParams {
  S sigma{};
  BTClosure<S> closure = Periodic{};
  NewtonOptions newton{};
  /// Start Newton at the target σ from this guess instead of continuing from σ = 0.
  std::optional<std::vector<S>> initial_guess;
};

template <class S>
S closure_xi(const BTClosure<S>& c);

template <class S>
struct BTResult {
  std::vector<S> y;
  std::vector<S> Y;
  double newton_residual = 0.0;  // max_i |F_i| / (|X_i| + |1/y_i| + |σ/(x_i − y_{i+1})|)
  int steps_used = 0;            // total Newton iterations
};

/// Solves F_i(y) = X_i + 1/y_i + σ/(x_i − y_{i+1}) = 0 (state.q = x, state.r = X).
template <class S>
BTResult<S> bt_solve(const LatticeState<S>& x, const BTParams<S>& p);

/// y_{N+1} and X_0 implied by a closure.
template <class S>
struct BTBoundary {
  S y_next;  // y_{N+1}
  S X_prev;  // X_0
};

template <class S>
BTBoundary<S> bt_boundary(const std::vector<S>& y, const std::vector<S>& X, const S& xi);

/// G_σ itself. Real mode throws LogBranch on a nonpositive log argument.
template <class S>
S generating_function(const std::vector<S>& x, const std::vector<S>& y,
                      const S& sigma, const S& xi);

/// Closed-form (∂G/∂x_1.., ∂G/∂y_1..).
template <class S>
std::vector<S> generating_gradient(const std::vector<S>& x, const std::vector<S>& y,
                                   const S& sigma, const S& xi);

/// max_i |X_i + ∂G/∂x_i|, |Y_i − ∂G/∂y_i|.
template <class S>
double bt_generating_check(const std::vector<S>& x, const std::vector<S>& X,
                           const std::vector<S>& y, const std::vector<S>& Y,
                           const S& sigma, const S& xi = S(1));

/// |closed-form gradient − central differences of G| (step 1e-6 relative).
template <class S>
double generating_gradient_fd_check(const std::vector<S>& x, const std::vector<S>& y,
                                    const S& sigma, const S& xi = S(1));

/// max over the grid of |g(λ−σ; −y_{i+1}, X_i) L(λ; x_i, X_i) − L(λ; y_i, Y_i) g(λ−σ; −y_i, X_{i−1})|,
/// with Y_i = X_{i−1} + (x_i − y_{i+1}) X_i / y_i.
template <class S>
double bt_local_identity_residual(const S& x_i, const S& X_i, const S& y_i,
                                  const S& y_next, const S& X_prev, const S& sigma,
                                  const std::vector<cplx>& grid = lambda_grid());

template <class S>
struct InvarianceResidual {
  double generator_diff;  // max_k |c_k(x) − c_k(y)|
  double closure_defect;  // max over grid |g(λ−σ; −y_1, X_0) C g⁻¹(λ−σ; −y_{N+1}, X_N) − C|
};

template <class S>
InvarianceResidual<S> bt_invariance_residual(const LatticeState<S>& x,
                                             const BTResult<S>& res,
                                             const BTParams<S>& p);
/// Same with y_{N+1}, X_0 supplied explicitly (to probe broken closures).
template <class S>
InvarianceResidual<S> bt_invariance_residual(const LatticeState<S>& x,
                                             const BTResult<S>& res,
                                             const BTParams<S>& p,
                                             const BTBoundary<S>& ends);

/// |Dᵀ Ω D − Ω| for the finite-difference Jacobian D of (x, X) ↦ (y, Y).
template <class S>
double bt_symplectic_residual(const LatticeState<S>& x, const BTParams<S>& p,
                              double step = 1e-6);

/// |Dᵀ Ω D − Ω|, D a 2N×2N Jacobian in (q.., r..) ordering.
template <class S>
double symplectic_defect(const std::vector<std::vector<S>>& D);

struct VInputs {
  cplx y1, y_next, X0, XN, sigma, theta_minus, theta_plus;
};

struct VCoeffs {
  cplx a, b, d;                            // V+
  cplx A1, A0, delta, beta, B0, C0;        // V−
};

/// a = y_{N+1} − θ+, d = −σθ+, b = y_{N+1}(2θ+ − y_{N+1});
/// A1 = X0, A0 = −(σX0 + θ− − y1 X0²), δ = σθ−, β = 1, C0 = X0², B0 = −(y1 X0 − σ)² + 2θ− y1.
VCoeffs v_coefficients(const VInputs& in);

/// −λ/(λ+σ) [[a + d/λ, b], [1, −a + d/λ]]
Mat2<cplx> v_plus(const VCoeffs& c, const cplx& lambda, const cplx& sigma);
/// −λ/(λ−σ) [[λA1 + A0 + δ/λ, βλ² + B0], [C0, λA1 − A0 + δ/λ]]
Mat2<cplx> v_minus(const VCoeffs& c, const cplx& lambda, const cplx& sigma);

struct DressingResidual {
  double plus;   // g_{N+1}(−λ−σ) V+ g_{N+1}⁻¹(λ−σ) − K+
  double minus;  // g_1(λ−σ) V− g_1⁻¹(−λ−σ) − K−   (K− = [[θ−, λ], [0, θ−]])
};

DressingResidual v_dressing_residual(const VInputs& in, const VCoeffs& c,
                                     const std::vector<cplx>& grid = lambda_grid());
inline DressingResidual v_dressing_residual(const VInputs& in,
                                            const std::vector<cplx>& grid = lambda_grid()) {
  return v_dressing_residual(in, v_coefficients(in), grid);
}

/// tr[V+ T(x) V− T(x)⁻¹(−λ)] against tr[K+ T(y) K− T(y)⁻¹(−λ)] on the grid,
/// relative to max(1, |rhs|), for a periodic/quasiperiodic BT result.
template <class S>
double v_composite_residual(const LatticeState<S>& x, const BTResult<S>& res,
                            const BTParams<S>& p, const cplx& theta_minus,
                            const cplx& theta_plus,
                            const std::vector<cplx>& grid = lambda_grid());

}  // namespace dst
