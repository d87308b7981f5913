#pragma once

// Lax matrices, monodromy, boundary matrices and the generating polynomials
// of conserved quantities.
//
//   L_n(λ) = [[λ + q_n r_n, q_n], [r_n, 1]]
//   M_n(λ) = [[λ/2, q_n], [r_{n−1}, −λ/2]]
//   T(λ)   = L_N ⋯ L_1            (det T = λ^N)

#include <optional>
#include <utility>
#include <vector>

#include "dst/lattice.hpp"
#include "dst/poly.hpp"

namespace dst {

/// L_n built from a single pair; generic over any ring (double, cplx, mpq_class).
template <class S>
PolyMatrix2<S> lax_L_site(const S& q, const S& r) {
  using P = LambdaPoly<S>;
  return {P::linear(q * r), P(q), P(r), P(S(1))};
}

/// L_N ⋯ L_1 from raw coordinate vectors (exact path for rational states).
template <class S>
PolyMatrix2<S> monodromy_of(const std::vector<S>& q, const std::vector<S>& r) {
  if (q.size() != r.size() || q.empty())
    throw Error(Errc::InvalidArgument, "monodromy needs matching q, r with N >= 1");
  PolyMatrix2<S> t = lax_L_site(q[0], r[0]);
  for (std::size_t i = 1; i < q.size(); ++i) t = lax_L_site(q[i], r[i]) * t;
  return t;
}

/// σ₂ Tᵗ(−λ) σ₂ = [[t22(−λ), −t12(−λ)], [−t21(−λ), t11(−λ)]]
template <class S>
PolyMatrix2<S> adjugate_neg(const PolyMatrix2<S>& t) {
  return {t.a22.reflected(), -t.a12.reflected(), -t.a21.reflected(),
          t.a11.reflected()};
}

/// n is 1-based, 1 ≤ n ≤ N.
template <class S>
PolyMatrix2<S> lax_L(const LatticeState<S>& s, std::size_t n);

/// n is 1-based, 1 ≤ n ≤ N+1; out-of-range neighbours come from the closure
/// (n = 1 and n = N+1 are the end matrices W_1, W_{N+1} in the open chain).
template <class S>
PolyMatrix2<S> lax_M(const LatticeState<S>& s, std::size_t n,
                     const BoundaryCondition<S>& bc);

template <class S>
PolyMatrix2<S> monodromy(const LatticeState<S>& s);

/// diag(ξ^{−1/2}, ξ^{1/2}), principal branch.
template <class S>
Mat2<S> boundary_C(const S& xi);

/// K− = [[θ−, λ], [0, θ−]],  K+ = [[θ+, 0], [λ, θ+]]
template <class S>
struct BoundaryK {
  PolyMatrix2<S> minus;
  PolyMatrix2<S> plus;
};

template <class S>
BoundaryK<S> boundary_K(const Open<S>& bc);
/// Throws WrongRegime unless bc is Open.
template <class S>
BoundaryK<S> boundary_K(const BoundaryCondition<S>& bc);

/// Periodic: tr T.  Quasiperiodic: tr[C T].
/// Open: tr[K+ T K− σ₂Tᵗ(−λ)σ₂], which is (−λ)^N times tr[K+ T K− T⁻¹(−λ)];
/// degree 2N+2, leading coefficient (−1)^N.
template <class S>
LambdaPoly<S> generator(const LatticeState<S>& s, const BoundaryCondition<S>& bc);

template <class S>
struct ConservedSet {
  std::string regime;
  std::vector<S> coeffs;  // generator coefficients, lowest degree first
  S S_total{};            // Σ q_i r_i
  S p2{};                 // Σ_{i<N} q_{i+1} r_i + Σ_{i<j} s_i s_j
  S p2_prime{};           // r_N q_1
  S a2{};                 // equal to p2 as a closed form
  S hamiltonian_value{};  // recovered from coefficients only
};

/// Closed-form S, p2, p2', a2 plus the Hamiltonian reassembled from the
/// generator's coefficients (after removing the q = r = 0 generator, which
/// carries the regime constants):
///   periodic/quasi:  H = ξ^{1/2} c_{N−2} − ½ (ξ^{1/2} c_{N−1})²
///   open:            H = ½ (−1)^N c_{2N}
/// For N = 1 there is no λ^{N−2} term; p2 = 0, p2' = S and H = ξ S − ½ S².
template <class S>
ConservedSet<S> conserved_coeffs(const LatticeState<S>& s,
                                 const BoundaryCondition<S>& bc);

/// λ sample grid: 8 points on the unit circle (offset off the axes) and ±1/2, ±2.
const std::vector<cplx>& lambda_grid();

/// max over the grid of |dL_j/dt − (M_{j+1} L_j − L_j M_j)|, with dL_j/dt from
/// eom(s, bc_eom) and the M's built with bc_lax (defaults to bc_eom).
template <class S>
double lax_consistency_residual(
    const LatticeState<S>& s, const BoundaryCondition<S>& bc_eom, std::size_t j,
    const std::optional<BoundaryCondition<S>>& bc_lax = std::nullopt);

/// Coefficient max-norm of Σ_n L_N⋯L̇_n⋯L_1 − (M_{N+1} T − T M_1).
template <class S>
double monodromy_evolution_residual(const LatticeState<S>& s,
                                    const BoundaryCondition<S>& bc);

/// dT/dt assembled from the equations of motion.
template <class S>
PolyMatrix2<S> monodromy_derivative(const LatticeState<S>& s,
                                    const BoundaryCondition<S>& bc);

/// Optional replacement of the closure values used to build W_1 / W_{N+1}.
template <class S>
struct Wiring {
  std::optional<S> q_next;
  std::optional<S> r_prev;
};

template <class S>
struct SklyaninResidual {
  std::optional<double> plus;   // |K+(λ)W_{N+1}(λ) − W_{N+1}(−λ)K+(λ)|
  std::optional<double> minus;  // |W_1(λ)K−(λ) − K−(λ)W_1(−λ)|
  std::optional<double> c;      // |C M_{N+1} − M_1 C|
};

/// Open: plus/minus. Quasiperiodic: c. Periodic: WrongRegime.
template <class S>
SklyaninResidual<S> sklyanin_condition_residual(const BoundaryCondition<S>& bc,
                                                const LatticeState<S>& s,
                                                const cplx& lambda,
                                                const Wiring<S>& wiring = {});

/// Promote real coefficients to complex.
template <class S>
LambdaPoly<cplx> to_complex(const LambdaPoly<S>& p) {
  std::vector<cplx> c;
  for (const auto& x : p.coeffs()) c.push_back(cplx(x));
  return LambdaPoly<cplx>(std::move(c));
}
template <class S>
PolyMatrix2<cplx> to_complex(const PolyMatrix2<S>& m) {
  return {to_complex(m.a11), to_complex(m.a12), to_complex(m.a21), to_complex(m.a22)};
}

}  // namespace dst
