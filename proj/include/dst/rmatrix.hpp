#pragma once

// Classical r-matrix algebras checked numerically: brackets of Lax/monodromy
// entries by central differences against [r, A⊗B] (+ reflection terms).
//
// Tensor basis e1⊗e1, e1⊗e2, e2⊗e1, e2⊗e2; r(x) = −P/x.

#include <functional>
#include <variant>

#include <Eigen/Dense>

#include "dst/lax.hpp"

namespace dst {

using Tensor4 = Eigen::Matrix<cplx, 4, 4>;

Tensor4 permutation();
Tensor4 kron(const Mat2<cplx>& a, const Mat2<cplx>& b);
/// A ⊗ I and I ⊗ B
Tensor4 first(const Mat2<cplx>& a);
Tensor4 second(const Mat2<cplx>& b);
double max_norm(const Tensor4& t);

/// −P/(λ−μ). Throws CoincidingSpectralParams when λ = μ.
Tensor4 classical_r(const cplx& lambda, const cplx& mu);

template <class S>
using MatObservable = std::function<Mat2<cplx>(const LatticeState<S>&)>;

/// Entry (2a+c, 2b+d) holds {A^{ab}, B^{cd}}.
template <class S>
Tensor4 bracket_table(const MatObservable<S>& A, const MatObservable<S>& B,
                      const LatticeState<S>& s, FdOptions opt = {});

struct LocalLevel {
  std::size_t n, m;  // 1-based sites
};
struct MonodromyLevel {};
using CismLevel = std::variant<LocalLevel, MonodromyLevel>;

/// |{A(λ) ⊗, A(μ)} − [r(λ−μ), A(λ)⊗A(μ)] δ| with A = L_n (local) or T.
template <class S>
double cism1_residual(const LatticeState<S>& s, const cplx& lambda, const cplx& mu,
                      const CismLevel& level, FdOptions opt = {});

struct ReflectionResidual {
  double lambda_variant;  // last factor K¹(λ): the standard classical reflection equation
  double mu_variant;      // last factor K¹(μ), as sometimes printed
};

/// [r(λ−μ), K(λ)⊗K(μ)] + K¹(λ) r(λ+μ) K²(μ) − K²(μ) r(λ+μ) K¹(·).
/// K does not depend on the phase-space point, so there are no brackets.
ReflectionResidual reflection_residual_K(const std::function<Mat2<cplx>(cplx)>& k,
                                         const cplx& lambda, const cplx& mu);

/// U(λ) = T(λ) K−(λ) T⁻¹(−λ), with T⁻¹(−λ) = σ₂Tᵗ(−λ)σ₂ / (−λ)^N.
template <class S>
Mat2<cplx> dressed_U(const LatticeState<S>& s, const Open<S>& bc, const cplx& lambda);

/// CISM-II residual of U:
///   {U(λ) ⊗, U(μ)} − ([r(λ−μ), U(λ)⊗U(μ)] + U¹(λ) r(λ+μ) U²(μ) − U²(μ) r(λ+μ) U¹(λ))
template <class S>
double cism2_residual_U(const LatticeState<S>& s, const Open<S>& bc,
                        const cplx& lambda, const cplx& mu, FdOptions opt = {});

/// Convergence-order probe of the difference engine: the bracket of two smooth
/// non-polynomial observables against its closed form at steps h, h/2, h/4.
struct FdOrderProbe {
  std::vector<double> steps;
  std::vector<double> errors;
  double order;  // log2 of the mean successive error ratio
};

FdOrderProbe fd_order_probe(const LatticeState<double>& s, double h0 = 1e-2);

}  // namespace dst
