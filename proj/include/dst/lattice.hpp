#pragma once

// Phase space, equations of motion and Hamiltonians of the discrete
// self-trapping lattice
//
//   q̇_n = q_{n+1} − q_n² r_n,   ṙ_n = −r_{n−1} + q_n r_n²
//
// under periodic, quasiperiodic (twist ξ) and open (θ−, θ+) closures.

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "dst/common.hpp"

namespace dst {

template <class S>
struct LatticeState {
  std::vector<S> q;
  std::vector<S> r;

  LatticeState() = default;
  LatticeState(std::vector<S> q_, std::vector<S> r_);

  std::size_t n_sites() const { return q.size(); }
  /// Throws InvalidArgument unless lengths match, N >= 1 and all entries are finite.
  void validate() const;
  /// Coordinates flattened as (q_1..q_N, r_1..r_N).
  std::vector<S> flat() const;
  static LatticeState from_flat(const std::vector<S>& z);
};

/// Random state with every q_n, r_n uniform in [lo, hi) (real and imaginary
/// parts independently for complex scalars).
template <class S>
LatticeState<S> random_state(std::size_t n, Rng& rng, double lo, double hi);

struct Periodic {};

template <class S>
struct Quasiperiodic {
  S xi;
};

template <class S>
struct Open {
  S theta_minus;
  S theta_plus;
};

template <class S>
using BoundaryCondition = std::variant<Periodic, Quasiperiodic<S>, Open<S>>;

template <class S>
std::string regime_name(const BoundaryCondition<S>& bc);

/// Values of the out-of-range neighbours q_{N+1} and r_0 fixed by the closure.
template <class S>
struct Closure {
  S q_next;  // q_{N+1}
  S r_prev;  // r_0
};

/// Periodic: (q_1, r_N). Quasiperiodic: (ξ q_1, ξ r_N), from C M_{N+1} = M_1 C
/// with C = diag(ξ^{-1/2}, ξ^{1/2}). Open: (θ+, θ−).
template <class S>
Closure<S> closure(const LatticeState<S>& s, const BoundaryCondition<S>& bc);

template <class S>
struct Derivative {
  std::vector<S> dq;
  std::vector<S> dr;
};

template <class S>
Derivative<S> eom(const LatticeState<S>& s, const BoundaryCondition<S>& bc);

/// Periodic:  ½ Σ_n (q_{n+1} r_n + q_n r_{n−1} − q_n² r_n²)
/// Quasi:     Σ_{i<N} q_{i+1} r_i − ½ Σ q_i² r_i² + ξ r_N q_1
/// Open:      Σ_{i<N} q_{i+1} r_i − ½ Σ q_i² r_i² + q_1 θ− + r_N θ+
///
/// The quasiperiodic Hamiltonian is usually written with a global ξ^{-1/2}
/// factor; it is dropped here (a time rescaling) so that the flow of H is
/// exactly the closure q_{N+1} = ξ q_1, r_0 = ξ r_N used by eom().
template <class S>
S hamiltonian(const LatticeState<S>& s, const BoundaryCondition<S>& bc);

template <class S>
struct Observable {
  std::string name;
  std::function<S(const LatticeState<S>&)> eval;
};

struct FdOptions {
  /// Step is rel_step * max(1, |coordinate|).
  double rel_step = 1e-5;
};

/// Central-difference gradient of f: (∂f/∂q_1..∂f/∂q_N, ∂f/∂r_1..∂f/∂r_N).
template <class S>
std::vector<S> fd_gradient(const std::function<S(const LatticeState<S>&)>& f,
                           const LatticeState<S>& s, FdOptions opt = {});

/// {f, g} = Σ_n (∂f/∂q_n ∂g/∂r_n − ∂f/∂r_n ∂g/∂q_n), derivatives by central
/// differences. Throws NonFiniteDerivative.
template <class S>
S poisson_bracket(const Observable<S>& f, const Observable<S>& g,
                  const LatticeState<S>& s, FdOptions opt = {});

/// max_n |eom − (∂H/∂r_n, −∂H/∂q_n)|.
template <class S>
double flow_consistency_residual(const LatticeState<S>& s,
                                 const BoundaryCondition<S>& bc,
                                 FdOptions opt = {});

/// One classical RK4 step. Throws NonFiniteState on blow-up.
template <class S>
LatticeState<S> step_rk4(const LatticeState<S>& s,
                         const BoundaryCondition<S>& bc, double dt);

}  // namespace dst
