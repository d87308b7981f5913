#include "dst/lax.hpp"

#include <algorithm>
#include <numbers>

namespace dst {

namespace {

template <class S>
void check_site(const LatticeState<S>& s, std::size_t n, std::size_t hi) {
  if (n < 1 || n > hi) throw Error(Errc::IndexOutOfRange, "site index out of range");
  (void)s;
}

// M with explicit neighbour values: [[λ/2, q], [r_prev, −λ/2]]
template <class S>
PolyMatrix2<S> m_matrix(const S& q, const S& r_prev) {
  using P = LambdaPoly<S>;
  return {P::linear(S(0), S(0.5)), P(q), P(r_prev), P::linear(S(0), S(-0.5))};
}

template <class S>
Mat2<cplx> m_at(const S& q, const S& r_prev, const cplx& lam) {
  return {lam / 2.0, cplx(q), cplx(r_prev), -lam / 2.0};
}

template <class S>
PolyMatrix2<S> lax_dot(const S& q, const S& r, const S& dq, const S& dr) {
  using P = LambdaPoly<S>;
  return {P(dq * r + q * dr), P(dq), P(dr), P()};
}

}  // namespace

template <class S>
PolyMatrix2<S> lax_L(const LatticeState<S>& s, std::size_t n) {
  check_site(s, n, s.n_sites());
  return lax_L_site(s.q[n - 1], s.r[n - 1]);
}

template <class S>
PolyMatrix2<S> lax_M(const LatticeState<S>& s, std::size_t n,
                     const BoundaryCondition<S>& bc) {
  const std::size_t N = s.n_sites();
  check_site(s, n, N + 1);
  const Closure<S> c = closure(s, bc);
  const S q = n <= N ? s.q[n - 1] : c.q_next;
  const S r = n >= 2 ? s.r[n - 2] : c.r_prev;
  return m_matrix(q, r);
}

template <class S>
PolyMatrix2<S> monodromy(const LatticeState<S>& s) {
  return monodromy_of(s.q, s.r);
}

template <class S>
Mat2<S> boundary_C(const S& xi) {
  if (xi == S(0)) throw Error(Errc::ZeroXi, "xi must be nonzero");
  const S root = principal_sqrt(xi);
  return Mat2<S>::diag(S(1) / root, root);
}

template <class S>
BoundaryK<S> boundary_K(const Open<S>& bc) {
  using P = LambdaPoly<S>;
  const P lam = P::monomial(1);
  return {{P(bc.theta_minus), lam, P(), P(bc.theta_minus)},
          {P(bc.theta_plus), P(), lam, P(bc.theta_plus)}};
}

template <class S>
BoundaryK<S> boundary_K(const BoundaryCondition<S>& bc) {
  const auto* op = std::get_if<Open<S>>(&bc);
  if (!op) throw Error(Errc::WrongRegime, "boundary_K needs the open regime");
  return boundary_K(*op);
}

namespace {

template <class S>
LambdaPoly<S> generator_of(const PolyMatrix2<S>& t, const BoundaryCondition<S>& bc) {
  if (const auto* qp = std::get_if<Quasiperiodic<S>>(&bc)) {
    const Mat2<S> c = boundary_C(qp->xi);
    return LambdaPoly<S>(c.a) * t.a11 + LambdaPoly<S>(c.d) * t.a22;
  }
  if (const auto* op = std::get_if<Open<S>>(&bc)) {
    const BoundaryK<S> k = boundary_K(*op);
    return (k.plus * t * k.minus * adjugate_neg(t)).trace();
  }
  return t.trace();
}

}  // namespace

template <class S>
LambdaPoly<S> generator(const LatticeState<S>& s, const BoundaryCondition<S>& bc) {
  return generator_of(monodromy(s), bc);
}

template <class S>
ConservedSet<S> conserved_coeffs(const LatticeState<S>& s,
                                 const BoundaryCondition<S>& bc) {
  const std::size_t N = s.n_sites();
  ConservedSet<S> out;
  out.regime = regime_name(bc);
  const LambdaPoly<S> g = generator(s, bc);
  out.coeffs = g.coeffs();

  std::vector<S> si(N);
  for (std::size_t i = 0; i < N; ++i) {
    si[i] = s.q[i] * s.r[i];
    out.S_total += si[i];
  }
  if (N >= 2) {
    for (std::size_t i = 0; i + 1 < N; ++i) out.p2 += s.q[i + 1] * s.r[i];
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j) out.p2 += si[i] * si[j];
  }
  out.p2_prime = s.r[N - 1] * s.q[0];
  out.a2 = out.p2;

  // regime constants live in the generator of the empty chain
  const LatticeState<S> vac(std::vector<S>(N, S(0)), std::vector<S>(N, S(0)));
  const LambdaPoly<S> dyn = g - generator(vac, bc);

  if (std::holds_alternative<Open<S>>(bc)) {
    const S sign = N % 2 == 0 ? S(1) : S(-1);
    out.hamiltonian_value = S(0.5) * sign * dyn.coeff(2 * N);
    return out;
  }
  S root_xi = S(1), xi = S(1);
  if (const auto* qp = std::get_if<Quasiperiodic<S>>(&bc)) {
    xi = qp->xi;
    root_xi = principal_sqrt(xi);
  }
  const S Sc = root_xi * dyn.coeff(N - 1);
  if (N == 1) {
    out.hamiltonian_value = xi * Sc - S(0.5) * Sc * Sc;
  } else {
    out.hamiltonian_value = root_xi * dyn.coeff(N - 2) - S(0.5) * Sc * Sc;
  }
  return out;
}

const std::vector<cplx>& lambda_grid() {
  static const std::vector<cplx> grid = [] {
    std::vector<cplx> g;
    for (int k = 0; k < 8; ++k) {
      const double phi = std::numbers::pi * (2.0 * k + 0.37) / 8.0;
      g.push_back(std::polar(1.0, phi));
    }
    for (double x : {0.5, -0.5, 2.0, -2.0}) g.emplace_back(x, 0.0);
    return g;
  }();
  return grid;
}

template <class S>
double lax_consistency_residual(const LatticeState<S>& s,
                                const BoundaryCondition<S>& bc_eom, std::size_t j,
                                const std::optional<BoundaryCondition<S>>& bc_lax) {
  const std::size_t N = s.n_sites();
  check_site(s, j, N);
  const Derivative<S> d = eom(s, bc_eom);
  const BoundaryCondition<S>& bl = bc_lax ? *bc_lax : bc_eom;
  const PolyMatrix2<cplx> L = to_complex(lax_L(s, j));
  const PolyMatrix2<cplx> Ldot = to_complex(
      lax_dot(s.q[j - 1], s.r[j - 1], d.dq[j - 1], d.dr[j - 1]));
  const PolyMatrix2<cplx> Mj = to_complex(lax_M(s, j, bl));
  const PolyMatrix2<cplx> Mj1 = to_complex(lax_M(s, j + 1, bl));
  double res = 0.0;
  for (const cplx& lam : lambda_grid()) {
    const Mat2<cplx> defect = Ldot(lam) - (Mj1(lam) * L(lam) - L(lam) * Mj(lam));
    res = std::max(res, max_norm(defect));
  }
  return res;
}

template <class S>
PolyMatrix2<S> monodromy_derivative(const LatticeState<S>& s,
                                    const BoundaryCondition<S>& bc) {
  const std::size_t N = s.n_sites();
  const Derivative<S> d = eom(s, bc);
  // prefix[n] = L_n ⋯ L_1 (prefix[0] = I); suffix[n] = L_N ⋯ L_{n+1}
  std::vector<PolyMatrix2<S>> prefix(N + 1), suffix(N + 1);
  prefix[0] = PolyMatrix2<S>::identity();
  for (std::size_t n = 1; n <= N; ++n) prefix[n] = lax_L(s, n) * prefix[n - 1];
  suffix[N] = PolyMatrix2<S>::identity();
  for (std::size_t n = N; n >= 1; --n) suffix[n - 1] = suffix[n] * lax_L(s, n);
  PolyMatrix2<S> acc{};
  for (std::size_t n = 1; n <= N; ++n) {
    acc = acc + suffix[n] * lax_dot(s.q[n - 1], s.r[n - 1], d.dq[n - 1], d.dr[n - 1]) *
                    prefix[n - 1];
  }
  return acc;
}

template <class S>
double monodromy_evolution_residual(const LatticeState<S>& s,
                                    const BoundaryCondition<S>& bc) {
  const std::size_t N = s.n_sites();
  const PolyMatrix2<S> t = monodromy(s);
  const PolyMatrix2<S> rhs = lax_M(s, N + 1, bc) * t - t * lax_M(s, 1, bc);
  return coeff_max_norm(monodromy_derivative(s, bc) - rhs);
}

template <class S>
SklyaninResidual<S> sklyanin_condition_residual(const BoundaryCondition<S>& bc,
                                                const LatticeState<S>& s,
                                                const cplx& lam,
                                                const Wiring<S>& wiring) {
  const std::size_t N = s.n_sites();
  Closure<S> c = closure(s, bc);
  if (wiring.q_next) c.q_next = *wiring.q_next;
  if (wiring.r_prev) c.r_prev = *wiring.r_prev;
  SklyaninResidual<S> out;
  if (const auto* op = std::get_if<Open<S>>(&bc)) {
    const BoundaryK<cplx> k = boundary_K(Open<cplx>{cplx(op->theta_minus), cplx(op->theta_plus)});
    const Mat2<cplx> kp = k.plus(lam), km = k.minus(lam);
    const Mat2<cplx> wn = kp * m_at(c.q_next, s.r[N - 1], lam) -
                          m_at(c.q_next, s.r[N - 1], -lam) * kp;
    const Mat2<cplx> w1 = m_at(s.q[0], c.r_prev, lam) * km -
                          km * m_at(s.q[0], c.r_prev, -lam);
    out.plus = max_norm(wn);
    out.minus = max_norm(w1);
    return out;
  }
  if (const auto* qp = std::get_if<Quasiperiodic<S>>(&bc)) {
    const Mat2<cplx> cm = boundary_C(cplx(qp->xi));
    const Mat2<cplx> defect = cm * m_at(c.q_next, s.r[N - 1], lam) -
                              m_at(s.q[0], c.r_prev, lam) * cm;
    out.c = max_norm(defect);
    return out;
  }
  throw Error(Errc::WrongRegime, "Sklyanin conditions need open or quasiperiodic regime");
}

#define DST_INSTANTIATE(S)                                                        \
  template PolyMatrix2<S> lax_L<S>(const LatticeState<S>&, std::size_t);          \
  template PolyMatrix2<S> lax_M<S>(const LatticeState<S>&, std::size_t,           \
                                   const BoundaryCondition<S>&);                  \
  template PolyMatrix2<S> monodromy<S>(const LatticeState<S>&);                   \
  template Mat2<S> boundary_C<S>(const S&);                                       \
  template BoundaryK<S> boundary_K<S>(const Open<S>&);                            \
  template BoundaryK<S> boundary_K<S>(const BoundaryCondition<S>&);               \
  template LambdaPoly<S> generator<S>(const LatticeState<S>&,                     \
                                      const BoundaryCondition<S>&);               \
  template ConservedSet<S> conserved_coeffs<S>(const LatticeState<S>&,            \
                                               const BoundaryCondition<S>&);      \
  template double lax_consistency_residual<S>(                                    \
      const LatticeState<S>&, const BoundaryCondition<S>&, std::size_t,           \
      const std::optional<BoundaryCondition<S>>&);                                \
  template PolyMatrix2<S> monodromy_derivative<S>(const LatticeState<S>&,         \
                                                  const BoundaryCondition<S>&);   \
  template double monodromy_evolution_residual<S>(const LatticeState<S>&,         \
                                                  const BoundaryCondition<S>&);   \
  template SklyaninResidual<S> sklyanin_condition_residual<S>(                    \
      const BoundaryCondition<S>&, const LatticeState<S>&, const cplx&,           \
      const Wiring<S>&);

DST_INSTANTIATE(double)
DST_INSTANTIATE(cplx)
#undef DST_INSTANTIATE

}  // namespace dst
