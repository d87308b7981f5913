#include "dst/lattice.hpp"

#include <algorithm>

namespace dst {

template <class S>
LatticeState<S>::LatticeState(std::vector<S> q_, std::vector<S> r_)
    : q(std::move(q_)), r(std::move(r_)) {
  validate();
}

template <class S>
void LatticeState<S>::validate() const {
  if (q.empty()) throw Error(Errc::InvalidArgument, "state needs N >= 1 sites");
  if (q.size() != r.size())
    throw Error(Errc::InvalidArgument, "q and r lengths differ");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!is_finite(q[i]) || !is_finite(r[i]))
      throw Error(Errc::InvalidArgument, "state entries must be finite");
  }
}

template <class S>
std::vector<S> LatticeState<S>::flat() const {
  std::vector<S> z(q);
  z.insert(z.end(), r.begin(), r.end());
  return z;
}

template <class S>
LatticeState<S> LatticeState<S>::from_flat(const std::vector<S>& z) {
  if (z.size() % 2 != 0 || z.empty())
    throw Error(Errc::InvalidArgument, "flat state must have even length");
  const auto n = static_cast<std::ptrdiff_t>(z.size() / 2);
  LatticeState s;
  s.q.assign(z.begin(), z.begin() + n);
  s.r.assign(z.begin() + n, z.end());
  return s;
}

template <class S>
LatticeState<S> random_state(std::size_t n, Rng& rng, double lo, double hi) {
  if (n == 0) throw Error(Errc::InvalidArgument, "state needs N >= 1 sites");
  LatticeState<S> s;
  s.q.resize(n);
  s.r.resize(n);
  for (auto& x : s.q) x = random_scalar<S>(rng, lo, hi);
  for (auto& x : s.r) x = random_scalar<S>(rng, lo, hi);
  return s;
}

template <class S>
std::string regime_name(const BoundaryCondition<S>& bc) {
  switch (bc.index()) {
    case 0: return "periodic";
    case 1: return "quasiperiodic";
    default: return "open";
  }
}

template <class S>
Closure<S> closure(const LatticeState<S>& s, const BoundaryCondition<S>& bc) {
  const std::size_t n = s.n_sites();
  if (const auto* qp = std::get_if<Quasiperiodic<S>>(&bc)) {
    if (qp->xi == S(0)) throw Error(Errc::ZeroXi, "quasiperiodic xi must be nonzero");
    return {qp->xi * s.q[0], qp->xi * s.r[n - 1]};
  }
  if (const auto* op = std::get_if<Open<S>>(&bc)) {
    return {op->theta_plus, op->theta_minus};
  }
  return {s.q[0], s.r[n - 1]};
}

template <class S>
Derivative<S> eom(const LatticeState<S>& s, const BoundaryCondition<S>& bc) {
  const std::size_t n = s.n_sites();
  const Closure<S> c = closure(s, bc);
  Derivative<S> d{std::vector<S>(n), std::vector<S>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const S qn = i + 1 < n ? s.q[i + 1] : c.q_next;
    const S rp = i > 0 ? s.r[i - 1] : c.r_prev;
    d.dq[i] = qn - s.q[i] * s.q[i] * s.r[i];
    d.dr[i] = -rp + s.q[i] * s.r[i] * s.r[i];
  }
  return d;
}

template <class S>
S hamiltonian(const LatticeState<S>& s, const BoundaryCondition<S>& bc) {
  const std::size_t n = s.n_sites();
  S quartic = S(0);
  for (std::size_t i = 0; i < n; ++i) {
    const S qr = s.q[i] * s.r[i];
    quartic += qr * qr;
  }
  if (std::holds_alternative<Periodic>(bc)) {
    S hop = S(0);
    for (std::size_t i = 0; i < n; ++i) {
      hop += s.q[(i + 1) % n] * s.r[i] + s.q[i] * s.r[(i + n - 1) % n];
    }
    return S(0.5) * (hop - quartic);
  }
  S h = S(-0.5) * quartic;
  for (std::size_t i = 0; i + 1 < n; ++i) h += s.q[i + 1] * s.r[i];
  if (const auto* qp = std::get_if<Quasiperiodic<S>>(&bc)) {
    if (qp->xi == S(0)) throw Error(Errc::ZeroXi, "quasiperiodic xi must be nonzero");
    return h + qp->xi * s.r[n - 1] * s.q[0];
  }
  const auto& op = std::get<Open<S>>(bc);
  return h + s.q[0] * op.theta_minus + s.r[n - 1] * op.theta_plus;
}

namespace {

template <class S>
double fd_step(const S& x, const FdOptions& opt) {
  return opt.rel_step * std::max(1.0, magnitude(x));
}

}  // namespace

template <class S>
std::vector<S> fd_gradient(const std::function<S(const LatticeState<S>&)>& f,
                           const LatticeState<S>& s, FdOptions opt) {
  std::vector<S> z = s.flat();
  std::vector<S> g(z.size());
  LatticeState<S> probe = s;
  const std::size_t n = s.n_sites();
  auto set = [&](std::size_t k, const S& v) {
    if (k < n) probe.q[k] = v; else probe.r[k - n] = v;
  };
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double h = fd_step(z[k], opt);
    set(k, z[k] + S(h));
    const S fp = f(probe);
    set(k, z[k] - S(h));
    const S fm = f(probe);
    set(k, z[k]);
    g[k] = (fp - fm) / S(2.0 * h);
    if (!is_finite(g[k]))
      throw Error(Errc::NonFiniteDerivative, "non-finite difference quotient");
  }
  return g;
}

template <class S>
S poisson_bracket(const Observable<S>& f, const Observable<S>& g,
                  const LatticeState<S>& s, FdOptions opt) {
  const std::vector<S> df = fd_gradient(f.eval, s, opt);
  const std::vector<S> dg = fd_gradient(g.eval, s, opt);
  const std::size_t n = s.n_sites();
  S acc = S(0);
  for (std::size_t i = 0; i < n; ++i) {
    acc += df[i] * dg[n + i] - df[n + i] * dg[i];
  }
  return acc;
}

template <class S>
double flow_consistency_residual(const LatticeState<S>& s,
                                 const BoundaryCondition<S>& bc,
                                 FdOptions opt) {
  const Derivative<S> d = eom(s, bc);
  const auto grad = fd_gradient<S>(
      [&bc](const LatticeState<S>& x) { return hamiltonian(x, bc); }, s, opt);
  const std::size_t n = s.n_sites();
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    res = std::max(res, magnitude(d.dq[i] - grad[n + i]));
    res = std::max(res, magnitude(d.dr[i] + grad[i]));
  }
  return res;
}

template <class S>
LatticeState<S> step_rk4(const LatticeState<S>& s,
                         const BoundaryCondition<S>& bc, double dt) {
  if (!(dt > 0.0)) throw Error(Errc::InvalidArgument, "dt must be positive");
  const std::size_t n = s.n_sites();
  auto axpy = [n](const LatticeState<S>& x, const Derivative<S>& d, double a) {
    LatticeState<S> y = x;
    for (std::size_t i = 0; i < n; ++i) {
      y.q[i] += S(a) * d.dq[i];
      y.r[i] += S(a) * d.dr[i];
    }
    return y;
  };
  const Derivative<S> k1 = eom(s, bc);
  const Derivative<S> k2 = eom(axpy(s, k1, 0.5 * dt), bc);
  const Derivative<S> k3 = eom(axpy(s, k2, 0.5 * dt), bc);
  const Derivative<S> k4 = eom(axpy(s, k3, dt), bc);
  LatticeState<S> out = s;
  const S w = S(dt / 6.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.q[i] += w * (k1.dq[i] + S(2) * k2.dq[i] + S(2) * k3.dq[i] + k4.dq[i]);
    out.r[i] += w * (k1.dr[i] + S(2) * k2.dr[i] + S(2) * k3.dr[i] + k4.dr[i]);
    if (!is_finite(out.q[i]) || !is_finite(out.r[i]))
      throw Error(Errc::NonFiniteState, "RK4 step produced a non-finite state");
  }
  return out;
}

#define DST_INSTANTIATE(S)                                                     \
  template struct LatticeState<S>;                                             \
  template LatticeState<S> random_state<S>(std::size_t, Rng&, double, double); \
  template std::string regime_name<S>(const BoundaryCondition<S>&);            \
  template Closure<S> closure<S>(const LatticeState<S>&,                       \
                                 const BoundaryCondition<S>&);                 \
  template Derivative<S> eom<S>(const LatticeState<S>&,                        \
                                const BoundaryCondition<S>&);                  \
  template S hamiltonian<S>(const LatticeState<S>&,                            \
                            const BoundaryCondition<S>&);                      \
  template std::vector<S> fd_gradient<S>(                                      \
      const std::function<S(const LatticeState<S>&)>&, const LatticeState<S>&, \
      FdOptions);                                                              \
  template S poisson_bracket<S>(const Observable<S>&, const Observable<S>&,    \
                                const LatticeState<S>&, FdOptions);            \
  template double flow_consistency_residual<S>(                                \
      const LatticeState<S>&, const BoundaryCondition<S>&, FdOptions);         \
  template LatticeState<S> step_rk4<S>(const LatticeState<S>&,                 \
                                       const BoundaryCondition<S>&, double);

DST_INSTANTIATE(double)
DST_INSTANTIATE(cplx)
#undef DST_INSTANTIATE

}  // namespace dst
