#include "dst/backlund.hpp"

#include <algorithm>

#include <Eigen/Dense>

namespace dst {

namespace {

constexpr double kPoleGuard = 1e-12;

Mat2<cplx> L_at(const cplx& lam, const cplx& q, const cplx& r) {
  return {lam + q * r, q, r, 1.0};
}

Mat2<cplx> g_at(const cplx& arg, const cplx& s, const cplx& S_) {
  return {1.0, s, -S_, arg - s * S_};
}

Mat2<cplx> T_at(const std::vector<cplx>& q, const std::vector<cplx>& r, const cplx& lam) {
  Mat2<cplx> t = Mat2<cplx>::identity();
  for (std::size_t i = 0; i < q.size(); ++i) t = L_at(lam, q[i], r[i]) * t;
  return t;
}

template <class S>
std::vector<cplx> promote(const std::vector<S>& v) {
  return {v.begin(), v.end()};
}

template <class S>
std::vector<S> residual_F(const std::vector<S>& x, const std::vector<S>& X,
                          const std::vector<S>& y, const S& sigma, const S& xi,
                          double* scaled) {
  const std::size_t n = x.size();
  std::vector<S> F(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const S yn = i + 1 < n ? y[i + 1] : xi * y[0];
    const S gap = x[i] - yn;
    if (magnitude(y[i]) < kPoleGuard || magnitude(gap) < kPoleGuard)
      throw Error(Errc::PoleEncountered, "Bäcklund iterate hit a pole (y_i = 0 or x_i = y_{i+1})");
    const S t1 = S(1) / y[i], t2 = sigma / gap;
    F[i] = X[i] + t1 + t2;
    const double scale = magnitude(X[i]) + magnitude(t1) + magnitude(t2);
    worst = std::max(worst, magnitude(F[i]) / std::max(scale, 1e-300));
  }
  if (scaled) *scaled = worst;
  return F;
}

template <class S>
void newton(const std::vector<S>& x, const std::vector<S>& X, std::vector<S>& y,
            const S& sigma, const S& xi, const NewtonOptions& opt, BTResult<S>& out) {
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
  const std::size_t n = x.size();
  double res = 0.0;
  std::vector<S> F = residual_F(x, X, y, sigma, xi, &res);
  for (int it = 0; it < opt.max_iter && res > opt.tol; ++it) {
    Mat J = Mat::Zero(n, n);
    Vec rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = (i + 1) % n;
      const S yn = i + 1 < n ? y[i + 1] : xi * y[0];
      const S dyn = i + 1 < n ? S(1) : xi;  // ∂y_{i+1}/∂y_k
      const S gap = x[i] - yn;
      J(i, i) += -S(1) / (y[i] * y[i]);
      J(i, k) += sigma * dyn / (gap * gap);
      rhs(i) = -F[i];
    }
    const Vec dy = J.partialPivLu().solve(rhs);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += dy(i);
      if (!is_finite(y[i])) throw Error(Errc::NewtonDiverged, "Newton iterate became non-finite");
    }
    F = residual_F(x, X, y, sigma, xi, &res);
    ++out.steps_used;
  }
  out.newton_residual = res;
  if (!(res <= opt.tol))
    throw Error(Errc::NewtonDiverged, "Newton did not reach tolerance for the Bäcklund equations");
}

}  // namespace

template <class S>
Mat2<S> g_matrix(const S& lambda, const S& sigma, const S& s, const S& S_) {
  return {S(1), s, -S_, lambda - sigma - s * S_};
}

template <class S>
S closure_xi(const BTClosure<S>& c) {
  if (const auto* qp = std::get_if<Quasiperiodic<S>>(&c)) {
    if (qp->xi == S(0)) throw Error(Errc::ZeroXi, "xi must be nonzero");
    return qp->xi;
  }
  return S(1);
}

template <class S>
BTBoundary<S> bt_boundary(const std::vector<S>& y, const std::vector<S>& X, const S& xi) {
  return {xi * y.front(), xi * X.back()};
}

template <class S>
BTResult<S> bt_solve(const LatticeState<S>& state, const BTParams<S>& p) {
  state.validate();
  if (p.newton.continuation_steps < 1 || !(p.newton.tol > 0.0) || p.newton.max_iter < 1)
    throw Error(Errc::InvalidArgument, "invalid Newton options");
  const std::vector<S>& x = state.q;
  const std::vector<S>& X = state.r;
  const std::size_t n = x.size();
  const S xi = closure_xi(p.closure);
  BTResult<S> out;
  std::vector<S> y(n);
  if (p.initial_guess) {
    if (p.initial_guess->size() != n)
      throw Error(Errc::SiteCountMismatch, "initial guess has the wrong length");
    y = *p.initial_guess;
    newton(x, X, y, p.sigma, xi, p.newton, out);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (X[i] == S(0)) throw Error(Errc::ZeroSeed, "X_i = 0: the σ = 0 seed y_i = −1/X_i is undefined");
      y[i] = -S(1) / X[i];
    }
    const int steps = p.newton.continuation_steps;
    for (int k = 1; k <= steps; ++k) {
      const S sk = p.sigma * S(static_cast<double>(k) / steps);
      newton(x, X, y, sk, xi, p.newton, out);
    }
  }
  const BTBoundary<S> ends = bt_boundary(y, X, xi);
  out.Y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const S Xp = i > 0 ? X[i - 1] : ends.X_prev;
    const S yn = i + 1 < n ? y[i + 1] : ends.y_next;
    out.Y[i] = Xp + (x[i] - yn) * X[i] / y[i];
  }
  out.y = std::move(y);
  return out;
}

template <class S>
S generating_function(const std::vector<S>& x, const std::vector<S>& y,
                      const S& sigma, const S& xi) {
  const std::size_t n = x.size();
  if (y.size() != n) throw Error(Errc::SiteCountMismatch, "x and y lengths differ");
  S g = S(0);
  for (std::size_t i = 0; i < n; ++i) {
    const S yn = i + 1 < n ? y[i + 1] : xi * y[0];
    const S ratio = (x[i] - yn) / y[i];
    if constexpr (!is_complex_v<S>) {
      if (!(ratio > 0.0))
        throw Error(Errc::LogBranch, "log argument (x_i − y_{i+1})/y_i is not positive in real mode");
    } else {
      if (ratio == S(0)) throw Error(Errc::LogBranch, "log argument vanishes");
    }
    g += ratio + sigma * std::log(ratio);
  }
  return g;
}

template <class S>
std::vector<S> generating_gradient(const std::vector<S>& x, const std::vector<S>& y,
                                   const S& sigma, const S& xi) {
  const std::size_t n = x.size();
  if (y.size() != n) throw Error(Errc::SiteCountMismatch, "x and y lengths differ");
  std::vector<S> g(2 * n, S(0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = (i + 1) % n;
    const S yn = i + 1 < n ? y[i + 1] : xi * y[0];
    const S dyn = i + 1 < n ? S(1) : xi;
    const S gap = x[i] - yn;
    // term i of G: gap/y_i + σ log gap − σ log y_i
    g[i] += S(1) / y[i] + sigma / gap;
    g[n + i] += -gap / (y[i] * y[i]) - sigma / y[i];
    g[n + k] += dyn * (-S(1) / y[i] - sigma / gap);
  }
  return g;
}

template <class S>
double bt_generating_check(const std::vector<S>& x, const std::vector<S>& X,
                           const std::vector<S>& y, const std::vector<S>& Y,
                           const S& sigma, const S& xi) {
  const std::size_t n = x.size();
  if (X.size() != n || y.size() != n || Y.size() != n)
    throw Error(Errc::SiteCountMismatch, "sequence lengths differ");
  (void)generating_function(x, y, sigma, xi);  // branch admissibility
  const std::vector<S> g = generating_gradient(x, y, sigma, xi);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    res = std::max(res, magnitude(X[i] + g[i]));
    res = std::max(res, magnitude(Y[i] - g[n + i]));
  }
  return res;
}

template <class S>
double generating_gradient_fd_check(const std::vector<S>& x, const std::vector<S>& y,
                                    const S& sigma, const S& xi) {
  const std::size_t n = x.size();
  const std::vector<S> g = generating_gradient(x, y, sigma, xi);
  std::vector<S> xs = x, ys = y;
  double res = 0.0;
  for (std::size_t k = 0; k < 2 * n; ++k) {
    S& v = k < n ? xs[k] : ys[k - n];
    const S v0 = v;
    const double h = 1e-6 * std::max(1.0, magnitude(v0));
    v = v0 + S(h);
    const S gp = generating_function(xs, ys, sigma, xi);
    v = v0 - S(h);
    const S gm = generating_function(xs, ys, sigma, xi);
    v = v0;
    res = std::max(res, magnitude((gp - gm) / S(2.0 * h) - g[k]));
  }
  return res;
}

template <class S>
double bt_local_identity_residual(const S& x_i, const S& X_i, const S& y_i,
                                  const S& y_next, const S& X_prev, const S& sigma,
                                  const std::vector<cplx>& grid) {
  const cplx x(x_i), X(X_i), y(y_i), yn(y_next), Xp(X_prev), sg(sigma);
  if (y == 0.0) throw Error(Errc::PoleEncountered, "y_i = 0");
  const cplx Y = Xp + (x - yn) * X / y;
  double res = 0.0;
  for (const cplx& lam : grid) {
    const Mat2<cplx> lhs = g_at(lam - sg, -yn, X) * L_at(lam, x, X);
    const Mat2<cplx> rhs = L_at(lam, y, Y) * g_at(lam - sg, -y, Xp);
    res = std::max(res, max_norm(lhs - rhs));
  }
  return res;
}

template <class S>
InvarianceResidual<S> bt_invariance_residual(const LatticeState<S>& x,
                                             const BTResult<S>& res,
                                             const BTParams<S>& p,
                                             const BTBoundary<S>& ends) {
  const std::size_t n = x.n_sites();
  if (res.y.size() != n || res.Y.size() != n)
    throw Error(Errc::SiteCountMismatch, "BT result does not match the state");
  const S xi = closure_xi(p.closure);
  BoundaryCondition<S> bc = Periodic{};
  if (std::holds_alternative<Quasiperiodic<S>>(p.closure)) bc = Quasiperiodic<S>{xi};
  const LatticeState<S> ys(res.y, res.Y);
  const LambdaPoly<S> gx = generator(x, bc);
  const LambdaPoly<S> gy = generator(ys, bc);
  InvarianceResidual<S> out{coeff_max_norm(gx - gy), 0.0};

  const Mat2<cplx> C = boundary_C(cplx(xi));
  const cplx sg(p.sigma);
  for (const cplx& lam : lambda_grid()) {
    if (std::abs(lam - sg) < kPoleGuard) throw Error(Errc::SingularG, "λ = σ on the grid");
    const Mat2<cplx> g1 = g_at(lam - sg, -cplx(res.y.front()), cplx(ends.X_prev));
    const Mat2<cplx> gN = g_at(lam - sg, -cplx(ends.y_next), cplx(x.r.back()));
    out.closure_defect = std::max(out.closure_defect, max_norm(g1 * C * inverse(gN) - C));
  }
  return out;
}

template <class S>
InvarianceResidual<S> bt_invariance_residual(const LatticeState<S>& x,
                                             const BTResult<S>& res,
                                             const BTParams<S>& p) {
  return bt_invariance_residual(x, res, p, bt_boundary(res.y, x.r, closure_xi(p.closure)));
}

template <class S>
double symplectic_defect(const std::vector<std::vector<S>>& D) {
  const std::size_t m = D.size();
  const std::size_t n = m / 2;
  // Ω = [[0, I], [−I, 0]] in (q.., r..) ordering
  auto omega = [n](std::size_t i, std::size_t j) -> double {
    if (i < n && j == i + n) return 1.0;
    if (i >= n && j + n == i) return -1.0;
    return 0.0;
  };
  double res = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      S acc = S(0);
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
          const double w = omega(a, b);
          if (w != 0.0) acc += D[a][i] * S(w) * D[b][j];
        }
      res = std::max(res, magnitude(acc - S(omega(i, j))));
    }
  return res;
}

template <class S>
double bt_symplectic_residual(const LatticeState<S>& x, const BTParams<S>& p, double step) {
  const std::size_t n = x.n_sites();
  const BTResult<S> base = bt_solve(x, p);
  BTParams<S> warm = p;
  auto image = [&](const LatticeState<S>& s) {
    warm.initial_guess = base.y;
    const BTResult<S> r = bt_solve(s, warm);
    std::vector<S> z = r.y;
    z.insert(z.end(), r.Y.begin(), r.Y.end());
    return z;
  };
  // D[a][j] = ∂(image_a)/∂(input_j)
  std::vector<std::vector<S>> D(2 * n, std::vector<S>(2 * n));
  LatticeState<S> probe = x;
  for (std::size_t j = 0; j < 2 * n; ++j) {
    S& v = j < n ? probe.q[j] : probe.r[j - n];
    const S v0 = v;
    const double h = step * std::max(1.0, magnitude(v0));
    v = v0 + S(h);
    const std::vector<S> zp = image(probe);
    v = v0 - S(h);
    const std::vector<S> zm = image(probe);
    v = v0;
    for (std::size_t a = 0; a < 2 * n; ++a) D[a][j] = (zp[a] - zm[a]) / S(2.0 * h);
  }
  return symplectic_defect(D);
}

VCoeffs v_coefficients(const VInputs& in) {
  VCoeffs c;
  c.a = in.y_next - in.theta_plus;
  c.d = -in.sigma * in.theta_plus;
  c.b = in.y_next * (2.0 * in.theta_plus - in.y_next);
  c.A1 = in.X0;
  c.A0 = -(in.sigma * in.X0 + in.theta_minus - in.y1 * in.X0 * in.X0);
  c.delta = in.sigma * in.theta_minus;
  c.beta = 1.0;
  c.C0 = in.X0 * in.X0;
  const cplx t = in.y1 * in.X0 - in.sigma;
  c.B0 = -t * t + 2.0 * in.theta_minus * in.y1;
  return c;
}

Mat2<cplx> v_plus(const VCoeffs& c, const cplx& lam, const cplx& sigma) {
  if (std::abs(lam + sigma) < kPoleGuard || lam == 0.0)
    throw Error(Errc::SingularPrefactor, "V+ needs λ ∉ {0, −σ}");
  const cplx pre = -lam / (lam + sigma);
  return pre * Mat2<cplx>{c.a + c.d / lam, c.b, 1.0, -c.a + c.d / lam};
}

Mat2<cplx> v_minus(const VCoeffs& c, const cplx& lam, const cplx& sigma) {
  if (std::abs(lam - sigma) < kPoleGuard || lam == 0.0)
    throw Error(Errc::SingularPrefactor, "V− needs λ ∉ {0, σ}");
  const cplx pre = -lam / (lam - sigma);
  return pre * Mat2<cplx>{lam * c.A1 + c.A0 + c.delta / lam, c.beta * lam * lam + c.B0, c.C0,
                          lam * c.A1 - c.A0 + c.delta / lam};
}

DressingResidual v_dressing_residual(const VInputs& in, const VCoeffs& c,
                                     const std::vector<cplx>& grid) {
  DressingResidual out{0.0, 0.0};
  const cplx s = in.sigma;
  for (const cplx& lam : grid) {
    if (std::abs(lam - s) < kPoleGuard || std::abs(lam + s) < kPoleGuard)
      throw Error(Errc::SingularG, "λ = ±σ on the grid");
    const Mat2<cplx> kp{in.theta_plus, 0.0, lam, in.theta_plus};
    const Mat2<cplx> km{in.theta_minus, lam, 0.0, in.theta_minus};
    const Mat2<cplx> gp = g_at(-lam - s, -in.y_next, in.XN) * v_plus(c, lam, s) *
                          inverse(g_at(lam - s, -in.y_next, in.XN));
    const Mat2<cplx> gm = g_at(lam - s, -in.y1, in.X0) * v_minus(c, lam, s) *
                          inverse(g_at(-lam - s, -in.y1, in.X0));
    out.plus = std::max(out.plus, max_norm(gp - kp));
    out.minus = std::max(out.minus, max_norm(gm - km));
  }
  return out;
}

template <class S>
double v_composite_residual(const LatticeState<S>& x, const BTResult<S>& res,
                            const BTParams<S>& p, const cplx& theta_minus,
                            const cplx& theta_plus, const std::vector<cplx>& grid) {
  const S xi = closure_xi(p.closure);
  const BTBoundary<S> ends = bt_boundary(res.y, x.r, xi);
  const VInputs in{cplx(res.y.front()), cplx(ends.y_next), cplx(ends.X_prev),
                   cplx(x.r.back()),    cplx(p.sigma),      theta_minus, theta_plus};
  const VCoeffs c = v_coefficients(in);
  const auto xq = promote(x.q), xr = promote(x.r), yq = promote(res.y), yr = promote(res.Y);
  double worst = 0.0;
  for (const cplx& lam : grid) {
    const Mat2<cplx> kp{theta_plus, 0.0, lam, theta_plus};
    const Mat2<cplx> km{theta_minus, lam, 0.0, theta_minus};
    const cplx lhs = (v_plus(c, lam, in.sigma) * T_at(xq, xr, lam) * v_minus(c, lam, in.sigma) *
                      inverse(T_at(xq, xr, -lam)))
                         .trace();
    const cplx rhs = (kp * T_at(yq, yr, lam) * km * inverse(T_at(yq, yr, -lam))).trace();
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  return worst;
}

#define DST_INSTANTIATE(S)                                                               \
  template Mat2<S> g_matrix<S>(const S&, const S&, const S&, const S&);                  \
  template S closure_xi<S>(const BTClosure<S>&);                                         \
  template BTBoundary<S> bt_boundary<S>(const std::vector<S>&, const std::vector<S>&,    \
                                        const S&);                                       \
  template BTResult<S> bt_solve<S>(const LatticeState<S>&, const BTParams<S>&);          \
  template S generating_function<S>(const std::vector<S>&, const std::vector<S>&,        \
                                    const S&, const S&);                                 \
  template std::vector<S> generating_gradient<S>(const std::vector<S>&,                  \
                                                 const std::vector<S>&, const S&,        \
                                                 const S&);                              \
  template double bt_generating_check<S>(const std::vector<S>&, const std::vector<S>&,   \
                                         const std::vector<S>&, const std::vector<S>&,   \
                                         const S&, const S&);                            \
  template double generating_gradient_fd_check<S>(const std::vector<S>&,                 \
                                                  const std::vector<S>&, const S&,       \
                                                  const S&);                             \
  template double bt_local_identity_residual<S>(const S&, const S&, const S&, const S&,  \
                                                const S&, const S&,                      \
                                                const std::vector<cplx>&);               \
  template InvarianceResidual<S> bt_invariance_residual<S>(                              \
      const LatticeState<S>&, const BTResult<S>&, const BTParams<S>&);                   \
  template InvarianceResidual<S> bt_invariance_residual<S>(                              \
      const LatticeState<S>&, const BTResult<S>&, const BTParams<S>&,                    \
      const BTBoundary<S>&);                                                             \
  template double bt_symplectic_residual<S>(const LatticeState<S>&, const BTParams<S>&,  \
                                            double);                                     \
  template double symplectic_defect<S>(const std::vector<std::vector<S>>&);              \
  template double v_composite_residual<S>(const LatticeState<S>&, const BTResult<S>&,    \
                                          const BTParams<S>&, const cplx&, const cplx&,  \
                                          const std::vector<cplx>&);

DST_INSTANTIATE(double)
DST_INSTANTIATE(cplx)
#undef DST_INSTANTIATE

}  // namespace dst
