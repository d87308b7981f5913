#include "dst/rmatrix.hpp"

#include <algorithm>

namespace dst {

Tensor4 permutation() {
  Tensor4 p = Tensor4::Zero();
  p(0, 0) = p(3, 3) = 1.0;
  p(1, 2) = p(2, 1) = 1.0;
  return p;
}

Tensor4 kron(const Mat2<cplx>& a, const Mat2<cplx>& b) {
  Tensor4 t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) t(2 * i + k, 2 * j + l) = a.at(i, j) * b.at(k, l);
  return t;
}

Tensor4 first(const Mat2<cplx>& a) { return kron(a, Mat2<cplx>::identity()); }
Tensor4 second(const Mat2<cplx>& b) { return kron(Mat2<cplx>::identity(), b); }

double max_norm(const Tensor4& t) { return t.cwiseAbs().maxCoeff(); }

namespace {

Tensor4 r_of(const cplx& x) {
  if (x == cplx(0.0))
    throw Error(Errc::CoincidingSpectralParams, "r-matrix pole: spectral arguments coincide");
  return -permutation() / x;
}

Tensor4 commutator(const Tensor4& a, const Tensor4& b) { return a * b - b * a; }

// Gradients of the four entries of a matrix observable, (q..., r...) ordering.
template <class S>
std::array<std::vector<cplx>, 4> matrix_gradient(const MatObservable<S>& f,
                                                 const LatticeState<S>& s,
                                                 const FdOptions& opt) {
  const std::size_t n = s.n_sites();
  std::array<std::vector<cplx>, 4> g;
  for (auto& v : g) v.resize(2 * n);
  LatticeState<S> probe = s;
  for (std::size_t k = 0; k < 2 * n; ++k) {
    S& x = k < n ? probe.q[k] : probe.r[k - n];
    const S x0 = x;
    const double h = opt.rel_step * std::max(1.0, magnitude(x0));
    x = x0 + S(h);
    const Mat2<cplx> fp = f(probe);
    x = x0 - S(h);
    const Mat2<cplx> fm = f(probe);
    x = x0;
    for (int e = 0; e < 4; ++e) {
      const cplx d = (fp.at(e / 2, e % 2) - fm.at(e / 2, e % 2)) / (2.0 * h);
      if (!is_finite(d)) throw Error(Errc::NonFiniteDerivative, "non-finite difference quotient");
      g[e][k] = d;
    }
  }
  return g;
}

template <class S>
Mat2<cplx> eval_T(const LatticeState<S>& s, const cplx& lam) {
  Mat2<cplx> t = Mat2<cplx>::identity();
  for (std::size_t i = 0; i < s.n_sites(); ++i) {
    const cplx q(s.q[i]), r(s.r[i]);
    t = Mat2<cplx>{lam + q * r, q, r, 1.0} * t;
  }
  return t;
}

}  // namespace

Tensor4 classical_r(const cplx& lambda, const cplx& mu) {
  return r_of(lambda - mu);
}

template <class S>
Tensor4 bracket_table(const MatObservable<S>& A, const MatObservable<S>& B,
                      const LatticeState<S>& s, FdOptions opt) {
  const std::size_t n = s.n_sites();
  const auto ga = matrix_gradient(A, s, opt);
  const auto gb = matrix_gradient(B, s, opt);
  Tensor4 t;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          const auto& fa = ga[2 * a + b];
          const auto& fb = gb[2 * c + d];
          cplx acc = 0.0;
          for (std::size_t i = 0; i < n; ++i)
            acc += fa[i] * fb[n + i] - fa[n + i] * fb[i];
          t(2 * a + c, 2 * b + d) = acc;
        }
  return t;
}

template <class S>
double cism1_residual(const LatticeState<S>& s, const cplx& lambda, const cplx& mu,
                      const CismLevel& level, FdOptions opt) {
  const Tensor4 r = classical_r(lambda, mu);
  MatObservable<S> A, B;
  bool same = true;
  if (const auto* loc = std::get_if<LocalLevel>(&level)) {
    const std::size_t N = s.n_sites();
    if (loc->n < 1 || loc->n > N || loc->m < 1 || loc->m > N)
      throw Error(Errc::IndexOutOfRange, "site index out of range");
    const std::size_t n = loc->n - 1, m = loc->m - 1;
    same = n == m;
    A = [n, lambda](const LatticeState<S>& x) {
      const cplx q(x.q[n]), p(x.r[n]);
      return Mat2<cplx>{lambda + q * p, q, p, 1.0};
    };
    B = [m, mu](const LatticeState<S>& x) {
      const cplx q(x.q[m]), p(x.r[m]);
      return Mat2<cplx>{mu + q * p, q, p, 1.0};
    };
  } else {
    A = [lambda](const LatticeState<S>& x) { return eval_T(x, lambda); };
    B = [mu](const LatticeState<S>& x) { return eval_T(x, mu); };
  }
  const Tensor4 lhs = bracket_table(A, B, s, opt);
  Tensor4 rhs = Tensor4::Zero();
  if (same) rhs = commutator(r, kron(A(s), B(s)));
  return max_norm(lhs - rhs);
}

ReflectionResidual reflection_residual_K(const std::function<Mat2<cplx>(cplx)>& k,
                                         const cplx& lambda, const cplx& mu) {
  const Tensor4 r = classical_r(lambda, mu);
  const Tensor4 rp = r_of(lambda + mu);
  const Mat2<cplx> kl = k(lambda), km = k(mu);
  const Tensor4 base = commutator(r, kron(kl, km)) + first(kl) * rp * second(km);
  return {max_norm(base - second(km) * rp * first(kl)),
          max_norm(base - second(km) * rp * first(km))};
}

template <class S>
Mat2<cplx> dressed_U(const LatticeState<S>& s, const Open<S>& bc, const cplx& lambda) {
  if (lambda == cplx(0.0))
    throw Error(Errc::ZeroSpectralParam, "U(λ) needs λ ≠ 0 to restore T⁻¹(−λ)");
  const Mat2<cplx> t = eval_T(s, lambda);
  const Mat2<cplx> tm = eval_T(s, -lambda);
  const Mat2<cplx> adj{tm.d, -tm.b, -tm.c, tm.a};
  const cplx th(bc.theta_minus);
  const Mat2<cplx> km{th, lambda, 0.0, th};
  const cplx scale = std::pow(-lambda, static_cast<int>(s.n_sites()));
  return (1.0 / scale) * (t * km * adj);
}

template <class S>
double cism2_residual_U(const LatticeState<S>& s, const Open<S>& bc,
                        const cplx& lambda, const cplx& mu, FdOptions opt) {
  if (lambda == cplx(0.0) || mu == cplx(0.0))
    throw Error(Errc::ZeroSpectralParam, "CISM-II check needs λ, μ ≠ 0");
  const Tensor4 r = classical_r(lambda, mu);
  const Tensor4 rp = r_of(lambda + mu);
  const MatObservable<S> A = [&bc, lambda](const LatticeState<S>& x) {
    return dressed_U(x, bc, lambda);
  };
  const MatObservable<S> B = [&bc, mu](const LatticeState<S>& x) {
    return dressed_U(x, bc, mu);
  };
  const Mat2<cplx> ul = A(s), um = B(s);
  const Tensor4 rhs = commutator(r, kron(ul, um)) + first(ul) * rp * second(um) -
                      second(um) * rp * first(ul);
  return max_norm(bracket_table(A, B, s, opt) - rhs);
}

FdOrderProbe fd_order_probe(const LatticeState<double>& s, double h0) {
  // f = sin(q_1) e^{q_N r_1},  g = cos(r_N) + q_1 r_N²
  const std::size_t N = s.n_sites();
  const Observable<double> f{"f", [N](const LatticeState<double>& x) {
                               return std::sin(x.q[0]) * std::exp(x.q[N - 1] * x.r[0]);
                             }};
  const Observable<double> g{"g", [N](const LatticeState<double>& x) {
                               return std::cos(x.r[N - 1]) + x.q[0] * x.r[N - 1] * x.r[N - 1];
                             }};
  // closed-form gradients
  std::vector<double> df(2 * N, 0.0), dg(2 * N, 0.0);
  const double e = std::exp(s.q[N - 1] * s.r[0]);
  df[0] += std::cos(s.q[0]) * e;
  df[N - 1] += std::sin(s.q[0]) * e * s.r[0];
  df[N + 0] += std::sin(s.q[0]) * e * s.q[N - 1];
  dg[0] += s.r[N - 1] * s.r[N - 1];
  dg[2 * N - 1] += -std::sin(s.r[N - 1]) + 2.0 * s.q[0] * s.r[N - 1];
  double exact = 0.0;
  for (std::size_t i = 0; i < N; ++i) exact += df[i] * dg[N + i] - df[N + i] * dg[i];

  FdOrderProbe out;
  for (int k = 0; k < 3; ++k) {
    const double h = h0 / static_cast<double>(1 << k);
    out.steps.push_back(h);
    out.errors.push_back(std::abs(poisson_bracket(f, g, s, FdOptions{h}) - exact));
  }
  const double ratio = std::sqrt((out.errors[0] / out.errors[1]) * (out.errors[1] / out.errors[2]));
  out.order = std::log2(ratio);
  return out;
}

#define DST_INSTANTIATE(S)                                                           \
  template Tensor4 bracket_table<S>(const MatObservable<S>&, const MatObservable<S>&, \
                                    const LatticeState<S>&, FdOptions);              \
  template double cism1_residual<S>(const LatticeState<S>&, const cplx&, const cplx&, \
                                    const CismLevel&, FdOptions);                    \
  template Mat2<cplx> dressed_U<S>(const LatticeState<S>&, const Open<S>&, const cplx&); \
  template double cism2_residual_U<S>(const LatticeState<S>&, const Open<S>&,         \
                                      const cplx&, const cplx&, FdOptions);

DST_INSTANTIATE(double)
DST_INSTANTIATE(cplx)
#undef DST_INSTANTIATE

}  // namespace dst
