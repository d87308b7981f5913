#include "dst/baxter.hpp"

#include <algorithm>
#include <numbers>

#include "dst/quantum.hpp"
#include "dst/special.hpp"

namespace dst {

namespace {

constexpr double kPoleGuard = 1e-14;

constexpr double kAccept = 1e-11;  // relative Bethe residual for a converged start

cplx z_of(int i, const QKernelParams& p) {
  const auto k = static_cast<std::size_t>(i - 1);
  return (p.y[k + 1] - p.q[k]) / p.y[k];
}

void check_site(int i, const QKernelParams& p) {
  if (i < 1 || i > p.n_sites()) throw Error(Errc::IndexOutOfRange, "kernel site index out of range");
}

}  // namespace

void QKernelParams::validate() const {
  const std::size_t n = q.size();
  if (n == 0) throw Error(Errc::InvalidArgument, "kernel needs at least one site");
  if (y.size() != n + 1) throw Error(Errc::SiteCountMismatch, "y must hold N+1 entries");
  if (eta == 0.0) throw Error(Errc::InvalidArgument, "eta must be nonzero");
  if (xi == cplx{}) throw Error(Errc::ZeroXi, "xi must be nonzero");
  if (std::abs(y[n] - xi * y[0]) > 1e-12 * (1.0 + std::abs(y[n])))
    throw Error(Errc::InvalidArgument, "y_{N+1} must equal xi*y_1");
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(y[k]) < kPoleGuard) throw Error(Errc::PoleInput, "y_i = 0");
    if (std::abs(y[k + 1] - q[k]) < kPoleGuard) throw Error(Errc::PoleInput, "y_{i+1} = q_i");
  }
}

QKernelParams make_kernel_params(cplx sigma, double eta, cplx xi, std::vector<cplx> y,
                                 std::vector<cplx> q) {
  if (y.size() != q.size()) throw Error(Errc::SiteCountMismatch, "need N values of y and q");
  if (y.empty()) throw Error(Errc::InvalidArgument, "kernel needs at least one site");
  y.push_back(xi * y.front());
  QKernelParams p{sigma, eta, xi, std::move(y), std::move(q)};
  p.validate();
  return p;
}

QKernelParams random_kernel_params(int n, cplx sigma, double eta, cplx xi, Rng& rng) {
  if (n < 1) throw Error(Errc::InvalidArgument, "kernel needs at least one site");
  for (;;) {
    std::vector<cplx> y, q;
    for (int i = 0; i < n; ++i) {
      y.push_back(rng.uniform_complex(-1, 1));
      q.push_back(rng.uniform_complex(-1, 1));
    }
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      const cplx next = i + 1 < n ? y[static_cast<std::size_t>(i) + 1] : xi * y[0];
      const auto k = static_cast<std::size_t>(i);
      if (std::abs(y[k]) < 0.2 || std::abs(next - q[k]) < 0.2) ok = false;
    }
    if (ok) return make_kernel_params(sigma, eta, xi, std::move(y), std::move(q));
  }
}

cplx log_w(int i, const QKernelParams& p, int shift) {
  p.validate();
  check_site(i, p);
  const cplx s = p.sigma + static_cast<double>(shift) * p.eta;
  const cplx a = s / p.eta + 1.0;  // Γ argument and minus the power of z
  const cplx z = z_of(i, p);
  return log_gamma(a) - std::log(p.y[static_cast<std::size_t>(i - 1)]) - a * std::log(z) + z / p.eta;
}

Mat2<cplx> qj_lax(int i, const QKernelParams& p) {
  p.validate();
  check_site(i, p);
  const auto k = static_cast<std::size_t>(i - 1);
  const cplx d = (p.sigma + p.eta) / (p.y[k + 1] - p.q[k]) - 1.0 / p.y[k];
  return {p.sigma + p.eta + p.q[k] * d, p.q[k], d, 1.0};
}

cplx qj_derivative_fd(int i, const QKernelParams& p, double h) {
  QKernelParams a = p, b = p;
  const auto k = static_cast<std::size_t>(i - 1);
  a.q[k] += h;
  b.q[k] -= h;
  return p.eta * (log_w(i, a) - log_w(i, b)) / (2.0 * h);
}

Triangularized gauge_triangularize(int i, const QKernelParams& p, Gauge g) {
  const Mat2<cplx> l = qj_lax(i, p);
  const auto k = static_cast<std::size_t>(i - 1);
  // S_i carries y_i; the printed index (y_{i+1} in S_i, y_{i+2} in S_{i+1}) leaves an O(1) corner
  const cplx right = g == Gauge::Correct ? p.y[k] : p.y[k + 1];
  const cplx left = g == Gauge::Correct ? p.y[k + 1]
                                        : (k + 2 < p.y.size() ? p.y[k + 2] : p.xi * p.y[1]);
  const Mat2<cplx> s_right{1.0, right, 0.0, 1.0};
  const Mat2<cplx> s_left_inv{1.0, -left, 0.0, 1.0};
  const Mat2<cplx> t = s_left_inv * l * s_right;
  Triangularized out;
  out.upper_right = std::abs(t.b);
  out.top = t.a;
  out.bottom = t.d;
  const cplx r_minus = std::exp(log_w(i, p, -1) - log_w(i, p));
  const cplx r_plus = std::exp(log_w(i, p, 1) - log_w(i, p));
  out.ratio_defect = std::abs(t.a - p.sigma * r_minus / p.eta) + std::abs(t.d - p.eta * r_plus);
  return out;
}

TqReport tq_scalar(const QKernelParams& p) {
  p.validate();
  const int n = p.n_sites();
  Mat2<cplx> t = qj_lax(1, p);
  for (int i = 2; i <= n; ++i) t = qj_lax(i, p) * t;
  const cplx sq = principal_sqrt(p.xi);
  TqReport r;
  r.J = t.a / sq + sq * t.d;
  cplx lm = 0.0, lp = 0.0;
  for (int i = 1; i <= n; ++i) {
    const cplx base = log_w(i, p);
    lm += log_w(i, p, -1) - base;
    lp += log_w(i, p, 1) - base;
  }
  const cplx t1 = std::pow(p.sigma, n) * std::exp(lm) / sq;
  const cplx t2 = sq * std::exp(lp);
  r.factor_minus = std::pow(p.eta, -n);
  r.factor_plus = std::pow(p.eta, n);
  r.rhs_literal = t1 + t2;
  r.rhs_corrected = r.factor_minus * t1 + r.factor_plus * t2;
  auto rel = [&](cplx rhs, double scale) {
    return std::abs(r.J - rhs) / std::max({std::abs(r.J), scale, 1e-300});
  };
  r.literal = rel(r.rhs_literal, std::abs(t1) + std::abs(t2));
  r.corrected = rel(r.rhs_corrected, r.factor_minus * std::abs(t1) + r.factor_plus * std::abs(t2));
  return r;
}

double tq_scalar_residual(const QKernelParams& p) { return tq_scalar(p).corrected; }

bool tq_exact_n1(mpq_class sigma, mpq_class s, mpq_class y1, mpq_class q1) {
  for (mpq_class* x : {&sigma, &s, &y1, &q1}) x->canonicalize();
  if (s == 0 || y1 == 0 || sigma == 0) throw Error(Errc::PoleInput, "sigma, s and y_1 must be nonzero");
  const mpq_class y2 = s * s * y1;
  if (y2 == q1) throw Error(Errc::PoleInput, "y_2 = q_1");
  const mpq_class d = (sigma + 1) / (y2 - q1) - 1 / y1;
  const mpq_class j = (sigma + 1 + q1 * d) / s + s * 1;
  const mpq_class z = (y2 - q1) / y1;
  // w(σ−1)/w(σ) = z/σ and w(σ+1)/w(σ) = (σ+1)/z by Γ(a+1) = aΓ(a)
  const mpq_class rhs = sigma * (z / sigma) / s + s * ((sigma + 1) / z);
  return j == rhs;
}

// ---- Bethe ----

namespace {

struct BetheTerms {
  std::vector<cplx> f;
  std::vector<double> scale;
};

BetheTerms bethe_terms(const BetheConfig& c) {
  const cplx sq = principal_sqrt(c.xi);
  BetheTerms out;
  for (std::size_t j = 0; j < c.roots.size(); ++j) {
    cplx p1 = std::pow(c.roots[j], c.n) / sq, p2 = sq;
    for (const cplx& mu : c.roots) {
      p1 *= c.roots[j] - mu - c.eta;
      p2 *= c.roots[j] - mu + c.eta;
    }
    out.f.push_back(p1 + p2);
    out.scale.push_back(std::abs(p1) + std::abs(p2));
  }
  return out;
}

Eigen::MatrixXcd bethe_jacobian(const BetheConfig& c) {
  const cplx sq = principal_sqrt(c.xi);
  const auto m = static_cast<Eigen::Index>(c.roots.size());
  const auto& mu = c.roots;
  Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const cplx x = mu[static_cast<std::size_t>(j)];
    auto prod_except = [&](double shift, Eigen::Index skip) {
      cplx acc = 1.0;
      for (Eigen::Index i = 0; i < m; ++i)
        if (i != skip) acc *= x - mu[static_cast<std::size_t>(i)] + shift;
      return acc;
    };
    const cplx a = std::pow(x, c.n) / sq;
    for (Eigen::Index k = 0; k < m; ++k) {
      if (k == j) continue;
      // d/dμ_k of the factor (μ_j − μ_k ∓ η) is −1
      jac(j, k) = -a * prod_except(-c.eta, k) - sq * prod_except(c.eta, k);
    }
    // μ_j enters μ_j^N and every i ≠ j factor; the i = j factors are the constants ∓η
    cplx d = static_cast<double>(c.n) * std::pow(x, c.n - 1) / sq * prod_except(-c.eta, -1);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == j) continue;
      cplx t1 = a, t2 = sq;
      for (Eigen::Index l = 0; l < m; ++l) {
        if (l == i) continue;
        t1 *= x - mu[static_cast<std::size_t>(l)] - c.eta;
        t2 *= x - mu[static_cast<std::size_t>(l)] + c.eta;
      }
      d += t1 + t2;
    }
    jac(j, j) = d;
  }
  return jac;
}

double rel_residual(const BetheTerms& t) {
  double r = 0.0;
  for (std::size_t j = 0; j < t.f.size(); ++j)
    r = std::max(r, std::abs(t.f[j]) / std::max(t.scale[j], 1e-300));
  return r;
}

double min_separation(const std::vector<cplx>& r) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < r.size(); ++a)
    for (std::size_t b = a + 1; b < r.size(); ++b) d = std::min(d, std::abs(r[a] - r[b]));
  return d;
}

double set_distance(const std::vector<cplx>& a, std::vector<cplx> b) {
  double worst = 0.0;
  for (const cplx& x : a) {
    auto it = std::min_element(b.begin(), b.end(),
                               [&](const cplx& u, const cplx& v) { return std::abs(u - x) < std::abs(v - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

// Damped Newton from one start; nullopt unless the relative residual gets below the accept threshold.
std::optional<BetheConfig> newton_bethe(BetheConfig c, const BetheOptions& opt) {
  auto norm = [](const BetheTerms& t) {
    double s = 0.0;
    for (const cplx& f : t.f) s += std::norm(f);
    return std::sqrt(s);
  };
  BetheTerms t = bethe_terms(c);
  for (int it = 0; it < opt.max_iter && rel_residual(t) > opt.tol; ++it) {
    const Eigen::MatrixXcd jac = bethe_jacobian(c);
    Eigen::VectorXcd f(static_cast<Eigen::Index>(t.f.size()));
    for (std::size_t j = 0; j < t.f.size(); ++j) f(static_cast<Eigen::Index>(j)) = t.f[j];
    const Eigen::VectorXcd step = jac.partialPivLu().solve(f);
    if (!step.allFinite()) return std::nullopt;
    const double f0 = norm(t);
    double damp = 1.0;
    BetheConfig trial = c;
    for (int k = 0; k < 30; ++k, damp *= 0.5) {
      for (std::size_t j = 0; j < c.roots.size(); ++j)
        trial.roots[j] = c.roots[j] - damp * step(static_cast<Eigen::Index>(j));
      if (norm(bethe_terms(trial)) < f0) break;
    }
    if (step.norm() * damp < 1e-300) break;
    c = trial;
    t = bethe_terms(c);
    if (!std::all_of(c.roots.begin(), c.roots.end(), [](const cplx& z) { return is_finite(z); }))
      return std::nullopt;
  }
  c.residual = rel_residual(t);
  if (!(c.residual < kAccept)) return std::nullopt;
  return c;
}

std::vector<BetheConfig> bethe_search(int n, int m, cplx xi, double eta, std::uint64_t seed,
                                      int max_sets, const BetheOptions& opt) {
  if (m < 1) throw Error(Errc::InvalidArgument, "magnon number must be at least 1");
  if (n < 1) throw Error(Errc::InvalidArgument, "site count must be at least 1");
  if (xi == cplx{}) throw Error(Errc::ZeroXi, "xi must be nonzero");
  Rng rng(seed);
  const double radius = 2.0 + std::abs(eta) * m;
  std::vector<BetheConfig> found;
  int collisions = 0;
  for (int s = 0; s < opt.starts && static_cast<int>(found.size()) < max_sets; ++s) {
    BetheConfig c{n, m, xi, eta, {}, 0.0};
    for (int k = 0; k < m; ++k) {
      // uniform in the disk
      const double rad = radius * std::sqrt(rng.uniform(0, 1));
      const double ang = rng.uniform(0, 2 * std::numbers::pi);
      c.roots.push_back(std::polar(rad, ang));
    }
    auto sol = newton_bethe(std::move(c), opt);
    if (!sol) continue;
    if (min_separation(sol->roots) < opt.collision) {
      ++collisions;
      continue;
    }
    const bool dup = std::any_of(found.begin(), found.end(), [&](const BetheConfig& f) {
      return set_distance(f.roots, sol->roots) < opt.distinct;
    });
    if (!dup) found.push_back(std::move(*sol));
  }
  if (found.empty()) {
    if (collisions > 0) throw Error(Errc::RootCollision, "every converged start had coinciding roots");
    throw Error(Errc::NoConvergence, "Bethe equations: no start converged");
  }
  return found;
}

}  // namespace

std::vector<cplx> bethe_equations(const BetheConfig& c) { return bethe_terms(c).f; }
double bethe_residual(const BetheConfig& c) { return rel_residual(bethe_terms(c)); }

BetheConfig bethe_solve(int n, int m, cplx xi, double eta, std::uint64_t seed, const BetheOptions& opt) {
  return bethe_search(n, m, xi, eta, seed, 1, opt).front();
}

std::vector<BetheConfig> bethe_solve_all(int n, int m, cplx xi, double eta, std::uint64_t seed,
                                         int max_sets, const BetheOptions& opt) {
  return bethe_search(n, m, xi, eta, seed, max_sets, opt);
}

cplx poly_eval(const std::vector<cplx>& c, cplx x) {
  cplx acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

namespace {

std::vector<cplx> poly_mul_linear(const std::vector<cplx>& p, cplx root) {  // p·(σ − root)
  std::vector<cplx> out(p.size() + 1, 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    out[k + 1] += p[k];
    out[k] -= root * p[k];
  }
  return out;
}

}  // namespace

std::vector<cplx> bethe_rhs_poly(const BetheConfig& c) {
  const cplx sq = principal_sqrt(c.xi);
  std::vector<cplx> a(static_cast<std::size_t>(c.n) + 1, 0.0), b{sq};
  a.back() = 1.0 / sq;
  for (const cplx& mu : c.roots) {
    a = poly_mul_linear(a, mu + c.eta);
    b = poly_mul_linear(b, mu - c.eta);
  }
  for (std::size_t k = 0; k < b.size(); ++k) a[k] += b[k];
  return a;
}

cplx lambda_from_roots(const BetheConfig& c, cplx sigma0) {
  for (const cplx& mu : c.roots)
    if (std::abs(sigma0 - mu) < 1e-12) throw Error(Errc::EvaluationAtRoot, "sigma0 coincides with a Bethe root");
  const cplx sq = principal_sqrt(c.xi);
  cplx a = std::pow(sigma0, c.n) / sq, b = sq;
  for (const cplx& mu : c.roots) {
    a *= (sigma0 - mu - c.eta) / (sigma0 - mu);
    b *= (sigma0 - mu + c.eta) / (sigma0 - mu);
  }
  return a + b;
}

PolyDivision lambda_division(const BetheConfig& c) {
  std::vector<cplx> rem = bethe_rhs_poly(c);
  double scale = 0.0;
  for (const cplx& x : rem) scale = std::max(scale, std::abs(x));
  std::vector<cplx> div{1.0};
  for (const cplx& mu : c.roots) div = poly_mul_linear(div, mu);
  const std::size_t m = c.roots.size();
  PolyDivision out;
  if (rem.size() < div.size()) {
    out.remainder = 1.0;
    return out;
  }
  out.quotient.assign(rem.size() - m, 0.0);
  for (std::size_t k = rem.size(); k-- > m;) {
    const cplx lead = rem[k];  // divisor is monic
    out.quotient[k - m] = lead;
    for (std::size_t l = 0; l <= m; ++l) rem[k - m + l] -= lead * div[l];
  }
  for (std::size_t k = 0; k < m; ++k) out.remainder = std::max(out.remainder, std::abs(rem[k]) / scale);
  return out;
}

Eigen::MatrixXcd transfer_on_degree(int n, int m, cplx xi, double eta, cplx sigma0, bool force) {
  if (n < 1 || n > kMaxSites || m < 0) throw Error(Errc::InvalidArgument, "bad (N, m)");
  mpz_class dim;
  mpz_bin_uiui(dim.get_mpz_t(), static_cast<unsigned long>(n + m - 1), static_cast<unsigned long>(m));
  if (dim > 64 && !force)
    throw Error(Errc::CostGuard, "degree-" + std::to_string(m) + " subspace has dimension " +
                                     dim.get_str() + " > 64 (use force to override)");
  QParams p;
  p.n = n;
  p.eta = mpq_class(eta);
  const OpMatrix t = qmonodromy(p, 0);
  const cplx sq = principal_sqrt(xi);
  return rep_on_degree(t(0, 0), n, m).evaluate(sigma0) / sq +
         sq * rep_on_degree(t(1, 1), n, m).evaluate(sigma0);
}

double eigen_membership_residual(const BetheConfig& c, cplx sigma0, bool force) {
  const Eigen::MatrixXcd j = transfer_on_degree(c.n, c.m, c.xi, c.eta, sigma0, force);
  const cplx lam = lambda_from_roots(c, sigma0);
  const auto dim = j.rows();
  const Eigen::MatrixXcd shifted = j - lam * Eigen::MatrixXcd::Identity(dim, dim);
  const double scale = std::max(j.norm(), std::abs(lam));
  return std::abs(shifted.partialPivLu().determinant()) / std::pow(scale, static_cast<double>(dim));
}

cplx sov_residual(const SovParams& p, cplx u, SovVariant v) {
  const cplx& e = p.eta;
  const cplx dm = p.xi_minus + (u - e / 2.0);
  const cplx dp = (2.0 * u - e) * (p.xi_minus - (u + e / 2.0));
  const cplx pre = v == SovVariant::Printed ? 2.0 * u + e : 2.0 * u - e;
  return 2.0 * u * poly_eval(p.tau_poly, u) * poly_eval(p.phi_poly, u) -
         p.xi_plus * pre * dm * poly_eval(p.phi_poly, u - e) - p.xi_plus * dp * poly_eval(p.phi_poly, u + e);
}

}  // namespace dst
