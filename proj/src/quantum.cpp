#include "dst/quantum.hpp"

#include <algorithm>
#include <functional>

namespace dst {

namespace {

mpq_class sign_pow(int n) { return n % 2 == 0 ? mpq_class(1) : mpq_class(-1); }

void check_params(const QParams& p) {
  if (p.eta == 0) throw Error(Errc::InvalidArgument, "eta must be nonzero");
  if (p.n < 1 || p.n > kMaxSites) throw Error(Errc::InvalidArgument, "site count out of range");
}

OpMatrix mat2(int n, OpPoly a, OpPoly b, OpPoly c, OpPoly d) {
  OpMatrix m(2, 2, n);
  m(0, 0) = std::move(a);
  m(0, 1) = std::move(b);
  m(1, 0) = std::move(c);
  m(1, 1) = std::move(d);
  return m;
}

OpPoly shifted_var(int n, int var, const mpq_class& shift) {
  return OpPoly::var(n, var) + OpPoly::scalar(n, shift);
}

}  // namespace

void cost_guard(const QParams& p, int limit, bool force, const char* what) {
  if (p.n > limit && !force)
    throw Error(Errc::CostGuard, std::string(what) + ": N = " + std::to_string(p.n) +
                                     " exceeds the default limit " + std::to_string(limit) +
                                     " (use force to override)");
}

OpMatrix qlax(int site, const QParams& p, int var) {
  check_params(p);
  if (site < 1 || site > p.n) throw Error(Errc::IndexOutOfRange, "site index out of range");
  const int n = p.n, i = site - 1;
  const WeylOp q = WeylOp::q(n, i);
  const WeylOp r = WeylOp::r(n, i, p.eta);
  return mat2(n, OpPoly::var(n, var) + OpPoly::constant(q * r), OpPoly::constant(q),
              OpPoly::constant(r), OpPoly::scalar(n, 1));
}

OpMatrix qmonodromy(const QParams& p, int var) {
  OpMatrix t = qlax(1, p, var);
  for (int s = 2; s <= p.n; ++s) t = qlax(s, p, var) * t;
  return t;
}

OpMatrix sigma2_transpose_neg(const OpMatrix& t, int var) {
  const OpMatrix m = t.negate_var(var);
  const int n = t.n_sites();
  OpPoly b = m(0, 1), c = m(1, 0);
  b *= mpq_class(-1);
  c *= mpq_class(-1);
  return mat2(n, m(1, 1), std::move(b), std::move(c), m(0, 0));
}

OpMatrix qK_minus(int n, int var, const mpq_class& shift, const mpq_class& xi) {
  return mat2(n, OpPoly::scalar(n, xi), shifted_var(n, var, shift), OpPoly(n), OpPoly::scalar(n, xi));
}

OpMatrix qK_plus(int n, int var, const mpq_class& shift, const mpq_class& xi) {
  return mat2(n, OpPoly::scalar(n, xi), OpPoly(n), shifted_var(n, var, shift), OpPoly::scalar(n, xi));
}

OpMatrix r_cleared(int n, const mpq_class& a, const mpq_class& b, const mpq_class& c,
                   const mpq_class& eta) {
  OpMatrix r(4, 4, n);
  const OpPoly diag = OpPoly::linear(n, a, b, c);
  for (int i = 0; i < 4; ++i) r(i, i) = diag;
  const OpPoly e = OpPoly::scalar(n, eta);
  r(0, 0) += e;
  r(3, 3) += e;
  r(1, 2) += e;
  r(2, 1) += e;
  return r;
}

OpMatrix qU(const QParams& p, int var) {
  const OpMatrix t = qmonodromy(p, var);
  return t * qK_minus(p.n, var, -p.eta / 2, p.xi_minus) * sigma2_transpose_neg(t, var);
}

OpPoly qtau_shifted(const QParams& p, const mpq_class& kplus_shift, int var) {
  return (qK_plus(p.n, var, kplus_shift, p.xi_plus) * qU(p, var)).trace();
}

OpPoly qtau(const QParams& p, int var) { return qtau_shifted(p, p.eta / 2, var); }

ExactCheck rtt_check(const QParams& p, bool force, const std::optional<mpq_class>& eta_rhs) {
  check_params(p);
  cost_guard(p, 2, force, "RTT relation");
  const OpMatrix t1 = embed_first(qmonodromy(p, 0));
  const OpMatrix t2 = embed_second(qmonodromy(p, 1));
  const OpMatrix rl = r_cleared(p.n, 1, -1, 0, p.eta);
  const OpMatrix rr = r_cleared(p.n, 1, -1, 0, eta_rhs.value_or(p.eta));
  return compare(rl * t1 * t2, t2 * t1 * rr);
}

ExactCheck reflection_K_minus(const QParams& p) {
  check_params(p);
  const int n = p.n;
  const OpMatrix k1 = embed_first(qK_minus(n, 0, 0, p.xi_minus));
  const OpMatrix k2 = embed_second(qK_minus(n, 1, 0, p.xi_minus));
  const OpMatrix rm = r_cleared(n, 1, -1, 0, p.eta);
  const OpMatrix rp = r_cleared(n, 1, 1, 0, p.eta);
  return compare(rm * k1 * rp * k2, k2 * rp * k1 * rm);
}

ExactCheck reflection_K_plus(const QParams& p, const mpq_class& shift) {
  check_params(p);
  const int n = p.n;
  const OpMatrix k1 = embed_first(qK_plus(n, 0, shift, p.xi_plus).transpose());
  const OpMatrix k2 = embed_second(qK_plus(n, 1, shift, p.xi_plus).transpose());
  const OpMatrix ra = r_cleared(n, -1, 1, 0, p.eta);
  const OpMatrix rb = r_cleared(n, -1, -1, -2 * p.eta, p.eta);
  return compare(ra * k1 * rb * k2, k2 * rb * k1 * ra);
}

ExactCheck reflection_U(const QParams& p, bool force) {
  check_params(p);
  cost_guard(p, 2, force, "reflection algebra of U");
  const OpMatrix u1 = embed_first(qU(p, 0));
  const OpMatrix u2 = embed_second(qU(p, 1));
  const OpMatrix rm = r_cleared(p.n, 1, -1, 0, p.eta);
  const OpMatrix rp = r_cleared(p.n, 1, 1, -p.eta, p.eta);
  return compare(rm * u1 * rp * u2, u2 * rp * u1 * rm);
}

ExactCheck tau_commutativity_shifted(const QParams& p, const mpq_class& shift, bool force) {
  check_params(p);
  cost_guard(p, 1, force, "transfer-matrix commutativity");
  const OpPoly tl = qtau_shifted(p, shift, 0);
  const OpPoly tm = qtau_shifted(p, shift, 1);
  return compare(tl * tm, tm * tl);
}

ExactCheck tau_commutativity(const QParams& p, bool force) {
  return tau_commutativity_shifted(p, p.eta / 2, force);
}

ExactCheck tau_decomposition(const QParams& p) {
  const Abcd u = abcd_operators(p);
  OpPoly rhs = u.A + u.D;
  rhs *= p.xi_plus;
  rhs += shifted_var(p.n, 0, p.eta / 2) * u.B;
  return compare(qtau(p), rhs);
}

WeylOp hq_candidate(const QParams& p, const std::string& ordering) {
  const int n = p.n;
  auto q = [&](int i) { return WeylOp::q(n, i); };
  auto r = [&](int i) { return WeylOp::r(n, i, p.eta); };
  WeylOp h = WeylOp::constant(n, -p.eta * p.eta / 8);
  for (int i = 0; i + 1 < n; ++i) h += q(i + 1) * r(i);
  h += r(n - 1) * p.xi_plus;
  h += q(0) * p.xi_minus;
  for (int i = 0; i < n; ++i) {
    WeylOp sq(n);
    if (ordering == "qrqr") sq = q(i) * r(i) * q(i) * r(i);
    else if (ordering == "qqrr") sq = q(i) * q(i) * r(i) * r(i);
    else if (ordering == "rqrq") sq = r(i) * q(i) * r(i) * q(i);
    else if (ordering == "rrqq") sq = r(i) * r(i) * q(i) * q(i);
    else if (ordering == "sym") sq = (q(i) * r(i) * q(i) * r(i) + r(i) * q(i) * r(i) * q(i)) * mpq_class(1, 2);
    else throw Error(Errc::InvalidArgument, "unknown ordering " + ordering);
    h -= sq * mpq_class(1, 2);
  }
  return h;
}

namespace {

WeylOp extract_h(const QParams& p, const OpPoly& tau) {
  return tau.coeff(2 * p.n) * (sign_pow(p.n) / 2);
}

}  // namespace

HqReport hq_extract(const QParams& p, bool force) {
  check_params(p);
  cost_guard(p, 3, force, "quantum Hamiltonian extraction");
  const OpPoly tau = qtau(p);
  HqReport rep;
  rep.tau_degree = tau.degree(0);
  rep.leading_sign = tau.coeff(rep.tau_degree).constant_term();
  rep.extracted = extract_h(p, tau);
  rep.witness = WeylOp(p.n);
  for (const char* name : {"qrqr", "qqrr", "rqrq", "rrqq", "sym"}) {
    const WeylOp diff = rep.extracted - hq_candidate(p, name);
    rep.orderings.push_back({name, diff.is_zero()});
    if (diff.is_zero() && rep.matched.empty()) rep.matched = name;
    if (std::string(name) == "qrqr") rep.witness = diff;
  }
  if (rep.matched.empty())
    throw Error(Errc::NoOrderingMatches,
                "no ordering of (q r)^2 reproduces the extracted Hamiltonian; qrqr difference: " +
                    rep.witness.to_string());
  return rep;
}

ClassicalLimit hq_classical_limit(const QParams& p, bool force) {
  check_params(p);
  cost_guard(p, 3, force, "quantum Hamiltonian extraction");
  const int n = p.n;
  std::vector<mpq_class> etas;
  std::vector<WeylOp> syms;
  for (int k = 1; k <= 4; ++k) {
    QParams pk = p;
    pk.eta = p.eta / k;
    etas.push_back(pk.eta);
    syms.push_back(symbol(extract_h(pk, qtau(pk)), pk.eta));
  }
  // all monomials that appear anywhere
  std::vector<Mono> monos;
  for (const auto& s : syms)
    for (const auto& [m, c] : s.terms()) monos.push_back(m);
  std::sort(monos.begin(), monos.end());
  monos.erase(std::unique(monos.begin(), monos.end()), monos.end());

  auto coeff = [](const WeylOp& w, const Mono& m) {
    auto it = w.terms().find(m);
    return it == w.terms().end() ? mpq_class(0) : it->second;
  };
  // quadratic Lagrange interpolation through the first three points
  auto interp = [&](const Mono& m, const mpq_class& x) {
    mpq_class acc = 0;
    for (int a = 0; a < 3; ++a) {
      mpq_class basis = 1;
      for (int b = 0; b < 3; ++b)
        if (b != a) basis *= (x - etas[b]) / (etas[a] - etas[b]);
      acc += basis * coeff(syms[a], m);
    }
    return acc;
  };
  ClassicalLimit out{true, false, WeylOp(n)};
  for (const Mono& m : monos) {
    if (interp(m, etas[3]) != coeff(syms[3], m)) out.quadratic_in_eta = false;
    out.limit.add_term(m, interp(m, 0));
  }
  // classical image of the open-chain Hamiltonian, θ± ↦ ξ±
  WeylOp cl(n);
  auto mono = [](std::initializer_list<std::pair<int, int>> qs, std::initializer_list<std::pair<int, int>> rs) {
    Mono m{};
    for (auto [i, e] : qs) m.e[i] = static_cast<std::uint8_t>(e);
    for (auto [i, e] : rs) m.e[kMaxSites + i] = static_cast<std::uint8_t>(e);
    return m;
  };
  for (int i = 0; i + 1 < n; ++i) cl.add_term(mono({{i + 1, 1}}, {{i, 1}}), 1);
  for (int i = 0; i < n; ++i) cl.add_term(mono({{i, 2}}, {{i, 2}}), mpq_class(-1, 2));
  cl.add_term(mono({{0, 1}}, {}), p.xi_minus);
  cl.add_term(mono({}, {{n - 1, 1}}), p.xi_plus);
  out.matches_classical = out.limit == cl;
  return out;
}

Abcd abcd_operators(const QParams& p, int var) {
  const OpMatrix u = qU(p, var);
  Abcd out{u(0, 0), u(0, 1), u(1, 0), u(1, 1), OpPoly(p.n)};
  OpPoly a = u(0, 0);
  a *= p.eta;
  out.Dstar = OpPoly::var(p.n, var, 2) * u(1, 1) - a;
  return out;
}

namespace {

OpPoly lin(const QParams& p, const mpq_class& a, const mpq_class& b, const mpq_class& c) {
  return OpPoly::linear(p.n, a, b, c);
}

}  // namespace

ExactCheck check_BB(const QParams& p, bool force) {
  check_params(p);
  cost_guard(p, 1, force, "B(λ)B(μ) commutation");
  const Abcd l = abcd_operators(p, 0), m = abcd_operators(p, 1);
  return compare(l.B * m.B, m.B * l.B);
}

ExactCheck check_AB(const QParams& p, bool force) {
  check_params(p);
  cost_guard(p, 1, force, "A(λ)B(μ) commutation");
  const mpq_class& e = p.eta;
  const Abcd l = abcd_operators(p, 0), m = abcd_operators(p, 1);
  const OpPoly two_mu = lin(p, 0, 2, 0);
  const OpPoly lhs = lin(p, 1, -1, 0) * lin(p, 1, 1, 0) * two_mu * (l.A * m.B);
  OpPoly rhs = two_mu * lin(p, 1, -1, -e) * lin(p, 1, 1, -e) * (m.B * l.A);
  rhs += (lin(p, 0, 2, -e) * lin(p, 1, 1, 0)) * e * (l.B * m.A);
  rhs -= lin(p, 1, -1, 0) * e * (l.B * m.Dstar);
  return compare(lhs, rhs);
}

ExactCheck check_DB(const QParams& p, DBVariant v, bool force) {
  check_params(p);
  cost_guard(p, 1, force, "D*(λ)B(μ) commutation");
  const mpq_class& e = p.eta;
  const Abcd l = abcd_operators(p, 0), m = abcd_operators(p, 1);
  const OpPoly two_mu = lin(p, 0, 2, 0);
  const OpPoly f = v == DBVariant::DropFactor ? OpPoly::scalar(p.n, 1) : lin(p, 2, 0, e);  // 2λ + η
  const mpq_class second = v == DBVariant::Printed ? mpq_class(-e) : mpq_class(e);
  const OpPoly lhs = lin(p, 1, -1, 0) * lin(p, 1, 1, 0) * two_mu * (l.Dstar * m.B);
  OpPoly rhs = two_mu * lin(p, 1, -1, e) * lin(p, 1, 1, second) * (m.B * l.Dstar);
  rhs += (f * lin(p, 0, 2, -e) * lin(p, 1, -1, 0)) * e * (l.B * m.A);
  rhs -= (f * lin(p, 1, 1, 0)) * e * (l.B * m.Dstar);
  return compare(lhs, rhs);
}

Asymptotics abcd_asymptotics(const QParams& p) {
  const int n = p.n;
  const Abcd u = abcd_operators(p);
  const mpq_class sg = sign_pow(n);
  const WeylOp rN = WeylOp::r(n, n - 1, p.eta);
  WeylOp S(n);
  for (int i = 0; i < n; ++i) S += WeylOp::q(n, i) * WeylOp::r(n, i, p.eta);
  const WeylOp half = WeylOp::constant(n, p.eta / 2);
  Asymptotics a{};
  a.A_leading = u.A.coeff(2 * n) == rN * sg;
  a.A_next = u.A.coeff(2 * n - 1) == rN * (S + half) * sg;
  a.D_leading = u.D.coeff(2 * n) == rN * sg;
  a.D_next = u.D.coeff(2 * n - 1) == rN * (S - half) * sg;
  a.B_degree = u.B.degree(0) == 2 * n + 1;
  a.B_leading = u.B.coeff(2 * n + 1) == WeylOp::constant(n, sg);
  a.B_vanishes_at_half_eta = u.B.eval_var(0, p.eta / 2).is_zero();
  return a;
}

std::vector<QExp> degree_basis(int n, int m) {
  if (n < 1 || n > kMaxSites || m < 0) throw Error(Errc::InvalidArgument, "bad (N, m)");
  std::vector<QExp> out;
  QExp cur{};
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n - 1) {
      cur[i] = static_cast<std::uint8_t>(left);
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur[i] = static_cast<std::uint8_t>(e);
      rec(i + 1, left - e);
    }
    cur[i] = 0;
  };
  rec(0, m);
  std::sort(out.begin(), out.end());
  return out;
}

DegreeRep rep_on_degree(const OpPoly& op, int n, int m) {
  if (op.n_sites() != n) throw Error(Errc::SiteCountMismatch, "operator acts on a different site count");
  if (op.degree(1) > 0) throw Error(Errc::InvalidArgument, "rep_on_degree needs a polynomial in λ only");
  DegreeRep rep;
  rep.n = n;
  rep.m = m;
  rep.basis = degree_basis(n, m);
  const std::size_t dim = rep.basis.size();
  std::map<QExp, std::size_t> index;
  for (std::size_t i = 0; i < dim; ++i) index[rep.basis[i]] = i;
  const int deg = std::max(op.degree(0), 0);
  rep.coeff.assign(static_cast<std::size_t>(deg + 1),
                   std::vector<std::vector<mpq_class>>(dim, std::vector<mpq_class>(dim, 0)));
  for (const auto& [key, w] : op.terms()) {
    auto& mat = rep.coeff[static_cast<std::size_t>(key.first)];
    for (std::size_t col = 0; col < dim; ++col) {
      const QPoly img = apply(w, QPoly{{rep.basis[col], mpq_class(1)}}, n);
      for (const auto& [e, c] : img) {
        auto it = index.find(e);
        if (it == index.end())
          throw Error(Errc::DegreeNotPreserved,
                      "operator maps basis vector " + std::to_string(col) + " out of degree " +
                          std::to_string(m));
        mat[it->second][col] += c;
      }
    }
  }
  return rep;
}

Eigen::MatrixXcd DegreeRep::power(std::size_t k) const {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  if (k >= coeff.size()) return out;
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) out(i, j) = coeff[k][i][j].get_d();
  return out;
}

Eigen::MatrixXcd DegreeRep::evaluate(const cplx& lambda) const {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t k = coeff.size(); k-- > 0;) acc = acc * lambda + power(k);
  return acc;
}

}  // namespace dst
