#include "dst/weyl.hpp"

#include <sstream>

namespace dst {

namespace {

void check_n(int n) {
  if (n < 1 || n > kMaxSites)
    throw Error(Errc::InvalidArgument, "Weyl algebra supports 1.." + std::to_string(kMaxSites) + " sites");
}

void check_same(int a, int b) {
  if (a != b) throw Error(Errc::SiteCountMismatch, "operands act on different site counts");
}

// C(b,k) · c!/(c−k)!
mpz_class ordering_coeff(int b, int c, int k) {
  mpz_class binom, fall = 1;
  mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(b), static_cast<unsigned long>(k));
  for (int j = 0; j < k; ++j) fall *= c - j;
  return binom * fall;
}

// (q^a ∂^b)(q^c ∂^d), accumulated into out with weight w
void mono_product(const Mono& x, const Mono& y, const mpq_class& w, int n, WeylOp& out) {
  Mono base{};
  for (int i = 0; i < n; ++i) {
    base.e[i] = static_cast<std::uint8_t>(x.q(i) + y.q(i));
    base.e[kMaxSites + i] = static_cast<std::uint8_t>(x.d(i) + y.d(i));
  }
  // sites where reordering produces extra terms
  std::vector<int> busy;
  for (int i = 0; i < n; ++i)
    if (x.d(i) > 0 && y.q(i) > 0) busy.push_back(i);
  if (busy.empty()) {
    out.add_term(base, w);
    return;
  }
  // enumerate contraction counts k_i ≤ min(b_i, c_i)
  std::vector<int> k(busy.size(), 0);
  while (true) {
    Mono m = base;
    mpz_class c = 1;
    for (std::size_t j = 0; j < busy.size(); ++j) {
      const int i = busy[j];
      m.e[i] = static_cast<std::uint8_t>(m.e[i] - k[j]);
      m.e[kMaxSites + i] = static_cast<std::uint8_t>(m.e[kMaxSites + i] - k[j]);
      c *= ordering_coeff(x.d(i), y.q(i), k[j]);
    }
    out.add_term(m, w * mpq_class(c));
    std::size_t j = 0;
    for (; j < busy.size(); ++j) {
      const int i = busy[j];
      if (k[j] < std::min(x.d(i), y.q(i))) {
        ++k[j];
        break;
      }
      k[j] = 0;
    }
    if (j == busy.size()) break;
  }
}

}  // namespace

std::string to_string(const mpq_class& x) { return x.get_str(); }

WeylOp::WeylOp(int n_sites) : n_(n_sites) { check_n(n_sites); }

WeylOp WeylOp::constant(int n, const mpq_class& c) {
  WeylOp w(n);
  w.add_term(Mono{}, c);
  return w;
}

WeylOp WeylOp::q(int n, int i) {
  WeylOp w(n);
  if (i < 0 || i >= n) throw Error(Errc::IndexOutOfRange, "site index out of range");
  Mono m{};
  m.e[i] = 1;
  w.add_term(m, 1);
  return w;
}

WeylOp WeylOp::d(int n, int i) {
  WeylOp w(n);
  if (i < 0 || i >= n) throw Error(Errc::IndexOutOfRange, "site index out of range");
  Mono m{};
  m.e[kMaxSites + i] = 1;
  w.add_term(m, 1);
  return w;
}

WeylOp WeylOp::r(int n, int i, const mpq_class& eta) { return d(n, i) * mpq_class(-eta); }

mpq_class WeylOp::constant_term() const {
  auto it = terms_.find(Mono{});
  return it == terms_.end() ? mpq_class(0) : it->second;
}

void WeylOp::add_term(const Mono& m, const mpq_class& c) {
  if (c == 0) return;
  mpq_class v = c;
  v.canonicalize();  // callers may hand in e.g. mpq_class(2, 4)
  auto [it, inserted] = terms_.try_emplace(m, v);
  if (!inserted) {
    it->second += v;
    if (it->second == 0) terms_.erase(it);
  }
}

WeylOp& WeylOp::operator+=(const WeylOp& o) {
  check_same(n_, o.n_);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

WeylOp& WeylOp::operator-=(const WeylOp& o) {
  check_same(n_, o.n_);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

WeylOp& WeylOp::operator*=(const mpq_class& c_in) {
  mpq_class c = c_in;
  c.canonicalize();
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

WeylOp operator*(const WeylOp& a, const WeylOp& b) { return weyl_mul(a, b); }

WeylOp weyl_mul(const WeylOp& a, const WeylOp& b) {
  check_same(a.n_sites(), b.n_sites());
  WeylOp out(a.n_sites());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) mono_product(ma, mb, ca * cb, a.n_sites(), out);
  return out;
}

WeylOp commutator(const WeylOp& a, const WeylOp& b) { return a * b - b * a; }

std::string WeylOp::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c.get_str();
    for (int i = 0; i < n_; ++i) {
      if (m.q(i)) os << "*q" << i + 1 << (m.q(i) > 1 ? "^" + std::to_string(m.q(i)) : "");
    }
    for (int i = 0; i < n_; ++i) {
      if (m.d(i)) os << "*d" << i + 1 << (m.d(i) > 1 ? "^" + std::to_string(m.d(i)) : "");
    }
  }
  return os.str();
}

QPoly apply(const WeylOp& op, const QPoly& p, int n) {
  check_same(op.n_sites(), n);
  QPoly out;
  for (const auto& [m, c] : op.terms()) {
    for (const auto& [x, v] : p) {
      mpz_class fall = 1;
      QExp y = x;
      bool vanish = false;
      for (int i = 0; i < n && !vanish; ++i) {
        const int b = m.d(i), e = x[i];
        if (b > e) {
          vanish = true;
          break;
        }
        for (int j = 0; j < b; ++j) fall *= e - j;
        y[i] = static_cast<std::uint8_t>(e - b + m.q(i));
      }
      if (vanish) continue;
      mpq_class& slot = out[y];
      slot += c * v * mpq_class(fall);
    }
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

WeylOp symbol(const WeylOp& op, const mpq_class& eta) {
  if (eta == 0) throw Error(Errc::InvalidArgument, "eta must be nonzero");
  WeylOp out(op.n_sites());
  const mpq_class unit = mpq_class(-1) / eta;
  for (const auto& [m, c] : op.terms()) {
    int nb = 0;
    for (int i = 0; i < op.n_sites(); ++i) nb += m.d(i);
    mpq_class f = 1;
    for (int j = 0; j < nb; ++j) f *= unit;
    out.add_term(m, c * f);
  }
  return out;
}

// ---- OpPoly ----

OpPoly OpPoly::constant(const WeylOp& op) {
  OpPoly p(op.n_sites());
  p.add({0, 0}, op);
  return p;
}

OpPoly OpPoly::scalar(int n, const mpq_class& c) { return constant(WeylOp::constant(n, c)); }

OpPoly OpPoly::linear(int n, const mpq_class& a, const mpq_class& b, const mpq_class& c) {
  OpPoly p(n);
  p.add({1, 0}, WeylOp::constant(n, a));
  p.add({0, 1}, WeylOp::constant(n, b));
  p.add({0, 0}, WeylOp::constant(n, c));
  return p;
}

OpPoly OpPoly::var(int n, int v, const mpq_class& c) {
  return v == 0 ? linear(n, c, 0, 0) : linear(n, 0, c, 0);
}

WeylOp OpPoly::coeff(int dl, int dm) const {
  auto it = terms_.find({dl, dm});
  return it == terms_.end() ? WeylOp(n_) : it->second;
}

int OpPoly::degree(int v) const {
  int d = -1;
  for (const auto& [k, op] : terms_) d = std::max(d, v == 0 ? k.first : k.second);
  return d;
}

void OpPoly::add(const Key& k, const WeylOp& op) {
  check_same(n_, op.n_sites());
  if (op.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(k, op);
  if (!inserted) {
    it->second += op;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

OpPoly& OpPoly::operator+=(const OpPoly& o) {
  check_same(n_, o.n_);
  for (const auto& [k, op] : o.terms_) add(k, op);
  return *this;
}

OpPoly& OpPoly::operator-=(const OpPoly& o) {
  check_same(n_, o.n_);
  for (const auto& [k, op] : o.terms_) add(k, -op);
  return *this;
}

OpPoly& OpPoly::operator*=(const mpq_class& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, op] : terms_) op *= c;
  return *this;
}

OpPoly operator*(const OpPoly& a, const OpPoly& b) {
  check_same(a.n_, b.n_);
  OpPoly out(a.n_);
  for (const auto& [ka, oa] : a.terms_)
    for (const auto& [kb, ob] : b.terms_)
      out.add({ka.first + kb.first, ka.second + kb.second}, oa * ob);
  return out;
}

OpPoly OpPoly::negate_var(int v) const {
  OpPoly out = *this;
  for (auto& [k, op] : out.terms_) {
    if ((v == 0 ? k.first : k.second) % 2 != 0) op *= mpq_class(-1);
  }
  return out;
}

OpPoly OpPoly::swap_vars() const {
  OpPoly out(n_);
  for (const auto& [k, op] : terms_) out.add({k.second, k.first}, op);
  return out;
}

OpPoly OpPoly::eval_var(int v, const mpq_class& x) const {
  OpPoly out(n_);
  for (const auto& [k, op] : terms_) {
    const int e = v == 0 ? k.first : k.second;
    mpq_class f = 1;
    for (int j = 0; j < e; ++j) f *= x;
    out.add(v == 0 ? Key{0, k.second} : Key{k.first, 0}, op * f);
  }
  return out;
}

OpPoly commutator(const OpPoly& a, const OpPoly& b) { return a * b - b * a; }

// ---- OpMatrix ----

OpMatrix::OpMatrix(int rows, int cols, int n_sites)
    : rows_(rows), cols_(cols), n_(n_sites), e_(static_cast<std::size_t>(rows * cols), OpPoly(n_sites)) {}

OpMatrix OpMatrix::identity(int dim, int n_sites) {
  OpMatrix m(dim, dim, n_sites);
  for (int i = 0; i < dim; ++i) m(i, i) = OpPoly::scalar(n_sites, 1);
  return m;
}

OpPoly OpMatrix::trace() const {
  OpPoly t(n_);
  for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

OpMatrix OpMatrix::transpose() const {
  OpMatrix t(cols_, rows_, n_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

OpMatrix OpMatrix::negate_var(int v) const {
  OpMatrix t = *this;
  for (auto& p : t.e_) p = p.negate_var(v);
  return t;
}

OpMatrix operator*(const OpMatrix& a, const OpMatrix& b) {
  if (a.cols_ != b.rows_) throw Error(Errc::InvalidArgument, "matrix shape mismatch");
  check_same(a.n_, b.n_);
  OpMatrix c(a.rows_, b.cols_, a.n_);
  for (int i = 0; i < a.rows_; ++i)
    for (int k = 0; k < a.cols_; ++k) {
      const OpPoly& x = a(i, k);
      if (x.is_zero()) continue;
      for (int j = 0; j < b.cols_; ++j) {
        const OpPoly& y = b(k, j);
        if (y.is_zero()) continue;
        c(i, j) += x * y;
      }
    }
  return c;
}

OpMatrix operator+(const OpMatrix& a, const OpMatrix& b) {
  OpMatrix c = a;
  for (std::size_t i = 0; i < c.e_.size(); ++i) c.e_[i] += b.e_[i];
  return c;
}

OpMatrix operator-(const OpMatrix& a, const OpMatrix& b) {
  OpMatrix c = a;
  for (std::size_t i = 0; i < c.e_.size(); ++i) c.e_[i] -= b.e_[i];
  return c;
}

OpMatrix embed_first(const OpMatrix& a) {
  OpMatrix z(4, 4, a.n_sites());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) z(2 * i + k, 2 * j + k) = a(i, j);
  return z;
}

OpMatrix embed_second(const OpMatrix& a) {
  OpMatrix z(4, 4, a.n_sites());
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) z(2 * i + k, 2 * i + l) = a(k, l);
  return z;
}

namespace {

std::string describe(const OpPoly& diff) {
  const auto& [key, op] = *diff.terms().begin();
  std::ostringstream os;
  os << "lambda^" << key.first << " mu^" << key.second << ": " << op.to_string();
  return os.str();
}

}  // namespace

ExactCheck compare(const OpPoly& lhs, const OpPoly& rhs) {
  const OpPoly d = lhs - rhs;
  if (d.is_zero()) return {};
  return {false, describe(d)};
}

ExactCheck compare(const OpMatrix& lhs, const OpMatrix& rhs) {
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols())
    throw Error(Errc::InvalidArgument, "matrix shape mismatch");
  for (int i = 0; i < lhs.rows(); ++i)
    for (int j = 0; j < lhs.cols(); ++j) {
      const OpPoly d = lhs(i, j) - rhs(i, j);
      if (!d.is_zero())
        return {false, "entry (" + std::to_string(i) + "," + std::to_string(j) + ") " + describe(d)};
    }
  return {};
}

}  // namespace dst
