#include <cmath>

#include <doctest.h>

#include "dst/backlund.hpp"

using namespace dst;

namespace {

LatticeState<cplx> solvable(std::size_t n, Rng& rng) {
  LatticeState<cplx> x;
  for (std::size_t i = 0; i < n; ++i) {
    x.q.emplace_back(rng.uniform(1, 2), rng.uniform(-0.3, 0.3));
    x.r.emplace_back(rng.uniform(0.5, 1.5), rng.uniform(-0.3, 0.3));
  }
  return x;
}

double local_max(const LatticeState<cplx>& x, const BTResult<cplx>& res, const BTParams<cplx>& p) {
  const auto ends = bt_boundary(res.y, x.r, closure_xi(p.closure));
  const std::size_t n = x.n_sites();
  double m = 0;
  for (std::size_t i = 0; i < n; ++i)
    m = std::max(m, bt_local_identity_residual(x.q[i], x.r[i], res.y[i],
                                               i + 1 < n ? res.y[i + 1] : ends.y_next,
                                               i > 0 ? x.r[i - 1] : ends.X_prev, p.sigma));
  return m;
}

}  // namespace

TEST_CASE("g matrix") {
  CHECK(g_matrix(2.0, 0.5, 0.0, 0.0) == Mat2<double>::diag(1.0, 1.5));
  CHECK(g_matrix(2.0, 0.5, 0.7, -1.3).det() == doctest::Approx(1.5));
  CHECK(g_matrix(0.5, 0.5, 0.7, -1.3).det() == doctest::Approx(0.0));
}

TEST_CASE("seed solution at zero sigma") {
  LatticeState<double> x{{1.5, 1.2, 1.8}, {0.8, 1.1, 0.6}};
  BTParams<double> p;
  auto res = bt_solve(x, p);
  for (std::size_t i = 0; i < 3; ++i) CHECK(res.y[i] == doctest::Approx(-1.0 / x.r[i]));

  // y < 0 here, so the logarithm needs the complex branch
  LatticeState<cplx> xc{{1.5, 1.2}, {0.8, 1.1}};
  BTParams<cplx> pc;
  auto rc = bt_solve(xc, pc);
  CHECK(bt_generating_check(xc.q, xc.r, rc.y, rc.Y, cplx(0.0)) < 1e-12);
  CHECK(local_max(xc, rc, pc) < 1e-12);
}

TEST_CASE("single site against the quadratic formula") {
  // −1 + 1/y + 0.1/(2 − y) = 0  ⇔  y² − 2.9y + 2 = 0; continuation starts at y = 1
  LatticeState<double> x{{2.0}, {-1.0}};
  BTParams<double> p;
  p.sigma = 0.1;
  auto res = bt_solve(x, p);
  const double small = (2.9 - std::sqrt(2.9 * 2.9 - 8.0)) / 2.0;
  CHECK(res.y[0] == doctest::Approx(small).epsilon(1e-12));
  CHECK(res.newton_residual < 1e-12);
}

TEST_CASE("solved chains satisfy every identity") {
  Rng rng(5);
  for (std::size_t n = 1; n <= 4; ++n)
    for (double sigma : {0.1, 0.3, 1.0})
      for (double xi : {1.0, 2.0}) {
        auto x = solvable(n, rng);
        BTParams<cplx> p;
        p.sigma = sigma;
        if (xi != 1.0) p.closure = Quasiperiodic<cplx>{xi};
        auto res = bt_solve(x, p);
        CHECK(res.newton_residual < 1e-10);
        CHECK(bt_generating_check(x.q, x.r, res.y, res.Y, p.sigma, cplx(xi)) < 1e-9);
        CHECK(generating_gradient_fd_check(x.q, res.y, p.sigma, cplx(xi)) < 1e-6);
        CHECK(local_max(x, res, p) < 1e-9);
        auto inv = bt_invariance_residual(x, res, p);
        CHECK(inv.generator_diff < 1e-8);
        CHECK(inv.closure_defect < 1e-9);
        CHECK(v_composite_residual(x, res, p, 0.3, 0.7) < 1e-8);
      }
}

TEST_CASE("symplectic map") {
  Rng rng(8);
  auto x = solvable(2, rng);
  BTParams<cplx> p;
  p.sigma = 0.3;
  CHECK(bt_symplectic_residual(x, p) < 1e-5);

  std::vector<std::vector<double>> id(4, std::vector<double>(4, 0.0));
  for (int i = 0; i < 4; ++i) id[i][i] = 1.0;
  CHECK(symplectic_defect(id) == 0.0);
  id[0][0] = 2.0;
  CHECK(symplectic_defect(id) > 0.5);
}

TEST_CASE("negative controls") {
  Rng rng(13);
  auto x = solvable(3, rng);
  BTParams<cplx> p;
  p.sigma = 0.3;
  auto res = bt_solve(x, p);

  // unrelated quintuple
  CHECK(bt_local_identity_residual<cplx>(1.3, 0.4, -0.7, 2.1, 0.9, 0.3) > 1e-2);

  // y_{N+1} off the closure
  auto ends = bt_boundary(res.y, x.r, cplx(1.0));
  ends.y_next += 0.1;
  CHECK(bt_invariance_residual(x, res, p, ends).closure_defect > 1e-3);

  VInputs in{res.y[0], ends.y_next - 0.1, ends.X_prev, x.r.back(), 0.3, 0.3, 0.7};
  auto c = v_coefficients(in);
  auto good = v_dressing_residual(in, c);
  CHECK(good.plus < 1e-10);
  CHECK(good.minus < 1e-10);
  c.a += 1e-2;
  CHECK(v_dressing_residual(in, c).plus > 1e-3);
}

TEST_CASE("boundary dressing coefficients") {
  VInputs in{0.4, 1.3, 0.0, 0.9, 0.25, 0.0, 1.3};
  auto c = v_coefficients(in);
  CHECK(std::abs(c.a) == 0.0);
  CHECK(std::abs(c.b - 1.3 * 1.3) < 1e-15);
  CHECK(std::abs(c.d + 0.25 * 1.3) < 1e-15);
  CHECK(std::abs(c.C0) == 0.0);
  CHECK(std::abs(c.A1) == 0.0);
  CHECK(std::abs(c.delta) == 0.0);

  in.sigma = 0.0;
  c = v_coefficients(in);
  CHECK(std::abs(c.d) == 0.0);
  CHECK(std::abs(c.delta) == 0.0);
  // −λ/(λ ± 0) = −1
  auto vp = v_plus(c, 2.0, 0.0);
  CHECK(std::abs(vp.c + 1.0) < 1e-15);
}

TEST_CASE("real mode rejects a negative log argument") {
  CHECK_THROWS_AS(generating_function<double>({1.0}, {2.0}, 0.3, 1.0), Error);
}
