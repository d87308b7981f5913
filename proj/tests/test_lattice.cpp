#include <cmath>

#include <doctest.h>

#include "dst/lattice.hpp"

using namespace dst;

namespace {

LatticeState<double> q12r34() { return {{1.0, 2.0}, {3.0, 4.0}}; }

double max_diff(const LatticeState<double>& a, const LatticeState<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.q.size(); ++i)
    m = std::max({m, std::abs(a.q[i] - b.q[i]), std::abs(a.r[i] - b.r[i])});
  return m;
}

}  // namespace

TEST_CASE("eom by hand substitution") {
  auto d = eom(q12r34(), BoundaryCondition<double>{Periodic{}});
  CHECK(d.dq == std::vector<double>{-1, -15});
  CHECK(d.dr == std::vector<double>{5, 29});

  d = eom(q12r34(), BoundaryCondition<double>{Open<double>{0.0, 0.0}});
  CHECK(d.dq == std::vector<double>{-1, -16});
  CHECK(d.dr == std::vector<double>{9, 29});

  // quasiperiodic closure: q_{N+1} = ξ q_1, r_0 = ξ r_N
  d = eom(q12r34(), BoundaryCondition<double>{Quasiperiodic<double>{2.0}});
  CHECK(d.dq[1] == doctest::Approx(2.0 - 16.0));
  CHECK(d.dr[0] == doctest::Approx(-8.0 + 9.0));
}

TEST_CASE("zero momentum reduces to a shift") {
  LatticeState<double> s{{0.5, -1.0, 2.0, 0.25}, {0, 0, 0, 0}};
  auto d = eom(s, BoundaryCondition<double>{Periodic{}});
  CHECK(d.dq == std::vector<double>{-1.0, 2.0, 0.25, 0.5});
  for (double x : d.dr) CHECK(x == 0.0);
}

TEST_CASE("hamiltonian values") {
  CHECK(hamiltonian(q12r34(), BoundaryCondition<double>{Periodic{}}) == doctest::Approx(-26.5));
  // 6 − 36.5 + 1·1 + 4·2
  CHECK(hamiltonian(q12r34(), BoundaryCondition<double>{Open<double>{1.0, 2.0}}) ==
        doctest::Approx(-21.5));

  LatticeState<double> zq{{0, 0, 0}, {0.4, -0.2, 0.9}};
  CHECK(hamiltonian(zq, BoundaryCondition<double>{Periodic{}}) == 0.0);
  CHECK(hamiltonian(zq, BoundaryCondition<double>{Open<double>{0.3, 0.7}}) ==
        doctest::Approx(0.9 * 0.7));
}

TEST_CASE("canonical brackets") {
  Rng rng(3);
  auto s = random_state<double>(3, rng, -1, 1);
  for (std::size_t k = 0; k < 3; ++k) {
    Observable<double> qk{"q", [k](const LatticeState<double>& x) { return x.q[k]; }};
    Observable<double> rk{"r", [k](const LatticeState<double>& x) { return x.r[k]; }};
    CHECK(std::abs(poisson_bracket(qk, rk, s) - 1.0) < 1e-9);
    for (std::size_t j = 0; j < 3; ++j) {
      Observable<double> qj{"q", [j](const LatticeState<double>& x) { return x.q[j]; }};
      CHECK(std::abs(poisson_bracket(qk, qj, s)) < 1e-9);
    }
  }
  BoundaryCondition<double> open = Open<double>{0.3, 0.7};
  Observable<double> h{"H", [open](const LatticeState<double>& x) { return hamiltonian(x, open); }};
  CHECK(std::abs(poisson_bracket(h, h, s)) < 1e-9);
}

TEST_CASE("flow of H is the equation of motion") {
  Rng a(7), b(11), c(13);
  CHECK(flow_consistency_residual(random_state<double>(4, a, -1, 1),
                                  BoundaryCondition<double>{Periodic{}}) < 1e-6);
  CHECK(flow_consistency_residual(random_state<double>(3, b, -1, 1),
                                  BoundaryCondition<double>{Open<double>{0.3, 0.7}}) < 1e-6);
  CHECK(flow_consistency_residual(random_state<double>(2, c, -1, 1),
                                  BoundaryCondition<double>{Quasiperiodic<double>{2.0}}) < 1e-6);

  Rng z(17);
  auto zs = random_state<cplx>(3, z, -1, 1);
  CHECK(flow_consistency_residual(zs, BoundaryCondition<cplx>{Quasiperiodic<cplx>{cplx(0.5, 1.0)}}) <
        1e-6);
}

TEST_CASE("rk4 local error is second order against Euler") {
  Rng rng(5);
  auto s = random_state<double>(4, rng, -0.5, 0.5);
  BoundaryCondition<double> bc = Periodic{};
  auto defect = [&](double dt) {
    auto next = step_rk4(s, bc, dt);
    auto d = eom(s, bc);
    LatticeState<double> euler = s;
    for (std::size_t i = 0; i < 4; ++i) {
      euler.q[i] += dt * d.dq[i];
      euler.r[i] += dt * d.dr[i];
    }
    return max_diff(next, euler);
  };
  const double ratio = defect(1e-2) / defect(5e-3);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("rk4 on the linear shift system") {
  // r = 0: q̇_1 = q_2, q̇_2 = q_1, so q = (cosh t, sinh t)
  LatticeState<double> s{{1.0, 0.0}, {0.0, 0.0}};
  for (int k = 0; k < 10; ++k) s = step_rk4(s, BoundaryCondition<double>{Periodic{}}, 0.1);
  CHECK(std::abs(s.q[0] - std::cosh(1.0)) < 1e-5);
  CHECK(std::abs(s.q[1] - std::sinh(1.0)) < 1e-5);
  CHECK(s.r[0] == 0.0);
}

TEST_CASE("rk4 reports blow-up") {
  LatticeState<double> s{{1e200}, {1e200}};
  try {
    step_rk4(s, BoundaryCondition<double>{Periodic{}}, 1.0);
    FAIL("expected NonFiniteState");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonFiniteState);
  }
}

TEST_CASE("state validation") {
  CHECK_THROWS_AS((LatticeState<double>{{1.0, 2.0}, {1.0}}), Error);
  CHECK_THROWS_AS((LatticeState<double>{{std::nan("")}, {1.0}}), Error);
  CHECK_THROWS_AS(principal_sqrt(-1.0), Error);
}
