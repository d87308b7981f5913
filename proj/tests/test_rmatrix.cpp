#include <cmath>

#include <doctest.h>

#include "dst/rmatrix.hpp"

using namespace dst;

namespace {

Mat2<cplx> k_minus(cplx l) { return {0.3, l, 0.0, 0.3}; }
Mat2<cplx> k_plus(cplx l) { return {0.7, 0.0, l, 0.7}; }

}  // namespace

TEST_CASE("classical r-matrix") {
  CHECK(max_norm(classical_r(1.0, 0.0) + permutation()) == 0.0);
  const cplx l(0.4, 0.2), m(-0.3, 1.1);
  CHECK(max_norm(classical_r(l, m) + classical_r(m, l)) < 1e-15);
  CHECK(max_norm(classical_r(l, m)) * std::abs(l - m) == doctest::Approx(1.0));
  CHECK_THROWS_AS(classical_r(l, l), Error);
}

TEST_CASE("linear bracket of the Lax matrix") {
  Rng rng(3);
  auto s = random_state<double>(3, rng, -1, 1);
  CHECK(cism1_residual(s, 0.7, -0.3, LocalLevel{1, 3}) == 0.0);
  CHECK(cism1_residual(s, 0.7, -0.3, LocalLevel{2, 2}) < 1e-6);
  for (int k = 0; k < 20; ++k) {
    auto sk = random_state<double>(3, rng, -1, 1);
    CHECK(cism1_residual(sk, cplx(0.9, 0.1), cplx(-0.2, 0.5), MonodromyLevel{}) < 1e-5);
  }
}

TEST_CASE("reflection equation for the boundary matrices") {
  Rng rng(5);
  auto id = reflection_residual_K([](cplx) { return Mat2<cplx>::identity(); }, 0.3, 0.8);
  CHECK(id.lambda_variant == 0.0);
  for (int k = 0; k < 50; ++k) {
    const cplx l = rng.uniform_complex(-2, 2), m = rng.uniform_complex(-2, 2);
    CHECK(reflection_residual_K(k_minus, l, m).lambda_variant < 1e-12);
    CHECK(reflection_residual_K(k_plus, l, m).lambda_variant < 1e-12);
  }
  // with the last factor taken at μ the equation no longer holds
  CHECK(reflection_residual_K(k_minus, 0.7, -0.4).mu_variant > 1e-3);
  // [[θ, λ²], [0, θ]] is not a solution
  auto wrong = [](cplx l) { return Mat2<cplx>{0.3, l * l, 0.0, 0.3}; };
  CHECK(reflection_residual_K(wrong, 0.7, -0.4).lambda_variant > 1e-3);
}

TEST_CASE("quadratic bracket of the dressed matrix") {
  Rng rng(7);
  const Open<double> bc{0.3, 0.7};
  for (int k = 0; k < 20; ++k) {
    auto s = random_state<double>(1, rng, -1, 1);
    CHECK(cism2_residual_U(s, bc, 0.9, 0.4) < 1e-5);
  }
  auto s3 = random_state<double>(3, rng, -1, 1);
  CHECK(cism2_residual_U(s3, bc, cplx(0.9, 0.2), cplx(0.4, -0.3)) < 1e-4);

  LatticeState<double> vac{{0.0}, {0.0}};
  CHECK(cism2_residual_U(vac, Open<double>{0.0, 0.0}, 0.9, 0.4) == 0.0);
}

TEST_CASE("difference engine converges at second order") {
  Rng rng(11);
  auto probe = fd_order_probe(random_state<double>(2, rng, -1, 1));
  CHECK(probe.steps.size() == 3);
  CHECK(probe.order >= 1.8);
}
