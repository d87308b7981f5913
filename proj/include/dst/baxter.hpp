#pragma once

// Baxter's Q through its kernel
//
//   w_i(σ) ∝ Γ(σ/η + 1) y_i⁻¹ z_i^{−σ/η−1} exp(z_i/η),   z_i = (y_{i+1} − q_i)/y_i,
//
// (the constant i/2π is dropped — only ratios of w are ever used), the
// gauge-triangularised kernel Lax matrix, the scalar TQ identity, and the
// Bethe equations of the quasiperiodic chain together with a cross-check
// against the operator spectrum on fixed-degree polynomials.
//
// Shifts "w(σ/η ± 1)" mean σ ↦ σ ± η.

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "dst/poly.hpp"
#include "dst/weyl.hpp"

namespace dst {

struct QKernelParams {
  cplx sigma{};
  double eta = 1.0;
  cplx xi{1.0, 0.0};
  std::vector<cplx> y;  // y_1..y_{N+1}, y_{N+1} = ξ y_1
  std::vector<cplx> q;  // q_1..q_N

  int n_sites() const { return static_cast<int>(q.size()); }
  void validate() const;  // PoleInput / InvalidArgument
};

/// Fills y_{N+1} = ξ y_1.
QKernelParams make_kernel_params(cplx sigma, double eta, cplx xi, std::vector<cplx> y,
                                 std::vector<cplx> q);

/// Admissible random configuration: y, q ~ U(−1,1)+iU(−1,1) rejected until
/// |y_i| and |y_{i+1} − q_i| exceed 0.2.
QKernelParams random_kernel_params(int n, cplx sigma, double eta, cplx xi, Rng& rng);

/// log w_i (1-based i), principal branches. `shift` moves σ by shift·η.
cplx log_w(int i, const QKernelParams& p, int shift = 0);

/// [[σ+η+q D, q], [D, 1]] with D = η∂_q log w_i = (σ+η)/(y_{i+1}−q_i) − 1/y_i.
Mat2<cplx> qj_lax(int i, const QKernelParams& p);
/// η∂_q log w_i by central differences of log_w (step h).
cplx qj_derivative_fd(int i, const QKernelParams& p, double h = 1e-5);

enum class Gauge { Correct, Printed };  // S_i = [[1, y_i],[0,1]] vs [[1, y_{i+1}],[0,1]]

struct Triangularized {
  double upper_right = 0.0;  // |(1,2) entry|
  cplx top{}, bottom{};      // diagonal of S_{i+1}⁻¹ L̃_i S_i
  double ratio_defect = 0.0;  // |top − σ r₋/η| + |bottom − η r₊|, r± = w(σ±η)/w(σ)
};

Triangularized gauge_triangularize(int i, const QKernelParams& p, Gauge g = Gauge::Correct);

struct TqReport {
  cplx J{};                  // tr[C(ξ) L̃_N⋯L̃_1], no gauge
  cplx rhs_literal{};        // ξ^{−1/2}σ^N Π w(σ−η)/w + ξ^{1/2} Π w(σ+η)/w
  cplx rhs_corrected{};      // same with η^{−N}, η^{+N} on the two terms
  double literal = 0.0;      // relative residuals
  double corrected = 0.0;
  double factor_minus = 1.0;  // η^{−N}
  double factor_plus = 1.0;   // η^{+N}
};

TqReport tq_scalar(const QKernelParams& p);
/// Relative residual of the η-corrected identity (= literal one at η = 1).
double tq_scalar_residual(const QKernelParams& p);

/// N = 1, η = 1, ξ = s² with every symbol rational: J = tr[C L̃] against
/// s⁻¹σ·(z/σ) + s(σ+1)/z, both sides in exact arithmetic.
bool tq_exact_n1(mpq_class sigma, mpq_class s, mpq_class y1, mpq_class q1);

// ---- Bethe roots ----

struct BetheConfig {
  int n = 1, m = 0;
  cplx xi{1.0, 0.0};
  double eta = 1.0;
  std::vector<cplx> roots;
  double residual = 0.0;  // max_j |F_j| / (|term₁| + |term₂|)
};

struct BetheOptions {
  int starts = 64;
  int max_iter = 100;
  double tol = 1e-13;
  double collision = 1e-10;
  double distinct = 1e-6;  // deflation: solution sets closer than this are the same
};

/// F_j = ξ^{−1/2}μ_j^N Π_i(μ_j−μ_i−η) + ξ^{1/2} Π_i(μ_j−μ_i+η), products over all i.
std::vector<cplx> bethe_equations(const BetheConfig& c);
double bethe_residual(const BetheConfig& c);

BetheConfig bethe_solve(int n, int m, cplx xi, double eta, std::uint64_t seed,
                        const BetheOptions& opt = {});
/// Up to max_sets distinct solution sets from the same start budget.
std::vector<BetheConfig> bethe_solve_all(int n, int m, cplx xi, double eta, std::uint64_t seed,
                                         int max_sets, const BetheOptions& opt = {});

/// Λ(σ0) = R(σ0)/Π(σ0 − μ_i).
cplx lambda_from_roots(const BetheConfig& c, cplx sigma0);
/// Coefficients (ascending) of R(σ) = ξ^{−1/2}σ^N Π(σ−μ_i−η) + ξ^{1/2}Π(σ−μ_i+η).
std::vector<cplx> bethe_rhs_poly(const BetheConfig& c);
struct PolyDivision {
  std::vector<cplx> quotient;   // ascending
  double remainder = 0.0;       // max |remainder coeff| / max |R coeff|
};
PolyDivision lambda_division(const BetheConfig& c);

/// Matrix of ξ^{−1/2}T₁₁(σ0) + ξ^{1/2}T₂₂(σ0) on degree-m polynomials.
Eigen::MatrixXcd transfer_on_degree(int n, int m, cplx xi, double eta, cplx sigma0,
                                    bool force = false);
/// |det(J − Λ I)| / max(‖J‖_F, |Λ|)^dim.
double eigen_membership_residual(const BetheConfig& c, cplx sigma0, bool force = false);

// ---- separated variables ----

enum class SovVariant { Printed, Alternate };  // (2u + η) vs (2u − η) in front of Δ⁻

struct SovParams {
  cplx xi_minus{}, xi_plus{};
  cplx eta{1.0, 0.0};
  std::vector<cplx> tau_poly;  // ascending
  std::vector<cplx> phi_poly;
};

cplx sov_residual(const SovParams& p, cplx u, SovVariant v = SovVariant::Printed);

cplx poly_eval(const std::vector<cplx>& c, cplx x);

}  // namespace dst
