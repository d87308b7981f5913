#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace dst {

using cplx = std::complex<double>;

/// Machine-readable error codes. The CLI prints the name next to the message.
enum class Errc {
  InvalidArgument,
  IndexOutOfRange,
  ZeroXi,
  WrongRegime,
  NonFiniteDerivative,
  NonFiniteState,
  CoincidingSpectralParams,
  ZeroSpectralParam,
  NewtonDiverged,
  PoleEncountered,
  ZeroSeed,
  LogBranch,
  SingularG,
  SingularPrefactor,
  SiteCountMismatch,
  CostGuard,
  NoOrderingMatches,
  DegreeNotPreserved,
  PoleInput,
  GammaPole,
  NoConvergence,
  RootCollision,
  EvaluationAtRoot,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class S>
concept FloatScalar = std::is_same_v<S, double> || std::is_same_v<S, cplx>;

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const cplx& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const cplx& z) { return std::abs(z); }

/// Principal square root; real inputs must be positive.
inline double principal_sqrt(double x) {
  if (!(x > 0.0)) {
    throw Error(Errc::ZeroXi,
                "real-mode xi must be positive (xi^{1/2} must be real)");
  }
  return std::sqrt(x);
}
inline cplx principal_sqrt(const cplx& z) {
  if (z == cplx{0.0, 0.0}) throw Error(Errc::ZeroXi, "xi must be nonzero");
  return std::sqrt(z);
}

/// Deterministic uniform generator: splitmix64 seeding of xoshiro256**.
/// Bit-identical across platforms, unlike std::uniform_real_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next_u64();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  cplx uniform_complex(double lo, double hi) {
    const double re = uniform(lo, hi);
    return {re, uniform(lo, hi)};
  }
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  std::uint64_t s_[4];
};

template <class S>
S random_scalar(Rng& rng, double lo, double hi) {
  if constexpr (is_complex_v<S>) {
    return rng.uniform_complex(lo, hi);
  } else {
    return rng.uniform(lo, hi);
  }
}

}  // namespace dst
