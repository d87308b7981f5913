#include "dst/common.hpp"

namespace dst {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::ZeroXi: return "ZeroXi";
    case Errc::WrongRegime: return "WrongRegime";
    case Errc::NonFiniteDerivative: return "NonFiniteDerivative";
    case Errc::NonFiniteState: return "NonFiniteState";
    case Errc::CoincidingSpectralParams: return "CoincidingSpectralParams";
    case Errc::ZeroSpectralParam: return "ZeroSpectralParam";
    case Errc::NewtonDiverged: return "NewtonDiverged";
    case Errc::PoleEncountered: return "PoleEncountered";
    case Errc::ZeroSeed: return "ZeroSeed";
    case Errc::LogBranch: return "LogBranch";
    case Errc::SingularG: return "SingularG";
    case Errc::SingularPrefactor: return "SingularPrefactor";
    case Errc::SiteCountMismatch: return "SiteCountMismatch";
    case Errc::CostGuard: return "CostGuard";
    case Errc::NoOrderingMatches: return "NoOrderingMatches";
    case Errc::DegreeNotPreserved: return "DegreeNotPreserved";
    case Errc::PoleInput: return "PoleInput";
    case Errc::GammaPole: return "GammaPole";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::RootCollision: return "RootCollision";
    case Errc::EvaluationAtRoot: return "EvaluationAtRoot";
  }
  return "Unknown";
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& w : s_) w = splitmix64(x);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform(double lo, double hi) {
  const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw Error(Errc::InvalidArgument, "uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next_u64());
  // rejection keeps the distribution exact
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return lo + static_cast<std::int64_t>(v % span);
}

}  // namespace dst
