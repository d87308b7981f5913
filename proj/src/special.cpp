#include "dst/special.hpp"

#include <array>
#include <numbers>

namespace dst {

namespace {

constexpr double kG = 7.0;
constexpr std::array<double, 9> kCoef = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

}  // namespace

cplx log_gamma(cplx z) {
  const double pi = std::numbers::pi;
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
    throw Error(Errc::GammaPole, "log_gamma at a nonpositive integer");
  if (z.real() < 0.5) {
    // Γ(z)Γ(1−z) = π / sin(πz)
    return std::log(pi) - std::log(std::sin(pi * z)) - log_gamma(1.0 - z);
  }
  z -= 1.0;
  cplx x = kCoef[0];
  for (std::size_t i = 1; i < kCoef.size(); ++i) x += kCoef[i] / (z + static_cast<double>(i));
  const cplx t = z + kG + 0.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace dst
