#pragma once

#include "dst/common.hpp"

namespace dst {

/// log Γ(z) for complex z (Lanczos, g = 7, reflection for Re z < 1/2).
/// The imaginary part is some branch of arg Γ, not necessarily the principal
/// one — only differences under exp() are meaningful. Throws GammaPole at
/// z = 0, −1, −2, …
cplx log_gamma(cplx z);

}  // namespace dst
