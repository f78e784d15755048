#pragma once

// The two worked examples used throughout the tests and fixtures.

#include "tslift/model.hpp"

namespace tslift::reference {

/// Fourth-order companion drift (characteristic polynomial s^4 + 4s^3 + 6s^2 + 5s + 2),
/// two noise channels, ten outputs with H(k, j) = |k - j| + 1.
CtModel example1();

/// Fine discrete model (e^{F/2}, G, H, J = 0) with step 0.5 built from example1().
DtModel example2_fine();

/// example2_fine() subsampled by 5 (step 2.5).
DtModel example2_coarse();

}  // namespace tslift::reference
