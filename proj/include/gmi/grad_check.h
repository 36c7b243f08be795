#pragma once
#include "gmi/network.h"

namespace gmi {

// Compares analytic parameter gradients against central finite differences of
// the scalar loss sum(output), returning the max relative error
// |analytic - numeric| / max(|analytic|, |numeric|, eps). 64-bit networks
// only; nets above 10^4 parameters are rejected.
double grad_check(DNetwork& net, const DTensor& input, double eps = 1e-4);

// Comparison core against caller-supplied gradients (one tensor per entry of
// net.grads()). Lets tests verify that a wrong backward rule is detected.
double grad_check_against(DNetwork& net, const DTensor& input, double eps,
                          const std::vector<DTensor>& analytic);

}  // namespace gmi
