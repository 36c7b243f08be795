#include "gmi/rng.h"

#include <cmath>

namespace gmi {

double Rng::normal() {
  // Box-Muller; draws a fresh pair each call so the consumption pattern is
  // one call = two raw draws, with no carried state.
  double u1 = uniform();
  double u2 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Rng Rng::split(uint64_t stream) const {
  Rng child(state ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL));
  child.next();
  return child;
}

}  // namespace gmi
