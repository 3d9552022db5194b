#include "ebreg/posterior.hpp"

namespace ebreg {

void Hyperparams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
  if (!(sigma2 > 0.0)) throw ValidationError("sigma2 must be positive");
}

}  // namespace ebreg
