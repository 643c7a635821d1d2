#include "maxstab/params.hpp"

#include "maxstab/errors.hpp"

namespace maxstab {

bool ParamBox::contains(const ParamVector& psi) const {
  const Eigen::Vector4d v = psi.to_vector();
  return (v.array() >= lower.array()).all() && (v.array() <= upper.array()).all();
}

ParamVector ParamBox::clamp(const ParamVector& psi) const {
  Eigen::Vector4d v = psi.to_vector();
  v = v.cwiseMax(lower).cwiseMin(upper);
  return ParamVector::from_vector(v);
}

ParamVector ParamBox::center() const { return ParamVector::from_vector(0.5 * (lower + upper)); }

void ParamBox::validate() const {
  if (!(floor_c > 0.0)) throw ConfigError("parameter box: floor_c must be positive");
  if (!((lower.array() < upper.array()).all()))
    throw ConfigError("parameter box: lower must be strictly below upper");
  if (lower[0] < floor_c || lower[2] < floor_c)
    throw ConfigError("parameter box: theta lower bounds must be at least floor_c");
  if (upper[1] > 2.0 || upper[3] > 2.0)
    throw ConfigError("parameter box: alpha upper bounds must not exceed 2");
  if (lower[1] <= 0.0 || lower[3] <= 0.0)
    throw ConfigError("parameter box: alpha lower bounds must be positive");
}

ParamVector IdentifiabilityMask::apply(const ParamVector& psi) const {
  Eigen::Vector4d v = psi.to_vector();
  for (int i = 0; i < 4; ++i)
    if (!free[i]) v[i] = fixed_values[i];
  return ParamVector::from_vector(v);
}

IdentifiabilityMask identifiability_mask(int r, int p, const ParamVector& pins) {
  if (r < 0 || p < 0) throw ConfigError("identifiability mask: r and p must be nonnegative");
  if (r == 0 && p == 0) throw ConfigError("no pairs selected");
  IdentifiabilityMask mask;
  mask.free = {r >= 1, r > 1, p >= 1, p > 1};
  mask.fixed_values = pins.to_vector();
  return mask;
}

}  // namespace maxstab
