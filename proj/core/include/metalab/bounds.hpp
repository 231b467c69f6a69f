#pragma once

#include <cstddef>

namespace metalab {

/// Inputs of the two sample-complexity bounds.
struct BoundParams {
  double M = 1.0;      // loss bound
  double alpha = 0.5;  // deviation level
  double delta = 0.1;  // confidence
  double nu = 1.0;     // deviation scale of d_nu
  double eps1 = 0.0;   // head cover radius
  double eps2 = 0.0;   // representation cover radius
  std::size_t n = 1;   // task count (first bound only)
  std::size_t cap_heads = 1;        // C(eps1, l_G)
  std::size_t cap_reps = 1;         // C*_{l_G}(eps2, F)
  std::size_t cap_reps_coarse = 1;  // C*_{l_G}(alpha nu / 16, F), task-count bound only
};

inline constexpr double kRadiusTolerance = 1e-12;

/// m >= 8M/(alpha^2 nu) (ln C(eps1) + (1/n) ln(4 C*(eps2) / delta)),
/// requiring eps1 + eps2 = alpha nu / 8. Returned before rounding.
double theorem1_m_real(const BoundParams& p);

/// Ceiling of theorem1_m_real, at least 1.
std::size_t theorem1_m(const BoundParams& p);

struct SampleSizes {
  std::size_t n = 1;
  std::size_t m = 1;
};

/// Requires eps1 + eps2 = alpha nu / 16.
/// n >= 32M/alpha^2 ln(8 C*(alpha nu/16) / delta);
/// m >= 32M/(alpha^2 nu) [ln C(eps1) + (1/n) ln(8 C*(eps2) / delta)], with the
/// rounded n. Both are rounded up and clamped to at least 1.
SampleSizes theorem2_nm(const BoundParams& p);

double theorem2_n_real(const BoundParams& p);
double theorem2_m_real(const BoundParams& p, std::size_t n);

}  // namespace metalab
