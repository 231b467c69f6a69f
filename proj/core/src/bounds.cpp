#include "metalab/bounds.hpp"

#include <cmath>
#include <string>

#include "metalab/error.hpp"

namespace metalab {
namespace {

void check_common(const BoundParams& p) {
  if (!(p.M > 0.0) || !std::isfinite(p.M)) throw InvalidArgument("bound: M must be positive");
  // alpha = 1 is admitted so that the unit-level worked cases evaluate.
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw InvalidArgument("bound: alpha must lie in (0, 1]");
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw InvalidArgument("bound: delta must lie in (0, 1)");
  if (!(p.nu > 0.0) || !std::isfinite(p.nu)) throw InvalidArgument("bound: nu must be positive");
  if (!(p.eps1 > 0.0 && p.eps2 > 0.0)) throw InvalidArgument("bound: eps1 and eps2 must be positive");
  if (p.n == 0) throw InvalidArgument("bound: n must be at least 1");
  if (p.cap_heads == 0 || p.cap_reps == 0 || p.cap_reps_coarse == 0) {
    throw InvalidArgument("bound: capacities must be at least 1");
  }
}

void check_radii(const BoundParams& p, double divisor) {
  const double target = p.alpha * p.nu / divisor;
  if (std::abs(p.eps1 + p.eps2 - target) > kRadiusTolerance) {
    throw InvalidArgument("bound: eps1 + eps2 must equal alpha*nu/" +
                          std::to_string(static_cast<int>(divisor)) + " = " +
                          std::to_string(target) + " within 1e-12");
  }
}

std::size_t round_up(double value) {
  if (!std::isfinite(value)) throw RuntimeError("bound: non-finite sample size");
  const double c = std::ceil(value);
  return c < 1.0 ? 1 : static_cast<std::size_t>(c);
}

}  // namespace

double theorem1_m_real(const BoundParams& p) {
  check_common(p);
  check_radii(p, 8.0);
  const double scale = 8.0 * p.M / (p.alpha * p.alpha * p.nu);
  return scale * (std::log(static_cast<double>(p.cap_heads)) +
                  std::log(4.0 * static_cast<double>(p.cap_reps) / p.delta) /
                      static_cast<double>(p.n));
}

std::size_t theorem1_m(const BoundParams& p) { return round_up(theorem1_m_real(p)); }

double theorem2_n_real(const BoundParams& p) {
  check_common(p);
  check_radii(p, 16.0);
  return 32.0 * p.M / (p.alpha * p.alpha) *
         std::log(8.0 * static_cast<double>(p.cap_reps_coarse) / p.delta);
}

double theorem2_m_real(const BoundParams& p, std::size_t n) {
  check_common(p);
  check_radii(p, 16.0);
  if (n == 0) throw InvalidArgument("bound: n must be at least 1");
  const double scale = 32.0 * p.M / (p.alpha * p.alpha * p.nu);
  return scale * (std::log(static_cast<double>(p.cap_heads)) +
                  std::log(8.0 * static_cast<double>(p.cap_reps) / p.delta) /
                      static_cast<double>(n));
}

SampleSizes theorem2_nm(const BoundParams& p) {
  SampleSizes out;
  out.n = round_up(theorem2_n_real(p));
  out.m = round_up(theorem2_m_real(p, out.n));
  return out;
}

}  // namespace metalab
