#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "metalab/env.hpp"
#include "metalab/hypo.hpp"
#include "metalab/learner.hpp"

namespace metalab {

/// Deviation metric d_nu(a, b) = |a - b| / (nu + a + b), valued in [0, 1).
/// Every guarantee check compares empirical and true losses through this
/// single function.
double d_nu(double a, double b, double nu);

/// One-sided 95% Wilson score upper bound for a binomial proportion.
double wilson_upper_95(std::size_t successes, std::size_t trials);

inline constexpr double kWilsonZ95 = 1.6448536269514722;
inline constexpr std::size_t kMinGuaranteeTrials = 100;

enum class Theorem { One, Two };

struct GuaranteeConfig {
  Theorem theorem = Theorem::Two;
  std::shared_ptr<const Environment> env;
  std::shared_ptr<const HypothesisFamily> family;
  LearnerOptions learner;
  double alpha = 0.5;
  double nu = 1.0;
  double delta = 0.1;
  std::size_t n = 1;
  std::size_t m = 1;
  std::size_t trials = 1000;
  std::uint64_t base_seed = 0;
  /// Task of each row for Theorem::One. Empty means row i uses task i mod |E|.
  std::vector<std::size_t> fixed_tasks;

  void validate() const;
  std::vector<std::size_t> resolved_fixed_tasks() const;
};

struct TrialOutcome {
  std::size_t trial_index = 0;
  double empirical_value = 0.0;
  double true_value = 0.0;
  double deviation = 0.0;
  bool exceeded = false;
};

struct GuaranteeReport {
  std::size_t violations = 0;
  std::size_t trials = 0;
  double frequency = 0.0;
  double wilson_upper_95 = 0.0;
  double delta = 0.0;
  bool pass = false;
};

/// One draw of the guarantee event, seeded by Rng::derive_seed(base_seed, trial_index).
///
/// Theorem::One: fixed tasks D_1..D_n; compares the mean empirical loss of the
/// learned (g_1..g_n, f*) on the sample with their mean exact true risk.
/// Theorem::Two: environment-drawn rows; compares E*_G(f*, Z) with E*_G(f*, E).
TrialOutcome guarantee_trial(const GuaranteeConfig& cfg, std::size_t trial_index);

std::vector<TrialOutcome> run_guarantee_trials(const GuaranteeConfig& cfg);

GuaranteeReport summarize(std::span<const TrialOutcome> outcomes, double delta);

/// Violation frequency over trials 0..trials-1; pass iff the Wilson upper
/// bound is at most delta.
GuaranteeReport estimate_violation(const GuaranteeConfig& cfg);

}  // namespace metalab
