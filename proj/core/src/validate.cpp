#include "metalab/validate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metalab/error.hpp"

namespace metalab {

double d_nu(double a, double b, double nu) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw InvalidArgument("d_nu: arguments must be nonnegative");
  if (!(nu > 0.0)) throw InvalidArgument("d_nu: nu must be positive");
  // Ordered so that d_nu(a, b) and d_nu(b, a) round identically.
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  return (hi - lo) / (nu + lo + hi);
}

double wilson_upper_95(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw InvalidArgument("wilson_upper_95: no trials");
  if (successes > trials) throw InvalidArgument("wilson_upper_95: successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kWilsonZ95 * kWilsonZ95;
  const double centre = p + z2 / (2.0 * n);
  const double spread = kWilsonZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return std::min(1.0, (centre + spread) / (1.0 + z2 / n));
}

void GuaranteeConfig::validate() const {
  if (!env || !family) throw InvalidArgument("guarantee: environment and family are required");
  if (env->input_dim() != family->input_dim()) {
    throw InvalidArgument("guarantee: family input_dim does not match environment");
  }
  if (!(alpha > 0.0)) throw InvalidArgument("guarantee: alpha must be positive");
  if (!(nu > 0.0)) throw InvalidArgument("guarantee: nu must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("guarantee: delta must lie in (0, 1)");
  if (n == 0 || m == 0) throw InvalidArgument("guarantee: n and m must be at least 1");
  if (trials < kMinGuaranteeTrials) {
    throw InvalidArgument("guarantee: trials must be at least " +
                          std::to_string(kMinGuaranteeTrials));
  }
  if (theorem == Theorem::One && !fixed_tasks.empty() && fixed_tasks.size() != n) {
    throw InvalidArgument("guarantee: fixed_tasks must list exactly n task indices");
  }
  for (std::size_t t : fixed_tasks) {
    if (t >= env->size()) throw InvalidArgument("guarantee: fixed task index out of range");
  }
}

std::vector<std::size_t> GuaranteeConfig::resolved_fixed_tasks() const {
  if (!fixed_tasks.empty()) return fixed_tasks;
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i % env->size();
  return out;
}

TrialOutcome guarantee_trial(const GuaranteeConfig& cfg, std::size_t trial_index) {
  const Environment& env = *cfg.env;
  const HypothesisFamily& family = *cfg.family;
  const RepresentationLearner learner(family, cfg.learner);
  Rng rng(Rng::derive_seed(cfg.base_seed, trial_index));

  TrialOutcome out;
  out.trial_index = trial_index;
  if (cfg.theorem == Theorem::One) {
    const auto tasks = cfg.resolved_fixed_tasks();
    const MetaSample meta = sample_meta(env, cfg.n, cfg.m, FixedTasks{tasks}, rng);
    const MetaTrainResult trained = learner.meta_train(meta);
    const auto& f = family.rep(trained.knowledge.rep_index);
    double empirical = 0.0;
    double truth = 0.0;
    for (std::size_t i = 0; i < meta.n(); ++i) {
      const auto& g = family.head(trained.tasks[i].head_index);
      empirical += empirical_risk(f, g, family.loss(), meta.row(i));
      truth += true_risk(f, g, family.loss(), env.task(tasks[i]));
    }
    out.empirical_value = empirical / static_cast<double>(meta.n());
    out.true_value = truth / static_cast<double>(meta.n());
  } else {
    const MetaSample meta = sample_meta(env, cfg.n, cfg.m, EnvironmentDrawn{}, rng);
    const MetaTrainResult trained = learner.meta_train(meta);
    const auto& f = family.rep(trained.knowledge.rep_index);
    // Without a holdout the outer value already is E*_G(f*, Z).
    out.empirical_value = cfg.learner.holdout_fraction == 0.0
                              ? trained.knowledge.outer_value
                              : empirical_meta_loss(f, family, meta);
    out.true_value = env_optimal_loss(f, family, env);
  }
  out.deviation = d_nu(out.empirical_value, out.true_value, cfg.nu);
  out.exceeded = out.deviation > cfg.alpha;
  return out;
}

std::vector<TrialOutcome> run_guarantee_trials(const GuaranteeConfig& cfg) {
  cfg.validate();
  std::vector<TrialOutcome> out;
  out.reserve(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) out.push_back(guarantee_trial(cfg, t));
  return out;
}

GuaranteeReport summarize(std::span<const TrialOutcome> outcomes, double delta) {
  GuaranteeReport r;
  r.trials = outcomes.size();
  for (const auto& o : outcomes) r.violations += o.exceeded ? 1 : 0;
  r.frequency = static_cast<double>(r.violations) / static_cast<double>(r.trials);
  r.wilson_upper_95 = wilson_upper_95(r.violations, r.trials);
  r.delta = delta;
  r.pass = r.wilson_upper_95 <= delta;
  return r;
}

GuaranteeReport estimate_violation(const GuaranteeConfig& cfg) {
  const auto outcomes = run_guarantee_trials(cfg);
  return summarize(outcomes, cfg.delta);
}

}  // namespace metalab
