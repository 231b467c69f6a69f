#include "metalab/learner.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "metalab/error.hpp"

namespace metalab {
namespace {

struct RowSplit {
  std::span<const LabeledExample> train;
  std::span<const LabeledExample> holdout;
};

RowSplit split_row(const TaskSample& row, double holdout_fraction) {
  const auto all = row.examples();
  if (holdout_fraction == 0.0) {
    return {all, {}};
  }
  const auto held = static_cast<std::size_t>(
      std::floor(holdout_fraction * static_cast<double>(all.size())));
  if (held == 0 || held >= all.size()) {
    throw InvalidArgument("holdout fraction " + std::to_string(holdout_fraction) +
                          " leaves an empty train or holdout part for m = " +
                          std::to_string(all.size()));
  }
  return {all.first(all.size() - held), all.last(held)};
}

}  // namespace

RepresentationLearner::RepresentationLearner(const HypothesisFamily& family, LearnerOptions options)
    : family_(&family), options_(options) {
  if (options_.strategy != OuterStrategy::Exhaustive) {
    throw InvalidArgument("learner: unsupported outer strategy");
  }
  if (!(options_.holdout_fraction >= 0.0 && options_.holdout_fraction < 1.0)) {
    throw InvalidArgument("learner: holdout_fraction must lie in [0, 1)");
  }
}

MetaTrainResult RepresentationLearner::meta_train(const MetaSample& meta) const {
  const auto& family = *family_;
  const auto& lossfn = family.loss();
  const double n = static_cast<double>(meta.n());

  std::vector<RowSplit> splits;
  splits.reserve(meta.n());
  for (const auto& row : meta.rows()) splits.push_back(split_row(row, options_.holdout_fraction));

  MetaTrainResult best;
  bool first = true;
  std::vector<TrainedTask> heads(meta.n());
  for (const auto& f : family.reps()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < splits.size(); ++i) {
      const InnerResult inner = inner_minimize(f, family, splits[i].train);
      heads[i] = {inner.head_index, inner.value};
      sum += splits[i].holdout.empty()
                 ? inner.value
                 : empirical_risk(f, family.head(inner.head_index), lossfn, splits[i].holdout);
    }
    const double value = sum / n;
    if (first || value < best.knowledge.outer_value) {
      best.knowledge = {f.index(), value};
      best.tasks = heads;
      first = false;
    }
  }
  return best;
}

TrainedTask RepresentationLearner::meta_test(const MetaKnowledge& mk,
                                             const TaskSample& target) const {
  if (mk.rep_index >= family_->reps().size()) {
    throw InvalidArgument("meta_test: representation index out of range");
  }
  const InnerResult inner = inner_minimize(family_->rep(mk.rep_index), *family_, target);
  return {inner.head_index, inner.value};
}

double empirical_meta_loss(const Representation& f, const HypothesisFamily& family,
                           const MetaSample& meta) {
  double sum = 0.0;
  for (const auto& row : meta.rows()) sum += inner_minimize(f, family, row).value;
  return sum / static_cast<double>(meta.n());
}

double env_optimal_loss(const Representation& f, const HypothesisFamily& family,
                        const Environment& env) {
  double total = 0.0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : family.heads()) {
      best = std::min(best, true_risk(f, g, family.loss(), env.task(i)));
    }
    total += env.probability(i) * best;
  }
  return std::min(total, family.loss().bound());
}

TransferRiskEstimate transfer_risk(const RepresentationLearner& learner, std::size_t rep_index,
                                   const Environment& env, std::size_t m, std::size_t trials,
                                   Rng& rng) {
  if (trials < 2) throw InvalidArgument("transfer_risk: needs at least 2 trials");
  if (m == 0) throw InvalidArgument("transfer_risk: m must be at least 1");
  const auto& family = learner.family();
  if (rep_index >= family.reps().size()) throw InvalidArgument("transfer_risk: rep_index out of range");
  const auto& f = family.rep(rep_index);
  const MetaKnowledge mk{rep_index, 0.0};

  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t task = sample_task(env, rng);
    const TaskSample s = sample_m(env.task(task), m, rng, task);
    const TrainedTask fitted = learner.meta_test(mk, s);
    const double risk = true_risk(f, family.head(fitted.head_index), family.loss(), env.task(task));
    const double delta = risk - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (risk - mean);
  }
  const double var = m2 / static_cast<double>(trials - 1);
  return {mean, std::sqrt(var / static_cast<double>(trials))};
}

}  // namespace metalab
