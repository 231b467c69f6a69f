#pragma once

#include <cstddef>
#include <vector>

#include "metalab/env.hpp"
#include "metalab/hypo.hpp"

namespace metalab {

/// The learned shared representation f* and the outer objective it attains.
struct MetaKnowledge {
  std::size_t rep_index = 0;
  double outer_value = 0.0;
};

/// Head fitted to one task under a frozen representation.
struct TrainedTask {
  std::size_t head_index = 0;
  double empirical_value = 0.0;
};

struct MetaTrainResult {
  MetaKnowledge knowledge;
  std::vector<TrainedTask> tasks;  // one per meta-sample row
};

enum class OuterStrategy { Exhaustive };

struct LearnerOptions {
  OuterStrategy strategy = OuterStrategy::Exhaustive;
  /// Fraction of each row held out for the outer objective. With 0 the
  /// inner fit and the outer average use the whole row.
  double holdout_fraction = 0.0;
};

/// Bi-level representation learner: the outer problem picks f in F, the
/// inner problem fits one head per task by exhaustive search over G.
///
/// Holds a reference to the family; the family must outlive the learner.
class RepresentationLearner {
 public:
  explicit RepresentationLearner(const HypothesisFamily& family, LearnerOptions options = {});

  const HypothesisFamily& family() const { return *family_; }
  const LearnerOptions& options() const { return options_; }

  /// Minimises (1/n) sum_i min_g <l_{g o f}>_{row i} over f; ties go to the
  /// lowest representation index.
  MetaTrainResult meta_train(const MetaSample& meta) const;

  /// Fits a head for a new task with f frozen to `mk.rep_index`.
  TrainedTask meta_test(const MetaKnowledge& mk, const TaskSample& target) const;

 private:
  const HypothesisFamily* family_;
  LearnerOptions options_;
};

/// E*_G(f, z) = (1/n) sum_i min_g <l_{g o f}>_{z_i}.
double empirical_meta_loss(const Representation& f, const HypothesisFamily& family,
                           const MetaSample& meta);

/// E*_G(f, E) = sum_i p_i min_g R(g o f, D_i), computed exactly.
double env_optimal_loss(const Representation& f, const HypothesisFamily& family,
                        const Environment& env);

struct TransferRiskEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo transfer risk of the base learner S -> argmin_g <l_{g o f}>_S
/// with f fixed to `rep_index`: each trial draws a task, an m-sample,
/// fits a head and scores its exact true risk.
TransferRiskEstimate transfer_risk(const RepresentationLearner& learner, std::size_t rep_index,
                                   const Environment& env, std::size_t m, std::size_t trials,
                                   Rng& rng);

}  // namespace metalab
