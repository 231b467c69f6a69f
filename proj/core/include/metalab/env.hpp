#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "metalab/rng.hpp"

namespace metalab {

/// One labelled data point z = (x, y).
struct LabeledExample {
  std::vector<double> x;
  double y = 0.0;

  std::size_t dim() const { return x.size(); }
  bool finite() const;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

/// A task: a probability mass function over finitely many labelled examples.
///
/// Probabilities must sum to 1 within 1e-12 and are renormalised once at
/// construction. Duplicate support points are allowed; their masses add.
class FiniteTask {
 public:
  explicit FiniteTask(std::vector<std::pair<LabeledExample, double>> support);

  std::size_t size() const { return points_.size(); }
  std::size_t input_dim() const { return points_.front().dim(); }
  std::span<const LabeledExample> points() const { return points_; }
  std::span<const double> probabilities() const { return probs_; }
  const LabeledExample& point(std::size_t i) const { return points_.at(i); }
  double probability(std::size_t i) const { return probs_.at(i); }

  /// D({z}): total mass of support points equal to `z`.
  double mass_of(const LabeledExample& z) const;

  /// Index of one support point drawn from the pmf.
  std::size_t draw_index(Rng& rng) const;

 private:
  std::vector<LabeledExample> points_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

/// A finite environment: a pmf over tasks that share one input dimension.
class Environment {
 public:
  Environment(std::vector<std::pair<FiniteTask, double>> tasks, std::size_t input_dim);

  std::size_t size() const { return tasks_.size(); }
  std::size_t input_dim() const { return input_dim_; }
  const FiniteTask& task(std::size_t i) const { return tasks_.at(i); }
  double probability(std::size_t i) const { return probs_.at(i); }
  std::span<const FiniteTask> tasks() const { return tasks_; }
  std::span<const double> probabilities() const { return probs_; }

  /// Distinct support points across all tasks, in first-seen order.
  std::vector<LabeledExample> support_union() const;

  std::size_t draw_task(Rng& rng) const;

 private:
  std::vector<FiniteTask> tasks_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  std::size_t input_dim_;
};

/// An m-sample S = (z_1, ..., z_m) from one task.
class TaskSample {
 public:
  explicit TaskSample(std::vector<LabeledExample> examples,
             std::optional<std::size_t> origin_task_index = std::nullopt);

  std::size_t size() const { return examples_.size(); }
  std::span<const LabeledExample> examples() const { return examples_; }
  const LabeledExample& operator[](std::size_t j) const { return examples_[j]; }
  std::optional<std::size_t> origin_task_index() const { return origin_; }

  friend bool operator==(const TaskSample&, const TaskSample&) = default;

 private:
  std::vector<LabeledExample> examples_;
  std::optional<std::size_t> origin_;
};

/// Rows are sampled from the listed tasks, one row per index (product measure).
struct FixedTasks {
  std::vector<std::size_t> task_indices;
  friend bool operator==(const FixedTasks&, const FixedTasks&) = default;
};

/// Each row's task is drawn independently from the environment.
struct EnvironmentDrawn {
  friend bool operator==(const EnvironmentDrawn&, const EnvironmentDrawn&) = default;
};

using SamplingMode = std::variant<FixedTasks, EnvironmentDrawn>;

/// The n x m matrix of examples, one row per task.
class MetaSample {
 public:
  MetaSample(std::vector<TaskSample> rows, SamplingMode mode);

  std::size_t n() const { return rows_.size(); }
  std::size_t m() const { return rows_.front().size(); }
  std::span<const TaskSample> rows() const { return rows_; }
  const TaskSample& row(std::size_t i) const { return rows_.at(i); }
  const SamplingMode& mode() const { return mode_; }

  friend bool operator==(const MetaSample&, const MetaSample&) = default;

 private:
  std::vector<TaskSample> rows_;
  SamplingMode mode_;
};

std::size_t sample_task(const Environment& env, Rng& rng);

TaskSample sample_m(const FiniteTask& task, std::size_t m, Rng& rng,
                    std::optional<std::size_t> origin = std::nullopt);

/// For FixedTasks, `mode` must carry exactly n valid task indices.
MetaSample sample_meta(const Environment& env, std::size_t n, std::size_t m,
                       const SamplingMode& mode, Rng& rng);

/// D_E(S) = sum_i p_i prod_j D_i({z_j}).
double sample_marginal_prob(const Environment& env, std::span<const LabeledExample> sample);
double sample_marginal_prob(const Environment& env, const TaskSample& sample);

}  // namespace metalab
