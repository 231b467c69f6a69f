#include "metalab/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "metalab/error.hpp"

namespace metalab {
namespace {

constexpr double kProbabilityTolerance = 1e-12;

// Checks a pmf, renormalises it in place and returns its running sums.
std::vector<double> normalise(std::vector<double>& probs, const char* what) {
  if (probs.empty()) {
    throw InvalidArgument(std::string(what) + ": support must be nonempty");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw InvalidArgument(std::string(what) + ": probability outside [0, 1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw InvalidArgument(std::string(what) + ": probabilities sum to " +
                          std::to_string(total) + ", expected 1 within 1e-12");
  }
  std::vector<double> cumulative(probs.size());
  double running = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] /= total;
    running += probs[i];
    cumulative[i] = running;
  }
  return cumulative;
}

std::size_t draw_categorical(std::span<const double> probs, std::span<const double> cumulative,
                             Rng& rng) {
  const double u = rng.uniform01();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it != cumulative.end()) {
    return static_cast<std::size_t>(it - cumulative.begin());
  }
  // u fell in the rounding gap above the last running sum.
  std::size_t last = probs.size() - 1;
  while (last > 0 && probs[last] == 0.0) {
    --last;
  }
  return last;
}

}  // namespace

bool LabeledExample::finite() const {
  return std::isfinite(y) && std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

FiniteTask::FiniteTask(std::vector<std::pair<LabeledExample, double>> support) {
  points_.reserve(support.size());
  probs_.reserve(support.size());
  for (auto& [z, p] : support) {
    if (!z.finite()) {
      throw InvalidArgument("task: support point has a non-finite component");
    }
    if (!points_.empty() && z.dim() != points_.front().dim()) {
      throw InvalidArgument("task: support points differ in input dimension");
    }
    points_.push_back(std::move(z));
    probs_.push_back(p);
  }
  cumulative_ = normalise(probs_, "task");
}

double FiniteTask::mass_of(const LabeledExample& z) const {
  double mass = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i] == z) {
      mass += probs_[i];
    }
  }
  return mass;
}

std::size_t FiniteTask::draw_index(Rng& rng) const {
  return draw_categorical(probs_, cumulative_, rng);
}

Environment::Environment(std::vector<std::pair<FiniteTask, double>> tasks, std::size_t input_dim)
    : input_dim_(input_dim) {
  if (input_dim == 0) {
    throw InvalidArgument("environment: input_dim must be positive");
  }
  tasks_.reserve(tasks.size());
  probs_.reserve(tasks.size());
  for (auto& [task, p] : tasks) {
    if (task.input_dim() != input_dim) {
      throw InvalidArgument("environment: task dimension " + std::to_string(task.input_dim()) +
                            " differs from input_dim " + std::to_string(input_dim));
    }
    tasks_.push_back(std::move(task));
    probs_.push_back(p);
  }
  cumulative_ = normalise(probs_, "environment");
}

std::vector<LabeledExample> Environment::support_union() const {
  std::vector<LabeledExample> out;
  for (const auto& task : tasks_) {
    for (const auto& z : task.points()) {
      if (std::find(out.begin(), out.end(), z) == out.end()) {
        out.push_back(z);
      }
    }
  }
  return out;
}

std::size_t Environment::draw_task(Rng& rng) const {
  return draw_categorical(probs_, cumulative_, rng);
}

TaskSample::TaskSample(std::vector<LabeledExample> examples, std::optional<std::size_t> origin)
    : examples_(std::move(examples)), origin_(origin) {
  if (examples_.empty()) {
    throw InvalidArgument("task sample: m must be at least 1");
  }
  const std::size_t d = examples_.front().dim();
  for (const auto& z : examples_) {
    if (z.dim() != d) {
      throw InvalidArgument("task sample: examples differ in input dimension");
    }
  }
}

MetaSample::MetaSample(std::vector<TaskSample> rows, SamplingMode mode)
    : rows_(std::move(rows)), mode_(std::move(mode)) {
  if (rows_.empty()) {
    throw InvalidArgument("meta-sample: n must be at least 1");
  }
  const std::size_t m = rows_.front().size();
  for (const auto& row : rows_) {
    if (row.size() != m) {
      throw InvalidArgument("meta-sample: rows must all have the same length m");
    }
  }
  if (const auto* fixed = std::get_if<FixedTasks>(&mode_)) {
    if (fixed->task_indices.size() != rows_.size()) {
      throw InvalidArgument("meta-sample: FixedTasks mode needs exactly n task indices");
    }
  }
}

std::size_t sample_task(const Environment& env, Rng& rng) { return env.draw_task(rng); }

TaskSample sample_m(const FiniteTask& task, std::size_t m, Rng& rng,
                    std::optional<std::size_t> origin) {
  if (m == 0) {
    throw InvalidArgument("sample_m: m must be at least 1");
  }
  std::vector<LabeledExample> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    out.push_back(task.point(task.draw_index(rng)));
  }
  return TaskSample(std::move(out), origin);
}

MetaSample sample_meta(const Environment& env, std::size_t n, std::size_t m,
                       const SamplingMode& mode, Rng& rng) {
  if (n == 0 || m == 0) {
    throw InvalidArgument("sample_meta: n and m must be at least 1");
  }
  std::vector<TaskSample> rows;
  rows.reserve(n);
  if (const auto* fixed = std::get_if<FixedTasks>(&mode)) {
    if (fixed->task_indices.size() != n) {
      throw InvalidArgument("sample_meta: FixedTasks mode needs exactly n task indices");
    }
    for (std::size_t idx : fixed->task_indices) {
      if (idx >= env.size()) {
        throw InvalidArgument("sample_meta: task index " + std::to_string(idx) +
                              " out of range for environment with " +
                              std::to_string(env.size()) + " tasks");
      }
    }
    for (std::size_t idx : fixed->task_indices) {
      rows.push_back(sample_m(env.task(idx), m, rng, idx));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = sample_task(env, rng);
      rows.push_back(sample_m(env.task(idx), m, rng, idx));
    }
  }
  return MetaSample(std::move(rows), mode);
}

double sample_marginal_prob(const Environment& env, std::span<const LabeledExample> sample) {
  double total = 0.0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    double product = env.probability(i);
    for (const auto& z : sample) {
      product *= env.task(i).mass_of(z);
      if (product == 0.0) {
        break;
      }
    }
    total += product;
  }
  return total;
}

double sample_marginal_prob(const Environment& env, const TaskSample& sample) {
  return sample_marginal_prob(env, sample.examples());
}

}  // namespace metalab
