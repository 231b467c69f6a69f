#include "metalab/reference.hpp"

#include "metalab/error.hpp"

namespace metalab {
namespace {

std::size_t pick(std::size_t count, Rng& rng) {
  return static_cast<std::size_t>(rng.uniform01() * static_cast<double>(count));
}

}  // namespace

Environment relevant_coordinate_environment(const RelevantCoordinateSpec& spec, Rng& rng) {
  if (spec.input_dim == 0 || spec.input_dim > 16) {
    throw InvalidArgument("relevant-coordinate environment: input_dim must lie in [1, 16]");
  }
  if (spec.relevant >= spec.input_dim) {
    throw InvalidArgument("relevant-coordinate environment: relevant coordinate out of range");
  }
  if (spec.task_count == 0 || spec.slopes.empty() || spec.intercepts.empty()) {
    throw InvalidArgument("relevant-coordinate environment: empty task parameter lists");
  }
  const std::size_t corners = std::size_t{1} << spec.input_dim;
  std::vector<std::pair<FiniteTask, double>> tasks;
  for (std::size_t t = 0; t < spec.task_count; ++t) {
    const double a = spec.slopes[pick(spec.slopes.size(), rng)];
    const double b = spec.intercepts[pick(spec.intercepts.size(), rng)];
    std::vector<std::pair<LabeledExample, double>> support;
    const double shifts = spec.label_noise > 0.0 ? 2.0 : 1.0;
    const double p = 1.0 / (static_cast<double>(corners) * shifts);
    for (std::size_t c = 0; c < corners; ++c) {
      std::vector<double> x(spec.input_dim);
      for (std::size_t k = 0; k < spec.input_dim; ++k) x[k] = static_cast<double>((c >> k) & 1U);
      const double y = a * x[spec.relevant] + b;
      if (spec.label_noise > 0.0) {
        support.push_back({LabeledExample{x, y - spec.label_noise}, p});
        support.push_back({LabeledExample{x, y + spec.label_noise}, p});
      } else {
        support.push_back({LabeledExample{std::move(x), y}, p});
      }
    }
    tasks.emplace_back(FiniteTask(std::move(support)), 1.0 / static_cast<double>(spec.task_count));
  }
  return Environment(std::move(tasks), spec.input_dim);
}

HypothesisFamily relevant_coordinate_family(std::size_t input_dim, double loss_bound) {
  FamilySpec spec;
  spec.v_dim = 1;
  spec.weights = Grid{-1.0, 0.5, 5};
  spec.bias = Grid{-1.0, 0.5, 5};
  return HypothesisFamily::from_spec(input_dim, spec, LossFn::clipped_squared(loss_bound));
}

}  // namespace metalab
