#pragma once

#include <cstddef>
#include <vector>

#include "metalab/env.hpp"
#include "metalab/hypo.hpp"
#include "metalab/rng.hpp"

namespace metalab {

/// Tasks y = a x_r + b on the binary cube {0,1}^d, where r is the same
/// relevant coordinate for every task and (a, b) vary by task. Each task is
/// uniform over the cube; with `label_noise` > 0 every cube point appears twice,
/// with y shifted by -noise and +noise.
struct RelevantCoordinateSpec {
  std::size_t input_dim = 3;
  std::size_t relevant = 0;
  std::size_t task_count = 4;
  std::vector<double> slopes = {-1.0, -0.5, 0.5, 1.0};
  std::vector<double> intercepts = {-0.5, 0.0, 0.5};
  double label_noise = 0.0;
};

/// Draws each task's (a, b) uniformly from the configured slope and intercept
/// lists; tasks are equiprobable.
Environment relevant_coordinate_environment(const RelevantCoordinateSpec& spec, Rng& rng);

/// One-dimensional projections of every coordinate with heads on the grid
/// weights {-1, -0.5, 0, 0.5, 1} x bias {-1, -0.5, 0, 0.5, 1}.
HypothesisFamily relevant_coordinate_family(std::size_t input_dim, double loss_bound = 1.0);

}  // namespace metalab
