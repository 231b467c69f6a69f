#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "metalab/env.hpp"

namespace metalab {

/// Coordinate-selection map X -> V. Row r of the v_dim x d selection matrix
/// has its single 1 in column `coordinates()[r]`.
class Representation {
 public:
  Representation(std::vector<std::size_t> coordinates, std::size_t input_dim);

  std::size_t index() const { return index_; }
  std::size_t v_dim() const { return coords_.size(); }
  std::size_t input_dim() const { return input_dim_; }
  std::span<const std::size_t> coordinates() const { return coords_; }

  /// Writes f(x) into `out` (size v_dim). `x` must have input_dim entries.
  void project(std::span<const double> x, std::span<double> out) const {
    for (std::size_t r = 0; r < coords_.size(); ++r) {
      out[r] = x[coords_[r]];
    }
  }
  std::vector<double> project(std::span<const double> x) const;

  std::vector<std::vector<int>> selection_matrix() const;

  friend bool operator==(const Representation& a, const Representation& b) {
    return a.coords_ == b.coords_ && a.input_dim_ == b.input_dim_;
  }

 private:
  friend class HypothesisFamily;
  std::vector<std::size_t> coords_;
  std::size_t input_dim_;
  std::size_t index_ = 0;
};

/// Affine head V -> W, w = <a, v> + b.
class Head {
 public:
  Head(std::vector<double> weights, double bias);

  std::size_t index() const { return index_; }
  std::size_t v_dim() const { return weights_.size(); }
  std::span<const double> weights() const { return weights_; }
  double bias() const { return bias_; }

  double apply(std::span<const double> v) const {
    double w = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
      w += weights_[k] * v[k];
    }
    return w + bias_;
  }

  friend bool operator==(const Head& a, const Head& b) {
    return a.weights_ == b.weights_ && a.bias_ == b.bias_;
  }

 private:
  friend class HypothesisFamily;
  std::vector<double> weights_;
  double bias_;
  std::size_t index_ = 0;
};

/// Clipped squared error l(y, w) = min((y - w)^2, M), valued in [0, M].
class LossFn {
 public:
  enum class Kind { ClippedSquared };

  static LossFn clipped_squared(double bound);

  Kind kind() const { return kind_; }
  double bound() const { return bound_; }

  double operator()(double y, double w) const {
    const double d = y - w;
    const double sq = d * d;
    return sq < bound_ ? sq : bound_;
  }

 private:
  LossFn(Kind kind, double bound) : kind_(kind), bound_(bound) {}
  Kind kind_;
  double bound_;
};

/// Evenly spaced values lo, lo + step, ..., lo + (count - 1) * step.
struct Grid {
  double lo = 0.0;
  double step = 1.0;
  std::size_t count = 1;

  double at(std::size_t k) const { return lo + static_cast<double>(k) * step; }
  void validate(const char* what) const;
};

struct FamilySpec {
  std::size_t v_dim = 1;
  Grid weights;
  Grid bias;
  /// Coordinate lists for F. Empty means every increasing v_dim-subset of
  /// {0, ..., d-1}, in lexicographic order.
  std::vector<std::vector<std::size_t>> selections;
};

/// H = G o F over finite enumerations F and G with a bounded loss.
class HypothesisFamily {
 public:
  /// Indices are reassigned to enumeration positions.
  HypothesisFamily(std::vector<Representation> reps, std::vector<Head> heads, LossFn loss);

  /// Heads enumerate every grid combination; the bias is the most
  /// significant digit, then weight 0, weight 1, ...
  static HypothesisFamily from_spec(std::size_t input_dim, const FamilySpec& spec, LossFn loss);

  std::span<const Representation> reps() const { return reps_; }
  std::span<const Head> heads() const { return heads_; }
  const Representation& rep(std::size_t i) const { return reps_.at(i); }
  const Head& head(std::size_t i) const { return heads_.at(i); }
  const LossFn& loss() const { return loss_; }
  std::size_t input_dim() const { return reps_.front().input_dim(); }
  std::size_t v_dim() const { return reps_.front().v_dim(); }

 private:
  std::vector<Representation> reps_;
  std::vector<Head> heads_;
  LossFn loss_;
};

inline constexpr std::size_t kMaxHeads = 1'000'000;

double predict(const Representation& f, const Head& g, std::span<const double> x);

double loss(const LossFn& lossfn, double y, double w);

/// (1/m) sum_j l(y_j, g(f(x_j))).
double empirical_risk(const Representation& f, const Head& g, const LossFn& lossfn,
                      std::span<const LabeledExample> sample);
double empirical_risk(const Representation& f, const Head& g, const LossFn& lossfn,
                      const TaskSample& sample);

/// Exact R(g o f, D) = sum_z D({z}) l(y, g(f(x))).
double true_risk(const Representation& f, const Head& g, const LossFn& lossfn,
                 const FiniteTask& task);

struct InnerResult {
  std::size_t head_index;
  double value;
};

/// Exhaustive min over G of the empirical risk; ties go to the lowest index.
/// `value` is bit-identical to empirical_risk() for the returned head.
InnerResult inner_minimize(const Representation& f, const HypothesisFamily& family,
                           std::span<const LabeledExample> sample);
InnerResult inner_minimize(const Representation& f, const HypothesisFamily& family,
                           const TaskSample& sample);

}  // namespace metalab
