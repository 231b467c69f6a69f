#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "metalab/env.hpp"
#include "metalab/hypo.hpp"

namespace metalab {

/// A point (v, y) of V x Y.
struct HeadPoint {
  std::vector<double> v;
  double y = 0.0;
  friend bool operator==(const HeadPoint&, const HeadPoint&) = default;
};

enum class ProbeSpace { Head, Rep };

/// Finitely supported probability measure, either on V x Y (for the head
/// pseudo-metric) or on Z (for the representation pseudo-metric).
class ProbeMeasure {
 public:
  static ProbeMeasure on_heads(std::vector<std::pair<HeadPoint, double>> atoms);
  static ProbeMeasure on_reps(std::vector<std::pair<LabeledExample, double>> atoms);

  ProbeSpace space() const { return space_; }
  std::size_t size() const { return probs_.size(); }
  std::span<const double> probabilities() const { return probs_; }
  /// Throw InvalidArgument when the measure lives on the other space.
  std::span<const HeadPoint> head_atoms() const;
  std::span<const LabeledExample> rep_atoms() const;

 private:
  ProbeMeasure(ProbeSpace space, std::vector<double> probs);
  ProbeSpace space_;
  std::vector<double> probs_;
  std::vector<HeadPoint> head_atoms_;
  std::vector<LabeledExample> rep_atoms_;
};

/// Finite pseudo-metric space stored as a dense row-major distance matrix.
/// Distinct points at distance zero are allowed.
class FinitePseudoMetricSpace {
 public:
  /// Checks shape, symmetry, zero diagonal and nonnegativity. The O(k^3)
  /// triangle check runs only when `check_triangle` is set.
  FinitePseudoMetricSpace(std::vector<std::size_t> ids, std::vector<double> dist,
                          bool check_triangle = true);

  std::size_t size() const { return ids_.size(); }
  std::span<const std::size_t> ids() const { return ids_; }
  /// Distance between the points at positions i and j.
  double distance(std::size_t i, std::size_t j) const { return dist_[i * ids_.size() + j]; }
  bool satisfies_triangle(double tolerance = 1e-9) const;
  double diameter() const;

 private:
  std::vector<std::size_t> ids_;
  std::vector<double> dist_;
};

enum class CoverMode { Exact, Greedy };

inline constexpr std::size_t kMaxExactCoverPoints = 12;

/// Centers (by id) such that every point lies within distance `eps` (closed
/// ball) of one of them. Exact returns a minimum-cardinality cover by subset
/// search and refuses spaces with more than kMaxExactCoverPoints points.
/// Greedy repeatedly takes the point covering most uncovered points, lowest
/// position on ties.
std::vector<std::size_t> epsilon_cover(const FinitePseudoMetricSpace& space, double eps,
                                       CoverMode mode);

bool is_epsilon_cover(const FinitePseudoMetricSpace& space, double eps,
                      std::span<const std::size_t> center_ids);

/// d_P(g, g') = sum_atoms p |l(y, g(v)) - l(y, g'(v))|.
double head_pseudo_dist(const Head& g, const Head& g2, const LossFn& lossfn,
                        const ProbeMeasure& probe);

/// d*(f, f') = sum_atoms p max_{g in G} |l_{g o f}(z) - l_{g o f'}(z)|.
double rep_pseudo_dist(const Representation& f, const Representation& f2,
                       const HypothesisFamily& family, const ProbeMeasure& probe);

/// The heads of `family` under d_P, ids = head indices.
FinitePseudoMetricSpace head_metric_space(const HypothesisFamily& family,
                                          const ProbeMeasure& probe);
/// The representations of `family` under d*, ids = representation indices.
FinitePseudoMetricSpace rep_metric_space(const HypothesisFamily& family,
                                         const ProbeMeasure& probe);

using ProbeDistance = std::function<double(std::size_t, std::size_t, const ProbeMeasure&)>;

/// max over `probes` of the eps-cover number of {0..element_count-1} under
/// each probe's distance.
///
/// The true capacity is a sup over all probability measures, which cannot be
/// evaluated; the max over a finite probe list is a lower bound on it (a
/// "probe lower bound"). Greedy covers can only overestimate each per-probe
/// cover number.
std::size_t capacity(std::size_t element_count, const ProbeDistance& dist, double eps,
                     std::span<const ProbeMeasure> probes, CoverMode mode);

/// Same, for prebuilt per-probe spaces.
std::size_t capacity(std::span<const FinitePseudoMetricSpace> spaces, double eps, CoverMode mode);

/// C(eps, l_G) probe lower bound.
std::size_t head_capacity(const HypothesisFamily& family, double eps,
                          std::span<const ProbeMeasure> probes, CoverMode mode);
/// C*_{l_G}(eps, F) probe lower bound.
std::size_t rep_capacity(const HypothesisFamily& family, double eps,
                         std::span<const ProbeMeasure> probes, CoverMode mode);

struct ProbeSpec {
  bool single_atoms = true;
  bool uniform_pairs = true;
  std::vector<ProbeMeasure> extra;  // appended when their space matches
};

/// Probe measures on V x Y built from the atoms (f(x), y) for every f in F and
/// every support point of `env`.
std::vector<ProbeMeasure> head_probes(const HypothesisFamily& family, const Environment& env,
                                      const ProbeSpec& spec);
/// Probe measures on Z built from the support points of `env`.
std::vector<ProbeMeasure> rep_probes(const Environment& env, const ProbeSpec& spec);

}  // namespace metalab
