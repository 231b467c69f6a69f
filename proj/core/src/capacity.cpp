#include "metalab/capacity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "metalab/error.hpp"

namespace metalab {
namespace {

std::vector<double> checked_probabilities(std::vector<double> probs) {
  if (probs.empty()) throw InvalidArgument("probe: needs at least one atom");
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw InvalidArgument("probe: atom probability outside [0, 1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("probe: atom probabilities must sum to 1 within 1e-12");
  }
  for (double& p : probs) p /= total;
  return probs;
}

// Per-head losses at each atom of a head-space probe, laid out [head][atom].
std::vector<double> head_loss_table(const HypothesisFamily& family, const ProbeMeasure& probe) {
  const auto atoms = probe.head_atoms();
  const auto heads = family.heads();
  std::vector<double> table(heads.size() * atoms.size());
  for (std::size_t g = 0; g < heads.size(); ++g) {
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      if (atoms[a].v.size() != heads[g].v_dim()) {
        throw InvalidArgument("probe: atom dimension does not match head v_dim");
      }
      table[g * atoms.size() + a] = family.loss()(atoms[a].y, heads[g].apply(atoms[a].v));
    }
  }
  return table;
}

double weighted_gap(std::span<const double> p, const double* a, const double* b) {
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) d += p[k] * std::abs(a[k] - b[k]);
  return d;
}

// Losses l_{g o f}(z) laid out [rep][head] for one atom z.
std::vector<double> rep_loss_table(const HypothesisFamily& family, const LabeledExample& z) {
  const auto reps = family.reps();
  const auto heads = family.heads();
  if (z.dim() != family.input_dim()) {
    throw InvalidArgument("probe: atom dimension does not match family input_dim");
  }
  std::vector<double> table(reps.size() * heads.size());
  std::vector<double> v(family.v_dim());
  for (std::size_t f = 0; f < reps.size(); ++f) {
    reps[f].project(z.x, v);
    for (std::size_t g = 0; g < heads.size(); ++g) {
      table[f * heads.size() + g] = family.loss()(z.y, heads[g].apply(v));
    }
  }
  return table;
}

double max_gap(const double* a, const double* b, std::size_t count) {
  double best = 0.0;
  for (std::size_t g = 0; g < count; ++g) best = std::max(best, std::abs(a[g] - b[g]));
  return best;
}

std::vector<std::size_t> exact_cover(const FinitePseudoMetricSpace& space, double eps) {
  const std::size_t k = space.size();
  std::vector<std::uint32_t> ball(k, 0);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t p = 0; p < k; ++p) {
      if (space.distance(c, p) <= eps) ball[c] |= (1u << p);
    }
  }
  const std::uint32_t full = (k == 32) ? ~0u : ((1u << k) - 1u);
  for (std::size_t size = 1; size <= k; ++size) {
    // Subsets of one size in increasing numeric order (Gosper's hack).
    std::uint32_t subset = (1u << size) - 1u;
    while (subset <= full) {
      std::uint32_t covered = 0;
      for (std::uint32_t rest = subset; rest != 0; rest &= rest - 1) {
        covered |= ball[static_cast<std::size_t>(std::countr_zero(rest))];
      }
      if (covered == full) {
        std::vector<std::size_t> centers;
        for (std::uint32_t rest = subset; rest != 0; rest &= rest - 1) {
          centers.push_back(space.ids()[static_cast<std::size_t>(std::countr_zero(rest))]);
        }
        return centers;
      }
      const std::uint32_t low = subset & (~subset + 1u);
      const std::uint32_t ripple = subset + low;
      if (ripple == 0) break;
      subset = (((ripple ^ subset) >> 2) / low) | ripple;
    }
  }
  throw RuntimeError("exact cover search failed");  // unreachable: all points cover
}

std::vector<std::size_t> greedy_cover(const FinitePseudoMetricSpace& space, double eps) {
  const std::size_t k = space.size();
  std::vector<char> covered(k, 0);
  std::size_t remaining = k;
  std::vector<std::size_t> centers;
  while (remaining > 0) {
    std::size_t best = 0;
    std::size_t best_gain = 0;
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t gain = 0;
      for (std::size_t p = 0; p < k; ++p) {
        if (!covered[p] && space.distance(c, p) <= eps) ++gain;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    for (std::size_t p = 0; p < k; ++p) {
      if (!covered[p] && space.distance(best, p) <= eps) {
        covered[p] = 1;
        --remaining;
      }
    }
    centers.push_back(space.ids()[best]);
  }
  return centers;
}

std::vector<std::pair<LabeledExample, double>> single(const LabeledExample& z) {
  return {{z, 1.0}};
}

}  // namespace

ProbeMeasure::ProbeMeasure(ProbeSpace space, std::vector<double> probs)
    : space_(space), probs_(checked_probabilities(std::move(probs))) {}

ProbeMeasure ProbeMeasure::on_heads(std::vector<std::pair<HeadPoint, double>> atoms) {
  std::vector<double> probs;
  std::vector<HeadPoint> points;
  for (auto& [pt, p] : atoms) {
    if (pt.v.empty()) throw InvalidArgument("probe: head atom needs a nonempty v");
    if (!points.empty() && pt.v.size() != points.front().v.size()) {
      throw InvalidArgument("probe: head atoms differ in dimension");
    }
    points.push_back(std::move(pt));
    probs.push_back(p);
  }
  ProbeMeasure out(ProbeSpace::Head, std::move(probs));
  out.head_atoms_ = std::move(points);
  return out;
}

ProbeMeasure ProbeMeasure::on_reps(std::vector<std::pair<LabeledExample, double>> atoms) {
  std::vector<double> probs;
  std::vector<LabeledExample> points;
  for (auto& [z, p] : atoms) {
    if (!points.empty() && z.dim() != points.front().dim()) {
      throw InvalidArgument("probe: atoms differ in dimension");
    }
    points.push_back(std::move(z));
    probs.push_back(p);
  }
  ProbeMeasure out(ProbeSpace::Rep, std::move(probs));
  out.rep_atoms_ = std::move(points);
  return out;
}

std::span<const HeadPoint> ProbeMeasure::head_atoms() const {
  if (space_ != ProbeSpace::Head) throw InvalidArgument("probe lives on Z, not on V x Y");
  return head_atoms_;
}

std::span<const LabeledExample> ProbeMeasure::rep_atoms() const {
  if (space_ != ProbeSpace::Rep) throw InvalidArgument("probe lives on V x Y, not on Z");
  return rep_atoms_;
}

FinitePseudoMetricSpace::FinitePseudoMetricSpace(std::vector<std::size_t> ids,
                                                 std::vector<double> dist, bool check_triangle)
    : ids_(std::move(ids)), dist_(std::move(dist)) {
  const std::size_t k = ids_.size();
  if (k == 0) throw InvalidArgument("metric space: needs at least one point");
  if (dist_.size() != k * k) throw InvalidArgument("metric space: matrix is not k x k");
  for (std::size_t i = 0; i < k; ++i) {
    if (distance(i, i) != 0.0) throw InvalidArgument("metric space: nonzero diagonal");
    for (std::size_t j = 0; j < k; ++j) {
      const double d = distance(i, j);
      if (!std::isfinite(d) || d < 0.0) {
        throw InvalidArgument("metric space: distances must be finite and nonnegative");
      }
      if (d != distance(j, i)) throw InvalidArgument("metric space: matrix is not symmetric");
    }
  }
  if (check_triangle && !satisfies_triangle()) {
    throw InvalidArgument("metric space: triangle inequality violated beyond 1e-9");
  }
}

bool FinitePseudoMetricSpace::satisfies_triangle(double tolerance) const {
  const std::size_t k = ids_.size();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t l = 0; l < k; ++l)
        if (distance(i, l) > distance(i, j) + distance(j, l) + tolerance) return false;
  return true;
}

double FinitePseudoMetricSpace::diameter() const {
  return *std::max_element(dist_.begin(), dist_.end());
}

std::vector<std::size_t> epsilon_cover(const FinitePseudoMetricSpace& space, double eps,
                                       CoverMode mode) {
  if (!(eps > 0.0)) throw InvalidArgument("epsilon_cover: eps must be positive");
  std::vector<std::size_t> centers;
  if (mode == CoverMode::Exact) {
    if (space.size() > kMaxExactCoverPoints) {
      throw InvalidArgument("epsilon_cover: exact mode supports at most " +
                            std::to_string(kMaxExactCoverPoints) + " points, got " +
                            std::to_string(space.size()));
    }
    centers = exact_cover(space, eps);
  } else {
    centers = greedy_cover(space, eps);
  }
  if (!is_epsilon_cover(space, eps, centers)) {
    throw RuntimeError("epsilon_cover: produced an invalid cover");
  }
  return centers;
}

bool is_epsilon_cover(const FinitePseudoMetricSpace& space, double eps,
                      std::span<const std::size_t> center_ids) {
  const auto ids = space.ids();
  std::vector<std::size_t> positions;
  for (std::size_t id : center_ids) {
    const auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) return false;
    positions.push_back(static_cast<std::size_t>(it - ids.begin()));
  }
  for (std::size_t p = 0; p < space.size(); ++p) {
    const bool hit = std::any_of(positions.begin(), positions.end(),
                                 [&](std::size_t c) { return space.distance(c, p) <= eps; });
    if (!hit) return false;
  }
  return true;
}

double head_pseudo_dist(const Head& g, const Head& g2, const LossFn& lossfn,
                        const ProbeMeasure& probe) {
  const auto atoms = probe.head_atoms();
  const auto p = probe.probabilities();
  double d = 0.0;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    if (atoms[a].v.size() != g.v_dim() || atoms[a].v.size() != g2.v_dim()) {
      throw InvalidArgument("head_pseudo_dist: atom dimension does not match head v_dim");
    }
    d += p[a] * std::abs(lossfn(atoms[a].y, g.apply(atoms[a].v)) -
                         lossfn(atoms[a].y, g2.apply(atoms[a].v)));
  }
  return d;
}

double rep_pseudo_dist(const Representation& f, const Representation& f2,
                       const HypothesisFamily& family, const ProbeMeasure& probe) {
  const auto atoms = probe.rep_atoms();
  const auto p = probe.probabilities();
  const auto& lossfn = family.loss();
  double d = 0.0;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const auto& z = atoms[a];
    if (z.dim() != f.input_dim() || z.dim() != f2.input_dim()) {
      throw InvalidArgument("rep_pseudo_dist: atom dimension does not match representation");
    }
    const auto v = f.project(z.x);
    const auto v2 = f2.project(z.x);
    double gap = 0.0;
    for (const auto& g : family.heads()) {
      gap = std::max(gap, std::abs(lossfn(z.y, g.apply(v)) - lossfn(z.y, g.apply(v2))));
    }
    d += p[a] * gap;
  }
  return d;
}

FinitePseudoMetricSpace head_metric_space(const HypothesisFamily& family,
                                          const ProbeMeasure& probe) {
  const std::size_t k = family.heads().size();
  const std::size_t atoms = probe.head_atoms().size();
  const auto table = head_loss_table(family, probe);
  const auto p = probe.probabilities();
  std::vector<double> dist(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double d = weighted_gap(p, &table[i * atoms], &table[j * atoms]);
      dist[i * k + j] = d;
      dist[j * k + i] = d;
    }
  }
  std::vector<std::size_t> ids(k);
  for (std::size_t i = 0; i < k; ++i) ids[i] = i;
  return FinitePseudoMetricSpace(std::move(ids), std::move(dist), false);
}

FinitePseudoMetricSpace rep_metric_space(const HypothesisFamily& family,
                                         const ProbeMeasure& probe) {
  const std::size_t k = family.reps().size();
  const std::size_t heads = family.heads().size();
  const auto atoms = probe.rep_atoms();
  const auto p = probe.probabilities();
  std::vector<double> dist(k * k, 0.0);
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const auto table = rep_loss_table(family, atoms[a]);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        dist[i * k + j] += p[a] * max_gap(&table[i * heads], &table[j * heads], heads);
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) dist[j * k + i] = dist[i * k + j];
  std::vector<std::size_t> ids(k);
  for (std::size_t i = 0; i < k; ++i) ids[i] = i;
  return FinitePseudoMetricSpace(std::move(ids), std::move(dist), false);
}

std::size_t capacity(std::span<const FinitePseudoMetricSpace> spaces, double eps, CoverMode mode) {
  if (spaces.empty()) throw InvalidArgument("capacity: probe list is empty");
  std::size_t best = 0;
  for (const auto& space : spaces) best = std::max(best, epsilon_cover(space, eps, mode).size());
  return best;
}

std::size_t capacity(std::size_t element_count, const ProbeDistance& dist, double eps,
                     std::span<const ProbeMeasure> probes, CoverMode mode) {
  if (probes.empty()) throw InvalidArgument("capacity: probe list is empty");
  if (element_count == 0) throw InvalidArgument("capacity: no elements");
  std::vector<std::size_t> ids(element_count);
  for (std::size_t i = 0; i < element_count; ++i) ids[i] = i;
  std::size_t best = 0;
  for (const auto& probe : probes) {
    std::vector<double> d(element_count * element_count, 0.0);
    for (std::size_t i = 0; i < element_count; ++i) {
      for (std::size_t j = i + 1; j < element_count; ++j) {
        d[i * element_count + j] = d[j * element_count + i] = dist(i, j, probe);
      }
    }
    const FinitePseudoMetricSpace space(ids, std::move(d), false);
    best = std::max(best, epsilon_cover(space, eps, mode).size());
  }
  return best;
}

std::size_t head_capacity(const HypothesisFamily& family, double eps,
                          std::span<const ProbeMeasure> probes, CoverMode mode) {
  std::vector<FinitePseudoMetricSpace> spaces;
  spaces.reserve(probes.size());
  for (const auto& probe : probes) spaces.push_back(head_metric_space(family, probe));
  return capacity(spaces, eps, mode);
}

std::size_t rep_capacity(const HypothesisFamily& family, double eps,
                         std::span<const ProbeMeasure> probes, CoverMode mode) {
  std::vector<FinitePseudoMetricSpace> spaces;
  spaces.reserve(probes.size());
  for (const auto& probe : probes) spaces.push_back(rep_metric_space(family, probe));
  return capacity(spaces, eps, mode);
}

std::vector<ProbeMeasure> head_probes(const HypothesisFamily& family, const Environment& env,
                                      const ProbeSpec& spec) {
  std::vector<HeadPoint> atoms;
  for (const auto& z : env.support_union()) {
    for (const auto& f : family.reps()) {
      HeadPoint pt{f.project(z.x), z.y};
      if (std::find(atoms.begin(), atoms.end(), pt) == atoms.end()) atoms.push_back(std::move(pt));
    }
  }
  std::vector<ProbeMeasure> out;
  if (spec.single_atoms) {
    for (const auto& a : atoms) out.push_back(ProbeMeasure::on_heads({{a, 1.0}}));
  }
  if (spec.uniform_pairs) {
    for (std::size_t i = 0; i < atoms.size(); ++i)
      for (std::size_t j = i + 1; j < atoms.size(); ++j)
        out.push_back(ProbeMeasure::on_heads({{atoms[i], 0.5}, {atoms[j], 0.5}}));
  }
  for (const auto& probe : spec.extra) {
    if (probe.space() == ProbeSpace::Head) out.push_back(probe);
  }
  return out;
}

std::vector<ProbeMeasure> rep_probes(const Environment& env, const ProbeSpec& spec) {
  const auto atoms = env.support_union();
  std::vector<ProbeMeasure> out;
  if (spec.single_atoms) {
    for (const auto& z : atoms) out.push_back(ProbeMeasure::on_reps(single(z)));
  }
  if (spec.uniform_pairs) {
    for (std::size_t i = 0; i < atoms.size(); ++i)
      for (std::size_t j = i + 1; j < atoms.size(); ++j)
        out.push_back(ProbeMeasure::on_reps({{atoms[i], 0.5}, {atoms[j], 0.5}}));
  }
  for (const auto& probe : spec.extra) {
    if (probe.space() == ProbeSpace::Rep) out.push_back(probe);
  }
  return out;
}

}  // namespace metalab
