#include "metalab/hypo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metalab/error.hpp"

namespace metalab {
namespace {

void check_sample(const Representation& f, std::span<const LabeledExample> sample) {
  if (sample.empty()) {
    throw InvalidArgument("empty sample");
  }
  for (const auto& z : sample) {
    if (z.dim() != f.input_dim()) {
      throw InvalidArgument("sample dimension " + std::to_string(z.dim()) +
                            " does not match representation input_dim " +
                            std::to_string(f.input_dim()));
    }
  }
}

void check_pair(const Representation& f, const Head& g) {
  if (f.v_dim() != g.v_dim()) {
    throw InvalidArgument("head expects v_dim " + std::to_string(g.v_dim()) +
                          " but representation produces " + std::to_string(f.v_dim()));
  }
}

// Increasing k-subsets of {0..d-1} in lexicographic order.
std::vector<std::vector<std::size_t>> combinations(std::size_t d, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> current(k);
  for (std::size_t i = 0; i < k; ++i) current[i] = i;
  while (true) {
    out.push_back(current);
    std::size_t i = k;
    while (i > 0 && current[i - 1] == d - k + (i - 1)) --i;
    if (i == 0) break;
    ++current[i - 1];
    for (std::size_t j = i; j < k; ++j) current[j] = current[j - 1] + 1;
  }
  return out;
}

}  // namespace

Representation::Representation(std::vector<std::size_t> coordinates, std::size_t input_dim)
    : coords_(std::move(coordinates)), input_dim_(input_dim) {
  if (coords_.empty()) {
    throw InvalidArgument("representation: v_dim must be at least 1");
  }
  if (coords_.size() > input_dim_) {
    throw InvalidArgument("representation: v_dim exceeds input dimension");
  }
  for (std::size_t c : coords_) {
    if (c >= input_dim_) {
      throw InvalidArgument("representation: coordinate " + std::to_string(c) +
                            " out of range for input_dim " + std::to_string(input_dim_));
    }
  }
}

std::vector<double> Representation::project(std::span<const double> x) const {
  std::vector<double> out(coords_.size());
  project(x, out);
  return out;
}

std::vector<std::vector<int>> Representation::selection_matrix() const {
  std::vector<std::vector<int>> m(coords_.size(), std::vector<int>(input_dim_, 0));
  for (std::size_t r = 0; r < coords_.size(); ++r) m[r][coords_[r]] = 1;
  return m;
}

Head::Head(std::vector<double> weights, double bias) : weights_(std::move(weights)), bias_(bias) {
  if (weights_.empty()) {
    throw InvalidArgument("head: needs at least one weight");
  }
  if (!std::isfinite(bias_) ||
      !std::all_of(weights_.begin(), weights_.end(), [](double w) { return std::isfinite(w); })) {
    throw InvalidArgument("head: coefficients must be finite");
  }
}

LossFn LossFn::clipped_squared(double bound) {
  if (!(bound > 0.0) || !std::isfinite(bound)) {
    throw InvalidArgument("loss: bound M must be a positive finite number");
  }
  return LossFn(Kind::ClippedSquared, bound);
}

void Grid::validate(const char* what) const {
  if (count == 0) {
    throw InvalidArgument(std::string(what) + ": grid count must be at least 1");
  }
  if (!std::isfinite(lo) || !std::isfinite(step) || (count > 1 && !(step > 0.0))) {
    throw InvalidArgument(std::string(what) + ": grid needs finite lo and positive step");
  }
}

HypothesisFamily::HypothesisFamily(std::vector<Representation> reps, std::vector<Head> heads,
                                   LossFn loss)
    : reps_(std::move(reps)), heads_(std::move(heads)), loss_(loss) {
  if (reps_.empty()) throw InvalidArgument("family: representation enumeration is empty");
  if (heads_.empty()) throw InvalidArgument("family: head enumeration is empty");
  if (heads_.size() > kMaxHeads) throw InvalidArgument("family: too many heads");
  const std::size_t v_dim = reps_.front().v_dim();
  const std::size_t d = reps_.front().input_dim();
  for (std::size_t i = 0; i < reps_.size(); ++i) {
    if (reps_[i].v_dim() != v_dim || reps_[i].input_dim() != d) {
      throw InvalidArgument("family: representations disagree on dimensions");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (reps_[j] == reps_[i]) throw InvalidArgument("family: duplicate representation");
    }
    reps_[i].index_ = i;
  }
  // Sorted copy keeps the duplicate check O(|G| log |G|).
  std::vector<const Head*> sorted;
  sorted.reserve(heads_.size());
  for (std::size_t i = 0; i < heads_.size(); ++i) {
    if (heads_[i].v_dim() != v_dim) {
      throw InvalidArgument("family: head v_dim does not match representations");
    }
    heads_[i].index_ = i;
    sorted.push_back(&heads_[i]);
  }
  const auto key_less = [](const Head* a, const Head* b) {
    if (a->bias() != b->bias()) return a->bias() < b->bias();
    return std::lexicographical_compare(a->weights().begin(), a->weights().end(),
                                        b->weights().begin(), b->weights().end());
  };
  std::sort(sorted.begin(), sorted.end(), key_less);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (*sorted[i] == *sorted[i - 1]) throw InvalidArgument("family: duplicate head");
  }
}

HypothesisFamily HypothesisFamily::from_spec(std::size_t input_dim, const FamilySpec& spec,
                                             LossFn loss) {
  if (spec.v_dim == 0 || spec.v_dim > input_dim) {
    throw InvalidArgument("family: v_dim must lie in [1, input_dim]");
  }
  spec.weights.validate("family weights");
  spec.bias.validate("family bias");

  const auto selections =
      spec.selections.empty() ? combinations(input_dim, spec.v_dim) : spec.selections;
  std::vector<Representation> reps;
  reps.reserve(selections.size());
  for (const auto& sel : selections) {
    if (sel.size() != spec.v_dim) {
      throw InvalidArgument("family: selection length differs from v_dim");
    }
    reps.emplace_back(sel, input_dim);
  }

  double total = static_cast<double>(spec.bias.count);
  for (std::size_t k = 0; k < spec.v_dim; ++k) total *= static_cast<double>(spec.weights.count);
  if (total > static_cast<double>(kMaxHeads)) {
    throw InvalidArgument("family: grid yields more than " + std::to_string(kMaxHeads) + " heads");
  }

  std::vector<Head> heads;
  heads.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> digits(spec.v_dim, 0);
  for (std::size_t b = 0; b < spec.bias.count; ++b) {
    std::fill(digits.begin(), digits.end(), 0);
    while (true) {
      std::vector<double> w(spec.v_dim);
      for (std::size_t k = 0; k < spec.v_dim; ++k) w[k] = spec.weights.at(digits[k]);
      heads.emplace_back(std::move(w), spec.bias.at(b));
      std::size_t pos = spec.v_dim;
      while (pos > 0) {
        if (++digits[pos - 1] < spec.weights.count) break;
        digits[pos - 1] = 0;
        --pos;
      }
      if (pos == 0) break;
    }
  }
  return HypothesisFamily(std::move(reps), std::move(heads), loss);
}

double predict(const Representation& f, const Head& g, std::span<const double> x) {
  check_pair(f, g);
  if (x.size() != f.input_dim()) {
    throw InvalidArgument("predict: input has dimension " + std::to_string(x.size()) +
                          ", expected " + std::to_string(f.input_dim()));
  }
  return g.apply(f.project(x));
}

double loss(const LossFn& lossfn, double y, double w) { return lossfn(y, w); }

double empirical_risk(const Representation& f, const Head& g, const LossFn& lossfn,
                      std::span<const LabeledExample> sample) {
  check_pair(f, g);
  check_sample(f, sample);
  std::vector<double> v(f.v_dim());
  double sum = 0.0;
  for (const auto& z : sample) {
    f.project(z.x, v);
    sum += lossfn(z.y, g.apply(v));
  }
  // A mean of values capped at M can round just above M.
  return std::min(sum / static_cast<double>(sample.size()), lossfn.bound());
}

double empirical_risk(const Representation& f, const Head& g, const LossFn& lossfn,
                      const TaskSample& sample) {
  return empirical_risk(f, g, lossfn, sample.examples());
}

double true_risk(const Representation& f, const Head& g, const LossFn& lossfn,
                 const FiniteTask& task) {
  check_pair(f, g);
  if (task.input_dim() != f.input_dim()) {
    throw InvalidArgument("true_risk: task dimension does not match representation");
  }
  std::vector<double> v(f.v_dim());
  double risk = 0.0;
  for (std::size_t i = 0; i < task.size(); ++i) {
    const auto& z = task.point(i);
    f.project(z.x, v);
    risk += task.probability(i) * lossfn(z.y, g.apply(v));
  }
  // Renormalised probabilities can sum to 1 + ulp.
  return std::min(risk, lossfn.bound());
}

InnerResult inner_minimize(const Representation& f, const HypothesisFamily& family,
                           std::span<const LabeledExample> sample) {
  check_sample(f, sample);
  const std::size_t vd = f.v_dim();
  if (family.heads().empty() || family.heads().front().v_dim() != vd) {
    throw InvalidArgument("inner_minimize: head enumeration unusable with this representation");
  }
  const std::size_t m = sample.size();
  std::vector<double> projected(m * vd);
  std::vector<double> labels(m);
  for (std::size_t j = 0; j < m; ++j) {
    f.project(sample[j].x, std::span<double>(projected).subspan(j * vd, vd));
    labels[j] = sample[j].y;
  }
  const LossFn& lossfn = family.loss();
  const std::span<const double> pv(projected);
  const double count = static_cast<double>(m);
  InnerResult best{0, 0.0};
  bool first = true;
  for (const auto& g : family.heads()) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      sum += lossfn(labels[j], g.apply(pv.subspan(j * vd, vd)));
    }
    const double value = std::min(sum / count, lossfn.bound());
    if (first || value < best.value) {
      best = {g.index(), value};
      first = false;
    }
  }
  return best;
}

InnerResult inner_minimize(const Representation& f, const HypothesisFamily& family,
                           const TaskSample& sample) {
  return inner_minimize(f, family, sample.examples());
}

}  // namespace metalab
