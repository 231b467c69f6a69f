#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "metalab/capacity.hpp"
#include "metalab/error.hpp"
#include "oracles.hpp"

using namespace metalab;

namespace {

LabeledExample pt(std::vector<double> x, double y) { return {std::move(x), y}; }

FinitePseudoMetricSpace random_space(Rng& rng, std::size_t k) {
  // Distances between random points on a line with some duplicates, so the
  // triangle inequality holds by construction.
  std::vector<double> pos(k);
  for (auto& p : pos) p = std::floor(rng.uniform01() * 8.0) / 4.0;
  std::vector<std::size_t> ids(k);
  std::vector<double> d(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    ids[i] = i;
    for (std::size_t j = 0; j < k; ++j) d[i * k + j] = std::abs(pos[i] - pos[j]);
  }
  return FinitePseudoMetricSpace(ids, d);
}

HypothesisFamily two_heads(double b2) {
  return HypothesisFamily({Representation({0}, 1)}, {Head({0.0}, 0.0), Head({0.0}, b2)},
                          LossFn::clipped_squared(10.0));
}

}  // namespace

TEST(FinitePseudoMetricSpace, RejectsNonMetricInput) {
  EXPECT_THROW(FinitePseudoMetricSpace({0, 1}, {0, 1, 2, 0}), InvalidArgument);
  EXPECT_THROW(FinitePseudoMetricSpace({0, 1}, {1, 1, 1, 0}), InvalidArgument);
  EXPECT_THROW(FinitePseudoMetricSpace({0, 1}, {0, -1, -1, 0}), InvalidArgument);
  EXPECT_THROW(FinitePseudoMetricSpace({0, 1, 2}, {0, 1, 5, 1, 0, 1, 5, 1, 0}), InvalidArgument);
  EXPECT_THROW(FinitePseudoMetricSpace({0, 1}, {0, 1, 1}), InvalidArgument);
  EXPECT_NO_THROW(FinitePseudoMetricSpace({0, 1}, {0, 0, 0, 0}));
}

TEST(EpsilonCover, WorkedValues) {
  const FinitePseudoMetricSpace one({7}, {0.0});
  EXPECT_EQ(epsilon_cover(one, 0.1, CoverMode::Exact), std::vector<std::size_t>{7});
  const FinitePseudoMetricSpace tri({0, 1, 2}, {0, 1, 1, 1, 0, 1, 1, 1, 0});
  EXPECT_EQ(epsilon_cover(tri, 0.5, CoverMode::Exact).size(), 3u);
  EXPECT_EQ(epsilon_cover(tri, 0.5, CoverMode::Greedy).size(), 3u);
  EXPECT_EQ(epsilon_cover(tri, 1.0, CoverMode::Exact).size(), 1u);
  EXPECT_EQ(epsilon_cover(tri, tri.diameter(), CoverMode::Greedy).size(), 1u);
}

TEST(EpsilonCover, ErrorsOnBadInput) {
  Rng rng(51);
  const auto big = random_space(rng, kMaxExactCoverPoints + 1);
  EXPECT_THROW(epsilon_cover(big, 0.3, CoverMode::Exact), InvalidArgument);
  EXPECT_NO_THROW(epsilon_cover(big, 0.3, CoverMode::Greedy));
  EXPECT_THROW(epsilon_cover(big, 0.0, CoverMode::Greedy), InvalidArgument);
  EXPECT_THROW(epsilon_cover(big, -1.0, CoverMode::Greedy), InvalidArgument);
}

TEST(EpsilonCover, ExactMatchesSubsetSearchAndGreedyDominates) {
  Rng rng(52);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + trial % 12;
    const auto s = random_space(rng, k);
    const double eps = 0.05 + 0.6 * rng.uniform01();
    const auto exact = epsilon_cover(s, eps, CoverMode::Exact);
    const auto greedy = epsilon_cover(s, eps, CoverMode::Greedy);
    EXPECT_TRUE(is_epsilon_cover(s, eps, exact));
    EXPECT_TRUE(is_epsilon_cover(s, eps, greedy));
    EXPECT_EQ(exact.size(), oracle::min_cover_size(s, eps));
    EXPECT_GE(greedy.size(), exact.size());
  }
}

TEST(EpsilonCover, SizeIsMonotoneInEps) {
  Rng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_space(rng, 10);
    std::size_t prev_exact = SIZE_MAX;
    for (double eps : {0.1, 0.25, 0.5, 1.0, 2.0}) {
      const std::size_t e = epsilon_cover(s, eps, CoverMode::Exact).size();
      EXPECT_LE(e, prev_exact);
      prev_exact = e;
    }
  }
}

TEST(PseudoDistances, HeadWorkedValues) {
  const auto fam = two_heads(0.8);
  const auto probe = ProbeMeasure::on_heads({{{{0.0}, 0.0}, 1.0}});
  EXPECT_NEAR(head_pseudo_dist(fam.head(0), fam.head(1), fam.loss(), probe), 0.64, 1e-15);
  EXPECT_EQ(head_pseudo_dist(fam.head(0), fam.head(0), fam.loss(), probe), 0.0);
  const auto rep_probe = ProbeMeasure::on_reps({{pt({0.0}, 0.0), 1.0}});
  EXPECT_THROW(head_pseudo_dist(fam.head(0), fam.head(1), fam.loss(), rep_probe), InvalidArgument);
  EXPECT_THROW(rep_pseudo_dist(fam.rep(0), fam.rep(0), fam, probe), InvalidArgument);
  EXPECT_THROW(ProbeMeasure::on_heads({{{{0.0}, 0.0}, 0.5}}), InvalidArgument);
}

TEST(PseudoDistances, RepWorkedValues) {
  // Two coordinates; with z = ((0, 1), 0) head (1, 0) separates them by 1.
  const HypothesisFamily fam({Representation({0}, 2), Representation({1}, 2)},
                             {Head({0.0}, 0.0), Head({1.0}, 0.0)}, LossFn::clipped_squared(10.0));
  const auto probe = ProbeMeasure::on_reps({{pt({0.0, 1.0}, 0.0), 1.0}});
  EXPECT_EQ(rep_pseudo_dist(fam.rep(0), fam.rep(1), fam, probe), 1.0);
  const auto same = ProbeMeasure::on_reps({{pt({2.0, 2.0}, 0.0), 1.0}});
  EXPECT_EQ(rep_pseudo_dist(fam.rep(0), fam.rep(1), fam, same), 0.0);
}

TEST(PseudoDistances, SatisfyPseudoMetricAxioms) {
  Rng rng(54);
  int triples = 0;
  while (triples < 10000) {
    const auto env = oracle::random_env(rng, 2, 3, 3);
    FamilySpec spec;
    spec.weights = {-1.0, 0.5, 5};
    spec.bias = {-1.0, 0.5, 5};
    const auto fam = HypothesisFamily::from_spec(3, spec, LossFn::clipped_squared(2.0));
    const auto hp = head_probes(fam, env, {});
    const auto rp = rep_probes(env, {});
    for (int k = 0; k < 100; ++k, ++triples) {
      const auto& probe = hp[static_cast<std::size_t>(rng.uniform01() * hp.size())];
      const auto pick = [&] { return fam.head(static_cast<std::size_t>(rng.uniform01() * fam.heads().size())); };
      const auto a = pick(), b = pick(), c = pick();
      const double ab = head_pseudo_dist(a, b, fam.loss(), probe);
      EXPECT_EQ(head_pseudo_dist(a, a, fam.loss(), probe), 0.0);
      EXPECT_EQ(ab, head_pseudo_dist(b, a, fam.loss(), probe));
      EXPECT_GE(ab, 0.0);
      EXPECT_LE(ab, head_pseudo_dist(a, c, fam.loss(), probe) + head_pseudo_dist(c, b, fam.loss(), probe) + 1e-12);

      const auto& rprobe = rp[static_cast<std::size_t>(rng.uniform01() * rp.size())];
      const auto& f = fam.rep(k % 3);
      const auto& g = fam.rep((k + 1) % 3);
      const auto& h = fam.rep((k + 2) % 3);
      const double fg = rep_pseudo_dist(f, g, fam, rprobe);
      EXPECT_EQ(rep_pseudo_dist(f, f, fam, rprobe), 0.0);
      EXPECT_EQ(fg, rep_pseudo_dist(g, f, fam, rprobe));
      EXPECT_LE(fg, rep_pseudo_dist(f, h, fam, rprobe) + rep_pseudo_dist(h, g, fam, rprobe) + 1e-12);
    }
  }
}

TEST(MetricSpaces, MatchPairwiseDistances) {
  Rng rng(55);
  const auto env = oracle::random_env(rng, 2, 3, 3);
  FamilySpec spec;
  spec.weights = {-1.0, 0.5, 3};
  spec.bias = {-1.0, 1.0, 2};
  const auto fam = HypothesisFamily::from_spec(3, spec, LossFn::clipped_squared(2.0));
  for (const auto& probe : head_probes(fam, env, {})) {
    const auto s = head_metric_space(fam, probe);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        EXPECT_EQ(s.distance(i, j), head_pseudo_dist(fam.head(i), fam.head(j), fam.loss(), probe));
  }
  for (const auto& probe : rep_probes(env, {})) {
    const auto s = rep_metric_space(fam, probe);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        EXPECT_EQ(s.distance(i, j), rep_pseudo_dist(fam.rep(i), fam.rep(j), fam, probe));
  }
}

TEST(Capacity, WorkedValues) {
  const auto fam = two_heads(std::sqrt(0.8));
  const std::vector<ProbeMeasure> probe{ProbeMeasure::on_heads({{{{0.0}, 0.0}, 1.0}})};
  EXPECT_EQ(head_capacity(fam, 0.1, probe, CoverMode::Exact), 2u);
  EXPECT_EQ(head_capacity(fam, 0.8, probe, CoverMode::Exact), 1u);
  EXPECT_EQ(rep_capacity(fam, 0.1, std::vector<ProbeMeasure>{ProbeMeasure::on_reps({{pt({0.0}, 0.0), 1.0}})},
                         CoverMode::Exact),
            1u);
  EXPECT_THROW(head_capacity(fam, 0.1, std::vector<ProbeMeasure>{}, CoverMode::Exact), InvalidArgument);
  const HypothesisFamily single({Representation({0}, 1)}, {Head({0.0}, 0.0)}, LossFn::clipped_squared(1.0));
  EXPECT_EQ(head_capacity(single, 1e-6, probe, CoverMode::Greedy), 1u);
}

TEST(Capacity, MonotoneInEpsAndProbeList) {
  Rng rng(56);
  for (int trial = 0; trial < 20; ++trial) {
    const auto env = oracle::random_env(rng, 2, 3, 2);
    FamilySpec spec;
    spec.weights = {-1.0, 0.5, 5};
    spec.bias = {-1.0, 0.5, 5};
    const auto fam = HypothesisFamily::from_spec(2, spec, LossFn::clipped_squared(1.0));
    const auto probes = head_probes(fam, env, {});
    std::size_t prev = SIZE_MAX;
    for (double eps : {0.01, 0.05, 0.1, 0.3, 1.0}) {
      const auto c = head_capacity(fam, eps, probes, CoverMode::Greedy);
      EXPECT_LE(c, prev);
      prev = c;
      const std::span<const ProbeMeasure> prefix(probes.data(), probes.size() / 2 + 1);
      EXPECT_LE(head_capacity(fam, eps, prefix, CoverMode::Greedy), c);
    }
  }
}

TEST(Probes, DefaultConstructionShapes) {
  Rng rng(57);
  const auto env = oracle::random_env(rng, 2, 2, 2);
  const auto atoms = env.support_union().size();
  const auto rp = rep_probes(env, {true, true, {}});
  EXPECT_EQ(rp.size(), atoms + atoms * (atoms - 1) / 2);
  const auto only_single = rep_probes(env, {true, false, {}});
  EXPECT_EQ(only_single.size(), atoms);
  for (const auto& p : rp) EXPECT_EQ(p.space(), ProbeSpace::Rep);
  EXPECT_TRUE(rep_probes(env, {false, false, {}}).empty());
}
