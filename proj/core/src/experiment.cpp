#include "metalab/experiment.hpp"

#include <chrono>
#include <fstream>

#include "json.hpp"
#include "metalab/bounds.hpp"
#include "metalab/csv.hpp"
#include "metalab/learner.hpp"
#include "metalab/validate.hpp"

namespace metalab {
namespace {

using nlohmann::json;

std::string_view mode_name(CoverMode mode) { return mode == CoverMode::Exact ? "exact" : "greedy"; }

struct Output {
  std::filesystem::path dir;
  std::vector<std::filesystem::path> files;

  void csv(const std::string& name, const CsvTable& table) {
    const auto path = dir / name;
    table.write(path);
    files.push_back(path);
  }
};

struct Payload {
  json summary = json::object();
  std::optional<bool> check;
};

Payload run_meta_train_eval(const ExperimentConfig& cfg, Output& out) {
  const auto& p = cfg.params;
  const HypothesisFamily& family = *cfg.family;
  const RepresentationLearner learner(family, {OuterStrategy::Exhaustive, p.holdout_fraction});
  Rng rng(cfg.seed);
  Rng source_rng = rng.split(0);
  Rng target_rng = rng.split(1);

  const MetaSample meta = sample_meta(cfg.source(), *p.n, *p.m, EnvironmentDrawn{}, source_rng);
  const MetaTrainResult trained = learner.meta_train(meta);

  CsvTable reps({"rep_index", "empirical_meta_loss", "env_optimal_loss", "selected"});
  for (const auto& f : family.reps()) {
    reps.add_row({CsvTable::cell(f.index()), CsvTable::cell(empirical_meta_loss(f, family, meta)),
                  CsvTable::cell(env_optimal_loss(f, family, cfg.source())),
                  CsvTable::cell(f.index() == trained.knowledge.rep_index)});
  }
  out.csv("meta_train.csv", reps);

  const std::size_t targets = p.targets.value_or(*p.n);
  const std::size_t target_m = p.target_m.value_or(*p.m);
  const auto& f = family.rep(trained.knowledge.rep_index);
  CsvTable tests({"target", "task_index", "head_index", "empirical_value", "true_value"});
  double mean_true = 0.0;
  for (std::size_t t = 0; t < targets; ++t) {
    const std::size_t task = sample_task(cfg.target(), target_rng);
    const TaskSample s = sample_m(cfg.target().task(task), target_m, target_rng, task);
    const TrainedTask fitted = learner.meta_test(trained.knowledge, s);
    const double risk =
        true_risk(f, family.head(fitted.head_index), family.loss(), cfg.target().task(task));
    mean_true += risk;
    tests.add_row({CsvTable::cell(t), CsvTable::cell(task), CsvTable::cell(fitted.head_index),
                   CsvTable::cell(fitted.empirical_value), CsvTable::cell(risk)});
  }
  out.csv("meta_test.csv", tests);

  Payload payload;
  payload.summary = {{"rep_index", trained.knowledge.rep_index},
                     {"outer_value", trained.knowledge.outer_value},
                     {"mean_target_true_risk", mean_true / static_cast<double>(targets)}};
  return payload;
}

Payload run_capacity_table(const ExperimentConfig& cfg, Output& out) {
  const auto& p = cfg.params;
  const HypothesisFamily& family = *cfg.family;
  const auto hp = head_probes(family, *cfg.environment, p.probes);
  const auto rp = rep_probes(*cfg.environment, p.probes);
  std::vector<FinitePseudoMetricSpace> head_spaces, rep_spaces;
  for (const auto& probe : hp) head_spaces.push_back(head_metric_space(family, probe));
  for (const auto& probe : rp) rep_spaces.push_back(rep_metric_space(family, probe));

  const std::vector<std::string> header = {"eps", "probe_count", "cover_mode", "value"};
  CsvTable heads(header), reps(header);
  for (double eps : p.eps_grid) {
    const std::string mode(mode_name(p.cover_mode));
    if (!head_spaces.empty()) {
      heads.add_row({CsvTable::cell(eps), CsvTable::cell(head_spaces.size()), mode,
                     CsvTable::cell(capacity(head_spaces, eps, p.cover_mode))});
    }
    if (!rep_spaces.empty()) {
      reps.add_row({CsvTable::cell(eps), CsvTable::cell(rep_spaces.size()), mode,
                    CsvTable::cell(capacity(rep_spaces, eps, p.cover_mode))});
    }
  }
  out.csv("capacity_heads.csv", heads);
  out.csv("capacity_reps.csv", reps);
  Payload payload;
  payload.summary = {{"bound_kind", "probe lower bound"},
                     {"head_probes", hp.size()},
                     {"rep_probes", rp.size()},
                     {"heads", family.heads().size()},
                     {"reps", family.reps().size()}};
  return payload;
}

struct CapacityCache {
  std::vector<FinitePseudoMetricSpace> heads;
  std::vector<FinitePseudoMetricSpace> reps;

  CapacityCache(const ExperimentConfig& cfg) {
    for (const auto& probe : head_probes(*cfg.family, *cfg.environment, cfg.params.probes)) {
      heads.push_back(head_metric_space(*cfg.family, probe));
    }
    for (const auto& probe : rep_probes(*cfg.environment, cfg.params.probes)) {
      reps.push_back(rep_metric_space(*cfg.family, probe));
    }
  }

  // Fills the capacity fields of `b` from its radii.
  void fill(BoundParams& b, CoverMode mode, double coarse_radius) const {
    b.cap_heads = capacity(heads, b.eps1, mode);
    b.cap_reps = capacity(reps, b.eps2, mode);
    b.cap_reps_coarse = capacity(reps, coarse_radius, mode);
  }
};

BoundParams base_bounds(const ExperimentConfig& cfg, double alpha, double divisor) {
  const auto& p = cfg.params;
  BoundParams b;
  b.M = cfg.loss_bound;
  b.alpha = alpha;
  b.delta = *p.delta;
  b.nu = *p.nu;
  const double total = alpha * b.nu / divisor;
  if (p.eps1 && p.eps2 && alpha == *p.alpha) {
    b.eps1 = *p.eps1;
    b.eps2 = *p.eps2;
  } else {
    b.eps1 = total * p.eps_split;
    b.eps2 = total - b.eps1;
  }
  b.n = p.n.value_or(1);
  return b;
}

Payload run_bounds_table(const ExperimentConfig& cfg, Output& out) {
  const auto& p = cfg.params;
  const CapacityCache cache(cfg);
  const std::vector<double> alphas = p.alpha_grid.empty() ? std::vector<double>{*p.alpha} : p.alpha_grid;
  CsvTable table({"theorem", "alpha", "nu", "delta", "eps1", "eps2", "cap_heads", "cap_reps",
                  "cap_reps_coarse", "n", "m"});
  for (double alpha : alphas) {
    BoundParams one = base_bounds(cfg, alpha, 8.0);
    cache.fill(one, p.cover_mode, one.eps2);
    one.cap_reps_coarse = one.cap_reps;
    const std::size_t m1 = theorem1_m(one);
    table.add_row({"1", CsvTable::cell(alpha), CsvTable::cell(one.nu), CsvTable::cell(one.delta),
                   CsvTable::cell(one.eps1), CsvTable::cell(one.eps2), CsvTable::cell(one.cap_heads),
                   CsvTable::cell(one.cap_reps), CsvTable::cell(one.cap_reps_coarse),
                   CsvTable::cell(one.n), CsvTable::cell(m1)});

    BoundParams two = base_bounds(cfg, alpha, 16.0);
    cache.fill(two, p.cover_mode, alpha * two.nu / 16.0);
    const SampleSizes nm = theorem2_nm(two);
    table.add_row({"2", CsvTable::cell(alpha), CsvTable::cell(two.nu), CsvTable::cell(two.delta),
                   CsvTable::cell(two.eps1), CsvTable::cell(two.eps2), CsvTable::cell(two.cap_heads),
                   CsvTable::cell(two.cap_reps), CsvTable::cell(two.cap_reps_coarse),
                   CsvTable::cell(nm.n), CsvTable::cell(nm.m)});
  }
  out.csv("bounds.csv", table);
  Payload payload;
  payload.summary = {{"rows", table.rows()}, {"capacity_kind", "probe lower bound"}};
  return payload;
}

Payload run_validate(const ExperimentConfig& cfg, Output& out) {
  const auto& p = cfg.params;
  const bool first = cfg.kind == ExperimentKind::ValidateThm1;
  GuaranteeConfig g;
  g.theorem = first ? Theorem::One : Theorem::Two;
  g.env = cfg.environment;
  g.family = cfg.family;
  g.learner = {OuterStrategy::Exhaustive, p.holdout_fraction};
  g.alpha = *p.alpha;
  g.nu = *p.nu;
  g.delta = *p.delta;
  g.trials = p.trials;
  g.base_seed = cfg.seed;
  g.fixed_tasks = p.fixed_tasks;

  json bound = nullptr;
  if (p.sample_sizes == SampleSizeMode::Theorem) {
    const CapacityCache cache(cfg);
    BoundParams b = base_bounds(cfg, *p.alpha, first ? 8.0 : 16.0);
    cache.fill(b, p.cover_mode, first ? b.eps2 : *p.alpha * *p.nu / 16.0);
    if (first) {
      b.cap_reps_coarse = b.cap_reps;
      g.n = *p.n;
      g.m = theorem1_m(b);
    } else {
      const SampleSizes nm = theorem2_nm(b);
      g.n = nm.n;
      g.m = nm.m;
    }
    bound = {{"cap_heads", b.cap_heads}, {"cap_reps", b.cap_reps},
             {"cap_reps_coarse", b.cap_reps_coarse}, {"capacity_kind", "probe lower bound"}};
  } else {
    g.n = *p.n;
    g.m = *p.m;
  }

  const auto outcomes = run_guarantee_trials(g);
  CsvTable trials({"trial_index", "empirical_value", "true_value", "deviation", "exceeded"});
  for (const auto& o : outcomes) {
    trials.add_row({CsvTable::cell(o.trial_index), CsvTable::cell(o.empirical_value),
                    CsvTable::cell(o.true_value), CsvTable::cell(o.deviation),
                    CsvTable::cell(o.exceeded)});
  }
  out.csv("trials.csv", trials);
  const GuaranteeReport r = summarize(outcomes, g.delta);
  CsvTable summary({"violations", "trials", "frequency", "wilson_upper_95", "delta", "pass"});
  summary.add_row({CsvTable::cell(r.violations), CsvTable::cell(r.trials),
                   CsvTable::cell(r.frequency), CsvTable::cell(r.wilson_upper_95),
                   CsvTable::cell(r.delta), CsvTable::cell(r.pass)});
  out.csv("guarantee.csv", summary);

  Payload payload;
  payload.summary = {{"violations", r.violations}, {"trials", r.trials},
                     {"frequency", r.frequency}, {"wilson_upper_95", r.wilson_upper_95},
                     {"delta", r.delta}, {"pass", r.pass}, {"n", g.n}, {"m", g.m},
                     {"deviation_metric", "|a-b|/(nu+a+b)"}};
  if (!bound.is_null()) payload.summary["bound"] = bound;
  payload.check = r.pass;
  return payload;
}

Payload run_transfer_risk(const ExperimentConfig& cfg, Output& out) {
  const auto& p = cfg.params;
  const HypothesisFamily& family = *cfg.family;
  const RepresentationLearner learner(family, {OuterStrategy::Exhaustive, p.holdout_fraction});
  std::optional<std::size_t> learned;
  if (p.n) {
    Rng source_rng = Rng(cfg.seed).split(0);
    const MetaSample meta = sample_meta(cfg.source(), *p.n, *p.m, EnvironmentDrawn{}, source_rng);
    learned = learner.meta_train(meta).knowledge.rep_index;
  }
  CsvTable table({"rep_index", "estimate", "std_error", "learned"});
  json per_rep = json::array();
  for (const auto& f : family.reps()) {
    // Same stream for every f: estimates are paired trial by trial.
    Rng rng = Rng(cfg.seed).split(1);
    const auto est = transfer_risk(learner, f.index(), cfg.target(), *p.m, p.trials, rng);
    table.add_row({CsvTable::cell(f.index()), CsvTable::cell(est.estimate),
                   CsvTable::cell(est.standard_error),
                   CsvTable::cell(learned && *learned == f.index())});
    per_rep.push_back({{"rep_index", f.index()}, {"estimate", est.estimate},
                       {"std_error", est.standard_error}});
  }
  out.csv("transfer_risk.csv", table);
  Payload payload;
  payload.summary = {{"per_rep", per_rep}};
  if (learned) payload.summary["learned_rep_index"] = *learned;
  return payload;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.kind = cfg.kind;
  report.config_echo = cfg.canonical_json;
  report.config_hash = git_blob_hash(cfg.canonical_json);
  report.seed = cfg.seed;

  Output out{cfg.output, {}};
  Payload payload;
  try {
    std::filesystem::create_directories(cfg.output);
    switch (cfg.kind) {
      case ExperimentKind::MetaTrainEval: payload = run_meta_train_eval(cfg, out); break;
      case ExperimentKind::CapacityTable: payload = run_capacity_table(cfg, out); break;
      case ExperimentKind::BoundsTable: payload = run_bounds_table(cfg, out); break;
      case ExperimentKind::ValidateThm1:
      case ExperimentKind::ValidateThm2: payload = run_validate(cfg, out); break;
      case ExperimentKind::TransferRisk: payload = run_transfer_risk(cfg, out); break;
    }
  } catch (const std::exception& e) {
    throw ExperimentError(std::string(to_string(cfg.kind)) + ": " + e.what());
  }

  report.payload_json = payload.summary.dump();
  report.check_passed = payload.check;
  report.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json summary = {{"kind", std::string(to_string(cfg.kind))},
                  {"config", json::parse(cfg.canonical_json)},
                  {"config_hash", report.config_hash},
                  {"seed", cfg.seed},
                  {"payload", payload.summary},
                  {"duration_seconds", report.duration_seconds}};
  json files = json::array();
  for (const auto& f : out.files) files.push_back(f.filename().string());
  summary["files"] = files;

  const auto summary_path = cfg.output / "summary.json";
  std::ofstream os(summary_path, std::ios::binary | std::ios::trunc);
  if (!os) throw ExperimentError("cannot write " + summary_path.string());
  os << summary.dump(2) << '\n';
  out.files.push_back(summary_path);
  report.files = out.files;
  return report;
}

}  // namespace metalab
