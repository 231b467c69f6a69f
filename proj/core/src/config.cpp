#include "metalab/config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "metalab/bounds.hpp"
#include "metalab/error.hpp"

namespace metalab {
namespace {

using nlohmann::json;
using Kind = ConfigIssue::Kind;

constexpr const char* kDefaultOutput = "metalab_out";

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

// Collects issues while walking the document; every accessor reports and
// returns nullopt instead of throwing.
class Reader {
 public:
  std::vector<ConfigIssue> issues;

  void add(Kind kind, std::string key, std::string message) {
    issues.push_back({kind, std::move(key), std::move(message)});
  }

  bool expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) {
      add(Kind::Range, path, "must be an object");
      return false;
    }
    return true;
  }

  void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
      if (!allowed.count(key)) add(Kind::UnknownKey, join(path, key), "unknown key");
    }
  }

  const json* find(const json& obj, const std::string& path, const std::string& key, bool required) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) add(Kind::Missing, join(path, key), "required field is missing");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const json& obj, const std::string& path, const std::string& key,
                               bool required) {
    const json* v = find(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      add(Kind::Range, join(path, key), "must be a number");
      return std::nullopt;
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) {
      add(Kind::Range, join(path, key), "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<std::uint64_t> unsigned_int(const json& obj, const std::string& path,
                                            const std::string& key, bool required,
                                            std::uint64_t min_value = 0) {
    const json* v = find(obj, path, key, required);
    if (!v) return std::nullopt;
    return unsigned_value(*v, join(path, key), min_value);
  }

  std::optional<std::uint64_t> unsigned_value(const json& v, const std::string& key,
                                              std::uint64_t min_value) {
    std::optional<std::uint64_t> out;
    if (v.is_number_unsigned()) {
      out = v.get<std::uint64_t>();
    } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      out = static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    if (!out) {
      add(Kind::Range, key, "must be a nonnegative integer");
      return std::nullopt;
    }
    if (*out < min_value) {
      add(Kind::Range, key, "must be at least " + std::to_string(min_value));
      return std::nullopt;
    }
    return out;
  }

  std::optional<bool> boolean(const json& obj, const std::string& path, const std::string& key) {
    const json* v = find(obj, path, key, false);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) {
      add(Kind::Range, join(path, key), "must be true or false");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  std::optional<std::string> string(const json& obj, const std::string& path,
                                    const std::string& key, bool required) {
    const json* v = find(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      add(Kind::Range, join(path, key), "must be a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::vector<double>> number_list(const json& v, const std::string& key) {
    if (!v.is_array()) {
      add(Kind::Range, key, "must be an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        add(Kind::Range, key, "must be an array of finite numbers");
        return std::nullopt;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  // Open or closed interval check; reports under `key`.
  void range(std::optional<double>& v, const std::string& key, double lo, bool lo_open, double hi,
             bool hi_open) {
    if (!v) return;
    const bool ok = (lo_open ? *v > lo : *v >= lo) && (hi_open ? *v < hi : *v <= hi);
    if (!ok) {
      std::ostringstream os;
      os << "must lie in " << (lo_open ? "(" : "[") << lo << ", ";
      if (std::isinf(hi)) os << "inf)";
      else os << hi << (hi_open ? ")" : "]");
      add(Kind::Range, key, os.str());
      v.reset();
    }
  }
};

std::optional<LabeledExample> parse_example(Reader& r, const json& j, const std::string& path,
                                            double* p_out) {
  if (!r.expect_object(j, path)) return std::nullopt;
  r.check_keys(j, path, {"x", "y", "p"});
  const json* x = r.find(j, path, "x", true);
  const auto y = r.number(j, path, "y", true);
  const auto p = r.number(j, path, "p", p_out != nullptr);
  std::optional<std::vector<double>> xs;
  if (x) xs = r.number_list(*x, join(path, "x"));
  if (!xs || !y || (p_out && !p)) return std::nullopt;
  if (p_out) *p_out = *p;
  return LabeledExample{std::move(*xs), *y};
}

std::shared_ptr<const Environment> parse_environment(Reader& r, const json& j,
                                                     const std::string& path) {
  if (!r.expect_object(j, path)) return nullptr;
  r.check_keys(j, path, {"input_dim", "tasks"});
  const auto dim = r.unsigned_int(j, path, "input_dim", false, 1);
  const json* tasks = r.find(j, path, "tasks", true);
  if (!tasks) return nullptr;
  const std::string tasks_path = join(path, "tasks");
  if (!tasks->is_array() || tasks->empty()) {
    r.add(Kind::Range, tasks_path, "must be a nonempty array");
    return nullptr;
  }
  const std::size_t before = r.issues.size();
  std::vector<std::pair<FiniteTask, double>> parsed;
  for (std::size_t t = 0; t < tasks->size(); ++t) {
    const json& task = (*tasks)[t];
    const std::string task_path = indexed(tasks_path, t);
    if (!r.expect_object(task, task_path)) continue;
    r.check_keys(task, task_path, {"p", "support"});
    const auto p = r.number(task, task_path, "p", true);
    const json* support = r.find(task, task_path, "support", true);
    if (!support) continue;
    const std::string support_path = join(task_path, "support");
    if (!support->is_array() || support->empty()) {
      r.add(Kind::Range, support_path, "must be a nonempty array");
      continue;
    }
    std::vector<std::pair<LabeledExample, double>> points;
    for (std::size_t k = 0; k < support->size(); ++k) {
      double pz = 0.0;
      auto z = parse_example(r, (*support)[k], indexed(support_path, k), &pz);
      if (z) points.emplace_back(std::move(*z), pz);
    }
    if (r.issues.size() != before || !p) continue;
    try {
      parsed.emplace_back(FiniteTask(std::move(points)), *p);
    } catch (const InvalidArgument& e) {
      r.add(Kind::Range, task_path, e.what());
    }
  }
  if (r.issues.size() != before) return nullptr;
  const std::size_t input_dim = dim ? *dim : parsed.front().first.input_dim();
  try {
    return std::make_shared<const Environment>(std::move(parsed), input_dim);
  } catch (const InvalidArgument& e) {
    r.add(Kind::Range, path, e.what());
    return nullptr;
  }
}

std::optional<Grid> parse_grid(Reader& r, const json& j, const std::string& path) {
  if (!r.expect_object(j, path)) return std::nullopt;
  r.check_keys(j, path, {"lo", "step", "count"});
  const auto lo = r.number(j, path, "lo", true);
  auto step = r.number(j, path, "step", true);
  const auto count = r.unsigned_int(j, path, "count", true, 1);
  r.range(step, join(path, "step"), 0.0, true, INFINITY, true);
  if (!lo || !step || !count) return std::nullopt;
  return Grid{*lo, *step, static_cast<std::size_t>(*count)};
}

std::optional<FamilySpec> parse_family(Reader& r, const json& j, const std::string& path) {
  if (!r.expect_object(j, path)) return std::nullopt;
  r.check_keys(j, path, {"v_dim", "weights", "bias", "selections"});
  FamilySpec spec;
  const std::size_t before = r.issues.size();
  if (const auto v = r.unsigned_int(j, path, "v_dim", false, 1)) spec.v_dim = *v;
  const json* w = r.find(j, path, "weights", true);
  const json* b = r.find(j, path, "bias", true);
  if (w) {
    if (auto g = parse_grid(r, *w, join(path, "weights"))) spec.weights = *g;
  }
  if (b) {
    if (auto g = parse_grid(r, *b, join(path, "bias"))) spec.bias = *g;
  }
  if (const json* sel = r.find(j, path, "selections", false)) {
    const std::string sel_path = join(path, "selections");
    if (!sel->is_array() || sel->empty()) {
      r.add(Kind::Range, sel_path, "must be a nonempty array of coordinate lists");
    } else {
      for (std::size_t i = 0; i < sel->size(); ++i) {
        const json& row = (*sel)[i];
        if (!row.is_array()) {
          r.add(Kind::Range, indexed(sel_path, i), "must be an array of coordinates");
          continue;
        }
        std::vector<std::size_t> coords;
        for (const auto& c : row) {
          if (auto u = r.unsigned_value(c, indexed(sel_path, i), 0)) coords.push_back(*u);
        }
        spec.selections.push_back(std::move(coords));
      }
    }
  }
  if (r.issues.size() != before) return std::nullopt;
  return spec;
}

std::optional<ProbeMeasure> parse_probe(Reader& r, const json& j, const std::string& path) {
  if (!r.expect_object(j, path)) return std::nullopt;
  r.check_keys(j, path, {"space", "atoms"});
  const auto space = r.string(j, path, "space", true);
  const json* atoms = r.find(j, path, "atoms", true);
  if (!space || !atoms) return std::nullopt;
  if (*space != "heads" && *space != "reps") {
    r.add(Kind::Range, join(path, "space"), "must be \"heads\" or \"reps\"");
    return std::nullopt;
  }
  const std::string atoms_path = join(path, "atoms");
  if (!atoms->is_array() || atoms->empty()) {
    r.add(Kind::Range, atoms_path, "must be a nonempty array");
    return std::nullopt;
  }
  const std::size_t before = r.issues.size();
  try {
    if (*space == "heads") {
      std::vector<std::pair<HeadPoint, double>> pts;
      for (std::size_t k = 0; k < atoms->size(); ++k) {
        const json& a = (*atoms)[k];
        const std::string apath = indexed(atoms_path, k);
        if (!r.expect_object(a, apath)) continue;
        r.check_keys(a, apath, {"v", "y", "p"});
        const json* v = r.find(a, apath, "v", true);
        const auto y = r.number(a, apath, "y", true);
        const auto p = r.number(a, apath, "p", true);
        std::optional<std::vector<double>> vs;
        if (v) vs = r.number_list(*v, join(apath, "v"));
        if (vs && y && p) pts.push_back({HeadPoint{std::move(*vs), *y}, *p});
      }
      if (r.issues.size() != before) return std::nullopt;
      return ProbeMeasure::on_heads(std::move(pts));
    }
    std::vector<std::pair<LabeledExample, double>> pts;
    for (std::size_t k = 0; k < atoms->size(); ++k) {
      double p = 0.0;
      if (auto z = parse_example(r, (*atoms)[k], indexed(atoms_path, k), &p)) {
        pts.emplace_back(std::move(*z), p);
      }
    }
    if (r.issues.size() != before) return std::nullopt;
    return ProbeMeasure::on_reps(std::move(pts));
  } catch (const InvalidArgument& e) {
    r.add(Kind::Range, path, e.what());
    return std::nullopt;
  }
}

std::optional<ExperimentKind> parse_kind(const std::string& s) {
  if (s == "meta_train_eval") return ExperimentKind::MetaTrainEval;
  if (s == "capacity_table") return ExperimentKind::CapacityTable;
  if (s == "bounds_table") return ExperimentKind::BoundsTable;
  if (s == "validate_thm1") return ExperimentKind::ValidateThm1;
  if (s == "validate_thm2") return ExperimentKind::ValidateThm2;
  if (s == "transfer_risk") return ExperimentKind::TransferRisk;
  return std::nullopt;
}

void parse_params(Reader& r, json& j, ExperimentKind kind, ExperimentParams& p,
                  const Environment* env) {
  const std::string path = "params";
  if (!r.expect_object(j, path)) return;
  r.check_keys(j, path,
               {"alpha", "delta", "nu", "eps1", "eps2", "n", "m", "trials", "targets", "target_m",
                "sample_sizes", "holdout_fraction", "cover_mode", "eps_grid", "alpha_grid",
                "eps_split", "fixed_tasks", "probes"});

  const bool validate_kind = kind == ExperimentKind::ValidateThm1 || kind == ExperimentKind::ValidateThm2;
  const bool bounds_kind = kind == ExperimentKind::BoundsTable;

  if (const auto s = r.string(j, path, "sample_sizes", false)) {
    if (*s == "explicit") p.sample_sizes = SampleSizeMode::Explicit;
    else if (*s == "theorem") p.sample_sizes = SampleSizeMode::Theorem;
    else r.add(Kind::Range, "params.sample_sizes", "must be \"explicit\" or \"theorem\"");
  }
  j["sample_sizes"] = p.sample_sizes == SampleSizeMode::Theorem ? "theorem" : "explicit";
  const bool theorem_mode = validate_kind && p.sample_sizes == SampleSizeMode::Theorem;

  p.alpha = r.number(j, path, "alpha", validate_kind || bounds_kind);
  p.delta = r.number(j, path, "delta", validate_kind || bounds_kind);
  p.nu = r.number(j, path, "nu", validate_kind || bounds_kind);
  p.eps1 = r.number(j, path, "eps1", theorem_mode);
  p.eps2 = r.number(j, path, "eps2", theorem_mode);
  r.range(p.alpha, "params.alpha", 0.0, true, 1.0, true);
  r.range(p.delta, "params.delta", 0.0, true, 1.0, true);
  r.range(p.nu, "params.nu", 0.0, true, INFINITY, true);
  r.range(p.eps1, "params.eps1", 0.0, true, 1.0, true);
  r.range(p.eps2, "params.eps2", 0.0, true, 1.0, true);

  const bool need_n = kind == ExperimentKind::MetaTrainEval || bounds_kind ||
                      kind == ExperimentKind::ValidateThm1 ||
                      (kind == ExperimentKind::ValidateThm2 && !theorem_mode);
  const bool need_m = kind == ExperimentKind::MetaTrainEval || kind == ExperimentKind::TransferRisk ||
                      (validate_kind && !theorem_mode);
  if (const auto n = r.unsigned_int(j, path, "n", need_n, 1)) p.n = *n;
  if (const auto m = r.unsigned_int(j, path, "m", need_m, 1)) p.m = *m;
  if (const auto t = r.unsigned_int(j, path, "targets", false, 1)) p.targets = *t;
  if (const auto t = r.unsigned_int(j, path, "target_m", false, 1)) p.target_m = *t;

  const std::uint64_t min_trials = validate_kind ? 100 : 2;
  if (const auto t = r.unsigned_int(j, path, "trials", false, min_trials)) p.trials = *t;
  j["trials"] = p.trials;

  auto holdout = r.number(j, path, "holdout_fraction", false);
  r.range(holdout, "params.holdout_fraction", 0.0, false, 1.0, true);
  if (holdout) p.holdout_fraction = *holdout;
  j["holdout_fraction"] = p.holdout_fraction;

  if (const auto s = r.string(j, path, "cover_mode", false)) {
    if (*s == "exact") p.cover_mode = CoverMode::Exact;
    else if (*s == "greedy") p.cover_mode = CoverMode::Greedy;
    else r.add(Kind::Range, "params.cover_mode", "must be \"exact\" or \"greedy\"");
  }
  j["cover_mode"] = p.cover_mode == CoverMode::Exact ? "exact" : "greedy";

  auto split = r.number(j, path, "eps_split", false);
  r.range(split, "params.eps_split", 0.0, true, 1.0, true);
  if (split) p.eps_split = *split;

  const auto positive_list = [&](const char* key, std::vector<double>& out, double hi) {
    if (const json* v = r.find(j, path, key, false)) {
      if (auto list = r.number_list(*v, join(path, key))) {
        for (double e : *list) {
          if (!(e > 0.0 && e < hi)) {
            r.add(Kind::Range, join(path, key), "entries must be positive and below " +
                                                    std::to_string(hi));
            return;
          }
        }
        if (list->empty()) {
          r.add(Kind::Range, join(path, key), "must not be empty");
          return;
        }
        out = std::move(*list);
      }
    }
  };
  positive_list("eps_grid", p.eps_grid, INFINITY);
  positive_list("alpha_grid", p.alpha_grid, 1.0);
  if (kind == ExperimentKind::CapacityTable && !j.contains("eps_grid")) {
    r.add(Kind::Missing, "params.eps_grid", "required field is missing");
  }

  if (const json* ft = r.find(j, path, "fixed_tasks", false)) {
    if (!ft->is_array()) {
      r.add(Kind::Range, "params.fixed_tasks", "must be an array of task indices");
    } else {
      for (const auto& e : *ft) {
        if (auto u = r.unsigned_value(e, "params.fixed_tasks", 0)) {
          if (env && *u >= env->size()) {
            r.add(Kind::Range, "params.fixed_tasks", "task index " + std::to_string(*u) +
                                                         " out of range");
          }
          p.fixed_tasks.push_back(*u);
        }
      }
      if (p.n && p.fixed_tasks.size() != *p.n) {
        r.add(Kind::Constraint, "params.fixed_tasks", "must list exactly n task indices");
      }
    }
  }

  json probes = j.contains("probes") ? j["probes"] : json::object();
  if (r.expect_object(probes, "params.probes")) {
    r.check_keys(probes, "params.probes", {"single_atoms", "uniform_pairs", "extra"});
    if (const auto b = r.boolean(probes, "params.probes", "single_atoms")) p.probes.single_atoms = *b;
    if (const auto b = r.boolean(probes, "params.probes", "uniform_pairs")) p.probes.uniform_pairs = *b;
    if (const json* extra = r.find(probes, "params.probes", "extra", false)) {
      if (!extra->is_array()) {
        r.add(Kind::Range, "params.probes.extra", "must be an array of probe measures");
      } else {
        for (std::size_t i = 0; i < extra->size(); ++i) {
          if (auto pm = parse_probe(r, (*extra)[i], indexed("params.probes.extra", i))) {
            p.probes.extra.push_back(std::move(*pm));
          }
        }
      }
    }
    probes["single_atoms"] = p.probes.single_atoms;
    probes["uniform_pairs"] = p.probes.uniform_pairs;
    j["probes"] = probes;
  }

  if (theorem_mode && p.alpha && p.nu && p.eps1 && p.eps2) {
    const bool first = kind == ExperimentKind::ValidateThm1;
    const double divisor = first ? 8.0 : 16.0;
    const double target = *p.alpha * *p.nu / divisor;
    if (std::abs(*p.eps1 + *p.eps2 - target) > kRadiusTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "eps1 + eps2 must equal alpha*nu/" << divisor << " = " << target
         << " within 1e-12 (got " << (*p.eps1 + *p.eps2) << ")";
      r.add(Kind::Constraint, "params.eps1", os.str());
    }
  }
  if (!p.probes.single_atoms && !p.probes.uniform_pairs && p.probes.extra.empty() &&
      (kind == ExperimentKind::CapacityTable || bounds_kind || theorem_mode)) {
    r.add(Kind::Constraint, "params.probes", "probe family is empty");
  }
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::MetaTrainEval: return "meta_train_eval";
    case ExperimentKind::CapacityTable: return "capacity_table";
    case ExperimentKind::BoundsTable: return "bounds_table";
    case ExperimentKind::ValidateThm1: return "validate_thm1";
    case ExperimentKind::ValidateThm2: return "validate_thm2";
    case ExperimentKind::TransferRisk: return "transfer_risk";
  }
  return "unknown";
}

std::string describe(const ConfigIssue& issue) {
  const char* label = "";
  switch (issue.kind) {
    case Kind::Parse: label = "parse error"; break;
    case Kind::UnknownKey: label = "unknown key"; break;
    case Kind::Range: label = "range error"; break;
    case Kind::Missing: label = "missing field"; break;
    case Kind::Constraint: label = "constraint error"; break;
  }
  return std::string(label) + (issue.key.empty() ? "" : " at '" + issue.key + "'") + ": " +
         issue.message;
}

namespace {
std::string summarize_issues(const std::vector<ConfigIssue>& issues) {
  std::string out = "invalid configuration";
  for (const auto& i : issues) out += "\n  " + describe(i);
  return out;
}
}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(summarize_issues(issues)), issues_(std::move(issues)) {}

ConfigResult validate_config(std::string_view text, const ConfigOverrides& overrides) {
  Reader r;
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    r.add(Kind::Parse, "", e.what());
    return r.issues;
  }
  if (!r.expect_object(root, "")) return r.issues;
  r.check_keys(root, "", {"kind", "seed", "output", "environment", "source_environment",
                          "target_environment", "family", "loss", "params"});

  ExperimentConfig cfg;
  std::optional<ExperimentKind> kind;
  if (const auto k = r.string(root, "", "kind", true)) {
    kind = parse_kind(*k);
    if (!kind) {
      r.add(Kind::Range, "kind",
            "must be one of meta_train_eval, capacity_table, bounds_table, validate_thm1, "
            "validate_thm2, transfer_risk");
    }
  }

  std::optional<std::uint64_t> seed = r.unsigned_int(root, "", "seed", false);
  if (overrides.seed) seed = overrides.seed;
  if (!seed) seed = overrides.fallback_seed;
  cfg.seed = seed.value_or(0);
  root["seed"] = cfg.seed;

  if (overrides.output) root["output"] = overrides.output->string();
  if (const auto out = r.string(root, "", "output", false)) {
    if (out->empty()) r.add(Kind::Range, "output", "must not be empty");
    cfg.output = *out;
  } else if (!root.contains("output")) {
    cfg.output = kDefaultOutput;
    root["output"] = kDefaultOutput;
  }

  const json* env = r.find(root, "", "environment", true);
  if (env) cfg.environment = parse_environment(r, *env, "environment");
  if (const json* s = r.find(root, "", "source_environment", false)) {
    cfg.source_environment = parse_environment(r, *s, "source_environment");
  }
  if (const json* t = r.find(root, "", "target_environment", false)) {
    cfg.target_environment = parse_environment(r, *t, "target_environment");
  }

  json loss = root.contains("loss") ? root["loss"] : json::object({{"M", 1.0}});
  if (r.expect_object(loss, "loss")) {
    r.check_keys(loss, "loss", {"M"});
    auto M = r.number(loss, "loss", "M", true);
    r.range(M, "loss.M", 0.0, true, INFINITY, true);
    if (M) cfg.loss_bound = *M;
  }
  root["loss"] = loss;

  std::optional<FamilySpec> family_spec;
  if (const json* fam = r.find(root, "", "family", true)) family_spec = parse_family(r, *fam, "family");

  if (!root.contains("params")) root["params"] = json::object();
  if (kind) parse_params(r, root["params"], *kind, cfg.params, cfg.environment.get());

  if (family_spec && cfg.environment) {
    for (const Environment* e : {cfg.source_environment.get(), cfg.target_environment.get()}) {
      if (e && e->input_dim() != cfg.environment->input_dim()) {
        r.add(Kind::Constraint, "environment",
              "source/target environments must share the environment's input_dim");
      }
    }
    try {
      cfg.family_spec = *family_spec;
      cfg.family = std::make_shared<const HypothesisFamily>(HypothesisFamily::from_spec(
          cfg.environment->input_dim(), *family_spec, LossFn::clipped_squared(cfg.loss_bound)));
    } catch (const InvalidArgument& e) {
      r.add(Kind::Range, "family", e.what());
    }
  }

  if (overrides.trials) {
    const std::uint64_t min_trials =
        (kind == ExperimentKind::ValidateThm1 || kind == ExperimentKind::ValidateThm2) ? 100 : 2;
    if (*overrides.trials < min_trials) {
      r.add(Kind::Range, "params.trials", "override must be at least " + std::to_string(min_trials));
    } else {
      cfg.params.trials = *overrides.trials;
      root["params"]["trials"] = *overrides.trials;
    }
  }

  if (!r.issues.empty()) return r.issues;
  cfg.kind = *kind;
  cfg.canonical_json = root.dump();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError({{Kind::Parse, "", "cannot read config file " + path.string()}});
  std::ostringstream ss;
  ss << is.rdbuf();
  auto result = validate_config(ss.str(), overrides);
  if (auto* issues = std::get_if<std::vector<ConfigIssue>>(&result)) throw ConfigError(*issues);
  return std::get<ExperimentConfig>(std::move(result));
}

std::string git_blob_hash(std::string_view text) {
  const std::string header = "blob " + std::to_string(text.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw RuntimeError("sha1: cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, text.data(), text.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw RuntimeError("sha1: digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace metalab
