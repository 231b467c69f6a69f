"""Regenerates the bundled reference configs in this directory."""
import json
import pathlib

HERE = pathlib.Path(__file__).parent
NOISE = (-0.3, 0.1, 0.2)


def task(slope, intercept, p):
    support = []
    for x0 in (0, 1):
        for x1 in (0, 1):
            for e in NOISE:
                support.append({"x": [x0, x1], "y": slope * x1 + intercept + e,
                                "p": 1.0 / (4 * len(NOISE))})
    return {"p": p, "support": support}


ENV = {"input_dim": 2, "tasks": [task(1.0, 0.0, 0.5), task(-0.5, 0.5, 0.3), task(0.5, -0.5, 0.2)]}
FAMILY = {"v_dim": 1, "weights": {"lo": -1, "step": 0.5, "count": 5},
          "bias": {"lo": -0.5, "step": 0.5, "count": 3}}


def write(name, kind, params):
    cfg = {"kind": kind, "seed": 20240611, "output": f"out/{name}", "environment": ENV,
           "family": FAMILY, "loss": {"M": 1.0}, "params": params}
    (HERE / f"{name}.json").write_text(json.dumps(cfg, indent=2) + "\n")


write("validate_thm2", "validate_thm2",
      {"alpha": 0.5, "delta": 0.1, "nu": 1.0, "eps1": 0.015625, "eps2": 0.015625,
       "sample_sizes": "theorem", "trials": 1000})
write("validate_thm1", "validate_thm1",
      {"alpha": 0.5, "delta": 0.1, "nu": 1.0, "eps1": 0.03125, "eps2": 0.03125, "n": 3,
       "fixed_tasks": [0, 1, 2], "sample_sizes": "theorem", "trials": 1000})
write("capacity_table", "capacity_table",
      {"eps_grid": [0.01, 0.015625, 0.03125, 0.0625, 0.125, 0.25, 0.5], "cover_mode": "greedy"})
write("bounds_table", "bounds_table",
      {"alpha": 0.5, "delta": 0.1, "nu": 1.0, "n": 3, "alpha_grid": [0.25, 0.5, 0.75, 0.9]})
write("meta_train_eval", "meta_train_eval", {"n": 20, "m": 16, "targets": 50, "target_m": 2})
write("transfer_risk", "transfer_risk", {"n": 20, "m": 2, "trials": 5000})
