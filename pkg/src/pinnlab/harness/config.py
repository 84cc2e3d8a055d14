"""INI experiment configuration: flat key=value pairs under section headers.

Sections:
  [experiment]  case, variant (comma list allowed), seeds, out
  [problem]     extra case parameters (e.g. k = 15 for the sweep family)
  [schedule]    any TrainingSchedule field
  [variant]     residual_weight, rff_scales
  [sweep]       k_list (sweep command only)
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields

from ..problems import CASE_NAMES
from ..trainer import VARIANT_TAGS, ModelVariant, TrainingSchedule


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    case: str
    variants: list
    seeds: list
    out_dir: str = "."
    problem_params: dict = field(default_factory=dict)
    schedule_fields: dict = field(default_factory=dict)
    variant_params: dict = field(default_factory=dict)
    k_list: list = field(default_factory=list)
    fdm_nodes: int = 1000

    def schedule(self, seed: int) -> TrainingSchedule:
        return TrainingSchedule(seed=seed, **self.schedule_fields)

    def model_variant(self, tag: str) -> ModelVariant:
        return ModelVariant(tag, **self.variant_params)


_SCHEDULE_TYPES = {f.name: f.type for f in fields(TrainingSchedule)}

_INT_FIELDS = {"n_interior", "n_boundary", "adam_iters", "warm_start_iters",
               "gd_block_iters", "inner_ls_rounds", "lbfgs_max_iters",
               "history_every", "test_points"}
_FLOAT_FIELDS = {"prune_threshold", "reg_strength", "boundary_weight",
                 "adam_lr", "lbfgs_grad_tol", "lbfgs_rel_loss_tol"}
_TUPLE_FIELDS = {"net_widths", "basis_periods"}


def _parse_tuple(text, cast):
    return tuple(cast(t.strip()) for t in text.split(",") if t.strip())


def _parse_schedule_value(key, text):
    if key in _INT_FIELDS:
        return int(text)
    if key in _FLOAT_FIELDS:
        return float(text)
    if key == "net_widths":
        return _parse_tuple(text, int)
    if key == "basis_periods":
        return _parse_tuple(text, float)
    if key == "k_max":
        parts = _parse_tuple(text, int)
        return parts[0] if len(parts) == 1 else parts
    if key == "colloc_scheme":
        return text.strip()
    raise ConfigError(f"unknown schedule field {key!r}")


def load_config(path) -> ExperimentConfig:
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    if "experiment" not in cp:
        raise ConfigError("missing [experiment] section")
    exp = cp["experiment"]
    case = exp.get("case", "").strip()
    if case not in CASE_NAMES:
        raise ConfigError(
            f"unknown case {case!r}; registered cases: {', '.join(CASE_NAMES)}")
    variants = [v.strip() for v in exp.get("variant", "").split(",") if v.strip()]
    if not variants:
        raise ConfigError("no variant given")
    for v in variants:
        if v not in VARIANT_TAGS:
            raise ConfigError(
                f"unknown variant {v!r}; registered variants: "
                f"{', '.join(VARIANT_TAGS)}")
    try:
        seeds = [int(s) for s in exp.get("seeds", "0").split(",") if s.strip()]
    except ValueError as e:
        raise ConfigError(f"bad seeds list: {e}") from None
    if not seeds:
        raise ConfigError("empty seeds list")

    cfg = ExperimentConfig(case=case, variants=variants, seeds=seeds,
                           out_dir=exp.get("out", ".").strip())
    if "problem" in cp:
        for k, v in cp["problem"].items():
            cfg.problem_params[k] = float(v) if "." in v else int(v)
    if "schedule" in cp:
        for k, v in cp["schedule"].items():
            cfg.schedule_fields[k] = _parse_schedule_value(k, v)
    if "variant" in cp:
        sec = cp["variant"]
        if "residual_weight" in sec:
            cfg.variant_params["residual_weight"] = float(sec["residual_weight"])
        if "rff_scales" in sec:
            cfg.variant_params["rff_scales"] = sec["rff_scales"].strip()
        for k in sec:
            if k not in ("residual_weight", "rff_scales"):
                raise ConfigError(f"unknown variant parameter {k!r}")
    if "sweep" in cp:
        sec = cp["sweep"]
        if "k_list" in sec:
            cfg.k_list = [int(t) for t in sec["k_list"].split(",") if t.strip()]
        if "fdm_nodes" in sec:
            cfg.fdm_nodes = int(sec["fdm_nodes"])
    # validate variant construction early (w_pinn weight table, rff scales)
    for v in variants:
        cfg.model_variant(v)
    try:
        cfg.schedule(seeds[0])
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad schedule: {e}") from None
    return cfg
