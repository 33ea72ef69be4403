"""Batch experiment harness.

Every run reads one JSON config, builds the zero family it names and writes
CSV tables plus a JSON report into the output directory.  Example config::

    {"family": {"kind": "tangential", "x_rule": {"name": "harmonic"}},
     "n_range": [10, 30], "truncation": 10000, "epsilon": 1.0,
     "window_C": 16, "outputs": "out", "seed": 0}

Family kinds: ``tangential`` (``x_rule``), ``oricyclic`` (``theta_rule``),
``designed`` (``growth``, a growth spec dict) and ``explicit`` (``path`` to a
``delta,theta`` CSV, relative paths resolved against the config file).

Exit codes: 0 ok, 2 config error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import blaschke as bl
from .blaschke import ZeroSequence
from .designer import (GrowthSpec, design_from_growth, oricyclic_family, sigma_partials,
                       tangential_family)
from .disk_geometry import rho
from .errors import BHGrowthError
from .gram import MAX_GRAM_SIZE, beta_sequence, gram_matrix, unconditionality_diagnostic
from .partition import growth_parameter, ratio_spread, two_sided_verify
from .rules import Rule, theta_rule_from_dict, x_rule_from_dict
from .summation import cumsum, half_increase
from .witness import (l2_tail_bound, lower_bound_check, ratios_nonvanishing, thm33_witness,
                      truncation_bound)

N_MAX_GUARD = 45
CONVERGENCE_TOL = 1e-2

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(Exception):
    pass


class NumericFailure(Exception):
    pass


@dataclass
class ExperimentConfig:
    family: dict
    n_range: tuple[int, int] = (10, 30)
    truncation: int = 10_000
    epsilon: float = 1.0
    window_C: float = 16.0
    outputs: str = "out"
    seed: int = 0
    force_large_n: bool = False
    base_dir: Path = field(default=Path("."), repr=False)

    def __post_init__(self):
        if not isinstance(self.family, dict) or "kind" not in self.family:
            raise ConfigError("family must be an object with a 'kind'")
        try:
            lo, hi = (int(v) for v in self.n_range)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"n_range must be [N_min, N_max]: {exc}") from exc
        if not 1 <= lo <= hi:
            raise ConfigError(f"n_range needs 1 <= N_min <= N_max, got {[lo, hi]}")
        if hi > N_MAX_GUARD and not self.force_large_n:
            raise ConfigError(f"N_max = {hi} exceeds {N_MAX_GUARD}; pass --force-large-n "
                              "to accept degraded precision")
        self.n_range = (lo, hi)
        if int(self.truncation) < 1:
            raise ConfigError("truncation K must be >= 1")
        self.truncation = int(self.truncation)
        if not float(self.epsilon) > 0:
            raise ConfigError("epsilon must be positive")
        if not float(self.window_C) > 1:
            raise ConfigError("window_C must exceed 1")

    @classmethod
    def from_dict(cls, d: dict, base_dir: Path = Path(".")) -> "ExperimentConfig":
        known = {"family", "n_range", "truncation", "epsilon", "window_C", "outputs", "seed",
                 "force_large_n"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "family" not in d:
            raise ConfigError("config needs a 'family'")
        return cls(**d, base_dir=base_dir)

    @property
    def levels(self) -> range:
        return range(self.n_range[0], self.n_range[1] + 1)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("base_dir")
        out["n_range"] = list(self.n_range)
        return out


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    p = Path(path)
    try:
        d = json.loads(p.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    for k, v in (overrides or {}).items():
        if v is None:
            continue
        if k == "n_min":
            d["n_range"] = [v, list(d.get("n_range", [10, 30]))[1]]
        elif k == "n_max":
            d["n_range"] = [list(d.get("n_range", [10, 30]))[0], v]
        else:
            d[k] = v
    return ExperimentConfig.from_dict(d, base_dir=p.parent)


# -- families --------------------------------------------------------------


@dataclass
class Family:
    seq: ZeroSequence
    x_rule: Rule | None = None
    growth: GrowthSpec | None = None

    def target_sigma(self, N: int) -> float | None:
        """Growth target at level ``N`` (``sum_{n<=N} x_n`` or the designed ``sigma_N``)."""
        if self.x_rule is not None:
            if N < self.x_rule.start:
                return None
            return float(sigma_partials(self.x_rule, N)[-1])
        if self.growth is not None and N >= self.growth.first_N:
            if self.growth.kind == "nodes" and N > self.growth.nodes[-1][0]:
                return None
            return self.growth.sigma(N)
        return None


def build_family(cfg: ExperimentConfig) -> Family:
    f = cfg.family
    kind = f["kind"]
    K = cfg.truncation
    if kind == "tangential":
        rule = x_rule_from_dict(f.get("x_rule", {}))
        return Family(tangential_family(rule, K), x_rule=rule)
    if kind == "oricyclic":
        return Family(oricyclic_family(theta_rule_from_dict(f.get("theta_rule", {})), K))
    if kind == "designed":
        g = GrowthSpec.from_dict(f.get("growth", {}))
        return Family(design_from_growth(g, K), growth=g)
    if kind == "explicit":
        if "path" not in f:
            raise ConfigError("explicit family needs a 'path'")
        path = Path(f["path"])
        if not path.is_absolute():
            path = cfg.base_dir / path
        try:
            return Family(ZeroSequence.read_csv(path))
        except OSError as exc:
            raise ConfigError(f"cannot read zero file: {exc}") from exc
    raise ConfigError(f"unknown family kind {kind!r}")


# -- output helpers --------------------------------------------------------


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(v) for v in r])


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return _finite(obj)


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def _check_finite(name: str, *values) -> None:
    for v in values:
        if isinstance(v, complex):
            ok = math.isfinite(v.real) and math.isfinite(v.imag)
        else:
            ok = math.isfinite(v)
        if not ok:
            raise NumericFailure(f"{name} is not finite ({v!r})")


def _family_report(fam: Family) -> dict:
    s = fam.seq
    return {"family_tag": s.family_tag, "truncation_len": s.truncation_len,
            "index_start": s.index_start, "tail_delta_sum": s.tail_delta_sum}


# -- commands --------------------------------------------------------------


def cmd_verify(cfg: ExperimentConfig, out: Path) -> dict:
    """Blaschke, Frostman and Ahern-Clark partial sums with a convergence proxy."""
    fam = build_family(cfg)
    s = fam.seq
    report = {"command": "verify", "config": cfg.to_dict(), "family": _family_report(fam),
              "convergence_tol": CONVERGENCE_TOL, "conditions": {}}
    rows = []
    parts = {}
    for name, terms in (("blaschke", bl.blaschke_terms(s)), ("frostman", bl.frostman_terms(s)),
                        ("ahern_clark", bl.ahern_clark_terms(s))):
        p = cumsum(terms)
        _check_finite(name, float(p[-1]))
        h = half_increase(p)
        report["conditions"][name] = {
            "partial_sum": float(p[-1]), "half_increase": h,
            "status": "converged" if h < CONVERGENCE_TOL else "diverging"}
        parts[name] = p
    for i in range(s.truncation_len):
        rows.append([s.index_start + i] + [float(parts[k][i]) for k in parts])
    write_csv(out / "verify_partials.csv", ["n", "blaschke", "frostman", "ahern_clark"], rows)
    return report


def _growth_rows(cfg: ExperimentConfig, fam: Family):
    rows, summary_k, summary_s = [], [], []
    two = two_sided_verify(fam.seq, cfg.levels)
    for r in two:
        ks = bl.kernel_norm_sq_sum(fam.seq, rho(r.N)).value
        target = fam.target_sigma(r.N)
        rt = r.kernel_sq / target if target else None
        _check_finite(f"kernel_sq at N = {r.N}", r.kernel_sq, ks, r.sigma_lambda)
        rows.append([r.N, r.kernel_sq, ks, r.sigma_lambda, target, r.ratio, rt, r.tail_bound])
        summary_s.append(r.ratio)
        if rt is not None:
            summary_k.append(rt)
    return rows, summary_s, summary_k


def _window(values, C: float) -> dict:
    if not values:
        return {"min": None, "max": None, "spread": None, "within_window": None}
    return {"min": min(values), "max": max(values), "spread": ratio_spread(values),
            "within_window": ratio_spread(values) <= C}


GROWTH_HEADER = ["N", "kernel_sq", "kernel_sum", "sigma_lambda", "phi", "ratio_sigma_lambda",
                 "ratio_phi", "tail_bound"]


def cmd_growth(cfg: ExperimentConfig, out: Path, fam: Family | None = None) -> dict:
    """Kernel norm against the band growth parameter and the target growth ``phi``."""
    fam = fam or build_family(cfg)
    rows, rs, rk = _growth_rows(cfg, fam)
    write_csv(out / "growth.csv", GROWTH_HEADER, rows)
    return {"command": "growth", "config": cfg.to_dict(), "family": _family_report(fam),
            "window_C": cfg.window_C, "ratio_sigma_lambda": _window(rs, cfg.window_C),
            "ratio_phi": _window(rk, cfg.window_C)}


def cmd_design(cfg: ExperimentConfig, out: Path) -> dict:
    """Design zeros from a growth spec, then rerun the growth scan on them."""
    if cfg.family.get("kind") != "designed":
        raise ConfigError("design needs a family of kind 'designed'")
    fam = build_family(cfg)
    fam.seq.write_csv(out / "zeros.csv")
    rep = cmd_growth(cfg, out, fam)
    achieved = []
    for N in cfg.levels:
        t = fam.target_sigma(N)
        if t is None:
            continue
        achieved.append([N, t, growth_parameter(fam.seq, N).sigma_lambda])
    write_csv(out / "design_sigma.csv", ["N", "target_sigma", "achieved_sigma_lambda"], achieved)
    ach = [a / t for _, t, a in achieved]
    rep.update({"command": "design", "growth_spec": fam.growth.to_dict(),
                "zeros_written": fam.seq.truncation_len,
                "achieved_over_target": _window(ach, cfg.window_C)})
    return rep


def cmd_witness(cfg: ExperimentConfig, out: Path) -> dict:
    """Witness coefficients, evaluations along ``rho_N`` and the l2 certificate."""
    if cfg.family.get("kind") != "tangential":
        raise ConfigError("witness needs a tangential family")
    rule = x_rule_from_dict(cfg.family.get("x_rule", {}))
    w = thm33_witness(rule, cfg.epsilon, cfg.truncation)
    write_csv(out / "witness.csv", ["n", "alpha_n", "delta_n", "theta_n"], w.rows())
    rows = lower_bound_check(w, cfg.levels)
    ev = []
    for r in rows:
        _check_finite(f"witness at N = {r.N}", r.value)
        ev.append([r.N, r.value.real, r.value.imag, abs(r.value), r.target, r.ratio,
                   truncation_bound(w, r.N)])
    write_csv(out / "evaluation.csv",
              ["N", "value_re", "value_im", "abs", "target", "ratio", "tail_bound"], ev)
    K_eff = w.base.index_start + w.base.truncation_len - 1
    l2 = w.l2_sq()
    bound = l2_tail_bound(rule, cfg.epsilon, K_eff)
    return {"command": "witness", "config": cfg.to_dict(), "first_index": w.first_index,
            "coefficients": int(w.coeffs.size), "l2_sq": l2, "l2_bound": bound,
            "l2_certified": l2 <= bound, "ratios_nonvanishing": ratios_nonvanishing(rows),
            "ratio_min": min(r.ratio for r in rows), "ratio_max": max(r.ratio for r in rows)}


def cmd_gram(cfg: ExperimentConfig, out: Path) -> dict:
    """Gram matrix of normalized kernels at ``rho_N`` and the beta diagnostic."""
    fam = build_family(cfg)
    levels = list(cfg.levels)[:MAX_GRAM_SIZE]
    report = {"command": "gram", "config": cfg.to_dict(), "family": _family_report(fam)}
    if cfg.family["kind"] == "explicit":
        # a finite product of degree d has a d-dimensional model space
        levels = levels[: fam.seq.truncation_len]
    G = gram_matrix(fam.seq, levels)
    write_csv(out / "gram.csv", ["n", "k", "re", "im"],
              ([levels[i], levels[j], complex(G.entries[i, j]).real,
                complex(G.entries[i, j]).imag]
               for i in range(G.size) for j in range(G.size)))
    report["gram_size"] = G.size
    if cfg.family["kind"] == "explicit":
        report.update({"verdict": "consistent_with_unconditional",
                       "note": "finite zero list: the model space is finite dimensional"})
        return report
    if fam.x_rule is None:
        raise ConfigError("the beta diagnostic needs a tangential family")
    w = thm33_witness(fam.x_rule, cfg.epsilon, cfg.truncation)
    betas = beta_sequence(w, cfg.levels)
    _check_finite("beta", *betas.tolist())
    d = unconditionality_diagnostic(betas)
    write_csv(out / "beta.csv", ["N", "beta", "partial_l2"],
              zip(cfg.levels, betas.tolist(), d.partial_l2.tolist()))
    report.update({"tail_share": d.tail_share, "threshold": d.threshold,
                   "verdict": d.verdict, "note": d.note})
    return report


COMMANDS = {"verify": cmd_verify, "growth": cmd_growth, "design": cmd_design,
            "witness": cmd_witness, "gram": cmd_gram}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bhgrowth", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="experiment JSON")
    ap.add_argument("--out", help="output directory (overrides 'outputs')")
    ap.add_argument("--k", type=int, dest="truncation", help="truncation K")
    ap.add_argument("--n-min", type=int)
    ap.add_argument("--n-max", type=int)
    ap.add_argument("--epsilon", type=float)
    ap.add_argument("--window", type=float, dest="window_C")
    ap.add_argument("--force-large-n", action="store_true", default=None,
                    help=f"allow N_max > {N_MAX_GUARD} with degraded precision")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, {
            "truncation": args.truncation, "n_min": args.n_min, "n_max": args.n_max,
            "epsilon": args.epsilon, "window_C": args.window_C, "outputs": args.out,
            "force_large_n": args.force_large_n})
        out = Path(cfg.outputs)
        if not out.is_absolute() and args.out is None:
            out = cfg.base_dir / out
        out.mkdir(parents=True, exist_ok=True)
        report = COMMANDS[args.command](cfg, out)
        write_json(out / f"{args.command}_report.json", report)
    except (ConfigError, BHGrowthError, TypeError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericFailure, OverflowError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(json.dumps({k: _jsonable(v) for k, v in report.items() if k != "config"},
                     sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
