"""Command-line entry point.

Subcommands::

    infotests table1      exact Hardy-Weinberg table for n = 3
    infotests power       exact power curves (ex1: n = 3, ex2: n = 20)
    infotests ait         approximate information test on sampled distributions
    infotests motivating  classical and restricted LRT statistics for the 7-category example

Settings resolve as flags > ``--config`` JSON file > defaults, and the
resolved settings are echoed into every output file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .ait import fit_submanifold, embed_distribution, mc_significance, sample_distributions
from .exact import build_exact_test, chi2_critical_test, exact_power, hw_tables
from .learning import DegenerateInputError, DisconnectedGraphError
from .manifold import as_counts, as_simplex, likelihood_ratio_statistic, pearson_statistic
from .stats import RngSeed, chi2_survival
from .submanifolds import (
    COARSE_MHDE_XTOL,
    SPHERICAL,
    hw_map,
    hw_restricted_mhde,
    spherical_restricted_lrt,
    spherical_restricted_mle,
    submanifold_by_name,
)

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

MOTIVATING_NULL = (0.09, 0.09, 0.09, 0.25, 0.16, 0.16, 0.16)
MOTIVATING_COUNTS = (3, 5, 4, 6, 9, 2, 1)
SIGMA_BAR = (0.3, 0.3, 0.3, 0.5, 0.4, 0.4, 0.4)
HW_TAU_BAR = 0.3
# submanifold samples draw from this stream; Monte Carlo replicate i uses stream i
SUBMANIFOLD_STREAM = 2**63


class ValidationError(ValueError):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    out: str | None = None
    grid_step: float = 0.005
    alpha: float | None = None
    example: str = "ex1"
    submanifold: str = "spherical"
    m: int = 100
    knn: int | None = 5
    epsilon: float | None = None
    dim: int | None = None
    ell: int | None = None
    oos: str | None = None
    replicates: int = 2000
    dists: str | None = None
    counts: list | None = None
    null: list | None = None
    exact_mhde: bool = False
    workers: int = 1

    @classmethod
    def from_sources(cls, args: argparse.Namespace) -> "RunConfig":
        values = {}
        if getattr(args, "config", None):
            try:
                loaded = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ValidationError(f"cannot read config {args.config}: {exc}") from None
            known = {f.name for f in fields(cls)}
            unknown = set(loaded) - known
            if unknown:
                raise ValidationError(f"unknown config keys: {sorted(unknown)}")
            values.update(loaded)
        for f in fields(cls):
            v = getattr(args, f.name, None)
            if v is not None and v is not False:
                values[f.name] = v
        if getattr(args, "epsilon", None) is not None:
            values["knn"] = None
        cfg = cls(**values)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        for name in ("m", "replicates", "workers"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)!r}")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _parse_list(text: str, kind):
    try:
        return [kind(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv_text(header, rows, cfg: RunConfig, command: str) -> str:
    buf = io.StringIO()
    buf.write(f"# infotests {__version__} {command} config={cfg.to_json()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, cfg: RunConfig, filename: str, stdout) -> None:
    if cfg.out:
        path = Path(cfg.out)
        path.mkdir(parents=True, exist_ok=True)
        (path / filename).write_text(text)
    else:
        stdout.write(text)


# table1 ----------------------------------------------------------------------------


def table1_rows(exact_mhde: bool = False) -> list[tuple]:
    xtol = None if exact_mhde else COARSE_MHDE_XTOL
    unrestricted, restricted = hw_tables(3, HW_TAU_BAR, mhde_xtol=xtol)
    rows = []
    for x, p, iu, ir in zip(unrestricted.outcomes, unrestricted.null_probs, unrestricted.statistics, restricted.statistics):
        rows.append((*map(int, x), float(p), float(iu), hw_restricted_mhde(x, xtol), float(ir)))
    return rows


def cmd_table1(cfg: RunConfig, stdout=sys.stdout) -> list[tuple]:
    rows = table1_rows(cfg.exact_mhde)
    header = ["x1", "x2", "x3", "null_prob", "info_unrestricted", "tau_check", "info_restricted"]
    _emit(_csv_text(header, rows, cfg, "table1"), cfg, "table1.csv", stdout)
    return rows


# power -----------------------------------------------------------------------------

POWER_EXAMPLES = {"ex1": (3, 0.1), "ex2": (20, 0.05)}


def power_rows(example: str, grid_step: float, alpha: float | None = None) -> tuple[list[str], list[tuple]]:
    if example not in POWER_EXAMPLES:
        raise ValidationError(f"unknown example {example!r}; choose ex1 or ex2")
    if not 0 < grid_step <= 0.5:
        raise ValidationError(f"grid step must lie in (0, 0.5], got {grid_step}")
    n, default_alpha = POWER_EXAMPLES[example]
    alpha = default_alpha if alpha is None else alpha
    unrestricted, restricted = hw_tables(n, HW_TAU_BAR)
    t2 = build_exact_test(unrestricted, alpha)
    t1 = build_exact_test(restricted, alpha)
    t_chi2 = chi2_critical_test(restricted, alpha, df=1) if example == "ex2" else None
    steps = int(round(1.0 / grid_step))
    grid = np.unique(np.clip(np.round(np.arange(steps + 1) * grid_step, 12), 0.0, 1.0))
    header = ["tau", "beta2_unrestricted", "beta1_restricted"] + (["beta1_chi2"] if t_chi2 else [])
    rows = []
    for tau in grid:
        theta = hw_map(tau)
        row = [float(tau), exact_power(t2, unrestricted, theta), exact_power(t1, restricted, theta)]
        if t_chi2:
            row.append(exact_power(t_chi2, restricted, theta))
        rows.append(tuple(row))
    return header, rows


def cmd_power(cfg: RunConfig, stdout=sys.stdout):
    header, rows = power_rows(cfg.example, cfg.grid_step, cfg.alpha)
    _emit(_csv_text(header, rows, cfg, "power"), cfg, f"power_{cfg.example}.csv", stdout)
    return header, rows


# ait -------------------------------------------------------------------------------


def load_distributions(path: str) -> np.ndarray:
    """Read distribution rows from a CSV file (``#`` comments and a non-numeric header allowed)."""
    rows = []
    seen_header = False
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        try:
            rows.append((lineno, [float(c) for c in cells]))
        except ValueError:
            if rows or seen_header:
                raise ValidationError(f"{path}:{lineno}: non-numeric entry") from None
            seen_header = True
    if not rows:
        raise ValidationError(f"{path}: no distributions found")
    width = len(rows[0][1])
    for lineno, r in rows:
        if len(r) != width:
            raise ValidationError(f"{path}:{lineno}: expected {width} entries, got {len(r)}")
        if any(v < 0 for v in r) or abs(sum(r) - 1.0) > 1e-6:
            raise ValidationError(f"{path}:{lineno}: row is not a probability vector (sum={sum(r)!r})")
    out = np.array([r for _, r in rows])
    return out / out.sum(axis=1, keepdims=True)


def _ait_inputs(cfg: RunConfig) -> tuple[np.ndarray, np.ndarray, int]:
    """Return (distributions with null first, counts, embedding dimension)."""
    seed = RngSeed(cfg.seed, SUBMANIFOLD_STREAM)
    null = None
    if cfg.null is not None:
        try:
            null = as_simplex(np.asarray(cfg.null, dtype=float), atol=1e-6)
        except ValueError as exc:
            raise ValidationError(f"--null: {exc}") from None
    if cfg.dists:
        dists = load_distributions(cfg.dists)
        if null is not None:
            dists = np.vstack([null, dists])
        dim = cfg.dim or 1
        counts = cfg.counts
    else:
        try:
            family = submanifold_by_name(cfg.submanifold)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        if family is SPHERICAL:
            null = np.asarray(SIGMA_BAR) ** 2 if null is None else null
            counts = MOTIVATING_COUNTS if cfg.counts is None else cfg.counts
        else:
            null = hw_map(HW_TAU_BAR) if null is None else null
            counts = cfg.counts
        dims = family.dim
        if null.size != len(family.simplex(family.domain[0])):
            raise ValidationError(f"--null has {null.size} entries; {cfg.submanifold} needs {len(family.simplex(family.domain[0]))}")
        dists = sample_distributions(family, null, cfg.m, seed)
        dim = cfg.dim or dims
    if counts is None:
        raise ValidationError("--counts is required")
    try:
        counts = as_counts(np.asarray(counts))
    except ValueError as exc:
        raise ValidationError(f"--counts: {exc}") from None
    if counts.size != dists.shape[1]:
        raise ValidationError(f"--counts has {counts.size} categories, distributions have {dists.shape[1]}")
    if counts.sum() < 1:
        raise ValidationError("--counts must contain at least one trial")
    return dists, counts, dim


def cmd_ait(cfg: RunConfig, stdout=sys.stdout) -> dict:
    dists, counts, dim = _ait_inputs(cfg)
    try:
        sub = fit_submanifold(dists, knn=cfg.knn, epsilon=cfg.epsilon, r=dim, ell=cfg.ell, oos_mode=cfg.oos)
    except ValueError as exc:
        if isinstance(exc, (DisconnectedGraphError, DegenerateInputError)):
            raise
        raise ValidationError(str(exc)) from None
    result = mc_significance(sub, counts, cfg.replicates, RngSeed(cfg.seed), workers=cfg.workers)
    out = result.to_dict()
    out["counts"] = counts.tolist()
    out["n"] = int(counts.sum())
    out["m"] = len(dists) - 1
    out["stress"] = sub.config.stress
    out["config"] = asdict(cfg)
    out["version"] = __version__
    text = json.dumps(out, sort_keys=True, indent=2) + "\n"

    y = embed_distribution(sub, counts / counts.sum())
    header = ["index", "role"] + [f"z{c + 1}" for c in range(sub.r)]
    rows = []
    for i, z in enumerate(sub.config.points):
        rows.append((i, "null" if i == sub.null_index else "sample", *z))
    rows.append((len(dists), "observed", *y))
    emb = _csv_text(header, rows, cfg, "ait")
    if cfg.out:
        _emit(text, cfg, "ait_result.json", stdout)
        _emit(emb, cfg, "embedding.csv", stdout)
    else:
        stdout.write(text)
    return out


# motivating ------------------------------------------------------------------------


def motivating_summary() -> dict:
    null, o = np.array(MOTIVATING_NULL), np.array(MOTIVATING_COUNTS)
    g2 = likelihood_ratio_statistic(o, null)
    x2 = pearson_statistic(o, null)
    lrt = spherical_restricted_lrt(o, SIGMA_BAR)
    t1, t2 = spherical_restricted_mle(o)
    df = len(o) - 1
    return {
        "counts": o.tolist(),
        "null": null.tolist(),
        "G2": g2,
        "G2_p_value": chi2_survival(df, g2),
        "X2": x2,
        "X2_p_value": chi2_survival(df, x2),
        "df": df,
        "restricted_tau_hat": [t1, t2],
        "restricted_LRT": lrt,
        "restricted_LRT_closed_form": 36 * math.log(3) - 44 * math.log(2),
        "restricted_LRT_p_value": chi2_survival(2, lrt),
    }


def cmd_motivating(cfg: RunConfig, stdout=sys.stdout) -> dict:
    out = motivating_summary()
    out["version"] = __version__
    _emit(json.dumps(out, sort_keys=True, indent=2) + "\n", cfg, "motivating.json", stdout)
    return out


# argument parsing ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of settings; flags override it")
    common.add_argument("--seed", type=int, help="master seed (default 0)")
    common.add_argument("--out", help="output directory (default: stdout)")

    parser = argparse.ArgumentParser(prog="infotests", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    t1 = sub.add_parser("table1", parents=[common], help="Hardy-Weinberg information tests with n = 3")
    t1.add_argument("--exact-mhde", action="store_true", help="use the exact MHDE instead of the coarse Brent search")

    pw = sub.add_parser("power", parents=[common], help="exact power curves along the Hardy-Weinberg curve")
    pw.add_argument("example", nargs="?", choices=sorted(POWER_EXAMPLES), default=None)
    pw.add_argument("--grid-step", type=float)
    pw.add_argument("--alpha", type=float)

    ait = sub.add_parser("ait", parents=[common], help="approximate information test")
    ait.add_argument("--submanifold", help="built-in family to sample: spherical (default) or hardy-weinberg")
    ait.add_argument("--dists", help="CSV of distributions, one per row (null first unless --null is given)")
    ait.add_argument("--null", type=lambda s: _parse_list(s, float))
    ait.add_argument("--counts", type=lambda s: _parse_list(s, int))
    ait.add_argument("--m", type=int, help="number of sampled distributions")
    graph = ait.add_mutually_exclusive_group()
    graph.add_argument("--knn", type=int)
    graph.add_argument("--epsilon", type=float)
    ait.add_argument("--dim", type=int, help="embedding dimension r")
    ait.add_argument("--ell", type=int, help="landmarks used for out-of-sample embedding")
    ait.add_argument("--oos", choices=["cosines", "centroid"])
    ait.add_argument("--replicates", type=int, help="Monte Carlo replicates B")
    ait.add_argument("--workers", type=int)

    sub.add_parser("motivating", parents=[common], help="G^2, X^2 and restricted LRT for the 7-category example")
    return parser


def main(argv=None, stdout=sys.stdout, stderr=sys.stderr) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    commands = {"table1": cmd_table1, "power": cmd_power, "ait": cmd_ait, "motivating": cmd_motivating}
    try:
        try:
            cfg = RunConfig.from_sources(args)
        except TypeError as exc:
            raise ValidationError(f"bad configuration: {exc}") from None
        commands[args.command](cfg, stdout=stdout)
    except (DisconnectedGraphError, DegenerateInputError) as exc:
        stderr.write(f"infotests: numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except ValidationError as exc:
        stderr.write(f"infotests: {exc}\n")
        return EXIT_VALIDATION
    return 0


if __name__ == "__main__":
    sys.exit(main())
