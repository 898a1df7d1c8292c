"""Command-line front end.

Every command emits a table with fixed columns, as CSV (default) or as a
JSON list of row objects with the same field names. Floats are written with
``repr`` so they round-trip exactly.

Exit codes: 0 success, 1 input error, 2 a checked property failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import bounds, cutgeom, lpcert, maxcut, randmodel
from .cutgeom import CutVector
from .errors import ConsistencyError, InputError

COMMANDS = ("certify", "estimate", "bounds", "oracle", "maxcut", "fig-elliptope")

COLUMNS = {
    "certify": ["r", "n", "R", "w_full_rank", "z_full_rank", "y_full_rank", "verdict",
                "face_dimension", "general_position", "dim_feasible"],
    "estimate": ["p", "r", "n", "trials", "seed", "confidence", "certified", "point_estimate",
                 "ci_low", "ci_high", "bound_thm1", "bound_thm2", "bound_thm3"],
    "bounds": ["p", "r", "n", "alpha", "bound_thm1", "bound_thm2", "bound_thm3"],
    "oracle": ["p", "r", "alpha", "lambda_min_Mr", "lambda_min_Sigma", "lambda_min_SigmaCheck",
               "claim_bound", "claim_gap", "claim_holds", "restriction_matches",
               "closed_form_matches"],
    "maxcut": ["n", "m", "maxcut", "bm_value", "rank_k", "rounded_value", "lower_bound", "ratio",
               "sandwich_pass", "rounded_pass", "best_cut"],
    "fig-elliptope": ["kind", "x", "y", "z"],
}

DEFAULTS = {"p": "0.5", "r": "3", "n": "200"}


def _diag(msg: str, *args) -> None:
    print("elliptope-faces: " + (msg % args if args else msg), file=sys.stderr)


class CheckFailed(Exception):
    """A property the command verifies did not hold; carries the output rows."""

    def __init__(self, message: str, rows: list[dict]):
        super().__init__(message)
        self.rows = rows


@dataclass
class ExperimentConfig:
    command: str
    p: list[float] = field(default_factory=lambda: [0.5])
    r: list[int] = field(default_factory=lambda: [3])
    n: list[int] = field(default_factory=lambda: [200])
    trials: int = 1000
    seed: int = randmodel.DEFAULT_SEED
    confidence: float = 0.95
    output_path: str | None = None
    output_format: str = "csv"
    edges: str | None = None
    cuts: str | None = None
    samples: int = 100
    grid: int = 41
    workers: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError("unknown command %r" % self.command)
        if self.output_format not in ("csv", "json"):
            raise InputError("format must be csv or json")
        if self.trials < 1:
            raise InputError("--trials must be >= 1")
        if not 0.0 < self.confidence < 1.0:
            raise InputError("--confidence must lie in (0, 1)")
        if self.samples < 1 or self.grid < 2 or self.workers < 1:
            raise InputError("--samples, --grid and --workers must be positive (grid >= 2)")
        if any(not 0.0 <= p <= 1.0 for p in self.p):
            raise InputError("--p values must lie in [0, 1]")

    def single(self, name: str):
        vals = getattr(self, name)
        if len(vals) != 1:
            raise InputError("--%s takes a single value for %s" % (name, self.command))
        return vals[0]


# --------------------------------------------------------------------------
# output


def _cell(v: Any) -> Any:
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v) + 0.0  # folds -0.0 into 0.0
    return v


def _csv_text(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(rows: list[dict], columns: Sequence[str], fmt: str) -> str:
    rows = [{c: _cell(row.get(c)) for c in columns} for row in rows]
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_csv_text(row[c]) for c in columns])
    return buf.getvalue()


# --------------------------------------------------------------------------
# commands


def _read_text(path: str | None, flag: str) -> str:
    if not path:
        raise InputError("%s <file> is required" % flag)
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc)) from None


def parse_cuts(text: str) -> list[CutVector]:
    """One cut vector per line, as ``+1 -1 ...`` (spaces or commas) or ``+-+-``."""
    cuts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.replace(",", " ").split()
        if len(toks) == 1 and set(toks[0]) <= {"+", "-"}:
            vals = [1 if ch == "+" else -1 for ch in toks[0]]
        else:
            try:
                vals = [int(t) for t in toks]
            except ValueError:
                raise InputError("line %d: expected +1/-1 entries" % lineno) from None
        try:
            cuts.append(CutVector(vals))
        except InputError as exc:
            raise InputError("line %d: %s" % (lineno, exc)) from None
    return cuts


def _theorem_bounds(p: float, r: int, n: int) -> dict:
    out: dict[str, float | None] = {"bound_thm1": None, "bound_thm2": None, "bound_thm3": None}
    if r >= 2 and 0.0 < p < 1.0:
        if p == 0.5 and n >= 1:
            out["bound_thm1"] = bounds.bound_thm1(r, n)
        out["bound_thm2"] = bounds.bound_thm2(p, r, n)
        out["bound_thm3"] = bounds.bound_thm3(p, r, n)
    return out


def cmd_certify(cfg: ExperimentConfig) -> list[dict]:
    cuts = parse_cuts(_read_text(cfg.cuts, "--cuts"))
    cert = lpcert.certify_simplicial(cuts)
    r, n = cert.r, cert.n
    return [{
        "r": r, "n": n, "R": 1 + r * (r - 1) // 2,
        "w_full_rank": cert.w_full_rank, "z_full_rank": cert.z_full_rank,
        "y_full_rank": cert.y_full_rank, "verdict": cert.verdict.value,
        "face_dimension": cert.face_dimension,
        "general_position": lpcert.check_general_position(cuts) if r <= 30 else None,
        "dim_feasible": cutgeom.simplicial_dim_feasible(r - 1, n),
    }]


def cmd_estimate(cfg: ExperimentConfig) -> list[dict]:
    p, r, n = cfg.single("p"), cfg.single("r"), cfg.single("n")
    est = randmodel.estimate_face_probability(
        p, r, n, cfg.trials, seed=cfg.seed, confidence=cfg.confidence, workers=cfg.workers)
    row = {
        "p": p, "r": r, "n": n, "trials": est.trials, "seed": cfg.seed,
        "confidence": cfg.confidence, "certified": est.certified,
        "point_estimate": est.point_estimate, "ci_low": est.ci_low, "ci_high": est.ci_high,
    }
    row.update(_theorem_bounds(p, r, n))
    return [row]


def cmd_bounds(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    for p in sorted(cfg.p):
        if not 0.0 < p < 1.0:
            raise InputError("bounds need p strictly inside (0, 1)")
        for r in sorted(cfg.r):
            if r < 2:
                raise InputError("bounds need r >= 2")
            for n in sorted(cfg.n):
                if n < 0:
                    raise InputError("bounds need n >= 0")
                row = {"p": p, "r": r, "n": n, "alpha": (2 * p - 1) ** 2}
                row.update(_theorem_bounds(p, r, n))
                rows.append(row)
    return rows


def cmd_oracle(cfg: ExperimentConfig) -> list[dict]:
    p, r = cfg.single("p"), cfg.single("r")
    rep = bounds.exact_second_moment_y(bounds.as_fraction(p), r)
    rows = [{
        "p": p, "r": r, "alpha": rep.alpha, "lambda_min_Mr": rep.lambda_min_Mr,
        "lambda_min_Sigma": rep.lambda_min_Sigma,
        "lambda_min_SigmaCheck": rep.lambda_min_SigmaCheck,
        "claim_bound": rep.claim_bound, "claim_gap": rep.lambda_min_Sigma - rep.claim_bound,
        "claim_holds": rep.claim_holds, "restriction_matches": rep.restriction_matches,
        "closed_form_matches": rep.closed_form_matches,
    }]
    if not (rep.claim_holds and rep.restriction_matches and rep.closed_form_matches):
        raise CheckFailed("moment oracle check failed for p=%r, r=%d" % (p, r), rows)
    return rows


def cmd_maxcut(cfg: ExperimentConfig) -> list[dict]:
    G = maxcut.parse_edge_list(_read_text(cfg.edges, "--edges"))
    best, _ = maxcut.brute_force_maxcut(G)
    k = maxcut.default_rank(G.n)
    factor, value = maxcut.bm_elliptope_solve(
        maxcut.laplacian(G), k=k, stream=randmodel.make_stream(cfg.seed, 0))
    rounded, cut = maxcut.best_cut_value(G, factor, cfg.samples, randmodel.make_stream(cfg.seed, 1))
    rep = maxcut.check_approx_sandwich(G, value, best, rounded)
    rows = [{
        "n": G.n, "m": G.m, "maxcut": best, "bm_value": value, "rank_k": k,
        "rounded_value": rounded, "lower_bound": rep.lower, "ratio": rep.ratio,
        "sandwich_pass": rep.passed, "rounded_pass": rep.rounded_passed,
        "best_cut": "".join("+" if x > 0 else "-" for x in cut.entries),
    }]
    if not (rep.passed and rep.rounded_passed):
        raise CheckFailed(rep.witness, rows)
    return rows


def elliptope_boundary_points(grid: int) -> list[tuple[float, float, float]]:
    """Points ``(a, b, c)`` with ``det [[1,a,b],[a,1,c],[b,c,1]] = 0`` over an ``a, b`` grid.

    ``c = a b -/+ sqrt((1 - a^2)(1 - b^2))``; a double root is emitted once.
    """
    ticks = np.linspace(-1.0, 1.0, grid)
    pts = []
    for a in ticks:
        for b in ticks:
            a_, b_ = float(a), float(b)
            disc = max(0.0, (1.0 - a_ * a_) * (1.0 - b_ * b_))
            s = math.sqrt(disc)
            pts.append((a_, b_, a_ * b_ - s))
            if s > 0:
                pts.append((a_, b_, a_ * b_ + s))
    return pts


def cmd_fig_elliptope(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    for c in cutgeom.all_cut_vectors(3, up_to_sign=True):
        x, y, z = cutgeom.lower_triangle_embed(cutgeom.cut_matrix(c))
        rows.append({"kind": "vertex", "x": float(x), "y": float(y), "z": float(z)})
    for x, y, z in elliptope_boundary_points(cfg.grid):
        rows.append({"kind": "boundary", "x": x, "y": y, "z": z})
    return rows


HANDLERS = {
    "certify": cmd_certify,
    "estimate": cmd_estimate,
    "bounds": cmd_bounds,
    "oracle": cmd_oracle,
    "maxcut": cmd_maxcut,
    "fig-elliptope": cmd_fig_elliptope,
}


def _emit(text: str, cfg: ExperimentConfig) -> None:
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)


def run(cfg: ExperimentConfig) -> int:
    """Execute one command; returns the process exit code."""
    columns = COLUMNS[cfg.command]
    try:
        rows = HANDLERS[cfg.command](cfg)
    except CheckFailed as exc:
        _emit(render(exc.rows, columns, cfg.output_format), cfg)
        _diag("check failed: %s", exc)
        return 2
    except ConsistencyError as exc:
        _diag("consistency check failed: %s", exc)
        return 2
    except InputError as exc:
        _diag("input error: %s", exc)
        return 1
    try:
        _emit(render(rows, columns, cfg.output_format), cfg)
    except OSError as exc:
        _diag("cannot write output: %s", exc)
        return 1
    return 0


# --------------------------------------------------------------------------
# argument parsing


def _list_of(conv):
    def parse(text: str):
        try:
            return [conv(t) for t in text.split(",") if t.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError("expected comma-separated values, got %r" % text)
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=_list_of(float), default=None,
                        help="balance parameter(s); comma list for 'bounds'")
    common.add_argument("--r", type=_list_of(int), default=None, help="number of cut vectors")
    common.add_argument("--n", type=_list_of(int), default=None, help="ambient dimension")
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--seed", type=int, default=randmodel.DEFAULT_SEED)
    common.add_argument("--confidence", type=float, default=0.95)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--edges", default=None, help="edge-list file for 'maxcut'")
    common.add_argument("--cuts", default=None, help="cut-vector file for 'certify'")
    common.add_argument("--samples", type=int, default=100, help="rounding samples for 'maxcut'")
    common.add_argument("--grid", type=int, default=41, help="grid size for 'fig-elliptope'")
    common.add_argument("--workers", type=int, default=1, help="processes for 'estimate'")

    parser = argparse.ArgumentParser(
        prog="elliptope-faces",
        description="Simplicial faces of the elliptope from random cut vectors.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "certify": "certify the face generated by cut vectors read from --cuts",
        "estimate": "Monte Carlo certification rate next to the theorem bounds",
        "bounds": "tabulate the theorem bounds over a (p, r, n) grid",
        "oracle": "exact second-moment matrices and their minimum eigenvalues",
        "maxcut": "brute-force MaxCut, relaxation heuristic, rounding, 2/pi check",
        "fig-elliptope": "vertex images and boundary cloud of the 3x3 elliptope",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        command=ns.command,
        p=ns.p if ns.p is not None else _list_of(float)(DEFAULTS["p"]),
        r=ns.r if ns.r is not None else _list_of(int)(DEFAULTS["r"]),
        n=ns.n if ns.n is not None else _list_of(int)(DEFAULTS["n"]),
        trials=ns.trials,
        seed=ns.seed,
        confidence=ns.confidence,
        output_path=ns.out,
        output_format=ns.format,
        edges=ns.edges,
        cuts=ns.cuts,
        samples=ns.samples,
        grid=ns.grid,
        workers=ns.workers,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        cfg = config_from_args(ns)
    except InputError as exc:
        _diag("input error: %s", exc)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
