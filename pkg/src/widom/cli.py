"""Command-line front end.

Every subcommand reads a set (and where relevant a weight, degree range or
polynomial), computes a table of rows and writes it as CSV or JSON.  Floats
are printed with 17 significant digits so repeated runs diff exactly.

Examples::

    widom cap --set '{"type":"intervals","data":[[-1,0],[0.5,1]]}'
    widom widom --set '[{"type":"intervals","data":[[-1,1]]},{"type":"intervals","data":[[-1,1]]}]' \\
        --max-total-degree 3
    widom profile --set realball2 --grid 1001
    widom verify --seed 42 --suite mahler
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import descriptors, extremal1d, mahler, modelsets, productnd, sets1d, verify
from .descriptors import DescriptorError
from .errors import NonPolarError, ResolutionError, ScaleError, SzegoError, UnboundedWeightError
from .productnd import ProductSet

COMMANDS = ("cap", "eqmeasure", "chebyshev", "orthopoly", "widom", "tau", "profile", "mahler", "verify")


@dataclass
class RunConfig:
    """Everything a run depends on; serializes to JSON and back unchanged."""

    command: str
    set: Any = None
    weight: Any = None
    degree: int | None = None
    max_total_degree: int | None = None
    alpha: list | None = None
    theta: float | None = None
    poly: Any = None
    method: str | None = None
    grid: int | None = None
    nodes: int = sets1d.DEFAULT_NODES
    tol: float | None = None
    seed: int = verify.DEFAULT_SEED
    out: str | None = None
    format: str = "csv"
    suites: list = field(default_factory=list)
    corrupt_capacity: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DescriptorError(f"command: unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise DescriptorError(f"format: expected csv or json, got {self.format!r}")
        for name in ("tol", "corrupt_capacity", "scale"):
            v = getattr(self, name)
            if name == "tol" and v is None:
                continue
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise DescriptorError(f"{name}: must be a positive number, got {v!r}")
        if not isinstance(self.seed, int):
            raise DescriptorError(f"seed: must be an integer, got {self.seed!r}")
        for name in ("degree", "max_total_degree", "grid", "nodes"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or v < 0):
                raise DescriptorError(f"{name}: must be a non-negative integer, got {v!r}")

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise DescriptorError(f"config: unknown field(s) {', '.join(sorted(unknown))}")
        return cls(**data)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        base: dict = {}
        if getattr(args, "config", None):
            with open(args.config, encoding="utf-8") as fh:
                base = dataclasses.asdict(cls.from_json(fh.read()))
        base["command"] = args.command
        for f in dataclasses.fields(cls):
            if f.name == "command":
                continue
            v = getattr(args, f.name, None)
            if v is not None:
                base[f.name] = v
        for key in ("set", "weight", "poly"):
            if isinstance(base.get(key), str):
                base[key] = descriptors.load_json(base[key])
        return cls(**base)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def fmt(x) -> str:
    return productnd.format_float(float(x))


def _json_value(obj) -> str:
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return fmt(x) if math.isfinite(x) else json.dumps(str(x))
    if isinstance(obj, complex):
        return _json_value({"re": obj.real, "im": obj.imag})
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(v) for v in obj) + "]"
    return json.dumps(str(obj))


def to_json_text(obj) -> str:
    """JSON with floats written to 17 significant digits."""
    return _json_value(obj) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return f"{fmt(v.real)}{'-' if v.imag < 0 else '+'}{fmt(abs(v.imag))}j"
    if isinstance(v, (list, tuple, np.ndarray)):
        return " ".join(_cell(x) for x in v)
    return str(v)


def to_csv_text(rows: list[dict]) -> str:
    if not rows:
        return ""
    fields = list(rows[0])
    for r in rows[1:]:
        fields += [k for k in r if k not in fields]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: _cell(r.get(k)) for k in fields})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _require(cfg: RunConfig, name: str):
    v = getattr(cfg, name)
    if v is None:
        raise DescriptorError(f"{name}: required for the {cfg.command} command")
    return v


def _set1d(cfg: RunConfig):
    return descriptors.parse_set(_require(cfg, "set"))


def _weight1d(cfg: RunConfig):
    return descriptors.parse_weight(cfg.weight)


def cmd_cap(cfg: RunConfig) -> list[dict]:
    K = descriptors.parse_product_set(_require(cfg, "set"))
    if isinstance(K, ProductSet):
        rows = []
        for j, k in enumerate(K.factors):
            c = sets1d.capacity(k)
            rows.append({"factor": j, "capacity": c, "log_capacity": math.log(c)})
        if K.n > 1:
            rows.append({"factor": "tau_minus", "capacity": productnd.tau_minus_product(K),
                         "log_capacity": math.log(productnd.tau_minus_product(K))})
        return rows
    c, C = modelsets.capacities_cC(K, seed=cfg.seed)
    return [{"factor": modelsets.model_name(K), "c": c, "C": C}]


def cmd_eqmeasure(cfg: RunConfig) -> list[dict]:
    K = _set1d(cfg)
    mu = sets1d.equilibrium_measure(K, cfg.nodes)
    U = np.atleast_1d(sets1d.log_potential(mu, mu.nodes))
    rows = []
    for x, w, u in zip(mu.nodes, mu.weights, U):
        x = complex(x)
        rows.append({"x_re": x.real, "x_im": x.imag, "weight": float(w), "potential": float(u)})
    return rows


def _degrees(cfg: RunConfig) -> range:
    n = cfg.degree if cfg.degree is not None else cfg.max_total_degree
    if n is None:
        raise DescriptorError(f"degree: required for the {cfg.command} command")
    return range(0, n + 1) if cfg.max_total_degree is not None else range(n, n + 1)


def cmd_chebyshev(cfg: RunConfig) -> list[dict]:
    K, w = _set1d(cfg), _weight1d(cfg)
    cap = sets1d.capacity(K)
    rows = []
    for n in _degrees(cfg):
        sol = extremal1d.weighted_chebyshev(K, w, n)
        coef = np.asarray(sol.poly.coef)
        coef = [complex(c) for c in coef] if np.iscomplexobj(coef) else [float(c) for c in coef]
        rows.append({"degree": n, "norm": sol.norm, "widom_sup": sol.norm / cap**n,
                     "coefficients": coef, "extreme_points": [complex(x) if not K.is_real else float(x)
                                                              for x in sol.extreme_points]})
    return rows


def cmd_orthopoly(cfg: RunConfig) -> list[dict]:
    K, w = _set1d(cfg), _weight1d(cfg)
    N = max(_degrees(cfg))
    basis = extremal1d.monic_orthogonal(K, w, N, cfg.nodes)
    cap = sets1d.capacity(K)
    rows = []
    for n in range(N + 1):
        b = complex(basis.b[n]) if n < len(basis.b) else None
        rows.append({"degree": n,
                     "b": None if b is None else (b.real if K.is_real else b),
                     "a2": float(basis.a2[n]) if n < len(basis.a2) else None,
                     "monic_norm": float(basis.monic_norms[n]),
                     "widom_l2": float(basis.monic_norms[n]) / cap**n})
    if cfg.format == "csv":
        for r in rows:
            if isinstance(r["b"], complex):
                r["b_im"] = r["b"].imag
                r["b"] = r["b"].real
    return rows


def cmd_widom(cfg: RunConfig) -> list[dict]:
    K = descriptors.parse_product_set(_require(cfg, "set"))
    D = cfg.max_total_degree if cfg.max_total_degree is not None else cfg.degree
    if D is None:
        raise DescriptorError("max_total_degree: required for the widom command")
    if isinstance(K, modelsets.EuclideanBall2):
        tau = modelsets.tau_minus(K)
        return [{"alpha": " ".join(map(str, a)), "total_degree": sum(a), "W2sq": None,
                 "Winf": modelsets.chebyshev_norm(K, a) / tau ** sum(a), "tau_minus": tau}
                for a in productnd.multi_indices(2, D)]
    K = descriptors.as_product_set(K)
    w = descriptors.parse_product_weight(cfg.weight, K.n)
    reports = [productnd.widom_report(K, w, a, cfg.nodes) for a in productnd.multi_indices(K.n, D)]
    return [r.to_row() for r in reports]


def cmd_tau(cfg: RunConfig) -> list[dict]:
    K = descriptors.parse_product_set(_require(cfg, "set"))
    if isinstance(K, ProductSet):
        return [{"tau_minus": productnd.tau_minus_product(K)}]
    row: dict = {"set": modelsets.model_name(K)}
    if not isinstance(K, modelsets.Simplex):
        row["tau_minus"] = modelsets.tau_minus(K)
        if cfg.theta is not None:
            row["theta1"] = cfg.theta
            row["tau"] = modelsets.directional_tau(K, cfg.theta)
    c, C = modelsets.capacities_cC(K, seed=cfg.seed)
    row.update({"c": c, "C": C})
    return [row]


def cmd_profile(cfg: RunConfig) -> list[dict]:
    K = descriptors.parse_product_set(_require(cfg, "set"))
    if isinstance(K, ProductSet):
        raise DescriptorError("set: profiles need a model set (ball2, realball2 or polydisk:2)")
    prof = modelsets.profile_minimum(K, cfg.grid if cfg.grid is not None else 1001,
                                     tol=cfg.tol if cfg.tol is not None else 1e-10)
    c, C = modelsets.capacities_cC(K, seed=cfg.seed)
    k = int(np.argmin(prof.values))
    rows = [{"theta1": float(t), "theta2": 1.0 - float(t), "tau": float(v), "marker": "grid_min" if i == k else ""}
            for i, (t, v) in enumerate(zip(prof.theta_grid, prof.values))]
    rows.append({"theta1": prof.theta_min, "theta2": 1.0 - prof.theta_min, "tau": prof.tau_min, "marker": "tau_minus"})
    rows.append({"theta1": None, "theta2": None, "tau": c, "marker": "c"})
    rows.append({"theta1": None, "theta2": None, "tau": C, "marker": "C"})
    return rows


def cmd_mahler(cfg: RunConfig) -> list[dict]:
    P = descriptors.parse_poly(_require(cfg, "poly"))
    K = descriptors.as_product_set(descriptors.parse_product_set(_require(cfg, "set")))
    if P.nvars != K.n:
        raise DescriptorError(f"poly: has {P.nvars} variables but the set has {K.n} factors")
    if K.n == 1:
        res = mahler.mahler_1d(P.dense(), K.factors[0], cfg.method or "roots_potential")
    else:
        res = mahler.mahler_nd(P, K, cfg.method or "recursive")
    tol = cfg.tol if cfg.tol is not None else 1e-9
    rows = []
    for k in np.ndindex(*(d + 1 for d in P.degrees)):
        if K.n == 1:
            bound, holds = mahler.coeff_bound_1d(P.dense(), K.factors[0], k[0], tol, M=res.value)
        else:
            bound, holds = mahler.coeff_bound_nd(P, K, k, tol, M=res.value)
        rows.append({"mahler": res.value, "method": res.method, "k": " ".join(map(str, k)),
                     "abs_coefficient": abs(P.terms.get(tuple(k), 0.0)), "bound": bound, "holds": holds})
    return rows


def cmd_verify(cfg: RunConfig) -> dict:
    opts = verify.VerifyOptions(cfg.seed, cfg.corrupt_capacity, cfg.scale)
    return verify.run_verify(cfg.suites or None, opts)


HANDLERS = {"cap": cmd_cap, "eqmeasure": cmd_eqmeasure, "chebyshev": cmd_chebyshev, "orthopoly": cmd_orthopoly,
            "widom": cmd_widom, "tau": cmd_tau, "profile": cmd_profile, "mahler": cmd_mahler,
            "verify": cmd_verify}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="widom", description=__doc__.split("\n\n")[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, weight=True, degree=True):
        p.add_argument("--config", help="JSON run configuration; explicit flags override it")
        p.add_argument("--set", help="set descriptor (JSON, @file, or a model-set name)")
        if weight:
            p.add_argument("--weight", help="weight descriptor (JSON or @file)")
        if degree:
            p.add_argument("--degree", type=int)
            p.add_argument("--max-total-degree", dest="max_total_degree", type=int)
        p.add_argument("--grid", type=int)
        p.add_argument("--nodes", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="write to this file instead of standard output")
        p.add_argument("--format", choices=("csv", "json"))

    common(sub.add_parser("cap", help="logarithmic capacity"), weight=False, degree=False)
    common(sub.add_parser("eqmeasure", help="equilibrium measure nodes and weights"), weight=False, degree=False)
    common(sub.add_parser("chebyshev", help="weighted Chebyshev polynomials"))
    common(sub.add_parser("orthopoly", help="monic orthogonal polynomials"))
    common(sub.add_parser("widom", help="Widom factors and lower bounds over a degree range"))
    p = sub.add_parser("tau", help="directional Chebyshev constants and c, C")
    common(p, weight=False, degree=False)
    p.add_argument("--theta", type=float, help="first coordinate of the direction")
    common(sub.add_parser("profile", help="directional profile of a model set"), weight=False, degree=False)
    p = sub.add_parser("mahler", help="Mahler measure and coefficient bounds")
    common(p, weight=False, degree=False)
    p.add_argument("--poly", help='polynomial {"terms":[{"alpha":[..],"re":..,"im":..}]}')
    p.add_argument("--method", choices=("roots_potential", "quadrature", "recursive"))
    p = sub.add_parser("verify", help="run the invariant suites")
    common(p, weight=False, degree=False)
    p.add_argument("--suite", dest="suites", action="append", choices=tuple(verify.SUITES),
                   help="run only this suite (repeatable)")
    p.add_argument("--corrupt-capacity", dest="corrupt_capacity", type=float,
                   help="test hook: multiply capacities used by the checks")
    p.add_argument("--scale", type=float, help="multiply the instance counts")
    return parser


def execute(cfg: RunConfig) -> tuple[str, list[str]]:
    """Run a configuration; returns the output text and the names of failed invariants."""
    result = HANDLERS[cfg.command](cfg)
    if cfg.command == "verify":
        failed = result["failed_invariants"]
        if cfg.format == "csv":
            rows = [{"suite": s, "invariant": k, **{f: v for f, v in d.items() if f != "witness"}}
                    for s, invs in result["suites"].items() for k, d in invs.items()]
            return to_csv_text(rows), failed
        return to_json_text(result), failed
    text = to_json_text(result) if cfg.format == "json" else to_csv_text(result)
    return text, []


def render(argv) -> str:
    """Run ``argv`` and return the text that would be written."""
    return execute(RunConfig.from_args(build_parser().parse_args(argv)))[0]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        text, failed = execute(cfg)
    except (DescriptorError, json.JSONDecodeError, OSError) as exc:
        parser.error(str(exc))
    except (NonPolarError, UnboundedWeightError, SzegoError, ResolutionError, ScaleError, ValueError) as exc:
        print(f"widom: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if failed:
        print(f"widom: verification failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
