"""Command-line interface: ``dehnfill <command> [options]``.

Exit codes: 0 success, 1 self-test failure, 2 invalid input, 3 packing
validation failure, 4 numerical failure.
"""

import argparse
import csv
from dataclasses import dataclass, fields
import io
import json
import math
import re
import sys

import numpy as np

from . import __version__
from .errors import DomainError, NumericError
from .filling import (HEXAGON_EDGES, HEXAGON_VERTICES, LOCUS_T, basis_complement,
                      boundary_trace, cone_data, edge_distances, filling_many, hexagon_contains, limit_cone_angle)
from .levelsets import MAX_LEVEL, f_value, level_point
from .moduli import THETA_GRID, classify_many, special_points_many
from .packing import build_affine_packing, build_euclidean_packing, validate_packing
from .svg import Figure

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PACKING, EXIT_NUMERIC = 0, 1, 2, 3, 4

DEFAULT_FORMAT = {"moduli": "json", "loci": "csv", "dehnspace": "csv", "degenerate": "csv",
                  "packing": "svg"}
TRACE_S = tuple(1.0 - 10.0 ** -k for k in range(2, 9))


class InputError(Exception):
    """Bad command-line or config input; maps to exit code 2."""


# -- parsing -----------------------------------------------------------------

_COMPLEX = re.compile(r"^[0-9eE.+\-]*[ij]?$")


def parse_complex(text):
    """Parse ``a+bi`` style literals (``i`` or ``j``); ``0``, ``2.5i`` and ``-1-2i`` also work."""
    text = str(text).strip().replace(" ", "")
    if not text or not _COMPLEX.match(text):
        raise InputError(f"cannot parse complex literal {text!r}")
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        raise InputError(f"cannot parse complex literal {text!r}") from None


def parse_grid(text):
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", str(text))
    if not m:
        raise InputError(f"grid must look like 200x200, got {text!r}")
    nx, ny = int(m.group(1)), int(m.group(2))
    if nx < 1 or ny < 1:
        raise InputError("grid dimensions must be positive")
    return nx, ny


def parse_schedule(text):
    """``0.1,0.5,0.9`` or ``start:stop:count`` (inclusive, evenly spaced)."""
    text = str(text).strip()
    try:
        if ":" in text:
            a, b, n = text.split(":")
            return [float(x) for x in np.linspace(float(a), float(b), int(n))]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"cannot parse schedule {text!r}") from None


def parse_floats(text):
    return [float(x) if x.strip().lower() not in ("inf", "infinity") else math.inf
            for x in str(text).split(",") if x.strip()]


def read_config(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read config: {exc}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{n}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


@dataclass
class CommandConfig:
    c: complex = None
    grid: tuple = None
    extent: float = 6.0
    s: list = None
    t: list = None
    p: int = None
    q: int = None
    window: int = 3
    out: str = None
    format: str = None
    tol: float = 1e-9
    xtol: float = 1e-14
    theta_grid: int = THETA_GRID
    samples: int = 2000
    seed: int = 0

    def validate(self):
        if not (self.tol > 0 and self.xtol > 0):
            raise InputError("tolerances must be positive")
        if self.theta_grid < 64:
            raise InputError("theta grid must be at least 64")
        if self.window < 0:
            raise InputError("window must be nonnegative")
        if self.samples < 1:
            raise InputError("sample count must be positive")
        if self.format not in (None, "svg", "csv", "json"):
            raise InputError(f"unknown format {self.format!r}")
        return self


_CONVERT = {"c": parse_complex, "grid": parse_grid, "extent": float, "s": parse_schedule,
            "t": parse_floats, "p": int, "q": int, "window": int, "out": str, "format": str,
            "tol": float, "xtol": float, "theta_grid": int, "samples": int, "seed": int}


def build_config(args):
    """Defaults, then the config file, then explicit flags."""
    values = {}
    if getattr(args, "config", None):
        for key, raw in read_config(args.config).items():
            if key not in _CONVERT:
                raise InputError(f"unknown config key {key!r}")
            values[key] = raw
    for f in fields(CommandConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    conv = {}
    for key, raw in values.items():
        try:
            conv[key] = _CONVERT[key](raw) if isinstance(raw, str) else raw
        except ValueError as exc:
            raise InputError(f"bad value for {key}: {exc}") from None
    return CommandConfig(**conv).validate()


# -- serialization -----------------------------------------------------------

def fmt_num(x):
    """17 significant digits; infinities as ``inf``; ``None`` as empty."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x + 0.0, ".17g")


def _json(value):
    if value is None:
        return "null"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_json(v)}" for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in value) + "]"
    if isinstance(value, str):
        return json.dumps(value)
    if _is_complex(value):
        return _json({"re": value.real, "im": value.imag})
    text = fmt_num(value)
    return json.dumps(text) if text in ("inf", "-inf", "nan") else text


def render_json(records):
    return "[\n" + ",\n".join("  " + _json(r) for r in records) + "\n]\n"


def _is_complex(v):
    return isinstance(v, (complex, np.complexfloating))


def _flat(record, complex_keys):
    row = {}
    for k, v in record.items():
        if k in complex_keys:
            row[f"{k}_re"], row[f"{k}_im"] = ("", "") if v is None else (fmt_num(v.real), fmt_num(v.imag))
        elif isinstance(v, str):
            row[k] = v
        else:
            row[k] = fmt_num(v)
    return row


def render_csv(records):
    if not records:
        return ""
    complex_keys = {k for r in records for k, v in r.items() if _is_complex(v)}
    rows = [_flat(r, complex_keys) for r in records]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def emit(cfg, command, records=None, figure=None):
    fmt = cfg.format or DEFAULT_FORMAT[command]
    if fmt == "svg":
        if figure is None:
            raise InputError(f"{command} has no svg output")
        text = figure.render()
    elif fmt == "csv":
        text = render_csv(records)
    else:
        text = render_json(records)
    if cfg.out:
        path = cfg.out if cfg.out.endswith("." + fmt) else f"{cfg.out}.{fmt}"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def note(msg):
    print(msg, file=sys.stderr)


# -- commands ----------------------------------------------------------------

def _grid_points(nx, ny, extent):
    # cell centers of [-extent, extent] x (-pi, pi)
    x = -extent + (2.0 * extent) * (np.arange(nx) + 0.5) / nx
    y = -math.pi + 2.0 * math.pi * (np.arange(ny) + 0.5) / ny
    return (x[None, :] + 1j * y[:, None]).ravel()


def cmd_moduli(cfg):
    if cfg.c is not None:
        c = np.array([cfg.c])
    elif cfg.grid is not None:
        c = _grid_points(*cfg.grid, cfg.extent)
    else:
        raise InputError("moduli needs --c or --grid")
    if np.any(np.abs(c.imag) >= math.pi):
        raise DomainError("c outside the strip |Im c| < pi")
    records = [None] * c.size
    zero = np.flatnonzero(c == 0)
    for i in zero:
        records[i] = {"c": complex(c[i]), "omega": None, "s": 0.0, "region": "ORIGIN",
                      "mu": math.inf, "lambda": math.inf, "t": None, "residual": 0.0}
    nz = np.flatnonzero(c != 0)
    worst = 0.0
    if nz.size:
        sol, mu, lam, t = filling_many(c[nz], grid=cfg.theta_grid, xtol=cfg.xtol)
        regions = classify_many(c[nz])
        res = np.maximum(np.abs(f_value(sol.c1) - sol.s), np.abs(f_value(sol.c2) - sol.s))
        worst = float(res.max())
        for k, i in enumerate(nz):
            records[i] = {"c": complex(c[i]), "omega": complex(sol.omega[k]), "s": sol.s[k],
                          "region": regions[k].value, "mu": mu[k], "lambda": lam[k], "t": t[k],
                          "residual": res[k]}
    emit(cfg, "moduli", records)
    if worst >= cfg.tol:
        note(f"residual {worst:.3e} exceeds tolerance {cfg.tol:.3e}")
        return EXIT_NUMERIC
    return EXIT_OK


LOCUS_LABELS = ("t=-1", "t=0", "t=1/2", "t=1", "t=2", "t=∞")


def _check_levels(levels):
    if not levels:
        raise InputError("empty s schedule")
    for s in levels:
        if not 0.0 < s < MAX_LEVEL:
            raise DomainError(f"level {s!r} outside (0, 1)")


def cmd_loci(cfg):
    levels = cfg.s or [round(0.02 * k, 10) for k in range(1, 50)]
    _check_levels(levels)
    pts = special_points_many(np.array(levels))
    records = []
    for s, row in zip(levels, pts):
        rec = {"s": s}
        for j, p in enumerate(row, 1):
            rec[f"p{j}"] = complex(p)
        records.append(rec)

    fig = Figure("Loci l1..l12 and regions C1..C12")
    order = np.argsort(levels)
    top = max(levels)
    for s in sorted(set(levels))[:: max(1, len(set(levels)) // 6)] + [top]:
        theta = np.linspace(0.0, 2.0 * math.pi, 361)[:-1]
        fig.polygon(level_point(s, theta), fill="none", stroke="#bbbbbb")
    for j in range(12):
        # each locus starts at the origin, the s -> 0 limit of every p_j
        fig.polyline(np.concatenate([[0j], pts[order, j]]), stroke="#1f4e9c", id=f"l{j + 1}")
        end = pts[order[-1], j]
        fig.text(end * 1.06, f"l{j + 1}", fill="#1f4e9c")
        fig.text(end * 1.06 - 0.35j, LOCUS_LABELS[j % 6], fill="#8a2be2")
    mid = special_points_many(np.array([0.5 * top]))[0]
    ang = np.unwrap(np.angle(np.append(mid, mid[0])))
    ang[0] = 0.0
    for k in range(12):
        a = 0.5 * (ang[k] + ang[k + 1]) if k < 11 else 0.5 * (ang[11] + 2.0 * math.pi)
        r = abs(level_point(0.5 * top, a))
        fig.text(r * np.exp(1j * a), f"C{k + 1}", fill="#c0392b")
    fig.metadata = {"levels": [fmt_num(s) for s in levels],
                    "locus_t": [fmt_num(t) for t in LOCUS_T] * 2}
    emit(cfg, "loci", records, fig)
    return EXIT_OK


def cmd_dehnspace(cfg):
    rng = np.random.default_rng(cfg.seed)
    n = cfg.samples
    s = rng.uniform(1e-6, 0.999, n)
    theta = rng.uniform(0.0, 2.0 * math.pi, n)
    c = level_point(s, theta)
    sol, mu, lam, t = filling_many(c, grid=cfg.theta_grid, xtol=cfg.xtol)
    records = []
    inside = 0
    for k in range(n):
        hit = hexagon_contains(mu[k], lam[k], tol=cfg.tol)
        inside += hit
        records.append({"kind": "sample", "s": s[k], "c": complex(c[k]), "mu": mu[k],
                        "lambda": lam[k], "t": t[k], "inside": hit})

    levels = cfg.s or list(TRACE_S)
    _check_levels(levels)
    ts = cfg.t or [0.75, 1.5, -0.5]
    traced = []
    for tt in ts:
        for z, fd in boundary_trace(tt, levels):
            for sign in (1, -1):
                traced.append((sign * fd.mu, sign * fd.lam))
                records.append({"kind": f"trace{'+' if sign > 0 else '-'}", "s": f_value(z),
                                "c": z, "mu": sign * fd.mu, "lambda": sign * fd.lam, "t": fd.t,
                                "inside": hexagon_contains(fd.mu, fd.lam, tol=cfg.tol)})
    tr = np.array(traced)
    approach = edge_distances(tr[:, 0], tr[:, 1]).min(axis=0)
    summary = {label: fmt_num(d) for (label, _, _), d in zip(HEXAGON_EDGES, approach)}
    note(f"samples inside hexagon: {inside}/{n}, outside: {n - inside}")
    for label, d in summary.items():
        note(f"edge {label}: min distance {d}")

    fig = Figure("Dehn filling coefficients and the hexagon")
    view = 8.0
    fig.polygon([complex(*v) for v in HEXAGON_VERTICES], fill="#f3e6c8", stroke="black")
    fig.line(-view, view, stroke="#888888")
    fig.line(-view * 1j, view * 1j, stroke="#888888")
    fig.text(view + 0.2, "μ")
    fig.text(view * 1j + 0.2j, "λ")
    for m, l in zip(mu, lam):
        for sign in (1, -1):
            z = complex(sign * m, sign * l)
            if abs(z.real) <= view and abs(z.imag) <= view:
                fig.circle(z, 0.02, fill="#1f4e9c", stroke="none")
    for m, l in traced:
        fig.circle(complex(m, l), 0.04, fill="#c0392b", stroke="none")
    fig.metadata = {"hexagon_vertices": [list(v) for v in HEXAGON_VERTICES],
                    "hexagon_edges": [{"label": e[0], "from": list(e[1]), "to": list(e[2])}
                                      for e in HEXAGON_EDGES],
                    "samples": n, "inside": int(inside), "outside": int(n - inside),
                    "edge_approach": summary}
    emit(cfg, "dehnspace", records, fig)
    return EXIT_OK


def cmd_degenerate(cfg):
    if cfg.p is None or cfg.q is None:
        raise InputError("degenerate needs --p and --q")
    p, q = cfg.p, cfg.q
    basis_complement(p, q)  # raises on non-coprime input
    levels = cfg.s or list(TRACE_S)
    _check_levels(levels)
    t = math.inf if p + q == 0 else p / (p + q)
    limit = limit_cone_angle(p, q)
    records = []
    prev = None
    for z, _ in boundary_trace(t, levels):
        cd = cone_data(z, p, q)
        err = abs(cd.angle - limit)
        records.append({"s": f_value(z), "c": z, "t": t, "angle": cd.angle, "length": cd.length,
                        "limit_angle": limit,
                        "angle_to_limit_decreasing": None if prev is None else err < prev[0],
                        "length_increasing": None if prev is None else cd.length > prev[1]})
        prev = (err, cd.length)
    emit(cfg, "degenerate", records)
    return EXIT_OK


def cmd_packing(cfg, kappa_scale=1.0):
    c = cfg.c if cfg.c is not None else 0j
    spec = build_euclidean_packing(cfg.window) if c == 0 else build_affine_packing(
        c, cfg.window, kappa_scale=kappa_scale)
    report = validate_packing(spec)
    ok = report.ok(cfg.tol)
    records = [{"kind": circ.kind, "label": "%d,%d" % circ.label[:2] if circ.kind == "PACKING"
                else ";".join("%d,%d" % x for x in circ.label),
                "center": circ.center, "radius": circ.radius}
               for circ in spec.circles + spec.duals]
    fig = Figure("Developed circle packing")
    for circ in spec.circles:
        fig.circle(circ.center, circ.radius, fill="none", stroke="#1f4e9c")
    for circ in spec.duals:
        fig.circle(circ.center, circ.radius, fill="none", stroke="#c0392b", stroke_dasharray="0.02 0.02")
    fig.metadata = {"c": [fmt_num(c.real), fmt_num(c.imag)], "kappa": fmt_num(spec.kappa),
                    "window": cfg.window, "tol": fmt_num(cfg.tol),
                    "max_tangency_residual": fmt_num(report.max_tangency_residual),
                    "max_orthogonality_residual": fmt_num(report.max_orthogonality_residual),
                    "local_overlap_violations": report.local_overlap_violations,
                    "valid": ok}
    emit(cfg, "packing", records, fig)
    note(f"tangency {report.max_tangency_residual:.3e}, orthogonality "
         f"{report.max_orthogonality_residual:.3e}, overlaps {report.local_overlap_violations}")
    return EXIT_OK if ok else EXIT_PACKING


def cmd_selftest(cfg, kappa_scale=1.0):
    from .acceptance import run_all
    outcomes = run_all(seed=cfg.seed, kappa_scale=kappa_scale, echo=print)
    failed = [o.index for o in outcomes if not o.passed]
    total = sum(o.seconds for o in outcomes)
    print(f"{len(outcomes) - len(failed)}/{len(outcomes)} passed in {total:.1f}s"
          + (f"; failed: {failed}" if failed else ""))
    return EXIT_FAIL if failed else EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="dehnfill", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dehnfill {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value file; flags override it")
        p.add_argument("--out", help="output file (suffix added from --format); default stdout")
        p.add_argument("--format", choices=("svg", "csv", "json"))
        p.add_argument("--tol", type=float, help="validation tolerance (default 1e-9)")
        p.add_argument("--xtol", type=float, help="root-find angular tolerance (default 1e-14)")
        p.add_argument("--theta-grid", type=int, help="angular scan size (default 720, >= 64)")
        p.add_argument("--seed", type=int)
        return p

    p = common(sub.add_parser("moduli", help="omega, region and filling data for c or a grid"))
    p.add_argument("--c", help="complex literal such as 0.5+0.5i")
    p.add_argument("--grid", help="NXxNY cell-center grid over [-extent, extent] x (-pi, pi)")
    p.add_argument("--extent", type=float)

    p = common(sub.add_parser("loci", help="special points per level and the loci figure"))
    p.add_argument("--s", help="levels: 0.1,0.5 or start:stop:count")

    p = common(sub.add_parser("dehnspace", help="sampled filling coefficients against the hexagon"))
    p.add_argument("--samples", type=int)
    p.add_argument("--s", help="trace levels (default 1-10^-k, k=2..8)")
    p.add_argument("--t", help="comma-separated trace slopes (default 0.75,1.5,-0.5)")

    p = common(sub.add_parser("degenerate", help="cone angle and singular length along t = p/(p+q)"))
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--s", help="levels (default 1-10^-k, k=2..8)")

    p = common(sub.add_parser("packing", help="developed packing with duals, validated"))
    p.add_argument("--c", help="complex literal; 0 gives the hexagonal packing")
    p.add_argument("--window", type=int)
    p.add_argument("--kappa-fault", type=float, default=1.0, help=argparse.SUPPRESS)

    p = common(sub.add_parser("selftest", help="run the acceptance suite"))
    p.add_argument("--kappa-fault", type=float, default=1.0, help=argparse.SUPPRESS)
    return parser


COMMANDS = {"moduli": cmd_moduli, "loci": cmd_loci, "dehnspace": cmd_dehnspace,
            "degenerate": cmd_degenerate, "packing": cmd_packing, "selftest": cmd_selftest}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        handler = COMMANDS[args.command]
        if args.command in ("packing", "selftest"):
            return handler(cfg, kappa_scale=args.kappa_fault)
        return handler(cfg)
    except (InputError, DomainError) as exc:
        note(f"error: {exc}")
        return EXIT_INPUT
    except NumericError as exc:
        note(f"numerical failure: {exc}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
