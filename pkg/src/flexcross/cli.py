"""Command line interface.

    flexcross verify|trajectory|volume|flat|embed|mesh CONFIG [options]

Exit codes: 0 success, 1 a check failed, 2 usage, parse or validation
error, 3 inconclusive result (unless ``--allow-inconclusive``).
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__, checks, embedding, flatgeom, flexion, measure, spaces
from .angles import measured_dihedral, ridge_faces
from .combinatorics import complex_kn
from .config import ConfigError, RunConfig, ValidationError, parse_config, parse_tol_overrides
from .errors import (
    ConcurrencyError,
    DegenerateError,
    FlexcrossError,
    InputError,
    UnsupportedError,
)
from .flexion import INF, as_param
from .spaces import EUCLIDEAN, HYPERBOLIC, SPHERICAL

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3

METHODS = ("closed-form", "schlafli", "decomposition", "monte-carlo", "all")
DEFAULT_MC_SAMPLES = 2000


class ProjectionError(DegenerateError):
    """The projection pole coincides with a vertex."""


# --------------------------------------------------------------------------
# Output helpers

def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def fmt(x) -> str:
    """Round-trippable float text (``repr``); NaN and infinities as tokens."""
    x = float(x)
    return repr(x)


def table_text(header_lines, columns, rows) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    return buf.getvalue()


def read_table(path) -> tuple[list[str], list[str], np.ndarray]:
    """Parse a table written by this module: (comments, columns, values)."""
    comments, columns, rows = [], None, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            comments.append(line[1:].strip())
        elif columns is None:
            columns = line.split(",")
        elif line:
            rows.append([float(v) for v in line.split(",")])
    return comments, columns or [], np.array(rows, dtype=float).reshape(len(rows), len(columns or []))


def _vertex_labels(n: int) -> list[tuple[str, int]]:
    return [("a", i) for i in range(n)] + [("b", i) for i in range(n)]


# --------------------------------------------------------------------------
# Commands

def cmd_verify(cfg: RunConfig, out=None, allow_inconclusive: bool = False, stream=None):
    """Run the verification pipeline; returns ``(report, exit_status)``."""
    stream = sys.stdout if stream is None else stream
    report = checks.run_checks(cfg)
    width = max((len(r.name) for r in report.records), default=10)
    for r in report.records:
        note = f"  [{r.note}]" if r.note else ""
        stream.write(
            f"{r.status.upper():<12} {r.name:<{width}}  {r.anchor:<16} "
            f"residual={r.residual:.3e} tol={r.tolerance:.1e}{note}\n"
        )
    for flag in report.flags:
        stream.write(f"FLAG         {flag}\n")
    status = report.exit_status(allow_inconclusive)
    stream.write(
        f"{len(report.records)} checks: {len(report.by_status(checks.PASS))} passed, "
        f"{len(report.failed)} failed, {len(report.inconclusive)} inconclusive\n"
    )
    if out is not None:
        rows = [
            [r.name, r.anchor, r.status, fmt(r.residual), fmt(r.tolerance), r.note.replace(",", ";")]
            for r in report.records
        ]
        header = cfg.header() + [f"flags={';'.join(report.flags)}"]
        write_atomic(out, table_text(header, ["name", "anchor", "status", "residual", "tolerance", "note"], rows))
    return report, status


def trajectory_columns(cfg: RunConfig) -> list[str]:
    n = cfg.n
    dim = cfg.data.space.dim
    cols = ["u"]
    for side, i in _vertex_labels(n):
        cols += [f"{side}{i + 1}_x{j}" for j in range(dim)]
    cols += [f"{side}{i + 1}_m" for side, i in _vertex_labels(n)]
    cols += [f"psi_{F.label()}" for F in ridge_faces(n)]
    return cols


def trajectory_rows(cfg: RunConfig):
    family = flexion.build(cfg.data)
    space = cfg.data.space
    m_dual = family.frame.axis * space.signature
    rows = []
    for u in cfg.u_grid:
        c = flexion.configuration(family, u)
        verts = [c.vertex(side, i) for side, i in _vertex_labels(cfg.n)]
        row = [u]
        for v in verts:
            row += list(v)
        row += [float(v @ m_dual) for v in verts]
        row += [measured_dihedral(c, F) for F in ridge_faces(cfg.n)]
        rows.append(row)
    return rows


def cmd_trajectory(cfg: RunConfig, out=None) -> int:
    """Per-u vertex coordinates, pairings with m and dihedral angles."""
    text = table_text(cfg.header(), trajectory_columns(cfg), trajectory_rows(cfg))
    emit(text, out)
    return EXIT_OK


def _volume_methods(cfg: RunConfig, method: str) -> list[str]:
    kind, n = cfg.data.space.kind, cfg.n
    if method == "all":
        picked = ["closed-form", "decomposition"]
        if kind != EUCLIDEAN and n >= 3:
            picked.insert(1, "schlafli")
        return picked
    if method == "schlafli" and (kind == EUCLIDEAN or n < 3):
        raise UnsupportedError("Schlafli integration needs a curved space and n >= 3")
    return [method]


def volume_table(cfg: RunConfig, method: str = "all", samples: int = DEFAULT_MC_SAMPLES):
    """Columns and rows of the volume table."""
    if method not in METHODS:
        raise InputError(f"unknown method {method!r}")
    methods = _volume_methods(cfg, method)
    family = flexion.build(cfg.data)
    key = {m: m.replace("-", "_") for m in methods}
    cols = ["u"]
    for m in methods:
        cols += [f"V_{key[m]}", f"err_{key[m]}"]
    pairs = [(p, q) for i, p in enumerate(methods) for q in methods[i + 1:]] if method == "all" else []
    cols += [f"diff_{key[p]}_{key[q]}" for p, q in pairs]
    mc_rng = cfg.rng("monte-carlo")
    dec_rng = cfg.rng("decomposition")
    rows = []
    for u in cfg.u_grid:
        vols = {}
        for m in methods:
            if m == "closed-form":
                vols[m] = measure.closed_form_volume(cfg.data, u)
            elif m == "schlafli":
                vols[m] = measure.schlafli_volume(family, u)
            elif m == "decomposition":
                vols[m] = measure.generalized_volume(flexion.configuration(family, u), rng=dec_rng)
            else:
                value, err = measure.monte_carlo_volume(flexion.configuration(family, u), samples, mc_rng)
                vols[m] = measure.GeneralizedVolume(value, None, err)
        row = [u]
        for m in methods:
            row += [vols[m].value, vols[m].abs_error]
        row += [vols[p].distance(vols[q]) for p, q in pairs]
        rows.append(row)
    return cols, rows


def cmd_volume(cfg: RunConfig, method: str = "all", out=None, samples: int = DEFAULT_MC_SAMPLES) -> int:
    cols, rows = volume_table(cfg, method, samples)
    header = cfg.header() + [f"method={method}"]
    if method == "monte-carlo":
        header.append(f"samples={samples}")
    emit(table_text(header, cols, rows), out)
    return EXIT_OK


def _flat_summary(report: flatgeom.FlatReport, n: int) -> dict:
    a = report.analysis
    return {
        "O": a.O.tolist(),
        "O_kind": a.o_kind,
        "case": a.case,
        "concurrency_residual": report.concurrency.residual,
        "triple_residual": report.concurrency.triple_residual,
        "bisector_coincidence": report.coincidence,
        "ratio_error": report.ratio_error,
        "angle_margin": a.margin,
        "per_k": {
            str(k + 1): {
                "kind": pk.kind,
                "values": pk.values.tolist(),
                "spread": pk.spread,
                "detail": pk.detail,
            }
            for k, pk in a.per_k.items()
        },
        "classes": {
            str(k + 1): {F.label(): c for F, c in cls.items()} for k, cls in a.classes.items()
        },
        "parity_ok": {str(k + 1): ok for k, ok in a.parity_ok.items()},
        "equal_angle": None
        if a.equal_angle is None
        else {str(k + 1): v for k, v in a.equal_angle.items()},
        "alternating_sums": {str(k + 1): v for k, v in report.alternating.items()},
    }


def flat_report(cfg: RunConfig, perturb: float = 0.0) -> dict:
    """Flat analysis of P_0 and P_inf; ``perturb`` moves the vertices first."""
    family = flexion.build(cfg.data)
    rng = cfg.rng("flat-perturbation")
    out = {"positions": {}, "errors": {}}
    for u, label in ((0.0, "0"), (INF, "inf")):
        c = flexion.configuration(family, u)
        if perturb:
            c = flatgeom.perturbed_flat(c, perturb, rng)
        try:
            out["positions"][label] = _flat_summary(flatgeom.analyse(c), cfg.n)
        except ConcurrencyError as exc:
            out["errors"][label] = f"concurrency failure: {exc}"
    pos = out["positions"]
    out["parity_match"] = (
        len(pos) == 2 and all(all(p["parity_ok"].values()) for p in pos.values())
    )
    return out


def cmd_flat(cfg: RunConfig, out=None, perturb: float = 0.0, stream=None) -> int:
    stream = sys.stdout if stream is None else stream
    if cfg.n < 3:
        raise UnsupportedError("flat-position analysis needs n >= 3")
    rep = flat_report(cfg, perturb)
    for label, p in rep["positions"].items():
        kinds = sorted({v["kind"] for v in p["per_k"].values()})
        stream.write(
            f"P_{label}: O {p['O_kind']}, {p['case']} ({', '.join(kinds)}), "
            f"concurrency {p['concurrency_residual']:.2e}, parity {all(p['parity_ok'].values())}\n"
        )
    for label, msg in rep["errors"].items():
        stream.write(f"P_{label}: {msg}\n")
    if out is not None:
        write_atomic(out, json.dumps(rep, indent=2) + "\n")
    return EXIT_OK if rep["parity_match"] and not rep["errors"] else EXIT_FAIL


def _verdict_dict(verdict: embedding.EmbeddingVerdict) -> dict:
    pair = None
    if verdict.pair is not None:
        pair = [f.label() if hasattr(f, "label") else str(f) for f in verdict.pair]
    return {
        "status": verdict.status,
        "witness": None if verdict.witness is None else np.asarray(verdict.witness).tolist(),
        "pair": pair,
    }


def cmd_embed(
    cfg: RunConfig,
    u=None,
    theorem: bool = False,
    out=None,
    allow_inconclusive: bool = False,
    stream=None,
) -> int:
    stream = sys.stdout if stream is None else stream
    if u is None and not theorem:
        raise InputError("embed needs --u or --theorem-1-1")
    family = flexion.build(cfg.data)
    result = {}
    status = EXIT_OK
    if u is not None:
        verdict = embedding.is_embedded(flexion.configuration(family, u))
        result["u"] = "inf" if math.isinf(u) else u
        result["verdict"] = _verdict_dict(verdict)
        line = f"u={u:g}: {verdict.status}"
        if verdict.pair is not None:
            line += f" (facets {', '.join(result['verdict']['pair'])})"
        stream.write(line + "\n")
        if verdict.status == embedding.INCONCLUSIVE and not allow_inconclusive:
            status = EXIT_INCONCLUSIVE
    if theorem:
        if cfg.data.space.kind != SPHERICAL or not embedding.theorem_pattern(cfg.data):
            raise UnsupportedError("the certificate needs spherical data with s_i = -1 and s'_i = +1")
        cert = embedding.theorem_1_1_certificate(embedding.rotated_family(family), rng=cfg.rng("certificate"))
        result["certificate"] = {
            "passed": cert.passed,
            "delta": cert.delta,
            "items": [{"name": it.name, "passed": it.passed, "detail": it.detail} for it in cert.items],
            "witness": None if cert.witness is None else np.asarray(cert.witness).tolist(),
        }
        for it in cert.items:
            stream.write(f"{'PASS' if it.passed else 'FAIL':<5} {it.name}: {it.detail}\n")
        if not cert.passed:
            status = EXIT_FAIL
    if out is not None:
        write_atomic(out, json.dumps(result, indent=2) + "\n")
    return status


# --------------------------------------------------------------------------
# Mesh export

def _chart(space, axis, pole):
    """Map from model points to R^3 and its description."""
    if space.kind == EUCLIDEAN:
        return (lambda x: np.asarray(x, dtype=float)), "euclidean coordinates"
    if space.kind == HYPERBOLIC:
        return spaces.to_klein, "Beltrami-Klein ball"
    p = -axis if pole is None else np.asarray(pole, dtype=float)
    if p.shape != axis.shape:
        raise InputError(f"pole must have {len(axis)} coordinates")
    p = p / np.linalg.norm(p)
    basis, _ = spaces.complement_basis(spaces.Space(EUCLIDEAN, len(p)), [p])

    def stereo(x):
        x = np.asarray(x, dtype=float)
        d = 1.0 - x @ p
        if np.any(d < 1e-9):
            raise ProjectionError("projection pole coincides with a vertex")
        y = x - np.multiply.outer(x @ p, p)
        return (y @ basis.T) / d[..., None] if y.ndim > 1 else (basis @ y) / d

    label = "stereographic from -m" if pole is None else "stereographic from pole " + " ".join(fmt(v) for v in p)
    return stereo, label


def _chart_orientation(config, chart, h: float = 1e-6) -> int:
    """Sign with which the chart carries a positive ambient frame at a_1."""
    space = config.space
    x = config.a[0]
    if space.kind == EUCLIDEAN:
        T = np.eye(3)
        base_det = np.linalg.det(T)
    else:
        T, _ = spaces.complement_basis(space, [x])
        base_det = np.linalg.det(np.vstack([x, T]))
    if config.orientation * base_det < 0:
        T = T.copy()
        T[0] = -T[0]
    y0 = chart(x)
    cols = []
    for t in T:
        moved = x + h * t
        if space.kind != EUCLIDEAN:
            moved = spaces.project_to_model(space, moved)
        cols.append((chart(moved) - y0) / h)
    return 1 if np.linalg.det(np.array(cols)) > 0 else -1


def mesh_text(cfg: RunConfig, u, pole=None) -> str:
    """Wavefront OBJ text of the octahedron at ``u``."""
    if cfg.n != 3:
        raise UnsupportedError("mesh export is defined for n = 3")
    family = flexion.build(cfg.data)
    config = flexion.configuration(family, u)
    chart, label = _chart(config.space, family.frame.axis, pole)
    labels = _vertex_labels(3)
    index = {lab: i + 1 for i, lab in enumerate(labels)}
    coords = [chart(config.vertex(*lab)) for lab in labels]
    g = _chart_orientation(config, chart)
    cx = complex_kn(3)
    lines = [f"# projection: {label}"]
    for (side, i), p in zip(labels, coords):
        lines.append("v " + " ".join(fmt(c) for c in p))
    for f in cx.facets():
        tri = [index[v] for v in f.vertices()]
        if cx.sign(f) * g < 0:
            tri = tri[::-1]
        lines.append("f " + " ".join(str(t) for t in tri))
    return "\n".join(lines) + "\n"


def cmd_mesh(cfg: RunConfig, u=0.0, out=None, pole=None) -> int:
    emit(mesh_text(cfg, u, pole), out)
    return EXIT_OK


# --------------------------------------------------------------------------
# Entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flexcross",
        description="Flexible cross-polytopes of the simplest type: construction and verification.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=("verify", "trajectory", "volume", "flat", "embed", "mesh"))
    parser.add_argument("config", help="JSON configuration file")
    parser.add_argument("--out", help="output file (default: standard output)")
    parser.add_argument("--u", help="parameter value; 'inf' for infinity")
    parser.add_argument("--method", default="all", choices=METHODS, help="volume method")
    parser.add_argument("--samples", type=int, default=DEFAULT_MC_SAMPLES, help="Monte Carlo samples per u")
    parser.add_argument("--theorem-1-1", dest="theorem", action="store_true", help="emit the rotated-family certificate")
    parser.add_argument("--allow-inconclusive", action="store_true")
    parser.add_argument("--seed", type=lambda v: int(v, 0), help="overrides FLEXCROSS_SEED and the config seed")
    parser.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="tolerance override")
    parser.add_argument("--perturb", type=float, default=0.0, help="flat: move vertices by this amount first")
    parser.add_argument("--pole", help="mesh: comma-separated stereographic pole (default -m)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config, seed=args.seed, tol_overrides=parse_tol_overrides(args.tol))
        u = None if args.u is None else as_param(args.u)
        if args.command == "verify":
            return cmd_verify(cfg, args.out, args.allow_inconclusive)[1]
        if args.command == "trajectory":
            return cmd_trajectory(cfg, args.out)
        if args.command == "volume":
            return cmd_volume(cfg, args.method, args.out, args.samples)
        if args.command == "flat":
            return cmd_flat(cfg, args.out, args.perturb)
        if args.command == "embed":
            return cmd_embed(cfg, u, args.theorem, args.out, args.allow_inconclusive)
        pole = None if args.pole is None else [float(v) for v in args.pole.split(",")]
        return cmd_mesh(cfg, 0.0 if u is None else u, args.out, pole)
    except (ConfigError, ValidationError, InputError, UnsupportedError, ProjectionError, ValueError) as exc:
        print(f"flexcross: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FlexcrossError as exc:
        print(f"flexcross: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"flexcross: I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
