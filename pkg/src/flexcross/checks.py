"""Verification pipeline: every numerical invariant of a family as a check record.

Each check compares a measured residual with a named tolerance from the
run configuration.  Checks whose hypotheses do not hold for the given
geometry or dimension are skipped; a check that cannot decide (random
probing failed, a feasibility margin in the undecidable band) is recorded
as inconclusive rather than resolved either way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import angles, embedding, flatgeom, flexion, measure
from .combinatorics import faces
from .config import RunConfig
from .errors import (
    FlexcrossError,
    InconclusiveError,
    IndeterminateError,
    NotApplicableError,
    UnsupportedError,
)
from .flexion import INF, FlexFamily
from .spaces import EUCLIDEAN, SPHERICAL

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

# decomposition volumes are evaluated on at most this many grid points
# (n = 4 curved simplices cost seconds each)
VOLUME_SAMPLES = {2: 9, 3: 9}
VOLUME_SAMPLES_HIGH = 4
WITNESS_SAMPLES = 16


@dataclass
class CheckRecord:
    name: str
    anchor: str
    status: str
    residual: float
    tolerance: float
    note: str = ""


@dataclass
class VerificationReport:
    records: list[CheckRecord] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    def by_status(self, status: str) -> list[CheckRecord]:
        return [r for r in self.records if r.status == status]

    @property
    def failed(self) -> list[CheckRecord]:
        return self.by_status(FAIL)

    @property
    def inconclusive(self) -> list[CheckRecord]:
        return self.by_status(INCONCLUSIVE)

    def exit_status(self, allow_inconclusive: bool = False) -> int:
        """0 all passed, 1 any failure, 3 inconclusive (unless allowed)."""
        if self.failed:
            return 1
        if self.inconclusive and not allow_inconclusive:
            return 3
        return 0

    def get(self, name: str) -> CheckRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)


def _record(name, anchor, residual, tol, note="") -> CheckRecord:
    residual = float(residual)
    ok = np.isfinite(residual) and residual <= tol
    return CheckRecord(name, anchor, PASS if ok else FAIL, residual, float(tol), note)


def sample_grid(grid, count: int) -> list[float]:
    """Evenly spaced subset of the grid that keeps 0 and infinity when present."""
    grid = list(grid)
    if len(grid) <= count:
        return grid
    idx = np.unique(np.round(np.linspace(0, len(grid) - 1, count)).astype(int))
    picked = [grid[i] for i in idx]
    for special in (0.0, INF):
        if special in grid and special not in picked:
            picked.append(special)
    return flexion_sorted(picked)


def flexion_sorted(values) -> list[float]:
    finite = sorted(v for v in values if not math.isinf(v))
    return finite + [INF] * any(math.isinf(v) for v in values)


class _Context:
    """Family, configurations and flat analyses shared between checks."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.data = cfg.data
        self.tol = cfg.tolerances
        self.family: FlexFamily = flexion.build(cfg.data)
        self._configs = {}
        self._flat = {}

    @property
    def n(self) -> int:
        return self.data.n

    @property
    def kind(self) -> str:
        return self.data.space.kind

    def config(self, u):
        u = flexion.as_param(u)
        if u not in self._configs:
            self._configs[u] = flexion.configuration(self.family, u)
        return self._configs[u]

    def flat(self, u):
        """(frame, concurrency, analysis) of a flat position; concurrency
        errors are stored and re-raised on access."""
        if u not in self._flat:
            cfg = self.config(u)
            try:
                frame = flatgeom.flat_frame(cfg)
                conc = flatgeom.concurrency_point(cfg, tol=np.inf, frame=frame)
                analysis = flatgeom.classify_flat(cfg, conc, tol=self.tol["tangency"])
                self._flat[u] = (frame, conc, analysis)
            except FlexcrossError as exc:
                self._flat[u] = exc
        value = self._flat[u]
        if isinstance(value, Exception):
            raise value
        return value


# --------------------------------------------------------------------------
# Individual checks; each returns a list of records or raises
# NotApplicableError.

def check_edge_lengths(ctx: _Context):
    ref = flexion.edge_length_table(ctx.config(0.0))
    worst = 0.0
    for u in ctx.cfg.u_grid:
        table = flexion.edge_length_table(ctx.config(u))
        for e, L in table.items():
            worst = max(worst, abs(L - ref[e]) / max(ref[e], 1e-300))
    return [_record("edge-length constancy", "Remark 3.2", worst, ctx.tol["edge_length"])]


def check_dihedral_law(ctx: _Context):
    if ctx.n == 2 and ctx.kind != SPHERICAL:
        raise NotApplicableError("angle law is stated for n >= 3 or spherical quadrangles")
    worst = 0.0
    for u in ctx.cfg.u_grid:
        cfg = ctx.config(u)
        for F in angles.ridge_faces(ctx.n):
            got = angles.measured_dihedral(cfg, F)
            want = angles.predicted_dihedral(ctx.data, F, u)
            worst = max(worst, angles.angle_distance(got, want))
    return [_record("dihedral angle law", "Eq. (5)", worst, ctx.tol["dihedral"])]


def sign_law_residual(config, data) -> float:
    """Worst violation of the rule relating the angles at ``G + b_l`` and
    ``G + a_l`` for (n-3)-faces G missing {k, l}."""
    n = data.n
    worst = 0.0
    for G in faces(n, n - 3):
        for k, l in (G.missing(n), G.missing(n)[::-1]):
            X = angles.X_set(data, k)
            left = angles.measured_dihedral(config, G.with_vertex("b", l))
            right = angles.measured_dihedral(config, G.with_vertex("a", l))
            want = -right if l in X else right
            worst = max(worst, angles.angle_distance(left, want))
    return worst


def check_sign_law(ctx: _Context):
    if ctx.n < 3:
        raise NotApplicableError("needs (n-3)-faces")
    worst = max(sign_law_residual(ctx.config(u), ctx.data) for u in ctx.cfg.u_grid)
    return [_record("angle sign law", "Eq. (6)", worst, ctx.tol["sign_law"])]


def check_h_identity(ctx: _Context):
    H = ctx.family.H
    G = ctx.data.G
    res = float(np.max(np.abs(H + H.T - 2.0 * G)))
    return [_record("h-identity H + H^T = 2G", "Section 3", res, ctx.tol["h_identity"])]


def flatness_residual(config) -> float:
    verts = config.all_vertices()
    if config.space.kind == EUCLIDEAN:
        # the base plane passes through the origin
        return float(np.max(np.abs(verts @ config.axis)))
    return float(np.max(np.abs(verts @ (config.axis * config.space.signature))))


def check_flatness(ctx: _Context):
    res = max(flatness_residual(ctx.config(u)) for u in (0.0, INF))
    return [_record("flat positions", "Section 6", res, ctx.tol["flatness"])]


def duality_residual(family: FlexFamily, grid) -> float:
    dual, perm = flexion.build_dual(family)
    worst = 0.0
    for u in grid:
        v = INF if u == 0 else (0.0 if math.isinf(u) else 1.0 / u)
        c = flexion.configuration(family, u)
        d = flexion.configuration(dual, v)
        worst = max(worst, float(np.max(np.abs(d.a - c.a[perm]))), float(np.max(np.abs(d.b - c.b[perm]))))
    return worst


def check_duality(ctx: _Context):
    res = duality_residual(ctx.family, ctx.cfg.u_grid)
    recs = [_record("duality u -> 1/u", "Remark 6.3", res, ctx.tol["duality"])]
    if ctx.n >= 3:
        dual, _ = flexion.build_dual(ctx.family)
        o_inf = ctx.flat(INF)[1].point
        o_dual = flatgeom.concurrency_point(flexion.configuration(dual, 0.0), tol=np.inf).point
        recs.append(
            _record(
                "concurrency point of P_inf matches dual P_0",
                "Remark 6.3",
                flatgeom.projective_distance(o_inf, o_dual),
                ctx.tol["concurrency"],
            )
        )
    return recs


def check_concurrency(ctx: _Context):
    if ctx.n < 3:
        raise NotApplicableError("needs n >= 3")
    recs = []
    for u, label in ((0.0, "P_0"), (INF, "P_inf")):
        conc = ctx.flat(u)[1]
        res = max(conc.residual, conc.triple_residual)
        recs.append(_record(f"bisector concurrency at {label}", "Lemma 6.4", res, ctx.tol["concurrency"]))
    return recs


def check_ratios(ctx: _Context):
    if ctx.n < 3:
        raise NotApplicableError("needs n >= 3")
    recs = []
    for u, label in ((0.0, "P_0"), (INF, "P_inf")):
        frame = ctx.flat(u)[0]
        coincide, ratio = flatgeom.lemma_ratios(ctx.config(u), frame)
        recs.append(
            _record(f"bisector ratios at {label}", "Lemma 6.6", max(coincide, ratio), ctx.tol["ratio"])
        )
    return recs


def check_classification(ctx: _Context):
    if ctx.n < 3:
        raise NotApplicableError("needs n >= 3")
    recs = []
    for u, label in ((0.0, "P_0"), (INF, "P_inf")):
        analysis = ctx.flat(u)[2]
        spread = max(pk.spread for pk in analysis.per_k.values())
        rec = _record(f"flat classification at {label}", "Theorem 6.1", spread, ctx.tol["tangency"])
        kinds = sorted({pk.kind for pk in analysis.per_k.values()})
        rec.note = f"O {analysis.o_kind}; {', '.join(kinds)}"
        if not all(analysis.parity_ok.values()):
            rec.status = FAIL
            bad = [k + 1 for k, ok in analysis.parity_ok.items() if not ok]
            rec.note += f"; facet classes break the parity rule for k = {bad}"
        recs.append(rec)
    return recs


def check_facet_relation(ctx: _Context):
    if ctx.n < 3 and ctx.kind != SPHERICAL:
        raise NotApplicableError("needs n >= 3")
    res = max(measure.facet_relation_residual(ctx.family, w, u=1.0) for w in ("Y+", "Y-"))
    return [_record("facet volume relation", "Eq. (11)", res, ctx.tol["facet_relation"])]


def check_codim2_relation(ctx: _Context):
    if ctx.n < 3 and ctx.kind != SPHERICAL:
        raise NotApplicableError("needs n >= 3 or a spherical quadrangle")
    res = max(measure.codim2_relation_residual(ctx.family, k, u=1.0) for k in range(ctx.n))
    return [_record("codimension-two volume relations", "Eqs. (14)-(16)", res, ctx.tol["codim2_relation"])]


def check_alternating_sum(ctx: _Context):
    if ctx.n < 3:
        raise NotApplicableError("needs n >= 3")
    worst, used, skipped = 0.0, 0, 0
    for u in (0.0, INF):
        frame, _, analysis = ctx.flat(u)
        for k in range(ctx.n):
            pk = flatgeom.pk_cross_polytope(ctx.config(u), k, frame)
            try:
                worst = max(worst, flatgeom.circumscribed_alternating_sum(pk, analysis))
                used += 1
            except NotApplicableError:
                skipped += 1
    if not used:
        raise NotApplicableError("no P_(k) lies in a hemisphere around its centre")
    note = f"{used} polytopes" + (f", {skipped} outside the hemisphere hypothesis" if skipped else "")
    return [_record("alternating facet sums", "Eq. (12)", worst, ctx.tol["alternating_sum"], note)]


def _volume_scale(ctx: _Context) -> float:
    return measure.sphere_volume(ctx.n) if ctx.kind == SPHERICAL else 1.0


def check_closed_form(ctx: _Context):
    if ctx.kind == EUCLIDEAN:
        raise NotApplicableError("euclidean volumes are checked by decomposition only")
    if ctx.n == 2 and ctx.kind != SPHERICAL:
        raise NotApplicableError("the closed form is stated for n >= 3 off the sphere")
    scale = _volume_scale(ctx)
    worst = 0.0
    if ctx.n >= 3:
        for u in ctx.cfg.u_grid:
            cf = measure.closed_form_volume(ctx.data, u)
            worst = max(worst, cf.distance(measure.schlafli_volume(ctx.family, u)) / scale)
        note = "against Schlafli integration"
    else:
        for u in ctx.cfg.u_grid:
            cf = measure.closed_form_volume(ctx.data, u)
            worst = max(worst, cf.distance(measure.generalized_volume(ctx.config(u))) / scale)
        note = "against exact decomposition"
    return [_record("closed-form volume", "Theorem 7.8", worst, ctx.tol["volume_agreement"], note)]


def check_decomposition(ctx: _Context):
    if ctx.n == 2 and ctx.kind != SPHERICAL:
        raise NotApplicableError("generalized volume is considered for n >= 3")
    worst = -np.inf
    rng = ctx.cfg.rng("decomposition")
    count = VOLUME_SAMPLES.get(ctx.n, VOLUME_SAMPLES_HIGH)
    for u in sample_grid(ctx.cfg.u_grid, count):
        dec = measure.generalized_volume(ctx.config(u), rng=rng)
        refs = [measure.closed_form_volume(ctx.data, u)]
        if ctx.n >= 3 and ctx.kind != EUCLIDEAN:
            refs.append(measure.schlafli_volume(ctx.family, u))
        for ref in refs:
            worst = max(worst, dec.distance(ref) - dec.abs_error - ref.abs_error)
    worst = max(worst, 0.0)
    return [_record("decomposition volume agreement", "Remark 7.9", worst, ctx.tol["decomposition_slack"])]


def check_degrees(ctx: _Context):
    if ctx.kind != SPHERICAL:
        raise NotApplicableError("degrees are taken on the sphere")
    p = ctx.data.products
    want0 = 1 if np.all(p == -1) else 0
    want_inf = 1 if np.all(p == 1) else 0
    rng = ctx.cfg.rng("degrees")
    d0 = embedding.spherical_degree(ctx.config(0.0), rng)
    dinf = embedding.spherical_degree(ctx.config(INF), rng)
    mismatches = int(abs(d0) != want0) + int(abs(dinf) != want_inf)
    rec = _record("degrees of flat positions", "Lemma 7.1", mismatches, 0.0)
    rec.note = f"deg P_0 = {d0}, deg P_inf = {dinf}"
    return [rec]


def check_modified_bellows(ctx: _Context):
    if ctx.kind != SPHERICAL or ctx.n < 3:
        raise NotApplicableError("spherical families with n >= 3")
    flips = measure.modified_bellows_witness(ctx.data)
    fam = flexion.build(measure.apply_flips(ctx.data, flips))
    sig = measure.sphere_volume(ctx.n)
    v0 = measure.schlafli_volume(fam, 0.0)
    mags = np.geomspace(1e-2, 1e2, WITNESS_SAMPLES // 2)
    worst = 0.0
    for u in np.concatenate([mags, -mags]):
        worst = max(worst, measure.schlafli_volume(fam, u).distance(v0) / sig)
    note = "flips " + (", ".join(f"{s}{i + 1}" for s, i in flips) or "none")
    return [_record("modified Bellows witness", "Corollary 7.11", worst, ctx.tol["witness"], note)]


CHECKS = (
    ("edge-length constancy", check_edge_lengths),
    ("dihedral angle law", check_dihedral_law),
    ("angle sign law", check_sign_law),
    ("h-identity", check_h_identity),
    ("flat positions", check_flatness),
    ("duality", check_duality),
    ("concurrency", check_concurrency),
    ("bisector ratios", check_ratios),
    ("flat classification", check_classification),
    ("facet volume relation", check_facet_relation),
    ("codimension-two relations", check_codim2_relation),
    ("alternating facet sums", check_alternating_sum),
    ("closed-form volume", check_closed_form),
    ("decomposition volume", check_decomposition),
    ("degrees", check_degrees),
    ("modified Bellows witness", check_modified_bellows),
)

ANCHORS = {
    "edge-length constancy": "Remark 3.2",
    "dihedral angle law": "Eq. (5)",
    "angle sign law": "Eq. (6)",
    "h-identity": "Section 3",
    "flat positions": "Section 6",
    "duality": "Remark 6.3",
    "concurrency": "Lemma 6.4",
    "bisector ratios": "Lemma 6.6",
    "flat classification": "Theorem 6.1",
    "facet volume relation": "Eq. (11)",
    "codimension-two relations": "Eqs. (14)-(16)",
    "alternating facet sums": "Eq. (12)",
    "closed-form volume": "Theorem 7.8",
    "decomposition volume": "Remark 7.9",
    "degrees": "Lemma 7.1",
    "modified Bellows witness": "Corollary 7.11",
}


def volume_flags(data) -> list[str]:
    if data.space.kind == SPHERICAL and measure.empty_x_indices(data):
        return ["volume non-constant (Corollary 1.2)"]
    return []


def run_checks(cfg: RunConfig, only=None) -> VerificationReport:
    """Run every applicable check (or those named in ``only``)."""
    ctx = _Context(cfg)
    report = VerificationReport(flags=volume_flags(cfg.data))
    for name, fn in CHECKS:
        if only is not None and name not in only:
            continue
        try:
            report.records.extend(fn(ctx))
        except NotApplicableError:
            continue
        except (IndeterminateError, InconclusiveError) as exc:
            report.records.append(CheckRecord(name, ANCHORS[name], INCONCLUSIVE, math.nan, math.nan, str(exc)))
        except (FlexcrossError, UnsupportedError) as exc:
            report.records.append(
                CheckRecord(name, ANCHORS[name], FAIL, math.nan, math.nan, f"{type(exc).__name__}: {exc}")
            )
    return report


__all__ = [
    "CHECKS",
    "CheckRecord",
    "FAIL",
    "INCONCLUSIVE",
    "PASS",
    "VerificationReport",
    "duality_residual",
    "flatness_residual",
    "run_checks",
    "sample_grid",
    "sign_law_residual",
]
