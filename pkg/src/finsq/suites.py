"""Named verification suites over a metric bundle.

Each suite produces named checks ("suite/check") with residual evidence.
A check applies only where the bundle carries the invariant it verifies;
a suite whose checks all turn out inapplicable fails with the reasons
rather than passing vacuously.

Tolerance defaults are per check and deliberately heterogeneous: exact
algebraic identities sit at 1e-12, deformation roundtrips at 1e-10,
rewritten-expression agreement at 1e-9, and curvature-level statements at
1e-6 or 1e-7.  A tolerances mapping (from configuration) replaces the
default for a full check name, or for one residual family inside a
certificate via "suite/check.family".

Suites run sequentially by default; set FINSQ_THREADS=k to spread them
over k worker threads (results keep the requested order either way).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import construct as con
from . import geometry as geo
from . import square as sq
from .config import RunConfig, SUITE_NAMES
from .finsler import cfc_residual, douglas_tensor, einstein_residual, flag_curvature
from .registry import MetricBundle
from .reporting import CheckEntry, SuiteResult, residual_stat
from .sampling import SampleSet, sample_inputs


@dataclass(frozen=True)
class SuiteContext:
    bundle: MetricBundle
    samples: SampleSet
    config: RunConfig

    def tol(self, name: str, default: float) -> float:
        return float(self.config.tolerances.get(name, default))

    def cert_tols(self, check: str, defaults: dict) -> dict:
        return {fam: self.tol(f"{check}.{fam}", d) for fam, d in defaults.items()}


def _stat_entry(name: str, values, tolerance: float, extra: dict | None = None) -> CheckEntry:
    stat = residual_stat(name, values, tolerance)
    detail = {"residuals": {name.rsplit("/", 1)[-1]: stat.to_json()}}
    if extra:
        detail.update(extra)
    return CheckEntry(name=name, passed=stat.passed, detail=detail)


def _cert_entry(name: str, cert, extra_passed: bool = True, extra: dict | None = None) -> CheckEntry:
    detail = cert.to_json()
    if extra:
        detail.update(extra)
    return CheckEntry(name=name, passed=bool(cert.passed and extra_passed), detail=detail)


# -- suites ----------------------------------------------------------------------


def _suite_einstein(ctx: SuiteContext):
    checks, skipped = [], []
    b = ctx.bundle
    pts, dirs = ctx.samples.points, ctx.samples.directions
    if b.square_data:
        cert = sq.check_einstein_square(
            b.alpha, b.beta, pts, dirs,
            tolerances=ctx.cert_tols("einstein/certificate",
                                     {"covariant": 1e-8, "alpha-ricci": 1e-8,
                                      "finsler-ricci": 1e-6}),
            b_cap=ctx.config.b_cap)
        extra_ok = True
        extra = {}
        if b.expected_characterization_constant is not None:
            ctol = ctx.tol("einstein/certificate.constant", 1e-4)
            dev = abs(cert.constant - b.expected_characterization_constant)
            extra = {"expected_constant": b.expected_characterization_constant,
                     "constant_deviation": dev}
            extra_ok = dev <= ctol
        checks.append(_cert_entry("einstein/certificate", cert, extra_ok, extra))
        scale = sq.check_einstein_scale_system(
            b.alpha, b.beta, pts,
            tolerances=ctx.cert_tols("einstein/scale-certificate",
                                     {"covariant": 1e-8, "gradient": 1e-6, "constancy": 1e-8}),
            b_cap=ctx.config.b_cap)
        checks.append(_cert_entry("einstein/scale-certificate", scale))
    else:
        skipped.append("certificates need square alpha-beta data")
    if b.expected_einstein_constant is not None:
        tol = ctx.tol("einstein/finsler-residual", 1e-6)
        vals = [einstein_residual(b.metric, x, y, b.expected_einstein_constant)
                for x, y in zip(pts, dirs)]
        checks.append(_stat_entry("einstein/finsler-residual", vals, tol,
                                  {"constant": b.expected_einstein_constant}))
    else:
        skipped.append("no Einstein constant is known for this metric")
    return checks, skipped


def _suite_cfc(ctx: SuiteContext):
    b = ctx.bundle
    if b.expected_flag is None:
        return [], ["no constant flag curvature is known for this metric"]
    K = b.expected_flag
    pts, dirs, edges = ctx.samples.points, ctx.samples.directions, ctx.samples.edges
    flags = [abs(flag_curvature(b.metric, x, y, u) - K)
             for x, y, u in zip(pts, dirs, edges)]
    resid = [cfc_residual(b.metric, x, y, K) for x, y in zip(pts, dirs)]
    return [
        _stat_entry("cfc/flag", flags, ctx.tol("cfc/flag", 1e-6), {"expected": K}),
        _stat_entry("cfc/residual", resid, ctx.tol("cfc/residual", 1e-6), {"expected": K}),
    ], []


def _suite_deformation(ctx: SuiteContext):
    b = ctx.bundle
    if not b.square_data:
        return [], ["deformations are defined for square alpha-beta data"]
    pts, dirs = ctx.samples.points, ctx.samples.directions
    al, be = b.alpha, b.beta
    conf, red, norms, exprs = [], [], [], []
    a_c = sq.from_conformal_pair(*sq.to_conformal_pair(al, be))
    a_r = sq.from_reduced_pair(*sq.to_reduced_pair(al, be))
    for x, y in zip(pts, dirs):
        X = [float(v) for v in x]
        a0 = al.matrix(x)
        b0 = np.array([float(v) for v in be.components(X)])
        scale = 1.0 + np.max(np.abs(a0))
        for pair, acc in ((a_c, conf), (a_r, red)):
            da = np.max(np.abs(pair[0].matrix(x) - a0))
            db = np.max(np.abs(np.array([float(v) for v in pair[1].components(X)]) - b0))
            acc.append(max(da, db) / scale)
        norms.append(max(sq.norm_identity_residuals(al, be, x).values()))
        f1, f2, f3 = sq.f_square_three_ways(al, be, x, y)
        exprs.append(max(abs(f2 - f1), abs(f3 - f1)) / (1.0 + abs(f1)))
    return [
        _stat_entry("deformation/conformal-roundtrip", conf,
                    ctx.tol("deformation/conformal-roundtrip", 1e-10)),
        _stat_entry("deformation/reduced-roundtrip", red,
                    ctx.tol("deformation/reduced-roundtrip", 1e-10)),
        _stat_entry("deformation/norm-identities", norms,
                    ctx.tol("deformation/norm-identities", 1e-12)),
        _stat_entry("deformation/three-expressions", exprs,
                    ctx.tol("deformation/three-expressions", 1e-9)),
    ], []


def _suite_pde(ctx: SuiteContext):
    checks = []
    lib = sq.phi_library()
    for key in ("square-conformal", "square-reduced", "randers-nav"):
        phi = lib[key]
        vals = []
        for b2 in np.linspace(0.0, 0.8, 20):
            bb = float(np.sqrt(b2))
            for s in np.linspace(-bb, bb, 20):
                vals.append(sq.phi_pde_residual(phi, float(b2), float(s)))
        checks.append(_stat_entry(f"pde/{key}", vals, ctx.tol(f"pde/{key}", 1e-10)))
    return checks, []


def _suite_douglas(ctx: SuiteContext):
    b = ctx.bundle
    k = min(len(ctx.samples.points), 10)
    pts = ctx.samples.points[:k]
    dirs = ctx.samples.directions[:k]
    tensors = [douglas_tensor(b.metric, x, y) for x, y in zip(pts, dirs)]
    sym = []
    for D in tensors:
        c = D.components
        sym.append(max(float(np.max(np.abs(c - np.transpose(c, (0, 1, 3, 2))))),
                       float(np.max(np.abs(c - np.transpose(c, (0, 2, 1, 3)))))))
    trace = [D.y_trace_max() for D in tensors]
    checks = [
        _stat_entry("douglas/symmetry", sym, ctx.tol("douglas/symmetry", 1e-12)),
        _stat_entry("douglas/euler-trace", trace, ctx.tol("douglas/euler-trace", 1e-10)),
    ]
    skipped = []
    if b.expected_douglas is not None:
        mags = [D.max_abs for D in tensors]
        checks.append(_stat_entry("douglas/magnitude", mags,
                                  ctx.tol("douglas/magnitude", 1e-6),
                                  {"expected": b.expected_douglas}))
    else:
        skipped.append("metric is not expected to be of Douglas type")
    return checks, skipped


def _suite_closed(ctx: SuiteContext):
    b = ctx.bundle
    cert = sq.check_closedness(b.alpha, b.beta, ctx.samples.points,
                               ctx.samples.directions,
                               tolerance=ctx.tol("closed/skew", 1e-10))
    return [_cert_entry("closed/skew", cert)], []


def _suite_spray_deform(ctx: SuiteContext):
    b = ctx.bundle
    if not b.square_data:
        return [], ["spray deformation identities need square alpha-beta data"]
    checks = []
    for kind in ("conformal", "reduced"):
        res = sq.deformed_spray_residual(
            b.alpha, b.beta, ctx.samples.points, ctx.samples.directions, kind=kind,
            tolerance=ctx.tol(f"spray-deform/{kind}", 1e-7))
        checks.append(_cert_entry(f"spray-deform/{kind}", res))
    return checks, []


def _suite_warped(ctx: SuiteContext):
    rng = np.random.Generator(np.random.Philox(key=443))
    pts = np.column_stack([rng.uniform(-0.4, 0.4, 10),
                           rng.uniform(-0.5, 0.5, 10), rng.uniform(-0.5, 0.5, 10)])
    res = con.warped_trace_residual(
        geo.sphere(2, 1.3), lambda t: 1.0 + 0.3 * t * t,
        lambda t: 0.6 * t, lambda t: 0.6, (-0.5, 0.5), pts)
    checks = [_stat_entry("warped/trace", [res], ctx.tol("warped/trace", 1e-7),
                          {"fixture": "dt^2 + (1 + 0.3 t^2)^2 sphere(2, k=1.3)"})]
    if ctx.bundle.construction is not None:
        cm = ctx.bundle.construction
        cert = sq.check_reduced_pair(
            cm.reduced_metric, cm.reduced_form, ctx.samples.points,
            tolerances=ctx.cert_tols("warped/reduced-certificate",
                                     {"homothety": 1e-8, "ricci-flat": 1e-8}))
        checks.append(_cert_entry("warped/reduced-certificate", cert))
    return checks, []


_SUITES = {
    "cfc": _suite_cfc,
    "closed": _suite_closed,
    "deformation": _suite_deformation,
    "douglas": _suite_douglas,
    "einstein": _suite_einstein,
    "pde": _suite_pde,
    "spray-deform": _suite_spray_deform,
    "warped": _suite_warped,
}

assert set(_SUITES) == set(SUITE_NAMES)


def _thread_count() -> int:
    raw = os.environ.get("FINSQ_THREADS", "1")
    try:
        k = int(raw)
    except ValueError:
        raise ValueError(f"FINSQ_THREADS must be an integer, got {raw!r}")
    return max(1, k)


def run_suites(bundle: MetricBundle, cfg: RunConfig) -> list[SuiteResult]:
    """Run the configured suites over one bundle, in the requested order."""
    samples = sample_inputs(bundle.alpha, bundle.beta, cfg.samples, cfg.seed,
                            max_x=cfg.max_x, b_cap=cfg.b_cap)
    ctx = SuiteContext(bundle=bundle, samples=samples, config=cfg)

    def run_one(name: str) -> SuiteResult:
        checks, skipped = _SUITES[name](ctx)
        if not checks:
            reason = "; ".join(skipped) or "no applicable checks"
            return SuiteResult(name, False,
                               (CheckEntry(f"{name}/skipped", False, {"reason": reason}),))
        return SuiteResult(name, all(c.passed for c in checks), tuple(checks))

    k = _thread_count()
    if k == 1:
        return [run_one(name) for name in cfg.suites]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(run_one, cfg.suites))
