"""Square metrics F = (alpha + beta)^2 / alpha and their two companion pairs.

The square metric can be rewritten over deformed Riemannian data in two
ways, and both rewrites turn the Einstein condition into classical
equations on the deformed pair:

  conformal pair:  u_ij = (1 - b^2)^2 a_ij,  v_i = sqrt(1 - b^2) b_i.
      F = (sqrt(1 + v^2) u + v)^2 / u where u^2 = u_ij y^i y^j.  F is
      Einstein iff Ric(u) = -(n-1) c^2 u^2 and v_{i|j} = c sqrt(1 + v^2) u_ij
      for a constant c.

  reduced pair:    w_ij = (1 - b^2)^3 (a_ij - b_i b_j),  z_i = (1 - b^2)^2 b_i.
      F is Einstein iff w is Ricci-flat and z_{i|j} = c w_ij (a homothety).

On the original data the same condition reads, for a constant c,

      b_{i|j} = c (1 - b^2) [ (1 + 2 b^2) a_ij - 3 b_i b_j ]
      Ric(a)_ij = c^2 (1 - b^2)^2 [ -(5(n-1) + 2(2n-5) b^2) a_ij
                                    + 6 (n-2) b_i b_j ]

and any Einstein square metric in dimension >= 3 is Ricci-flat as a
Finsler metric.  A pointwise-scale variant replaces c (1 - b^2) by a
function tau(x) subject to tau_i = -2 tau^2 b_i, which forces
tau / (1 - b^2) to be constant.

Everything here is check code: it fits the constant from the data, then
reports residuals of every equation the characterization asserts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .finsler import GeneralABMetric, PhiFunction, f_value, ricci
from .geometry import (
    OneFormField,
    RiemannMetric,
    beta_derivatives,
    geodesic_spray,
    one_form_norm_sq,
    ricci_tensor,
)
from .jets import sqrt
from .reporting import ResidualStat, residual_stat


# -- profile functions -----------------------------------------------------------


def _phi_square(s):
    return (1.0 + s) * (1.0 + s)


def _phi_square_conformal(b2, s):
    return (sqrt(1.0 + b2) + s) ** 2


def _phi_square_reduced(b2, s):
    root = sqrt(1.0 - b2 + s * s)
    w = 1.0 - b2
    return (root + s) ** 2 / (w * w * root)


def _phi_randers_nav(b2, s):
    return (sqrt(1.0 - b2 + s * s) - s) / (1.0 - b2)


def phi_library() -> dict[str, PhiFunction]:
    """Named profile functions.

    "square" is the plain profile of F = (alpha + beta)^2 / alpha.  The
    "square-conformal" and "square-reduced" entries express the same F over
    the conformal and reduced pairs; "randers-nav" is the navigation-form
    Randers profile, kept as an unrelated general-kind control.  General
    entries satisfy phi_22 = 2 (phi_1 - s phi_12).
    """
    return {
        "riemannian": PhiFunction("riemannian", "plain", lambda s: 1.0 + 0.0 * s,
                                  d1=lambda s: 0.0, d2=lambda s: 0.0),
        "square": PhiFunction("square", "plain", _phi_square,
                              d1=lambda s: 2.0 * (1.0 + s), d2=lambda s: 2.0,
                              domain=lambda b2, s: b2 < 1.0),
        "square-conformal": PhiFunction("square-conformal", "general", _phi_square_conformal),
        "square-reduced": PhiFunction("square-reduced", "general", _phi_square_reduced,
                                      domain=lambda b2, s: b2 < 1.0),
        "randers-nav": PhiFunction("randers-nav", "general", _phi_randers_nav,
                                   domain=lambda b2, s: b2 < 1.0),
    }


def randers_phi() -> PhiFunction:
    """phi = 1 + s, the Randers profile (a non-square control case)."""
    return PhiFunction("randers", "plain", lambda s: 1.0 + s,
                       d1=lambda s: 1.0, d2=lambda s: 0.0)


def square_metric(alpha: RiemannMetric, beta: OneFormField, name: str = "") -> GeneralABMetric:
    """F = (alpha + beta)^2 / alpha over the given data."""
    return GeneralABMetric(alpha, beta, phi_library()["square"],
                           name or f"square({alpha.name}, {beta.name})")


def phi_pde_residual(phi: PhiFunction, b2: float, s: float) -> float:
    """|phi_22 - 2 (phi_1 - s phi_12)| for general-kind profiles.

    The identity holds exactly when alpha phi(b^2, s) is a rewrite of a
    square metric over deformed data; it is the obstruction that makes the
    deformed expressions consistent with one fixed F.
    """
    _, p1, _, _, p12, p22 = phi.partials(b2, s)
    return abs(p22 - 2.0 * (p1 - s * p12))


# -- the two deformations -------------------------------------------------------


def _norm_sq_fn(alpha: RiemannMetric, beta: OneFormField):
    return lambda X: one_form_norm_sq(alpha, beta, X)


def to_conformal_pair(alpha: RiemannMetric, beta: OneFormField) -> tuple[RiemannMetric, OneFormField]:
    """(u, v) with u_ij = (1 - b^2)^2 a_ij, v_i = sqrt(1 - b^2) b_i.

    The v-norm obeys v^2 = b^2 / (1 - b^2), so (1 + v^2)(1 - b^2) = 1.
    Requires b < 1 on the domain.
    """
    n = alpha.dim
    b2_of = _norm_sq_fn(alpha, beta)

    def acomp(X):
        A = alpha.components(X)
        w = 1.0 - b2_of(X)
        w2 = w * w
        return [[w2 * A[i][j] for j in range(n)] for i in range(n)]

    def bcomp(X):
        B = beta.components(X)
        root = sqrt(1.0 - b2_of(X))
        return [root * B[i] for i in range(n)]

    def domain(x):
        return alpha.domain(x) and float(b2_of([float(v) for v in x])) < 1.0

    def norm2(X):
        w = b2_of(X)
        return w / (1.0 - w)

    return (
        RiemannMetric(n, acomp, f"conformal({alpha.name})", domain, alpha.sample_box),
        OneFormField(n, bcomp, f"conformal({beta.name})", norm_squared=norm2),
    )


def from_conformal_pair(alpha_c: RiemannMetric, beta_c: OneFormField) -> tuple[RiemannMetric, OneFormField]:
    """Inverse of to_conformal_pair: a_ij = (1 + v^2)^2 u_ij, b_i = sqrt(1 + v^2) v_i."""
    n = alpha_c.dim
    v2_of = _norm_sq_fn(alpha_c, beta_c)

    def acomp(X):
        A = alpha_c.components(X)
        w = 1.0 + v2_of(X)
        w2 = w * w
        return [[w2 * A[i][j] for j in range(n)] for i in range(n)]

    def bcomp(X):
        B = beta_c.components(X)
        root = sqrt(1.0 + v2_of(X))
        return [root * B[i] for i in range(n)]

    def norm2(X):
        w = v2_of(X)
        return w / (1.0 + w)

    return (
        RiemannMetric(n, acomp, f"inv-conformal({alpha_c.name})", alpha_c.domain, alpha_c.sample_box),
        OneFormField(n, bcomp, f"inv-conformal({beta_c.name})", norm_squared=norm2),
    )


def to_reduced_pair(alpha: RiemannMetric, beta: OneFormField) -> tuple[RiemannMetric, OneFormField]:
    """(w, z) with w_ij = (1 - b^2)^3 (a_ij - b_i b_j), z_i = (1 - b^2)^2 b_i.

    The z-norm with respect to w equals b^2 again.  Requires b < 1.
    """
    n = alpha.dim
    b2_of = _norm_sq_fn(alpha, beta)

    def acomp(X):
        A = alpha.components(X)
        B = beta.components(X)
        w = 1.0 - b2_of(X)
        w3 = w * w * w
        return [[w3 * (A[i][j] - B[i] * B[j]) for j in range(n)] for i in range(n)]

    def bcomp(X):
        B = beta.components(X)
        w = 1.0 - b2_of(X)
        w2 = w * w
        return [w2 * B[i] for i in range(n)]

    def domain(x):
        return alpha.domain(x) and float(b2_of([float(v) for v in x])) < 1.0

    return (
        RiemannMetric(n, acomp, f"reduced({alpha.name})", domain, alpha.sample_box),
        OneFormField(n, bcomp, f"reduced({beta.name})", norm_squared=b2_of),
    )


def from_reduced_pair(alpha_r: RiemannMetric, beta_r: OneFormField) -> tuple[RiemannMetric, OneFormField]:
    """Inverse of to_reduced_pair:

        a_ij = (1 - z^2)^{-4} [ (1 - z^2) w_ij + z_i z_j ],
        b_i  = (1 - z^2)^{-2} z_i,

    where z^2 is the w-norm of z.  Requires z < 1.
    """
    n = alpha_r.dim
    z2_of = _norm_sq_fn(alpha_r, beta_r)

    def acomp(X):
        A = alpha_r.components(X)
        B = beta_r.components(X)
        w = 1.0 - z2_of(X)
        w4 = (w * w) * (w * w)
        return [[(w * A[i][j] + B[i] * B[j]) / w4 for j in range(n)] for i in range(n)]

    def bcomp(X):
        B = beta_r.components(X)
        w = 1.0 - z2_of(X)
        w2 = w * w
        return [B[i] / w2 for i in range(n)]

    def domain(x):
        return alpha_r.domain(x) and float(z2_of([float(v) for v in x])) < 1.0

    # the reduced deformation preserves the norm, so the recovered b has
    # b^2 = z^2 (contract a^{-1} = (1-z^2)^3 [w^{-1} - z# z#] with b)
    return (
        RiemannMetric(n, acomp, f"inv-reduced({alpha_r.name})", domain, alpha_r.sample_box),
        OneFormField(n, bcomp, f"inv-reduced({beta_r.name})", norm_squared=z2_of),
    )


def square_from_reduced_pair(alpha_r: RiemannMetric, beta_r: OneFormField,
                             name: str = "") -> GeneralABMetric:
    """The square metric expressed directly over a reduced pair."""
    return GeneralABMetric(alpha_r, beta_r, phi_library()["square-reduced"],
                           name or f"square-over({alpha_r.name})")


def f_square_three_ways(alpha: RiemannMetric, beta: OneFormField, x, y) -> tuple[float, float, float]:
    """F(x, y) as (alpha + beta)^2/alpha and through both deformed pairs."""
    X = [float(v) for v in x]
    Y = [float(v) for v in y]
    lib = phi_library()
    f_plain = f_value(GeneralABMetric(alpha, beta, lib["square"]), X, Y)
    ac, bc = to_conformal_pair(alpha, beta)
    f_conf = f_value(GeneralABMetric(ac, bc, lib["square-conformal"]), X, Y)
    ar, br = to_reduced_pair(alpha, beta)
    f_red = f_value(GeneralABMetric(ar, br, lib["square-reduced"]), X, Y)
    return float(f_plain), float(f_conf), float(f_red)


# -- Einstein certificates -------------------------------------------------------


@dataclass(frozen=True)
class EinsteinCertificate:
    """Outcome of one characterization check over a sample set."""

    name: str
    constant: float
    residuals: dict[str, ResidualStat]
    samples_used: int
    samples_skipped: int

    @property
    def passed(self) -> bool:
        return self.samples_used > 0 and all(r.passed for r in self.residuals.values())

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "constant": float(self.constant),
            "samples_used": self.samples_used,
            "samples_skipped": self.samples_skipped,
            "passed": self.passed,
            "residuals": {k: v.to_json() for k, v in sorted(self.residuals.items())},
        }


class InsufficientSamplesError(ValueError):
    """Fewer than two usable samples survived the domain filters."""


_SQUARE_TOL = {
    "covariant": 1e-8,
    "alpha-ricci": 1e-8,
    "finsler-ricci": 1e-6,
    "constancy": 1e-8,
}


def _default_directions(points: np.ndarray) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(key=97))
    return rng.uniform(-1.0, 1.0, points.shape)


def _usable(alpha, beta, points, b_cap):
    used, skipped = [], 0
    for x in np.asarray(points, float):
        if not alpha.domain(x):
            skipped += 1
            continue
        b2 = float(one_form_norm_sq(alpha, beta, [float(v) for v in x]))
        if b2 >= b_cap * b_cap:
            skipped += 1
            continue
        used.append(x)
    return used, skipped


def _covariant_shape(bd) -> np.ndarray:
    """(1 - b^2) [ (1 + 2 b^2) a_ij - 3 b_i b_j ], the common right-hand shape."""
    return (1.0 - bd.b2) * ((1.0 + 2.0 * bd.b2) * bd.a - 3.0 * np.outer(bd.b_lower, bd.b_lower))


def check_einstein_square(alpha: RiemannMetric, beta: OneFormField, points,
                          directions=None, tolerances: Optional[dict] = None,
                          b_cap: float = 0.95) -> EinsteinCertificate:
    """Constant-scale Einstein characterization of F = (alpha + beta)^2/alpha.

    Fits one constant c to b_{i|j} = c (1-b^2)[(1+2b^2) a - 3 b b] over the
    usable samples, then reports residuals of that equation, of the matching
    Ricci-tensor equation on alpha, and of Finsler Ricci-flatness of F at one
    flag per sample.  Samples outside the chart or with b >= b_cap are
    skipped and counted.
    """
    tol = dict(_SQUARE_TOL)
    tol.update(tolerances or {})
    points = np.asarray(points, float)
    if directions is None:
        directions = _default_directions(points)
    used, skipped = _usable(alpha, beta, points, b_cap)
    if len(used) < 2:
        raise InsufficientSamplesError(
            f"{alpha.name}: only {len(used)} usable samples out of {len(points)}")

    n = alpha.dim
    data = [beta_derivatives(alpha, beta, x) for x in used]
    shapes = [_covariant_shape(bd) for bd in data]
    num = sum(float(np.sum(bd.bij * m)) for bd, m in zip(data, shapes))
    den = sum(float(np.sum(m * m)) for m in shapes)
    c = num / den if den > 1e-30 else 0.0

    cov, aric, fric = [], [], []
    metric = square_metric(alpha, beta)
    dirs = np.asarray(directions, float)
    for k, (x, bd, m) in enumerate(zip(used, data, shapes)):
        scale = 1.0 + np.max(np.abs(bd.bij)) + abs(c) * np.max(np.abs(m))
        cov.append(np.max(np.abs(bd.bij - c * m)) / scale)
        ric = ricci_tensor(alpha, x)
        coef = c * c * (1.0 - bd.b2) ** 2
        expect = coef * (-(5.0 * (n - 1) + 2.0 * (2 * n - 5) * bd.b2) * bd.a
                         + 6.0 * (n - 2) * np.outer(bd.b_lower, bd.b_lower))
        aric.append(np.max(np.abs(ric - expect)) / (1.0 + np.max(np.abs(ric)) + np.max(np.abs(expect))))
        y = dirs[k % len(dirs)]
        f2 = float(f_value(metric, [float(v) for v in x], [float(v) for v in y])) ** 2
        fric.append(abs(ricci(metric, x, y)) / f2)

    residuals = {
        "covariant": residual_stat("covariant", cov, tol["covariant"]),
        "alpha-ricci": residual_stat("alpha-ricci", aric, tol["alpha-ricci"]),
        "finsler-ricci": residual_stat("finsler-ricci", fric, tol["finsler-ricci"]),
    }
    return EinsteinCertificate(name=f"einstein-square({alpha.name})", constant=c,
                               residuals=residuals, samples_used=len(used),
                               samples_skipped=skipped)


def _tau(bd, n: int) -> float:
    """Pointwise scale from the trace of b_{i|j} = tau [(1+2b^2) a - 3 b b]."""
    den = (1.0 + 2.0 * bd.b2) * n - 3.0 * bd.b2
    return float(np.sum(bd.ainv * bd.bij)) / den


def check_einstein_scale_system(alpha: RiemannMetric, beta: OneFormField, points,
                                tolerances: Optional[dict] = None,
                                b_cap: float = 0.95, step: float = 1e-3) -> EinsteinCertificate:
    """Pointwise-scale form of the characterization.

    At each sample the scale tau(x) is recovered from the trace of
    b_{i|j} = tau(x) [(1+2b^2) a - 3 b b] / ... rewritten with
    tau = c (1-b^2); the checks are the covariant equation with that tau,
    the gradient law tau_i = -2 tau^2 b_i (differentiated numerically), and
    constancy of c = tau / (1-b^2) across samples.
    """
    tol = {"covariant": 1e-8, "gradient": 1e-6, "constancy": 1e-8}
    tol.update(tolerances or {})
    points = np.asarray(points, float)
    used, skipped = _usable(alpha, beta, points, b_cap)
    if len(used) < 2:
        raise InsufficientSamplesError(
            f"{alpha.name}: only {len(used)} usable samples out of {len(points)}")
    n = alpha.dim

    def tau_at(x):
        return _tau(beta_derivatives(alpha, beta, x), n)

    cov, grad, consts = [], [], []
    for x in used:
        bd = beta_derivatives(alpha, beta, x)
        t = _tau(bd, n)
        m = (1.0 + 2.0 * bd.b2) * bd.a - 3.0 * np.outer(bd.b_lower, bd.b_lower)
        rhs = t * m
        scale = 1.0 + np.max(np.abs(bd.bij)) + np.max(np.abs(rhs))
        cov.append(np.max(np.abs(bd.bij - rhs)) / scale)
        for i in range(n):
            e = np.zeros(n)
            e[i] = step
            d1 = (tau_at(x + e) - tau_at(x - e)) / (2.0 * step)
            d2 = (tau_at(x + 0.5 * e) - tau_at(x - 0.5 * e)) / step
            ti = (4.0 * d2 - d1) / 3.0
            grad.append(abs(ti + 2.0 * t * t * bd.b_lower[i]) / (1.0 + abs(ti)))
        consts.append(t / (1.0 - bd.b2))
    cmean = float(np.mean(consts))
    cdev = [abs(v - cmean) / (1.0 + abs(cmean)) for v in consts]

    residuals = {
        "covariant": residual_stat("covariant", cov, tol["covariant"]),
        "gradient": residual_stat("gradient", grad, tol["gradient"]),
        "constancy": residual_stat("constancy", cdev, tol["constancy"]),
    }
    return EinsteinCertificate(name=f"einstein-scale({alpha.name})", constant=cmean,
                               residuals=residuals, samples_used=len(used),
                               samples_skipped=skipped)


def check_closedness(alpha: RiemannMetric, beta: OneFormField, points,
                     directions=None, tolerance: float = 1e-10) -> EinsteinCertificate:
    """beta must be closed: s_ij = 0, hence s^k_0 s_{k0} = 0 along any y."""
    points = np.asarray(points, float)
    if directions is None:
        directions = _default_directions(points)
    dirs = np.asarray(directions, float)
    used, skipped = _usable(alpha, beta, points, b_cap=1.0)
    if len(used) < 2:
        raise InsufficientSamplesError(f"{alpha.name}: too few usable samples")
    skew, contr = [], []
    for k, x in enumerate(used):
        bd = beta_derivatives(alpha, beta, x)
        skew.append(np.max(np.abs(bd.s)) / (1.0 + np.max(np.abs(bd.bij))))
        y = dirs[k % len(dirs)]
        s_low = bd.s0_lower(y)
        contr.append(abs(float(bd.s0_upper(y) @ s_low)) / (1.0 + float(y @ bd.a @ y)))
    residuals = {
        "skew": residual_stat("skew", skew, tolerance),
        "skew-contraction": residual_stat("skew-contraction", contr, tolerance),
    }
    return EinsteinCertificate(name=f"closedness({beta.name})", constant=0.0,
                               residuals=residuals, samples_used=len(used),
                               samples_skipped=skipped)


def check_conformal_pair(alpha_c: RiemannMetric, beta_c: OneFormField, points,
                         tolerances: Optional[dict] = None) -> EinsteinCertificate:
    """Einstein conditions in conformal-pair form.

    Fits c to v_{i|j} = c sqrt(1 + v^2) u_ij, then checks that equation and
    Ric(u) = -(n-1) c^2 u (an Einstein metric of negative constant -c^2).
    """
    tol = {"covariant": 1e-8, "einstein": 1e-8}
    tol.update(tolerances or {})
    points = np.asarray(points, float)
    used, skipped = _usable(alpha_c, beta_c, points, b_cap=np.inf)
    if len(used) < 2:
        raise InsufficientSamplesError(f"{alpha_c.name}: too few usable samples")
    n = alpha_c.dim
    data = [beta_derivatives(alpha_c, beta_c, x) for x in used]
    shapes = [math.sqrt(1.0 + bd.b2) * bd.a for bd in data]
    num = sum(float(np.sum(bd.bij * m)) for bd, m in zip(data, shapes))
    den = sum(float(np.sum(m * m)) for m in shapes)
    c = num / den if den > 1e-30 else 0.0
    cov, ein = [], []
    for x, bd, m in zip(used, data, shapes):
        scale = 1.0 + np.max(np.abs(bd.bij)) + abs(c) * np.max(np.abs(m))
        cov.append(np.max(np.abs(bd.bij - c * m)) / scale)
        ric = ricci_tensor(alpha_c, x)
        expect = -(n - 1) * c * c * bd.a
        ein.append(np.max(np.abs(ric - expect)) / (1.0 + np.max(np.abs(ric)) + np.max(np.abs(expect))))
    residuals = {
        "covariant": residual_stat("covariant", cov, tol["covariant"]),
        "einstein": residual_stat("einstein", ein, tol["einstein"]),
    }
    return EinsteinCertificate(name=f"conformal-pair({alpha_c.name})", constant=c,
                               residuals=residuals, samples_used=len(used),
                               samples_skipped=skipped)


def check_reduced_pair(alpha_r: RiemannMetric, beta_r: OneFormField, points,
                       tolerances: Optional[dict] = None) -> EinsteinCertificate:
    """Einstein conditions in reduced-pair form: Ric(w) = 0, z_{i|j} = c w_ij."""
    tol = {"homothety": 1e-8, "ricci-flat": 1e-8}
    tol.update(tolerances or {})
    points = np.asarray(points, float)
    used, skipped = _usable(alpha_r, beta_r, points, b_cap=np.inf)
    if len(used) < 2:
        raise InsufficientSamplesError(f"{alpha_r.name}: too few usable samples")
    data = [beta_derivatives(alpha_r, beta_r, x) for x in used]
    num = sum(float(np.sum(bd.bij * bd.a)) for bd in data)
    den = sum(float(np.sum(bd.a * bd.a)) for bd in data)
    c = num / den if den > 1e-30 else 0.0
    hom, rflat = [], []
    for x, bd in zip(used, data):
        scale = 1.0 + np.max(np.abs(bd.bij)) + abs(c) * np.max(np.abs(bd.a))
        hom.append(np.max(np.abs(bd.bij - c * bd.a)) / scale)
        ric = ricci_tensor(alpha_r, x)
        rflat.append(np.max(np.abs(ric)) / (1.0 + np.max(np.abs(bd.a))))
    residuals = {
        "homothety": residual_stat("homothety", hom, tol["homothety"]),
        "ricci-flat": residual_stat("ricci-flat", rflat, tol["ricci-flat"]),
    }
    return EinsteinCertificate(name=f"reduced-pair({alpha_r.name})", constant=c,
                               residuals=residuals, samples_used=len(used),
                               samples_skipped=skipped)


def deformed_spray_residual(alpha: RiemannMetric, beta: OneFormField, points,
                            directions=None, kind: str = "conformal",
                            tolerance: float = 1e-7) -> EinsteinCertificate:
    """Geodesic sprays of the deformed pair against the closed correction.

    When b_{i|j} = tau(x) [(1+2b^2) a - 3 b b] holds (tau from the trace),
    the deformed sprays differ from the original by a projective-plus-
    gradient term:

        conformal: G_u^i = G^i + tau (alpha^2 b^i - 2 beta y^i)
        reduced:   G_w^i = G^i + tau (alpha^2 b^i - 3 beta y^i)

    Reports the identity residual together with the precondition residual;
    the identity is only meaningful where the precondition is satisfied.
    """
    if kind == "conformal":
        pair = to_conformal_pair(alpha, beta)
        coef = 2.0
    elif kind == "reduced":
        pair = to_reduced_pair(alpha, beta)
        coef = 3.0
    else:
        raise ValueError(f"unknown deformation kind {kind!r}")
    points = np.asarray(points, float)
    if directions is None:
        directions = _default_directions(points)
    dirs = np.asarray(directions, float)
    used, skipped = _usable(alpha, beta, points, b_cap=0.999)
    if len(used) < 2:
        raise InsufficientSamplesError(f"{alpha.name}: too few usable samples")
    n = alpha.dim
    ident, precond = [], []
    for k, x in enumerate(used):
        bd = beta_derivatives(alpha, beta, x)
        t = _tau(bd, n)
        m = _covariant_shape(bd) / (1.0 - bd.b2)
        scale = 1.0 + np.max(np.abs(bd.bij)) + abs(t) * np.max(np.abs(m))
        precond.append(np.max(np.abs(bd.bij - t * m)) / scale)
        y = dirs[k % len(dirs)]
        g0 = geodesic_spray(alpha, x, y)
        gd = geodesic_spray(pair[0], x, y)
        a2 = float(y @ bd.a @ y)
        be = float(bd.b_lower @ y)
        rhs = g0 + t * (a2 * bd.b_upper - coef * be * y)
        ident.append(np.max(np.abs(gd - rhs)) / (1.0 + np.max(np.abs(gd))))
    residuals = {
        "identity": residual_stat("identity", ident, tolerance),
        "precondition": residual_stat("precondition", precond, 1e-8),
    }
    return EinsteinCertificate(name=f"spray-{kind}({alpha.name})", constant=0.0,
                               residuals=residuals, samples_used=len(used),
                               samples_skipped=skipped)


def norm_identity_residuals(alpha: RiemannMetric, beta: OneFormField, x) -> dict[str, float]:
    """Pointwise norm bookkeeping for both deformations:

        conformal: v^2 = b^2/(1-b^2) and (1+v^2)(1-b^2) = 1
        reduced:   z^2 = b^2

    computed generically (no shortcut) so the component formulas are what
    is actually being tested.
    """
    X = [float(v) for v in x]
    b2 = float(one_form_norm_sq(alpha, beta, X))
    ac, bc = to_conformal_pair(alpha, beta)
    ar, br = to_reduced_pair(alpha, beta)
    v2 = float(_generic_norm_sq(ac, bc, X))
    z2 = float(_generic_norm_sq(ar, br, X))
    return {
        "conformal-norm": abs(v2 - b2 / (1.0 - b2)),
        "conformal-product": abs((1.0 + v2) * (1.0 - b2) - 1.0),
        "reduced-norm": abs(z2 - b2),
    }


def _generic_norm_sq(alpha: RiemannMetric, beta: OneFormField, X):
    A = alpha.components(X)
    B = beta.components(X)
    v = linalg.solve(A, list(B))
    return linalg.dot(list(B), v)
