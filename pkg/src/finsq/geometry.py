"""Riemannian machinery on coordinate charts.

Metrics and one-forms are plain component callables: they accept a sequence
of scalars (floats or jets) and return nested lists of the same scalar kind.
Everything downstream (Christoffel symbols, geodesic spray, Ricci, covariant
derivatives) differentiates them by seeding jets, so a chart is usable as
long as its components are built from ring operations and square roots.

Index conventions: christoffels(alpha, x)[i][j][k] is Gamma^i_{jk}; the
covariant derivative of a one-form is b_{i|j} = d_j b_i - Gamma^k_{ij} b_k;
the Ricci sign makes the round sphere positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import linalg
from .jets import DerivativeSpec, Jet, seed, seed_pair

Scalar = Union[float, Jet]
Components = Callable[[Sequence[Scalar]], list]


class ChartError(ValueError):
    """Metric components violate symmetry or positive definiteness."""


@dataclass(frozen=True)
class RiemannMetric:
    """Riemannian metric given by chart components a_ij(x)."""

    dim: int
    components: Components
    name: str = "metric"
    domain: Callable[[np.ndarray], bool] = field(default=lambda x: True)
    sample_box: Optional[tuple[tuple[float, float], ...]] = None

    def matrix(self, x: Sequence[float]) -> np.ndarray:
        """Component matrix at a float point."""
        A = self.components([float(v) for v in x])
        return np.array([[_val(A[i][j]) for j in range(self.dim)] for i in range(self.dim)])


@dataclass(frozen=True)
class OneFormField:
    """One-form b_i(x) dx^i on the chart of an accompanying metric.

    norm_squared, when provided, is a closed form for b^2 = a^{ij} b_i b_j
    and must agree with the solve-based evaluation; it exists because b^2
    sits inside deformed metric components on hot paths.
    """

    dim: int
    components: Components
    name: str = "one-form"
    norm_squared: Optional[Callable[[Sequence[Scalar]], Scalar]] = None


def _val(s) -> float:
    return float(s.value) if isinstance(s, Jet) else float(s)


def _dx(s, unit: tuple[int, ...]) -> float:
    return float(s.partial(unit)) if isinstance(s, Jet) else 0.0


def _unit(n: int, *vars_: int) -> tuple[int, ...]:
    m = [0] * n
    for v in vars_:
        m[v] += 1
    return tuple(m)


# -- chart validation --------------------------------------------------------


def validate_chart(alpha: RiemannMetric, points: Sequence[Sequence[float]]) -> None:
    """Raise ChartError if components are asymmetric or not positive definite."""
    for x in points:
        A = alpha.matrix(x)
        if A.shape != (alpha.dim, alpha.dim):
            raise ChartError(f"{alpha.name}: component shape {A.shape} at {tuple(x)}")
        scale = float(np.max(np.abs(A))) or 1.0
        if float(np.max(np.abs(A - A.T))) > 1e-12 * scale:
            raise ChartError(f"{alpha.name}: non-symmetric components at {tuple(x)}")
        if float(np.linalg.eigvalsh(A)[0]) <= 0.0:
            raise ChartError(f"{alpha.name}: not positive definite at {tuple(x)}")


# -- connection and curvature -------------------------------------------------


def christoffels(alpha: RiemannMetric, x: Sequence[float]) -> np.ndarray:
    """Christoffel symbols Gamma^i_{jk} at a point, shape (n, n, n)."""
    n = alpha.dim
    X = seed(x, np.eye(n), 1)
    A = alpha.components(X)
    a0 = np.array([[_val(A[i][j]) for j in range(n)] for i in range(n)])
    dA = np.array(
        [[[_dx(A[i][j], _unit(n, l)) for l in range(n)] for j in range(n)] for i in range(n)]
    )  # dA[i][j][l] = d a_ij / d x^l
    ainv = np.linalg.inv(a0)
    gamma = np.empty((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                acc = 0.0
                for l in range(n):
                    acc += ainv[i, l] * (dA[l, j, k] + dA[l, k, j] - dA[j, k, l])
                gamma[i, j, k] = 0.5 * acc
    return gamma


def geodesic_spray(alpha: RiemannMetric, x: Sequence[float], y: Sequence[float]) -> np.ndarray:
    """Spray coefficients G^i = (1/4) a^{il} ([a^2]_{x^k y^l} y^k - [a^2]_{x^l}).

    This differentiates the energy alpha^2(x, y) directly, which is the same
    route the Finsler spray uses; christoffel assembly is the cross-check.
    """
    n = alpha.dim
    X, Y = seed_pair(x, y, DerivativeSpec(1, 1))
    A = alpha.components(X)
    e2 = linalg.quadratic_form(A, list(Y))
    nv = 2 * n
    grad_x = np.array([_dx(e2, _unit(nv, l)) for l in range(n)])
    mixed = np.array(
        [[_dx(e2, _unit(nv, k, n + l)) for l in range(n)] for k in range(n)]
    )  # mixed[k][l] = [a^2]_{x^k y^l}
    a0 = np.array([[_val(A[i][j]) for j in range(n)] for i in range(n)])
    rhs = mixed.T @ np.asarray(y, float) - grad_x
    return 0.25 * np.linalg.solve(a0, rhs)


def spray_from_christoffels(alpha: RiemannMetric, x, y) -> np.ndarray:
    y = np.asarray(y, float)
    return 0.5 * np.einsum("ijk,j,k->i", christoffels(alpha, x), y, y)


def ricci_tensor(alpha: RiemannMetric, x: Sequence[float]) -> np.ndarray:
    """Ricci tensor by the classical curvature contraction.

    Ric_jk = d_l Gamma^l_{jk} - d_k Gamma^l_{jl}
             + Gamma^l_{lm} Gamma^m_{jk} - Gamma^l_{km} Gamma^m_{jl}

    Independent of the spray-based curvature path: only Christoffel symbols
    and their first x-derivatives enter, via second-order jets of a_ij.
    """
    n = alpha.dim
    X = seed(x, np.eye(n), 2)
    A = alpha.components(X)
    A = [[A[i][j] if isinstance(A[i][j], Jet) else Jet.constant(X[0].space, A[i][j]) for j in range(n)] for i in range(n)]
    Ainv = linalg.inverse(A)
    dA = [[[A[i][j].derivative(l) for l in range(n)] for j in range(n)] for i in range(n)]
    gamma_jets = [[[None] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(j, n):
                acc = None
                for l in range(n):
                    term = dA[l][j][k] + dA[l][k][j] - dA[j][k][l]
                    contrib = Ainv[i][l] * term
                    acc = contrib if acc is None else acc + contrib
                g = 0.5 * acc
                gamma_jets[i][j][k] = g
                gamma_jets[i][k][j] = g
    g0 = np.array([[[_val(gamma_jets[i][j][k]) for k in range(n)] for j in range(n)] for i in range(n)])
    dg = np.array(
        [[[[_dx(gamma_jets[i][j][k], _unit(n, l)) for l in range(n)] for k in range(n)] for j in range(n)] for i in range(n)]
    )  # dg[i][j][k][l] = d Gamma^i_{jk} / d x^l
    ric = np.empty((n, n))
    for j in range(n):
        for k in range(n):
            t1 = sum(dg[l, j, k, l] for l in range(n))
            t2 = sum(dg[l, j, l, k] for l in range(n))
            t3 = sum(g0[l, l, m] * g0[m, j, k] for l in range(n) for m in range(n))
            t4 = sum(g0[l, k, m] * g0[m, j, l] for l in range(n) for m in range(n))
            ric[j, k] = t1 - t2 + t3 - t4
    return 0.5 * (ric + ric.T)


def ricci_curvature(alpha: RiemannMetric, x, y) -> float:
    """Ricci curvature Ric(y, y) of the metric at (x, y)."""
    y = np.asarray(y, float)
    return float(y @ ricci_tensor(alpha, x) @ y)


# -- one-form calculus ---------------------------------------------------------


def covariant_derivative(alpha: RiemannMetric, beta: OneFormField, x) -> np.ndarray:
    """b_{i|j} with respect to alpha's Levi-Civita connection, shape (n, n)."""
    n = alpha.dim
    X = seed(x, np.eye(n), 1)
    B = beta.components(X)
    db = np.array([[_dx(B[i], _unit(n, j)) for j in range(n)] for i in range(n)])
    b0 = np.array([_val(B[i]) for i in range(n)])
    gamma = christoffels(alpha, x)
    return db - np.einsum("kij,k->ij", gamma, b0)


@dataclass(frozen=True)
class BetaDerivatives:
    """Covariant derivative of a one-form split into symmetric and skew parts.

    r_ij = (b_{i|j} + b_{j|i}) / 2,  s_ij = (b_{i|j} - b_{j|i}) / 2, with the
    metric data needed for the standard contractions against y and b.
    """

    a: np.ndarray
    ainv: np.ndarray
    b_lower: np.ndarray
    b_upper: np.ndarray
    b2: float
    bij: np.ndarray
    r: np.ndarray
    s: np.ndarray

    def r00(self, y) -> float:
        y = np.asarray(y, float)
        return float(y @ self.r @ y)

    def r0(self, y) -> np.ndarray:
        return self.r @ np.asarray(y, float)

    def s0_lower(self, y) -> np.ndarray:
        """s_{i0} = s_ij y^j."""
        return self.s @ np.asarray(y, float)

    def s0_upper(self, y) -> np.ndarray:
        """s^i_0 = a^{ij} s_{jk} y^k."""
        return self.ainv @ self.s0_lower(y)

    def s0(self, y) -> float:
        """s_0 = b^i s_{i0}."""
        return float(self.b_upper @ self.s0_lower(y))

    def trace_r(self) -> float:
        """a^{ij} r_ij = a^{ij} b_{i|j} (the skew part is traceless)."""
        return float(np.sum(self.ainv * self.r))


def beta_derivatives(alpha: RiemannMetric, beta: OneFormField, x) -> BetaDerivatives:
    n = alpha.dim
    a = alpha.matrix(x)
    ainv = np.linalg.inv(a)
    b_lower = np.array([_val(c) for c in beta.components([float(v) for v in x])])
    b_upper = ainv @ b_lower
    bij = covariant_derivative(alpha, beta, x)
    r = 0.5 * (bij + bij.T)
    s = 0.5 * (bij - bij.T)
    return BetaDerivatives(
        a=a, ainv=ainv, b_lower=b_lower, b_upper=b_upper,
        b2=float(b_lower @ b_upper), bij=bij, r=r, s=s,
    )


def one_form_norm_sq(alpha: RiemannMetric, beta: OneFormField, X: Sequence[Scalar]) -> Scalar:
    """b^2 = a^{ij} b_i b_j as a scalar (jet-valued when X are jets)."""
    if beta.norm_squared is not None:
        return beta.norm_squared(X)
    A = alpha.components(X)
    B = beta.components(X)
    v = linalg.solve(A, list(B))
    return linalg.dot(list(B), v)


def one_form_norm(alpha: RiemannMetric, beta: OneFormField, x) -> float:
    import math

    return math.sqrt(max(0.0, _val(one_form_norm_sq(alpha, beta, [float(v) for v in x]))))


# -- builtin charts ------------------------------------------------------------


def euclidean(n: int) -> RiemannMetric:
    def comp(X):
        return [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]

    return RiemannMetric(dim=n, components=comp, name=f"euclidean-{n}")


def sphere(n: int, kappa: float = 1.0) -> RiemannMetric:
    """Constant curvature kappa > 0 in the stereographic-style chart
    a_ij = delta_ij / (1 + kappa |x|^2 / 4)^2."""
    if kappa <= 0:
        raise ValueError("sphere chart needs kappa > 0")

    def comp(X):
        q = X[0] * X[0]
        for v in X[1:]:
            q = q + v * v
        w = 1.0 + 0.25 * kappa * q
        f = 1.0 / (w * w)
        return [[f if i == j else 0.0 for j in range(n)] for i in range(n)]

    return RiemannMetric(dim=n, components=comp, name=f"sphere-{n}-k{kappa:g}")


def conformal_poly(n: int) -> RiemannMetric:
    """(1 + x_1)^2 delta_ij: a rational conformal chart used as a test oracle."""

    def comp(X):
        w = 1.0 + X[0]
        f = w * w
        return [[f if i == j else 0.0 for j in range(n)] for i in range(n)]

    return RiemannMetric(
        dim=n, components=comp, name=f"conformal-poly-{n}",
        domain=lambda x: 1.0 + x[0] > 0.05,
    )


def zero_form(n: int) -> OneFormField:
    return OneFormField(dim=n, components=lambda X: [0.0] * n, name="zero", norm_squared=lambda X: 0.0)


def gradient_form(n: int, scale: float = 1.0) -> OneFormField:
    """b = scale * x_i dx^i (closed; an exact differential of scale |x|^2 / 2)."""

    def comp(X):
        return [scale * v for v in X]

    return OneFormField(dim=n, components=comp, name=f"gradient-{scale:g}")


def drift_form(n: int, scale: float = 1.0) -> OneFormField:
    """b = scale * x_2 dx^1 (not closed: db = -scale dx^1 ^ dx^2)."""
    if n < 2:
        raise ValueError("drift form needs n >= 2")

    def comp(X):
        out = [0.0] * n
        out[0] = scale * X[1]
        return out

    return OneFormField(dim=n, components=comp, name=f"drift-{scale:g}")


def berwald_data(n: int) -> tuple[RiemannMetric, OneFormField]:
    """The classical chart on the unit ball whose square metric is projectively
    flat with vanishing flag curvature:

    a_ij = [(1 - |x|^2) delta_ij + x_i x_j] / (1 - |x|^2)^4,
    b_i  = x_i / (1 - |x|^2)^2,           with  b(x) = |x|.
    """

    def acomp(X):
        q = X[0] * X[0]
        for v in X[1:]:
            q = q + v * v
        w = 1.0 - q
        w4 = (w * w) * (w * w)
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                e = X[i] * X[j]
                if i == j:
                    e = e + w
                row.append(e / w4)
            out.append(row)
        return out

    def bcomp(X):
        q = X[0] * X[0]
        for v in X[1:]:
            q = q + v * v
        w = 1.0 - q
        w2 = w * w
        return [X[i] / w2 for i in range(n)]

    def bnorm2(X):
        q = X[0] * X[0]
        for v in X[1:]:
            q = q + v * v
        return q

    alpha = RiemannMetric(
        dim=n, components=acomp, name=f"berwald-alpha-{n}",
        domain=lambda x: float(np.dot(x, x)) < 0.9025,
    )
    beta = OneFormField(dim=n, components=bcomp, name=f"berwald-beta-{n}", norm_squared=bnorm2)
    return alpha, beta
