"""Finite-difference Chern curvature of a Kähler metric given in coordinates.

For a Kähler metric ``g`` the curvature in a holomorphic coordinate frame is

    R[j,k,l,m] = -d_l dbar_m g[j,k] + sum_{p,q} (d_l g)[j,q] g^{-1}[q,p] (dbar_m g)[p,k]

with the sign fixed so that Fubini–Study has holomorphic sectional curvature +2.
Derivatives come from central differences in the real and imaginary parts of
each coordinate, recombined as Wirtinger derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import finite_diff as fd
from .metrics import BlowupChart, MetricModel, blowup_metric, chart_embedding, fubini_study
from .tensors import (
    NotPositiveDefiniteError,
    as_direction,
    contract_4,
    hermitian_inverse,
    norm_sq,
    orthonormal_frame,
    pullback_4,
)

IMAG_TOL = 1e-8


class EngineError(RuntimeError):
    """The numerical curvature computation cannot proceed at the requested point."""


@dataclass(frozen=True)
class DiffScheme:
    step: float = 2e-2
    order: int = 4
    richardson: bool = True

    def __post_init__(self):
        if not 1e-4 <= self.step <= 1e-1:
            raise ValueError(f"step must lie in [1e-4, 1e-1], got {self.step}")
        if self.order not in (2, 4):
            raise ValueError(f"order must be 2 or 4, got {self.order}")

    def halved(self) -> "DiffScheme":
        return DiffScheme(self.step / 2, self.order, self.richardson)

    @property
    def reach(self) -> float:
        """Largest coordinate offset visited, counting a Richardson pass."""
        return self.step * self.order / 2


DEFAULT_SCHEME = DiffScheme()


@dataclass(frozen=True)
class CurvatureResult:
    tensor: np.ndarray
    metric_at_point: np.ndarray
    est_error: float
    point: np.ndarray
    model: str

    @property
    def n(self) -> int:
        return self.metric_at_point.shape[0]


def _checked(model: MetricModel):
    """Wrap ``model`` so every stencil evaluation is domain- and definiteness-checked."""

    def f(points: np.ndarray) -> np.ndarray:
        radii = np.linalg.norm(points, axis=-1)
        if np.any(radii > model.radius + 1e-12):
            worst = points[int(np.argmax(radii))]
            raise EngineError(
                f"{model.describe()}: stencil leaves the chart domain |z| <= {model.radius} "
                f"at z = {np.round(worst, 6).tolist()}"
            )
        g = model.func(points)
        eig_min = np.linalg.eigvalsh(g)[:, 0]
        bad = np.flatnonzero(eig_min <= 0.0)
        if bad.size:
            i = int(bad[0])
            raise EngineError(
                f"{model.describe()}: metric is not positive definite at stencil point "
                f"z = {np.round(points[i], 6).tolist()} (smallest eigenvalue {eig_min[i]:.3e})"
            )
        return g

    return f


def derivatives(f, z: np.ndarray, scheme: DiffScheme) -> fd.RealDerivatives:
    coarse = fd.real_derivatives(f, z, scheme.step, scheme.order)
    if not scheme.richardson:
        return coarse
    fine = fd.real_derivatives(f, z, scheme.step / 2, scheme.order)
    return fd.richardson(coarse, fine, scheme.order)


def _tensor_from_derivatives(d: fd.RealDerivatives, n: int) -> tuple[np.ndarray, np.ndarray]:
    g0 = d.value
    try:
        ginv = hermitian_inverse(g0)
    except NotPositiveDefiniteError as exc:
        raise EngineError(str(exc)) from exc
    dz, dzbar = fd.wirtinger_first(d.grad, n)  # [l, j, k]
    ddbar = fd.wirtinger_mixed(d.hess, n)  # [l, m, j, k]
    second = -ddbar.transpose(2, 3, 0, 1)
    connection = np.einsum("ljq,qp,mpk->jklm", dz, ginv, dzbar)
    return second + connection, g0


def _roundoff_floor(g0: np.ndarray, step: float) -> float:
    return 64 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(g0)))) / step**2


def chern_curvature(model: MetricModel, z=None, scheme: DiffScheme = DEFAULT_SCHEME) -> CurvatureResult:
    """All ``n^4`` curvature components of ``model`` at ``z`` (default: the origin).

    ``est_error`` is the largest component change when the computation is
    repeated at half the step, floored at a roundoff estimate.
    """
    z = np.zeros(model.n, dtype=complex) if z is None else as_direction(z, model.n)
    f = _checked(model)
    tensor, g0 = _tensor_from_derivatives(derivatives(f, z, scheme), model.n)
    tensor_half, _ = _tensor_from_derivatives(derivatives(f, z, scheme.halved()), model.n)
    diff = float(np.max(np.abs(tensor - tensor_half)))
    est = max(diff, _roundoff_floor(g0, scheme.step))
    return CurvatureResult(tensor, g0, est, z, model.describe())


def hsc_numeric(result: CurvatureResult, v) -> float:
    """Holomorphic sectional curvature ``R(v, v, v, v) / |v|^4``."""
    v = as_direction(v, result.n)
    if not np.any(v):
        raise ValueError("holomorphic sectional curvature needs a nonzero direction")
    num = contract_4(result.tensor, v, v, v, v)
    den = norm_sq(result.metric_at_point, v) ** 2
    val = num / den
    if abs(val.imag) > IMAG_TOL * max(1.0, abs(val.real)):
        raise EngineError(f"HSC has imaginary part {val.imag:.3e}; tensor is not Hermitian")
    return val.real


def ricci_matrix(result: CurvatureResult, frame: str = "cholesky") -> np.ndarray:
    """``ric[j, k] = sum_i R(d_j, conj d_k, v_i, conj v_i)`` over an orthonormal frame."""
    v = orthonormal_frame(result.metric_at_point, frame)
    return np.einsum("jklm,li,mi->jk", result.tensor, v, np.conj(v))


def ricci_numeric(result: CurvatureResult, a, b, frame: str = "cholesky") -> complex:
    a, b = as_direction(a, result.n), as_direction(b, result.n)
    return complex(a @ ricci_matrix(result, frame) @ np.conj(b))


def scalar_numeric(result: CurvatureResult, frame: str = "cholesky") -> float:
    v = orthonormal_frame(result.metric_at_point, frame)
    s = complex(np.einsum("jk,ji,ki->", ricci_matrix(result, frame), v, np.conj(v)))
    if abs(s.imag) > IMAG_TOL * max(1.0, abs(s.real)):
        raise EngineError(f"scalar curvature has imaginary part {s.imag:.3e}")
    return s.real


# --- second fundamental form of the blowup chart inside C^n x C^(n-1) -------------


@dataclass(frozen=True)
class SecondFundamentalForm:
    """Normal parts of ambient covariant derivatives of chart frame fields at ``w = 0``.

    ``vectors[i, k]`` is the ambient vector ``pi_N(D_{xi_i} xi_k)``;
    ``jacobian`` is the embedding Jacobian and ``ambient_metric`` the ambient
    metric at the image of the origin.
    """

    vectors: np.ndarray
    jacobian: np.ndarray
    ambient_metric: np.ndarray
    normal_residual: float

    def __call__(self, a, g) -> np.ndarray:
        n = self.jacobian.shape[1]
        a, g = as_direction(a, n), as_direction(g, n)
        full = np.einsum("i,k,ikA->A", a, g, self.vectors)
        return full[: n - 1]

    def inner_tensor(self) -> np.ndarray:
        """``Q[j,k,l,m] = <sigma(xi_j, xi_l), sigma(xi_k, xi_m)>`` in the ambient metric."""
        return np.einsum("jlA,AB,kmB->jklm", self.vectors, self.ambient_metric, np.conj(self.vectors))


def second_fundamental_form(chart: BlowupChart, scheme: DiffScheme = DEFAULT_SCHEME) -> SecondFundamentalForm:
    n = chart.n
    w0 = np.zeros(n, dtype=complex)
    emb = derivatives(chart_embedding, w0, scheme)
    jac = fd.wirtinger_first(emb.grad, n)[0].T  # (2n-1, n)
    hol2 = fd.wirtinger_holomorphic(emb.hess, n)  # [i, k, A] = d_i d_k Phi^A

    p0 = emb.value
    amb = derivatives(_checked(chart.ambient), p0, scheme)
    big_g = amb.value
    dG = fd.wirtinger_first(amb.grad, 2 * n - 1)[0]  # [A, B, D] = d_A g[B, D]
    ginv = hermitian_inverse(big_g)
    christoffel = np.einsum("ABD,DC->ABC", dG, ginv)  # D_{d_A} d_B = sum_C Gamma[A,B,C] d_C

    # D_{xi_i} xi_k for the frame fields xi_k = d Phi / d w_k extended along the chart
    cov = hol2 + np.einsum("Ai,Bk,ABC->ikC", jac, jac, christoffel)

    # Orthogonal projection onto the tangent space spanned by the columns of jac
    gram = jac.T @ big_g @ np.conj(jac)
    rhs = np.einsum("ikA,AB,Bj->ikj", cov, big_g, np.conj(jac))
    coeffs = np.linalg.solve(gram.T[None, None], rhs[..., None])[..., 0]
    normal = cov - np.einsum("ikj,Aj->ikA", coeffs, jac)
    residual = float(np.max(np.abs(normal[..., n - 1 :]))) if normal.size else 0.0
    return SecondFundamentalForm(normal, jac, big_g, residual)


def second_fundamental_form_numeric(n: int, t: float, c: float, a, g, scheme: DiffScheme = DEFAULT_SCHEME) -> np.ndarray:
    """Components of ``sigma(a, g)`` along ``e_1, ..., e_{n-1}`` at the chart origin."""
    return second_fundamental_form(blowup_metric(n, t, c), scheme)(a, g)


@dataclass(frozen=True)
class GaussReport:
    n: int
    t: float
    c: float
    induced: np.ndarray
    assembled: np.ndarray
    max_discrepancy: float
    est_error: float

    def passed(self, tol: float) -> bool:
        return self.max_discrepancy <= tol


def gauss_check(
    n: int,
    t: float,
    c: float,
    scheme: DiffScheme = DEFAULT_SCHEME,
    chart: BlowupChart | None = None,
    induced: CurvatureResult | None = None,
) -> GaussReport:
    """Compare the chart curvature with ``p1*R_h + t p2*R_FS - <sigma, sigma>``.

    Each piece on the right is computed numerically on its own: the base and
    Fubini–Study curvatures at their origins, pulled back through the
    embedding Jacobian, and the second fundamental form from the ambient
    connection.
    """
    chart = chart if chart is not None else blowup_metric(n, t, c)
    induced = induced if induced is not None else chern_curvature(chart.induced_metric, None, scheme)
    sff = second_fundamental_form(chart, scheme)
    base = chern_curvature(chart.base, None, scheme)
    fs = chern_curvature(fubini_study(n - 1), None, scheme)
    jac = sff.jacobian
    assembled = (
        pullback_4(base.tensor, jac[:n])
        + chart.t * pullback_4(fs.tensor, jac[n:])
        - sff.inner_tensor()
    )
    disc = float(np.max(np.abs(induced.tensor - assembled)))
    est = induced.est_error + base.est_error + chart.t * fs.est_error
    return GaussReport(n, chart.t, chart.c, induced.tensor, assembled, disc, est)
