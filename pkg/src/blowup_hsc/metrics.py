"""Local Kähler metrics given as coordinate functions.

Every model maps a batch of points ``z`` of shape ``(m, n)`` to metric
matrices of shape ``(m, n, n)``; single points of shape ``(n,)`` are accepted
too and give a single ``(n, n)`` matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

#: Chart evaluations are confined to this ball so stencils stay clear of chart edges.
CHART_RADIUS = 0.5


@dataclass(frozen=True)
class MetricModel:
    n: int
    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    params: Mapping[str, float] = field(default_factory=dict)
    radius: float = CHART_RADIUS

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.n:
            raise ValueError(f"{self.name}: point has {z.shape[-1]} coordinates, expected {self.n}")
        if z.ndim == 1:
            return self.func(z[None, :])[0]
        return self.func(z)

    def describe(self) -> str:
        args = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}(n={self.n}{', ' + args if args else ''})"


def base_metric(n: int, c: float) -> MetricModel:
    """Normal-coordinate metric with potential ``|x|^2 - (c/4)|x_n|^4``.

    Only ``g[n-1, n-1] = 1 - c|x_n|^2`` varies. At the origin the first
    derivatives vanish and the sole curvature component is
    ``R(e_n, e_n, e_n, e_n) = c``.
    """
    if n < 2:
        raise ValueError(f"base metric needs n >= 2, got {n}")
    c = float(c)

    def g(x: np.ndarray) -> np.ndarray:
        out = np.broadcast_to(np.eye(n, dtype=complex), (x.shape[0], n, n)).copy()
        out[:, n - 1, n - 1] = 1.0 - c * np.abs(x[:, n - 1]) ** 2
        return out

    return MetricModel(n, "base", g, {"c": c})


def perturbed_base_metric(n: int, c: float, k: float) -> MetricModel:
    """Base metric plus ``k |x_1|^2 |x_n|^2`` in the potential.

    Still normal at the origin, but with curvature components beyond
    ``R(e_n, e_n, e_n, e_n) = c`` (for instance ``R(e_1, e_1, e_n, e_n) = -k``).
    """
    if n < 2:
        raise ValueError(f"base metric needs n >= 2, got {n}")
    c, k = float(c), float(k)

    def g(x: np.ndarray) -> np.ndarray:
        x1, xn = x[:, 0], x[:, n - 1]
        out = np.broadcast_to(np.eye(n, dtype=complex), (x.shape[0], n, n)).copy()
        out[:, 0, 0] += k * np.abs(xn) ** 2
        out[:, n - 1, n - 1] += -c * np.abs(xn) ** 2 + k * np.abs(x1) ** 2
        out[:, 0, n - 1] += k * np.conj(x1) * xn
        out[:, n - 1, 0] += k * x1 * np.conj(xn)
        return out

    return MetricModel(n, "perturbed_base", g, {"c": c, "k": k})


def fubini_study(m: int) -> MetricModel:
    """Fubini–Study metric on the affine chart of P^m, potential ``log(1 + |y|^2)``."""
    if m < 1:
        raise ValueError(f"Fubini-Study needs m >= 1, got {m}")

    def g(y: np.ndarray) -> np.ndarray:
        r = 1.0 + np.sum(np.abs(y) ** 2, axis=-1)
        outer = np.einsum("bj,bk->bjk", np.conj(y), y)
        eye = np.eye(m, dtype=complex)[None]
        return eye / r[:, None, None] - outer / (r**2)[:, None, None]

    return MetricModel(m, "fubini_study", g)


def flat_metric(n: int) -> MetricModel:
    return MetricModel(n, "flat", lambda z: np.broadcast_to(np.eye(n, dtype=complex), (z.shape[0], n, n)).copy())


def product_metric(base: MetricModel, t: float, fs: MetricModel | None = None) -> MetricModel:
    """Block metric ``base ⊕ t·FS`` on ``C^n x C^(n-1)`` with coordinates ``(x, y)``."""
    n = base.n
    fs = fs if fs is not None else fubini_study(n - 1)
    m = fs.n

    def g(p: np.ndarray) -> np.ndarray:
        out = np.zeros((p.shape[0], n + m, n + m), dtype=complex)
        out[:, :n, :n] = base.func(p[:, :n])
        out[:, n:, n:] = t * fs.func(p[:, n:])
        return out

    return MetricModel(n + m, "ambient", g, {**base.params, "t": t}, radius=np.inf)


def chart_embedding(w) -> np.ndarray:
    """Map chart coordinates ``(y_1, ..., y_{n-1}, s)`` into ``C^n x C^(n-1)``.

    The image is ``(x, y)`` with ``x = (y_1 s, ..., y_{n-1} s, s)``, which
    satisfies ``x_j y_k = x_k y_j`` (with ``y_n = 1``). Accepts a batch.
    """
    w = np.asarray(w, dtype=complex)
    y, s = w[..., :-1], w[..., -1:]
    return np.concatenate([y * s, s, y], axis=-1)


def embedding_jacobian(w) -> np.ndarray:
    """Holomorphic Jacobian ``d(x, y)/dw``, shape ``(..., 2n-1, n)``."""
    w = np.asarray(w, dtype=complex)
    n = w.shape[-1]
    y, s = w[..., :-1], w[..., -1]
    jac = np.zeros(w.shape[:-1] + (2 * n - 1, n), dtype=complex)
    idx = np.arange(n - 1)
    jac[..., idx, idx] = s[..., None]
    jac[..., : n - 1, n - 1] = y
    jac[..., n - 1, n - 1] = 1.0
    jac[..., n + idx, idx] = 1.0
    return jac


@dataclass(frozen=True)
class BlowupChart:
    """Chart of the blowup near the point ``(0, 0)`` of the exceptional divisor."""

    n: int
    t: float
    c: float
    base: MetricModel
    ambient: MetricModel
    induced_metric: MetricModel

    def embed(self, w) -> np.ndarray:
        return chart_embedding(w)

    def jacobian(self, w) -> np.ndarray:
        return embedding_jacobian(w)


def blowup_metric(n: int, t: float, c: float, base: MetricModel | None = None) -> BlowupChart:
    """The metric ``mu^* h + t b`` in blowup chart coordinates.

    It is the restriction of ``h ⊕ t·FS`` to the embedded chart:
    ``g(w) = J^T G(x(w), y) conj(J)``. At ``w = 0`` the chart frame is the frame
    ``xi_1, ..., xi_n`` and the metric is exactly ``diag(t, ..., t, 1)``.
    """
    if n < 2:
        raise ValueError(f"blowup chart needs n >= 2, got {n}")
    if not t > 0:
        raise ValueError(f"non-positive t: {t}")
    base = base if base is not None else base_metric(n, c)
    if base.n != n:
        raise ValueError(f"base metric has dimension {base.n}, expected {n}")
    ambient = product_metric(base, t)

    def g(w: np.ndarray) -> np.ndarray:
        jac = embedding_jacobian(w)
        big = ambient.func(chart_embedding(w))
        return np.einsum("bAj,bAB,bBk->bjk", jac, big, np.conj(jac))

    induced = MetricModel(n, "blowup", g, {"t": float(t), "c": float(c)})
    return BlowupChart(n, float(t), float(c), base, ambient, induced)


def tau(a, b) -> complex:
    """``<a, conj b> - a_n conj(b_n)``: the standard form on the first ``n - 1`` slots."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.sum(a[:-1] * np.conj(b[:-1])))


def tau_matrix(n: int) -> np.ndarray:
    """Matrix of ``tau`` in the frame: identity with the last diagonal entry zeroed."""
    m = np.eye(n)
    m[n - 1, n - 1] = 0.0
    return m
