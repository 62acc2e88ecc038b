"""Exact curvature of ``h_t = mu^* h + t b`` at the origin of the blowup chart.

All quantities are expressed in the frame ``xi_1, ..., xi_n`` (0-based in
code), in which the metric at the origin is ``diag(t, ..., t, 1)``. The base
metric enters only through ``c = H_h(e_n)``, its holomorphic sectional
curvature in the unit direction ``e_n`` (normal coordinates, so ``|e_n|_h = 1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .metrics import tau, tau_matrix
from .tensors import as_direction


@dataclass(frozen=True)
class BlowupParams:
    n: int
    t: float
    c: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if not self.t > 0:
            raise ValueError(f"non-positive t: {self.t}")

    def metric(self) -> np.ndarray:
        return np.diag([self.t] * (self.n - 1) + [1.0]).astype(complex)


def fs_tensor(m: int) -> np.ndarray:
    """Curvature of Fubini–Study at the chart origin: ``d_jk d_lm + d_jm d_lk``."""
    eye = np.eye(m)
    return (np.einsum("jk,lm->jklm", eye, eye) + np.einsum("jm,lk->jklm", eye, eye)).astype(complex)


def _en_projector(n: int) -> np.ndarray:
    e = np.zeros((n, n))
    e[n - 1, n - 1] = 1.0
    return e


def curvature_closed_form(p: BlowupParams) -> np.ndarray:
    n, t, c = p.n, p.t, p.c
    tm = tau_matrix(n)
    en = _en_projector(n)
    r = c * np.einsum("jk,lm->jklm", en, en)
    r += t * (np.einsum("jk,lm->jklm", tm, tm) + np.einsum("jm,lk->jklm", tm, tm))
    r -= np.einsum("jk,lm->jklm", en, tm)
    r -= np.einsum("jm,lk->jklm", en, tm)
    r -= np.einsum("lk,jm->jklm", en, tm)
    r -= np.einsum("lm,jk->jklm", en, tm)
    return r.astype(complex)


def sigma_closed_form(p: BlowupParams, a, g) -> np.ndarray:
    """``sigma(a, g)_j = a_n g_j + g_n a_j`` for ``j < n``."""
    a, g = as_direction(a, p.n), as_direction(g, p.n)
    return a[-1] * g[:-1] + g[-1] * a[:-1]


def sigma_inner_closed_form(p: BlowupParams) -> np.ndarray:
    """``<sigma(xi_j, xi_l), sigma(xi_k, xi_m)>`` for all frame indices."""
    n = p.n
    s = np.zeros((n, n, n - 1), dtype=complex)
    for i in range(n):
        for k in range(n):
            s[i, k] = sigma_closed_form(p, np.eye(n)[i], np.eye(n)[k])
    return np.einsum("jlA,kmA->jklm", s, np.conj(s))


def gauss_assembled_closed_form(p: BlowupParams) -> np.ndarray:
    """Base term + ``t`` times the Fubini–Study term minus the sigma term."""
    n = p.n
    base = np.zeros((n,) * 4, dtype=complex)
    base[-1, -1, -1, -1] = p.c
    fs = np.zeros((n,) * 4, dtype=complex)
    fs[: n - 1, : n - 1, : n - 1, : n - 1] = fs_tensor(n - 1)
    return base + p.t * fs - sigma_inner_closed_form(p)


def hsc_closed_form(p: BlowupParams, a) -> float:
    a = as_direction(a, p.n)
    if not np.any(a):
        raise ValueError("holomorphic sectional curvature needs a nonzero direction")
    ta = tau(a, a).real
    an2 = abs(a[-1]) ** 2
    num = an2**2 * p.c + 2 * p.t * ta**2 - 4 * an2 * ta
    return num / (p.t * ta + an2) ** 2


def unit_direction(n: int, x: float, phase: float = 0.0) -> np.ndarray:
    """A unit coefficient vector with ``|a_n|^2 = x``, the rest on ``xi_1``."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    a = np.zeros(n, dtype=complex)
    a[0] = math.sqrt(1.0 - x)
    a[-1] = math.sqrt(x) * np.exp(1j * phase)
    return a


def _p_value(c: float, t: float, x: float) -> float:
    return c * x * x + 2 * t * (1 - x) ** 2 - 4 * x * (1 - x)


def p_poly(p: BlowupParams, x: float) -> float:
    """Numerator of the HSC quotient for unit directions with ``|a_n|^2 = x``.

    ``c x^2 + 2t(1-x)^2 - 4x(1-x) = (c + 2t + 4) x^2 - 4(1 + t) x + 2t``.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    return _p_value(p.c, p.t, x)


@dataclass(frozen=True)
class CriticalPoint:
    x: float
    value: float
    interior: bool
    argmin: float  # minimiser of p on [0, 1]
    minimum: float


def _critical(c: float, t: float) -> tuple[float, float]:
    lead = c + 2 * t + 4
    if lead <= 0:
        raise ValueError(f"degenerate quadratic: c + 2t + 4 = {lead} <= 0")
    return 2 * (1 + t) / lead, 2 * t - 4 * (1 + t) ** 2 / lead


def p_critical(p: BlowupParams) -> CriticalPoint:
    """Vertex of ``p_t`` and the minimum of ``p_t`` over ``[0, 1]``."""
    x, value = _critical(p.c, p.t)
    if 0.0 <= x <= 1.0:
        return CriticalPoint(x, value, True, x, value)
    end = 0.0 if x < 0 else 1.0
    return CriticalPoint(x, value, False, end, _p_value(p.c, p.t, end))


@dataclass(frozen=True)
class Threshold:
    """Where the minimal HSC at the origin changes sign.

    The critical value times ``c + 2t + 4`` is ``2tc - 4``, so for ``c > 0``
    the minimum is negative exactly when ``t < 2/c``. For ``c <= 0`` it is
    negative for every ``t``: ``always_negative`` is set and ``t_star`` is
    ``None``.
    """

    c: float
    t_star: float | None
    bisection: float | None
    always_negative: bool
    reason: str = ""


def negativity_threshold(c: float, xtol: float = 1e-14) -> Threshold:
    """``t* = 2 / c``, cross-checked by bisection on the critical value."""
    c = float(c)
    if c < 0:
        return Threshold(c, None, None, True, "H(e_n) = c < 0 for every t")
    if c == 0:
        return Threshold(c, None, None, True, "minimum of p_t is -4/(2t + 4) < 0 for every t")
    closed = 2.0 / c
    # critical value is -4/(c+4) < 0 at t = 0 and positive at t = 2 t*
    root = bisect(lambda t: _critical(c, t)[1], 0.0, 2 * closed, xtol=xtol * max(1.0, closed),
                  rtol=4 * np.finfo(float).eps, maxiter=500)
    if abs(root - closed) > 1e-9 * max(1.0, closed):
        raise AssertionError(f"threshold mismatch for c={c}: closed form {closed!r}, bisection {root!r}")
    return Threshold(c, closed, root, False)


def ricci_closed_form(p: BlowupParams, a, b) -> complex:
    a, b = as_direction(a, p.n), as_direction(b, p.n)
    ab = a[-1] * np.conj(b[-1])
    return complex(p.c * ab + (p.n - 1) * tau(a, b) - (p.n - 1) * ab / p.t)


def ricci_matrix_closed_form(p: BlowupParams) -> np.ndarray:
    n = p.n
    en = _en_projector(n)
    return (p.c * en + (n - 1) * tau_matrix(n) - (n - 1) * en / p.t).astype(complex)


def scalar_closed_form(p: BlowupParams) -> float:
    return p.c + (p.n - 1) * (p.n - 2) / p.t
