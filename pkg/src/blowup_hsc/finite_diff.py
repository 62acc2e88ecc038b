"""Central finite differences over real coordinates, with Wirtinger recombination.

Complex coordinates ``z = u + i v`` are handled as the real vector
``[u_1, ..., u_n, v_1, ..., v_n]``. Functions are evaluated on a whole stencil
in one batched call, so callers pass ``f(points) -> values`` where ``points``
has shape ``(m, n)`` (complex) and ``values`` has shape ``(m, ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

# offset -> weight, derivative = sum(w * f(x0 + k h)) / h**order_of_derivative
FIRST_DERIV = {
    2: {-1: -0.5, 1: 0.5},
    4: {-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12},
}
SECOND_DERIV = {
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    4: {-2: -1 / 12, -1: 16 / 12, 0: -30 / 12, 1: 16 / 12, 2: -1 / 12},
}


@dataclass(frozen=True)
class RealDerivatives:
    """Value, gradient and Hessian of a function of ``d`` real variables.

    ``grad`` has shape ``(d, ...)`` and ``hess`` has shape ``(d, d, ...)``,
    where ``...`` is the output shape of the differentiated function.
    """

    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray

    def combine(self, other: "RealDerivatives", a: float, b: float) -> "RealDerivatives":
        return RealDerivatives(
            a * self.value + b * other.value,
            a * self.grad + b * other.grad,
            a * self.hess + b * other.hess,
        )


def stencil_offsets(d: int, order: int) -> tuple[np.ndarray, list]:
    """Integer offsets of every stencil point and how to combine them.

    Returns ``(offsets, terms)`` where ``offsets`` has shape ``(m, d)`` and
    ``terms`` is a list of ``(kind, axes, point_index, weight)``.
    """
    if order not in FIRST_DERIV:
        raise ValueError(f"unsupported stencil order {order}; expected 2 or 4")
    w1, w2 = FIRST_DERIV[order], SECOND_DERIV[order]
    index: dict[tuple, int] = {}
    terms = []

    def point(offset: tuple) -> int:
        if offset not in index:
            index[offset] = len(index)
        return index[offset]

    zero = (0,) * d
    point(zero)
    for a in range(d):
        for k, w in w1.items():
            off = list(zero)
            off[a] = k
            terms.append(("grad", (a,), point(tuple(off)), w))
        for k, w in w2.items():
            off = list(zero)
            off[a] = k
            terms.append(("hess", (a, a), point(tuple(off)), w))
    for a in range(d):
        for b in range(a + 1, d):
            for ka, wa in w1.items():
                for kb, wb in w1.items():
                    off = list(zero)
                    off[a] = ka
                    off[b] = kb
                    terms.append(("hess", (a, b), point(tuple(off)), wa * wb))
    offsets = np.zeros((len(index), d))
    for off, i in index.items():
        offsets[i] = off
    return offsets, terms


def real_derivatives(
    f: Callable[[np.ndarray], np.ndarray],
    z0: np.ndarray,
    step: float,
    order: int = 4,
) -> RealDerivatives:
    """Gradient and Hessian of ``f`` at ``z0`` with respect to ``[Re z, Im z]``."""
    z0 = np.asarray(z0, dtype=complex)
    n = z0.shape[0]
    d = 2 * n
    offsets, terms = stencil_offsets(d, order)
    shifts = step * offsets
    points = z0[None, :] + shifts[:, :n] + 1j * shifts[:, n:]
    values = np.asarray(f(points))
    out_shape = values.shape[1:]

    grad = np.zeros((d,) + out_shape, dtype=values.dtype)
    hess = np.zeros((d, d) + out_shape, dtype=values.dtype)
    for kind, axes, i, w in terms:
        if kind == "grad":
            grad[axes[0]] += w * values[i]
        else:
            hess[axes] += w * values[i]
    grad /= step
    hess /= step**2
    for a in range(d):
        for b in range(a + 1, d):
            hess[b, a] = hess[a, b]
    return RealDerivatives(values[0], grad, hess)


def stencil_points(z0: np.ndarray, step: float, order: int) -> np.ndarray:
    """The complex points a call to :func:`real_derivatives` would visit."""
    z0 = np.asarray(z0, dtype=complex)
    n = z0.shape[0]
    offsets, _ = stencil_offsets(2 * n, order)
    shifts = step * offsets
    return z0[None, :] + shifts[:, :n] + 1j * shifts[:, n:]


def richardson(coarse: RealDerivatives, fine: RealDerivatives, order: int) -> RealDerivatives:
    """One Richardson pass for a pair of estimates at steps ``h`` and ``h/2``."""
    r = 2.0**order
    return fine.combine(coarse, r / (r - 1.0), -1.0 / (r - 1.0))


def wirtinger_first(grad: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(d/dz_l f, d/dzbar_l f)`` from a real gradient, each of shape ``(n, ...)``."""
    du, dv = grad[:n], grad[n:]
    return 0.5 * (du - 1j * dv), 0.5 * (du + 1j * dv)


def wirtinger_mixed(hess: np.ndarray, n: int) -> np.ndarray:
    """``d^2 f / dz_l dzbar_m`` indexed ``[l, m, ...]``."""
    uu, uv = hess[:n, :n], hess[:n, n:]
    vu, vv = hess[n:, :n], hess[n:, n:]
    return 0.25 * (uu + vv + 1j * (uv - vu))


def wirtinger_holomorphic(hess: np.ndarray, n: int) -> np.ndarray:
    """``d^2 f / dz_l dz_m`` indexed ``[l, m, ...]``."""
    uu, uv = hess[:n, :n], hess[:n, n:]
    vu, vv = hess[n:, :n], hess[n:, n:]
    return 0.25 * (uu - vv - 1j * (uv + vu))
