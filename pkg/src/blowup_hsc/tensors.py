"""Hermitian matrices and rank-4 Kähler curvature tensors.

Conventions used throughout the package:

* A metric is an ``(n, n)`` complex array ``g`` with ``g[j, k] = g(d_j, conj d_k)``.
  The inner product of coefficient vectors is ``<u, v> = u @ g @ conj(v)``.
* A curvature tensor is an ``(n, n, n, n)`` complex array with
  ``R[j, k, l, m] = R(d_j, conj d_k, d_l, conj d_m)``.
* A direction is a length-``n`` complex coefficient vector. Indices are
  0-based, so the distinguished last direction ``e_n`` is index ``n - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NotPositiveDefiniteError(ValueError):
    """A matrix that must be a metric is singular or indefinite."""


def as_direction(v, n: int | None = None) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise ValueError(f"direction must be a 1-d coefficient vector, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise ValueError(f"direction has dimension {v.shape[0]}, expected {n}")
    return v


def basis(n: int, j: int) -> np.ndarray:
    """Coefficient vector of the ``j``-th frame element (0-based)."""
    v = np.zeros(n, dtype=complex)
    v[j] = 1.0
    return v


def norm_sq(g: np.ndarray, v: np.ndarray) -> float:
    return float(np.real(v @ g @ np.conj(v)))


def contract_4(tensor: np.ndarray, a, b, c, d) -> complex:
    """Evaluate ``R(a, conj b, c, conj d)``.

    Raises ``ValueError`` when a direction does not match the tensor dimension.
    """
    tensor = np.asarray(tensor)
    n = tensor.shape[0]
    if tensor.shape != (n, n, n, n):
        raise ValueError(f"expected an (n, n, n, n) tensor, got {tensor.shape}")
    a, b, c, d = (as_direction(v, n) for v in (a, b, c, d))
    return complex(np.einsum("jklm,j,k,l,m->", tensor, a, np.conj(b), c, np.conj(d)))


@dataclass(frozen=True)
class SymmetryReport:
    """Largest deviation from each Kähler curvature symmetry."""

    swap_holomorphic: float  # R[j,k,l,m] vs R[l,k,j,m]
    swap_antiholomorphic: float  # R[j,k,l,m] vs R[j,m,l,k]
    conjugate: float  # R[j,k,l,m] vs conj R[k,j,m,l]
    tol: float

    @property
    def max_violation(self) -> float:
        return max(self.swap_holomorphic, self.swap_antiholomorphic, self.conjugate)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol


def check_kahler_symmetries(tensor: np.ndarray, tol: float) -> SymmetryReport:
    t = np.asarray(tensor)
    if t.size == 0:
        return SymmetryReport(0.0, 0.0, 0.0, tol)
    return SymmetryReport(
        swap_holomorphic=float(np.max(np.abs(t - t.transpose(2, 1, 0, 3)))),
        swap_antiholomorphic=float(np.max(np.abs(t - t.transpose(0, 3, 2, 1)))),
        conjugate=float(np.max(np.abs(t - np.conj(t.transpose(1, 0, 3, 2))))),
        tol=tol,
    )


def hermitian_inverse(m: np.ndarray, herm_tol: float = 1e-10) -> np.ndarray:
    """Inverse of a Hermitian positive-definite matrix.

    Raises
    ------
    NotPositiveDefiniteError
        If ``m`` is not Hermitian, or its smallest eigenvalue is not safely
        positive. The message carries the eigenvalue bound that failed.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))))
    asym = float(np.max(np.abs(m - m.conj().T)))
    if asym > herm_tol * scale:
        raise NotPositiveDefiniteError(f"matrix is not Hermitian (max |m - m^H| = {asym:.3e})")
    eig = np.linalg.eigvalsh(m)
    lo, hi = float(eig[0]), float(eig[-1])
    if lo <= 1e-13 * max(hi, 0.0) or lo <= 0.0:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite: smallest eigenvalue {lo:.6e} (largest {hi:.6e})"
        )
    inv = np.linalg.inv(m)
    return 0.5 * (inv + inv.conj().T)


def orthonormal_frame(g: np.ndarray, method: str = "cholesky") -> np.ndarray:
    """Columns ``V[:, i]`` are coefficient vectors orthonormal for ``g``.

    That is ``V.T @ g @ conj(V) == I``. ``method`` is ``"cholesky"`` or
    ``"eigen"``; the two frames differ by a unitary change of basis.
    """
    g = np.asarray(g, dtype=complex)
    hermitian_inverse(g)  # validates definiteness
    if method == "cholesky":
        lower = np.linalg.cholesky(g)
        return np.linalg.inv(lower).T
    if method == "eigen":
        w, u = np.linalg.eigh(g)
        return np.conj(u) / np.sqrt(w)[None, :]
    raise ValueError(f"unknown frame method {method!r}")


def pullback_4(tensor: np.ndarray, jac: np.ndarray) -> np.ndarray:
    """Pull a curvature tensor back along a linear map with matrix ``jac`` (ambient x chart)."""
    jc = np.conj(jac)
    return np.einsum("ABCD,Aj,Bk,Cl,Dm->jklm", tensor, jac, jc, jac, jc)
