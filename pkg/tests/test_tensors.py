import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blowup_hsc.closed_forms import BlowupParams, curvature_closed_form, fs_tensor
from blowup_hsc.tensors import (
    NotPositiveDefiniteError,
    basis,
    check_kahler_symmetries,
    contract_4,
    hermitian_inverse,
    orthonormal_frame,
)

from conftest import random_direction


def random_hpd(rng, n, cond=10.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, _ = np.linalg.qr(a)
    w = np.linspace(1.0, cond, n)
    return (q * w) @ q.conj().T


def test_contract_zero_tensor(rng):
    t = np.zeros((3,) * 4, dtype=complex)
    v = [random_direction(rng, 3) for _ in range(4)]
    assert contract_4(t, *v) == 0


def test_contract_delta_entry():
    n = 3
    t = np.zeros((n,) * 4, dtype=complex)
    t[-1, -1, -1, -1] = 2.5 - 1j
    e = basis(n, n - 1)
    assert contract_4(t, e, e, e, e) == 2.5 - 1j


def test_contract_fs_tensor_unit_direction():
    # <a,a><a,a> + <a,a><a,a> with |a| = 1
    e1 = basis(3, 0)
    assert contract_4(fs_tensor(3), e1, e1, e1, e1) == pytest.approx(2.0)


def test_contract_dimension_mismatch():
    with pytest.raises(ValueError):
        contract_4(np.zeros((2,) * 4), np.ones(2), np.ones(2), np.ones(3), np.ones(2))


def test_contract_is_multilinear(rng):
    n = 3
    t = rng.normal(size=(n,) * 4) + 1j * rng.normal(size=(n,) * 4)
    a, a2, b, c, d = (random_direction(rng, n) for _ in range(5))
    lam = 0.3 - 1.7j
    # linear in the first and third slots, conjugate-linear in the second and fourth
    assert contract_4(t, a + lam * a2, b, c, d) == pytest.approx(contract_4(t, a, b, c, d) + lam * contract_4(t, a2, b, c, d))
    assert contract_4(t, a, b + lam * a2, c, d) == pytest.approx(
        contract_4(t, a, b, c, d) + np.conj(lam) * contract_4(t, a, a2, c, d)
    )
    assert contract_4(t, a, b, c + lam * a2, d) == pytest.approx(contract_4(t, a, b, c, d) + lam * contract_4(t, a, b, a2, d))
    assert contract_4(t, a, b, c, d + lam * a2) == pytest.approx(
        contract_4(t, a, b, c, d) + np.conj(lam) * contract_4(t, a, b, c, a2)
    )


def test_symmetry_zero_tensor():
    rep = check_kahler_symmetries(np.zeros((2,) * 4), 0.0)
    assert (rep.swap_holomorphic, rep.swap_antiholomorphic, rep.conjugate) == (0.0, 0.0, 0.0)
    assert rep.passed


@pytest.mark.parametrize("n,t,c", [(2, 0.1, 0.0), (3, 0.5, 2.0), (4, 0.01, -1.0), (5, 0.3, 1.5)])
def test_symmetry_closed_form(n, t, c):
    assert check_kahler_symmetries(curvature_closed_form(BlowupParams(n, t, c)), 1e-12).passed


def test_symmetry_detects_perturbation():
    r = curvature_closed_form(BlowupParams(3, 0.5, 1.0))
    r[0, 1, 2, 0] += 1e-3
    rep = check_kahler_symmetries(r, 1e-6)
    assert not rep.passed
    assert rep.max_violation == pytest.approx(1e-3)


def test_inverse_identity():
    np.testing.assert_array_equal(hermitian_inverse(np.eye(3)), np.eye(3))


def test_inverse_diagonal():
    t = 0.1
    np.testing.assert_allclose(hermitian_inverse(np.diag([t, t, 1.0])), np.diag([1 / t, 1 / t, 1.0]), rtol=1e-15)


def test_inverse_random_hpd(rng):
    for _ in range(20):
        m = random_hpd(rng, 3)
        np.testing.assert_allclose(m @ hermitian_inverse(m), np.eye(3), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2**32 - 1))
def test_inverse_involution(n, seed):
    m = random_hpd(np.random.default_rng(seed), n, cond=20.0)
    np.testing.assert_allclose(hermitian_inverse(hermitian_inverse(m)), m, atol=1e-10)


def test_inverse_rejects_indefinite():
    with pytest.raises(NotPositiveDefiniteError, match="smallest eigenvalue -1"):
        hermitian_inverse(np.diag([1.0, -1.0]))
    with pytest.raises(NotPositiveDefiniteError, match="smallest eigenvalue"):
        hermitian_inverse(np.zeros((2, 2)))


def test_inverse_rejects_non_hermitian():
    with pytest.raises(NotPositiveDefiniteError, match="not Hermitian"):
        hermitian_inverse(np.array([[1.0, 0.5], [0.0, 1.0]]))


@pytest.mark.parametrize("method", ["cholesky", "eigen"])
def test_orthonormal_frame(rng, method):
    g = random_hpd(rng, 4)
    v = orthonormal_frame(g, method)
    np.testing.assert_allclose(v.T @ g @ np.conj(v), np.eye(4), atol=1e-12)
