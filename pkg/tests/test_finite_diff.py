import numpy as np
import pytest

from blowup_hsc import finite_diff as fd


def quartic(points):
    # f(z) = |z1|^2 |z2|^2 + z1^2 zbar2 ; exact Wirtinger derivatives known
    z1, z2 = points[:, 0], points[:, 1]
    return np.abs(z1) ** 2 * np.abs(z2) ** 2 + z1**2 * np.conj(z2)


@pytest.mark.parametrize("order", [2, 4])
def test_wirtinger_derivatives_of_polynomial(order):
    z0 = np.array([0.3 - 0.2j, -0.1 + 0.4j])
    d = fd.real_derivatives(quartic, z0, 1e-2, order)
    dz, dzb = fd.wirtinger_first(d.grad, 2)
    z1, z2 = z0
    tol = 1e-4 if order == 2 else 1e-9
    assert dz[0] == pytest.approx(np.conj(z1) * abs(z2) ** 2 + 2 * z1 * np.conj(z2), abs=tol)
    assert dzb[1] == pytest.approx(abs(z1) ** 2 * z2 + z1**2, abs=tol)
    mixed = fd.wirtinger_mixed(d.hess, 2)
    # d/dz1 d/dzbar2 f = zbar1 z2 + 2 z1
    assert mixed[0, 1] == pytest.approx(np.conj(z1) * z2 + 2 * z1, abs=tol)
    hol = fd.wirtinger_holomorphic(d.hess, 2)
    assert hol[0, 0] == pytest.approx(2 * np.conj(z2), abs=tol)


def test_richardson_raises_order():
    f = lambda p: np.exp(p[:, 0].real) * np.cos(p[:, 0].imag)  # noqa: E731  Re exp(z)
    z0 = np.array([0.1 + 0.2j])
    exact = np.exp(0.1) * np.cos(0.2)
    coarse = fd.real_derivatives(f, z0, 0.08, 4)
    fine = fd.real_derivatives(f, z0, 0.04, 4)
    rich = fd.richardson(coarse, fine, 4)
    e_fine = abs(fine.hess[0, 0] - exact)
    e_rich = abs(rich.hess[0, 0] - exact)
    assert e_rich < e_fine / 50


def test_unsupported_order():
    with pytest.raises(ValueError):
        fd.stencil_offsets(2, 6)


def test_stencil_size():
    offsets, _ = fd.stencil_offsets(4, 4)
    # centre + 4 per axis + 16 per axis pair
    assert offsets.shape == (1 + 4 * 4 + 6 * 16, 4)
