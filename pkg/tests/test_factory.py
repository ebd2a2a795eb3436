import warnings

import numpy as np
import pytest

from oqsim import (basis, coherent, coherent_dm, create, destroy, displace, expect,
                   fock_dm, jmat, num, qeye, sigmam, sigmap, sigmax, sigmay, sigmaz,
                   squeeze, thermal_dm, TruncationWarning)
from oqsim.errors import ArgumentError


@pytest.mark.parametrize("N", [2, 3, 7])
def test_ladder_operators(N):
    a, ad = destroy(N), create(N)
    comm = (a * ad - ad * a).full()
    expected = np.eye(N)
    expected[-1, -1] = 1 - N  # truncation artifact in the top level
    assert np.allclose(comm, expected)
    assert ad * a == num(N)
    for n in range(1, N):
        assert a * basis(N, n) == np.sqrt(n) * basis(N, n - 1)


def test_bad_sizes():
    with pytest.raises(ArgumentError):
        destroy(0)
    with pytest.raises(ArgumentError):
        basis(3, 3)
    with pytest.raises(ArgumentError):
        thermal_dm(3, -1)
    with pytest.raises(ArgumentError):
        jmat(0.3)


def test_pauli_ladder():
    assert sigmap() == 0.5 * (sigmax() + 1j * sigmay())
    assert sigmam() == sigmap().dag()
    assert sigmaz() * basis(2, 0) == basis(2, 0)


@pytest.mark.parametrize("j", [0.5, 1, 1.5, 2])
def test_spin_algebra(j):
    jx, jy, jz = jmat(j)
    assert jx * jy - jy * jx == 1j * jz
    casimir = jx * jx + jy * jy + jz * jz
    assert casimir == j * (j + 1) * qeye(int(2 * j + 1))
    assert jmat(j, "+") == jx + 1j * jy


def test_half_spin_is_half_pauli():
    assert jmat(0.5, "z") == 0.5 * sigmaz()
    assert jmat(0.5, "x") == 0.5 * sigmax()


@pytest.mark.parametrize("alpha", [0.3, 1 + 1j, -2.0])
def test_coherent_state(alpha):
    N = 40
    psi = coherent(N, alpha)
    assert psi.norm() == pytest.approx(1.0)
    assert expect(destroy(N), psi) == pytest.approx(alpha, abs=1e-8)
    assert expect(num(N), psi) == pytest.approx(abs(alpha) ** 2, abs=1e-8)
    assert (displace(N, alpha) * basis(N, 0) - psi).norm() < 1e-6
    assert coherent_dm(N, alpha).tr() == pytest.approx(1.0)


def test_coherent_truncation_warns():
    with pytest.warns(TruncationWarning):
        coherent(4, 2.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        coherent(30, 1.0)


@pytest.mark.parametrize("nbar", [0.0, 0.063, 0.75, 2.0])
def test_thermal_state(nbar):
    N = 60
    rho = thermal_dm(N, nbar)
    assert rho.tr() == pytest.approx(1.0)
    assert expect(num(N), rho) == pytest.approx(nbar, abs=1e-8)


def test_squeeze_is_unitary():
    S = squeeze(20, 0.3)
    assert np.allclose((S * S.dag()).full(), np.eye(20), atol=1e-10)
    assert fock_dm(3, 2).diag().tolist() == [0, 0, 1]
