import numpy as np
import pytest

from oqsim import (basis, coherent, destroy, entropy_vn, expect, fidelity, fock_dm,
                   ket2dm, num, qeye, sigmax, sigmaz, tensor, tracedist, wigner)
from oqsim.errors import DimensionError, DomainError
from oqsim.wigner import PhaseSpaceGrid, wigner_map

from conftest import rand_dm, rand_ket


def test_expect_ket_and_dm_agree():
    rng = np.random.default_rng(0)
    psi = rand_ket(rng, 5)
    for op in (num(5), destroy(5)):
        assert expect(op, psi) == pytest.approx(expect(op, ket2dm(psi)))
    vals = expect(num(3), [basis(3, k) for k in range(3)])
    assert vals.tolist() == [0, 1, 2]


def test_expect_dims_checked():
    with pytest.raises(DimensionError):
        expect(num(3), basis(4))


@pytest.mark.parametrize("seed", range(6))
def test_fidelity_properties(seed):
    rng = np.random.default_rng(seed)
    a, b = rand_dm(rng, 3), rand_dm(rng, 3)
    assert fidelity(a, a) == pytest.approx(1.0, abs=1e-8)
    assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-8)
    assert 0 <= fidelity(a, b) <= 1
    # Fuchs-van de Graaf
    assert 1 - fidelity(a, b) <= tracedist(a, b) + 1e-10
    assert tracedist(a, b) <= np.sqrt(1 - fidelity(a, b) ** 2) + 1e-10
    psi, phi = rand_ket(rng, 3), rand_ket(rng, 3)
    overlap = abs(np.vdot(psi.full(), phi.full()))
    assert fidelity(psi, phi) == pytest.approx(overlap)
    assert fidelity(ket2dm(psi), ket2dm(phi)) == pytest.approx(overlap, abs=1e-7)
    assert fidelity(psi, ket2dm(phi)) == pytest.approx(overlap)


def test_tracedist_orthogonal():
    assert tracedist(basis(2, 0), basis(2, 1)) == pytest.approx(1.0)


def test_entropy():
    bell = (tensor(basis(2, 0), basis(2, 0)) + tensor(basis(2, 1), basis(2, 1))).unit()
    assert entropy_vn(bell.ptrace(0)) == pytest.approx(np.log(2))
    assert entropy_vn(bell.ptrace(0), base=2) == pytest.approx(1.0)
    assert entropy_vn(fock_dm(3, 1)) == pytest.approx(0.0, abs=1e-12)
    assert entropy_vn(qeye(4) / 4) == pytest.approx(np.log(4))


def test_hermitian_expectation_is_real():
    assert isinstance(expect(sigmax(), basis(2, 0)), float)
    assert expect(sigmaz(), basis(2, 1)) == -1
    with pytest.raises(DomainError):
        # a non-Hermitian "state" can make a Hermitian expectation complex
        expect(sigmax(), ket2dm(basis(2, 0)) + 0.3j * destroy(2))


xs = np.linspace(-4, 4, 81)


def test_wigner_vacuum(backend):
    W = wigner(basis(10, 0), xs)
    X, P = np.meshgrid(xs, xs, indexing="ij")
    assert np.allclose(W, np.exp(-X ** 2 - P ** 2) / np.pi, atol=1e-12)


def test_wigner_fock_one(backend):
    W = wigner(basis(10, 1), np.array([0.0, 1.0]))
    assert W[0, 0] == pytest.approx(-1 / np.pi)
    assert W[1, 0] == pytest.approx((2 * 1 - 1) * np.exp(-1) / np.pi)


def test_wigner_coherent_centre(backend):
    alpha = 1.0 + 0.5j
    W = wigner(coherent(30, alpha), xs)
    i, j = np.unravel_index(np.argmax(W), W.shape)
    assert xs[i] == pytest.approx(np.sqrt(2) * alpha.real, abs=0.05)
    assert xs[j] == pytest.approx(np.sqrt(2) * alpha.imag, abs=0.05)


@pytest.mark.parametrize("seed", range(4))
def test_wigner_normalized(seed, backend):
    rng = np.random.default_rng(seed)
    rho = rand_dm(rng, 6)
    grid = PhaseSpaceGrid(np.linspace(-7, 7, 141), np.linspace(-7, 7, 141))
    assert wigner_map(rho, grid).integral() == pytest.approx(1.0, abs=1e-6)


def test_wigner_needs_single_mode():
    with pytest.raises(DimensionError):
        wigner(tensor(basis(2), basis(2)), xs)
