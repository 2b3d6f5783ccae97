import numpy as np
import pytest
from scipy.linalg import expm

from floqlind.choi import ccp_min_eigenvalue, deflate, phi_projectors, reshuffle
from floqlind.errors import BranchAmbiguityError, ClassificationError, DimensionError, NearDefectiveError, SingularMapError
from floqlind.propagator import floquet_map
from floqlind.qdyn import ModelSpec, generator_parts
from floqlind.spectral import (
    branch, classify_spectrum, eigendecompose, eigendecompose_map, hermitian_basis, principal_log, v_matrices,
)

from helpers import constant_map, random_principal_lindbladian

DRIVEN = [ModelSpec(p, amplitude=e, omega=w, phase=phi)
          for p in ("I", "II") for e, w, phi in [(1.0, 1.0, 0.3), (2.5, 0.6, 1.2), (0.4, 5.0, 2.0)]]


@pytest.fixture(scope="module")
def driven_maps():
    return [floquet_map(m) for m in DRIVEN]


def test_hermitian_basis_orthonormal():
    b = hermitian_basis(3)
    assert np.allclose(b.conj().T @ b, np.eye(9), atol=1e-14)
    for k in range(9):
        m = b[:, k].reshape(3, 3, order="F")
        assert np.allclose(m, m.conj().T)


def test_classify_examples():
    real, pairs = classify_spectrum([1, 0.5, 0.3 + 0.2j, 0.3 - 0.2j], 1e-9)
    assert sorted(real) == [0, 1] and pairs == [(2, 3)]
    assert classify_spectrum([1, 0.9, 0.8, 0.7], 1e-9) == ([0, 1, 2, 3], [])
    real, pairs = classify_spectrum([1, 0.5, 0.3 + 1e-15j, 0.3 - 1e-15j], 1e-9)
    assert len(real) == 4 and pairs == []
    with pytest.raises(ClassificationError):
        classify_spectrum([1, 0.5, 0.3 + 0.2j, 0.3 + 0.2j], 1e-9)


def test_identity_map():
    d = eigendecompose(np.eye(4), 1.0)
    assert np.allclose(d.eigenvalues, 1) and d.m == 4 and d.n == 0
    assert np.allclose(d.projectors.sum(axis=0), np.eye(4), atol=1e-12)
    assert np.allclose(principal_log(d), 0, atol=1e-14)


def test_unitary_spectrum():
    m = ModelSpec("I", gamma=0.0, amplitude=0.0, omega=3.0)
    d = eigendecompose_map(floquet_map(m))
    t = m.period
    want = np.sort_complex(np.array([1, 1, np.exp(-1j * t), np.exp(1j * t)]))
    assert np.allclose(np.sort_complex(d.eigenvalues), want, atol=1e-8)
    assert d.m == 2 and d.n == 1


def test_decomposition_invariants(driven_maps):
    for fmap in driven_maps:
        d = eigendecompose_map(fmap)
        p = d.projectors
        assert np.max(np.abs(p.sum(axis=0) - np.eye(4))) < 1e-8
        for j in range(4):
            assert np.max(np.abs(p[j] @ p[j] - p[j])) < 1e-8
            for k in range(4):
                if j != k:
                    assert np.max(np.abs(p[j] @ p[k])) < 1e-8
        assert np.max(np.abs(d.reconstruct() - fmap.entries)) < 1e-7
        assert np.sum(np.abs(d.eigenvalues - 1) < 1e-8) == 1
        assert d.m + 2 * len(d.pair_indices) == 4 and d.n <= 1
        lam = np.sort_complex(d.eigenvalues)
        assert np.allclose(lam, np.sort_complex(lam.conj()), atol=1e-9)


def test_principal_log_recovers_constant_generator():
    # Problem II splits levels by sqrt(2) Delta; omega = 4 keeps the rotation angle below pi
    m = ModelSpec("II", amplitude=0.0, omega=4.0)
    static, _ = generator_parts(m)
    d = eigendecompose_map(floquet_map(m))
    assert np.max(np.abs(principal_log(d) - static)) < 1e-7


def test_branches_are_logarithms(driven_maps):
    for fmap in driven_maps:
        d = eigendecompose_map(fmap)
        k0 = principal_log(d)
        assert np.array_equal(branch(k0, d, np.zeros(d.n)), k0)
        for x in range(-2, 3):
            kx = branch(k0, d, [x] * d.n)
            assert np.max(np.abs(expm(fmap.period * kx) - fmap.entries)) < 1e-7
            c = reshuffle(kx)
            assert np.max(np.abs(c - c.conj().T)) < 1e-8
        if d.n:
            assert not np.allclose(branch(k0, d, [1]), k0)
        with pytest.raises(DimensionError):
            branch(k0, d, np.zeros(d.n + 1))


def test_v_matrices_linearity_and_two_paths(driven_maps):
    rng = np.random.default_rng(0)
    perp = phi_projectors(2).phi_perp
    for fmap in driven_maps:
        d = eigendecompose_map(fmap)
        k0 = principal_log(d)
        vm = v_matrices(d, k0)
        for v in [vm.v0, *vm.vc]:
            assert np.max(np.abs(v - v.conj().T)) < 1e-10
        d0, dc = vm.deflated()
        for _ in range(5):
            x = rng.integers(-5, 6, d.n)
            vx = vm.v0 + sum(xc * v for xc, v in zip(x, vm.vc))
            assert np.max(np.abs(vx - perp @ reshuffle(branch(k0, d, x)) @ perp)) < 1e-10
            lam = np.linalg.eigvalsh(d0 + np.einsum("c,cij->ij", x, dc))[0]
            assert abs(lam - ccp_min_eigenvalue(branch(k0, d, x))) < 1e-9


def test_n0_map_has_no_offsets():
    # real-spectrum generator: pure dephasing plus decay without a Hamiltonian
    from floqlind.qdyn import SIGMA_MINUS, SIGMA_Z, lindbladian_superop
    l = lindbladian_superop(np.zeros((2, 2)), [SIGMA_MINUS, SIGMA_Z], [0.3, 0.2])
    d = eigendecompose_map(constant_map(l, 1.0))
    assert d.n == 0 and v_matrices(d, principal_log(d)).vc == []


def test_error_flags():
    with pytest.raises(SingularMapError):
        principal_log(eigendecompose(np.diag([1.0, 0.5, 0.5, 0.0]).astype(complex), 1.0))
    # rotation by pi: eigenvalues -1 on the cut
    from floqlind.qdyn import SIGMA_Z, lindbladian_superop
    l = lindbladian_superop(SIGMA_Z / 2)
    with pytest.raises(BranchAmbiguityError):
        principal_log(eigendecompose_map(constant_map(l, np.pi)))
    # a Jordan block written in the Hermitian operator basis (so the map is Hermiticity preserving)
    jordan = np.diag([1.0, 0.5, 0.5, 0.3])
    jordan[1, 2] = 1.0
    b = hermitian_basis(2)
    with pytest.raises(NearDefectiveError):
        eigendecompose(b @ jordan @ b.conj().T, 1.0)


def test_random_constant_generators_round_trip():
    rng = np.random.default_rng(6)
    for _ in range(20):
        l = random_principal_lindbladian(rng)
        d = eigendecompose_map(constant_map(l, 1.0))
        assert np.max(np.abs(principal_log(d) - l)) < 1e-7
