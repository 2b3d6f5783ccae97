import numpy as np
import pytest

from floqlind.choi import ccp_min_eigenvalue, choi_from_action, deflate, phi_projectors, reshuffle
from floqlind.errors import DimensionError, DomainError, InvalidGeneratorError
from floqlind.propagator import floquet_map
from floqlind.qdyn import SIGMA_MINUS, SIGMA_Z, ModelSpec, depolarizing_generator, lindbladian_superop, superop_from_action


def reshuffle_loops(m, n):
    """Element-by-element oracle of C[i n + j, k n + l] = M[i n + k, j n + l]."""
    out = np.empty_like(m)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    out[i * n + j, k * n + l] = m[i * n + k, j * n + l]
    return out


def random_lindbladian(rng, n=2):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    jumps = [rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(2)]
    return lindbladian_superop((a + a.conj().T) / 2, jumps, list(rng.uniform(0, 1, 2)))


def test_reshuffle_matches_loop_oracle():
    rng = np.random.default_rng(0)
    for n in (2, 3):
        m = rng.normal(size=(n * n, n * n)) + 1j * rng.normal(size=(n * n, n * n))
        assert np.array_equal(reshuffle(m), reshuffle_loops(m, n))


def test_reshuffle_involution_bitwise():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert np.array_equal(reshuffle(reshuffle(m)), m)


def test_reshuffle_linear():
    rng = np.random.default_rng(2)
    a, b = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(2))
    x, y = 0.7 - 0.2j, -1.3
    assert np.allclose(reshuffle(x * a + y * b), x * reshuffle(a) + y * reshuffle(b), atol=1e-12)


def test_reshuffle_identity_is_maximally_entangled():
    for n in (2, 3):
        want = np.zeros((n * n, n * n))
        for i in range(n):
            for j in range(n):
                want[i * n + i, j * n + j] = 1
        assert np.array_equal(reshuffle(np.eye(n * n)), want)
        phi = phi_projectors(n).phi
        assert np.allclose(reshuffle(np.eye(n * n)), n * np.outer(phi, phi.conj()))


def test_reshuffle_errors():
    with pytest.raises(DimensionError):
        reshuffle(np.zeros((4, 3)))
    with pytest.raises(DimensionError):
        reshuffle(np.zeros((5, 5)))


def test_reshuffle_agrees_with_basis_action_choi():
    rng = np.random.default_rng(3)
    k = [rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(2)]
    act = lambda rho: sum(a @ rho @ a.conj().T for a in k)  # noqa: E731
    assert np.allclose(reshuffle(superop_from_action(act, 2)), choi_from_action(act, 2), atol=1e-13)


def test_floquet_choi_hermitian():
    fmap = floquet_map(ModelSpec("I", amplitude=1.0, omega=1.3, phase=0.4))
    c = reshuffle(fmap.entries)
    assert np.max(np.abs(c - c.conj().T)) < 1e-10


def test_phi_projectors():
    p = phi_projectors(2)
    assert np.allclose(p.phi, np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert np.max(np.abs(p.phi_perp @ p.phi_perp - p.phi_perp)) < 1e-12
    assert np.max(np.abs(p.phi_perp - p.phi_perp.conj().T)) < 1e-12
    assert np.allclose(p.phi_perp @ p.phi, 0, atol=1e-15)
    assert np.trace(p.phi_perp).real == pytest.approx(3)
    assert np.allclose(p.basis.conj().T @ p.basis, np.eye(3), atol=1e-14)
    assert np.allclose(p.basis @ p.basis.conj().T, p.phi_perp, atol=1e-14)
    with pytest.raises(DomainError):
        phi_projectors(1)


def test_ccp_examples():
    assert ccp_min_eigenvalue(np.zeros((4, 4))) == 0.0
    assert ccp_min_eigenvalue(depolarizing_generator(2)) >= 0
    assert ccp_min_eigenvalue(lindbladian_superop(SIGMA_Z / 2, [SIGMA_MINUS], [0.01])) >= 0
    # a negative dissipator is not conditionally CP; its deflated minimum is -rate
    assert ccp_min_eigenvalue(-lindbladian_superop(np.zeros((2, 2)), [SIGMA_MINUS], [0.01])) == pytest.approx(-0.01)


def test_ccp_deflation_keeps_negative_eigenvalue_near_zero():
    # with the structural zero still present a tiny negative eigenvalue would be hidden behind it
    eps = 1e-12
    p = phi_projectors(2)
    c = p.phi_perp - (1 + eps) * np.outer(p.basis[:, 0], p.basis[:, 0].conj())
    assert np.linalg.eigvalsh(deflate(c))[0] == pytest.approx(-eps, abs=1e-15)


def test_ccp_rejects_non_hermiticity_preserving():
    k = np.zeros((4, 4), dtype=complex)
    k[0, 1] = 1.0
    with pytest.raises(InvalidGeneratorError):
        ccp_min_eigenvalue(k)


def test_random_lindbladians_conditionally_cp_and_superadditive():
    rng = np.random.default_rng(4)
    for _ in range(100):
        a, b = random_lindbladian(rng), random_lindbladian(rng)
        la, lb = ccp_min_eigenvalue(a), ccp_min_eigenvalue(b)
        assert la >= -1e-10 and lb >= -1e-10
        assert ccp_min_eigenvalue(a + b) >= la + lb - 1e-12
