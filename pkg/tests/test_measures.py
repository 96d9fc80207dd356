import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from xdomain_qsvm.exceptions import ContractError
from xdomain_qsvm.measures import (
    concurrence,
    discord_label,
    entanglement_label,
    factored_jacobi_roots,
    geometric_discord,
    geometric_discord_bd,
    hermitian_eigen,
)
from xdomain_qsvm.states import (
    BELL_KINDS,
    make_bell,
    make_bell_diagonal,
    make_horodecki,
    make_mems,
    make_werner,
)

SY = np.array([[0, -1j], [1j, 0]])


def random_hermitian(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return g + g.conj().T


def random_density(rng, rank=4):
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def wootters_reference(rho):
    # LAPACK eigh and SVD on sqrt(rho_tilde) sqrt(rho); singular values avoid the
    # sqrt(eps) loss of taking roots of tiny eigenvalues of rho @ rho_tilde
    flip = np.kron(SY, SY)
    w, v = np.linalg.eigh(rho)
    root = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    mu = np.linalg.svd(flip @ root.conj() @ flip @ root, compute_uv=False)
    return max(0.0, mu[0] - mu[1:].sum())


class TestJacobi:
    @pytest.mark.parametrize("n", [1, 2, 4, 8])
    def test_matches_lapack(self, n):
        rng = np.random.default_rng(n)
        for _ in range(10):
            m = random_hermitian(rng, n)
            w, v = hermitian_eigen(m)
            assert_allclose(w, np.linalg.eigvalsh(m)[::-1], atol=1e-12)
            assert_allclose(m @ v, v * w, atol=1e-11)
            assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-12)

    def test_already_diagonal(self):
        w, v = hermitian_eigen(np.diag([1.0, 3.0, 2.0]))
        assert_allclose(w, [3, 2, 1])
        assert_allclose(np.abs(v), np.eye(3)[:, [1, 2, 0]])

    def test_degenerate(self):
        w, _ = hermitian_eigen(make_werner("psi_minus", 0.2))
        assert_allclose(w, [0.4, 0.2, 0.2, 0.2], atol=1e-14)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ContractError, match="Hermitian"):
            hermitian_eigen(np.array([[1, 2], [0, 1]]))

    def test_rejects_nan(self):
        with pytest.raises(ContractError, match="non-finite"):
            hermitian_eigen(np.array([[np.nan, 0], [0, 1]]))

    def test_rejects_rectangular(self):
        with pytest.raises(ContractError):
            hermitian_eigen(np.ones((2, 3)))

    def test_factored_roots(self):
        rng = np.random.default_rng(7)
        b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert_allclose(factored_jacobi_roots(b), np.linalg.svd(b, compute_uv=False), atol=1e-13)


class TestConcurrence:
    @pytest.mark.parametrize("kind", BELL_KINDS)
    def test_bell(self, kind):
        assert_allclose(concurrence(make_bell(kind)), 1.0, atol=1e-12)

    def test_mixed(self):
        assert concurrence(np.eye(4) / 4) == 0.0

    def test_product(self):
        v = np.kron([0.6, 0.8], [1 / np.sqrt(2), 1j / np.sqrt(2)])
        assert abs(concurrence(np.outer(v, v.conj()))) < 1e-12

    @pytest.mark.parametrize("kind", BELL_KINDS)
    def test_werner(self, kind):
        for p in np.linspace(0, 1, 21):
            assert_allclose(concurrence(make_werner(kind, p)), max(0.0, (3 * p - 1) / 2), atol=1e-9)

    def test_werner_threshold(self):
        assert concurrence(make_werner("psi_plus", 1 / 3)) < 1e-9
        assert entanglement_label(make_werner("psi_plus", 1 / 3)).value == -1
        assert entanglement_label(make_werner("psi_plus", 0.34)).value == 1

    @pytest.mark.parametrize("kind", BELL_KINDS)
    def test_horodecki(self, kind):
        for p in np.linspace(0, 1, 11):
            assert_allclose(concurrence(make_horodecki(kind, p)), p, atol=1e-9)

    def test_mems(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            q, r, s, t, lam = rng.dirichlet(np.ones(5))
            expected = max(0.0, lam - 2 * np.sqrt(s * t))
            assert_allclose(concurrence(make_mems(q, r, s, t, lam)), expected, atol=1e-9)

    def test_pure_state_formula(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            v = rng.normal(size=4) + 1j * rng.normal(size=4)
            v /= np.linalg.norm(v)
            assert_allclose(concurrence(np.outer(v, v.conj())), 2 * abs(v[0] * v[3] - v[1] * v[2]), atol=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31), st.integers(1, 4))
    def test_matches_reference(self, seed, rank):
        rho = random_density(np.random.default_rng(seed), rank)
        assert abs(concurrence(rho) - wootters_reference(rho)) < 1e-8

    def test_rejects_shape(self):
        with pytest.raises(ContractError):
            concurrence(np.eye(2) / 2)


class TestDiscord:
    def test_bell_diagonal_reduction(self):
        rng = np.random.default_rng(1)
        n = 0
        while n < 100:
            t = rng.uniform(-1, 1, 3)
            try:
                rho = make_bell_diagonal(*t)
            except ValueError:
                continue
            n += 1
            sq = np.sort(t**2)
            assert_allclose(geometric_discord(rho), 0.25 * (sq[0] + sq[1]), atol=1e-12)
            assert_allclose(geometric_discord_bd(*t), 0.25 * (sq[0] + sq[1]), atol=1e-15)

    @pytest.mark.parametrize("kind", BELL_KINDS)
    def test_werner(self, kind):
        for p in np.linspace(0, 1, 11):
            assert_allclose(geometric_discord(make_werner(kind, p)), p**2 / 2, atol=1e-9)

    def test_product_state_zero(self):
        v = np.kron([1, 0], [0.6, 0.8])
        assert geometric_discord(np.outer(v, v)) < 1e-12

    def test_classical_quantum_zero(self):
        rho = 0.5 * np.kron(np.diag([1, 0]), np.diag([1, 0])) + 0.5 * np.kron(np.diag([0, 1]), np.full((2, 2), 0.5))
        assert geometric_discord(rho) < 1e-12
        assert discord_label(rho).value == -1

    def test_labels(self):
        lab = discord_label(make_werner("psi_minus", 0.2))
        assert lab.value == 1 and abs(lab.discord - 0.02) < 1e-12
