import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import gauss_nullspace, same_span
from worked_examples import EX41_C, EX41_G_MINUS, EX41_G_PLUS, INTRO_A1, INTRO_A2, INTRO_C, INTRO_S, EX31_PERM
from planted import random_complex, random_invertible
from simblock.commutant import commutator_system
from simblock.errors import DefectiveTolerance, DimensionMismatch, SingularMatrix
from simblock.linalg import (
    Tolerances,
    canonical_basis,
    cluster_eigenvalues,
    generalized_eigenspace,
    generalized_eigenspaces,
    invertible_to_unitary,
    spectral_split,
    nullspace,
    orthogonal_complement,
    positive_qr,
    spectrum,
)

TOL = Tolerances()


class TestTolerances:
    def test_defaults(self):
        assert (TOL.rank_tol, TOL.residual_tol, TOL.eig_cluster_tol) == (1e-10, 1e-8, 1e-7)

    @pytest.mark.parametrize("field", ["rank_tol", "residual_tol", "eig_cluster_tol"])
    @pytest.mark.parametrize("value", [0.0, -1e-3, 1.0, 2.0])
    def test_out_of_range(self, field, value):
        with pytest.raises(ValueError):
            Tolerances(**{field: value})


class TestNullspace:
    def test_full_rank_identity(self):
        assert nullspace(np.eye(2)).shape == (2, 0)

    def test_zero_matrix(self):
        assert nullspace(np.zeros((3, 4))).shape == (4, 4)

    def test_intro_commutator_contains_c(self):
        x = commutator_system([INTRO_A1, INTRO_A2])
        assert x.shape == (18, 9)
        k = nullspace(x)
        vec_c = INTRO_C.reshape(9, order="F")
        coeffs, *_ = np.linalg.lstsq(k, vec_c, rcond=None)
        assert np.allclose(k @ coeffs, vec_c, atol=1e-12)

    def test_outer_product_against_elimination(self, rng):
        u = random_complex(rng, 5)
        v = random_complex(rng, 5)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        m = np.outer(u, v)
        k = nullspace(m)
        assert k.shape == (5, 4)
        # v^T k = 0, i.e. columns orthogonal to conj(v)
        assert np.abs(v @ k).max() < 1e-12
        assert same_span(k, gauss_nullspace(m))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 6))
    def test_properties(self, seed, rows, rank):
        rng = np.random.default_rng(seed)
        cols = 6
        rank = min(rank, rows)
        m = random_complex(rng, rows, rank) @ random_complex(rng, rank, cols)
        k = nullspace(m)
        smax = np.linalg.norm(m, 2)
        assert k.shape[1] == cols - rank
        assert np.abs(m @ k).max(initial=0.0) <= 10 * TOL.rank_tol * smax
        assert np.allclose(k.conj().T @ k, np.eye(k.shape[1]), atol=1e-12)


class TestOrthogonalComplement:
    def test_coordinate_subspace(self):
        e = np.eye(6)
        comp = orthogonal_complement(e[:, [0, 3]], 6)
        assert np.allclose(comp, e[:, [1, 2, 4, 5]])

    def test_whole_space(self):
        assert orthogonal_complement(np.eye(3), 3).shape == (3, 0)

    def test_single_vector(self):
        b = np.array([[1.0], [1.0], [0.0]]) / np.sqrt(2)
        comp = orthogonal_complement(b, 3)
        assert comp.shape == (3, 2)
        assert np.abs(b.conj().T @ comp).max() < 1e-12

    def test_wrong_length(self):
        with pytest.raises(DimensionMismatch):
            orthogonal_complement(np.ones((4, 1)), 3)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6), st.integers(2, 7), st.integers(0, 7))
    def test_spans_everything(self, seed, n, d):
        rng = np.random.default_rng(seed)
        d = min(d, n)
        b = random_complex(rng, n, d)
        comp = orthogonal_complement(b, n)
        assert comp.shape[1] == n - d
        q, _ = np.linalg.qr(b)
        assert np.linalg.matrix_rank(np.hstack([q, comp])) == n
        assert np.abs(b.conj().T @ comp).max(initial=0.0) < 1e-10 * max(1.0, np.linalg.norm(b))


class TestInvertibleToUnitary:
    def test_permutation_is_kept(self):
        s = np.eye(6)[:, EX31_PERM]
        assert np.allclose(invertible_to_unitary(s), s)

    def test_identity(self):
        assert np.allclose(invertible_to_unitary(np.eye(4)), np.eye(4))

    def test_random_reconstruction(self, rng):
        s = random_invertible(rng, 5, max_cond=500.0)
        assert np.linalg.cond(s) < 1e3
        q, r = positive_qr(s)
        assert np.allclose(invertible_to_unitary(s), q)
        assert np.abs(q @ r - s).max() <= 1e-10
        assert np.abs(q.conj().T @ q - np.eye(5)).max() <= 5e-12
        assert np.allclose(np.tril(r, -1), 0)
        d = np.diagonal(r)
        assert np.all(d.real > 0) and np.allclose(d.imag, 0)

    def test_singular(self):
        s = np.eye(3)
        s[:, 2] = s[:, 0] + s[:, 1]
        with pytest.raises(SingularMatrix):
            invertible_to_unitary(s)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 8), st.floats(1.0, 1e6))
    def test_unitarity(self, seed, n, cond):
        s = random_invertible(np.random.default_rng(seed), n, max_cond=cond)
        q = invertible_to_unitary(s)
        assert np.abs(q.conj().T @ q - np.eye(n)).max() <= 1e-12 * n


class TestSpectrum:
    def test_example41(self):
        spec = spectrum(EX41_C)
        assert np.allclose(spec.eigenvalues, [-1, 1])
        assert spec.multiplicities == (3, 3)

    def test_intro(self):
        spec = spectrum(INTRO_C)
        assert np.allclose(spec.eigenvalues, [0, 1])
        assert spec.multiplicities == (2, 1)

    def test_identity(self):
        spec = spectrum(np.eye(4))
        assert spec.eigenvalues == (1.0,) and spec.multiplicities == (4,)

    def test_ordering_and_merge(self):
        spec = cluster_eigenvalues([2.0, 1j, 1j + 1e-9, -1.0])
        assert spec.multiplicities == (1, 2, 1)
        assert np.allclose(spec.eigenvalues, [-1.0, 1j, 2.0])

    def test_chained_clusters_end_separated(self):
        # single linkage chains 0 - 0.9t - 1.8t into one value
        t = TOL.eig_cluster_tol
        spec = cluster_eigenvalues([0.0, 0.9 * t, 1.8 * t, 5.0])
        assert spec.multiplicities == (3, 1)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.complex_numbers(max_magnitude=1e-6, allow_nan=False, allow_infinity=False),
                    min_size=1, max_size=9))
    def test_idempotent(self, values):
        spec = cluster_eigenvalues(values)
        assert spec.dim == len(values)
        again = cluster_eigenvalues(spec.eigenvalues, weights=spec.multiplicities)
        assert again == spec
        ev = spec.eigenvalues
        for i in range(len(ev)):
            for j in range(i + 1, len(ev)):
                assert abs(ev[i] - ev[j]) > TOL.eig_cluster_tol


class TestGeneralizedEigenspaces:
    def test_example41(self):
        spaces = generalized_eigenspaces(EX41_C)
        assert [s.shape[1] for s in spaces] == [3, 3]
        assert same_span(spaces[0], EX41_G_MINUS)
        assert same_span(spaces[1], EX41_G_PLUS)

    def test_diagonalizable(self):
        c = np.diag([2.0, 2.0, 5.0])
        spaces = generalized_eigenspaces(c)
        assert same_span(spaces[0], np.eye(3)[:, :2])
        assert same_span(spaces[1], np.eye(3)[:, 2:])

    def test_intro_matches_given_transform(self):
        spaces = generalized_eigenspaces(INTRO_C)
        assert [s.shape[1] for s in spaces] == [2, 1]
        assert same_span(spaces[0], INTRO_S[:, :2])
        assert same_span(spaces[1], INTRO_S[:, 2:])

    def test_split_defective_eigenvalue_detected(self, rng):
        p = random_invertible(rng, 3, 5.0)
        c = p @ np.diag([1.0, 1.0], 1) @ np.linalg.inv(p)
        strict = spectrum(c)
        if len(strict) > 1:  # eps**(1/3) error exceeded the strict radius
            with pytest.raises(DefectiveTolerance):
                generalized_eigenspaces(c, strict)
        spec, spaces = spectral_split(c)
        assert spec.multiplicities == (3,)

    def test_wrong_multiplicity(self):
        with pytest.raises(DefectiveTolerance):
            generalized_eigenspace(np.diag([1.0, 2.0, 3.0]), 1.0, 2)

    def test_jordan_block_needs_power(self):
        c = np.zeros((4, 4))
        c[:3, :3] = np.diag([1.0, 1.0], 1)
        c[3, 3] = 1.0
        spaces = generalized_eigenspaces(c)
        assert [s.shape[1] for s in spaces] == [3, 1]

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**6))
    def test_block_diagonalizes(self, seed):
        rng = np.random.default_rng(seed)
        sizes = list(rng.integers(1, 4, size=int(rng.integers(1, 4))))
        n = sum(sizes)
        # Jordan-type blocks with distinct eigenvalues, then a random similarity
        d = np.zeros((n, n), dtype=complex)
        off = 0
        for i, k in enumerate(sizes):
            d[off:off + k, off:off + k] = (i + 1) * np.eye(k) + np.diag(rng.integers(0, 2, k - 1), 1)
            off += k
        p = random_invertible(rng, n, 20.0)
        c = p @ d @ np.linalg.inv(p)
        spec, spaces = spectral_split(c)
        assert sorted(spec.multiplicities) == sorted(sizes)
        s = np.hstack(spaces)
        assert np.linalg.matrix_rank(s) == n
        t = np.linalg.solve(s, c @ s)
        start = 0
        for lam, m in zip(spec.eigenvalues, spec.multiplicities):
            mask = np.ones(n, bool)
            mask[start:start + m] = False
            assert np.abs(t[start:start + m][:, mask]).max(initial=0.0) <= TOL.residual_tol
            # sole eigenvalue lam, checked as nilpotency of the shifted block
            # (computed eigenvalues of a Jordan block are only eps**(1/m) accurate)
            block = t[start:start + m, start:start + m]
            shifted = np.linalg.matrix_power(block - lam * np.eye(m), m)
            assert np.abs(shifted).max() <= 1e-10 * max(1.0, np.abs(block).max()) ** m
            start += m


def test_canonical_basis_coordinate_subspace():
    e = np.eye(5)
    w = np.linalg.qr(e[:, [1, 3]] @ np.array([[1.0, 2.0], [3.0, -1.0]]))[0]
    assert np.allclose(canonical_basis(w), e[:, [1, 3]])
