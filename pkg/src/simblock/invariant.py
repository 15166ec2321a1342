"""
Common invariant subspaces of a family of square matrices.

The search for a minimal common invariant subspace works on the unital
algebra generated by the family:

* the algebra is spun up from the identity; if it is the full matrix
  algebra the family is irreducible (Burnside), which certifies that no
  proper invariant subspace exists;
* otherwise its radical is read off the trace form, and the socle (the
  common kernel of the radical) is a semisimple invariant subspace;
* orbit closures of eigenvectors of generic algebra elements restricted to
  the socle are minimal invariant subspaces.

Each closure is checked again with the Burnside test and shrunk recursively
if it is still reducible, so the returned subspace is always genuinely
invariant.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotInvariant
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix_set,
    canonical_basis,
    cluster_eigenvalues,
    max_abs,
    nullspace,
    orthonormalize,
    subspace_key,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the randomized parts of the subspace search."""

    rng_seed: int = 0
    n_seed_combinations: int = 8
    max_orbit_rounds: Optional[int] = None
    exhaustive_dim_one: bool = True

    def __post_init__(self):
        if self.n_seed_combinations < 1:
            raise ValueError("n_seed_combinations must be at least 1")
        if self.max_orbit_rounds is not None and self.max_orbit_rounds < 1:
            raise ValueError("max_orbit_rounds must be positive")


DEFAULT_SEARCH = SearchConfig()


def _normalized(matrices):
    out = []
    for a in matrices:
        nrm = np.linalg.norm(a, 2)
        out.append(a / nrm if nrm > 0 else a)
    return out


def _extend_basis(q, x, threshold):
    """Append to orthonormal ``q`` the directions of ``x`` not yet spanned.

    Returns the new directions only (possibly zero columns).
    """
    if q.shape[1]:
        x = x - q @ (q.conj().T @ x)
        x = x - q @ (q.conj().T @ x)
    if x.shape[1] == 0:
        return x
    u, s, _ = np.linalg.svd(x, full_matrices=False)
    return u[:, s > threshold]


def invariance_residual(matrices, w) -> float:
    """max over A of ||(I - WW*) A W||_max for orthonormal ``w``."""
    w = np.asarray(w)
    if w.shape[1] == 0:
        return 0.0
    worst = 0.0
    for a in matrices:
        aw = a @ w
        worst = max(worst, max_abs(aw - w @ (w.conj().T @ aw)))
    return worst


def orbit_closure(matrices, v, tol: Tolerances = DEFAULT_TOL, max_rounds: int = None):
    """Smallest subspace containing ``v`` (a vector or a block of vectors)
    that is mapped into itself by every matrix of the family.

    New directions are accepted when their component orthogonal to the
    current basis exceeds ``rank_tol`` (matrices are scaled to unit norm).
    """
    mats = _normalized(as_matrix_set(matrices))
    n = mats[0].shape[0]
    v = np.asarray(v)
    if v.ndim == 1:
        v = v[:, np.newaxis]
    if v.shape[0] != n:
        raise ValueError(f"seed has length {v.shape[0]}, expected {n}")
    dtype = np.result_type(v, *mats)
    q = orthonormalize(v.astype(dtype), tol)
    frontier = q
    rounds = 0
    limit = n if max_rounds is None else max_rounds
    while frontier.shape[1] and q.shape[1] < n and rounds < limit:
        rounds += 1
        grown = []
        for a in mats:
            new = _extend_basis(q, a @ frontier, tol.rank_tol)
            if new.shape[1]:
                q = np.hstack([q, new])
                grown.append(new)
        frontier = np.hstack(grown) if grown else q[:, :0]
    return q


def algebra_basis(matrices, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Frobenius-orthonormal basis of the unital algebra generated by the
    family, returned as an array of shape ``(k, n, n)``.

    Spins the identity under left multiplication by the generators.  A new
    element is kept when its residual exceeds ``residual_tol``.
    """
    mats = _normalized(as_matrix_set(matrices))
    n = mats[0].shape[0]
    dtype = np.result_type(*mats, float)
    first = (np.eye(n, dtype=dtype) / np.sqrt(n)).reshape(n * n, 1)
    q = first
    frontier = [first[:, 0].reshape(n, n)]
    while frontier and q.shape[1] < n * n:
        grown = []
        for x in frontier:
            for a in mats:
                new = _extend_basis(q, (a @ x).reshape(n * n, 1), tol.residual_tol)
                if new.shape[1]:
                    q = np.hstack([q, new])
                    grown.append(new[:, 0].reshape(n, n))
        frontier = grown
    return q.T.reshape(-1, n, n)


def is_irreducible(matrices, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Burnside test: the family has no proper common invariant subspace
    iff the algebra it generates is all of M_n(C)."""
    mats = as_matrix_set(matrices)
    n = mats[0].shape[0]
    if n == 1:
        return True
    return algebra_basis(mats, tol).shape[0] == n * n


def radical_basis(algebra: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Basis of the Jacobson radical of a matrix algebra.

    In characteristic zero the radical is the kernel of the trace form
    (x, y) -> tr(xy) restricted to the algebra.
    """
    gram = np.einsum("iab,jba->ij", algebra, algebra)
    coeffs = nullspace(gram, Tolerances(tol.residual_tol, tol.residual_tol, tol.eig_cluster_tol))
    return np.einsum("ik,iab->kab", coeffs, algebra)


def socle(matrices, algebra=None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the socle: the vectors killed by the radical."""
    mats = as_matrix_set(matrices)
    n = mats[0].shape[0]
    if algebra is None:
        algebra = algebra_basis(mats, tol)
    rad = radical_basis(algebra, tol)
    if rad.shape[0] == 0:
        return np.eye(n, dtype=algebra.dtype)
    stacked = rad.reshape(-1, n)
    y = nullspace(stacked, tol)
    if y.shape[1] == 0:
        log.debug("socle came out empty; falling back to the whole space")
        return np.eye(n, dtype=algebra.dtype)
    return y


def restrict_to_subspace(matrices, w) -> list:
    """Matrices of the family acting on an invariant subspace with
    orthonormal basis ``w`` (i.e. W* A W)."""
    wh = np.asarray(w).conj().T
    return [wh @ a @ w for a in matrices]


def common_eigenvectors(matrices, tol: Tolerances = DEFAULT_TOL) -> list:
    """All maximal common eigenspaces of the family.

    Intersects eigenspaces one matrix at a time:
    E <- E ∩ ker(A_i - lambda I) over the distinct eigenvalues of A_i,
    dropping empty intersections.  Every vector of a returned space spans a
    one-dimensional common invariant subspace.
    """
    mats = as_matrix_set(matrices)
    n = mats[0].shape[0]
    dtype = np.result_type(*mats, complex)
    candidates = [np.eye(n, dtype=dtype)]
    for a in mats:
        spec = cluster_eigenvalues(np.linalg.eigvals(a), tol)
        refined = []
        for e in candidates:
            for lam in spec.eigenvalues:
                k = nullspace((a - lam * np.eye(n)) @ e, tol)
                if k.shape[1]:
                    refined.append(orthonormalize(e @ k, tol))
        candidates = refined
        if not candidates:
            return []
    out = []
    for e in candidates:
        # keep only directions that really are common eigenvectors
        if invariance_residual(mats, e[:, :1]) <= tol.residual_tol:
            out.append(e)
    return out


def _random_unit_square(rng, size):
    return rng.uniform(-1.0, 1.0, size) + 1j * rng.uniform(-1.0, 1.0, size)


def _minimal_inside(mats, w, cfg, tol, depth):
    """Shrink an invariant subspace ``w`` until it is irreducible."""
    if w.shape[1] <= 1:
        return w
    inner = restrict_to_subspace(mats, w)
    if is_irreducible(inner, tol):
        return w
    if depth > w.shape[1]:
        return w
    sub = _search(inner, w.shape[1] - 1, cfg, tol, depth + 1)
    if sub is None:
        return w
    return canonical_basis(orthonormalize(w @ sub, tol))


def _search(mats, max_dim, cfg, tol, depth=0):
    s = mats[0].shape[0]
    if s <= 1:
        return None
    if cfg.exhaustive_dim_one:
        spaces = common_eigenvectors(mats, tol)
        if spaces:
            lines = [canonical_basis(e)[:, :1] for e in spaces]
            return min(lines, key=subspace_key)
    algebra = algebra_basis(mats, tol)
    if algebra.shape[0] == s * s:
        return None
    y = socle(mats, algebra, tol)
    rng = np.random.default_rng(cfg.rng_seed)
    rounds = cfg.max_orbit_rounds
    found = []
    for _ in range(cfg.n_seed_combinations):
        coeffs = _random_unit_square(rng, algebra.shape[0])
        r = np.einsum("k,kab->ab", coeffs, algebra)
        r_y = y.conj().T @ r @ y
        spec = cluster_eigenvalues(np.linalg.eigvals(r_y), tol)
        for lam in spec.eigenvalues:
            z = nullspace(r_y - lam * np.eye(r_y.shape[0]), tol)
            for j in range(z.shape[1]):
                w = orbit_closure(mats, y @ z[:, j], tol, rounds)
                if 0 < w.shape[1] < s:
                    found.append(w)
        if found:
            break
    if not found:
        # socle seeds failed numerically; try eigenvectors of plain
        # combinations of the generators on the whole space
        for _ in range(cfg.n_seed_combinations):
            coeffs = _random_unit_square(rng, len(mats))
            r = sum(c * a for c, a in zip(coeffs, mats))
            _, vecs = np.linalg.eig(r)
            for j in range(s):
                w = orbit_closure(mats, vecs[:, j], tol, rounds)
                if 0 < w.shape[1] < s:
                    found.append(w)
            if found:
                break
    if not found:
        log.debug("reducible family but no proper orbit closure found (s=%d)", s)
        return None
    best_dim = min(w.shape[1] for w in found)
    shrunk = [_minimal_inside(mats, w, cfg, tol, depth) for w in found if w.shape[1] == best_dim]
    shrunk = [canonical_basis(w) for w in shrunk]
    best = min(shrunk, key=subspace_key)
    if best.shape[1] > max_dim:
        return None
    return best


def find_minimal_invariant_subspace(
    matrices, max_dim: int = None, cfg: SearchConfig = DEFAULT_SEARCH, tol: Tolerances = DEFAULT_TOL
):
    """Common invariant subspace of smallest dimension, or ``None``.

    Parameters
    ----------
    matrices
        Family of ``s x s`` matrices.
    max_dim
        Largest acceptable dimension, ``1 <= max_dim < s`` (default ``s - 1``).
    cfg
        Seeding and search options.
    tol
        Numerical tolerances.

    Returns
    -------
    ndarray or None
        ``(s, d)`` orthonormal basis with ``1 <= d <= max_dim``.  ``None``
        means no proper invariant subspace was found; when the family passes
        the Burnside test this is certain.
    """
    mats = as_matrix_set(matrices)
    s = mats[0].shape[0]
    if max_dim is None:
        max_dim = s - 1
    if s < 2 or max_dim < 1:
        return None
    max_dim = min(max_dim, s - 1)
    w = _search(mats, max_dim, cfg, tol)
    if w is None:
        return None
    if invariance_residual(mats, w) > tol.residual_tol:
        log.debug("discarding candidate with invariance residual %.3g", invariance_residual(mats, w))
        return None
    return w


def restrict_to_quotient(matrices, s, d: int, tol: Tolerances = DEFAULT_TOL) -> list:
    """Lower-right ``(n - d) x (n - d)`` blocks of ``S^{-1} A S``.

    The first ``d`` columns of ``s`` must span a common invariant subspace;
    the lower-left block is checked against ``residual_tol``.
    """
    mats = as_matrix_set(matrices)
    s = np.asarray(s)
    n = mats[0].shape[0]
    if s.shape != (n, n):
        raise ValueError(f"transform has shape {s.shape}, expected {(n, n)}")
    out = []
    for a in mats:
        b = np.linalg.solve(s, a @ s)
        lower_left = b[d:, :d]
        if max_abs(lower_left) > tol.residual_tol:
            raise NotInvariant(
                f"first {d} columns are not invariant (residual {max_abs(lower_left):.3g})"
            )
        out.append(b[d:, d:])
    return out
