"""
Dense complex linear algebra kernels with explicit tolerances.

Subspaces are plain ``(n, d)`` arrays with orthonormal columns; ``d == 0`` is
the trivial subspace.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DefectiveTolerance, DimensionMismatch, SingularMatrix


@dataclass(frozen=True)
class Tolerances:
    """Numerical cutoffs used throughout the package.

    Parameters
    ----------
    rank_tol
        Relative singular value cutoff for rank decisions.
    residual_tol
        Absolute bound on entries that a block pattern requires to vanish.
    eig_cluster_tol
        Absolute radius within which eigenvalues are merged.
    """

    rank_tol: float = 1e-10
    residual_tol: float = 1e-8
    eig_cluster_tol: float = 1e-7

    def __post_init__(self):
        for name in ("rank_tol", "residual_tol", "eig_cluster_tol"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value!r}")

    def tightened(self, factor: float = 0.01) -> "Tolerances":
        return Tolerances(self.rank_tol * factor, self.residual_tol, self.eig_cluster_tol)


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Spectrum:
    """Distinct eigenvalues (sorted by real, then imaginary part) with
    their algebraic multiplicities."""

    eigenvalues: tuple
    multiplicities: tuple

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def dim(self) -> int:
        return int(sum(self.multiplicities))


def as_matrix(a, square: bool = False) -> np.ndarray:
    """Validate ``a`` as a finite 2-d numeric array (real or complex)."""
    m = np.asarray(a)
    if m.dtype.kind not in "biufc":
        raise TypeError(f"expected a numeric array, got dtype {m.dtype}")
    if m.dtype.kind != "c":
        m = m.astype(float)
    else:
        m = m.astype(complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"expected a nonempty 2-d matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def as_matrix_set(matrices) -> list:
    """Validate a nonempty family of equally sized square matrices."""
    mats = [as_matrix(a, square=True) for a in matrices]
    if not mats:
        raise ValueError("the matrix set is empty")
    n = mats[0].shape[0]
    for a in mats:
        if a.shape != (n, n):
            raise DimensionMismatch(f"mixed matrix sizes: {a.shape} vs {(n, n)}")
    return mats


def common_dtype(matrices):
    return np.result_type(*matrices, float)


def nullspace(m, tol: Tolerances = DEFAULT_TOL, scale: float = None) -> np.ndarray:
    """Orthonormal basis of the numerical null space of ``m``.

    Singular values at or below ``rank_tol * scale`` count as zero, with
    ``scale`` defaulting to sigma_max.  A zero matrix has the whole domain
    as its null space.
    """
    m = np.asarray(m)
    cols = m.shape[1]
    if m.shape[0] == 0 or cols == 0:
        return np.eye(cols, dtype=m.dtype)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(cols, dtype=vh.dtype)
    ref = s[0] if scale is None else scale
    rank = int(np.count_nonzero(s > tol.rank_tol * ref))
    return vh[rank:].conj().T


def numerical_rank(m, tol: Tolerances = DEFAULT_TOL) -> int:
    s = np.linalg.svd(np.asarray(m), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_tol * s[0]))


def orthonormalize(b, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column span of ``b`` (SVD based)."""
    b = np.asarray(b)
    if b.shape[1] == 0:
        return b
    u, s, _ = np.linalg.svd(b, full_matrices=False)
    if s[0] == 0.0:
        return u[:, :0]
    rank = int(np.count_nonzero(s > tol.rank_tol * s[0]))
    return u[:, :rank]


def positive_qr(s):
    """QR factorization with the diagonal of R made real and positive.

    This normalization makes the factorization unique, so it coincides with
    the output of classical Gram-Schmidt on the columns of ``s``.
    """
    q, r = np.linalg.qr(s)
    d = np.diagonal(r).copy()
    phase = np.ones_like(d)
    nz = np.abs(d) > 0
    phase[nz] = d[nz] / np.abs(d[nz])
    q = q * phase[np.newaxis, :]
    r = phase.conj()[:, np.newaxis] * r
    return q, r


def canonical_basis(w, pivot_tol: float = 1e-3) -> np.ndarray:
    """Deterministic orthonormal basis for span(w).

    Row-reduces ``w.T`` choosing pivot coordinates in increasing order, then
    orthonormalizes the reduced rows in pivot order.  Coordinate subspaces
    come back as exact unit vectors, so e.g. span{e1, e4} yields (e1, e4).
    """
    w = np.asarray(w)
    n, d = w.shape
    if d == 0:
        return w
    m = w.T.copy()
    row = 0
    for col in range(n):
        if row == d:
            break
        r = row + int(np.argmax(np.abs(m[row:, col])))
        if abs(m[r, col]) < pivot_tol:
            continue
        m[[row, r]] = m[[r, row]]
        m[row] /= m[row, col]
        others = np.arange(d) != row
        m[others] -= np.outer(m[others, col], m[row])
        m[others, col] = 0.0
        m[row, col] = 1.0
        row += 1
    if row < d:
        # pivots too small everywhere (should not happen for orthonormal input)
        return orthonormalize(w)
    q, _ = positive_qr(m.T)
    return q


def subspace_key(w):
    """Sort key realizing the lexicographic tie-break between subspaces."""
    c = canonical_basis(w)
    flat = np.round(c.T.ravel(), 9) + 0.0
    return (c.shape[1],) + tuple((-abs(x.real), -abs(x.imag)) for x in flat)


def orthogonal_complement(b, n: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(b) in C^n.

    Parameters
    ----------
    b
        ``(n, d)`` basis matrix, ``d <= n``.
    n
        Ambient dimension.
    """
    b = np.asarray(b)
    if b.ndim != 2 or b.shape[0] != n:
        raise DimensionMismatch(f"basis vectors must have length {n}, got shape {b.shape}")
    if b.shape[1] == 0:
        return np.eye(n, dtype=np.result_type(b, float))
    u, s, _ = np.linalg.svd(b, full_matrices=True)
    rank = 0 if s[0] == 0.0 else int(np.count_nonzero(s > tol.rank_tol * s[0]))
    comp = u[:, rank:]
    return canonical_basis(comp)


def invertible_to_unitary(s, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Unitary factor ``Q`` of ``S = QR`` (positive real diagonal on ``R``).

    Raises :class:`SingularMatrix` if a pivot of ``R`` falls below
    ``rank_tol * sigma_max(S)``.
    """
    s = as_matrix(s, square=True)
    smax = np.linalg.norm(s, 2)
    q, r = positive_qr(s)
    pivots = np.abs(np.diagonal(r))
    if smax == 0.0 or np.any(pivots < tol.rank_tol * smax):
        raise SingularMatrix("transform is numerically singular")
    return q


def _cluster_once(values, weights, radius):
    k = len(values)
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        for j in range(i + 1, k):
            if abs(values[i] - values[j]) <= radius:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    reps, mults = [], []
    for members in groups.values():
        w = np.array([weights[i] for i in members], dtype=float)
        v = np.array([values[i] for i in members])
        reps.append(complex(np.sum(w * v) / np.sum(w)))
        mults.append(int(np.sum(w)))
    return reps, mults


def cluster_eigenvalues(values, tol: Tolerances = DEFAULT_TOL, weights=None) -> Spectrum:
    """Merge eigenvalues closer than ``eig_cluster_tol`` (single linkage,
    repeated until the representatives are pairwise separated)."""
    values = [complex(v) for v in values]
    weights = [1] * len(values) if weights is None else list(weights)
    while True:
        reps, mults = _cluster_once(values, weights, tol.eig_cluster_tol)
        if len(reps) == len(values):
            break
        values, weights = reps, mults
    order = sorted(range(len(reps)), key=lambda i: (reps[i].real, reps[i].imag))
    return Spectrum(tuple(reps[i] for i in order), tuple(int(mults[i]) for i in order))


def spectrum(c, tol: Tolerances = DEFAULT_TOL) -> Spectrum:
    """Distinct eigenvalues of ``c`` and their algebraic multiplicities."""
    c = as_matrix(c, square=True)
    return cluster_eigenvalues(np.linalg.eigvals(c), tol)


def generalized_eigenspace(c, eigenvalue, multiplicity: int, tol: Tolerances = DEFAULT_TOL):
    """Orthonormal basis of ker((C - lambda I)^m), m = ``multiplicity``.

    The shifted matrix is divided by max(|C - lambda I|, |C|) before powering and every
    power is cut against unit scale, so a power that is zero up to
    rounding has the full kernel.  Powers are
    taken one at a time and the loop stops at the first power whose kernel
    already reaches ``multiplicity`` (the kernels stabilize at the index of
    the eigenvalue, so higher powers only degrade the rank gap).
    """
    c = as_matrix(c, square=True)
    n = c.shape[0]
    shifted = c - eigenvalue * np.eye(n)
    # the reference scale includes |C| so that a shift leaving only rounding
    # noise is not blown up to unit size
    scale = max(np.linalg.norm(shifted, 2), np.linalg.norm(c, 2))
    if np.linalg.norm(shifted, 2) <= tol.rank_tol * scale:
        basis = np.eye(n, dtype=shifted.dtype)
    else:
        shifted = shifted / scale
        power = np.eye(n, dtype=shifted.dtype)
        basis = np.zeros((n, 0), dtype=shifted.dtype)
        for _ in range(multiplicity):
            power = power @ shifted
            basis = nullspace(power, tol, scale=1.0)
            if basis.shape[1] >= multiplicity:
                break
    if basis.shape[1] != multiplicity:
        raise DefectiveTolerance(
            f"generalized eigenspace of {eigenvalue:.6g} has dimension "
            f"{basis.shape[1]}, expected {multiplicity}"
        )
    return canonical_basis(basis)


def generalized_eigenspaces(c, spec: Spectrum = None, tol: Tolerances = DEFAULT_TOL) -> list:
    """Bases of all generalized eigenspaces of ``c``, in spectrum order.

    Raises :class:`DefectiveTolerance` when a kernel has the wrong
    dimension or when the bases do not assemble into a well-conditioned
    matrix (typical for a defective eigenvalue whose computed copies were
    not merged by the clustering radius).
    """
    if spec is None:
        spec = spectrum(c, tol)
    spaces = [
        generalized_eigenspace(c, lam, m, tol)
        for lam, m in zip(spec.eigenvalues, spec.multiplicities)
    ]
    s = np.hstack(spaces)
    if np.linalg.cond(s) > 1.0 / np.sqrt(tol.rank_tol):
        raise DefectiveTolerance(
            "generalized eigenspaces are numerically dependent; the eigenvalue "
            "clustering radius is too small for this matrix"
        )
    return spaces


def spectral_split(c, tol: Tolerances = DEFAULT_TOL, max_radius: float = None):
    """Spectrum and generalized eigenspaces of ``c``, widening the
    clustering radius tenfold at a time when the strict radius leaves a
    defective eigenvalue split into several computed copies.

    Returns ``(spectrum, spaces)``; raises :class:`DefectiveTolerance` if no
    radius up to ``max_radius`` (default ``1e-3 * max(1, |C|)``) works.
    """
    c = as_matrix(c, square=True)
    if max_radius is None:
        max_radius = 1e-3 * max(1.0, np.linalg.norm(c, 2))
    values = np.linalg.eigvals(c)
    radius = tol.eig_cluster_tol
    while True:
        current = Tolerances(tol.rank_tol, tol.residual_tol, min(radius, 0.5))
        spec = cluster_eigenvalues(values, current)
        try:
            return spec, generalized_eigenspaces(c, spec, current)
        except DefectiveTolerance:
            if radius >= max_radius:
                raise
        radius *= 10.0


def max_abs(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0
