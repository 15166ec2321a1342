"""
Simultaneous block triangularization by a unitary matrix.

Builds a composition series one minimal invariant subspace at a time:
each subspace found for the current quotient family is lifted through the
current complement basis, the orthogonal complement of everything found so
far becomes the next quotient coordinates, and the loop repeats until the
quotient family is irreducible.
"""
from __future__ import annotations

import logging

import numpy as np

from .errors import InternalInconsistency, NotTriangularizable
from .invariant import (
    DEFAULT_SEARCH,
    SearchConfig,
    find_minimal_invariant_subspace,
    is_irreducible,
    restrict_to_quotient,
)
from .linalg import DEFAULT_TOL, Tolerances, as_matrix_set, invertible_to_unitary, orthogonal_complement
from .report import BT, BlockPartition, DecompositionReport, Transform
from .verify import block_pattern_residual

log = logging.getLogger(__name__)


def default_names(count: int) -> list:
    return [f"A{i + 1}" for i in range(count)]


def composition_chain(matrices, cfg: SearchConfig = DEFAULT_SEARCH, tol: Tolerances = DEFAULT_TOL):
    """Run the subspace loop and return ``(S, sizes)``.

    ``S`` has orthonormal columns grouped into blocks of the returned sizes;
    the span of the first ``n_1 + ... + n_j`` columns is invariant for every
    j.  Raises :class:`NotTriangularizable` when the family has no proper
    invariant subspace at all.
    """
    mats = as_matrix_set(matrices)
    n = mats[0].shape[0]
    dtype = np.result_type(*mats, float)
    found = np.zeros((n, 0), dtype=dtype)
    complement = np.eye(n, dtype=dtype)
    quotient = mats
    sizes = []
    while complement.shape[1] > 1:
        s = complement.shape[1]
        w = find_minimal_invariant_subspace(quotient, s - 1, cfg, tol)
        if w is None:
            break
        lifted = complement @ w
        found = np.hstack([found, lifted]).astype(np.result_type(found, lifted))
        sizes.append(w.shape[1])
        complement = orthogonal_complement(found, n, tol)
        s_full = np.hstack([found, complement])
        quotient = restrict_to_quotient(mats, s_full, found.shape[1], tol)
        log.debug("found invariant subspace of dimension %d, %d left", w.shape[1], complement.shape[1])
    if not sizes:
        raise NotTriangularizable("no simultaneous block triangularization: no common invariant subspace")
    sizes.append(complement.shape[1])
    return np.hstack([found, complement]), sizes


def block_triangularize(
    matrices, cfg: SearchConfig = DEFAULT_SEARCH, tol: Tolerances = DEFAULT_TOL, names=None
) -> DecompositionReport:
    """Unitary ``U`` with every ``U A U*`` block upper triangular.

    Parameters
    ----------
    matrices
        Nonempty family of ``n x n`` matrices, ``n >= 2``.
    cfg, tol
        Search configuration and tolerances.
    names
        Optional labels used as keys of ``report.residuals``.

    Returns
    -------
    DecompositionReport
        ``algorithm == "A"``; ``report.transform.u`` is ``U``.

    Raises
    ------
    NotTriangularizable
        If the family has no proper common invariant subspace.
    """
    mats = as_matrix_set(matrices)
    n = mats[0].shape[0]
    if n < 2:
        raise NotTriangularizable("a 1x1 family has no nontrivial block structure")
    names = list(names) if names is not None else default_names(len(mats))
    s, sizes = composition_chain(mats, cfg, tol)
    q = invertible_to_unitary(s, tol)
    transform = Transform(q, q.conj().T, unitary=True)
    partition = BlockPartition(sizes, BT)
    transformed = [transform.apply(a) for a in mats]
    residuals = {name: block_pattern_residual(t, partition) for name, t in zip(names, transformed)}
    worst = max(residuals.values())
    if worst > tol.residual_tol:
        raise InternalInconsistency(
            f"unitary transform breaks the {partition} pattern (residual {worst:.3g})"
        )
    off = partition.offsets
    irreducible = [
        bool(is_irreducible([t[off[i]:off[i + 1], off[i]:off[i + 1]] for t in transformed], tol))
        for i in range(len(sizes))
    ]
    provenance = {
        "chain_dims": [int(x) for x in off[1:]],
        "blocks_irreducible": irreducible,
        "composition_series_certified": all(irreducible),
        "search": {
            "rng_seed": cfg.rng_seed,
            "n_seed_combinations": cfg.n_seed_combinations,
        },
    }
    if not all(irreducible):
        provenance["search_exhausted"] = True
    return DecompositionReport("A", transform, partition, transformed, residuals, names, provenance)
