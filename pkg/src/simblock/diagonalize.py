"""Simultaneous block diagonalization by a unitary matrix.

A family is unitarily block diagonalizable exactly when the family together
with its conjugate transposes is unitarily block triangularizable, so the
triangularization loop is run on that adjoint-closed family.
"""
from __future__ import annotations

import logging

import numpy as np

from .errors import InternalInconsistency, NotDiagonalizable, NotTriangularizable
from .invariant import DEFAULT_SEARCH, SearchConfig
from .linalg import DEFAULT_TOL, Tolerances, as_matrix_set
from .report import BD, BlockPartition, DecompositionReport
from .triangularize import block_triangularize, default_names
from .verify import block_pattern_residual

log = logging.getLogger(__name__)


def adjoin_conjugate_transposes(matrices) -> list:
    """The family followed by the conjugate transposes of its members.

    Duplicates (e.g. Hermitian members) are kept once; entries are compared
    after rounding to 1e-14.
    """
    mats = as_matrix_set(matrices)
    out, seen = [], set()
    for a in mats + [a.conj().T for a in mats]:
        r = np.round(a.astype(complex), 14) + 0.0
        key = (r.real + 0.0).tobytes() + (r.imag + 0.0).tobytes()
        if key not in seen:
            seen.add(key)
            out.append(a)
    return out


def _attempt(mats, gamma, cfg, tol, names):
    tri = block_triangularize(gamma, cfg, tol)
    partition = BlockPartition(tri.partition.sizes, BD)
    transformed = [tri.transform.apply(a) for a in mats]
    residuals = {name: block_pattern_residual(t, partition) for name, t in zip(names, transformed)}
    return tri, partition, transformed, residuals


def block_diagonalize_unitary(
    matrices, cfg: SearchConfig = DEFAULT_SEARCH, tol: Tolerances = DEFAULT_TOL, names=None
) -> DecompositionReport:
    """Unitary ``U`` with every ``U A U*`` block diagonal.

    Raises
    ------
    NotDiagonalizable
        If the adjoint-closed family has no common invariant subspace.
    InternalInconsistency
        If the triangularization of the closed family does not block
        diagonalize the input even after a retry with a tighter rank cut.
    """
    mats = as_matrix_set(matrices)
    names = list(names) if names is not None else default_names(len(mats))
    gamma = adjoin_conjugate_transposes(mats)
    retried = False
    problem = None
    for attempt_tol in (tol, tol.tightened(0.01)):
        try:
            tri, partition, transformed, residuals = _attempt(mats, gamma, cfg, attempt_tol, names)
        except NotTriangularizable as exc:
            raise NotDiagonalizable(
                "no simultaneous block diagonalization by a unitary matrix"
            ) from exc
        except InternalInconsistency as exc:
            problem = str(exc)
        else:
            worst = max(residuals.values())
            if worst <= tol.residual_tol:
                break
            problem = (
                f"adjoint-closed family triangularized but {partition} residual is {worst:.3g}"
            )
        log.debug("%s; retrying with a tighter rank cut", problem)
        retried = True
    else:
        raise InternalInconsistency(problem)
    provenance = dict(tri.provenance)
    provenance["gamma_size"] = len(gamma)
    provenance["retried_with_tighter_rank_tol"] = retried
    return DecompositionReport("B", tri.transform, partition, transformed, residuals, names, provenance)
