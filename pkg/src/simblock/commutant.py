"""
Block diagonalization by an invertible matrix through a commuting matrix.

Any matrix ``C`` commuting with the whole family leaves each of its
generalized eigenspaces invariant under every member, so stacking bases of
those eigenspaces gives a similarity that splits the family into one block
per distinct eigenvalue of ``C``.
"""
from __future__ import annotations

import logging

import numpy as np

from .errors import DefectiveTolerance, OnlyScalarSpectrum, VerificationFailed
from .invariant import DEFAULT_SEARCH, SearchConfig
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix_set,
    max_abs,
    nullspace,
    spectral_split,
)
from .report import BD, BlockPartition, DecompositionReport, Transform
from .triangularize import default_names
from .verify import block_pattern_residual

log = logging.getLogger(__name__)


def commutator_system(matrices) -> np.ndarray:
    """Stack of ``I (x) A - A^T (x) I`` over the family.

    With column-major vectorization, ``vec(AM - MA)`` equals this block
    applied to ``vec(M)``.
    """
    mats = as_matrix_set(matrices)
    n = mats[0].shape[0]
    eye = np.eye(n)
    return np.vstack([np.kron(eye, a) - np.kron(a.T, eye) for a in mats])


def commutant_basis(matrices, tol: Tolerances = DEFAULT_TOL) -> list:
    """Basis of the matrices commuting with every member of the family.

    Each member is scaled to unit norm first (this does not change the
    commutant but keeps small members from drowning under the relative
    rank cut).  The identity is always in the span, so the basis is never
    empty.
    """
    mats = as_matrix_set(matrices)
    n = mats[0].shape[0]
    scaled = [a / np.linalg.norm(a) if np.linalg.norm(a) > 0 else a for a in mats]
    kernel = nullspace(commutator_system(scaled), tol)
    return [kernel[:, k].reshape((n, n), order="F") for k in range(kernel.shape[1])]


def commutator_residual(c, matrices) -> float:
    """Worst ``|CA - AC|_max / (1 + |A|_max)`` over the family."""
    return max(max_abs(c @ a - a @ c) / (1.0 + max_abs(a)) for a in matrices)


def select_commuting_matrix(basis, cfg: SearchConfig = DEFAULT_SEARCH, tol: Tolerances = DEFAULT_TOL):
    """Pick a member of span(basis) with as many distinct eigenvalues as
    the samples reveal.

    Distinct eigenvalues are counted after :func:`spectral_split`, so the
    copies of a defective eigenvalue count once.  Candidates whose
    eigenspaces cannot be separated are skipped.  Candidates are the basis
    members in order, then ``n_seed_combinations``
    random real combinations; complex combinations are tried only if no
    candidate has two distinct eigenvalues.  The first candidate attaining
    the maximum wins.

    Returns
    -------
    (ndarray, Spectrum)

    Raises
    ------
    OnlyScalarSpectrum
        If every candidate has a single eigenvalue.
    """
    basis = [np.asarray(b) for b in basis]
    if not basis:
        raise ValueError("empty commutant basis")
    rng = np.random.default_rng(cfg.rng_seed)

    def best_of(candidates):
        best, best_spec = None, None
        for c in candidates:
            try:
                spec, _ = spectral_split(c, tol)
            except DefectiveTolerance:
                continue
            if best_spec is None or len(spec) > len(best_spec):
                best, best_spec = c, spec
        return best, best_spec

    real = [rng.uniform(-1.0, 1.0, len(basis)) for _ in range(cfg.n_seed_combinations)]
    candidates = basis + [sum(w * b for w, b in zip(coeffs, basis)) for coeffs in real]
    c, spec = best_of(candidates)
    if spec is None or len(spec) < 2:
        cplx = [
            rng.uniform(-1.0, 1.0, len(basis)) + 1j * rng.uniform(-1.0, 1.0, len(basis))
            for _ in range(cfg.n_seed_combinations)
        ]
        c, spec = best_of([sum(w * b for w, b in zip(coeffs, basis)) for coeffs in cplx])
    if spec is None or len(spec) < 2:
        raise OnlyScalarSpectrum(
            "every sampled commuting matrix has a single eigenvalue; "
            "no block diagonalization by an invertible matrix was found"
        )
    return c, spec


def witness_matrix(s, sizes) -> np.ndarray:
    """``S (1 I_{n1} (+) 2 I_{n2} (+) ...) S^{-1}``: commutes with any family
    that ``S`` block diagonalizes with the given block sizes."""
    s = np.asarray(s)
    labels = np.repeat(np.arange(1, len(sizes) + 1), sizes).astype(float)
    return s @ np.diag(labels) @ np.linalg.inv(s)


def _assemble(mats, c, tol, names):
    spec, spaces = spectral_split(c, tol)
    s = np.hstack(spaces)
    transform = Transform(s, np.linalg.inv(s), unitary=False)
    partition = BlockPartition(spec.multiplicities, BD)
    transformed = [np.linalg.solve(s, a @ s) for a in mats]
    residuals = {name: block_pattern_residual(t, partition) for name, t in zip(names, transformed)}
    return spec, transform, partition, transformed, residuals


def block_diagonalize_invertible(
    matrices, cfg: SearchConfig = DEFAULT_SEARCH, tol: Tolerances = DEFAULT_TOL, names=None
) -> DecompositionReport:
    """Invertible ``S`` with every ``S^{-1} A S`` block diagonal.

    Block sizes are the algebraic multiplicities of the chosen commuting
    matrix.

    Raises
    ------
    OnlyScalarSpectrum
        No commuting matrix with two distinct eigenvalues was found.
    VerificationFailed
        The block diagonal check failed, also after one retry with a
        tighter rank cut.
    """
    mats = as_matrix_set(matrices)
    n = mats[0].shape[0]
    if n < 2:
        raise OnlyScalarSpectrum("a 1x1 family cannot be split into blocks")
    names = list(names) if names is not None else default_names(len(mats))
    problem = None
    for attempt, attempt_tol in enumerate((tol, tol.tightened(0.01))):
        basis = commutant_basis(mats, attempt_tol)
        c, spec = select_commuting_matrix(basis, cfg, attempt_tol)
        try:
            spec, transform, partition, transformed, residuals = _assemble(mats, c, attempt_tol, names)
        except DefectiveTolerance as exc:
            problem = str(exc)
        else:
            worst = max(residuals.values())
            if worst <= tol.residual_tol:
                break
            problem = f"{partition} residual {worst:.3g} exceeds {tol.residual_tol:g}"
        log.debug("verification failed on attempt %d: %s", attempt + 1, problem)
    else:
        raise VerificationFailed(problem)
    provenance = {
        "commutant_dim": len(basis),
        "commuting_matrix": c,
        "eigenvalues": list(spec.eigenvalues),
        "multiplicities": list(spec.multiplicities),
        "search": {"rng_seed": cfg.rng_seed, "n_seed_combinations": cfg.n_seed_combinations},
        "retried_with_tighter_rank_tol": attempt > 0,
    }
    return DecompositionReport("C", transform, partition, transformed, residuals, names, provenance)
