"""Zero-pattern predicates and independent re-checking of reports."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import PartitionMismatch
from .linalg import DEFAULT_TOL, Tolerances, max_abs, numerical_rank
from .report import BD, BlockPartition, DecompositionReport

EIGENVALUE_TOL = 1e-7


def pattern_mask(p: BlockPartition) -> np.ndarray:
    """Boolean mask of the entries the partition requires to be zero."""
    off = p.offsets
    n = p.n
    label = np.empty(n, dtype=int)
    for i in range(len(p)):
        label[off[i]:off[i + 1]] = i
    row, col = np.meshgrid(label, label, indexing="ij")
    if p.kind == BD:
        return row != col
    return row > col


def block_pattern_residual(m, p: BlockPartition) -> float:
    """Largest magnitude among the entries of ``m`` that ``p`` forces to
    vanish (strictly lower blocks for BT, all off-diagonal blocks for BD)."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != p.n:
        raise PartitionMismatch(f"partition {p} does not fit a matrix of shape {m.shape}")
    return max_abs(m[pattern_mask(p)])


def _power_sums_match(a, b, rel_tol):
    n = a.shape[0]
    scale = max(np.linalg.norm(a, 2), np.linalg.norm(b, 2), 1.0)
    pa = np.eye(n)
    pb = np.eye(n)
    for _ in range(n):
        pa = pa @ (a / scale)
        pb = pb @ (b / scale)
        if abs(np.trace(pa) - np.trace(pb)) > rel_tol * n:
            return False
    return True


def spectra_match(a, b, atol: float = EIGENVALUE_TOL) -> bool:
    """True when ``a`` and ``b`` have the same eigenvalue multiset.

    Eigenvalues are matched by an optimal assignment and compared within
    ``atol``.  Defective eigenvalues are computed with error of order
    eps**(1/k), so a failed match is re-checked on the power sums
    tr(A^k), k = 1..n, which determine the multiset and stay well
    conditioned.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    ea = np.linalg.eigvals(a)
    eb = np.linalg.eigvals(b)
    cost = np.abs(ea[:, np.newaxis] - eb[np.newaxis, :])
    rows, cols = linear_sum_assignment(cost)
    if cost[rows, cols].max(initial=0.0) <= atol:
        return True
    return _power_sums_match(a, b, atol)


@dataclass
class ValidationResult:
    ok: bool
    reasons: list = field(default_factory=list)
    residuals: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def validate_report(matrices, report: DecompositionReport, tol: Tolerances = DEFAULT_TOL) -> ValidationResult:
    """Recompute everything a report claims from the inputs alone.

    Checks that the transform is square and nonsingular, that the cached
    inverse is consistent, unitarity when flagged, the zero pattern of every
    transformed matrix, eigenvalue preservation and ``t >= 2``.
    """
    mats = [np.asarray(a) for a in matrices]
    reasons = []
    residuals = {}
    names = list(report.names) if report.names else [f"A{i + 1}" for i in range(len(mats))]
    s = np.asarray(report.transform.s)
    n = mats[0].shape[0] if mats else 0
    p = report.partition

    if len(names) != len(mats):
        reasons.append(f"report covers {len(names)} matrices, input has {len(mats)}")
    if s.shape != (n, n):
        reasons.append(f"transform shape {s.shape} does not match n={n}")
        return ValidationResult(False, reasons, residuals)
    if p.n != n:
        reasons.append(f"partition {p} does not sum to n={n}")
        return ValidationResult(False, reasons, residuals)
    if len(p) < 2:
        reasons.append(f"trivial partition {p}: at least two blocks are required")
    if not np.all(np.isfinite(s)) or numerical_rank(s, tol) < n:
        reasons.append("singular transform")
        return ValidationResult(False, reasons, residuals)

    cond = np.linalg.cond(s)
    if report.transform.s_inv is not None:
        s_inv = np.asarray(report.transform.s_inv)
        drift = max_abs(s_inv @ s - np.eye(n))
        if s_inv.shape != (n, n) or drift > max(tol.residual_tol, 1e-12 * cond):
            reasons.append(f"cached inverse is inconsistent (|S^-1 S - I| = {drift:.3g})")
    if report.transform.unitary:
        drift = max_abs(s.conj().T @ s - np.eye(n))
        if drift > 1e-10 * n:
            reasons.append(f"transform flagged unitary but |S*S - I| = {drift:.3g}")

    for name, a in zip(names, mats):
        t = np.linalg.solve(s, a @ s)
        r = block_pattern_residual(t, p)
        residuals[name] = r
        if r > tol.residual_tol:
            reasons.append(f"{name}: {p.kind} pattern residual {r:.3g} exceeds {tol.residual_tol:g}")
        if not spectra_match(a, t):
            reasons.append(f"{name}: eigenvalues not preserved by the transform")
    return ValidationResult(not reasons, reasons, residuals)
