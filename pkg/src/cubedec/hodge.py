"""Hodge decomposition of discrete forms and harmonic-space extraction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg

from .chains import Cochain
from .errors import RankDecisionError, SolverError
from .operators import OperatorBundle, _check_degree, laplacian
from .torus import TorusMesh, harmonic_fields

RTOL = 1e-12
ZERO_THRESHOLD = 1e-9
AMBIGUOUS_BAND = 1e-6


@dataclass
class HodgeSplit:
    """omega = exact + coexact + harmonic, with solver diagnostics."""

    exact: Cochain
    coexact: Cochain
    harmonic: Cochain
    residual_norm: float
    solver_iterations: int

    def reconstruction(self) -> Cochain:
        return self.exact + self.coexact + self.harmonic

    def orthogonality(self) -> dict:
        e, c, h = self.exact.values, self.coexact.values, self.harmonic.values
        return {"exact_coexact": float(e @ c), "exact_harmonic": float(e @ h),
                "coexact_harmonic": float(c @ h)}


def _solve(A: sp.csr_matrix, b: np.ndarray, project_constants: bool,
           scale: float = 0.0) -> tuple[np.ndarray, int, float]:
    """CG solve of the consistent semidefinite system A x = b.

    Stops once the residual is below RTOL times max(|b|, scale); ``scale``
    (the norm of the form being split) keeps right-hand sides that are pure
    rounding noise from demanding an unreachable relative accuracy.
    """
    if project_constants:
        b = b - b.mean()
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return np.zeros_like(b), 0, 0.0
    iterations = 0

    def count(_):
        nonlocal iterations
        iterations += 1

    maxiter = 10 * A.shape[0]
    x, info = cg(A, b, rtol=RTOL, atol=RTOL * scale, maxiter=maxiter, callback=count)
    if project_constants:
        x = x - x.mean()
    residual = float(np.linalg.norm(A @ x - b)) / max(bnorm, scale)
    if not np.isfinite(residual):
        residual = float("inf")
    if info != 0:
        raise SolverError(f"conjugate gradient stopped after {iterations} iterations "
                          f"with relative residual {residual:.3e}", residual, iterations)
    return x, iterations, residual


def decompose(omega: Cochain, bundle: OperatorBundle) -> HodgeSplit:
    """Split a k-form into its exact, coexact and harmonic parts.

    The exact part is d alpha where delta d alpha = delta omega, the coexact
    part is delta beta where d delta beta = d omega, and the harmonic part is
    what remains.  Both systems are solved with conjugate gradients.
    """
    ops = bundle.for_form(omega)
    _check_degree(omega, ops)
    k, n = omega.dim, ops.n
    w = omega.values.astype(np.float64)
    wnorm = float(np.linalg.norm(w))
    iters = 0
    residual = 0.0
    exact = np.zeros_like(w)
    coexact = np.zeros_like(w)
    if k > 0:
        D = ops.d[k - 1].astype(np.float64)
        A = (D.T @ D).tocsr()
        alpha, it, res = _solve(A, D.T @ w, project_constants=(k == 1), scale=wnorm)
        exact = D @ alpha
        iters += it
        residual = max(residual, res)
    if k < n:
        D = ops.d[k].astype(np.float64)
        A = (D @ D.T).tocsr()
        beta, it, res = _solve(A, D @ w, project_constants=False, scale=wnorm)
        coexact = D.T @ beta
        iters += it
        residual = max(residual, res)
    harmonic = w - exact - coexact
    p = omega.primal
    return HodgeSplit(Cochain(k, exact, p), Cochain(k, coexact, p), Cochain(k, harmonic, p),
                      residual, iters)


def harmonic_basis_1forms(mesh: TorusMesh) -> list[Cochain]:
    """The constant coordinate edge fields, one per axis (integer valued)."""
    return harmonic_fields(mesh)


@dataclass
class RankDecision:
    """Outcome of a numerical kernel-dimension computation."""

    dimension: int
    threshold: float
    largest_zero: float
    smallest_nonzero: float

    @property
    def gap(self) -> float:
        """Ratio between the smallest kept and the largest discarded singular value."""
        if self.largest_zero == 0.0:
            return float("inf")
        return self.smallest_nonzero / self.largest_zero


def harmonic_spectrum(bundle: OperatorBundle, k: int) -> RankDecision:
    """Kernel dimension of L_k from a dense SVD, with the spectral gap used.

    Singular values at most 1e-9 times the largest count as zero.  When a
    singular value falls between 1e-9 and 1e-6 of the largest the decision is
    considered ambiguous and RankDecisionError is raised.
    """
    L = laplacian(bundle, k).astype(np.float64).toarray()
    if L.size == 0:
        return RankDecision(L.shape[0], 0.0, 0.0, 0.0)
    s = np.linalg.svd(L, compute_uv=False)
    smax = float(s[0])
    if smax == 0.0:
        return RankDecision(L.shape[0], 0.0, 0.0, 0.0)
    thr = ZERO_THRESHOLD * smax
    zero = s[s <= thr]
    kept = s[s > thr]
    decision = RankDecision(int(zero.size), thr,
                            float(zero.max()) if zero.size else 0.0,
                            float(kept.min()) if kept.size else 0.0)
    if kept.size and kept.min() <= AMBIGUOUS_BAND * smax:
        raise RankDecisionError(f"singular value {kept.min():.3e} is too close to the "
                                f"threshold {thr:.3e}", decision.gap)
    return decision


def harmonic_dimension(bundle: OperatorBundle, k: int) -> int:
    """dim ker L_k, the dimension of the harmonic k-forms."""
    return harmonic_spectrum(bundle, k).dimension
