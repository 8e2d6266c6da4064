"""Dense linear-algebra references used to cross-check the sparse solvers."""

import numpy as np
from scipy.linalg import null_space, orth


def projector(basis):
    if basis.shape[1] == 0:
        return np.zeros((basis.shape[0], basis.shape[0]))
    return basis @ basis.T


def dense_hodge_projection(bundle, k, w):
    """Orthogonal projections of w onto im d^{k-1}, im delta^{k+1} and ker L_k."""
    size = bundle.size(k)
    if k > 0:
        exact_basis = orth(bundle.d[k - 1].toarray().astype(float))
    else:
        exact_basis = np.zeros((size, 0))
    if k < bundle.n:
        coexact_basis = orth(bundle.d[k].toarray().astype(float).T)
    else:
        coexact_basis = np.zeros((size, 0))
    L = np.zeros((size, size))
    if k > 0:
        D = bundle.d[k - 1].toarray().astype(float)
        L += D @ D.T
    if k < bundle.n:
        D = bundle.d[k].toarray().astype(float)
        L += D.T @ D
    harmonic_basis = null_space(L)
    return (projector(exact_basis) @ w, projector(coexact_basis) @ w,
            projector(harmonic_basis) @ w, harmonic_basis.shape[1])
