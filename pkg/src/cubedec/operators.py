"""Sparse assembly of boundary, coboundary, codifferential, Hodge star and Laplacians.

Two arithmetic modes are supported.  ``"exact"`` keeps every matrix in
int64, so identities such as d∘d = 0 are checked without rounding;
``"float"`` uses float64 for solvers.  The inner product on k-forms is the
plain coefficient dot product, so the codifferential is a transpose.
"""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .chains import Cochain
from .complex import CubicComplex
from .errors import DimensionError, InvalidDimension, NoDual, ParseError

MODES = ("exact", "float")


def _dtype(mode: str):
    if mode not in MODES:
        raise ValueError(f"unknown arithmetic mode {mode!r}; choose from {MODES}")
    return np.int64 if mode == "exact" else np.float64


def assemble_boundary(C: CubicComplex, k: int, dtype=np.int64) -> sp.csr_matrix:
    """Signed incidence matrix: rows are (k-1)-cells, columns k-cells."""
    if not 1 <= k <= C.n:
        raise InvalidDimension(f"boundary of dimension {k} on a {C.n}-complex")
    if C.missing_faces:
        raise InvalidDimension("complex is not closed under faces")
    rows, cols, vals = [], [], []
    for j, row in enumerate(C.incidence(k)):
        for i, s in row:
            rows.append(i)
            cols.append(j)
            vals.append(s)
    return sp.csr_matrix((np.array(vals, dtype=dtype), (rows, cols)),
                         shape=(C.count(k - 1), C.count(k)))


@dataclass
class OperatorBundle:
    """Per-degree operators of one complex.

    ``boundary[k]`` maps k-chains to (k-1)-chains (``boundary[0]`` is None),
    ``d[k]`` maps k-forms to (k+1)-forms, ``delta[k]`` maps k-forms to
    (k-1)-forms, ``inner[k]`` is the Gram matrix of the k-form inner product.
    ``star[k]`` sends primal k-forms to dual (n-k)-forms and ``costar[k]``
    sends dual k-forms back to primal (n-k)-forms; both are None when no
    dual complex is attached.
    """

    complex: CubicComplex
    mode: str
    boundary: list
    d: list
    delta: list
    inner: list
    star: list | None = None
    costar: list | None = None
    dual: "OperatorBundle | None" = None
    _laplacians: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.complex.n

    @property
    def dtype(self):
        return _dtype(self.mode)

    def size(self, k: int) -> int:
        return self.complex.count(k)

    def for_form(self, omega: Cochain) -> "OperatorBundle":
        if omega.primal:
            return self
        if self.dual is None:
            raise NoDual("no dual complex attached to this bundle")
        return self.dual


def build_operators(C: CubicComplex, mode: str = "float", star=None, costar=None,
                    dual_complex: CubicComplex | None = None) -> OperatorBundle:
    dtype = _dtype(mode)
    n = C.n
    boundary = [None] + [assemble_boundary(C, k, dtype) for k in range(1, n + 1)]
    d = [boundary[k + 1].T.tocsr() for k in range(n)]
    d.append(sp.csr_matrix((0, C.count(n)), dtype=dtype))
    inner = [sp.identity(C.count(k), dtype=dtype, format="csr") for k in range(n + 1)]
    # adjoint of d under the inner product: M_{k-1}^{-1} d^T M_k, identity Gram here
    delta = [sp.csr_matrix((0, C.count(0)), dtype=dtype)]
    delta += [(d[k - 1].T @ inner[k]).tocsr() for k in range(1, n + 1)]
    dual = build_operators(dual_complex, mode) if dual_complex is not None else None
    if star is not None:
        star = [s.astype(dtype).tocsr() for s in star]
        costar = [s.astype(dtype).tocsr() for s in costar]
    return OperatorBundle(C, mode, boundary, d, delta, inner, star, costar, dual)


def _check_degree(omega: Cochain, bundle: OperatorBundle):
    if not 0 <= omega.dim <= bundle.n:
        raise DimensionError(f"{omega.dim}-form on a {bundle.n}-complex")
    if len(omega) != bundle.size(omega.dim):
        raise DimensionError(f"{omega.dim}-form has {len(omega)} values, "
                             f"complex has {bundle.size(omega.dim)} cells")


def apply_d(omega: Cochain, bundle: OperatorBundle) -> Cochain:
    """(d omega)(c) = omega(boundary c); zero on top-degree forms."""
    ops = bundle.for_form(omega)
    _check_degree(omega, ops)
    return Cochain(omega.dim + 1, ops.d[omega.dim] @ omega.values, omega.primal)


def apply_delta(omega: Cochain, bundle: OperatorBundle) -> Cochain:
    """Codifferential, the adjoint of d; zero on 0-forms."""
    ops = bundle.for_form(omega)
    _check_degree(omega, ops)
    return Cochain(omega.dim - 1, ops.delta[omega.dim] @ omega.values, omega.primal)


def inner_product(a: Cochain, b: Cochain, bundle: OperatorBundle | None = None):
    if a.dim != b.dim or a.primal != b.primal:
        raise DimensionError(f"inner product of a {a.dim}-form with a {b.dim}-form")
    if len(a) != len(b):
        raise DimensionError("forms live on different complexes")
    if bundle is None:
        return a.values @ b.values
    return a.values @ (bundle.for_form(a).inner[a.dim] @ b.values)


def hodge_star(omega: Cochain, bundle: OperatorBundle) -> Cochain:
    """(omega, c) = (star omega, *c): moves a k-form to the dual (n-k)-cells."""
    if bundle.star is None:
        raise NoDual("Hodge star needs a dual complex; build the bundle with one")
    mats = bundle.star if omega.primal else bundle.costar
    if len(omega) != mats[omega.dim].shape[1]:
        raise DimensionError(f"{omega.dim}-form does not match the star's domain")
    return Cochain(bundle.n - omega.dim, mats[omega.dim] @ omega.values, not omega.primal)


def delta_via_star(omega: Cochain, bundle: OperatorBundle) -> Cochain:
    """delta^{k+1} omega = (-1)^{nk+1} star d star omega, on a primal (k+1)-form."""
    if omega.dim == 0:
        return Cochain(-1, np.zeros(0, dtype=omega.values.dtype))
    k = omega.dim - 1
    sign = -1 if (bundle.n * k + 1) % 2 else 1
    out = hodge_star(apply_d(hodge_star(omega, bundle), bundle), bundle)
    return Cochain(out.dim, sign * out.values, out.primal)


def laplacian(bundle: OperatorBundle, k: int) -> sp.csr_matrix:
    """L_k = delta_{k+1} d_k + d_{k-1} delta_k."""
    if not 0 <= k <= bundle.n:
        raise InvalidDimension(f"Laplacian of degree {k} on a {bundle.n}-complex")
    if k not in bundle._laplacians:
        size = bundle.size(k)
        L = sp.csr_matrix((size, size), dtype=bundle.dtype)
        if k < bundle.n:
            L = L + bundle.delta[k + 1] @ bundle.d[k]
        if k > 0:
            L = L + bundle.d[k - 1] @ bundle.delta[k]
        L = L.tocsr()
        L.sum_duplicates()
        L.sort_indices()
        bundle._laplacians[k] = L
    return bundle._laplacians[k]


# --- triplet export ----------------------------------------------------------------

def basis_hash(C: CubicComplex, k: int) -> str:
    """Short digest of the ordered k-cell basis (vertex tuples and signs)."""
    h = hashlib.sha256()
    for cell in C.cells[k]:
        h.update((",".join(map(str, cell.vertices)) + f"/{cell.sign};").encode())
    return h.hexdigest()[:16]


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def write_operator(matrix, kind: str, k: int, C: CubicComplex, row_dim: int, col_dim: int,
                   stream=None) -> str:
    """Coordinate triplets (row col value) preceded by a self-describing header."""
    M = sp.coo_matrix(matrix)
    order = np.lexsort((M.col, M.row))
    out = stream if stream is not None else io.StringIO()
    out.write("# cubedec operator v1\n")
    out.write(f"complex {C.name}\nkind {kind}\nk {k}\n")
    out.write(f"shape {M.shape[0]} {M.shape[1]}\n")
    out.write(f"rows dim={row_dim} basis={basis_hash(C, row_dim) if 0 <= row_dim <= C.n else '-'}\n")
    out.write(f"cols dim={col_dim} basis={basis_hash(C, col_dim) if 0 <= col_dim <= C.n else '-'}\n")
    out.write(f"nnz {M.nnz}\n")
    for t in order:
        out.write(f"{M.row[t]} {M.col[t]} {_fmt(M.data[t])}\n")
    return out.getvalue() if stream is None else ""


def read_operator(text: str, source: str | None = None) -> tuple[dict, sp.csr_matrix]:
    meta: dict = {}
    rows, cols, vals = [], [], []
    is_int = True
    for ln, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] in ("complex", "kind", "k", "shape", "rows", "cols", "nnz"):
            meta[parts[0]] = parts[1:]
            continue
        if len(parts) != 3:
            raise ParseError("expected 'row col value'", ln, 1, source)
        try:
            rows.append(int(parts[0]))
            cols.append(int(parts[1]))
        except ValueError:
            raise ParseError("row/col must be integers", ln, 1, source) from None
        try:
            v = int(parts[2])
        except ValueError:
            try:
                v = float(parts[2])
                is_int = False
            except ValueError:
                raise ParseError(f"bad value '{parts[2]}'", ln, line.rfind(parts[2]) + 1, source) from None
        vals.append(v)
    if "shape" not in meta:
        raise ParseError("missing 'shape' header", 1, 1, source)
    shape = tuple(int(x) for x in meta["shape"])
    dtype = np.int64 if is_int else np.float64
    M = sp.csr_matrix((np.array(vals, dtype=dtype), (rows, cols)), shape=shape)
    return meta, M
