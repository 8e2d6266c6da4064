"""Structured cubic complexes on the discrete torus T^n_N, n = 1, 2, 3.

Conventions for the positive cells attached to a vertex x:

* edges ``(x, x+e_i)``;
* faces (n = 3) ``f_1 = (x, x+e_2, x+e_2+e_3, x+e_3)``,
  ``f_2 = (x, x+e_3, x+e_3+e_1, x+e_1)``, ``f_3 = (x, x+e_1, x+e_1+e_2, x+e_2)``;
  in two dimensions the single face is ``f_3``;
* the n-cell with barycentre ``x + (e_1 + ... + e_n)/2``, oriented by the
  right-handed frame.

Axes and face types are 0-based in the API: face type ``t`` of a 3-torus is
the face whose normal is ``e_{t+1}`` in the 1-based naming above.

Fields are Cochains; ``to_grid``/``from_grid`` convert them to arrays of
shape ``(types, N, ..., N)`` where ``types`` counts the cell families at a
vertex (n edges, 3 faces, ...).  The named operators below are written as
lattice stencils on those arrays, independently of the assembled matrices.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import scipy.sparse as sp

from .chains import Chain, Cochain, pairing
from .complex import CubicComplex, OrientedCube, permutation_parity
from .errors import DimensionError, ParseError, TooSmall, Unsupported
from .operators import OperatorBundle, build_operators

_FACES_3D = ((1, 2), (2, 0), (0, 1))


def cell_types(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """Axis sequences (in orientation order) of the positive k-cells at a vertex."""
    if k == 0:
        return ((),)
    if k == n:
        return (tuple(range(n)),)
    if k == 1:
        return tuple((i,) for i in range(n))
    if n == 3 and k == 2:
        return _FACES_3D
    raise Unsupported(f"no {k}-cells on a {n}-torus")


class TorusMesh:
    """The complex T^n_N with structured indexing and its half-step dual.

    Args:
        n: dimension, 1..3.
        N: side length, at least 3.
        offset: coordinate shift of the lattice (0 for the primal mesh,
            0.5 for its dual).
    """

    def __init__(self, n: int, N: int, offset: float = 0.0):
        if n not in (1, 2, 3):
            raise Unsupported(f"torus dimension must be 1, 2 or 3, got {n}")
        if N < 3:
            raise TooSmall(f"side length N must be >= 3, got {N}")
        self.n = n
        self.N = N
        self.offset = offset
        self.shape = (N,) * n
        self.types = [cell_types(n, k) for k in range(n + 1)]

        points = np.array(list(np.ndindex(*self.shape)), dtype=np.int64).reshape(-1, n)
        self._points = points
        cells = []
        structured = []
        for k in range(n + 1):
            level = []
            for axes in self.types[k]:
                for x in points:
                    level.append(self.cube(axes, x))
            cells.append(level)
            structured.append(level)
        embedding = {int(self.vertex_id(x)): x.astype(float) + offset for x in points}
        tag = "" if offset == 0 else f"+{offset:g}"
        self.complex = CubicComplex(cells, embedding, period=N, name=f"T{n}_{N}{tag}")
        self.index = []
        for k in range(n + 1):
            idx = np.empty((len(self.types[k]),) + self.shape, dtype=np.int64)
            for pos, cube in enumerate(structured[k]):
                i, s = self.complex.locate(cube)
                assert s == 1
                t, rest = divmod(pos, len(points))
                idx[(t,) + tuple(points[rest])] = i
            self.index.append(idx)

    def vertex_id(self, x) -> int:
        return int(np.ravel_multi_index(tuple(np.mod(x, self.N)), self.shape))

    def cube(self, axes, x, sign: int = 1) -> OrientedCube:
        """Oriented cube at x spanned by ``axes`` (orientation follows their order)."""
        x = np.asarray(x)
        corners = []
        for b in range(1 << len(axes)):
            y = x.copy()
            for j, a in enumerate(axes):
                if b >> j & 1:
                    y[a] += 1
            corners.append(self.vertex_id(y))
        return OrientedCube.from_corners(corners, sign)

    def cell_index(self, k: int, t: int, x) -> int:
        return int(self.index[k][(t,) + tuple(np.mod(x, self.N))])

    def count(self, k: int) -> int:
        return self.complex.count(k)

    # --- fields <-> grids ---------------------------------------------------

    def to_grid(self, omega: Cochain) -> np.ndarray:
        return omega.values[self.index[omega.dim]]

    def from_grid(self, arr, k: int) -> Cochain:
        arr = np.asarray(arr)
        expected = (len(self.types[k]),) + self.shape
        if arr.shape != expected:
            if arr.shape == self.shape and expected[0] == 1:
                arr = arr[None]
            else:
                raise DimensionError(f"grid of shape {arr.shape}, expected {expected}")
        values = np.empty(self.count(k), dtype=arr.dtype)
        values[self.index[k]] = arr
        return Cochain(k, values)

    def field(self, k: int, fn) -> Cochain:
        """Cochain whose value on type t at x is ``fn(t, x)``."""
        arr = np.array([[fn(t, tuple(x)) for x in self._points] for t in range(len(self.types[k]))])
        return self.from_grid(arr.reshape((len(self.types[k]),) + self.shape), k)

    # --- duality -------------------------------------------------------------

    @cached_property
    def dual_mesh(self) -> "TorusMesh":
        """The dual torus, translated by (1/2, ..., 1/2)."""
        return TorusMesh(self.n, self.N, self.offset + 0.5)

    def _star_matrix(self, k: int, target: "TorusMesh", forward: bool) -> sp.csr_matrix:
        n = self.n
        rows, cols, vals = [], [], []
        for t, axes in enumerate(self.types[k]):
            comp = set(range(n)) - set(axes)
            tb = next(u for u, b in enumerate(target.types[n - k]) if set(b) == comp)
            sign = permutation_parity(axes + target.types[n - k][tb])
            shift = np.zeros(n, dtype=np.int64)
            # forward: y = x - sum_{b in B} e_b ; backward: x = y + sum_{b in B} e_b
            if forward:
                for b in comp:
                    shift[b] = -1
            else:
                for a in axes:
                    shift[a] = 1
            for x in self._points:
                rows.append(target.cell_index(n - k, tb, x + shift))
                cols.append(self.cell_index(k, t, x))
                vals.append(sign)
        return sp.csr_matrix((np.array(vals, dtype=np.int64), (rows, cols)),
                             shape=(target.count(n - k), self.count(k)))

    def star_maps(self) -> tuple[list, list]:
        """Signed cell maps primal k -> dual (n-k) and dual k -> primal (n-k)."""
        dual = self.dual_mesh
        star = [self._star_matrix(k, dual, True) for k in range(self.n + 1)]
        costar = [dual._star_matrix(k, self, False) for k in range(self.n + 1)]
        return star, costar

    def operators(self, mode: str = "float") -> OperatorBundle:
        return _cached_operators(self.n, self.N, mode)

    # --- chains ----------------------------------------------------------------

    def path_chain(self, points) -> Chain:
        """1-chain of the lattice path visiting ``points`` (steps of +-e_i)."""
        terms = []
        pts = [np.mod(np.asarray(p), self.N) for p in points]
        for a, b in zip(pts, pts[1:]):
            i, step = self._step(a, b)
            if step == 1:
                terms.append((self.cell_index(1, i, a), 1))
            else:
                terms.append((self.cell_index(1, i, b), -1))
        return Chain.from_terms(1, terms)

    def _step(self, a, b) -> tuple[int, int]:
        diff = np.mod(np.asarray(b) - np.asarray(a), self.N)
        nz = np.nonzero(diff)[0]
        if len(nz) != 1 or diff[nz[0]] not in (1, self.N - 1):
            raise ValueError(f"{tuple(a)} -> {tuple(b)} is not a lattice step")
        i = int(nz[0])
        return i, 1 if diff[i] == 1 else -1

    def face_chain(self, faces) -> Chain:
        """2-chain from (x, face type, sign) triples."""
        return Chain.from_terms(2, ((self.cell_index(2, t, x), s) for x, t, s in faces))

    def cell_chain(self, cells) -> Chain:
        """Top-degree chain from (x, sign) pairs."""
        return Chain.from_terms(self.n, ((self.cell_index(self.n, 0, x), s) for x, s in cells))

    def boundary_of(self, gamma: Chain) -> Chain:
        """Boundary of an index-keyed chain, read off the complex incidence."""
        inc = self.complex.incidence(gamma.dim)
        terms = []
        for j, m in gamma.coeffs.items():
            for i, s in inc[j]:
                terms.append((i, s * m))
        return Chain.from_terms(gamma.dim - 1, terms)


@lru_cache(maxsize=None)
def build_torus(n: int, N: int) -> TorusMesh:
    """Cached constructor for the primal torus mesh."""
    return TorusMesh(n, N)


@lru_cache(maxsize=None)
def _cached_operators(n: int, N: int, mode: str) -> OperatorBundle:
    mesh = build_torus(n, N)
    star, costar = mesh.star_maps()
    return build_operators(mesh.complex, mode, star, costar, mesh.dual_mesh.complex)


# --- lattice stencils ----------------------------------------------------------

def _fwd(a, i):
    return np.roll(a, -1, axis=i) - a


def _bwd(a, i):
    return a - np.roll(a, 1, axis=i)


def _require(mesh: TorusMesh, omega: Cochain, k: int):
    if omega.dim != k:
        raise DimensionError(f"expected a {k}-form, got a {omega.dim}-form")
    if len(omega) != mesh.count(k):
        raise DimensionError("field does not belong to this mesh")


def grad(mesh: TorusMesh, h: Cochain) -> Cochain:
    """Forward differences h(x+e_i) - h(x) on every edge (x, x+e_i)."""
    _require(mesh, h, 0)
    H = mesh.to_grid(h)[0]
    return mesh.from_grid(np.stack([_fwd(H, i) for i in range(mesh.n)]), 1)


def curl(mesh: TorusMesh, j: Cochain) -> Cochain:
    """Circulation around each face: eps^{klm} (j_m(x+e_l) - j_m(x))."""
    if mesh.n == 1:
        raise Unsupported("curl needs n >= 2")
    _require(mesh, j, 1)
    J = mesh.to_grid(j)
    if mesh.n == 2:
        return mesh.from_grid((_fwd(J[1], 0) - _fwd(J[0], 1))[None], 2)
    out = []
    for k in range(3):
        l, m = (k + 1) % 3, (k + 2) % 3
        out.append(_fwd(J[m], l) - _fwd(J[l], m))
    return mesh.from_grid(np.stack(out), 2)


def div2(mesh: TorusMesh, psi: Cochain) -> Cochain:
    """Net flux out of each cell: sum_i psi(f_i + e_i) - psi(f_i)."""
    if mesh.n != 3:
        raise Unsupported("face-to-cell divergence needs n = 3")
    _require(mesh, psi, 2)
    P = mesh.to_grid(psi)
    return mesh.from_grid(sum(_fwd(P[i], i) for i in range(3))[None], 3)


def delta_cell_to_face(mesh: TorusMesh, rho: Cochain) -> Cochain:
    """delta rho(f_i at x) = rho(c - e_i) - rho(c)."""
    if mesh.n != 3:
        raise Unsupported("cell-to-face codifferential needs n = 3")
    _require(mesh, rho, 3)
    R = mesh.to_grid(rho)[0]
    return mesh.from_grid(np.stack([-_bwd(R, i) for i in range(3)]), 2)


def delta_face_to_edge(mesh: TorusMesh, psi: Cochain) -> Cochain:
    """Sum of psi over the faces containing each edge, with orientation.

    In 3d this is eps^{klm} nabla_l psi(f_m) with backward differences; in
    2d it is the orthogonal gradient (nabla_2 psi, -nabla_1 psi).
    """
    if mesh.n == 1:
        raise Unsupported("face-to-edge codifferential needs n >= 2")
    _require(mesh, psi, 2)
    P = mesh.to_grid(psi)
    if mesh.n == 2:
        return mesh.from_grid(np.stack([_bwd(P[0], 1), -_bwd(P[0], 0)]), 1)
    out = []
    for a in range(3):
        l, m = (a + 1) % 3, (a + 2) % 3
        out.append(_bwd(P[m], l) - _bwd(P[l], m))
    return mesh.from_grid(np.stack(out), 1)


def div1(mesh: TorusMesh, j: Cochain) -> Cochain:
    """Net outflow at each vertex, sum_i j(x, x+e_i) - j(x-e_i, x); equals -delta j."""
    _require(mesh, j, 1)
    J = mesh.to_grid(j)
    return mesh.from_grid(sum(_bwd(J[i], i) for i in range(mesh.n))[None], 0)


def line_integral(mesh: TorusMesh, j: Cochain, gamma: Chain):
    return pairing(j, gamma)


def dual_path_integral(mesh: TorusMesh, psi: Cochain, cells) -> float:
    """Sum of a face field over the faces crossed by a path of adjacent cells.

    Crossing face f_i in the +e_i direction counts +psi(f_i), in the -e_i
    direction -psi(f_i).
    """
    if mesh.n != 3:
        raise Unsupported("dual paths of cells need n = 3")
    _require(mesh, psi, 2)
    P = mesh.to_grid(psi)
    total = 0
    pts = [np.mod(np.asarray(c), mesh.N) for c in cells]
    for a, b in zip(pts, pts[1:]):
        i, step = mesh._step(a, b)
        if step == 1:
            total += P[(i,) + tuple(b)]
        else:
            total -= P[(i,) + tuple(a)]
    return total


# --- theorem checks ----------------------------------------------------------------

@dataclass
class TheoremCheck:
    lhs: float
    rhs: float
    equal: bool
    same_sign: bool
    boundary: Chain

    @property
    def note(self) -> str:
        return "boundary theorem" if self.same_sign else "chain identity only"


def _equal(a, b, exact: bool) -> bool:
    if exact:
        return a == b
    return bool(np.isclose(a, b, rtol=1e-12, atol=1e-12 * max(1.0, abs(a), abs(b))))


def stokes_check(mesh: TorusMesh, j: Cochain, faces) -> TheoremCheck:
    """Sum of curl j over faces vs. circulation of j along the boundary chain.

    ``faces`` holds (x, face type, sign) triples.  The left side is summed
    from the curl stencil, the right side by pairing j with the boundary
    chain assembled from the complex incidence.
    """
    if mesh.n < 2:
        raise Unsupported("Stokes check needs n >= 2")
    faces = [(tuple(x), int(t), int(s)) for x, t, s in faces]
    exact = np.issubdtype(j.values.dtype, np.integer)
    C = mesh.to_grid(curl(mesh, j))
    lhs = sum((s * C[(t,) + tuple(np.mod(x, mesh.N))] for x, t, s in faces), start=0)
    gamma = mesh.boundary_of(mesh.face_chain(faces))
    rhs = pairing(j, gamma)
    if exact:
        lhs, rhs = int(lhs), int(rhs)
    same = len({s for _, _, s in faces}) <= 1
    return TheoremCheck(lhs, rhs, _equal(lhs, rhs, exact), same, gamma)


def divergence_theorem_check(mesh: TorusMesh, psi: Cochain, cells) -> TheoremCheck:
    """Sum of div psi over cells vs. flux of psi through the boundary surface."""
    if mesh.n != 3:
        raise Unsupported("divergence theorem check needs n = 3")
    cells = [(tuple(x), int(s)) for x, s in cells]
    exact = np.issubdtype(psi.values.dtype, np.integer)
    D = mesh.to_grid(div2(mesh, psi))[0]
    lhs = sum((s * D[tuple(np.mod(x, mesh.N))] for x, s in cells), start=0)
    surface = mesh.boundary_of(mesh.cell_chain(cells))
    rhs = pairing(psi, surface)
    if exact:
        lhs, rhs = int(lhs), int(rhs)
    same = len({s for _, s in cells}) <= 1
    return TheoremCheck(lhs, rhs, _equal(lhs, rhs, exact), same, surface)


# --- potentials ------------------------------------------------------------------

@dataclass
class CirculationCertificate:
    """A closed lattice path along which the edge field has nonzero circulation."""

    cycle: list
    chain: Chain
    circulation: float


def _spanning_tree(mesh: TorusMesh, base):
    """BFS tree over the vertex graph; parent[y] = (x, axis, step)."""
    base = tuple(int(v) for v in np.mod(base, mesh.N))
    parent = {base: None}
    order = [base]
    queue = deque([base])
    while queue:
        x = queue.popleft()
        for i in range(mesh.n):
            for step in (1, -1):
                y = list(x)
                y[i] = (y[i] + step) % mesh.N
                y = tuple(y)
                if y not in parent:
                    parent[y] = (x, i, step)
                    order.append(y)
                    queue.append(y)
    return base, parent, order


def _tree_path(parent, y) -> list:
    path = [y]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]][0])
    return path[::-1]


def potential_from_gradient(mesh: TorusMesh, j: Cochain, basepoint=None, atol: float = 1e-9):
    """Integrate an edge field along a spanning tree and verify every other edge.

    Returns the vertex field h with grad h = j and h(basepoint) = 0, or a
    CirculationCertificate for the first edge that closes a cycle with
    nonzero circulation (oriented so that the circulation is positive).
    Integer fields are checked exactly; float fields to ``atol`` times the
    field's scale.
    """
    _require(mesh, j, 1)
    if basepoint is None:
        basepoint = (0,) * mesh.n
    J = mesh.to_grid(j)
    exact = np.issubdtype(J.dtype, np.integer)
    base, parent, order = _spanning_tree(mesh, basepoint)
    H = np.zeros(mesh.shape, dtype=J.dtype)
    for y in order[1:]:
        x, i, step = parent[y]
        H[y] = H[x] + J[(i,) + x] if step == 1 else H[x] - J[(i,) + y]
    residual = J - np.stack([_fwd(H, i) for i in range(mesh.n)])
    tol = 0 if exact else atol * max(1.0, float(np.abs(J).max(initial=0.0)))
    bad = np.argwhere(np.abs(residual) > tol)
    if len(bad) == 0:
        return mesh.from_grid(H[None], 0)
    i, *x = (int(v) for v in bad[0])
    x = tuple(x)
    y = list(x)
    y[i] = (y[i] + 1) % mesh.N
    y = tuple(y)
    cycle = _tree_path(parent, x) + _tree_path(parent, y)[::-1]
    circulation = residual[(i,) + x]
    circulation = circulation.item() if hasattr(circulation, "item") else circulation
    chain = mesh.path_chain(cycle)
    if circulation < 0:
        cycle = cycle[::-1]
        chain = -chain
        circulation = -circulation
    return CirculationCertificate(cycle, chain, circulation)


def harmonic_fields(mesh: TorusMesh, dtype=np.int64) -> list[Cochain]:
    """Constant unit edge fields: field i is 1 on every edge along axis i, 0 elsewhere."""
    out = []
    for i in range(mesh.n):
        arr = np.zeros((mesh.n,) + mesh.shape, dtype=dtype)
        arr[i] = 1
        out.append(mesh.from_grid(arr, 1))
    return out


# --- text tables -------------------------------------------------------------------

def _fmt_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_field(mesh: TorusMesh, omega: Cochain) -> str:
    """Field table: one ``x_1 .. x_n type value`` row per positive cell.

    ``type`` is the 0-based edge direction or face index (always 0 for
    vertices and top cells).  Rows follow C order of (type, x).
    """
    grid = (mesh if omega.primal else mesh.dual_mesh).to_grid(omega)
    lines = ["# cubedec field v1", f"n {mesh.n}", f"N {mesh.N}", f"k {omega.dim}",
             f"primal {'yes' if omega.primal else 'no'}",
             f"dtype {'int' if np.issubdtype(grid.dtype, np.integer) else 'float'}"]
    for idx in np.ndindex(*grid.shape):
        t, x = idx[0], idx[1:]
        lines.append(" ".join([*map(str, x), str(t), _fmt_value(grid[idx])]))
    return "\n".join(lines) + "\n"


def _header(lines, source):
    meta = {}
    body = []
    for ln, line in enumerate(lines, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if parts[0].isalpha() and len(parts) == 2 and not body:
            meta[parts[0]] = (parts[1], ln)
        else:
            body.append((ln, line, parts))
    return meta, body


def read_field(mesh: TorusMesh, text: str, source: str | None = None) -> Cochain:
    """Inverse of :func:`write_field`.  Missing rows default to zero."""
    meta, body = _header(text.splitlines(), source)
    if "k" not in meta:
        raise ParseError("missing 'k' header", 1, 1, source)
    for key, expect in (("n", mesh.n), ("N", mesh.N)):
        if key in meta and meta[key][0] != str(expect):
            raise ParseError(f"field is for {key}={meta[key][0]}, mesh has {key}={expect}",
                             meta[key][1], len(key) + 2, source)
    try:
        k = int(meta["k"][0])
    except ValueError:
        raise ParseError("'k' must be an integer", meta["k"][1], 3, source) from None
    if not 0 <= k <= mesh.n:
        raise ParseError(f"no {k}-cells on a {mesh.n}-torus", meta["k"][1], 3, source)
    primal = meta.get("primal", ("yes", 0))[0] != "no"
    is_int = meta.get("dtype", ("float", 0))[0] == "int"
    ntypes = len(mesh.types[k])
    grid = np.zeros((ntypes,) + mesh.shape, dtype=np.int64 if is_int else np.float64)
    for ln, line, parts in body:
        if len(parts) != mesh.n + 2:
            raise ParseError(f"expected {mesh.n} coordinates, a type and a value", ln, 1, source)
        try:
            coords = [int(p) for p in parts[:mesh.n + 1]]
        except ValueError:
            bad = next(p for p in parts[:mesh.n + 1] if not p.lstrip("-").isdigit())
            raise ParseError(f"expected integer, found '{bad}'", ln, line.find(bad) + 1, source) from None
        t = coords[-1]
        if not 0 <= t < ntypes:
            raise ParseError(f"type {t} out of range for {k}-cells", ln, line.find(parts[mesh.n]) + 1, source)
        try:
            value = int(parts[-1]) if is_int else float(parts[-1])
        except ValueError:
            raise ParseError(f"bad value '{parts[-1]}'", ln, line.rfind(parts[-1]) + 1, source) from None
        grid[(t,) + tuple(np.mod(coords[:-1], mesh.N))] = value
    omega = (mesh if primal else mesh.dual_mesh).from_grid(grid, k)
    omega.primal = primal
    return omega


def read_cell_list(mesh: TorusMesh, text: str, kind: str, source: str | None = None) -> list:
    """Parse ``x_1 .. x_n type sign`` rows (kind="faces") or ``x_1 .. x_n sign`` rows (kind="cells")."""
    width = mesh.n + (2 if kind == "faces" else 1)
    out = []
    for ln, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if len(parts) != width:
            raise ParseError(f"expected {width} integers per row", ln, 1, source)
        try:
            vals = [int(p) for p in parts]
        except ValueError:
            bad = next(p for p in parts if not p.lstrip("+-").isdigit())
            raise ParseError(f"expected integer, found '{bad}'", ln, line.find(bad) + 1, source) from None
        if vals[-1] not in (1, -1):
            raise ParseError("sign must be +1 or -1", ln, line.rfind(parts[-1]) + 1, source)
        x = tuple(vals[:mesh.n])
        if kind == "faces":
            if not 0 <= vals[mesh.n] < len(mesh.types[2]):
                raise ParseError(f"face type {vals[mesh.n]} out of range", ln,
                                 line.find(parts[mesh.n]) + 1, source)
            out.append((x, vals[mesh.n], vals[-1]))
        else:
            out.append((x, vals[-1]))
    return out
