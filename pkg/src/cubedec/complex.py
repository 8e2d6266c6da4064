"""Oriented simplices and cubes, cubic complexes, validation and duality.

A k-cube is stored through a *corner labelling*: ``corners[b]`` is the
vertex sitting at the corner of the unit cube whose coordinates are the
bits of ``b``.  Every labelling determines a Kuhn triangulation of the cube
(one simplex per coordinate permutation) and hence an orientation.  Among
all labellings related by cube symmetries we keep the lexicographically
smallest one; the orientation then collapses to a single ``sign``.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .chains import Chain
from .errors import (DegenerateSimplex, InvalidDimension, NeedsEmbedding,
                     NotIndependent, NotManifold, ParseError)


def permutation_parity(seq: Sequence) -> int:
    """+1 for an even arrangement of ``seq`` relative to sorted order, else -1."""
    seq = list(seq)
    inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class OrientedSimplex:
    """A simplex stored as its sorted vertex tuple plus an orientation sign."""

    vertices: tuple
    sign: int = 1

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def ordered(self) -> tuple:
        """A vertex ordering in this simplex's orientation class."""
        if self.sign == 1 or len(self.vertices) < 2:
            return self.vertices
        v = self.vertices
        return (v[1], v[0]) + v[2:]

    @property
    def positive(self) -> "OrientedSimplex":
        return OrientedSimplex(self.vertices, 1)

    def __neg__(self) -> "OrientedSimplex":
        return OrientedSimplex(self.vertices, -self.sign)


def make_simplex(vertices: Sequence, sign: int = 1) -> OrientedSimplex:
    vertices = tuple(vertices)
    if len(set(vertices)) != len(vertices):
        raise DegenerateSimplex(f"repeated vertex in {vertices}")
    return OrientedSimplex(tuple(sorted(vertices)), sign * permutation_parity(vertices))


def embedded_orientation_sign(simplex: OrientedSimplex, coords: Mapping) -> int:
    """Sign of det(v1 - v0, ..., vk - v0) for a k-simplex embedded in R^k."""
    if coords is None:
        raise NeedsEmbedding("orientation sign needs coordinates")
    k = simplex.dim
    if k == 0:
        return simplex.sign
    pts = np.array([np.atleast_1d(np.asarray(coords[v], dtype=float)) for v in simplex.ordered])
    edges = pts[1:] - pts[0]
    if edges.shape[1] != k:
        raise InvalidDimension(f"a {k}-simplex needs coordinates in R^{k}, got R^{edges.shape[1]}")
    det = np.linalg.det(edges)
    scale = max(1.0, float(np.abs(edges).max()) ** k)
    if abs(det) <= 1e-12 * scale:
        raise NotIndependent(f"vertices of {simplex.ordered} are not geometrically independent")
    return 1 if det > 0 else -1


def _cube_dim(n_corners: int) -> int:
    k = n_corners.bit_length() - 1
    if n_corners < 1 or 1 << k != n_corners:
        raise ValueError(f"a cube has 2^k corners, got {n_corners}")
    return k


def _canonical_labelling(labels: tuple) -> tuple[tuple, int]:
    """Smallest symmetric relabelling of ``labels`` and the determinant of the symmetry."""
    k = _cube_dim(len(labels))
    base = min(range(len(labels)), key=labels.__getitem__)
    axes = sorted(range(k), key=lambda i: labels[base ^ (1 << i)])
    out = []
    for c in range(len(labels)):
        b = base
        for j in range(k):
            if c >> j & 1:
                b ^= 1 << axes[j]
        out.append(labels[b])
    det = permutation_parity(axes) * (-1 if bin(base).count("1") % 2 else 1)
    return tuple(out), det


@dataclass(frozen=True)
class OrientedCube:
    """An oriented k-cube: canonical corner labelling plus a sign.

    ``OrientedCube.from_corners`` accepts any corner labelling and reduces it;
    the raw constructor expects ``corners`` already canonical.
    """

    corners: tuple
    sign: int = 1

    @classmethod
    def from_corners(cls, corners: Sequence, sign: int = 1) -> "OrientedCube":
        corners = tuple(corners)
        if len(set(corners)) != len(corners):
            raise DegenerateSimplex(f"repeated vertex in cube {corners}")
        canon, det = _canonical_labelling(corners)
        return cls(canon, sign * det)

    @classmethod
    def from_cycle(cls, v0, v1, v2, v3, sign: int = 1) -> "OrientedCube":
        """2-cube written as a boundary cycle (v0, v1, v2, v3)."""
        return cls.from_corners((v0, v1, v3, v2), sign)

    @classmethod
    def vertex(cls, v, sign: int = 1) -> "OrientedCube":
        return cls((v,), sign)

    @property
    def dim(self) -> int:
        return _cube_dim(len(self.corners))

    @property
    def vertices(self) -> tuple:
        return tuple(sorted(self.corners))

    @property
    def positive(self) -> "OrientedCube":
        return OrientedCube(self.corners, 1)

    def __neg__(self) -> "OrientedCube":
        return OrientedCube(self.corners, -self.sign)


def kuhn_simplices(labels: Sequence) -> list[OrientedSimplex]:
    """Kuhn triangulation of the labelled cube, oriented by the labelling."""
    labels = tuple(labels)
    k = _cube_dim(len(labels))
    if k == 0:
        return [OrientedSimplex(labels, 1)]
    out = []
    for perm in itertools.permutations(range(k)):
        c = 0
        seq = [labels[0]]
        for j in perm:
            c |= 1 << j
            seq.append(labels[c])
        out.append(make_simplex(seq, permutation_parity(perm)))
    return out


def simplicial_decomposition(cube: OrientedCube, anchor=None) -> list[OrientedSimplex]:
    """k! oriented simplices tiling ``cube``, shared interior faces cancelling.

    By default the Kuhn path triangulation starts at the smallest vertex;
    ``anchor`` picks another corner as the start of every path (for a 2-cube
    this switches the diagonal).
    """
    labels = cube.corners
    sign = cube.sign
    if anchor is not None:
        if anchor not in labels:
            raise ValueError(f"{anchor!r} is not a corner of {labels}")
        b0 = labels.index(anchor)
        labels = tuple(labels[b0 ^ c] for c in range(len(labels)))
        sign *= -1 if bin(b0).count("1") % 2 else 1
    if cube.dim == 0:
        return [OrientedSimplex(labels, sign)]
    return [s if sign == 1 else -s for s in kuhn_simplices(labels)]


def boundary_simplex(s: OrientedSimplex) -> Chain:
    """Alternating sum of the faces of an oriented simplex."""
    if s.dim == 0:
        return Chain(-1)
    v = s.ordered
    return Chain.from_terms(
        s.dim - 1,
        ((make_simplex(v[:i] + v[i + 1:]), (-1) ** i) for i in range(len(v))),
    )


def _simplicial_boundary(simplices: Iterable[OrientedSimplex], dim: int) -> Chain:
    acc = Chain(dim - 1)
    for s in simplices:
        acc = acc + boundary_simplex(s)
    return acc


@lru_cache(maxsize=None)
def _labelled_boundary(labels: tuple) -> tuple:
    """Boundary of the cube oriented by ``labels``, as ((face corners, sign), ...).

    Computed from the simplicial definition: sum the boundaries of the Kuhn
    simplices, then regroup the surviving (k-1)-simplices facet by facet.
    """
    k = _cube_dim(len(labels))
    acc = dict(_simplicial_boundary(kuhn_simplices(labels), k).coeffs)
    out = []
    for j in range(k):
        for side in (0, 1):
            sub = tuple(labels[c] for c in range(len(labels)) if (c >> j & 1) == side)
            coefs = set()
            for ss in kuhn_simplices(sub):
                coefs.add(acc.pop(ss.positive, 0) * ss.sign)
            if len(coefs) != 1 or 0 in coefs:
                raise AssertionError(f"facet {sub} is not consistently covered: {coefs}")
            face = OrientedCube.from_corners(sub, coefs.pop())
            out.append((face.corners, face.sign))
    if acc:
        raise AssertionError(f"interior faces failed to cancel: {acc}")
    return tuple(sorted(out))


def boundary_cube(c: OrientedCube) -> Chain:
    """Boundary of an oriented cube in the oriented (k-1)-cube basis."""
    if c.dim == 0:
        return Chain(-1)
    return Chain.from_terms(
        c.dim - 1,
        ((OrientedCube(corners, s), c.sign) for corners, s in _labelled_boundary(c.corners)),
    )


def faces(cube: OrientedCube, j: int) -> list[tuple[OrientedCube, int]]:
    """j-faces of ``cube`` with their induced orientation signs.

    For j = k-1 the signs are the boundary coefficients.  Lower faces inherit
    the orientation along the first facet (in basis order) that contains them.
    """
    k = cube.dim
    if not 0 <= j < k:
        raise InvalidDimension(f"faces of dimension {j} requested from a {k}-cube")
    facets = sorted(boundary_cube(cube).coeffs.items(), key=lambda kv: (kv[0].vertices, kv[0].corners))
    if j == k - 1:
        return facets
    seen: dict = {}
    for face, s in facets:
        for sub, t in faces(OrientedCube(face.corners, s), j):
            seen.setdefault(sub, t)
    return sorted(seen.items(), key=lambda kv: (kv[0].vertices, kv[0].corners))


def _face_vertex_sets(corners: tuple) -> set[frozenset]:
    """Vertex sets of every face of a labelled cube, itself included."""
    k = _cube_dim(len(corners))
    out = set()
    for fixed in itertools.product((0, 1, None), repeat=k):
        out.add(frozenset(corners[c] for c in range(len(corners))
                          if all(f is None or (c >> j & 1) == f for j, f in enumerate(fixed))))
    return out


# --- embedded comparability -------------------------------------------------

def _oriented_frame(cell, coords) -> tuple[np.ndarray, np.ndarray, int]:
    """(points, edge frame, sign) of an oriented simplex or cube."""
    if isinstance(cell, OrientedSimplex):
        pts = np.array([np.atleast_1d(coords[v]) for v in cell.ordered], dtype=float)
        if cell.dim == 0:
            return pts, np.zeros((0, pts.shape[1])), cell.sign
        return pts, pts[1:] - pts[0], 1
    labels = cell.corners
    pts = np.array([np.atleast_1d(coords[v]) for v in labels], dtype=float)
    path = [0]
    for j in range(cell.dim):
        path.append(path[-1] | 1 << j)
    walk = pts[path]
    return pts, walk[1:] - walk[:-1], cell.sign


def is_comparable(a, b, coords: Mapping | None, tol: float = 1e-9) -> bool:
    """True when the two k-cells span the same k-dimensional affine plane."""
    if coords is None:
        raise NeedsEmbedding("comparability is defined only for embedded cells")
    if a.dim != b.dim:
        return False
    pa, _, _ = _oriented_frame(a, coords)
    pb, _, _ = _oriented_frame(b, coords)
    pts = np.vstack([pa, pb])
    return np.linalg.matrix_rank(pts - pts[0], tol=tol) == a.dim


def is_consistent(a, b, coords: Mapping | None, tol: float = 1e-9) -> bool:
    """Comparable cells whose orientations agree inside their common plane."""
    if not is_comparable(a, b, coords, tol):
        return False
    _, fa, sa = _oriented_frame(a, coords)
    _, fb, sb = _oriented_frame(b, coords)
    if a.dim == 0:
        return sa == sb
    q, _ = np.linalg.qr(fa.T)
    da = np.linalg.det(fa @ q) * sa
    db = np.linalg.det(fb @ q) * sb
    return (da > 0) == (db > 0)


# --- complexes ----------------------------------------------------------------

def _cell_order(c: OrientedCube):
    return (c.vertices, c.corners)


class CubicComplex:
    """Finite collection of oriented cubes of dimension 0..n.

    Cells of each dimension are sorted lexicographically by their sorted
    vertex tuple; that order defines the basis of chains and cochains.  The
    stored sign of each cell is its positive orientation in the complex.

    Args:
        cells: per-dimension iterables of OrientedCube.
        embedding: optional mapping vertex id -> coordinates.
        period: optional torus period applied when lifting coordinates.
        name: label written into exported files.
    """

    def __init__(self, cells: Sequence[Iterable[OrientedCube]], embedding: Mapping | None = None,
                 period: float | None = None, name: str = "complex"):
        self.cells = tuple(tuple(sorted(level, key=_cell_order)) for level in cells)
        self.n = len(self.cells) - 1
        self.embedding = None if embedding is None else {v: np.atleast_1d(np.asarray(x, dtype=float))
                                                         for v, x in embedding.items()}
        self.period = period
        self.name = name
        self._index = []
        for k, level in enumerate(self.cells):
            idx = {}
            for i, c in enumerate(level):
                if c.dim != k:
                    raise InvalidDimension(f"{c} listed among {k}-cells")
                if c.corners in idx:
                    raise ValueError(f"duplicate cell {c.vertices}")
                idx[c.corners] = i
            self._index.append(idx)

    @classmethod
    def from_top_cells(cls, top: Iterable[OrientedCube], embedding=None, period=None,
                       name: str = "complex") -> "CubicComplex":
        """Close a set of cells under faces; added faces get sign +1."""
        top = list(top)
        n = max(c.dim for c in top)
        levels: list[dict] = [dict() for _ in range(n + 1)]
        for c in top:
            levels[c.dim][c.corners] = c
        for k in range(n, 0, -1):
            for c in list(levels[k].values()):
                for face in boundary_cube(c.positive).coeffs:
                    levels[k - 1].setdefault(face.corners, face)
        return cls([lv.values() for lv in levels], embedding, period, name)

    def count(self, k: int) -> int:
        return len(self.cells[k]) if 0 <= k <= self.n else 0

    def signs(self, k: int) -> np.ndarray:
        return np.array([c.sign for c in self.cells[k]], dtype=np.int64)

    def locate(self, cube: OrientedCube) -> tuple[int, int]:
        """(index, sign) with cube = sign * stored cell."""
        k = cube.dim
        i = self._index[k][cube.corners]
        return i, cube.sign * self.cells[k][i].sign

    def has(self, cube: OrientedCube) -> bool:
        k = cube.dim
        return k <= self.n and cube.corners in self._index[k]

    def chain(self, terms: Iterable[tuple[OrientedCube, int]] | Chain, dim: int | None = None) -> Chain:
        """Index-keyed chain from oriented cubes (or a cube-keyed Chain)."""
        if isinstance(terms, Chain):
            dim, terms = terms.dim, terms.coeffs.items()
        terms = list(terms)
        if dim is None:
            dim = terms[0][0].dim
        out = []
        for cube, m in terms:
            i, s = self.locate(cube)
            out.append((i, s * m))
        return Chain.from_terms(dim, out)

    @cached_property
    def _incidence(self):
        inc = [[] for _ in range(self.n + 1)]
        missing = []
        for k in range(1, self.n + 1):
            for cell in self.cells[k]:
                row = []
                for face, s in boundary_cube(cell).coeffs.items():
                    if face.corners not in self._index[k - 1]:
                        missing.append((cell, face))
                        continue
                    i, t = self.locate(face)
                    row.append((i, s * t))
                inc[k].append(sorted(row))
        return inc, missing

    def incidence(self, k: int) -> list[list[tuple[int, int]]]:
        """For each k-cell, its (k-1)-faces as (index, relative sign)."""
        if not 1 <= k <= self.n:
            raise InvalidDimension(f"incidence is defined for 1 <= k <= {self.n}")
        return self._incidence[0][k]

    @property
    def missing_faces(self) -> list:
        return self._incidence[1]

    def cofaces(self, k: int) -> list[list[tuple[int, int]]]:
        """For each k-cell, the (k+1)-cells containing it with relative sign."""
        out = [[] for _ in range(self.count(k))]
        if k < self.n:
            for j, row in enumerate(self.incidence(k + 1)):
                for i, s in row:
                    out[i].append((j, s))
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * self.count(k) for k in range(self.n + 1))

    @property
    def ambient_dim(self) -> int:
        if self.embedding is None:
            raise NeedsEmbedding("complex has no embedding")
        return len(next(iter(self.embedding.values())))

    def lift(self, v, ref: np.ndarray) -> np.ndarray:
        """Coordinates of vertex v, unwrapped to the periodic copy nearest ``ref``."""
        x = self.embedding[v]
        if self.period is None:
            return x
        p = self.period
        return ref + (x - ref + p / 2) % p - p / 2

    def cell_points(self, k: int, i: int, ref: np.ndarray | None = None) -> np.ndarray:
        """Lifted corner coordinates of cell (k, i) in labelling order."""
        if self.embedding is None:
            raise NeedsEmbedding("complex has no embedding")
        corners = self.cells[k][i].corners
        if ref is None:
            ref = self.embedding[corners[0]]
        return np.array([self.lift(v, ref) for v in corners])

    def barycenter(self, k: int, i: int, ref: np.ndarray | None = None) -> np.ndarray:
        return self.cell_points(k, i, ref).mean(axis=0)

    def cell_frame(self, k: int, i: int) -> tuple[np.ndarray, np.ndarray, int]:
        """(origin, k x ambient edge frame, stored sign) of a cell."""
        pts = self.cell_points(k, i)
        frame = np.array([pts[1 << j] - pts[0] for j in range(k)]).reshape(k, pts.shape[1])
        return pts[0], frame, self.cells[k][i].sign

    @cached_property
    def is_manifold(self) -> bool:
        if self.n == 0 or self.missing_faces:
            return False
        return all(len(cf) == 2 for cf in self.cofaces(self.n - 1))


@dataclass
class ValidationReport:
    closed: bool
    intersections: bool
    manifold: bool
    orientable: bool
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.closed and self.intersections and self.manifold and self.orientable

    def as_dict(self) -> dict:
        return {"closed": self.closed, "intersections": self.intersections,
                "manifold": self.manifold, "orientable": self.orientable,
                "ok": self.ok, "problems": list(self.problems)}


def validate_complex(C: CubicComplex, max_problems: int = 20) -> ValidationReport:
    """Check the cubic-complex axioms plus the discrete-manifold conditions."""
    problems: list[str] = []

    def note(msg):
        if len(problems) < max_problems:
            problems.append(msg)

    closed = not C.missing_faces
    for cell, face in C.missing_faces:
        note(f"face {face.vertices} of {cell.vertices} missing")

    by_vertices = {}
    face_sets = {}
    touching = defaultdict(list)
    for k, level in enumerate(C.cells):
        for i, c in enumerate(level):
            key = frozenset(c.vertices)
            by_vertices[key] = (k, i)
            face_sets[(k, i)] = _face_vertex_sets(c.corners)
            for v in c.vertices:
                touching[v].append((k, i))
    intersections = True
    checked = set()
    for v, members in touching.items():
        for a, b in itertools.combinations(members, 2):
            if (a, b) in checked:
                continue
            checked.add((a, b))
            common = frozenset(C.cells[a[0]][a[1]].vertices) & frozenset(C.cells[b[0]][b[1]].vertices)
            if common not in by_vertices or common not in face_sets[a] or common not in face_sets[b]:
                intersections = False
                note(f"cells {C.cells[a[0]][a[1]].vertices} and {C.cells[b[0]][b[1]].vertices} "
                     f"meet in {sorted(common)}, which is not a common face")

    manifold = C.n > 0 and closed
    orientable = closed
    if C.n > 0 and closed:
        for i, cf in enumerate(C.cofaces(C.n - 1)):
            face = C.cells[C.n - 1][i].vertices
            if len(cf) != 2:
                manifold = False
                note(f"({C.n - 1})-cell {face} has {len(cf)} cofaces")
            elif cf[0][1] + cf[1][1] != 0:
                orientable = False
                note(f"({C.n - 1})-cell {face} does not cancel between its cofaces")
    return ValidationReport(closed, intersections, manifold, orientable, problems)


# --- duality -------------------------------------------------------------------

@dataclass
class DualPiece:
    flag: tuple           # ((k, i), (k+1, j), ..., (n, m))
    points: np.ndarray    # lifted barycentres along the flag
    sign: int

    def simplex(self) -> OrientedSimplex:
        return make_simplex(self.flag, self.sign)


@dataclass
class DualCell:
    """Barycentric dual of a primal k-cube: a union of oriented (n-k)-simplices."""

    primal: OrientedCube
    n: int
    pieces: list[DualPiece]

    @property
    def dim(self) -> int:
        return self.n - self.primal.dim

    def boundary(self) -> Chain:
        return _simplicial_boundary((p.simplex() for p in self.pieces), self.dim)


def dual_cell(C: CubicComplex, c: OrientedCube) -> DualCell:
    """Oriented dual cell *c built from barycentres of the flags above c.

    A piece (b(c_k), ..., b(c_n)) is positive when the frame of c followed
    by the piece's own edges is consistent with the local orientation of c_n.
    Vertices carry a sign so that *(+-c_0) = +-c_n.
    """
    if C.embedding is None:
        raise NeedsEmbedding("barycentric duals need an embedding")
    if not C.is_manifold:
        raise NotManifold("duality map is defined on discrete manifolds only")
    k, n = c.dim, C.n
    i0, _ = C.locate(c)
    cofaces = {d: C.cofaces(d) for d in range(k, n)}

    flags = [((k, i0),)]
    for d in range(k, n):
        flags = [f + ((d + 1, j),) for f in flags for j, _ in cofaces[d][f[-1][1]]]

    pts_c = C.cell_points(k, i0)
    ref = pts_c.mean(axis=0)
    pts_c = np.array([C.lift(v, ref) for v in c.corners])
    path = [0]
    for j in range(k):
        path.append(path[-1] | 1 << j)
    frame_c = pts_c[path][1:] - pts_c[path][:-1]

    pieces = []
    for flag in flags:
        bary = np.array([C.barycenter(d, j, ref) for d, j in flag])
        top_pts = C.cell_points(n, flag[-1][1], ref)
        top_frame = np.array([top_pts[1 << j] - top_pts[0] for j in range(n)])
        local = np.sign(np.linalg.det(top_frame)) * C.cells[n][flag[-1][1]].sign
        rows = np.vstack([frame_c.reshape(k, ref.shape[0]), bary[1:] - bary[0]])
        det = np.linalg.det(rows) if n > 0 else 1.0
        sign = int(np.sign(det) * c.sign * local)
        if sign == 0:
            raise NotIndependent(f"degenerate dual piece for flag {flag}")
        pieces.append(DualPiece(flag, bary, sign))
    return DualCell(c, n, pieces)


# --- text serialisation -----------------------------------------------------------

def dump_complex(C: CubicComplex) -> str:
    """Deterministic text form: header, vertex table, per-dimension cell records."""
    lines = ["# cubedec complex v1", f"name {C.name}", f"dim {C.n}",
             "counts " + " ".join(str(C.count(k)) for k in range(C.n + 1)),
             f"period {'none' if C.period is None else repr(float(C.period))}",
             f"embedding {'no' if C.embedding is None else 'yes'}"]
    lines.append(f"vertices {C.count(0)}")
    for cell in C.cells[0]:
        v = cell.corners[0]
        row = [str(v)]
        if C.embedding is not None:
            row += [repr(float(x)) for x in C.embedding[v]]
        lines.append(" ".join(row))
    for k in range(C.n + 1):
        lines.append(f"cells {k} {C.count(k)}")
        for cell in C.cells[k]:
            lines.append(" ".join([f"{cell.sign:+d}"] + [str(v) for v in cell.vertices]))
    return "\n".join(lines) + "\n"


def _labelling_from_graph(vertices: Sequence[int], adjacency: Mapping[int, set]) -> tuple:
    """Canonical corner labelling of a cube given its 1-skeleton."""
    vs = set(vertices)
    k = _cube_dim(len(vs))
    labels: list = [None] * (1 << k)
    labels[0] = min(vs)
    nbrs = sorted(adjacency.get(labels[0], set()) & vs)
    if len(nbrs) != k:
        raise ValueError(f"vertex set {sorted(vs)} is not spanned by a cube of edges")
    for j, v in enumerate(nbrs):
        labels[1 << j] = v
    for c in range(1, 1 << k):
        if labels[c] is not None:
            continue
        bits = [j for j in range(k) if c >> j & 1]
        a, b = labels[c ^ 1 << bits[0]], labels[c ^ 1 << bits[1]]
        skip = labels[c ^ 1 << bits[0] ^ 1 << bits[1]]
        common = (adjacency.get(a, set()) & adjacency.get(b, set()) & vs) - {skip}
        if len(common) != 1:
            raise ValueError(f"vertex set {sorted(vs)} is not spanned by a cube of edges")
        labels[c] = common.pop()
    return tuple(labels)


def load_complex(text: str, source: str | None = None) -> CubicComplex:
    """Inverse of :func:`dump_complex`; raises ParseError with line/column."""
    lines = text.splitlines()
    pos = 0

    def nxt():
        nonlocal pos
        while pos < len(lines):
            line = lines[pos]
            pos += 1
            if line.strip() and not line.lstrip().startswith("#"):
                return pos, line
        raise ParseError("unexpected end of input", pos + 1, 1, source)

    def field(expect):
        ln, line = nxt()
        parts = line.split()
        if parts[0] != expect:
            raise ParseError(f"expected '{expect}', found '{parts[0]}'", ln, line.find(parts[0]) + 1, source)
        return ln, line, parts[1:]

    def as_int(tok, ln, line):
        try:
            return int(tok)
        except ValueError:
            raise ParseError(f"expected integer, found '{tok}'", ln, line.find(tok) + 1, source) from None

    _, _, rest = field("name")
    name = " ".join(rest) or "complex"
    ln, line, rest = field("dim")
    n = as_int(rest[0], ln, line)
    ln, line, rest = field("counts")
    counts = [as_int(t, ln, line) for t in rest]
    if len(counts) != n + 1:
        raise ParseError(f"expected {n + 1} counts", ln, 1, source)
    ln, line, rest = field("period")
    try:
        period = None if rest[0] == "none" else float(rest[0])
    except ValueError:
        raise ParseError(f"bad period '{rest[0]}'", ln, line.find(rest[0]) + 1, source) from None
    _, _, rest = field("embedding")
    embedded = rest[0] == "yes"
    ln, line, rest = field("vertices")
    nv = as_int(rest[0], ln, line)
    embedding = {} if embedded else None
    vertex_ids = []
    for _ in range(nv):
        ln, line = nxt()
        parts = line.split()
        v = as_int(parts[0], ln, line)
        vertex_ids.append(v)
        if embedded:
            try:
                embedding[v] = [float(t) for t in parts[1:]]
            except ValueError:
                raise ParseError("bad coordinate", ln, len(parts[0]) + 2, source) from None
    records: list[list[tuple[int, tuple]]] = []
    for k in range(n + 1):
        ln, line, rest = field("cells")
        if as_int(rest[0], ln, line) != k:
            raise ParseError(f"expected cells of dimension {k}", ln, line.find(rest[0]) + 1, source)
        cnt = as_int(rest[1], ln, line)
        level = []
        for _ in range(cnt):
            ln, line = nxt()
            parts = line.split()
            if parts[0] not in ("+1", "-1", "1"):
                raise ParseError(f"bad sign '{parts[0]}'", ln, line.find(parts[0]) + 1, source)
            vs = tuple(as_int(t, ln, line) for t in parts[1:])
            if len(vs) != 1 << k:
                raise ParseError(f"a {k}-cell needs {1 << k} vertices, got {len(vs)}", ln, 1, source)
            level.append((int(parts[0]), vs))
        records.append(level)
    adjacency: dict[int, set] = defaultdict(set)
    if n >= 1:
        for _, (a, b) in records[1]:
            adjacency[a].add(b)
            adjacency[b].add(a)
    cells = []
    for k, level in enumerate(records):
        out = []
        for sign, vs in level:
            if k <= 1:
                out.append(OrientedCube(tuple(sorted(vs)), sign))
            else:
                try:
                    out.append(OrientedCube(_labelling_from_graph(vs, adjacency), sign))
                except ValueError as exc:
                    raise ParseError(str(exc), 0, 1, source) from None
        cells.append(out)
    return CubicComplex(cells, embedding, period, name)
