"""Chains, cochains (discrete forms), the natural pairing and discretization.

Chains are sparse integer combinations of oriented cells.  A chain is keyed
either by the positive representative of an oriented simplex/cube (free
chains, as produced by :func:`cubedec.complex.boundary_cube`) or by the
integer index of a cell inside a :class:`~cubedec.complex.CubicComplex`.
Cochains are dense vectors over the positively oriented cell basis of a
complex.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping

import numpy as np

from .errors import DimensionError, NeedsEmbedding


def _reduce_key(key) -> tuple[Hashable, int]:
    """Map an oriented cell to (positive representative, orientation sign)."""
    sign = getattr(key, "sign", None)
    if sign is None or isinstance(key, (int, np.integer)):
        return int(key) if isinstance(key, np.integer) else key, 1
    return key.positive, sign


@dataclass(frozen=True)
class Chain:
    """Integer formal sum of oriented k-cells.

    Coefficients on a negatively oriented cell are stored as the negated
    coefficient on its positive representative; zero entries are dropped.
    """

    dim: int
    coeffs: Mapping[Hashable, int] = field(default_factory=dict)

    def __post_init__(self):
        reduced: dict = {}
        for key, value in self.coeffs.items():
            if int(value) != value:
                raise TypeError(f"chain coefficients must be integers, got {value!r}")
            pos, sign = _reduce_key(key)
            reduced[pos] = reduced.get(pos, 0) + sign * int(value)
        object.__setattr__(self, "coeffs", {k: v for k, v in reduced.items() if v != 0})

    @classmethod
    def from_terms(cls, dim: int, terms: Iterable[tuple[Hashable, int]]) -> "Chain":
        acc: dict = {}
        for key, value in terms:
            pos, sign = _reduce_key(key)
            acc[pos] = acc.get(pos, 0) + sign * int(value)
        return cls(dim, acc)

    @classmethod
    def of(cls, *cells) -> "Chain":
        """Chain with coefficient +1 on each given oriented cell."""
        if not cells:
            raise ValueError("Chain.of needs at least one cell; use Chain(dim) for zero")
        return cls.from_terms(cells[0].dim, ((c, 1) for c in cells))

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(sorted(self.coeffs.items(), key=lambda kv: _sort_key(kv[0])))

    def __getitem__(self, key) -> int:
        pos, sign = _reduce_key(key)
        return sign * self.coeffs.get(pos, 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Chain") -> "Chain":
        return chain_add(self, other)

    def __neg__(self) -> "Chain":
        return chain_negate(self)

    def __sub__(self, other: "Chain") -> "Chain":
        return chain_add(self, chain_negate(other))

    def __mul__(self, m: int) -> "Chain":
        return chain_scale(self, m)

    __rmul__ = __mul__


def _sort_key(key):
    if isinstance(key, int):
        return (0, key)
    return (1, getattr(key, "vertices", ()), getattr(key, "corners", ()))


def chain_add(a: Chain, b: Chain) -> Chain:
    if a.dim != b.dim:
        raise DimensionError(f"cannot add a {a.dim}-chain and a {b.dim}-chain")
    out = dict(a.coeffs)
    for key, value in b.coeffs.items():
        out[key] = out.get(key, 0) + value
    return Chain(a.dim, out)


def chain_negate(a: Chain) -> Chain:
    return Chain(a.dim, {k: -v for k, v in a.coeffs.items()})


def chain_scale(a: Chain, m: int) -> Chain:
    if int(m) != m:
        raise TypeError("chains can only be scaled by integers")
    return Chain(a.dim, {k: int(m) * v for k, v in a.coeffs.items()})


@dataclass(eq=False)
class Cochain:
    """A discrete k-form: one value per positively oriented k-cell.

    Args:
        dim: form degree k.
        values: dense coefficient vector over the complex's k-cell basis.
        primal: False for forms living on the dual complex.
    """

    dim: int
    values: np.ndarray
    primal: bool = True

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 1:
            raise ValueError("cochain values must be a 1-d array")

    def __len__(self):
        return self.values.shape[0]

    def _check(self, other: "Cochain"):
        if other.dim != self.dim or other.primal != self.primal:
            raise DimensionError(f"degree mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return Cochain(self.dim, self.values + other.values, self.primal)

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        return Cochain(self.dim, self.values - other.values, self.primal)

    def __neg__(self) -> "Cochain":
        return Cochain(self.dim, -self.values, self.primal)

    def __mul__(self, a) -> "Cochain":
        return Cochain(self.dim, a * self.values, self.primal)

    __rmul__ = __mul__

    def equals(self, other: "Cochain") -> bool:
        return (self.dim == other.dim and self.primal == other.primal
                and np.array_equal(self.values, other.values))

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    @classmethod
    def zeros(cls, dim: int, size: int, dtype=float, primal: bool = True) -> "Cochain":
        return cls(dim, np.zeros(size, dtype=dtype), primal)

    @classmethod
    def basis(cls, dim: int, size: int, i: int, dtype=np.int64) -> "Cochain":
        """The basis form alpha_i with alpha_i(c_j) = delta_ij."""
        v = np.zeros(size, dtype=dtype)
        v[i] = 1
        return cls(dim, v)


def pairing(omega: Cochain, gamma: Chain, complex=None):
    """Natural pairing [omega, gamma] = sum_i gamma^i omega_i.

    Chains keyed by oriented cells are resolved through ``complex``.
    The sum runs in ascending cell-index order so results are reproducible.
    """
    if omega.dim != gamma.dim:
        raise DimensionError(f"cannot pair a {omega.dim}-form with a {gamma.dim}-chain")
    terms = []
    for key, coeff in gamma.coeffs.items():
        if isinstance(key, int):
            terms.append((key, coeff))
        else:
            if complex is None:
                raise DimensionError("chain is keyed by cells; pass the complex to resolve indices")
            idx, sign = complex.locate(key)
            terms.append((idx, sign * coeff))
    terms.sort()
    if np.issubdtype(omega.values.dtype, np.integer) or omega.values.dtype == object:
        return sum((int(c) * omega.values[i] for i, c in terms), start=0)
    total = 0.0
    for i, c in terms:
        total += c * float(omega.values[i])
    return total


def evaluate(omega: Cochain, cell, complex) -> float:
    """omega(c) for one oriented cell; omega(-c) = -omega(c) by construction."""
    return pairing(omega, Chain.from_terms(omega.dim, [(cell, 1)]), complex)


ContinuousForm = Callable[[np.ndarray, tuple], np.ndarray]


def discretize(form: ContinuousForm, complex, k: int, order: int = 1) -> Cochain:
    """Integrate a continuous k-form over every k-cell of an embedded complex.

    ``form(points, axes)`` returns the component of the form along
    ``dx_axes`` (``axes`` strictly increasing) at each row of ``points``.
    Cells are treated as parallelepipeds spanned by their edge vectors and
    integrated with an ``order``-point tensor Gauss-Legendre rule
    (``order=1`` is the midpoint rule).
    """
    if complex.embedding is None:
        raise NeedsEmbedding("discretization needs vertex coordinates")
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights

    count = complex.count(k)
    out = np.zeros(count)
    if k == 0:
        pts = np.array([complex.embedding[c.corners[0]] for c in complex.cells[0]], dtype=float)
        return Cochain(0, np.asarray(form(pts, ()), dtype=float) * complex.signs(0))

    grids = np.meshgrid(*([nodes] * k), indexing="ij")
    ts = np.stack([g.ravel() for g in grids], axis=1)
    wgrid = np.meshgrid(*([weights] * k), indexing="ij")
    ws = np.prod(np.stack([w.ravel() for w in wgrid], axis=1), axis=1)
    ambient = complex.ambient_dim
    axes_sets = list(itertools.combinations(range(ambient), k))
    for i in range(count):
        origin, frame, sign = complex.cell_frame(k, i)
        pts = origin[None, :] + ts @ frame
        total = 0.0
        for axes in axes_sets:
            jac = np.linalg.det(frame[:, list(axes)])
            if jac == 0.0:
                continue
            vals = np.asarray(form(pts, axes), dtype=float)
            total += jac * float(ws @ vals)
        out[i] = sign * total
    return Cochain(k, out)
