"""Projective spaces PG(n, q) with explicit point ranks.

A point is a nonzero coordinate vector over GF(q) up to scalars; we store the
normalized representative (first nonzero coordinate equal to 1) as a tuple of
element codes.  Points are numbered by rank: vectors with more leading zeros
come first, and within a block with fixed leading position the tail digits
are ordered as ascending base-q numerals.  Rank 0 is (0, ..., 0, 1) and the
last rank is (1, q-1, ..., q-1).

Subspaces are kept as reduced row echelon bases, which makes the basis a
canonical key for the subspace.  The heavy counting work (traces of a point
set against all lines or all hyperplanes) runs on numpy lookup tables from
the field layer; spaces too large for tables stay usable through the scalar
paths but refuse the batched scans.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import linalg
from .errors import (
    BadParamsError,
    CentreInHyperplaneError,
    CentreInSetError,
    DimensionMismatchError,
    EmptyInputError,
    NotHyperplaneError,
    RangeError,
    TooLargeError,
)

# caps for materializing full enumerations, in array entries
_COORDS_CAP = 60_000_000
_INCIDENCE_CAP = 40_000_000
_INCIDENCE_SUBSPACE_CAP = 400_000


def gaussian_binomial(m: int, r: int, q: int) -> int:
    """Number of r-dim subspaces of an m-dim vector space over GF(q)."""
    if m < 0 or q < 2:
        raise RangeError(f"bad gaussian binomial arguments m={m}, q={q}")
    if r < 0 or r > m:
        return 0
    out = 1
    for i in range(r):
        out = out * (q ** (m - i) - 1) // (q ** (i + 1) - 1)
    return out


class ProjPoint:
    """A single projective point: rank plus normalized coordinates."""

    __slots__ = ("space", "rank", "coords")

    def __init__(self, space: "ProjectiveSpace", rank: int, coords: tuple):
        self.space = space
        self.rank = rank
        self.coords = coords

    def __eq__(self, other):
        return (isinstance(other, ProjPoint)
                and self.space is other.space and self.rank == other.rank)

    def __hash__(self):
        return hash((id(self.space), self.rank))

    def __repr__(self):
        return f"ProjPoint({self.rank}: {list(self.coords)})"


class ProjectiveSpace:
    """PG(n, q) for a FieldSpec.  Instances are shared per (n, field)."""

    _registry: dict = {}

    def __new__(cls, n, field):
        key = (n, field)
        inst = cls._registry.get(key)
        if inst is None:
            inst = super().__new__(cls)
            cls._registry[key] = inst
        return inst

    def __init__(self, n: int, field):
        if getattr(self, "_ready", False):
            return
        if n < 1:
            raise RangeError(f"projective dimension must be >= 1, got {n}")
        self.n = n
        self.field = field
        self.q = field.q
        self.num_points = (self.q ** (n + 1) - 1) // (self.q - 1)
        # _offsets[i] = rank of the first point with leading position i
        self._offsets = tuple((self.q ** (n - i) - 1) // (self.q - 1)
                              for i in range(n + 1))
        self._powers = tuple(self.q ** (n - j) for j in range(n + 1))
        self._coords = None
        self._incidence = {}
        self._bases = {}
        self._ready = True

    def __repr__(self):
        return f"PG({self.n}, {self.q})"

    # -- scalar point coding ------------------------------------------------

    def normalize(self, coords):
        v = tuple(int(c) for c in coords)
        if len(v) != self.n + 1:
            raise DimensionMismatchError(
                f"expected {self.n + 1} coordinates, got {len(v)}")
        lead = next((i for i, c in enumerate(v) if c), None)
        if lead is None:
            raise EmptyInputError("the zero vector is not a projective point")
        if v[lead] == 1:
            return v
        inv = self.field.inv(v[lead])
        return tuple(self.field.mul(inv, c) for c in v)

    def rank_of(self, coords) -> int:
        v = self.normalize(coords)
        lead = next(i for i, c in enumerate(v) if c)
        tail = 0
        for j in range(lead + 1, self.n + 1):
            tail = tail * self.q + v[j]
        return self._offsets[lead] + tail

    def coords_of(self, rank: int) -> tuple:
        if not 0 <= rank < self.num_points:
            raise RangeError(f"point rank {rank} out of range for {self!r}")
        lead = next(i for i in range(self.n + 1) if self._offsets[i] <= rank)
        tail = rank - self._offsets[lead]
        v = [0] * (self.n + 1)
        v[lead] = 1
        for j in range(self.n, lead, -1):
            tail, v[j] = divmod(tail, self.q)
        return tuple(v)

    def point(self, rank: int) -> ProjPoint:
        return ProjPoint(self, rank, self.coords_of(rank))

    def point_from_coords(self, coords) -> ProjPoint:
        v = self.normalize(coords)
        return ProjPoint(self, self.rank_of(v), v)

    # -- batched point coding -----------------------------------------------

    def _tables(self):
        if not self.field.has_tables:
            raise TooLargeError(
                f"batched scans need field tables, q={self.q} is too large")
        return self.field.tables()

    def normalize_rows(self, arr: np.ndarray) -> np.ndarray:
        """Normalize each row of an (m, n+1) array of element codes."""
        _, mul, _, inv = self._tables()
        arr = np.asarray(arr, dtype=np.int64)
        lead = (arr != 0).argmax(axis=-1)
        lv = np.take_along_axis(arr, lead[..., None], axis=-1)
        if not lv.all():
            raise EmptyInputError("zero vector in point batch")
        return mul[arr, inv[lv]]

    def ranks_from_rows(self, arr: np.ndarray, normalized=False) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.int64)
        if not normalized:
            arr = self.normalize_rows(arr)
        lead = (arr != 0).argmax(axis=-1)
        offs = np.asarray(self._offsets, dtype=np.int64)
        powers = np.asarray(self._powers, dtype=np.int64)
        full = arr @ powers
        return offs[lead] + full - powers[lead]

    def coords_array(self) -> np.ndarray:
        """All normalized points in rank order, shape (num_points, n+1)."""
        if self._coords is None:
            if self.num_points * (self.n + 1) > _COORDS_CAP:
                raise TooLargeError(
                    f"{self!r} has {self.num_points} points, "
                    "too many to materialize")
            q, n = self.q, self.n
            blocks = []
            for lead in range(n, -1, -1):
                size = q ** (n - lead)
                block = np.zeros((size, n + 1), dtype=np.int64)
                block[:, lead] = 1
                ar = np.arange(size, dtype=np.int64)
                for j in range(lead + 1, n + 1):
                    block[:, j] = (ar // q ** (n - j)) % q
                blocks.append(block)
            self._coords = np.concatenate(blocks, axis=0)
        return self._coords

    # -- subspace enumeration -----------------------------------------------

    def num_subspaces(self, dim: int) -> int:
        return gaussian_binomial(self.n + 1, dim + 1, self.q)

    def subspaces(self, dim: int, through=None):
        """Yield all dim-subspaces, optionally only those containing
        `through` (a point rank, ProjPoint, or Subspace).

        The order is deterministic: pivot column sets ascending, free
        entries as ascending base-q odometers.
        """
        if not 0 <= dim <= self.n:
            raise RangeError(f"subspace dimension {dim} out of range")
        if through is None:
            yield from self._subspaces_all(dim)
            return
        base = _coerce_subspace(self, through)
        if base.dim > dim:
            return
        if base.dim == dim:
            yield base
            return
        s = base.dim + 1
        comp = [c for c in range(self.n + 1) if c not in base.pivots]
        quot = ProjectiveSpace(self.n - s, self.field) \
            if self.n - s >= 1 else None
        r_extra = dim + 1 - s
        if quot is None:
            # quotient is a single projective point: only when dim == n == s
            lift = [0] * (self.n + 1)
            lift[comp[0]] = 1
            rows = base.rows + (tuple(lift),)
            yield Subspace(self, rows)
            return
        for small in quot._subspaces_all(r_extra - 1):
            lifted = []
            for row in small.rows:
                amb = [0] * (self.n + 1)
                for c, val in zip(comp, row):
                    amb[c] = val
                lifted.append(tuple(amb))
            yield Subspace(self, base.rows + tuple(lifted))

    def _subspaces_all(self, dim: int):
        r = dim + 1
        m = self.n + 1
        q = self.q
        for pivots in itertools.combinations(range(m), r):
            cells = [(i, c) for i in range(r)
                     for c in range(pivots[i] + 1, m) if c not in pivots]
            for values in itertools.product(range(q), repeat=len(cells)):
                rows = [[0] * m for _ in range(r)]
                for i, p in enumerate(pivots):
                    rows[i][p] = 1
                for (i, c), val in zip(cells, values):
                    rows[i][c] = val
                yield Subspace(self, tuple(tuple(rw) for rw in rows),
                               pivots, canonical=True)

    def line_through(self, a, b) -> "Subspace":
        pa = _coerce_coords(self, a)
        pb = _coerce_coords(self, b)
        sub = Subspace(self, (pa, pb))
        if sub.dim != 1:
            raise BadParamsError("the two points coincide")
        return sub

    def hyperplane(self, covector) -> "Subspace":
        u = self.normalize(covector)
        col = [[c] for c in u]
        rows = linalg.left_kernel(col, self.field)
        return Subspace(self, rows)

    def covector_of(self, sub: "Subspace") -> tuple:
        if sub.dim != self.n - 1:
            raise NotHyperplaneError(
                f"dimension {sub.dim} subspace is not a hyperplane of {self!r}")
        ker = linalg.left_kernel(
            [list(col) for col in zip(*sub.rows)], self.field)
        return self.normalize(ker[0])

    # -- cached incidence (small spaces only) --------------------------------

    def _incidence_ok(self, dim: int) -> bool:
        ns = self.num_subspaces(dim)
        per = gaussian_binomial(dim + 1, 1, self.q)
        return (ns <= _INCIDENCE_SUBSPACE_CAP
                and ns * per <= _INCIDENCE_CAP
                and self.field.has_tables)

    def incidence(self, dim: int) -> np.ndarray:
        """Point ranks of every dim-subspace, row i in enumeration order."""
        got = self._incidence.get(dim)
        if got is not None:
            return got
        if not self._incidence_ok(dim):
            raise TooLargeError(
                f"incidence table for dim {dim} of {self!r} is too large")
        bases = [sub.rows for sub in self._subspaces_all(dim)]
        self._bases[dim] = bases
        r = dim + 1
        add, mul, _, _ = self._tables()
        params = ProjectiveSpace(dim, self.field).coords_array() \
            if dim >= 1 else np.ones((1, 1), dtype=np.int64)
        npar = params.shape[0]
        stack = np.asarray(bases, dtype=np.int64)
        out = np.empty((len(bases), npar), dtype=np.int32)
        step = max(1, _INCIDENCE_CAP // (npar * (self.n + 1) * 4))
        for lo in range(0, len(bases), step):
            hi = min(lo + step, len(bases))
            acc = np.zeros((hi - lo, npar, self.n + 1), dtype=np.int64)
            for j in range(r):
                term = mul[params[None, :, j, None], stack[lo:hi, None, j, :]]
                acc = add[acc, term]
            out[lo:hi] = self.ranks_from_rows(acc, normalized=False)
        self._incidence[dim] = out
        return out

    def subspace_by_index(self, dim: int, idx: int) -> "Subspace":
        if dim not in self._bases:
            self.incidence(dim)
        rows = self._bases[dim][idx]
        return Subspace(self, rows)

    # -- packed keys for line scans ------------------------------------------

    def _pack_width(self):
        digits = 2 * (self.n + 1)
        val = self.q ** digits
        return digits, (1 if val < 2 ** 62 else 2)

    def pack_rows2(self, first: np.ndarray, second: np.ndarray) -> np.ndarray:
        """Pack canonical 2-row bases into integer keys (base-q digits)."""
        digits = np.concatenate([first, second], axis=-1)
        width, words = self._pack_width()
        if words == 1:
            powers = self.q ** np.arange(width, dtype=np.int64)
            return digits @ powers
        half = width // 2
        if self.q ** max(half, width - half) >= 2 ** 62:
            raise TooLargeError(f"line keys of {self!r} do not fit two words")
        p1 = self.q ** np.arange(half, dtype=np.int64)
        p2 = self.q ** np.arange(width - half, dtype=np.int64)
        out = np.empty(digits.shape[:-1] + (2,), dtype=np.int64)
        out[..., 0] = digits[..., :half] @ p1
        out[..., 1] = digits[..., half:] @ p2
        return out

    def unpack_rows2(self, key) -> tuple:
        width, words = self._pack_width()
        vals = []
        if words == 1:
            rem = int(key)
            for _ in range(width):
                rem, d = divmod(rem, self.q)
                vals.append(d)
        else:
            half = width // 2
            rem = int(key[0])
            for _ in range(half):
                rem, d = divmod(rem, self.q)
                vals.append(d)
            rem = int(key[1])
            for _ in range(width - half):
                rem, d = divmod(rem, self.q)
                vals.append(d)
        m = self.n + 1
        return tuple(vals[:m]), tuple(vals[m:])

    def unpack_rows2_bulk(self, keys: np.ndarray) -> np.ndarray:
        """Unpack an array of packed line keys into (N, 2, n+1) basis rows."""
        width, words = self._pack_width()
        keys = np.asarray(keys, dtype=np.int64)
        n_keys = keys.shape[0]
        digits = np.empty((n_keys, width), dtype=np.int64)
        if words == 1:
            rem = keys.copy()
            for j in range(width):
                digits[:, j] = rem % self.q
                rem //= self.q
        else:
            half = width // 2
            rem = keys[:, 0].copy()
            for j in range(half):
                digits[:, j] = rem % self.q
                rem //= self.q
            rem = keys[:, 1].copy()
            for j in range(width - half):
                digits[:, half + j] = rem % self.q
                rem //= self.q
        return digits.reshape(n_keys, 2, self.n + 1)


def _coerce_coords(space, item) -> tuple:
    if isinstance(item, ProjPoint):
        if item.space is not space:
            raise DimensionMismatchError("point from a different space")
        return item.coords
    if isinstance(item, (int, np.integer)):
        return space.coords_of(int(item))
    return space.normalize(item)


def _coerce_subspace(space, item) -> "Subspace":
    if isinstance(item, Subspace):
        if item.space is not space:
            raise DimensionMismatchError("subspace from a different space")
        return item
    return Subspace(space, (_coerce_coords(space, item),))


class Subspace:
    """A projective subspace held as its canonical RREF basis."""

    __slots__ = ("space", "rows", "pivots", "_ranks")

    def __init__(self, space, rows, pivots=None, *, canonical=False):
        self.space = space
        if canonical:
            self.rows = tuple(tuple(r) for r in rows)
            self.pivots = tuple(pivots)
        else:
            red, piv = linalg.rref(rows, space.field)
            if not red:
                raise EmptyInputError("subspace needs at least one point")
            if len(red[0]) != space.n + 1:
                raise DimensionMismatchError(
                    f"rows of length {len(red[0])} in {space!r}")
            self.rows = red
            self.pivots = piv
        self._ranks = None

    @property
    def dim(self) -> int:
        return len(self.rows) - 1

    @property
    def num_points(self) -> int:
        return gaussian_binomial(self.dim + 1, 1, self.space.q)

    def contains(self, item) -> bool:
        v = _coerce_coords(self.space, item)
        return linalg.in_row_space(v, self.rows, self.pivots,
                                   self.space.field)

    __contains__ = contains

    def point_ranks(self) -> np.ndarray:
        """Sorted ranks of all points on the subspace."""
        if self._ranks is not None:
            return self._ranks
        space = self.space
        if self.dim == 0:
            ranks = np.asarray([space.rank_of(self.rows[0])], dtype=np.int64)
        elif space.field.has_tables:
            add, mul, _, _ = space._tables()
            params = ProjectiveSpace(self.dim, space.field).coords_array()
            basis = np.asarray(self.rows, dtype=np.int64)
            acc = np.zeros((params.shape[0], space.n + 1), dtype=np.int64)
            for j in range(len(self.rows)):
                acc = add[acc, mul[params[:, j, None], basis[None, j, :]]]
            ranks = np.sort(space.ranks_from_rows(acc, normalized=False))
        else:
            field = space.field
            seen = set()
            params = ProjectiveSpace(self.dim, field)
            for prank in range(params.num_points):
                coeff = params.coords_of(prank)
                vec = [0] * (space.n + 1)
                for c, row in zip(coeff, self.rows):
                    if c:
                        for j, x in enumerate(row):
                            vec[j] = field.add(vec[j], field.mul(c, x))
                seen.add(space.rank_of(vec))
            ranks = np.asarray(sorted(seen), dtype=np.int64)
        self._ranks = ranks
        return ranks

    def point_set(self) -> "PointSet":
        return PointSet(self.space, self.point_ranks())

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.space is other.space
                and self.rows == other.rows)

    def __hash__(self):
        return hash((id(self.space), self.rows))

    def __lt__(self, other):
        return self.rows < other.rows

    def __repr__(self):
        return f"Subspace(dim={self.dim}, rows={[list(r) for r in self.rows]})"


def span(space, *items) -> Subspace:
    """Smallest subspace containing the given points and subspaces."""
    rows = []
    for item in items:
        if isinstance(item, Subspace):
            if item.space is not space:
                raise DimensionMismatchError("subspace from a different space")
            rows.extend(item.rows)
        elif isinstance(item, PointSet):
            rows.extend(space.coords_of(r) for r in item)
        else:
            rows.append(_coerce_coords(space, item))
    if not rows:
        raise EmptyInputError("span of nothing")
    return Subspace(space, rows)


def meet(a: Subspace, b: Subspace):
    """Intersection of two subspaces, or None when it is empty."""
    if a.space is not b.space:
        raise DimensionMismatchError("subspaces from different spaces")
    field = a.space.field
    stacked = [list(r) for r in a.rows] + [list(r) for r in b.rows]
    ker = linalg.left_kernel(stacked, field)
    if not ker:
        return None
    na = len(a.rows)
    rows = []
    for combo in ker:
        vec = [0] * (a.space.n + 1)
        for s in range(na):
            c = combo[s]
            if c:
                for j, x in enumerate(a.rows[s]):
                    vec[j] = field.add(vec[j], field.mul(c, x))
        rows.append(vec)
    return Subspace(a.space, rows)


class PointSet:
    """An immutable set of points of one space, stored as sorted ranks."""

    __slots__ = ("space", "ranks", "_mask", "_coords")

    def __init__(self, space, ranks):
        self.space = space
        arr = np.unique(np.asarray(list(ranks) if not isinstance(
            ranks, np.ndarray) else ranks, dtype=np.int64))
        if arr.size and (arr[0] < 0 or arr[-1] >= space.num_points):
            raise RangeError("point rank out of range")
        self.ranks = arr
        self._mask = None
        self._coords = None

    @classmethod
    def from_coords(cls, space, rows):
        return cls(space, [space.rank_of(r) for r in rows])

    def __len__(self):
        return int(self.ranks.size)

    def __iter__(self):
        return iter(int(r) for r in self.ranks)

    def __contains__(self, rank):
        i = np.searchsorted(self.ranks, int(rank))
        return i < self.ranks.size and self.ranks[i] == int(rank)

    def __eq__(self, other):
        return (isinstance(other, PointSet) and self.space is other.space
                and self.ranks.size == other.ranks.size
                and bool(np.all(self.ranks == other.ranks)))

    def __hash__(self):
        return hash((id(self.space), self.ranks.tobytes()))

    def __repr__(self):
        return f"PointSet({len(self)} points of {self.space!r})"

    def mask(self) -> np.ndarray:
        if self._mask is None:
            m = np.zeros(self.space.num_points, dtype=bool)
            m[self.ranks] = True
            self._mask = m
        return self._mask

    def coords(self) -> np.ndarray:
        if self._coords is None:
            if self.space.field.has_tables and self.space.num_points * \
                    (self.space.n + 1) <= _COORDS_CAP:
                self._coords = self.space.coords_array()[self.ranks]
            else:
                self._coords = np.asarray(
                    [self.space.coords_of(int(r)) for r in self.ranks],
                    dtype=np.int64)
        return self._coords

    def union(self, other: "PointSet") -> "PointSet":
        return PointSet(self.space, np.union1d(self.ranks, other.ranks))

    def difference(self, other: "PointSet") -> "PointSet":
        return PointSet(self.space, np.setdiff1d(self.ranks, other.ranks))

    def intersection(self, other: "PointSet") -> "PointSet":
        return PointSet(self.space, np.intersect1d(self.ranks, other.ranks))

    def restrict_to(self, sub: Subspace):
        """Coordinates of the points inside `sub`, as a set of the small
        space PG(sub.dim, q) plus the chart used for the identification."""
        chart = SubspaceChart(sub)
        return chart.restrict(self), chart


class SubspaceChart:
    """Identification of a subspace with a standalone PG(dim, q).

    Small-space coordinates of an ambient point are its combination
    coefficients over the RREF basis rows, which are read off at the pivot
    columns.
    """

    def __init__(self, sub: Subspace):
        self.subspace = sub
        self.ambient = sub.space
        if sub.dim < 1:
            raise RangeError("chart needs a subspace of dimension >= 1")
        self.small = ProjectiveSpace(sub.dim, sub.space.field)

    def to_small(self, item) -> tuple:
        v = _coerce_coords(self.ambient, item)
        coeff = tuple(v[p] for p in self.subspace.pivots)
        if self.to_ambient(coeff) != tuple(v):
            raise BadParamsError("point lies outside the chart subspace")
        return self.small.normalize(coeff)

    def to_ambient(self, coeff) -> tuple:
        field = self.ambient.field
        vec = [0] * (self.ambient.n + 1)
        for c, row in zip(coeff, self.subspace.rows):
            if c:
                for j, x in enumerate(row):
                    vec[j] = field.add(vec[j], field.mul(c, x))
        return tuple(vec)

    def restrict(self, pts: PointSet) -> PointSet:
        sub_ranks = self.subspace.point_ranks()
        inside = np.intersect1d(pts.ranks, sub_ranks)
        if inside.size != pts.ranks.size:
            raise BadParamsError(
                f"{pts.ranks.size - inside.size} points lie outside "
                "the chart subspace")
        if self.ambient.field.has_tables:
            coords = self.ambient.coords_array()[inside]
            coeff = coords[:, list(self.subspace.pivots)]
            return PointSet(self.small, self.small.ranks_from_rows(coeff))
        return PointSet(self.small,
                        [self.small.rank_of(self.to_small(int(r)))
                         for r in inside])

    def lift(self, pts: PointSet) -> PointSet:
        if pts.space is not self.small:
            raise DimensionMismatchError("points not in the chart space")
        if self.ambient.field.has_tables:
            small_coords = self.small.coords_array()[pts.ranks]
            add, mul, _, _ = self.ambient._tables()
            basis = np.asarray(self.subspace.rows, dtype=np.int64)
            acc = np.zeros((small_coords.shape[0], self.ambient.n + 1),
                           dtype=np.int64)
            for j in range(basis.shape[0]):
                acc = add[acc, mul[small_coords[:, j, None],
                                   basis[None, j, :]]]
            return PointSet(self.ambient, self.ambient.ranks_from_rows(acc))
        return PointSet.from_coords(
            self.ambient,
            [self.to_ambient(self.small.coords_of(int(r))) for r in pts])


def project(pts: PointSet, centre, hyperplane: Subspace) -> PointSet:
    """Project a point set from a centre point onto a hyperplane.

    The image of R is the intersection of the line (centre R) with the
    hyperplane; it is computed as (u.centre) R - (u.R) centre for the
    hyperplane covector u.  The centre must avoid both the set and the
    hyperplane.  The image lives in the ambient space (on the hyperplane);
    restrict with a chart when small coordinates are wanted.
    """
    space = pts.space
    c = _coerce_coords(space, centre)
    if hyperplane.dim != space.n - 1:
        raise NotHyperplaneError(
            f"projection target has dimension {hyperplane.dim}, "
            f"expected {space.n - 1}")
    crank = space.rank_of(c)
    if crank in pts:
        raise CentreInSetError("projection centre lies in the point set")
    if hyperplane.contains(c):
        raise CentreInHyperplaneError(
            "projection centre lies on the target hyperplane")
    field = space.field
    u = space.covector_of(hyperplane)
    uc = 0
    for a, b in zip(u, c):
        uc = field.add(uc, field.mul(a, b))
    if space.field.has_tables and len(pts):
        add, mul, neg, _ = space._tables()
        coords = pts.coords()
        uv = np.asarray(u, dtype=np.int64)
        ur = np.zeros(coords.shape[0], dtype=np.int64)
        for j in range(space.n + 1):
            ur = add[ur, mul[coords[:, j], uv[j]]]
        cv = np.asarray(c, dtype=np.int64)
        img = add[mul[coords, uc], mul[neg[ur][:, None], cv[None, :]]]
        return PointSet(space, space.ranks_from_rows(img))
    out = []
    for r in pts:
        v = space.coords_of(r)
        ur = 0
        for a, b in zip(u, v):
            ur = field.add(ur, field.mul(a, b))
        img = tuple(field.sub(field.mul(uc, x), field.mul(ur, y))
                    for x, y in zip(v, c))
        out.append(img)
    return PointSet.from_coords(space, out)


class TraceSummary:
    """Intersection counts of one point set against all dim-subspaces.

    Only subspaces that meet the set are held explicitly (keys, sizes and
    the incidence pairs subspace-index/point-index); everything else is
    the x_0 count.  Three storage modes share the interface:

    - "full":   key = index into the space's enumeration order,
    - "packed": key = base-q packed canonical 2-row basis (lines),
    - "dual":   key = point rank of the covector in the dual space
                (hyperplanes).
    """

    def __init__(self, space, dim, point_ranks, mode, keys, sizes,
                 inc_sub, inc_pt):
        self.space = space
        self.dim = dim
        self.point_ranks = point_ranks
        self.total = space.num_subspaces(dim)
        self.mode = mode
        self.keys = keys
        self.sizes = sizes
        self.inc_sub = inc_sub
        self.inc_pt = inc_pt

    @property
    def x0(self) -> int:
        return self.total - int(self.sizes.size)

    def spectrum(self) -> dict:
        """Counts {trace size: number of dim-subspaces}, including 0."""
        out = {}
        if self.x0:
            out[0] = self.x0
        vals, cnts = np.unique(self.sizes, return_counts=True)
        for v, c in zip(vals, cnts):
            out[int(v)] = int(c)
        return out

    def per_point_counts(self, min_size=2, exact=None) -> np.ndarray:
        """For each point of the set (in rank order): how many dim-subspaces
        through it have trace >= min_size (or == exact)."""
        if exact is not None:
            sel = self.sizes[self.inc_sub] == exact
        else:
            sel = self.sizes[self.inc_sub] >= min_size
        return np.bincount(self.inc_pt[sel],
                           minlength=self.point_ranks.size).astype(np.int64)

    def subspace_at(self, idx: int) -> Subspace:
        if self.mode == "full":
            return self.space.subspace_by_index(self.dim, int(self.keys[idx]))
        if self.mode == "packed":
            first, second = self.space.unpack_rows2(self.keys[idx])
            return Subspace(self.space, (first, second))
        dual = ProjectiveSpace(self.space.n, self.space.field)
        cov = dual.coords_of(int(self.keys[idx]))
        return self.space.hyperplane(cov)

    def subspaces_with_size(self, size: int):
        for idx in np.nonzero(self.sizes == size)[0]:
            yield int(idx), self.subspace_at(int(idx))

    def indices_through_point(self, pt_pos: int) -> np.ndarray:
        return self.inc_sub[self.inc_pt == pt_pos]


def _scan_lines(space, pts: PointSet) -> TraceSummary:
    """Traces of all lines meeting the set, by enumerating per point the
    lines through it (each meeting line is hit once per contained point)."""
    add, mul, neg, _ = space._tables()
    n, q = space.n, space.q
    m = len(pts)
    coords = pts.coords()
    lead = (coords != 0).argmax(axis=1)
    params = ProjectiveSpace(n - 1, space.field).coords_array() \
        if n >= 2 else np.ones((1, 1), dtype=np.int64)
    npar = params.shape[0]
    colidx = np.asarray([[c for c in range(n + 1) if c != l]
                         for l in range(n + 1)], dtype=np.int64)
    width, words = space._pack_width()
    key_chunks, pt_chunks = [], []
    step = max(1, 6_000_000 // (npar * (n + 1)))
    for lo in range(0, m, step):
        hi = min(lo + step, m)
        blk = hi - lo
        p_blk = coords[lo:hi]
        l_blk = lead[lo:hi]
        # transversal vectors w: parameters scattered into non-lead columns
        w = np.zeros((blk, npar, n + 1), dtype=np.int64)
        cols = colidx[l_blk]
        np.put_along_axis(
            w, cols[:, None, :].repeat(npar, axis=1), params[None, :, :],
            axis=2)
        lw = (w != 0).argmax(axis=2)
        u = np.broadcast_to(p_blk[:, None, :], w.shape)
        u_at_lw = np.take_along_axis(u, lw[:, :, None], axis=2)[:, :, 0]
        a = add[u, mul[neg[u_at_lw][:, :, None], w]]
        first_is_w = lw < l_blk[:, None]
        first = np.where(first_is_w[:, :, None], w, a)
        second = np.where(first_is_w[:, :, None], a, w)
        keys = space.pack_rows2(first, second)
        key_chunks.append(keys.reshape(blk * npar, -1)
                          if words == 2 else keys.reshape(-1))
        pt_chunks.append(np.repeat(np.arange(lo, hi, dtype=np.int32), npar))
    all_keys = np.concatenate(key_chunks)
    all_pts = np.concatenate(pt_chunks)
    if words == 2:
        view = np.ascontiguousarray(all_keys).view(
            [("a", np.int64), ("b", np.int64)]).reshape(-1)
        uniq, inv, cnt = np.unique(view, return_inverse=True,
                                   return_counts=True)
        keys = np.stack([uniq["a"], uniq["b"]], axis=1)
    else:
        keys, inv, cnt = np.unique(all_keys, return_inverse=True,
                                   return_counts=True)
    return TraceSummary(space, 1, pts.ranks, "packed", keys,
                        cnt.astype(np.int64), inv.astype(np.int64), all_pts)


def _scan_hyperplanes(space, pts: PointSet) -> TraceSummary:
    """Traces of all hyperplanes meeting the set, via the covectors through
    each point (a hyperplane through s points contributes s incidences)."""
    add, mul, neg, _ = space._tables()
    n = space.n
    m = len(pts)
    coords = pts.coords()
    lead = (coords != 0).argmax(axis=1)
    dual = ProjectiveSpace(n, space.field)
    params = ProjectiveSpace(n - 1, space.field).coords_array()
    npar = params.shape[0]
    colidx = np.asarray([[c for c in range(n + 1) if c != l]
                         for l in range(n + 1)], dtype=np.int64)
    rank_chunks, pt_chunks = [], []
    step = max(1, 5_000_000 // (npar * (n + 1)))
    for lo in range(0, m, step):
        hi = min(lo + step, m)
        blk = hi - lo
        p_blk = coords[lo:hi]
        l_blk = lead[lo:hi]
        cols = colidx[l_blk]
        # kernel basis rows of {u : u . P = 0}: e_c - P_c e_lead per c != lead
        bases = np.zeros((blk, n, n + 1), dtype=np.int64)
        np.put_along_axis(bases, cols[:, :, None], 1, axis=2)
        pc = np.take_along_axis(p_blk[:, None, :].repeat(n, axis=1),
                                cols[:, :, None], axis=2)[:, :, 0]
        np.put_along_axis(bases, np.broadcast_to(
            l_blk[:, None, None], (blk, n, 1)), neg[pc][:, :, None], axis=2)
        acc = np.zeros((blk, npar, n + 1), dtype=np.int64)
        for j in range(n):
            acc = add[acc, mul[params[None, :, j, None],
                               bases[:, None, j, :]]]
        ranks = dual.ranks_from_rows(acc)
        rank_chunks.append(ranks.reshape(-1))
        pt_chunks.append(np.repeat(np.arange(lo, hi, dtype=np.int32), npar))
    all_ranks = np.concatenate(rank_chunks)
    all_pts = np.concatenate(pt_chunks)
    keys, inv, cnt = np.unique(all_ranks, return_inverse=True,
                               return_counts=True)
    return TraceSummary(space, n - 1, pts.ranks, "dual", keys,
                        cnt.astype(np.int64), inv.astype(np.int64), all_pts)


def _scan_full(space, pts: PointSet, dim: int) -> TraceSummary:
    inc = space.incidence(dim)
    hits = pts.mask()[inc]
    sizes_all = hits.sum(axis=1)
    keys = np.nonzero(sizes_all)[0].astype(np.int64)
    sizes = sizes_all[keys].astype(np.int64)
    sub_pos, col = np.nonzero(hits[keys])
    pt_pos = np.searchsorted(pts.ranks, inc[keys[sub_pos], col])
    return TraceSummary(space, dim, pts.ranks, "full", keys, sizes,
                        sub_pos.astype(np.int64), pt_pos.astype(np.int32))


def subspace_traces(pts: PointSet, dim: int, prefer_full=False) -> TraceSummary:
    """Trace summary of the set against every dim-subspace of its space.

    Uses the cached full incidence table when the space is small (or when
    asked to), otherwise the per-point scans for lines and hyperplanes.
    Middle dimensions of large spaces are out of scope.
    """
    space = pts.space
    if not 1 <= dim <= space.n:
        raise RangeError(f"trace dimension {dim} out of range for {space!r}")
    if len(pts) == 0:
        raise EmptyInputError("trace scan of an empty point set")
    if dim == space.n:
        return TraceSummary(
            space, dim, pts.ranks, "full", np.asarray([0], dtype=np.int64),
            np.asarray([len(pts)], dtype=np.int64),
            np.zeros(len(pts), dtype=np.int64),
            np.arange(len(pts), dtype=np.int32))
    if space._incidence_ok(dim) and (prefer_full or
                                     (dim != 1 and dim != space.n - 1)):
        return _scan_full(space, pts, dim)
    if dim == 1:
        return _scan_lines(space, pts)
    if dim == space.n - 1:
        return _scan_hyperplanes(space, pts)
    if space._incidence_ok(dim):
        return _scan_full(space, pts, dim)
    raise TooLargeError(
        f"no feasible scan for dim {dim} traces in {space!r}")
