"""Field reduction between PG(n, p^h) and PG(h(n+1)-1, p).

A point of the big space, i.e. a line of GF(p^h)^(n+1), becomes an
(h-1)-dimensional projective subspace of the small space once every big
coordinate is expanded into its h polynomial-basis coefficients (which are
exactly the base-p digits of the element code).  The family of all these
subspaces is a spread: it partitions the small-side points.  Going the other
way, a small-side subspace pi picks out the big-side point set of all spread
elements it touches.

The spread is cached eagerly as two integer arrays (big rank -> sorted small
ranks of its element, small rank -> big rank), since those lookups sit inside
the reconstruction inner loop.
"""

from __future__ import annotations

import functools

import numpy as np

from .errors import (
    BadParamsError,
    DimensionMismatchError,
    NotASublineError,
    SpecMismatchError,
    TooLargeError,
    XNotOnElementError,
)
from .projspace import (
    PointSet,
    ProjectiveSpace,
    Subspace,
    _coerce_coords,
    span,
)

_SMALL_SIDE_CAP = 4_000_000


class SpreadContext:
    """The spread correspondence for one big space PG(n, p^h)."""

    def __init__(self, big: ProjectiveSpace):
        field = big.field
        self.big = big
        self.p0 = field.p
        self.h = field.t
        self.small_field = field.subfield(1) if field.t > 1 else field
        self.small = ProjectiveSpace(self.h * (big.n + 1) - 1,
                                     self.small_field)
        if self.small.num_points > _SMALL_SIDE_CAP:
            raise TooLargeError(
                f"small side has {self.small.num_points} points, "
                f"cap is {_SMALL_SIDE_CAP}")
        self.points_per_element = (self.p0 ** self.h - 1) // (self.p0 - 1)
        self._build_cache()

    def __repr__(self):
        return f"SpreadContext({self.big!r} -> {self.small!r})"

    # -- coordinate maps ------------------------------------------------------

    def blow_up_vector(self, big_coords) -> tuple:
        """Expand each GF(p^h) coordinate into its h base-p digits."""
        p0, h = self.p0, self.h
        out = []
        for c in big_coords:
            c = int(c)
            for _ in range(h):
                c, d = divmod(c, p0)
                out.append(d)
        return tuple(out)

    def blow_down_vector(self, small_coords) -> tuple:
        p0, h = self.p0, self.h
        small_coords = tuple(int(c) for c in small_coords)
        if len(small_coords) != self.small.n + 1:
            raise DimensionMismatchError(
                f"expected {self.small.n + 1} coordinates")
        out = []
        for j in range(self.big.n + 1):
            code = 0
            for i in reversed(range(h)):
                code = code * p0 + small_coords[j * h + i]
            out.append(code)
        return tuple(out)

    def _blow_up_rows(self, arr: np.ndarray) -> np.ndarray:
        p0, h = self.p0, self.h
        m = arr.shape[0]
        out = np.empty((m, self.small.n + 1), dtype=np.int64)
        for j in range(self.big.n + 1):
            c = arr[:, j]
            for i in range(h):
                out[:, j * h + i] = c % p0
                c = c // p0
        return out

    # -- cache ----------------------------------------------------------------

    def _build_cache(self):
        big, small = self.big, self.small
        nbig = big.num_points
        per = self.points_per_element
        if big.field.has_tables and small.field.has_tables:
            _, mul, _, _ = big.field.tables()
            coords = big.coords_array()
            q = big.q
            ranks = np.empty((q - 1, nbig), dtype=np.int64)
            for idx, lam in enumerate(range(1, q)):
                scaled = mul[coords, lam] if lam != 1 else coords
                ranks[idx] = small.ranks_from_rows(self._blow_up_rows(scaled))
            ranks.sort(axis=0)
            # each small point appears once per nonzero subfield scalar
            dedup = ranks[:: self.p0 - 1, :]
            if dedup.shape[0] != per or (self.p0 > 2 and not np.array_equal(
                    ranks[1:: self.p0 - 1, :], dedup)):
                raise SpecMismatchError("spread cache multiplicities broken")
            self.big_to_small = np.ascontiguousarray(dedup.T).astype(np.int32)
        else:
            field = big.field
            rows = np.empty((nbig, per), dtype=np.int32)
            for r in range(nbig):
                v = big.coords_of(r)
                seen = set()
                for lam in range(1, big.q):
                    w = tuple(field.mul(lam, c) for c in v)
                    seen.add(small.rank_of(self.blow_up_vector(w)))
                if len(seen) != per:
                    raise SpecMismatchError("spread cache multiplicities broken")
                rows[r] = sorted(seen)
            self.big_to_small = rows
        flat = self.big_to_small.reshape(-1)
        if flat.size != small.num_points:
            raise SpecMismatchError("spread does not cover the small side")
        s2b = np.full(small.num_points, -1, dtype=np.int32)
        s2b[flat] = np.repeat(np.arange(nbig, dtype=np.int32), per)
        if (s2b < 0).any():
            raise SpecMismatchError("spread does not partition the small side")
        self.small_to_big = s2b

    # -- spread queries --------------------------------------------------------

    def element_ranks(self, big_rank: int) -> np.ndarray:
        return self.big_to_small[int(big_rank)]

    def spread_element(self, point) -> Subspace:
        """S(P): the small-side (h-1)-space of a big-side point."""
        v = _coerce_coords(self.big, point)
        xcode = self.big.field.x.code if self.h > 1 else 1
        rows = []
        w = v
        for _ in range(self.h):
            rows.append(self.blow_up_vector(w))
            w = tuple(self.big.field.mul(xcode, c) for c in w)
        sub = Subspace(self.small, rows)
        if sub.dim != self.h - 1:
            raise SpecMismatchError("spread element has the wrong dimension")
        return sub

    def big_point_of(self, small_point) -> int:
        """Rank of the big-side point whose spread element covers the
        given small-side point."""
        if isinstance(small_point, (int, np.integer)):
            r = int(small_point)
        else:
            r = self.small.rank_of(_coerce_coords(self.small, small_point))
        return int(self.small_to_big[r])

    def linear_set_of(self, pi: Subspace) -> PointSet:
        """B(pi): big-side points whose spread elements meet pi."""
        if pi.space is not self.small:
            raise DimensionMismatchError("subspace not on the small side")
        return PointSet(self.big,
                        np.unique(self.small_to_big[pi.point_ranks()]))

    def linear_set_of_ranks(self, small_ranks) -> np.ndarray:
        return np.unique(self.small_to_big[np.asarray(small_ranks,
                                                      dtype=np.int64)])

    def blow_up_subspace(self, sub: Subspace) -> Subspace:
        """S(H): the span of the spread elements of the points of H,
        projective dimension h(dim H + 1) - 1."""
        if sub.space is not self.big:
            raise DimensionMismatchError("subspace not on the big side")
        xcode = self.big.field.x.code if self.h > 1 else 1
        rows = []
        for v in sub.rows:
            w = v
            for _ in range(self.h):
                rows.append(self.blow_up_vector(w))
                w = tuple(self.big.field.mul(xcode, c) for c in w)
        out = Subspace(self.small, rows)
        if out.dim != self.h * (sub.dim + 1) - 1:
            raise SpecMismatchError("blown-up subspace has the wrong dimension")
        return out

    def transversal_line(self, subline_points: PointSet, x) -> Subspace:
        """The unique small-side line through x mapping onto the given
        (p+1)-point big-side subline.

        x must lie on the spread element of one of the subline points.  The
        search runs over the points of one companion element; a subline has
        exactly one transversal through each point of its elements, so zero
        matches means the input was not a subline and two would be an
        internal inconsistency.
        """
        if subline_points.space is not self.big:
            raise DimensionMismatchError("subline not on the big side")
        if len(subline_points) != self.p0 + 1:
            raise BadParamsError(
                f"expected {self.p0 + 1} points, got {len(subline_points)}")
        if isinstance(x, (int, np.integer)):
            xrank = int(x)
        else:
            xrank = self.small.rank_of(_coerce_coords(self.small, x))
        home = int(self.small_to_big[xrank])
        if home not in subline_points:
            raise XNotOnElementError(
                "x does not lie on a spread element of the subline")
        companion = next(int(r) for r in subline_points.ranks if r != home)
        target = subline_points.ranks
        found = None
        for y in self.element_ranks(companion):
            line = span(self.small, xrank, int(y))
            if line.dim != 1:
                continue
            image = self.linear_set_of_ranks(line.point_ranks())
            if image.size == target.size and np.array_equal(image, target):
                if found is not None and found != line:
                    raise SpecMismatchError(
                        "two transversal lines through one point")
                found = line
        if found is None:
            raise NotASublineError(
                "the given points are not the image of a line")
        return found


@functools.lru_cache(maxsize=8)
def spread_context(big: ProjectiveSpace) -> SpreadContext:
    """Shared per-space context; the cache is built once per big space."""
    return SpreadContext(big)
