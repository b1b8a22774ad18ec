"""Linear point sets, known families, sublines, and the linearity decision.

A point set B of PG(n, p^h) is linear when B = B(pi) for some subspace pi
of the small side of the field-reduction spread model.  This module builds
the classical families (subgeometries, Redei-type trace sets, cones,
seeded random witnesses), enumerates the sublines of an ambient line,
checks the subline-intersection size theorem, and decides linearity either
by reconstruction or by exhaustive witness search.

The spread model lives over the prime subfield, so witness ranks here are
prime-subfield ranks and the decision procedures require p0 = p.  The
subline machinery only needs p0 = p^e with e | t and stays general.
"""

from __future__ import annotations

import functools
import itertools
from typing import NamedTuple, Optional

import numpy as np

from .blocking import exponent, is_minimal, is_small, traces_of
from .errors import (
    BadParamsError,
    NoSublineSecantError,
    NotBlockingError,
    RangeError,
    TooLargeError,
)
from .fields import FieldSpec, make_field
from .projspace import (
    PointSet,
    ProjectiveSpace,
    Subspace,
    gaussian_binomial,
    span,
)
from .spreads import SpreadContext, spread_context

_EXHAUSTIVE_POINT_CAP = 10_000


class LinearSetWitness(NamedTuple):
    """A linear set together with the small-side subspace producing it."""

    ctx: SpreadContext
    pi: Subspace
    points: PointSet
    rank: int

    @property
    def p0(self) -> int:
        return self.ctx.p0

    def verify(self) -> bool:
        return self.ctx.linear_set_of(self.pi) == self.points


def build_linear_set(ctx: SpreadContext, pi: Subspace) -> LinearSetWitness:
    return LinearSetWitness(ctx, pi, ctx.linear_set_of(pi), pi.dim + 1)


# -- families ------------------------------------------------------------------


def _field_for(q: int, p0: int):
    """The big field GF(q) plus the embedding degree e with p0 = p^e."""
    p = _smallest_prime_factor(p0)
    e = _exact_log(p0, p)
    t = _exact_log(q, p)
    if t % e:
        raise BadParamsError(f"GF({p0}) is not a subfield of GF({q})")
    return make_field(p, t), e


def _smallest_prime_factor(m: int) -> int:
    if m < 2:
        raise BadParamsError(f"{m} is not a prime power")
    d = 2
    while d * d <= m:
        if m % d == 0:
            return d
        d += 1
    return m


def _exact_log(value: int, base: int) -> int:
    e = 0
    v = 1
    while v < value:
        v *= base
        e += 1
    if v != value:
        raise BadParamsError(f"{value} is not a power of {base}")
    return e


def _subfield_basis_codes(field: FieldSpec, e: int) -> list:
    """Big-field codes of a prime-subfield basis of the GF(p^e) subfield."""
    embed, _ = field.embedding(e)
    return [int(embed[field.p ** j]) for j in range(e)]


def _unit_vector(length: int, pos: int, code: int) -> tuple:
    v = [0] * length
    v[pos] = code
    return tuple(v)


def subgeometry_witness(q: int, p0: int, n: int, m=None) -> LinearSetWitness:
    """Canonical PG(m, p0) inside PG(n, p0^h): points whose first m+1
    coordinates lie in the subfield and the rest vanish."""
    field, e = _field_for(q, p0)
    if m is None:
        m = n
    if not 0 <= m <= n:
        raise BadParamsError(f"subgeometry dimension {m} out of range")
    ctx = spread_context(ProjectiveSpace(n, field))
    basis = _subfield_basis_codes(field, e)
    rows = [ctx.blow_up_vector(_unit_vector(n + 1, i, c))
            for i in range(m + 1) for c in basis]
    pi = Subspace(ctx.small, rows)
    return build_linear_set(ctx, pi)


def redei_trace_witness(q: int, p0: int) -> LinearSetWitness:
    """Redei-type set in PG(2, q): directions-style witness from the
    relative trace GF(q) -> GF(p0), vectors (x, Tr(x), c)."""
    field, e = _field_for(q, p0)
    if field.t == e:
        raise BadParamsError("trace construction needs a proper subfield")
    ctx = spread_context(ProjectiveSpace(2, field))
    h = field.t // e

    def rel_trace(code: int) -> int:
        acc, w = 0, code
        for _ in range(h):
            acc = field.add(acc, w)
            for _ in range(e):
                w = field.frobenius(w)
        return acc

    rows = [ctx.blow_up_vector((field.p ** j, rel_trace(field.p ** j), 0))
            for j in range(field.t)]
    rows += [ctx.blow_up_vector((0, 0, c))
             for c in _subfield_basis_codes(field, e)]
    pi = Subspace(ctx.small, rows)
    return build_linear_set(ctx, pi)


def cone_witness(q: int, p0: int, n: int, base_m: int) -> LinearSetWitness:
    """Cone with vertex e_n over the canonical PG(base_m, p0) subgeometry
    of the hyperplane x_n = 0: small-side span of the vertex spread
    element and the base witness."""
    field, e = _field_for(q, p0)
    if not 0 <= base_m <= n - 1:
        raise BadParamsError(f"cone base dimension {base_m} out of range")
    ctx = spread_context(ProjectiveSpace(n, field))
    basis = _subfield_basis_codes(field, e)
    rows = [ctx.blow_up_vector(_unit_vector(n + 1, i, c))
            for i in range(base_m + 1) for c in basis]
    vertex = ctx.spread_element(_unit_vector(n + 1, n, 1))
    pi = span(ctx.small, Subspace(ctx.small, rows), vertex)
    return build_linear_set(ctx, pi)


def random_rank_r_witness(q: int, n: int, r: int, seed: int) -> LinearSetWitness:
    """Seeded pseudo-random rank-r small-side subspace (prime subfield)."""
    p = _smallest_prime_factor(q)
    field = make_field(p, _exact_log(q, p))
    ctx = spread_context(ProjectiveSpace(n, field))
    if not 1 <= r <= ctx.small.n + 1:
        raise BadParamsError(f"rank {r} out of range for {ctx.small!r}")
    rng = np.random.default_rng(seed)
    while True:
        mat = rng.integers(0, p, size=(r, ctx.small.n + 1))
        sub = Subspace(ctx.small, mat)
        if sub.dim + 1 == r:
            return build_linear_set(ctx, sub)


_FAMILIES = {
    "subgeometry": subgeometry_witness,
    "redei_trace": redei_trace_witness,
    "cone": cone_witness,
    "random_rank_r": random_rank_r_witness,
}


def build_family_witness(name: str, **params) -> LinearSetWitness:
    try:
        builder = _FAMILIES[name]
    except KeyError:
        raise BadParamsError(
            f"unknown family {name!r}, have {sorted(_FAMILIES)}") from None
    try:
        return builder(**params)
    except TypeError as exc:
        raise BadParamsError(f"bad parameters for {name}: {exc}") from None


def build_family(name: str, **params) -> PointSet:
    return build_family_witness(name, **params).points


# -- sublines ------------------------------------------------------------------


def _solve_dependence(field, a, b, c):
    """Coefficients (lam, mu) with c = lam*a + mu*b for 2-coordinate
    projective points a, b, c (a, b independent)."""
    det = field.sub(field.mul(a[0], b[1]), field.mul(a[1], b[0]))
    lam = field.mul(field.inv(det),
                    field.sub(field.mul(c[0], b[1]), field.mul(c[1], b[0])))
    mu = field.mul(field.inv(det),
                   field.sub(field.mul(a[0], c[1]), field.mul(a[1], c[0])))
    return lam, mu


def _triple_closure_ranks(param_space: ProjectiveSpace, ra, rb, rc,
                          sub_codes) -> tuple:
    """Ranks (sorted) of the unique subline of PG(1,q) through 3 points.

    This is the parameter-chart form of the rank-2 span in the spread
    model: c = lam*a + mu*b fixes the scaling, the subline is
    {t0*lam*a + t1*mu*b : (t0 : t1) over the subfield}.
    """
    field = param_space.field
    a = param_space.coords_of(ra)
    b = param_space.coords_of(rb)
    c = param_space.coords_of(rc)
    lam, mu = _solve_dependence(field, a, b, c)
    u = tuple(field.mul(lam, x) for x in a)
    v = tuple(field.mul(mu, x) for x in b)
    out = {rb}
    for t0 in sub_codes:
        if t0 == 0:
            continue
        for t1 in sub_codes:
            w = tuple(field.add(field.mul(t0, x), field.mul(t1, y))
                      for x, y in zip(u, v))
            out.add(param_space.rank_of(param_space.normalize(w)))
    return tuple(sorted(out))


@functools.lru_cache(maxsize=8)
def subline_patterns(field: FieldSpec, p0: int):
    """All GF(p0)-sublines of the parameter line PG(1, q), once per field.

    Returns (bool matrix, list of rank tuples): row i marks the point
    ranks of subline i.  Parameter coordinates are projective coordinates,
    and projectivities permute sublines, so the same patterns serve every
    line of every space over this field through its coefficient chart.
    """
    e = _exact_log(p0, field.p)
    if field.t % e:
        raise BadParamsError(f"GF({p0}) is not a subfield of GF(q)")
    embed, _ = field.embedding(e) if e < field.t else (
        np.arange(field.q, dtype=np.int64), None)
    sub_codes = [int(c) for c in embed]
    param_space = ProjectiveSpace(1, field)
    npts = param_space.num_points
    covered = set()
    tuples = []
    for tri in itertools.combinations(range(npts), 3):
        if tri in covered:
            continue
        ranks = _triple_closure_ranks(param_space, *tri, tuple(sub_codes))
        tuples.append(ranks)
        covered.update(itertools.combinations(ranks, 3))
    mat = np.zeros((len(tuples), npts), dtype=bool)
    for i, ranks in enumerate(tuples):
        mat[i, list(ranks)] = True
    return mat, tuples


def line_param_positions(line: Subspace, ranks) -> np.ndarray:
    """PG(1, q) ranks of the given ambient points in the coefficient chart
    of the line (coordinates at its two pivot columns)."""
    space = line.space
    if line.dim != 1:
        raise RangeError("chart positions need a line")
    j0, j1 = line.pivots
    ranks = np.asarray(ranks, dtype=np.int64)
    try:
        coords = space.coords_array()[ranks]
    except TooLargeError:
        coords = np.asarray([space.coords_of(int(r)) for r in ranks],
                            dtype=np.int64)
    param = np.stack([coords[:, j0], coords[:, j1]], axis=-1)
    return ProjectiveSpace(1, space.field).ranks_from_rows(param)


def enumerate_sublines(line: Subspace, p0: int):
    """All GF(p0)-sublines of an ambient line, each once, as PointSets."""
    space = line.space
    if line.dim != 1:
        raise RangeError("subline enumeration needs a line")
    mat, tuples = subline_patterns(space.field, p0)
    ranks = line.point_ranks()
    positions = line_param_positions(line, ranks)
    ambient = np.empty(space.q + 1, dtype=np.int64)
    ambient[positions] = ranks
    for row in tuples:
        yield PointSet(space, ambient[list(row)])


def _grouped_trace_ranks(summary, sel: np.ndarray):
    """Point ranks of each selected subspace's trace, concatenated in sel
    order; group i is out[offsets[i]:offsets[i+1]].  sel must be sorted."""
    keep = np.zeros(summary.sizes.size, dtype=bool)
    keep[sel] = True
    entry = keep[summary.inc_sub]
    sub = summary.inc_sub[entry]
    ranks = summary.point_ranks[summary.inc_pt[entry]]
    grouped = ranks[np.argsort(sub, kind="stable")]
    offsets = np.concatenate([[0], np.cumsum(summary.sizes[sel])])
    return grouped, offsets


def _bulk_param_positions(space, summary, sel: np.ndarray):
    """Chart positions of every trace point of the selected lines, computed
    in one vectorized pass (packed-mode summaries only).

    Returns (positions, line_of_entry, offsets): group i covers
    positions[offsets[i]:offsets[i+1]] and belongs to line sel[i]."""
    grouped, offsets = _grouped_trace_ranks(summary, sel)
    bases = space.unpack_rows2_bulk(np.asarray(summary.keys)[sel])
    # canonical bases: row pivots give the chart columns, j0 < j1
    j0 = np.argmax(bases[:, 0, :] != 0, axis=1)
    j1 = np.argmax(bases[:, 1, :] != 0, axis=1)
    rep = np.repeat(np.arange(sel.size), np.diff(offsets))
    coords = space.coords_array()[grouped]
    idx = np.arange(grouped.size)
    param = np.stack([coords[idx, j0[rep]], coords[idx, j1[rep]]], axis=-1)
    # coords at the pivot columns of a normalized point are themselves a
    # normalized PG(1, q) vector, so no renormalization pass is needed
    positions = ProjectiveSpace(1, space.field).ranks_from_rows(
        param, normalized=True)
    return positions, rep, offsets


class SublineMeetReport(NamedTuple):
    ok: bool
    secant_lines: int
    sublines_checked: int
    allowed_sizes: tuple
    violations: list          # (line Subspace, subline PointSet, size)


def _meet_violation(space, line, tuples, pattern_idx, size, violations):
    ranks = line.point_ranks()
    ambient = np.empty(space.q + 1, dtype=np.int64)
    ambient[line_param_positions(line, ranks)] = ranks
    violations.append(
        (line, PointSet(space, ambient[list(tuples[pattern_idx])]), size))


def subline_meet_check(witness: LinearSetWitness,
                       p0: Optional[int] = None) -> SublineMeetReport:
    """Every subline of every secant line must meet the set in
    0..rank or p0+1 points; any other size is reported."""
    if p0 is None:
        p0 = witness.p0
    pts = witness.points
    space = pts.space
    mat, tuples = subline_patterns(space.field, p0)
    allowed = tuple(sorted(set(range(witness.rank + 1)) | {p0 + 1}))
    lines = traces_of(pts, 1)
    # a full line meets each of its own sublines in exactly p0+1 points,
    # which is always allowed, so only proper secants need scanning
    sel = np.nonzero((lines.sizes >= 2) & (lines.sizes <= space.q))[0]
    nlines = int(np.count_nonzero(lines.sizes >= 2))
    checked = int(np.count_nonzero(lines.sizes == space.q + 1)) * len(tuples)
    violations = []
    allowed_lut = np.zeros(space.q + 2, dtype=bool)
    allowed_lut[list(allowed)] = True
    if lines.mode == "packed" and sel.size:
        positions, rep, _ = _bulk_param_positions(space, lines, sel)
        masks = np.zeros((sel.size, space.q + 1), dtype=np.float32)
        masks[rep, positions] = 1.0
        bank_t = mat.astype(np.float32).T
        chunk = max(1, (1 << 24) // max(1, len(tuples)))
        for lo in range(0, sel.size, chunk):
            sizes = (masks[lo:lo + chunk] @ bank_t).astype(np.int64)
            checked += sizes.size
            ok = allowed_lut[sizes]
            if not ok.all():
                for li, bi in np.argwhere(~ok):
                    if len(violations) >= 10:
                        break
                    _meet_violation(space, lines.subspace_at(int(sel[lo + li])),
                                    tuples, int(bi), int(sizes[li, bi]),
                                    violations)
    else:
        grouped, offsets = _grouped_trace_ranks(lines, sel)
        for pos, idx in enumerate(sel):
            line = lines.subspace_at(int(idx))
            trace = grouped[offsets[pos]:offsets[pos + 1]]
            mask = np.zeros(space.q + 1, dtype=bool)
            mask[line_param_positions(line, trace)] = True
            sizes = mat @ mask
            checked += sizes.size
            for b in np.nonzero(~allowed_lut[sizes])[0]:
                if len(violations) >= 10:
                    break
                _meet_violation(space, line, tuples, int(b),
                                int(sizes[int(b)]), violations)
    return SublineMeetReport(not violations, nlines, checked,
                             allowed, violations)


class SecantLinearityReport(NamedTuple):
    ok: bool
    secants: int
    within_hypotheses: bool
    failures: list            # line Subspaces whose trace is not a subline


def secant_linearity_check(pts: PointSet, k: int,
                           p0: int) -> SecantLinearityReport:
    """Whether every (p0+1)-secant line meets the set in a subline.

    The supporting theorem assumes a small minimal blocking set whose
    exponent matches p0 >= 7; outside that range the check still runs and
    the flag records it as exploratory.
    """
    space = pts.space
    within = p0 >= 7
    try:
        e = exponent(pts, k)
        within = within and is_small(pts, k) \
            and is_minimal(pts, k, "direct")[0] \
            and p0 == space.field.p ** e
    except NotBlockingError:
        within = False
    _, tuples = subline_patterns(space.field, p0)
    bank = {frozenset(row) for row in tuples}
    lines = traces_of(pts, 1)
    failures = []
    sel = np.nonzero(lines.sizes == p0 + 1)[0]
    count = int(sel.size)
    if lines.mode == "packed" and sel.size:
        positions, _, offsets = _bulk_param_positions(space, lines, sel)
    else:
        grouped, offsets = _grouped_trace_ranks(lines, sel)
        positions = np.empty(grouped.size, dtype=np.int64)
        for pos, idx in enumerate(sel):
            lo, hi = offsets[pos], offsets[pos + 1]
            positions[lo:hi] = line_param_positions(
                lines.subspace_at(int(idx)), grouped[lo:hi])
    for pos in range(sel.size):
        key = frozenset(
            int(r) for r in positions[offsets[pos]:offsets[pos + 1]])
        if key not in bank and len(failures) < 10:
            failures.append(lines.subspace_at(int(sel[pos])))
    return SecantLinearityReport(not failures, count, within, failures)


# -- linearity decision ----------------------------------------------------------


def _infer_k(pts: PointSet) -> int:
    """Smallest k for which the set is below the smallness threshold;
    this is the k whose theory caps the witness rank."""
    q, n = pts.space.q, pts.space.n
    for k in range(1, n):
        if 2 * len(pts) < 3 * (q ** k + 1):
            return k
    return n - 1


def is_linear(pts: PointSet, p0: int, strategy: str = "reconstruct_first",
              k: Optional[int] = None):
    """Decide whether the set is a linear set over the prime subfield.

    Returns (witness or None, certificate).  The certificate documents the
    searched ranks, the rank cap h*k+1, and the reconstruction outcome, so
    a None answer states exactly what was exhausted.
    """
    space = pts.space
    if len(pts) == 0:
        raise RangeError("empty point set")
    if p0 != space.field.p:
        raise BadParamsError(
            "linearity decision runs in the prime-subfield model")
    if strategy not in ("reconstruct_first", "exhaustive"):
        raise RangeError(f"unknown strategy {strategy!r}")
    ctx = spread_context(space)
    h = space.field.t
    if k is None:
        k = _infer_k(pts)
    cap = min(h * k + 1, ctx.small.n + 1)
    cert = {"strategy": strategy, "rank_cap": cap, "k": k,
            "reconstruct_attempted": False, "reconstruct_succeeded": False,
            "ranks_searched": [], "subspaces_tested": 0,
            "preimage_points": 0}

    if strategy == "reconstruct_first":
        from .reconstruct import reconstruct as _reconstruct
        cert["reconstruct_attempted"] = True
        try:
            res = _reconstruct(pts, k, p0)
            if res.success:
                cert["reconstruct_succeeded"] = True
                return build_linear_set(ctx, res.W), cert
        except (NotBlockingError, NoSublineSecantError):
            pass

    witness, tested, searched = _exhaustive_search(ctx, pts, cap)
    cert["ranks_searched"] = searched
    cert["subspaces_tested"] = tested
    cert["preimage_points"] = int(_preimage_ranks(ctx, pts).size)
    return witness, cert


def _preimage_ranks(ctx: SpreadContext, pts: PointSet) -> np.ndarray:
    return np.sort(np.concatenate(
        [ctx.element_ranks(int(r)) for r in pts.ranks]))


def _exhaustive_search(ctx: SpreadContext, pts: PointSet, cap: int):
    """Depth-first search over small-side subspaces all of whose points
    blow down into the set, each generated once via its canonical
    min-point basis chain; returns (witness or None, tested, ranks)."""
    small = ctx.small
    if small.num_points > _EXHAUSTIVE_POINT_CAP:
        raise TooLargeError(
            f"exhaustive search refused: {small.num_points} small-side "
            f"points exceed {_EXHAUSTIVE_POINT_CAP}")
    target = pts.ranks
    r_min = 1
    while gaussian_binomial(r_min, 1, ctx.p0) < len(pts):
        r_min += 1
    if r_min > cap:
        return None, 0, []
    pre_mask = np.zeros(small.num_points, dtype=bool)
    pre_mask[_preimage_ranks(ctx, pts)] = True
    tested = 0

    def image_equals(span_ranks) -> bool:
        return np.array_equal(ctx.linear_set_of_ranks(span_ranks), target)

    def extend(rows, span_ranks, depth):
        nonlocal tested
        if depth >= r_min and image_equals(span_ranks):
            return Subspace(small, rows)
        if depth == cap:
            return None
        span_mask = np.zeros(small.num_points, dtype=bool)
        span_mask[span_ranks] = True
        floor = -1 if depth == 0 else chain[-1]
        for y in np.nonzero(pre_mask & ~span_mask)[0]:
            y = int(y)
            if y <= floor:
                continue
            cand = Subspace(small, rows + [small.coords_of(y)])
            cand_ranks = cand.point_ranks()
            new = cand_ranks[~span_mask[cand_ranks]]
            if new.min() != y or not pre_mask[new].all():
                continue
            tested += 1
            chain.append(y)
            got = extend(list(cand.rows), cand_ranks, depth + 1)
            chain.pop()
            if got is not None:
                return got
        return None

    chain = []
    found = extend([], np.empty(0, dtype=np.int64), 0)
    witness = build_linear_set(ctx, found) if found is not None else None
    return witness, tested, list(range(r_min, cap + 1))
