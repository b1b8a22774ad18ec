"""Recovering the small-side witness of a linear blocking set.

Given a k-blocking set B of PG(n, p^h) and one of its points P on a
(p0+1)-secant, every such secant trace through P is (for linear B) the
image of a unique small-side line through a fixed point x of the spread
element S(P).  The span W of those transversal lines has projective
dimension h*k and maps back onto B exactly when the linear structure is
really there; both facts together are the success criterion, so the
routine doubles as a counterexample detector on arbitrary input.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np

from .blocking import is_k_blocking, secant_analysis, traces_of
from .errors import (
    BadParamsError,
    NoSublineSecantError,
    NotASublineError,
    NotBlockingError,
)
from .projspace import PointSet, Subspace, span
from .spreads import SpreadContext, spread_context


class ReconstructionResult(NamedTuple):
    P: int                     # base point rank (big side)
    x: int                     # chosen point rank of S(P) (small side)
    secants_used: list         # (p0+1)-secant traces, as PointSets
    transversals: list         # small-side lines through x
    W: Optional[Subspace]      # span of the transversals
    dim_W: Optional[int]
    image_equal: bool
    status: str
    diagnostics: dict

    @property
    def success(self) -> bool:
        return self.status == "ok"


def _status(dim_w: int, target: int, image: np.ndarray,
            want: np.ndarray) -> str:
    if dim_w < target:
        return "span too small"
    if dim_w > target:
        return "span too large"
    extra = np.setdiff1d(image, want).size
    missing = np.setdiff1d(want, image).size
    if extra and missing:
        return "image differs"
    if extra:
        return "image overflows the set"
    if missing:
        return "image is a proper subset"
    return "ok"


def _reconstruct_from(ctx: SpreadContext, pts: PointSet, k: int, p0: int,
                      p_rank: int, line_summary,
                      secant_indices) -> ReconstructionResult:
    space = pts.space
    h = space.field.t
    x = int(ctx.element_ranks(p_rank).min())
    used, transversals, skipped = [], [], []
    for idx in secant_indices:
        idx = int(idx)
        trace = PointSet(
            space,
            pts.ranks[line_summary.inc_pt[line_summary.inc_sub == idx]])
        try:
            ell = ctx.transversal_line(trace, x)
        except NotASublineError:
            skipped.append(line_summary.subspace_at(idx))
            continue
        used.append(trace)
        transversals.append(ell)
    diagnostics = {
        "secants_through_P": len(secant_indices),
        "skipped_non_sublines": len(skipped),
        "skipped": skipped,
        "target_dim": h * k,
    }
    if not transversals:
        return ReconstructionResult(
            p_rank, x, [], [], None, None, False,
            "no secant trace is a subline", diagnostics)
    W = span(ctx.small, *transversals)
    image = ctx.linear_set_of_ranks(W.point_ranks())
    status = _status(W.dim, h * k, image, pts.ranks)
    return ReconstructionResult(
        p_rank, x, used, transversals, W, W.dim,
        bool(np.array_equal(image, pts.ranks)), status, diagnostics)


def reconstruct(pts: PointSet, k: int, p0: int,
                point_policy: str = "first"):
    """Rebuild the witness from the (p0+1)-secants through one point.

    point_policy "first" uses the lowest-rank point of B lying on a
    (p0+1)-secant and returns one result; "all" returns a list with one
    result per such point.  x is always the lowest-rank point of S(P).
    """
    space = pts.space
    if p0 != space.field.p:
        raise BadParamsError(
            "reconstruction runs in the prime-subfield model")
    if point_policy not in ("first", "all"):
        raise BadParamsError(f"unknown point policy {point_policy!r}")
    h = space.field.t
    ctx = spread_context(space)
    if h * k > ctx.small.n:
        raise BadParamsError(
            f"target dimension {h * k} exceeds the small side")
    blocking, witness = is_k_blocking(pts, k)
    if not blocking:
        raise NotBlockingError(f"an (n-k)-space misses the set: {witness!r}")
    lines = traces_of(pts, 1)
    per_point = lines.per_point_counts(exact=p0 + 1)
    admissible = np.nonzero(per_point > 0)[0]
    if admissible.size == 0:
        raise NoSublineSecantError(
            f"the set has no ({p0 + 1})-secant line")

    def run(pos: int) -> ReconstructionResult:
        sec = [i for i in lines.indices_through_point(int(pos))
               if lines.sizes[int(i)] == p0 + 1]
        return _reconstruct_from(ctx, pts, k, p0,
                                 int(pts.ranks[int(pos)]), lines, sec)

    if point_policy == "first":
        return run(int(admissible[0]))
    return [run(int(pos)) for pos in admissible]


class SpanPairReport(NamedTuple):
    ok: bool
    pairs_checked: int
    failing_pairs: list        # (i, j, extra point ranks outside B)


def check_span_lemma(pts: PointSet, k: int, p0: int, P, x) -> SpanPairReport:
    """For every pair of transversal lines through x: the linear set of
    their span stays inside B.  Failing pairs are witnesses, not errors."""
    space = pts.space
    ctx = spread_context(space)
    if isinstance(P, (int, np.integer)):
        p_rank = int(P)
    else:
        p_rank = space.rank_of(space.normalize(P))
    lines = traces_of(pts, 1)
    pos = int(np.searchsorted(pts.ranks, p_rank))
    if pos >= pts.ranks.size or pts.ranks[pos] != p_rank:
        raise BadParamsError("P must be a point of the set")
    xrank = int(x) if isinstance(x, (int, np.integer)) \
        else ctx.small.rank_of(ctx.small.normalize(x))
    transversals = []
    for idx in lines.indices_through_point(pos):
        idx = int(idx)
        if lines.sizes[idx] != p0 + 1:
            continue
        trace = PointSet(
            space, pts.ranks[lines.inc_pt[lines.inc_sub == idx]])
        try:
            transversals.append(ctx.transversal_line(trace, xrank))
        except NotASublineError:
            continue
    mask = pts.mask()
    failing = []
    pairs = 0
    for i in range(len(transversals)):
        for j in range(i + 1, len(transversals)):
            pairs += 1
            image = ctx.linear_set_of_ranks(
                span(ctx.small, transversals[i],
                     transversals[j]).point_ranks())
            extra = image[~mask[image]]
            if extra.size:
                failing.append((i, j, extra))
    return SpanPairReport(not failing, pairs, failing)


class SecantBoundReport(NamedTuple):
    ok: bool
    k: int
    p0: int
    h: int
    bound: object              # exact Fraction
    within_hypotheses: bool
    points_checked: int
    min_observed: Optional[int]
    violations: list           # (point rank, observed count)


def secant_count_bounds(pts: PointSet, k: int, p0: int) -> SecantBoundReport:
    """Minimum number of (p0+1)-secants through any point that lies on at
    least one, against the exact lower-bound formula for its k.

    Violations are listed, never swallowed: each one is a potential
    refutation of the underlying statement and must surface.
    """
    from fractions import Fraction

    space = pts.space
    e = 0
    m = p0
    while m % space.field.p == 0:
        m //= space.field.p
        e += 1
    if m != 1 or e == 0 or space.field.t % e:
        raise BadParamsError(f"p0={p0} is not a subfield order")
    h = space.field.t // e
    f = Fraction
    if k == 1:
        bound = f(p0) ** (h - 1) - 4 * f(p0) ** (h - 2) + 1
    else:
        bound = ((f(p0) ** (h * k) - 1) / (f(p0) ** h - 1)
                 - 3 * f(p0) ** (h * k - h - 3)) \
            * (f(p0) ** (h - 1) - 4 * f(p0) ** (h - 2)) + 1
    report = secant_analysis(pts, k, p0)
    counts = report.per_point_subline_secants
    on = counts > 0
    below = counts * bound.denominator < bound.numerator
    violations = [(int(pts.ranks[i]), int(counts[i]))
                  for i in np.nonzero(on & below)[0]]
    return SecantBoundReport(
        ok=not violations,
        k=k, p0=p0, h=h, bound=bound,
        within_hypotheses=p0 >= 7,
        points_checked=int(on.sum()),
        min_observed=int(counts[on].min()) if on.any() else None,
        violations=violations,
    )
