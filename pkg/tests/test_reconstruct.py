"""Witness reconstruction from subline secants, span pairs, secant bounds."""

from fractions import Fraction

import numpy as np
import pytest

from blockingsets.errors import (BadParamsError, NoSublineSecantError,
                                 NotBlockingError)
from blockingsets.fields import make_field
from blockingsets.linearsets import enumerate_sublines
from blockingsets.projspace import PointSet, ProjectiveSpace, Subspace
from blockingsets.reconstruct import (check_span_lemma, reconstruct,
                                      secant_count_bounds)
from blockingsets.spreads import spread_context


def test_reconstruct_baer(baer):
    res = reconstruct(baer.points, 1, 3)
    assert res.success and res.status == "ok"
    assert res.dim_W == 2 and res.image_equal
    assert res.P == int(baer.points.ranks[0])
    assert res.x == int(baer.ctx.element_ranks(res.P).min())
    assert len(res.secants_used) == 4 == len(res.transversals)
    assert res.diagnostics["secants_through_P"] == 4
    assert res.diagnostics["skipped_non_sublines"] == 0
    assert res.diagnostics["target_dim"] == 2
    assert baer.ctx.linear_set_of(res.W) == baer.points
    for trace in res.secants_used:
        assert len(trace) == 4 and res.P in trace
    for ell in res.transversals:
        assert ell.dim == 1 and res.x in ell.point_ranks()


def test_reconstruct_rank4(rank4_27):
    res = reconstruct(rank4_27.points, 1, 3)
    assert res.success and res.dim_W == 3
    assert rank4_27.ctx.linear_set_of(res.W) == rank4_27.points


def test_reconstruct_subgeometry_49(subgeom_49):
    res = reconstruct(subgeom_49.points, 1, 7)
    assert res.success and res.dim_W == 2 and res.image_equal


def test_reconstruct_cone(cone_9):
    res = reconstruct(cone_9.points, 2, 3)
    assert res.success and res.dim_W == 4
    assert res.diagnostics["target_dim"] == 4
    assert len(res.secants_used) == 36
    assert cone_9.ctx.linear_set_of(res.W) == cone_9.points


def test_reconstruct_all_points(baer):
    results = reconstruct(baer.points, 1, 3, point_policy="all")
    assert len(results) == 13
    assert sorted(r.P for r in results) == [int(x) for x in baer.points.ranks]
    for res in results:
        assert res.success and res.image_equal
        assert baer.ctx.linear_set_of(res.W) == baer.points


def test_reconstruct_guards(baer):
    with pytest.raises(BadParamsError):
        reconstruct(baer.points, 1, 9)
    with pytest.raises(BadParamsError):
        reconstruct(baer.points, 1, 3, point_policy="median")
    space = baer.points.space
    subline = PointSet(space, baer.points.ranks[:4])
    with pytest.raises(NotBlockingError):
        reconstruct(subline, 1, 3)
    line = PointSet(space, Subspace(
        space, [(1, 0, 0), (0, 1, 0)]).point_ranks())
    with pytest.raises(NoSublineSecantError):
        reconstruct(line, 1, 3)


def _line_and_subline():
    """A blocking line of PG(2,9) plus the subline of a crossing line."""
    space = ProjectiveSpace(2, make_field(3, 2))
    ell = Subspace(space, [(1, 0, 0), (0, 1, 0)])
    m = Subspace(space, [(1, 0, 0), (0, 0, 1)])
    z = space.rank_of((1, 0, 0))
    sub = next(s for s in enumerate_sublines(m, 3) if z in s)
    return space, ell, m, z, sub


def test_reconstruct_span_too_small():
    space, ell, m, z, sub = _line_and_subline()
    extras = [int(r) for r in sub.ranks if r != z]
    pts = PointSet(space, list(ell.point_ranks()) + extras)
    res = reconstruct(pts, 1, 3)
    assert not res.success and res.status == "span too small"
    assert res.dim_W == 1 and not res.image_equal


def test_reconstruct_skips_non_subline_secants():
    space, ell, m, z, sub = _line_and_subline()
    on_sub = [int(r) for r in sub.ranks if r != z]
    spoiler = next(int(r) for r in m.point_ranks()
                   if r != z and r not in sub)
    pts = PointSet(space, list(ell.point_ranks()) + on_sub[:2] + [spoiler])
    res = reconstruct(pts, 1, 3)
    assert res.status == "no secant trace is a subline"
    assert res.W is None and res.dim_W is None and not res.success
    assert res.diagnostics["skipped_non_sublines"] == 1
    assert len(res.diagnostics["skipped"]) == 1
    assert res.diagnostics["skipped"][0] == m


def test_check_span_lemma_baer(baer):
    res = reconstruct(baer.points, 1, 3)
    report = check_span_lemma(baer.points, 1, 3, res.P, res.x)
    assert report.ok and report.pairs_checked == 6
    assert report.failing_pairs == []
    # coordinate forms of P and x are accepted too
    space = baer.points.space
    report2 = check_span_lemma(baer.points, 1, 3,
                               space.coords_of(res.P),
                               baer.ctx.small.coords_of(res.x))
    assert report2.ok and report2.pairs_checked == 6


def test_check_span_lemma_rejects_outsider(baer):
    outside = next(r for r in range(baer.points.space.num_points)
                   if r not in baer.points)
    with pytest.raises(BadParamsError):
        check_span_lemma(baer.points, 1, 3, outside, 0)


def test_secant_bounds_baer(baer):
    report = secant_count_bounds(baer.points, 1, 3)
    assert report.ok and report.bound == Fraction(0)
    assert report.h == 2 and not report.within_hypotheses
    assert report.points_checked == 13 and report.min_observed == 4
    assert report.violations == []


def test_secant_bounds_subgeometry(subgeom_49):
    report = secant_count_bounds(subgeom_49.points, 1, 7)
    assert report.ok and report.bound == Fraction(4)
    assert report.within_hypotheses
    assert report.min_observed == 8


def test_secant_bounds_cone(cone_9):
    report = secant_count_bounds(cone_9.points, 2, 3)
    # k >= 2 formula: ((p0^(hk)-1)/(p0^h-1) - 3 p0^(hk-h-3)) (p0^(h-1) - 4 p0^(h-2)) + 1
    # = (10 - 3/3) (3 - 4) + 1 = -8, vacuous for p0 = 3 but exact
    assert report.bound == Fraction(-8)
    assert report.k == 2 and report.ok
    assert report.min_observed == 36


def test_secant_bounds_violations():
    space = ProjectiveSpace(2, make_field(7, 2))
    line = Subspace(space, [(1, 0, 0), (0, 1, 0)])
    sub = next(enumerate_sublines(line, 7))
    off = space.rank_of((0, 0, 1))
    pts = PointSet(space, list(sub.ranks) + [off])
    report = secant_count_bounds(pts, 1, 7)
    assert not report.ok and report.bound == Fraction(4)
    assert report.points_checked == 8 and report.min_observed == 1
    assert len(report.violations) == 8
    for rank, observed in report.violations:
        assert observed == 1 and rank in sub


def test_secant_bounds_param_guard(baer):
    with pytest.raises(BadParamsError):
        secant_count_bounds(baer.points, 1, 5)
    with pytest.raises(BadParamsError):
        secant_count_bounds(baer.points, 1, 1)
