"""Cheeger constant routes: inner parallel sets, TV thresholding, level sets."""

import math

import numpy as np
import pytest

from cheegerlab.cheeger_solver import (
    cheeger_inner_parallel,
    cheeger_tv,
    superlevel_check,
    tv_profile,
)
from cheegerlab.domain_grid import ScalarField, build_domain
from cheegerlab.plap_solver import minimize_rayleigh

SQUARE_H = 2.0 + math.sqrt(math.pi)  # unit square: h = (4 - pi) / (2 - sqrt(pi))


class TestInnerParallel:
    def test_unit_square(self):
        res = cheeger_inner_parallel(build_domain("square", 128, side=1.0))
        assert res.h == pytest.approx(SQUARE_H, rel=0.01)
        assert res.method == "inner_parallel"
        assert res.bracket[0] <= res.h <= res.bracket[1]
        assert res.region is not None
        assert res.region.mask.any()

    def test_unit_disk(self):
        res = cheeger_inner_parallel(build_domain("disk", 96, radius=1.0))
        assert res.h == pytest.approx(2.0, rel=0.02)

    def test_scaling_law(self):
        # h scales as 1/side, up to the bisection bracket width
        small = cheeger_inner_parallel(build_domain("square", 64, side=1.0))
        big = cheeger_inner_parallel(build_domain("square", 64, side=2.0))
        assert big.h == pytest.approx(small.h / 2.0, rel=1e-3)

    def test_rejects_nonconvex(self):
        with pytest.raises(ValueError, match="convex"):
            cheeger_inner_parallel(build_domain("lshape", 32))

    def test_json_keys(self):
        res = cheeger_inner_parallel(build_domain("square", 64))
        assert set(res.to_json_dict()) == {"h", "method", "lo", "hi", "iterations"}


class TestTvBisection:
    def test_unit_square(self):
        res = cheeger_tv(build_domain("square", 64, side=1.0))
        assert res.h == pytest.approx(SQUARE_H, rel=0.03)
        assert res.method == "tv_bisection"
        assert res.bracket[0] <= res.h <= res.bracket[1]

    def test_unit_disk(self):
        res = cheeger_tv(build_domain("disk", 64, radius=1.0))
        assert res.h == pytest.approx(2.0, rel=0.05)

    def test_agrees_with_inner_route(self):
        dom = build_domain("square", 64, side=1.0)
        a = cheeger_inner_parallel(dom)
        b = cheeger_tv(dom)
        assert b.h == pytest.approx(a.h, rel=0.03)

    def test_works_on_nonconvex(self):
        res = cheeger_tv(build_domain("lshape", 48))
        assert res.h > 0.0
        assert res.bracket[0] <= res.h <= res.bracket[1]

    def test_rejects_bad_tol(self):
        with pytest.raises(ValueError):
            cheeger_tv(build_domain("square", 32), tol=0.0)


class TestTvProfile:
    def test_zero_at_zero(self):
        dom = build_domain("square", 48, side=1.0)
        assert tv_profile(dom, 0.0) == 0.0

    def test_sign_change_brackets_cheeger(self):
        # m(t) = 0 below h and strictly negative above it
        dom = build_domain("square", 48, side=1.0)
        assert tv_profile(dom, 1.0) >= -1e-4
        assert tv_profile(dom, 8.0) < -0.1

    def test_monotone_in_t(self):
        dom = build_domain("square", 48, side=1.0)
        vals = [tv_profile(dom, t) for t in (4.0, 6.0, 8.0)]
        assert vals[0] >= vals[1] >= vals[2]

    def test_rejects_negative_t(self):
        with pytest.raises(ValueError):
            tv_profile(build_domain("square", 32), -1.0)


@pytest.fixture(scope="module")
def low_p_solve():
    dom = build_domain("square", 48, side=1.0)
    return minimize_rayleigh(dom, 1.2, 1.2)


class TestSuperlevel:

    def test_ratios_near_reference(self, low_p_solve):
        # at p = 1.2 on a coarse grid the plateau is still forming, so the
        # band is wider than in the p -> 1 sweeps
        sup = float(low_p_solve.u.values.max())
        rows, diag = superlevel_check(low_p_solve.u, SQUARE_H, [0.2 * sup, 0.3 * sup])
        assert len(rows) == 2
        for _, ratio, area in rows:
            assert ratio == pytest.approx(SQUARE_H, rel=0.08)
            assert 0.0 < area < 1.0
        assert diag["h_ref"] == SQUARE_H

    def test_coarea_and_cavalieri(self, low_p_solve):
        _, diag = superlevel_check(low_p_solve.u, SQUARE_H, [])
        assert diag["coarea_tv"] == pytest.approx(diag["tv"], rel=0.03)
        assert diag["cavalieri_l1"] == pytest.approx(diag["l1"], rel=0.01)

    def test_out_of_range_levels_noted(self, low_p_solve):
        rows, diag = superlevel_check(low_p_solve.u, SQUARE_H, [5.0, -1.0])
        assert rows == []
        assert len(diag["notes"]) == 2

    def test_rejects_negative_field(self):
        dom = build_domain("square", 32)
        bad = dom.zeros()
        bad[dom.inside] = 1.0
        bad[16, 16] = -1.0
        with pytest.raises(ValueError):
            superlevel_check(ScalarField(bad, dom), SQUARE_H, [0.5])
