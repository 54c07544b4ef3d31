"""Raster geometry: masks, measures, norms, and mask file round-trips."""

import math

import numpy as np
import pytest

from cheegerlab.domain_grid import (
    BinaryRegion,
    GridDomain,
    ScalarField,
    build_domain,
    grad_energy_p,
    indicator,
    inner_region,
    load_mask,
    lq_norm,
    measure_region,
    mollified_indicator,
    save_mask,
    total_variation,
)

SQRT2 = math.sqrt(2.0)


def whole(domain):
    return BinaryRegion(domain.inside.copy(), domain)


def centered_disk(domain, radius):
    # cell centers of a side-1 square domain sit at (i - 2 + 0.5) h
    x = (np.arange(domain.nx) - 2 + 0.5) * domain.spacing
    X, Y = np.meshgrid(x, x, indexing="ij")
    mask = (np.hypot(X - 0.5, Y - 0.5) < radius) & domain.inside
    return BinaryRegion(mask, domain)


class TestBuildDomain:
    def test_square_exact_area_and_spacing(self):
        dom = build_domain("square", 64, side=1.0)
        assert dom.spacing == 1.0 / 64
        assert dom.area == pytest.approx(1.0, abs=1e-14)
        assert dom.shape_tag == "square"
        assert dom.convex

    def test_square_side_scales(self):
        dom = build_domain("square", 32, side=2.5)
        assert dom.spacing == 2.5 / 32
        assert dom.area == pytest.approx(2.5**2, abs=1e-12)

    def test_disk_area_and_coverage(self):
        dom = build_domain("disk", 128, radius=1.0)
        assert dom.spacing == 2.0 / 128
        assert dom.area == pytest.approx(math.pi, rel=5e-3)
        assert np.all(dom.coverage >= 0.0) and np.all(dom.coverage <= 1.0)
        # coverage refines the cell-counting area
        cov_area = float(dom.coverage.sum()) * dom.spacing**2
        assert abs(cov_area - math.pi) <= abs(dom.area - math.pi) + 1e-9

    def test_rectangle_defaults_and_aspect(self):
        dom = build_domain("rectangle", 64)
        assert dom.spacing == 2.0 / 64
        assert dom.area == pytest.approx(2.0, abs=1e-12)
        assert dom.nx > dom.ny

    def test_lshape_three_quarters(self):
        dom = build_domain("lshape", 64, side=1.0)
        assert dom.area == pytest.approx(0.75, abs=1e-12)
        assert not dom.convex

    def test_custom_mask(self):
        core = np.zeros((20, 12), dtype=bool)
        core[4:16, 3:9] = True
        dom = build_domain("mask", 32, mask=core, spacing=0.05)
        assert dom.shape_tag == "custom"
        assert not dom.convex
        assert dom.inside.sum() == core.sum()
        assert dom.area == pytest.approx(core.sum() * 0.05**2, abs=1e-14)

    def test_margin_is_empty(self):
        for tag in ("square", "disk", "rectangle", "lshape"):
            dom = build_domain(tag, 24)
            assert not dom.inside[:2, :].any()
            assert not dom.inside[-2:, :].any()
            assert not dom.inside[:, :2].any()
            assert not dom.inside[:, -2:].any()

    def test_arrays_read_only(self):
        dom = build_domain("square", 16)
        with pytest.raises(ValueError):
            dom.inside[5, 5] = False
        with pytest.raises(ValueError):
            dom.coverage[5, 5] = 0.5

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError, match="resolution"):
            build_domain("square", 8)
        with pytest.raises(ValueError, match="unknown shape"):
            build_domain("hexagon", 32)
        with pytest.raises(ValueError, match="side"):
            build_domain("square", 32, side=-1.0)
        with pytest.raises(ValueError, match="radius"):
            build_domain("disk", 32, radius=0.0)
        with pytest.raises(ValueError, match="unexpected size"):
            build_domain("square", 32, foo=3)
        with pytest.raises(ValueError, match="nonempty"):
            build_domain("mask", 32, mask=np.zeros((8, 8), dtype=bool))

    def test_border_violation_rejected(self):
        full = np.ones((20, 20), dtype=bool)
        with pytest.raises(ValueError, match="margin"):
            GridDomain(20, 20, 0.1, full, full.astype(float), "custom", False)


class TestFieldAndRegion:
    def test_field_validation(self):
        dom = build_domain("square", 16)
        with pytest.raises(ValueError):
            ScalarField(np.zeros((3, 3)), dom)
        bad = dom.zeros()
        bad[0, 0] = 1.0  # outside the mask
        with pytest.raises(ValueError):
            ScalarField(bad, dom)
        nan = dom.zeros()
        nan[8, 8] = np.nan
        with pytest.raises(ValueError):
            ScalarField(nan, dom)

    def test_region_validation(self):
        dom = build_domain("square", 16)
        with pytest.raises(ValueError):
            BinaryRegion(np.ones((3, 3), dtype=bool), dom)
        outside = np.ones((dom.nx, dom.ny), dtype=bool)
        with pytest.raises(ValueError):
            BinaryRegion(outside, dom)


class TestMeasures:
    def test_square_measures(self):
        dom = build_domain("square", 256, side=1.0)
        area, per = measure_region(whole(dom))
        assert area == pytest.approx(1.0, abs=1e-12)
        assert per == pytest.approx(4.0, rel=0.01)

    def test_disk_measures(self):
        dom = build_domain("disk", 256, radius=1.0)
        area, per = measure_region(whole(dom))
        assert area == pytest.approx(math.pi, rel=1e-3)
        assert per == pytest.approx(2.0 * math.pi, rel=0.01)

    def test_inner_region_square_exact(self):
        # peeling r off a unit square leaves a (1-2r) square of cells
        dom = build_domain("square", 128, side=1.0)
        reg = inner_region(dom, 0.25)
        assert reg.mask.sum() * dom.spacing**2 == pytest.approx(0.25, abs=1e-12)

    def test_inner_region_shrinks_and_empties(self):
        dom = build_domain("disk", 64, radius=1.0)
        r_small = inner_region(dom, 0.1)
        r_big = inner_region(dom, 0.5)
        assert r_big.mask.sum() < r_small.mask.sum() < dom.inside.sum()
        assert not inner_region(dom, 2.0).mask.any()

    def test_inner_region_nested(self):
        dom = build_domain("disk", 64, radius=1.0)
        inner = inner_region(dom, 0.4).mask
        outer = inner_region(dom, 0.2).mask
        assert np.all(inner <= outer)

    def test_disk_region_inside_square(self):
        dom = build_domain("square", 256, side=1.0)
        area, per = measure_region(centered_disk(dom, 0.4))
        assert area == pytest.approx(math.pi * 0.4**2, rel=0.015)
        assert per == pytest.approx(2.0 * math.pi * 0.4, rel=0.015)

    def test_disk_measures_converge(self):
        errs_a, errs_p = [], []
        for n in (64, 128, 256):
            dom = build_domain("disk", n, radius=1.0)
            area, per = measure_region(whole(dom))
            errs_a.append(abs(area - math.pi))
            errs_p.append(abs(per - 2.0 * math.pi))
        assert errs_a[0] > errs_a[1] > errs_a[2]
        assert errs_p[0] >= errs_p[1] >= errs_p[2]


class TestNormsAndEnergies:
    def test_lq_norm_of_indicator(self):
        dom = build_domain("square", 64, side=1.0)
        f = indicator(whole(dom))
        for q in (0.5, 1.0, 2.0, 3.0):
            assert lq_norm(f, q) == pytest.approx(1.0, abs=1e-12)
        assert lq_norm(f, np.inf) == 1.0

    def test_lq_norm_scaling(self):
        dom = build_domain("square", 64, side=1.0)
        f = ScalarField(3.0 * indicator(whole(dom)).values, dom)
        assert lq_norm(f, 2.0) == pytest.approx(3.0, abs=1e-12)
        assert lq_norm(f, 0.5) == pytest.approx(3.0, abs=1e-12)
        assert lq_norm(f, np.inf) == 3.0

    def test_lq_norm_rejects_nonpositive_q(self):
        dom = build_domain("square", 16)
        f = indicator(whole(dom))
        with pytest.raises(ValueError):
            lq_norm(f, 0.0)
        with pytest.raises(ValueError):
            lq_norm(f, -1.0)

    def test_sharp_square_tv_identity(self):
        # forward differences merge the two jumps at one corner into a
        # diagonal, so TV(indicator) = perimeter - (2 - sqrt(2)) h exactly
        for n in (32, 64, 128):
            dom = build_domain("square", n, side=1.0)
            tv = total_variation(indicator(whole(dom)))
            assert tv == pytest.approx(4.0 - (2.0 - SQRT2) * dom.spacing, rel=1e-12)

    def test_sharp_rectangle_tv_identity(self):
        dom = build_domain("rectangle", 64, a=2.0, b=1.0)
        tv = total_variation(indicator(whole(dom)))
        assert tv == pytest.approx(6.0 - (2.0 - SQRT2) * dom.spacing, rel=1e-12)

    def test_grad_energy_p1_equals_tv(self):
        dom = build_domain("disk", 48, radius=1.0)
        f = mollified_indicator(whole(dom))
        assert grad_energy_p(f, 1.0, 0.0) == pytest.approx(total_variation(f), rel=1e-12)

    def test_grad_energy_p2_of_cone(self):
        # E_2(u) = int |grad u|^2; a unit-slope cone on the disk has
        # gradient magnitude 1 a.e., so the energy is close to the area
        dom = build_domain("disk", 128, radius=1.0)
        from scipy import ndimage

        dist = ndimage.distance_transform_edt(dom.inside, sampling=dom.spacing)
        f = ScalarField(dist, dom)
        assert grad_energy_p(f, 2.0, 0.0) == pytest.approx(math.pi, rel=0.05)

    def test_mollified_indicator_tv_beats_sharp(self):
        dom = build_domain("disk", 128, radius=1.0)
        reg = whole(dom)
        tv_smooth = total_variation(mollified_indicator(reg))
        tv_sharp = total_variation(indicator(reg))
        per = 2.0 * math.pi
        assert abs(tv_smooth - per) / per < 0.08
        assert abs(tv_smooth - per) < abs(tv_sharp - per)

    def test_tv_consistent_with_measured_perimeter(self):
        # for a region away from the domain boundary the smoothed TV and
        # the contour-traced perimeter are two routes to the same number
        dom = build_domain("square", 256, side=1.0)
        reg = centered_disk(dom, 0.4)
        tv = total_variation(mollified_indicator(reg))
        _, per = measure_region(reg)
        assert tv == pytest.approx(per, rel=0.05)

    def test_homogeneity_exact(self):
        dom = build_domain("disk", 48, radius=1.0)
        f = mollified_indicator(whole(dom))
        g = ScalarField(3.0 * f.values, dom)
        assert total_variation(g) == pytest.approx(3.0 * total_variation(f), rel=1e-12)
        assert grad_energy_p(g, 1.5, 0.0) == pytest.approx(
            3.0**1.5 * grad_energy_p(f, 1.5, 0.0), rel=1e-12
        )
        assert lq_norm(g, 1.7) == pytest.approx(3.0 * lq_norm(f, 1.7), rel=1e-12)

    def test_energy_eps_monotone(self):
        dom = build_domain("disk", 48, radius=1.0)
        f = mollified_indicator(whole(dom))
        e0 = grad_energy_p(f, 1.5, 0.0)
        assert grad_energy_p(f, 1.5, 1e-2) > e0
        assert grad_energy_p(f, 1.5, 1e-4) > e0

    def test_energy_rejects_negative_eps(self):
        dom = build_domain("square", 16)
        f = indicator(whole(dom))
        with pytest.raises(ValueError):
            grad_energy_p(f, 1.5, -1e-3)


class TestMaskIO:
    @pytest.mark.parametrize(
        "tag,kw",
        [
            ("square", {"side": 1.0}),
            ("disk", {"radius": 0.7}),
            ("lshape", {"side": 1.0}),
        ],
    )
    def test_round_trip(self, tmp_path, tag, kw):
        dom = build_domain(tag, 32, **kw)
        path = tmp_path / "mask.txt"
        save_mask(dom, path)
        back = load_mask(path)
        assert back.inside.shape == dom.inside.shape
        assert np.array_equal(back.inside, dom.inside)
        assert back.spacing == dom.spacing
        assert back.shape_tag == "custom"

    def test_header_format(self, tmp_path):
        dom = build_domain("square", 16, side=1.0)
        path = tmp_path / "mask.txt"
        save_mask(dom, path)
        header = path.read_text().splitlines()[0].split()
        assert int(header[0]) == dom.nx
        assert int(header[1]) == dom.ny
        assert float(header[2]) == dom.spacing

    def test_load_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 3 0.1\n010\n111\n")
        with pytest.raises(ValueError):
            load_mask(path)
