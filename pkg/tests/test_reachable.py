"""Qutrit reachable-set geometry and the region CSV format."""

import numpy as np
import pytest

from thermoproc.memory import closed_form_p_d
from thermoproc.reachable import (SimplexRegion, bary_xy, etp_orbit_hull,
                                  etp_orbit_points, hull_margin,
                                  inside_tp_cone, mmtp2_point_regions,
                                  mtp_mixing_path, qutrit_gibbs,
                                  qutrit_mmtp2_vertices, region_export,
                                  region_import, tp_region)


class TestMemoryVertices:
    def test_a_vertices_mirror_each_other(self):
        a1, a2, b1, b2 = qutrit_mmtp2_vertices(0.75)
        np.testing.assert_allclose(a1.probs, a2.probs[[0, 2, 1]], atol=1e-15)
        np.testing.assert_allclose(b1.probs, b2.probs[[0, 2, 1]], atol=1e-15)

    def test_all_vertices_thermally_reachable(self):
        for gamma in (0.65, 0.75, 0.85):
            for v in qutrit_mmtp2_vertices(gamma):
                assert inside_tp_cone(gamma, v.probs)

    def test_pumped_component_matches_memory_closed_form(self):
        # the A vertex is the two-slot swap simulation applied to the full
        # ground population, so its target component is 1 - p_d(2, p0 = 1)
        for gamma in (0.65, 0.75, 0.9):
            a1, a2, _b1, _b2 = qutrit_mmtp2_vertices(gamma)
            expected = 1.0 - closed_form_p_d(2, 1.0, gamma)
            assert abs(a1[1] - expected) <= 1e-14
            assert abs(a2[2] - expected) <= 1e-14
            assert abs(a1[2]) <= 1e-15  # untouched level stays empty

    def test_rejects_bad_gamma(self):
        with pytest.raises(ValueError):
            qutrit_mmtp2_vertices(0.5)


class TestOrbit:
    def test_depth_one_images(self):
        gamma = 0.75
        q = (1.0 - gamma) / gamma
        pts = {tuple(np.round(p, 12)) for p in etp_orbit_points(gamma, 1)}
        assert tuple(np.round([1 - q, q, 0.0], 12)) in pts
        assert tuple(np.round([1 - q, 0.0, q], 12)) in pts

    def test_hull_contains_gibbs(self):
        for gamma in (0.65, 0.8):
            hull = etp_orbit_hull(gamma, 8)
            assert hull_margin(hull, qutrit_gibbs(gamma)) < 0.0

    def test_hull_inside_tp_cone(self):
        for gamma in (0.65, 0.75, 0.85):
            for v in etp_orbit_hull(gamma, 8).vertices:
                assert inside_tp_cone(gamma, v)

    def test_hull_monotone_in_depth(self):
        gamma = 0.75
        for depth in (1, 2, 4, 7):
            inner = etp_orbit_hull(gamma, depth)
            outer = etp_orbit_hull(gamma, depth + 1)
            for v in inner.vertices:
                assert hull_margin(outer, v) <= 1e-12

    def test_rejects_bad_depth(self):
        with pytest.raises(ValueError):
            etp_orbit_points(0.75, 0)


class TestSeparation:
    def test_b_vertices_inside_hull_at_moderate_weights(self):
        # at these pair weights the swap orbit strictly dominates the
        # two-slot memory pumps: the B states stay inside the hull
        for gamma in (0.65, 0.75, 0.85):
            hull = etp_orbit_hull(gamma, 8)
            _a1, _a2, b1, b2 = qutrit_mmtp2_vertices(gamma)
            assert hull_margin(hull, b1.probs) < 0.0
            assert hull_margin(hull, b2.probs) < 0.0

    def test_b_vertices_escape_hull_at_large_weights(self):
        # close to degeneracy the memory-assisted double pump reaches below
        # the swap-orbit floor: states no swap sequence can produce
        for gamma in (0.88, 0.92, 0.96):
            hull = etp_orbit_hull(gamma, 8)
            _a1, _a2, b1, b2 = qutrit_mmtp2_vertices(gamma)
            assert hull_margin(hull, b1.probs) > 1e-6
            assert hull_margin(hull, b2.probs) > 1e-6
            assert inside_tp_cone(gamma, b1.probs)
            assert inside_tp_cone(gamma, b2.probs)

    def test_crossover_matches_closed_forms(self):
        # the escape condition in closed form: gamma^4 (3 - 2 gamma) drops
        # below the double-swap floor ((2 gamma - 1)/gamma)^2
        for gamma in (0.75, 0.85, 0.88, 0.92):
            _a1, _a2, b1, _b2 = qutrit_mmtp2_vertices(gamma)
            assert abs(b1[0] - gamma ** 4 * (3.0 - 2.0 * gamma)) <= 1e-12
            floor = ((2.0 * gamma - 1.0) / gamma) ** 2
            escapes = gamma ** 4 * (3.0 - 2.0 * gamma) < floor
            hull = etp_orbit_hull(gamma, 8)
            assert (hull_margin(hull, b1.probs) > 0.0) == escapes


class TestRegions:
    def test_tp_region_vertices(self):
        region = tp_region(0.75)
        pts = {tuple(np.round(v, 10)) for v in region.vertices}
        third = round(1.0 / 3.0, 10)
        assert tuple(np.round([1.0, 0.0, 0.0], 10)) in pts
        assert (third, third, third) in pts

    def test_mixing_path_endpoints(self):
        path = mtp_mixing_path(0.75, 9)
        np.testing.assert_allclose(path.vertices[0], [1.0, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(path.vertices[-1], qutrit_gibbs(0.75), atol=1e-15)

    def test_polygon_validation(self):
        with pytest.raises(ValueError):
            SimplexRegion("bad", "polygon",
                          [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0],
                           [0.5, 0.25, 0.25], [0.0, 0.0, 1.0]])

    def test_bary_corners(self):
        xy = bary_xy([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        np.testing.assert_allclose(xy[0], [0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(xy[1], [1.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(xy[2], [0.5, np.sqrt(3) / 2], atol=1e-15)


class TestExport:
    def test_empty_export_is_header_only(self, tmp_path):
        path = region_export([], tmp_path / "empty.csv")
        lines = [ln for ln in open(path).read().splitlines() if ln]
        assert lines[-1].startswith("region,kind,index")
        assert all(ln.startswith("#") for ln in lines[:-1])

    def test_block_layout_and_round_trip(self, tmp_path):
        gamma = 0.75
        regions = [tp_region(gamma), etp_orbit_hull(gamma, 8),
                   mtp_mixing_path(gamma), *mmtp2_point_regions(gamma)]
        path = region_export(regions, tmp_path / "regions.csv",
                             meta={"gamma": gamma, "depth": 8})
        loaded = region_import(path)
        assert [r.tag for r in loaded] == ["TP", "ETP-approx", "MTP-path",
                                           "MMTP2-A", "MMTP2-B"]
        kinds = {r.tag: r.kind for r in loaded}
        assert sum(k in ("polygon", "path") for k in kinds.values()) == 3
        assert sum(k == "points" for k in kinds.values()) == 2
        for orig, back in zip(regions, loaded):
            np.testing.assert_allclose(back.vertices, orig.vertices, atol=1e-9)

    def test_round_trip_is_exact(self, tmp_path):
        # 17 significant digits reproduce doubles bit for bit
        regions = [etp_orbit_hull(0.8, 6)]
        loaded = region_import(region_export(regions, tmp_path / "r.csv"))
        np.testing.assert_array_equal(loaded[0].vertices, regions[0].vertices)
