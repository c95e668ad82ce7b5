import numpy as np
import pytest

from centroid_sections import (bisected_chords, chord_defect_orthogonality,
                               planar_centroid, polygon_body, radial_body,
                               recenter)

from oracles import SEED, count_antipodal_sign_changes, random_convex_hull


def _shifted_disk(center=(0.2, 0.0), r=1.0):
    cx, cy = center

    def rho(t):
        t = np.asarray(t, float)
        b = cx * np.cos(t) + cy * np.sin(t)
        return b + np.sqrt(b * b + r * r - cx * cx - cy * cy)

    return radial_body(rho)


def _equilateral(side=2.0):
    h = side * np.sqrt(3.0) / 2.0
    return polygon_body([(0.0, 0.0), (side, 0.0), (side / 2.0, h)])


# centroids


def test_square_centroid_origin():
    body = polygon_body([(-1, -1), (1, -1), (1, 1), (-1, 1)])
    assert np.max(np.abs(planar_centroid(body))) <= 1e-15


def test_triangle_centroid_vertex_average():
    body = polygon_body([(0, 0), (3, 0), (0, 3)])
    assert np.max(np.abs(planar_centroid(body) - 1.0)) <= 1e-13


def test_half_disk_centroid_closed_form():
    t = np.linspace(0.0, np.pi, 10 ** 4)
    verts = np.column_stack([np.cos(t), np.sin(t)])
    body = polygon_body(verts[::-1])  # counterclockwise with the flat edge
    c = planar_centroid(body)
    assert abs(c[0]) <= 1e-9
    assert abs(c[1] - 4.0 / (3.0 * np.pi)) <= 1e-6


def test_radial_centroid_shifted_disk():
    c = planar_centroid(_shifted_disk())
    assert abs(c[0] - 0.2) <= 1e-9 and abs(c[1]) <= 1e-12


# recentering


def test_recenter_centered_disk_noop():
    disk = radial_body(lambda t: np.full_like(np.asarray(t, float), 1.3))
    again = recenter(disk)
    t = np.linspace(0.0, 2.0 * np.pi, 64)
    assert np.max(np.abs(again.radius(t) - 1.3)) <= 1e-12


def test_recenter_shifted_disk_kills_defect():
    body = _shifted_disk()
    assert abs(body.radius(0.0) - body.radius(np.pi) - 0.4) <= 1e-12
    centered = recenter(body)
    assert abs(centered.radius(0.0) - centered.radius(np.pi)) <= 1e-9
    assert np.max(np.abs(planar_centroid(centered))) <= 1e-9


def test_recenter_triangle_keeps_asymmetry():
    centered = recenter(_equilateral())
    assert np.max(np.abs(planar_centroid(centered))) <= 1e-12
    t = np.linspace(0.0, np.pi, 181, endpoint=False)
    defect = centered.radius(t) - centered.radius(t + np.pi)
    assert np.max(np.abs(defect)) > 1e-2


def test_defect_orthogonality_after_recenter():
    blob = radial_body(lambda t: 1.0 + 0.3 * np.cos(t) + 0.1 * np.sin(2.0 * t))
    centered = recenter(blob)
    res = chord_defect_orthogonality(centered)
    assert np.max(np.abs(res)) <= 1e-8


def test_defect_antiperiodic():
    centered = recenter(_equilateral())
    t = np.linspace(0.0, 2.0 * np.pi, 257, endpoint=False)
    f = centered.radius(t) - centered.radius(t + np.pi)
    g = centered.radius(t + np.pi) - centered.radius(t + 2.0 * np.pi)
    assert np.max(np.abs(f + g)) <= 1e-12


# bisected chords


def test_equilateral_triangle_three_side_directions():
    side_angles = np.array([0.0, np.pi / 3.0, 2.0 * np.pi / 3.0])
    res = bisected_chords(_equilateral())
    assert res["count"] == 3
    got = np.sort(np.asarray(res["directions"]))
    for angle, ref in zip(got, np.sort(side_angles)):
        assert abs(angle - ref) <= 1e-8


def test_scalene_triangle_directions_parallel_to_sides():
    verts = [(0.0, 0.0), (2.0, 0.0), (0.6, 1.5)]
    sides = []
    for i in range(3):
        dx, dy = (np.asarray(verts[(i + 1) % 3]) - np.asarray(verts[i]))
        sides.append(np.arctan2(dy, dx) % np.pi)
    res = bisected_chords(polygon_body(verts))
    assert res["count"] == 3
    got = np.sort(np.asarray(res["directions"]))
    assert np.max(np.abs(got - np.sort(sides))) <= 1e-8


def test_centered_ellipse_symmetric():
    def rho(t):
        t = np.asarray(t, float)
        return 2.0 / np.sqrt(np.cos(t) ** 2 + 4.0 * np.sin(t) ** 2)

    res = bisected_chords(radial_body(rho))
    assert res["symmetric_all"] is True
    assert res["count"] is None
    assert res["directions"] == []


def test_blob_count_matches_brute_scan():
    blob = radial_body(lambda t: 1.0 + 0.3 * np.cos(t) + 0.1 * np.sin(2.0 * t))
    centered = recenter(blob)
    # oracle first: dense sign scan of the antipodal defect
    expected = count_antipodal_sign_changes(centered.radius)
    res = bisected_chords(centered)
    assert res["count"] == expected
    assert res["count"] >= 3 and res["count"] % 2 == 1


def test_random_convex_polygons_have_odd_count_at_least_three():
    rng = np.random.default_rng(SEED)
    counts = {}
    for _ in range(100):
        body = polygon_body(random_convex_hull(rng))
        res = bisected_chords(body)
        assert res["count"] >= 3
        assert res["count"] % 2 == 1
        counts[res["count"]] = counts.get(res["count"], 0) + 1
    assert sum(counts.values()) == 100


# input validation


def test_polygon_rejects_degenerate_input():
    with pytest.raises(ValueError):
        polygon_body([(0, 0), (1, 1)])
    with pytest.raises(ValueError):
        polygon_body([(0, 0), (1, 0), (2, 0)])
    with pytest.raises(ValueError):  # reflex vertex
        polygon_body([(0, 0), (2, 0), (1, 0.2), (1, 2)])


def test_radial_rejects_nonpositive_profile():
    with pytest.raises(ValueError):
        radial_body(lambda t: np.cos(t))


def test_polygon_accepts_clockwise_vertex_order():
    cw = polygon_body([(-1, -1), (-1, 1), (1, 1), (1, -1)])
    assert np.max(np.abs(planar_centroid(cw))) <= 1e-15
