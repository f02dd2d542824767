import numpy as np
import pytest

from mixedvol import bodies as B
from mixedvol import measures as MS
from mixedvol.bodies import SupportEvaluator
from mixedvol.errors import DegenerateInput

from conftest import rel_err


def test_mixed_volume_diagonal_is_volume(unit_cube, std_simplex):
    assert MS.mixed_volume(unit_cube, unit_cube, unit_cube) == pytest.approx(1.0)
    assert MS.mixed_volume(std_simplex, std_simplex, std_simplex) == \
        pytest.approx(1.0 / 6.0)


def test_mixed_volume_symmetry():
    k = B.random_hull(8, 1)
    l = B.random_hull(8, 2)
    m = B.random_hull(8, 3)
    vals = [MS.mixed_volume(a, b, c) for a, b, c in
            [(k, l, m), (l, k, m), (m, l, k), (k, m, l)]]
    for v in vals[1:]:
        assert rel_err(vals[0], v) < 1e-12


def test_mixed_volume_multilinearity():
    k = B.random_hull(8, 4)
    l = B.random_hull(8, 5)
    m = B.random_hull(8, 6)
    s = B.minkowski_sum(k, l)
    lhs = MS.mixed_volume(s, s, m)
    rhs = (MS.mixed_volume(k, k, m) + 2 * MS.mixed_volume(k, l, m)
           + MS.mixed_volume(l, l, m))
    assert rel_err(lhs, rhs) < 1e-11


def test_mixed_volume_translation_invariance():
    k = B.random_hull(8, 7)
    l = B.random_hull(8, 8)
    m = B.random_hull(8, 9)
    v1 = MS.mixed_volume(k, l, m)
    v2 = MS.mixed_volume(k.translate([3, -1, 2]), l, m.translate([0, 5, 0]))
    assert rel_err(v1, v2) < 1e-10


def test_cube_segment_mixed_volume(unit_cube, unit_segment):
    # V(C, C, S) = (1/3) * (area of the shadow of C along e1) = 1/3
    assert MS.mixed_volume(unit_cube, unit_cube, unit_segment) == \
        pytest.approx(1.0 / 3.0, abs=1e-12)


def test_area_measure_cube(unit_cube):
    mu = MS.area_measure(unit_cube)
    assert len(mu.atoms) == 6
    assert mu.total_mass() == pytest.approx(6.0)
    assert mu.barycenter_residual() < 1e-12


def test_area_measure_rejects_lower_dim(unit_square):
    with pytest.raises(DegenerateInput):
        MS.area_measure(unit_square)


def test_mixed_area_measure_cube_segment(unit_cube, unit_segment):
    s = MS.mixed_area_measure(unit_cube, unit_segment)
    # atoms at +-e2, +-e3 with mass 1/2 each
    assert len(s.atoms) == 4
    assert s.total_mass() == pytest.approx(2.0)
    for u, mass in s.atoms:
        assert abs(u[0]) < 1e-12
        assert mass == pytest.approx(0.5)


def test_mixed_area_measure_barycenter():
    for seed in range(5):
        l = B.random_hull(10, seed)
        m = B.random_hull(10, seed + 100)
        s = MS.mixed_area_measure(l, m)
        assert s.barycenter_residual() < 1e-9 * s.total_mass()


def test_representation_formula_vs_polarization():
    # V(K, L, M) = (1/3) int h_K dS_{L,M}
    for seed in range(10):
        k = B.random_hull(10, seed)
        l = B.random_hull(10, seed + 50)
        m = B.random_hull(10, seed + 150)
        v1 = MS.mixed_volume(k, l, m)
        v2 = MS.mixed_volume_via_measure(k, l, m)
        assert rel_err(v1, v2) < 1e-10


def test_mv3_ball_slots(unit_cube):
    ball = B.unit_ball()
    # V(B, C, C) = surface/3 = 2; V(B, B, C) = pi via the arc measure
    assert MS.mv3(ball, unit_cube, unit_cube) == pytest.approx(2.0, abs=1e-12)
    assert MS.mv3(ball, ball, unit_cube) == pytest.approx(np.pi, rel=1e-12)
    # radius scaling
    b2 = B.Ball(np.array([1.0, 2.0, 3.0]), 0.5)
    assert MS.mv3(b2, unit_cube, unit_cube) == pytest.approx(1.0, abs=1e-12)


def test_quadratic_deficit_nonnegative_random():
    for seed in range(20):
        k = B.random_hull(8, seed)
        l = B.random_hull(8, seed + 1000)
        m = B.random_hull(8, seed + 2000)
        dr = MS.quadratic_deficit(k, l, m)
        assert dr.deficit >= -1e-9 * dr.scale


def test_quadratic_deficit_zero_for_homothety():
    l = B.random_hull(10, 11)
    k = B.hull(2.0 * l.vertices + np.array([1.0, -1.0, 0.5]))
    m = B.random_hull(10, 12)
    dr = MS.quadratic_deficit(k, l, m)
    assert abs(dr.deficit) < 1e-10 * dr.scale


def test_classical_functionals_cube(unit_cube):
    vol, s, w = MS.classical_functionals(unit_cube)
    assert vol == pytest.approx(1.0)
    assert s == pytest.approx(6.0, abs=1e-12)
    assert w == pytest.approx(1.5, abs=1e-12)   # mean width of the unit cube


def test_vbbm_conewise_cube_and_simplex(unit_cube, std_simplex):
    # total normal-cone solid angles tile the sphere; h integrates exactly
    assert MS.vbbm_conewise(unit_cube) == pytest.approx(np.pi, rel=1e-12)
    v1 = MS.vbbm_conewise(std_simplex)
    v2 = MS.mv3(B.unit_ball(), B.unit_ball(), std_simplex)
    assert rel_err(v1, v2) < 1e-10


def test_integrate_constant_against_sbm(unit_cube):
    from mixedvol.graph import build_graph, sbm_and_mu
    sbm, _ = sbm_and_mu(build_graph(unit_cube))
    one = SupportEvaluator.constant_one()
    val = MS.integrate_against_measure(one, sbm)
    assert val == pytest.approx(3 * np.pi, rel=1e-12)


def test_merge_atoms():
    e1 = np.array([1.0, 0, 0])
    merged = MS.merge_atoms([(e1, 1.0), (e1 + 1e-12, 2.0),
                             (np.array([0, 1.0, 0]), 3.0)])
    assert len(merged) == 2
    masses = sorted(m for _, m in merged)
    assert masses == pytest.approx([3.0, 3.0])
