import numpy as np
import pytest

from mixedvol import bodies as B
from mixedvol import quadrature as quad
from mixedvol.errors import QuadratureFailure

from conftest import rel_err


def test_arc_between_basic():
    fr = quad.arc_between(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    assert fr.length == pytest.approx(np.pi / 2)
    assert np.allclose(fr.point(0.0), [1, 0, 0])
    assert np.allclose(fr.point(fr.length), [0, 1, 0])
    # points stay on the unit sphere
    t = np.linspace(0, fr.length, 7)
    assert np.allclose(np.linalg.norm(fr.point(t), axis=1), 1.0)


def test_arc_between_rejects_degenerate():
    e1 = np.array([1.0, 0, 0])
    with pytest.raises(QuadratureFailure):
        quad.arc_between(e1, e1)
    with pytest.raises(QuadratureFailure):
        quad.arc_between(e1, -e1)


def test_breakpoints_cube_quarter_arc():
    # h_cube on the arc from e1 to e2 switches active vertex where the
    # maximizing corner changes; the max itself (cos t + sin t) is smooth,
    # so there are no breakpoints for the envelope value switch
    cube = B.cube()
    fr = quad.arc_between(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    f = B.SupportEvaluator.of(cube)
    bps = quad.evaluator_breakpoints(f, fr)
    # h(t) = cos t + sin t with the same active vertex (1,1,1) throughout
    assert bps == []


def test_breakpoints_shifted_cube():
    # centered cube: active vertex switches at t = pi/4 on the e1->e2 arc
    c = B.cube().translate([-0.5, -0.5, -0.5])
    fr = quad.arc_between(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    bps = quad.evaluator_breakpoints(B.SupportEvaluator.of(c), fr)
    assert len(bps) == 0  # (±.5,±.5,.5) both active: h = .5cos+.5sin both sides
    fr2 = quad.arc_between(np.array([1.0, 0, 0]), np.array([-0.6, 0.8, 0]))
    bps2 = quad.evaluator_breakpoints(B.SupportEvaluator.of(c), fr2)
    assert len(bps2) >= 1


def test_integrate_evaluator_exactness():
    # int over the quarter arc of (cos t + sin t) dt = 2
    f = B.SupportEvaluator.of(B.cube())
    fr = quad.arc_between(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    assert quad.integrate_evaluator(f, fr) == pytest.approx(2.0, abs=1e-14)


def test_integrate_pair_derivative():
    # f = g = cos t on [0, pi/2]: int f g = pi/4, int f' g' = pi/4
    f = B.SupportEvaluator.linear([1.0, 0.0, 0.0])
    fr = quad.arc_between(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    ifg, idfdg = quad.integrate_pair(f, f, fr)
    assert ifg == pytest.approx(np.pi / 4, abs=1e-14)
    assert idfdg == pytest.approx(np.pi / 4, abs=1e-14)


def test_integrate_pair_matches_adaptive_gauss():
    p = B.random_hull(10, 5)
    q = B.random_hull(10, 6)
    f, g = B.SupportEvaluator.of(p), B.SupportEvaluator.of(q)
    a = np.array([1.0, 0, 0])
    b = np.array([0.3, 0.9, np.sqrt(1 - 0.09 - 0.81)])
    fr = quad.arc_between(a, b)
    exact = quad.integrate_pair(f, g, fr)[0]
    numeric = quad.adaptive_gauss(
        lambda t: np.asarray(f(fr.point(t))) * np.asarray(g(fr.point(t))),
        0.0, fr.length, 1e-12)
    assert rel_err(exact, numeric) < 1e-10


def test_product_integral_polynomial_identity():
    # (2cos+3sin+1)(cos-sin+2) integrated on [0.2, 1.4] vs dense sampling
    p, q = (2.0, 3.0, 1.0), (1.0, -1.0, 2.0)
    t = np.linspace(0.2, 1.4, 200001)
    vals = (p[0] * np.cos(t) + p[1] * np.sin(t) + p[2]) * \
           (q[0] * np.cos(t) + q[1] * np.sin(t) + q[2])
    assert quad.product_integral(p, q, 0.2, 1.4) == pytest.approx(
        np.trapezoid(vals, t), abs=1e-9)


def test_adaptive_gauss_known_integral():
    val = quad.adaptive_gauss(np.sin, 0.0, np.pi, 1e-12)
    assert val == pytest.approx(2.0, abs=1e-12)


def test_adaptive_gauss_depth_failure():
    with pytest.raises(QuadratureFailure):
        quad.adaptive_gauss(lambda t: np.sign(np.sin(1.0 / (t + 1e-12))),
                            0.0, 1.0, 1e-15, max_depth=4)


def test_integrate_with_breakpoints_kink():
    # |t - 0.5| on [0, 1]: exact 0.25, breakpoint at the kink
    val = quad.integrate_with_breakpoints(lambda t: np.abs(t - 0.5), [0.5],
                                          0.0, 1.0, 1e-12)
    assert val == pytest.approx(0.25, abs=1e-12)


def test_arc_sample_nodes_cover_endpoints():
    fr = quad.arc_between(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    nodes = quad.arc_sample_nodes(fr, [B.SupportEvaluator.of(B.cube())])
    assert nodes[0] == 0.0
    assert nodes[-1] == pytest.approx(fr.length)
