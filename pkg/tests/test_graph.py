import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixedvol import bodies as B
from mixedvol import graph as G
from mixedvol import measures as MS
from mixedvol.bodies import SupportEvaluator
from mixedvol.errors import BadMesh, BadParam, DegenerateInput

from conftest import rel_err


def test_cube_graph_combinatorics(unit_cube):
    g = G.build_graph(unit_cube)
    assert len(g.normals) == 6
    assert len(g.edges) == 12
    for e in g.edges:
        assert e.length == pytest.approx(np.pi / 2)
        assert e.weight == pytest.approx(1.0)


def test_simplex_graph_lengths(std_simplex):
    g = G.build_graph(std_simplex)
    assert len(g.normals) == 4
    assert len(g.edges) == 6
    # normals of the three axis facets are mutually orthogonal; the slanted
    # facet makes angle arccos(-1/sqrt(3)) with each of them
    lengths = sorted(e.length for e in g.edges)
    assert np.allclose(lengths[:3], np.pi / 2)
    assert np.allclose(lengths[3:], np.arccos(-1 / np.sqrt(3)))


def test_build_graph_rejects_lower_dim(unit_square):
    with pytest.raises(DegenerateInput):
        G.build_graph(unit_square)


def test_sbm_and_mu_masses_cube(unit_cube):
    g = G.build_graph(unit_cube)
    sbm, mu = G.sbm_and_mu(g)
    assert sbm.total_mass() == pytest.approx(3 * np.pi, rel=1e-12)
    assert mu.total_mass() == pytest.approx(2 * sbm.total_mass(), rel=1e-14)


def test_mass_identities_random():
    for seed in range(10):
        m = B.random_hull(10, seed)
        g = G.build_graph(m)
        sbm, mu = G.sbm_and_mu(g)
        vbbm = MS.vbbm_conewise(m)
        assert rel_err(sbm.total_mass(), 3 * vbbm) < 1e-9
        assert rel_err(mu.total_mass(), 2 * sbm.total_mass()) < 1e-13


def test_vertex_balance():
    for seed in range(10):
        g = G.build_graph(B.random_hull(10, seed + 30))
        res = g.vertex_balance_residuals()
        assert res.max() < 1e-9 * g.total_weight()


def test_structural_checks_random():
    for seed in range(10):
        m = B.random_hull(10, seed + 60)
        g = G.build_graph(m)
        r, big_r = B.enclosing_radii(m)
        rep = G.structural_checks(g, r, big_r)
        assert not rep.violations


def test_form_value_recovers_mixed_volume(unit_cube, std_simplex):
    g = G.build_graph(unit_cube)
    h_c = SupportEvaluator.of(unit_cube)
    h_s = SupportEvaluator.of(std_simplex)
    assert G.form_value(g, h_c, h_c) == pytest.approx(1.0, abs=1e-13)
    v = MS.mixed_volume(std_simplex, std_simplex, unit_cube)
    assert G.form_value(g, h_s, h_s) == pytest.approx(v, rel=1e-10)


def test_form_value_random_triples():
    for seed in range(5):
        k = B.random_hull(10, seed)
        l = B.random_hull(10, seed + 7)
        m = B.random_hull(10, seed + 13)
        g = G.build_graph(m)
        v1 = MS.mixed_volume(k, l, m)
        v2 = G.form_value(g, SupportEvaluator.of(k), SupportEvaluator.of(l))
        assert rel_err(v1, v2) < 1e-9


def test_constant_function_identity(unit_cube):
    # E(1, 1) = (1/3) * mass(S_{B,M}) exactly: total weight*(l - l)... both
    # routes must agree with V(B, B, M)
    g = G.build_graph(unit_cube)
    one = SupportEvaluator.constant_one()
    e_val = G.form_value(g, one, one)
    sbm, _ = G.sbm_and_mu(g)
    assert e_val == pytest.approx(sbm.total_mass() / 3.0, rel=1e-13)


def test_assemble_guards(unit_cube):
    g = G.build_graph(unit_cube)
    with pytest.raises(BadMesh):
        G.assemble(g, -0.1)
    with pytest.raises(BadMesh):
        G.assemble(g, 10.0)   # fewer than 2 elements per edge


def test_assemble_dof_count(unit_cube):
    g = G.build_graph(unit_cube)
    h = np.pi / 100
    form = G.assemble(g, h)
    ne = int(np.ceil((np.pi / 2) / h))
    assert form.size == 6 + 12 * (ne - 1)
    # matrices symmetric, mass positive definite
    assert np.abs(form.mass - form.mass.T).max() == 0.0
    assert np.linalg.eigvalsh(form.mass).min() > 0


def test_galerkin_constant_exact(unit_cube):
    # the constant vector is represented exactly: E 1 = (1/3) M 1
    g = G.build_graph(unit_cube)
    form = G.assemble(g, np.pi / 30)
    ones = np.ones(form.size)
    assert np.abs(form.e_matrix @ ones - form.mass @ ones / 3.0).max() < 1e-13


def test_cube_spectrum(unit_cube):
    h = np.pi / 100
    form = G.assemble(G.build_graph(unit_cube), h)
    spec = G.spectrum(form, 8)
    vals = spec.eigenvalues
    # top eigenvalue exactly 1/3 (constants are in the trial space), simple
    assert abs(vals[0] - 1.0 / 3.0) < 1e-10
    assert vals[1] < 1.0 / 3.0 - 0.1
    # next three eigenvalues form the kernel cluster
    assert np.abs(vals[1:4]).max() < 10 * h * h
    # spectral gap below the kernel
    assert vals[4] < -0.05
    # eigen-residuals small
    assert spec.residuals.max() < 1e-8


def test_kernel_analysis_cube(unit_cube):
    h = np.pi / 100
    form = G.assemble(G.build_graph(unit_cube), h)
    spec = G.spectrum(form, 8)
    rep = G.kernel_analysis(spec, 10 * h * h)
    assert rep.dimension == 3
    assert rep.principal_angle_residual < 1e-3


def test_discrete_form_hyperbolic(unit_cube, std_simplex):
    # exactly one positive eigenvalue for the assembled form
    for m in (unit_cube, std_simplex, B.random_hull(10, 77)):
        form = G.assemble(G.build_graph(m), np.pi / 40)
        spec = G.spectrum(form)
        assert spec.eigenvalues[0] > 0
        assert spec.eigenvalues[1] <= 1e-12


def test_spectrum_mesh_convergence(unit_cube):
    # kernel eigenvalues converge to 0 at order h^2
    g = G.build_graph(unit_cube)
    errs = []
    for h in (np.pi / 25, np.pi / 50):
        spec = G.spectrum(G.assemble(g, h), 4)
        errs.append(abs(spec.eigenvalues[1]))
    assert errs[0] / errs[1] > 3.5


def test_restrict_support_function(unit_cube):
    form = G.assemble(G.build_graph(unit_cube), np.pi / 20)
    f = form.restrict(SupportEvaluator.of(unit_cube))
    assert f.shape == (form.size,)
    assert np.all(f >= -1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.3, 3.0), st.integers(0, 10**6))
def test_edge_poincare_inequality(eps, l, seed):
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(41)
    rep = G.edge_poincare_check(f, l, eps)
    assert rep.holds


def test_edge_poincare_corollary_sharp_case():
    # f vanishing at the endpoints, one bump: both forms of the inequality
    t = np.linspace(0, 1.0, 201)
    f = np.sin(np.pi * t)
    rep = G.edge_poincare_check(f, 1.0, 0.5, r=0.5, big_r=np.sqrt(3) / 2)
    assert rep.holds
    assert rep.corollary_lhs is not None
    assert rep.corollary_lhs >= rep.corollary_rhs - 1e-9


def test_edge_poincare_guards():
    with pytest.raises(BadParam):
        G.edge_poincare_check(np.ones(5), 1.0, 0.0)
    with pytest.raises(BadParam):
        G.edge_poincare_check(np.ones(5), 1.0, 1.0)
    with pytest.raises(BadParam):
        G.edge_poincare_check(np.ones(5), 3.5, 0.5)
    with pytest.raises(BadParam):
        G.edge_poincare_check(np.ones(1), 1.0, 0.5)
