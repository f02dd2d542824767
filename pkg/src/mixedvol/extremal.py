"""Executable checks for the extremal theory of the Minkowski quadratic
inequality: weak stability with explicit constants, equality-case
certification against the 1-extreme-direction criterion, and the
quantitative rigidity inequality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quadrature as quad
from .bodies import Ball, Body, Polytope, SupportEvaluator, classify_trivial
from .errors import DegenerateInput, SingularGM, ZeroDenominator
from .graph import MetricGraph, build_graph, sbm_and_mu
from .bodies import enclosing_radii
from .measures import DeficitReport, mv3, quadratic_deficit

DEFICIT_THRESHOLD = 1e-9      # relative to max(vKL^2, vKK*vLL)
RESIDUAL_THRESHOLD = 1e-6     # relative to the instance diameter


def _diameter(body: Body) -> float:
    if isinstance(body, Ball):
        return 2.0 * body.radius
    return body.diameter


def _support_at(body: Body, u: np.ndarray):
    return body.support(u)


@dataclass(frozen=True)
class StabilityWitness:
    a: float
    v: np.ndarray
    g_matrix: np.ndarray     # G_M = sum (area/h) n n^T, positive definite
    r: float
    big_r: float
    c_m: float               # r^2 / (18 R^2) for n = 3
    residual: float          # int (h_K - a h_L - <v,.>)^2 dS_{M,M}/h_M


def stability_witness(k: Body, l: Body, m: Polytope) -> StabilityWitness:
    """Optimal (a, v) for the weighted deficit witness on supp S_{M,M}.

    a = V(K,M,M)/V(L,M,M); v solves the G_M-weighted normal equations. M is
    re-centered on its vertex centroid (mixed volumes are unaffected)."""
    if m.dim < 3:
        raise DegenerateInput("stability witness requires full-dimensional M")
    mc = m.centered()
    v_lmm = mv3(l, m, m)
    # V(L, M, M) = 0 for full-dimensional M exactly when L is a point
    l_is_point = not isinstance(l, Ball) and l.dim == 0
    if v_lmm <= 0 or l_is_point:
        raise ZeroDenominator("V(L, M, M) must be positive")
    a = mv3(k, m, m) / v_lmm
    normals = np.array([f.normal for f in mc.facets])
    weights = np.array([f.area / f.offset for f in mc.facets])
    g_mat = (normals.T * weights) @ normals
    eigs = np.linalg.eigvalsh(g_mat)
    if eigs[0] <= 1e-12 * max(eigs[-1], 1e-30):
        raise SingularGM("G_M numerically singular")
    delta = np.asarray(_support_at(k, normals)) - a * np.asarray(_support_at(l, normals))
    v = np.linalg.solve(g_mat, normals.T @ (weights * delta))
    resid = float(np.sum(weights * (delta - normals @ v) ** 2))
    r, big_r = enclosing_radii(m)
    c_m = r * r / (18.0 * big_r * big_r)
    return StabilityWitness(float(a), v, g_mat, r, big_r, c_m, resid)


@dataclass(frozen=True)
class StabilityReport:
    lhs: float                # V(K,L,M)^2
    rhs: float                # V(K,K,M) V(L,L,M) + C_M V(L,L,M) residual
    witness: StabilityWitness
    deficit: DeficitReport

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    @property
    def holds(self) -> bool:
        return self.margin >= -1e-9 * self.deficit.scale


def weak_stability_check(k: Body, l: Body, m: Polytope) -> StabilityReport:
    """V(K,L,M)^2 >= V(K,K,M) V(L,L,M) + C_M V(L,L,M) * residual."""
    w = stability_witness(k, l, m)
    dr = quadratic_deficit(k, l, m)
    rhs = dr.v_kk * dr.v_ll + w.c_m * dr.v_ll * w.residual
    return StabilityReport(dr.v_kl ** 2, rhs, w, dr)


# ---------------------------------------------------------------------------
# Equality certification (full-dimensional M)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EqualityCertificate:
    deficit_report: DeficitReport
    a: float
    v: np.ndarray
    sup_residual: float      # sup over supp S_{B,M} of |h_K - a h_L - <v,.>|
    verdict: str             # equality | strict | inconclusive
    deficit_threshold: float
    residual_threshold: float
    scale: float
    diameter: float


def _verdict(deficit: float, scale: float, sup_res: float, diam: float,
             eps_d: float, eps_s: float) -> str:
    small = deficit <= eps_d * scale and sup_res <= eps_s * diam
    large = deficit > 10 * eps_d * scale and sup_res > 10 * eps_s * diam
    if small:
        return "equality"
    if large:
        return "strict"
    return "inconclusive"


def fit_linear_on_sbm(g: MetricGraph, delta: SupportEvaluator) -> np.ndarray:
    """Least-squares linear witness: argmin_v int (delta - <v,.>)^2 dS_{B,M}."""
    basis = [SupportEvaluator.linear(np.eye(3)[i]) for i in range(3)]
    a_mat = np.zeros((3, 3))
    b_vec = np.zeros(3)
    for e in g.edges:
        we = e.weight / 2.0
        for i in range(3):
            b_vec[i] += we * quad.integrate_pair(delta, basis[i], e.frame)[0]
            for j in range(i, 3):
                val = we * quad.integrate_pair(basis[i], basis[j], e.frame)[0]
                a_mat[i, j] += val
                if i != j:
                    a_mat[j, i] += val
    return np.linalg.solve(a_mat, b_vec)


def sup_on_sbm(g: MetricGraph, f: SupportEvaluator) -> float:
    """Sup of |f| over quadrature nodes of the arcs of supp S_{B,M}."""
    worst = 0.0
    for e in g.edges:
        t = quad.arc_sample_nodes(e.frame, [f])
        vals = np.abs(np.asarray(f(e.frame.point(t))))
        worst = max(worst, float(vals.max()))
    return worst


def certify_equality_fulldim(k: Body, l: Body, m: Polytope,
                             quad_tol: float = 1e-10,
                             deficit_threshold: float = DEFICIT_THRESHOLD,
                             residual_threshold: float = RESIDUAL_THRESHOLD,
                             ) -> EqualityCertificate:
    """Certify or falsify equality: deficit ~ 0 iff h_K - a h_L - <v,.>
    vanishes on supp S_{B,M} (the closure of 1-extreme normal directions)."""
    del quad_tol
    if m.dim < 3:
        raise DegenerateInput("use the lower-dimensional certifier")
    dr = quadratic_deficit(k, l, m)
    if dr.v_ll <= 0 or classify_trivial(k, l, m).v_llm_zero:
        raise ZeroDenominator(
            "V(L, L, M) = 0: route through classify_trivial instead")
    a = dr.v_kl / dr.v_ll
    g = build_graph(m)
    delta = SupportEvaluator.of(k) + SupportEvaluator.of(l, -a)
    v = fit_linear_on_sbm(g, delta)
    resid = delta + SupportEvaluator.linear(-v)
    sup_res = sup_on_sbm(g, resid)
    diam = max(_diameter(k), abs(a) * _diameter(l), 1e-30)
    verdict = _verdict(dr.deficit, dr.scale, sup_res, diam,
                       deficit_threshold, residual_threshold)
    return EqualityCertificate(dr, float(a), v, sup_res, verdict,
                               deficit_threshold, residual_threshold,
                               dr.scale, diam)


# ---------------------------------------------------------------------------
# Quantitative rigidity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RigidityReport:
    lhs: float               # V(K,L,M)^2
    rhs: float               # base + V(L,L,M)*(sbm term - mu term)
    sbm_integral: float      # int (h_K - h_L)^2 dS_{B,M}
    mu_integral: float       # int (h_K - h_L)^2 dmu_M
    r: float
    big_r: float
    deficit: DeficitReport

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    @property
    def holds(self) -> bool:
        return self.margin >= -1e-9 * self.deficit.scale


def rigidity_check(k: Body, l: Body, m: Polytope) -> RigidityReport:
    """V(K,L,M)^2 >= V(K,K,M) V(L,L,M) + V(L,L,M) *
    [ (r^2/(6R^2)) int (h_K-h_L)^2 dS_{B,M} - (4R^2/(3r^2)) int (h_K-h_L)^2 dmu_M ]."""
    if m.dim < 3:
        raise DegenerateInput("rigidity check requires full-dimensional M")
    mc = m.centered()
    r, big_r = enclosing_radii(mc)
    g = build_graph(mc)
    _, mu = sbm_and_mu(g)
    f = SupportEvaluator.of(k) + SupportEvaluator.of(l, -1.0)
    sbm_int = 0.0
    for e in g.edges:
        sbm_int += e.weight / 2.0 * quad.integrate_pair(f, f, e.frame)[0]
    mu_int = sum(float(f(u)) ** 2 * mass for u, mass in mu.atoms)
    dr = quadratic_deficit(k, l, m)
    correction = (r * r / (6.0 * big_r * big_r)) * sbm_int \
        - (4.0 * big_r * big_r / (3.0 * r * r)) * mu_int
    rhs = dr.v_kk * dr.v_ll + dr.v_ll * correction
    return RigidityReport(dr.v_kl ** 2, rhs, sbm_int, mu_int, r, big_r, dr)
