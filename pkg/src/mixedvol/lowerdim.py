"""The lower-dimensional pipeline: M contained in a hyperplane w^perp.

When M has dimension 1 or 2 inside w^perp, the measure S_{B,M} concentrates
on the half great circles theta -> iota(theta, z) = w cos(theta) + z sin(theta)
over the directions z in the support of the (lower-dimensional) surface
measure of M inside w^perp. The operator decomposes over these half circles
with shared poles at +-w, and its spectrum is fully explicit:
lambda_k = (1 - k^2)/3 with multiplicities 1, m, m, ... where m is the
number of support atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy.spatial import ConvexHull

from . import quadrature as quad
from .bodies import (Body, Polytope, SupportEvaluator, affine_dim,
                     as_unit_vector, classify_trivial, minkowski_sum, segment,
                     support_data, unit)
from .errors import (BadMesh, DimensionError, InsufficientSpectrum,
                     NumericalFailure, ZeroDenominator)
from .graph import DiscretizedForm, build_graph, integrate_on_arcs, spectrum
from .measures import DeficitReport, mixed_volume

HYPERPLANE_TOL = 1e-9


@dataclass(frozen=True)
class LowerDimProblem:
    """M in w^perp together with the atoms (z_j, mass_j) of its surface
    measure inside the hyperplane (edge normals for a polygon, the two
    endpoint directions for a segment)."""
    w: np.ndarray
    m: Polytope
    dim_m: int
    atoms: tuple[tuple[np.ndarray, float], ...]

    @property
    def multiplicity(self) -> int:
        return len(self.atoms)

    def half_circle(self, j: int) -> quad.ArcFrame:
        """The half great circle theta -> w cos(theta) + z_j sin(theta)."""
        return quad.ArcFrame(self.w, self.atoms[j][0], np.pi)

    def total_mass(self) -> float:
        return sum(mass for _, mass in self.atoms)

    def balance_residual(self) -> float:
        s = sum((mass * z for z, mass in self.atoms), np.zeros(3))
        return float(np.linalg.norm(s))


def _plane_basis(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pick = np.eye(3)[int(np.argmin(np.abs(w)))]
    b1 = unit(np.cross(w, pick))
    return b1, np.cross(w, b1)


def lowerdim_setup(m: Polytope, w) -> LowerDimProblem:
    """Validate M - M in w^perp, dim M in {1, 2}, and extract the atoms."""
    w = as_unit_vector(w)
    verts = m.vertices
    off = (verts - verts[0]) @ w
    scale = max(m.scale, 1e-30)
    if np.abs(off).max() > HYPERPLANE_TOL * scale:
        raise DimensionError("M is not contained in a translate of w^perp")
    dim = affine_dim(verts)
    if dim not in (1, 2):
        raise DimensionError(
            f"lower-dimensional pipeline needs dim M in {{1, 2}}, got {dim}")
    if dim == 1:
        ends = verts[[np.argmin(verts @ (verts[-1] - verts[0])),
                      np.argmax(verts @ (verts[-1] - verts[0]))]]
        d = ends[1] - ends[0]
        length = float(np.linalg.norm(d))
        z = unit(np.cross(w, d))  # in-plane normal perpendicular to the segment
        atoms = ((z, length), (-z, length))
        # normals of the degenerate "polygon": the two in-plane directions
        # orthogonal to the segment carry no ridge mass, so only the endpoint
        # directions appear (each with mass = segment length).
        return LowerDimProblem(w, m, 1, atoms)
    b1, b2 = _plane_basis(w)
    pts2 = np.column_stack([verts @ b1, verts @ b2])
    ch = ConvexHull(pts2)
    cyc = pts2[ch.vertices]  # counterclockwise
    atoms = []
    for i in range(len(cyc)):
        d = cyc[(i + 1) % len(cyc)] - cyc[i]
        ln = float(np.linalg.norm(d))
        n2 = np.array([d[1], -d[0]]) / ln  # outward normal of a ccw polygon
        atoms.append((n2[0] * b1 + n2[1] * b2, ln))
    p = LowerDimProblem(w, m, 2, tuple(atoms))
    if p.balance_residual() > 1e-9 * p.total_mass():
        raise NumericalFailure("edge-normal atoms do not balance")
    return p


def sbm_lowerdim(p: LowerDimProblem, f: Union[SupportEvaluator, Callable],
                 quad_tol: float = 1e-10) -> float:
    """int f dS_{B,M} = (1/2) sum_j mass_j int_0^pi f(iota(theta, z_j)) dtheta.

    Exact for support-function combinations; adaptive Gauss-Legendre otherwise.
    Equals 3 V(B, K, M) when f = h_K."""
    total = 0.0
    for j, (_, mass) in enumerate(p.atoms):
        fr = p.half_circle(j)
        if isinstance(f, SupportEvaluator):
            val = quad.integrate_evaluator(f, fr)
        else:
            val = quad.adaptive_gauss(lambda t: np.asarray(f(fr.point(t))),
                                      0.0, np.pi, quad_tol)
        total += 0.5 * mass * val
    return total


def assemble_lowerdim(p: LowerDimProblem, h: float) -> DiscretizedForm:
    """Hat-function Galerkin matrices on the bouquet of half circles.

    The poles +-w are shared degrees of freedom (indices 0 and 1), which
    enforces continuity at the two junction points; the Kirchhoff conditions
    there are natural."""
    if h <= 0:
        raise BadMesh("mesh size must be positive")
    ne = int(np.ceil(np.pi / h))
    if ne < 2:
        raise BadMesh(f"half circle gets {ne} < 2 elements at h={h:g}")
    mult = p.multiplicity
    n_dofs = 2 + mult * (ne - 1)
    e_mat = np.zeros((n_dofs, n_dofs))
    mass_mat = np.zeros((n_dofs, n_dofs))
    points = np.zeros((n_dofs, 3))
    points[0], points[1] = p.w, -p.w
    he = np.pi / ne
    m_el = he / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
    k_el = 1.0 / he * np.array([[1.0, -1.0], [-1.0, 1.0]])
    t = np.linspace(0.0, np.pi, ne + 1)
    edge_dofs = []
    next_dof = 2
    for j, (_, mass) in enumerate(p.atoms):
        interior = np.arange(next_dof, next_dof + ne - 1)
        next_dof += ne - 1
        chain = np.concatenate(([0], interior, [1]))
        edge_dofs.append(chain)
        points[interior] = p.half_circle(j).point(t[1:-1])
        e_el = mass / 6.0 * (m_el - k_el)
        mm_el = mass / 2.0 * m_el
        for k in range(ne):
            idx = chain[k:k + 2]
            e_mat[np.ix_(idx, idx)] += e_el
            mass_mat[np.ix_(idx, idx)] += mm_el
    return DiscretizedForm(e_mat, mass_mat, points, edge_dofs, None, h)


@dataclass(frozen=True)
class ClusterReport:
    k: int
    predicted: float           # (1 - k^2)/3
    expected_multiplicity: int
    observed: tuple[float, ...]


@dataclass(frozen=True)
class LowerSpectrumReport:
    clusters: tuple[ClusterReport, ...]
    worst_deviation: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.worst_deviation <= self.tol


def explicit_spectrum(k_max: int, multiplicity: int) -> list[tuple[float, int]]:
    """[(lambda_k, multiplicity)] for k = 0..k_max: (1-k^2)/3 with
    multiplicities 1, m, m, ..."""
    return [((1.0 - k * k) / 3.0, 1 if k == 0 else multiplicity)
            for k in range(k_max + 1)]


def verify_spectrum(p: LowerDimProblem, k_max: int, h: float,
                    tol: float) -> LowerSpectrumReport:
    """Compare the discretized spectrum against the explicit clusters."""
    form = assemble_lowerdim(p, h)
    predicted = explicit_spectrum(k_max, p.multiplicity)
    needed = sum(mult for _, mult in predicted)
    if form.size < needed:
        raise InsufficientSpectrum(
            f"{form.size} DOFs cannot resolve {needed} requested eigenvalues; "
            "decrease the mesh size")
    spec = spectrum(form, needed)
    vals = spec.eigenvalues  # descending
    clusters = []
    worst = 0.0
    pos = 0
    for k, (lam, mult) in enumerate(predicted):
        chunk = vals[pos:pos + mult]
        pos += mult
        clusters.append(ClusterReport(k, lam, mult, tuple(float(v) for v in chunk)))
        worst = max(worst, float(np.abs(chunk - lam).max()))
    return LowerSpectrumReport(tuple(clusters), worst, tol)


# ---------------------------------------------------------------------------
# Equality certification (lower-dimensional M)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LowerEqualityCertificate:
    deficit_report: DeficitReport
    c: float                   # V(K,L,M)/V(L,L,M)
    sup_residual: float        # sup |h_K + h_{F(cL,w)} - h_{cL} - h_{F(K,w)}|
    verdict: str               # equality | strict | inconclusive
    deficit_threshold: float
    residual_threshold: float
    scale: float
    diameter: float


def certify_equality_lowerdim(k: Polytope, l: Polytope, m: Polytope, w,
                              quad_tol: float = 1e-10,
                              deficit_threshold: float = 1e-9,
                              residual_threshold: float = 1e-6,
                              ) -> LowerEqualityCertificate:
    """Certify equality through the face criterion: with c = V(K,L,M)/V(L,L,M),
    equality holds iff h_K + h_{F(cL, w)} = h_{cL} + h_{F(K, w)} on supp S_{B,M}."""
    del quad_tol
    from .extremal import _verdict
    p = lowerdim_setup(m, w)
    dr = DeficitReport(mixed_volume(k, l, m), mixed_volume(k, k, m),
                       mixed_volume(l, l, m))
    if dr.v_ll <= 0 or classify_trivial(k, l, m).v_llm_zero:
        raise ZeroDenominator(
            "V(L, L, M) = 0: route through classify_trivial instead")
    c = dr.v_kl / dr.v_ll
    lt = l.scaled(c)
    _, face_lt = support_data(lt, p.w)
    _, face_k = support_data(k, p.w)
    resid = (SupportEvaluator.of(k) + SupportEvaluator.of(face_lt)
             + SupportEvaluator.of(lt, -1.0) + SupportEvaluator.of(face_k, -1.0))
    sup_res = 0.0
    for j in range(p.multiplicity):
        fr = p.half_circle(j)
        t = quad.arc_sample_nodes(fr, [resid])
        vals = np.abs(np.asarray(resid(fr.point(t))))
        sup_res = max(sup_res, float(vals.max()))
    diam = max(k.diameter, abs(c) * l.diameter, 1e-30)
    verdict = _verdict(dr.deficit, dr.scale, sup_res, diam,
                       deficit_threshold, residual_threshold)
    return LowerEqualityCertificate(dr, float(c), sup_res, verdict,
                                    deficit_threshold, residual_threshold,
                                    dr.scale, diam)


# ---------------------------------------------------------------------------
# Cylinder degeneration: M_eps = M + eps [0, w]
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CylinderLimitReport:
    eps: tuple[float, ...]
    full_dim_values: tuple[float, ...]    # int f dS_{B, M_eps} via the graph
    limit_value: float                    # int f dS_{B, M} (lower-dim formula)
    errors: tuple[float, ...]
    ratios: tuple[float, ...]             # decay factors error_i / error_{i+1}


def cylinder_limit_check(p: LowerDimProblem, f: SupportEvaluator,
                         eps_seq: Sequence[float]) -> CylinderLimitReport:
    """Degenerate-cylinder consistency: the full-dimensional graph integral
    over M + eps[0, w] converges at first order in eps to the
    lower-dimensional half-circle formula."""
    if p.dim_m != 2:
        raise DimensionError("cylinder check needs a 2-dimensional base")
    for eps in eps_seq:
        if eps <= 0:
            raise DimensionError(
                "eps must be positive: at eps = 0 the cylinder is degenerate "
                "and has no metric graph")
    limit = sbm_lowerdim(p, f)
    values = []
    for eps in eps_seq:
        cyl = minkowski_sum(p.m, segment(np.zeros(3), eps * p.w))
        values.append(integrate_on_arcs(f, build_graph(cyl)))
    errors = [abs(v - limit) for v in values]
    ratios = tuple(errors[i] / errors[i + 1] if errors[i + 1] > 1e-300 else np.inf
                   for i in range(len(errors) - 1))
    return CylinderLimitReport(tuple(float(e) for e in eps_seq),
                               tuple(values), limit,
                               tuple(errors), ratios)
