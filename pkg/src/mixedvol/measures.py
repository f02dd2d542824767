"""Mixed volumes and (mixed) area measures of 3-polytopes.

Two independent pipelines: polynomial polarization of hull volumes
(quadrature-free, the primary route) and integration of support functions
against atomic/arc measures on the sphere (the oracle route). Ball slots are
never polarized; they are routed through the measure formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.spatial import ConvexHull

from . import quadrature as quad
from .bodies import (Ball, Body, Polytope, SupportEvaluator, affine_dim, hull,
                     unit)
from .errors import DegenerateInput, NegativeMass

ATOM_MERGE_ANGLE = 1e-9   # angular tolerance for merging atoms by direction


@dataclass(frozen=True)
class GeodesicArc:
    """Geodesic segment on S^2 from a to b (shorter arc)."""
    a: np.ndarray
    b: np.ndarray

    @property
    def length(self) -> float:
        return float(np.arccos(np.clip(self.a @ self.b, -1.0, 1.0)))

    def frame(self) -> quad.ArcFrame:
        return quad.arc_between(self.a, self.b)


@dataclass
class SphericalMeasure:
    """Measure on S^2 with an atomic part and a geodesic-arc part."""
    atoms: list[tuple[np.ndarray, float]] = field(default_factory=list)
    arcs: list[tuple[GeodesicArc, float]] = field(default_factory=list)
    nonnegative: bool = True

    def total_mass(self) -> float:
        return (sum(m for _, m in self.atoms)
                + sum(w * arc.length for arc, w in self.arcs))

    def barycenter_residual(self) -> float:
        """Norm of int u dmu; vanishes for area measures of closed bodies."""
        s = np.zeros(3)
        for u, m in self.atoms:
            s += m * u
        for arc, w in self.arcs:
            fr = arc.frame()
            # int over arc of u dH^1 = sin(l) * a + (1 - cos(l)) * e, per axis
            s += w * (np.sin(fr.length) * fr.start
                      + (1 - np.cos(fr.length)) * fr.tangent)
        return float(np.linalg.norm(s))

    def validate_nonnegative(self, tol: float = 1e-9) -> "SphericalMeasure":
        total = abs(self.total_mass())
        floor = -tol * max(total, 1e-30)
        for _, m in self.atoms:
            if m < floor:
                raise NegativeMass(f"atom mass {m:g} below {floor:g}")
        for _, w in self.arcs:
            if w < floor:
                raise NegativeMass(f"arc weight {w:g} below {floor:g}")
        return self


def merge_atoms(raw: Sequence[tuple[np.ndarray, float]],
                angle_tol: float = ATOM_MERGE_ANGLE) -> list[tuple[np.ndarray, float]]:
    """Sum masses of directions that agree within the angular tolerance."""
    dirs: list[np.ndarray] = []
    masses: list[float] = []
    for u, m in raw:
        for i, d in enumerate(dirs):
            if np.linalg.norm(u - d) <= angle_tol:
                masses[i] += m
                break
        else:
            dirs.append(np.asarray(u, dtype=float))
            masses.append(m)
    return list(zip(dirs, masses))


# ---------------------------------------------------------------------------
# Volumes and polarization
# ---------------------------------------------------------------------------

def volume(p: Polytope) -> float:
    """Divergence-theorem volume (1/3) sum_F h_F area_F; 0 for dim < 3."""
    return p.volume


def _points_volume(pts: np.ndarray) -> float:
    if affine_dim(pts) < 3:
        return 0.0
    return float(ConvexHull(pts).volume)


def _sum_volume(bodies: Sequence[Polytope]) -> float:
    pts = bodies[0].vertices
    for b in bodies[1:]:
        pts = (pts[:, None, :] + b.vertices[None, :, :]).reshape(-1, 3)
    return _points_volume(pts)


def mixed_volume(k: Polytope, l: Polytope, m: Polytope) -> float:
    """V(K, L, M) by polarization of hull volumes; symmetric, multilinear."""
    v = (_sum_volume([k, l, m]) - _sum_volume([k, l]) - _sum_volume([k, m])
         - _sum_volume([l, m]) + k.volume + l.volume + m.volume)
    return v / 6.0


# ---------------------------------------------------------------------------
# Area measures
# ---------------------------------------------------------------------------

def area_measure(p: Polytope) -> SphericalMeasure:
    """Surface area measure: one atom (n_F, area_F) per facet."""
    if p.dim < 3:
        raise DegenerateInput(
            "area_measure requires a full-dimensional polytope "
            "(use the lower-dimensional pipeline)")
    return SphericalMeasure(atoms=[(f.normal, f.area) for f in p.facets])


def _surface_atoms_any(p: Polytope) -> list[tuple[np.ndarray, float]]:
    """Surface area measure atoms, lower dimensions included (dim 2 gives the
    two-sided planar atoms; dim <= 1 is the zero measure)."""
    if p.dim == 3:
        return [(f.normal, f.area) for f in p.facets]
    if p.dim == 2:
        v = p.vertices
        c = v.mean(axis=0)
        vec = 0.5 * np.sum(np.cross(v - c, np.roll(v, -1, axis=0) - c), axis=0)
        area = float(np.linalg.norm(vec))
        n = unit(vec)
        return [(n, area), (-n, area)]
    return []


def mixed_area_measure(l: Polytope, m: Polytope) -> SphericalMeasure:
    """S_{L,M} = (1/2)[S(L+M) - S(L) - S(M)], merged and verified nonnegative."""
    s = minkowski_sum_measure = _surface_atoms_any(hull(
        (l.vertices[:, None, :] + m.vertices[None, :, :]).reshape(-1, 3)))
    raw = ([(u, 0.5 * mass) for u, mass in minkowski_sum_measure]
           + [(u, -0.5 * mass) for u, mass in _surface_atoms_any(l)]
           + [(u, -0.5 * mass) for u, mass in _surface_atoms_any(m)])
    merged = merge_atoms(raw)
    out = SphericalMeasure(atoms=[(u, mass) for u, mass in merged])
    out.validate_nonnegative()
    out.atoms = [(u, max(mass, 0.0)) for u, mass in out.atoms if mass > 0.0]
    return out


def integrate_against_measure(f: SupportEvaluator, mu: SphericalMeasure,
                              quad_tol: float = 1e-10) -> float:
    """sum over atoms of f(u) * mass plus arc integrals of f dH^1.

    Arc integrals are exact piecewise trig-polynomial integrals (breakpoint
    aware), which meets any quad_tol for support-function combinations."""
    del quad_tol  # segment integrals are closed-form exact for evaluators
    total = sum(float(f(u)) * mass for u, mass in mu.atoms)
    for arc, w in mu.arcs:
        total += w * quad.integrate_evaluator(f, arc.frame())
    return total


# ---------------------------------------------------------------------------
# Mixed volumes with ball slots and the deficit
# ---------------------------------------------------------------------------

def _as_evaluator(body: Union[Body, SupportEvaluator]) -> SupportEvaluator:
    if isinstance(body, SupportEvaluator):
        return body
    return SupportEvaluator.of(body)


def mixed_volume_via_measure(f: Union[Body, SupportEvaluator], l: Body,
                             m: Polytope, quad_tol: float = 1e-10) -> float:
    """(1/3) int f dS_{L,M}; ball L-slots use the arc measure S_{B,M}."""
    ev = _as_evaluator(f)
    if isinstance(l, Ball):
        from .graph import build_graph, sbm_and_mu  # measure realization lives there
        sbm, _ = sbm_and_mu(build_graph(m))
        return l.radius * integrate_against_measure(ev, sbm, quad_tol) / 3.0
    return integrate_against_measure(ev, mixed_area_measure(l, m), quad_tol) / 3.0


def mv3(k: Body, l: Body, m: Polytope) -> float:
    """V(K, L, M) for polytope M, allowing Ball bodies in the K/L slots."""
    kb, lb = isinstance(k, Ball), isinstance(l, Ball)
    if not kb and not lb:
        return mixed_volume(k, l, m)
    if kb and lb:
        from .graph import build_graph, sbm_and_mu
        sbm, _ = sbm_and_mu(build_graph(m))
        # V(b1, b2, M) = rho1 * rho2 * V(B, B, M) + translation-invariant rest
        vbbm = sbm.total_mass() / 3.0
        return k.radius * l.radius * vbbm
    ball, poly = (k, l) if kb else (l, k)
    slm = mixed_area_measure(poly, m)
    # h_ball integrates to rho * mass (the <center, u> part vanishes by balance)
    return integrate_against_measure(_as_evaluator(ball), slm) / 3.0


@dataclass(frozen=True)
class DeficitReport:
    v_kl: float
    v_kk: float
    v_ll: float

    @property
    def deficit(self) -> float:
        return self.v_kl ** 2 - self.v_kk * self.v_ll

    @property
    def scale(self) -> float:
        return max(self.v_kl ** 2, self.v_kk * self.v_ll, 1e-300)


def quadratic_deficit(k: Body, l: Body, m: Polytope) -> DeficitReport:
    """Minkowski quadratic deficit V(K,L,M)^2 - V(K,K,M) V(L,L,M) >= 0."""
    return DeficitReport(mv3(k, l, m), mv3(k, k, m), mv3(l, l, m))


def classical_functionals(k: Polytope) -> tuple[float, float, float]:
    """(Vol, surface area, mean width) = (Vol, 3 V(B,K,K), (3/2pi) V(B,B,K))."""
    ball = Ball(np.zeros(3), 1.0)
    s = 3.0 * mv3(ball, k, k)
    w = (3.0 / (2.0 * np.pi)) * mv3(ball, ball, k)
    return k.volume, s, w


# ---------------------------------------------------------------------------
# Independent oracle for V(B, B, M): normal-cone integration of h_M over S^2
# ---------------------------------------------------------------------------

def _vertex_cone_integral(p: Polytope, vid: int) -> np.ndarray:
    """Exact int over the vertex's spherical normal-cone polygon of u dsigma."""
    inc_facets = sorted({fi for e in p.edges if vid in e.vertices for fi in e.facets})
    adj: dict[int, list[int]] = {fi: [] for fi in inc_facets}
    for e in p.edges:
        if vid in e.vertices:
            a, b = e.facets
            adj[a].append(b)
            adj[b].append(a)
    # walk the facet cycle around the vertex
    start = inc_facets[0]
    cycle = [start]
    prev, cur = None, start
    while True:
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        if nxt == start:
            break
        cycle.append(nxt)
        prev, cur = cur, nxt
    normals = [p.facets[fi].normal for fi in cycle]
    s = np.zeros(3)
    for i in range(len(normals)):
        a, b = normals[i], normals[(i + 1) % len(normals)]
        theta = float(np.arccos(np.clip(a @ b, -1.0, 1.0)))
        axis = np.cross(a, b)
        nrm = np.linalg.norm(axis)
        if nrm > 1e-14:
            s += theta * axis / nrm
    s *= 0.5
    mean_n = np.mean(normals, axis=0)
    if s @ mean_n < 0:   # fix boundary orientation
        s = -s
    return s


def vbbm_conewise(m: Polytope) -> float:
    """V(B, B, M) = (1/3) int h_M dsigma, by exact per-vertex normal-cone
    integration of the sphere. Shares no code with the metric-graph route."""
    if m.dim < 3:
        raise DegenerateInput("normal-cone oracle requires a full-dimensional polytope")
    total = 0.0
    for vid in range(len(m.vertices)):
        total += float(m.vertices[vid] @ _vertex_cone_integral(m, vid))
    return total / 3.0
