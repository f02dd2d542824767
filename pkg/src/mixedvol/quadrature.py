"""Integration along great-circle arcs on the unit sphere.

On an arc u(t) = a cos t + e sin t the restriction of a polytope support
function is a piecewise trig polynomial A cos t + B sin t (+ C for balls and
linear shifts), with breakpoints where the active vertex of the maximum
switches. Segment integrals of products (and of derivative products) are
therefore evaluated in closed form. An adaptive composite Gauss-Legendre
rule is provided for generic integrands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bodies import Ball, Polytope, SupportEvaluator
from .errors import QuadratureFailure

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class ArcFrame:
    """Arclength parametrization u(t) = start*cos(t) + tangent*sin(t), t in [0, length]."""
    start: np.ndarray
    tangent: np.ndarray
    length: float

    def point(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return (np.multiply.outer(np.cos(t), self.start)
                + np.multiply.outer(np.sin(t), self.tangent))


def arc_between(a: np.ndarray, b: np.ndarray) -> ArcFrame:
    """Shortest geodesic from unit vector a to unit vector b (not antipodal)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = float(np.clip(a @ b, -1.0, 1.0))
    l = float(np.arccos(c))
    if l < 1e-12 or l > np.pi - 1e-12:
        raise QuadratureFailure("arc endpoints coincide or are antipodal")
    e = b - c * a
    e /= np.linalg.norm(e)
    return ArcFrame(a, e, l)


# ---------------------------------------------------------------------------
# Breakpoints of the active-vertex envelope
# ---------------------------------------------------------------------------

def _envelope_breakpoints(alpha: np.ndarray, beta: np.ndarray, l: float) -> list[float]:
    """Switch points of argmax_i(alpha_i cos t + beta_i sin t) on (0, l)."""
    m = len(alpha)
    if m <= 1:
        return []
    vals0 = alpha
    top = vals0.max()
    cand = np.flatnonzero(vals0 >= top - 1e-13 * max(1.0, abs(top)))
    i = int(cand[np.argmax(beta[cand])])
    bps: list[float] = []
    t = 0.0
    for _ in range(8 * m + 16):
        big_a = alpha[i] - alpha
        big_b = beta[i] - beta
        # zeros of big_a cos t + big_b sin t, normalized into (t, t + pi]
        tstar = np.arctan2(-big_a, big_b)
        tstar = np.where(tstar <= t + 1e-12, tstar + np.pi, tstar)
        tstar = np.where(tstar <= t + 1e-12, tstar + np.pi, tstar)
        tstar[i] = np.inf
        tstar = np.where(tstar < l - 1e-12, tstar, np.inf)
        j = int(np.argmin(tstar))
        tn = float(tstar[j])
        if not np.isfinite(tn):
            break
        t = tn
        eps = min(1e-9, (l - t) / 2)
        vals = alpha * np.cos(t + eps) + beta * np.sin(t + eps)
        ni = int(np.argmax(vals))
        if ni != i:
            bps.append(t)
            i = ni
    return bps


def evaluator_breakpoints(f: SupportEvaluator, frame: ArcFrame) -> list[float]:
    """Interior arc parameters where some polytope term switches active vertex."""
    bps: list[float] = []
    for _, body in f.terms:
        if isinstance(body, Polytope) and len(body.vertices) > 1:
            alpha = body.vertices @ frame.start
            beta = body.vertices @ frame.tangent
            bps += _envelope_breakpoints(alpha, beta, frame.length)
    return sorted(set(bps))


def segment_coeffs(f: SupportEvaluator, frame: ArcFrame, tmid: float) -> tuple[float, float, float]:
    """(A, B, C) with f(u(t)) = A cos t + B sin t + C on the smooth segment
    containing tmid; polytope terms use the vertex active at tmid."""
    umid = frame.point(tmid)
    a_coef = float(frame.start @ f.shift)
    b_coef = float(frame.tangent @ f.shift)
    c_coef = 0.0
    for c, body in f.terms:
        if isinstance(body, Ball):
            a_coef += c * float(frame.start @ body.center)
            b_coef += c * float(frame.tangent @ body.center)
            c_coef += c * body.radius
        else:
            v = body.vertices[body.support_argmax(umid)]
            a_coef += c * float(frame.start @ v)
            b_coef += c * float(frame.tangent @ v)
    return a_coef, b_coef, c_coef


# ---------------------------------------------------------------------------
# Closed-form segment integrals
# ---------------------------------------------------------------------------

def _trig_moments(t0: float, t1: float) -> tuple[float, float, float, float, float]:
    """(int cos^2, int sin^2, int sin*cos, int cos, int sin) over [t0, t1]."""
    s0, c0, s1, c1 = np.sin(t0), np.cos(t0), np.sin(t1), np.cos(t1)
    half = 0.5 * (t1 - t0)
    cc = half + 0.5 * (s1 * c1 - s0 * c0)
    ss = half - 0.5 * (s1 * c1 - s0 * c0)
    sc = 0.5 * (s1 * s1 - s0 * s0)
    return cc, ss, sc, s1 - s0, c0 - c1


def product_integral(p: tuple[float, float, float], q: tuple[float, float, float],
                     t0: float, t1: float) -> float:
    """Exact integral over [t0, t1] of the product of two A cos + B sin + C terms."""
    a1, b1, c1 = p
    a2, b2, c2 = q
    cc, ss, sc, ic, is_ = _trig_moments(t0, t1)
    return (a1 * a2 * cc + b1 * b2 * ss + (a1 * b2 + a2 * b1) * sc
            + (a1 * c2 + a2 * c1) * ic + (b1 * c2 + b2 * c1) * is_
            + c1 * c2 * (t1 - t0))


def _derivative_coeffs(p: tuple[float, float, float]) -> tuple[float, float, float]:
    a, b, _ = p
    return b, -a, 0.0


def segments_of(f: SupportEvaluator, g: SupportEvaluator | None, frame: ArcFrame) -> list[float]:
    bps = evaluator_breakpoints(f, frame)
    if g is not None:
        bps = sorted(set(bps) | set(evaluator_breakpoints(g, frame)))
    return [0.0] + bps + [frame.length]


def integrate_evaluator(f: SupportEvaluator, frame: ArcFrame) -> float:
    """Exact integral of f along the arc with respect to arclength."""
    cuts = segments_of(f, None, frame)
    one = (0.0, 0.0, 1.0)
    total = 0.0
    for t0, t1 in zip(cuts[:-1], cuts[1:]):
        total += product_integral(segment_coeffs(f, frame, 0.5 * (t0 + t1)), one, t0, t1)
    return total


def integrate_pair(f: SupportEvaluator, g: SupportEvaluator, frame: ArcFrame) -> tuple[float, float]:
    """(int f*g, int f'*g') along the arc, exact piecewise evaluation.

    The arc derivative of a polytope support function is taken from the
    active vertex on each smooth segment."""
    cuts = segments_of(f, g, frame)
    ifg = 0.0
    idfdg = 0.0
    for t0, t1 in zip(cuts[:-1], cuts[1:]):
        tm = 0.5 * (t0 + t1)
        pf = segment_coeffs(f, frame, tm)
        pg = segment_coeffs(g, frame, tm)
        ifg += product_integral(pf, pg, t0, t1)
        idfdg += product_integral(_derivative_coeffs(pf), _derivative_coeffs(pg), t0, t1)
    return ifg, idfdg


def arc_sample_nodes(frame: ArcFrame, evaluators: list[SupportEvaluator],
                     per_segment: int = 17) -> np.ndarray:
    """Arc parameters covering every smooth segment (endpoints included),
    suitable for sup-norm residual scans."""
    bps: set[float] = set()
    for f in evaluators:
        bps |= set(evaluator_breakpoints(f, frame))
    cuts = [0.0] + sorted(bps) + [frame.length]
    nodes = [np.linspace(t0, t1, per_segment) for t0, t1 in zip(cuts[:-1], cuts[1:])]
    return np.unique(np.concatenate(nodes))


# ---------------------------------------------------------------------------
# Generic adaptive composite Gauss-Legendre
# ---------------------------------------------------------------------------

def adaptive_gauss(fun, t0: float, t1: float, tol: float, max_depth: int = 30) -> float:
    """Adaptive bisected 16-point Gauss-Legendre for a vectorized integrand."""

    def gl(lo, hi):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return half * float(_GL_WEIGHTS @ fun(mid + half * _GL_NODES))

    def recurse(lo, hi, whole, depth):
        mid = 0.5 * (lo + hi)
        left, right = gl(lo, mid), gl(mid, hi)
        if abs(left + right - whole) <= tol * max(1.0, abs(left + right)):
            return left + right
        if depth >= max_depth:
            raise QuadratureFailure(
                f"adaptive quadrature exceeded depth {max_depth} without "
                f"meeting tolerance {tol:g}")
        return (recurse(lo, mid, left, depth + 1)
                + recurse(mid, hi, right, depth + 1))

    if t1 <= t0:
        return 0.0
    return recurse(t0, t1, gl(t0, t1), 0)


def integrate_with_breakpoints(fun, breakpoints: list[float], t0: float, t1: float,
                               tol: float) -> float:
    """Adaptive Gauss-Legendre split at the given interior breakpoints."""
    cuts = [t0] + [b for b in sorted(breakpoints) if t0 < b < t1] + [t1]
    return sum(adaptive_gauss(fun, lo, hi, tol) for lo, hi in zip(cuts[:-1], cuts[1:]))
