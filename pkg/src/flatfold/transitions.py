"""Phase-transition conditions and a root locator along one-parameter families.

Each condition set is a list of polynomial residuals in the weights; a phase
transition sits where one of them vanishes.  Conditions written with +- are
expanded into one residual per sign choice, so every root can be traced to a
single labelled branch.

The locator brackets sign changes on a grid and bisects them.  Several
conditions touch zero without crossing it (for example (1 - 2y^2)^2 in the
symmetric trapezoid family), so local minima of |r| are also refined by
bisecting the sign of the numerical derivative and kept when the residual is
negligible against its neighbourhood.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .dimer import momentum_determinant
from .model import CpKind, CreaseAssignmentWeights, OddVertexWeights, StaggeredModel, Staggering

MERGE_TOL = 1e-9
ROOT_TOL = 4 * np.finfo(float).eps



@dataclass(frozen=True)
class TransitionResidualSet:
    model: str
    labels: tuple
    residuals: np.ndarray
    degrees: tuple

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class CriticalPoint:
    parameter: float
    condition: int
    label: str
    bracket: tuple
    residual: float
    kind: str = "crossing"
    physical: bool = True
    reason: str = ""


def _p(x):
    if isinstance(x, OddVertexWeights):
        return x.padded()
    a = np.asarray(x, dtype=float)
    return a if a.shape == (9,) else np.concatenate([[0.0], a])


def _signs(n):
    return list(itertools.product((1, -1), repeat=n))


def _sgn(s):
    return "+" if s > 0 else "-"


# -- condition sets -----------------------------------------------------------


def miura_conditions(t, u, v, w):
    """Fully asymmetric column-staggered Miura-ori: two conditions, four sign choices each."""
    t, u, v, w = (_p(x) for x in (t, u, v, w))
    g = t[1] * v[2] * w[4] * u[3] + v[1] * w[3] * t[2] * u[4]
    p = (v[5] * w[6] + v[7] * w[8]) * (t[5] * u[6] + t[7] * u[8]) + (v[6] * w[5] + v[8] * w[7]) * (t[6] * u[5] + t[8] * u[7])
    a = (v[5] * w[7] - v[7] * w[5]) * (t[5] * u[7] - t[7] * u[5])
    b = (v[6] * w[8] - v[8] * w[6]) * (t[6] * u[8] - t[8] * u[6])
    a2 = (v[5] * w[7] + v[7] * w[5]) * (t[5] * u[7] + t[7] * u[5])
    b2 = (v[6] * w[8] + v[8] * w[6]) * (t[6] * u[8] + t[8] * u[6])
    q = (v[5] * w[6] - v[7] * w[8]) * (t[5] * u[6] - t[7] * u[8]) + (v[6] * w[5] - v[8] * w[7]) * (t[6] * u[5] - t[8] * u[7])
    res, lab = [], []
    for s1, s2 in _signs(2):
        res.append(g + p + s1 * a + s2 * b)
        lab.append(f"1({_sgn(s1)},{_sgn(s2)})")
    for s1, s2 in _signs(2):
        res.append(g + s1 * a2 + s2 * b2 - q)
        lab.append(f"2({_sgn(s1)},{_sgn(s2)})")
    return res, lab, (4,) * 8


def miura_tu_conditions(v, w):
    """Miura-ori with t, u the crease-inverted v, w."""
    v, w = _p(v), _p(w)
    r = [v[1] * w[3] + v[2] * w[4], v[1] * w[3] - v[2] * w[4]]
    base = v[1] ** 2 * w[3] ** 2 + v[2] ** 2 * w[4] ** 2
    r.append(
        base
        + 2 * (v[5] * w[6] + v[7] * w[8]) * (v[6] * w[5] + v[8] * w[7])
        - 2 * (v[5] * w[7] - v[7] * w[5]) * (v[6] * w[8] - v[8] * w[6])
    )
    r.append(
        base
        - 2 * (v[5] * w[6] - v[7] * w[8]) * (v[6] * w[5] - v[8] * w[7])
        + 2 * (v[5] * w[7] + v[7] * w[5]) * (v[6] * w[8] + v[8] * w[6])
    )
    return r, ["1(+)", "1(-)", "2", "3"], (2, 2, 4, 4)


def miura_symmetric_conditions(v):
    """Fully symmetric Miura-ori, in terms of the v weights."""
    v = _p(v)
    r = [v[1] ** 2 + v[2] ** 2, v[1] ** 2 - v[2] ** 2]
    base = v[1] ** 4 + v[2] ** 4
    r.append(base + 2 * (v[5] * v[8] + v[6] * v[7]) ** 2 - 2 * (v[5] ** 2 - v[7] ** 2) * (v[6] ** 2 - v[8] ** 2))
    r.append(base - 2 * (v[5] * v[8] - v[6] * v[7]) * (v[6] * v[7] - v[5] * v[8]) + 2 * (v[5] ** 2 + v[7] ** 2) * (v[6] ** 2 + v[8] ** 2))
    return r, ["1(+)", "1(-)", "2", "3"], (2, 2, 4, 4)


def trapezoid_conditions(v, w):
    v, w = _p(v), _p(w)
    g = v[1] * w[3] + v[2] * w[4]
    a = v[5] * w[7] + v[6] * w[8]
    b = v[7] * w[5] + v[8] * w[6]
    return [g + a + b, g - a - b, g + a - b, g - a + b], ["1(+)", "1(-)", "2(+)", "2(-)"], (2,) * 4


def trapezoid_symmetric_conditions(v):
    v = _p(v)
    g = v[1] ** 2 + v[2] ** 2
    a = v[5] ** 2 + v[6] ** 2
    b = v[7] ** 2 + v[8] ** 2
    return [g + a + b, g - a - b, g + a - b, g - a + b], ["1(+)", "1(-)", "2(+)", "2(-)"], (2,) * 4


def homogeneous_conditions(v):
    v = _p(v)
    s1 = v[1] * v[2] + v[3] * v[4]
    s2 = v[5] * v[6] + v[7] * v[8]
    r = [
        s1,
        v[1] * v[3] + v[2] * v[4],
        v[5] * v[7] + v[6] * v[8],
        s1 * s2 + (v[1] * v[3] - v[2] * v[4]) ** 2 + (v[5] * v[7] - v[6] * v[8]) ** 2,
    ]
    return r, ["1", "2", "3", "4"], (2, 2, 2, 4)


def column_two_conditions(v, w):
    v, w = _p(v), _p(w)
    a = (v[5] + v[8]) * (w[6] + w[7])
    b = (v[6] - v[7]) * (w[5] - w[8])
    c = (v[6] + v[7]) * (w[5] + w[8])
    d = (v[5] - v[8]) * (w[6] - w[7])
    return [a + b, a - b, c + d, c - d], ["1(+)", "1(-)", "2(+)", "2(-)"], (2,) * 4


def bipartite_two_conditions(v, w):
    v, w = _p(v), _p(w)
    x = [v[1] * w[3] + v[2] * w[4], v[3] * w[1] + v[4] * w[2], v[5] * w[7] + v[6] * w[8], v[7] * w[5] + v[8] * w[6]]
    r = [sum(x) - 2 * x[k] for k in range(4)]
    return r, ["1", "2", "3", "4"], (2,) * 4


def omegas(t, u, v, w):
    """The four invariants Omega_1..Omega_4 of the general four-unit lattice."""
    t, u, v, w = (_p(x) for x in (t, u, v, w))
    o1 = (
        t[1] * u[1] * v[2] * w[2] + t[2] * u[2] * v[1] * w[1] + t[3] * u[3] * v[4] * w[4] + t[4] * u[4] * v[3] * w[3]
        + t[5] * u[7] * v[7] * w[5] + t[6] * u[8] * v[8] * w[6] + t[7] * u[5] * v[5] * w[7] + t[8] * u[6] * v[6] * w[8]
    )
    o2 = (
        t[1] * u[1] * v[3] * w[3] + t[2] * u[2] * v[4] * w[4] + t[3] * u[3] * v[1] * w[1] + t[4] * u[4] * v[2] * w[2]
        + t[5] * u[7] * v[5] * w[7] + t[6] * u[8] * v[6] * w[8] + t[7] * u[5] * v[7] * w[5] + t[8] * u[6] * v[8] * w[6]
    )
    o3 = (
        t[1] * u[3] * v[2] * w[4] + t[2] * v[1] * u[4] * w[3] + t[3] * u[1] * v[4] * w[2] + t[4] * u[2] * v[3] * w[1]
        + t[5] * u[6] * v[7] * w[8] + t[6] * u[5] * v[8] * w[7] + t[7] * u[8] * v[5] * w[6] + t[8] * u[7] * v[6] * w[5]
    )
    o4 = (
        t[1] * u[3] * v[3] * w[1] + t[2] * u[4] * v[4] * w[2] + t[3] * u[1] * v[1] * w[3] + t[4] * u[2] * v[2] * w[4]
        + t[5] * u[6] * v[5] * w[6] + t[6] * u[5] * v[6] * w[5] + t[7] * u[8] * v[7] * w[8] + t[8] * u[7] * v[8] * w[7]
    )
    return o1, o2, o3, o4


def four_unit_conditions(t, u, v, w):
    om = omegas(t, u, v, w)
    s = sum(om)
    return [s - 2 * o for o in om], ["1", "2", "3", "4"], (4,) * 4


def crease_conditions(c):
    """Conditions of the unit-vertex-weight lattice in terms of crease weights.

    ``c`` is a :class:`CreaseAssignmentWeights` or any mapping with keys
    ``a_m`` .. ``h_v`` (zeros allowed here, unlike the weight type).
    """
    g = c.__dict__ if isinstance(c, CreaseAssignmentWeights) else c
    am, av, bm, bv, cm, cv, dm, dv = (g[k] for k in ("a_m", "a_v", "b_m", "b_v", "c_m", "c_v", "d_m", "d_v"))
    em, ev, fm, fv, gm, gv, hm, hv = (g[k] for k in ("e_m", "e_v", "f_m", "f_v", "g_m", "g_v", "h_m", "h_v"))
    p1 = (fm * hm - fv * hv) * (bm * dm - bv * dv)
    p2 = (fm * hm + fv * hv) * (bm * dm + bv * dv)
    p3 = (fm * hv - fv * hm) * (bm * dv - bv * dm)
    p4 = (fm * hv + fv * hm) * (bm * dv + bv * dm)
    x1 = am * cm * ev * gv + av * cv * em * gm
    x2 = am * cv * ev * gm + av * cm * em * gv
    x3 = am * cm * em * gm + av * cv * ev * gv
    x4 = am * cv * em * gv + av * cm * ev * gm
    res, lab = [], []
    for s1, s2 in _signs(2):
        res.append(s1 * p1 * x1 - p2 * x2 + s2 * p3 * x3 - p4 * x4)
        lab.append(f"1({_sgn(s1)},{_sgn(s2)})")
    for s1, s2 in _signs(2):
        res.append(s1 * p1 * x2 + p2 * x1 + s2 * p3 * x4 + p4 * x3)
        lab.append(f"2({_sgn(s1)},{_sgn(s2)})")
    return res, lab, (8,) * 8


def barreto_conditions(t, u, v, w):
    from .integrands import barreto_argument

    return [barreto_argument(t, u, v, w)], ["argument"], (8,)


def kite_conditions(v, w):
    from .integrands import kite_spectrum

    return [kite_spectrum(v, w).discriminant], ["discriminant"], (4,)


def sixteen_conditions(s):
    """Maekawa-defect lattice: four printed conditions plus the equal-omega pair."""
    from .sixteen import SixteenVertexWeights

    if not isinstance(s, SixteenVertexWeights):
        raise TypeError("sixteen-vertex conditions need SixteenVertexWeights")
    o, v = s.even.padded(), s.odd.padded()
    oa, ob = o[1] + o[3], o[5] + o[7]
    va, vb = v[1] + v[3], v[5] + v[7]
    r = [oa - ob - va - vb, ob - oa - va - vb, va - oa - ob - vb, vb - oa - ob - va]
    lab = ["1", "2", "3", "4"]
    if np.allclose(o[1:], o[1], rtol=1e-12, atol=0.0):
        w = o[1]
        r += [va - 4 * w - vb, vb - 4 * w - va]
        lab += ["equal-omega 1", "equal-omega 2"]
    return r, lab, (1,) * len(r)


CONDITION_SETS = {
    "miura": "fully asymmetric Miura-ori",
    "miura-tu": "Miura-ori with t, u crease-inverted v, w",
    "miura-symmetric": "fully symmetric Miura-ori",
    "trapezoid": "trapezoid",
    "trapezoid-symmetric": "trapezoid with w the rotated v",
    "barreto": "Barreto's Mars log argument",
    "kite": "kite discriminant",
    "homogeneous": "homogeneous square lattice",
    "column-two": "column-staggered two-unit square lattice",
    "bipartite-two": "bipartite two-unit square lattice",
    "four-unit": "general four-unit lattice (Omega invariants)",
    "crease": "unit vertex weights with crease-assignment weights",
    "sixteen": "sixteen-vertex Maekawa-defect lattice",
}


def default_condition_set(model):
    cp, st = model.cp, model.staggering
    if cp is CpKind.MIURA:
        return "miura"
    if cp is CpKind.TRAPEZOID:
        return "trapezoid"
    if cp is CpKind.BARRETO_MARS:
        return "barreto"
    if cp is CpKind.KITE:
        return "kite"
    return {
        Staggering.HOMOGENEOUS: "homogeneous",
        Staggering.COLUMN_TWO: "column-two",
        Staggering.BIPARTITE_TWO: "bipartite-two",
        Staggering.COLUMN_FOUR: "four-unit",
    }[st]


def transition_residuals(obj, conditions=None):
    """Residuals of a printed condition set.

    ``obj`` is a :class:`StaggeredModel`, crease-assignment weights (or an
    equivalent mapping) or sixteen-vertex weights.  For a model the set
    defaults to the one belonging to its crease pattern and staggering;
    ``conditions`` selects another set by name (:data:`CONDITION_SETS`).
    """
    from .sixteen import SixteenVertexWeights

    if isinstance(obj, SixteenVertexWeights):
        name = conditions or "sixteen"
        res, lab, deg = sixteen_conditions(obj)
    elif isinstance(obj, StaggeredModel):
        name = conditions or default_condition_set(obj)
        v, w, t, u = obj.four_units()
        table = {
            "miura": lambda: miura_conditions(t, u, v, w),
            "miura-tu": lambda: miura_tu_conditions(v, w),
            "miura-symmetric": lambda: miura_symmetric_conditions(v),
            "trapezoid": lambda: trapezoid_conditions(v, w),
            "trapezoid-symmetric": lambda: trapezoid_symmetric_conditions(v),
            "barreto": lambda: barreto_conditions(t, u, v, w),
            "kite": lambda: kite_conditions(v, w),
            "homogeneous": lambda: homogeneous_conditions(v),
            "column-two": lambda: column_two_conditions(v, w),
            "bipartite-two": lambda: bipartite_two_conditions(v, w),
            "four-unit": lambda: four_unit_conditions(t, u, v, w),
        }
        if name not in table:
            raise ValueError(f"condition set {name!r} does not apply to a vertex-weight model")
        res, lab, deg = table[name]()
    elif isinstance(obj, CreaseAssignmentWeights) or isinstance(obj, dict):
        name = conditions or "crease"
        if name != "crease":
            raise ValueError(f"condition set {name!r} does not apply to crease weights")
        res, lab, deg = crease_conditions(obj)
    else:
        raise TypeError(f"cannot evaluate transition conditions for {type(obj).__name__}")
    return TransitionResidualSet(name, tuple(lab), np.array(res, dtype=float), tuple(deg))


# -- locating roots along a family --------------------------------------------


def _bisect(f, a, b, fa, tol):
    for _ in range(200):
        m = 0.5 * (a + b)
        if m <= a or m >= b or b - a <= tol * abs(m):
            break
        fm = f(m)
        if fm == 0:
            return m, m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return a, b


def locate_critical(family, interval, conditions=None, points=2001, log=None, tol=ROOT_TOL):
    """Critical parameters of ``family(p)`` inside ``interval``.

    ``family`` maps a positive parameter to anything accepted by
    :func:`transition_residuals`.  Returns physical :class:`CriticalPoint`
    records sorted by parameter, duplicates across conditions merged within
    :data:`MERGE_TOL`.  An empty list means no transition in the interval.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not 0 < lo < hi:
        raise ValueError("interval must be positive and increasing")
    if log is None:
        log = hi / lo > 20
    grid = np.geomspace(lo, hi, points) if log else np.linspace(lo, hi, points)

    def res(p):
        return transition_residuals(family(p), conditions)

    first = res(grid[0])
    labels = first.labels
    table = np.array([first.residuals] + [res(p).residuals for p in grid[1:]])
    found = []
    for k, label in enumerate(labels):
        col = table[:, k]

        def f(p, k=k):
            return float(res(p).residuals[k])

        for i in range(len(grid) - 1):
            a, b = grid[i], grid[i + 1]
            fa, fb = col[i], col[i + 1]
            if fa == 0.0:
                found.append(_record(f, a, (a, a), k, label, "crossing"))
            elif fa * fb < 0:
                x0, x1 = _bisect(f, a, b, fa, tol)
                x = x0 if abs(f(x0)) <= abs(f(x1)) else x1
                found.append(_record(f, x, (x0, x1), k, label, "crossing"))
        # tangential zeros: interior local minima of |r|
        mag = np.abs(col)
        for i in range(1, len(grid) - 1):
            if mag[i] <= mag[i - 1] and mag[i] < mag[i + 1] and col[i - 1] * col[i + 1] > 0:
                hit = _tangential(f, grid[i - 1], grid[i + 1], tol)
                if hit is not None:
                    x, br = hit
                    found.append(_record(f, x, br, k, label, "tangential"))
    out = [p for p in found if p.physical]
    out.sort(key=lambda p: p.parameter)
    merged = []
    for p in out:
        if merged and abs(p.parameter - merged[-1].parameter) <= MERGE_TOL * max(1.0, p.parameter):
            continue
        merged.append(p)
    return merged


def _record(f, x, bracket, k, label, kind):
    r = f(x)
    physical = x > 0 and np.isfinite(r)
    return CriticalPoint(float(x), k, label, (float(bracket[0]), float(bracket[1])), float(r), kind, physical, "" if physical else "non-positive parameter")


def _tangential(f, a, b, tol):
    """Refine a local minimum of |f| by bisecting the sign of f'."""

    def df(x):
        h = 1e-6 * max(1.0, abs(x))
        return f(x + h) - f(x - h)

    da, db = df(a), df(b)
    if da * db > 0:
        return None
    x0, x1 = _bisect(df, a, b, da, tol)
    x = 0.5 * (x0 + x1)
    d = 1e-3 * max(abs(x), 1e-300)
    ref = max(abs(f(x - d)), abs(f(x + d)))
    if abs(f(x)) <= 1e-9 * ref:
        return x, (x0, x1)
    return None


# -- check against the free-energy integrand ---------------------------------


def corner_determinants(model):
    """D(theta1, theta2) of the four-unit cell at the four points {0, pi}^2."""
    pts = [(0.0, 0.0), (0.0, math.pi), (math.pi, 0.0), (math.pi, math.pi)]
    return {p: float(momentum_determinant(model, *p)) for p in pts}


def determinant_minimum(model, n=64):
    """Smallest D over an n x n torus grid (safety net for off-corner zeros)."""
    g = 2 * np.pi * np.arange(n) / n
    T1, T2 = np.meshgrid(g, g, indexing="ij")
    return float(np.min(momentum_determinant(model, T1, T2)))
