"""Simple square pattern with Maekawa defects: the symmetric sixteen-vertex model.

Dropping Maekawa's theorem admits the eight even vertex configurations next to
the eight odd ones.  With every weight tied to its crease-reversed partner
(omega_{2i} = omega_{2i-1}, v_{2i} = v_{2i-1}) the model maps, by a
weak-graph transformation, onto an even eight-vertex model.  That model is
free-fermion whenever omega1 omega3 + omega5 omega7 = v1 v3 + v5 v7, and its
free energy is the Fan-Wu cosine series.

The weak-graph transformation used here is the exact edge Hadamard change of
basis

    W'(alpha) = 1/4 sum_beta W(beta) (-1)^(alpha . beta),

which preserves the torus partition function configuration by configuration
class.  In the labelling of :data:`flatfold.model.ODD_CONFIGS` its images
w~1..w~4 are the printed half-sums, while w~5..w~8 are the printed ones with
v5 and v7 exchanged; ``convention="printed"`` reproduces the printed
combinations literally.

The even model is solved on finite tori by flipping the horizontal creases
between columns 2k and 2k+1, which turns it into a column-staggered odd model
handled by :mod:`flatfold.dimer`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dimer import finite_Z
from .enumeration import ExactPartition, LatticeShape, enumerate_tables
from .integrands import FreeEnergyResult
from .model import (
    EVEN_CODES,
    EVEN_CONFIGS,
    ODD_CODES,
    ODD_CONFIGS,
    CpKind,
    EvenVertexWeights,
    OddVertexWeights,
    StaggeredModel,
    Staggering,
)
from .quadrature import laurent_from_cosine_series, torus_log_mean


class NotFreeFermion(ValueError):
    pass


def _tied(a, rtol):
    a = np.asarray(a, dtype=float)
    return all(abs(a[2 * i] - a[2 * i + 1]) <= rtol * max(abs(a[2 * i]), abs(a[2 * i + 1]), 1e-300) for i in range(4))


@dataclass(frozen=True, eq=False)
class SixteenVertexWeights:
    """Even weights omega1..omega8 and odd weights v1..v8 of one vertex.

    Both halves must be symmetric under crease reversal.  Weights are
    non-negative; ``solvable`` reports the free-fermion condition.
    """

    even: EvenVertexWeights
    odd: OddVertexWeights

    def __init__(self, even, odd, rtol=1e-12):
        even = even if isinstance(even, EvenVertexWeights) else EvenVertexWeights(even)
        odd = odd if isinstance(odd, OddVertexWeights) else OddVertexWeights(odd)
        if not _tied(even.padded()[1:], rtol) or not _tied(odd.padded()[1:], rtol):
            raise ValueError("sixteen-vertex weights must satisfy omega_2i = omega_2i-1 and v_2i = v_2i-1")
        object.__setattr__(self, "even", even)
        object.__setattr__(self, "odd", odd)

    @classmethod
    def symmetric(cls, omega, v):
        """Build from the four independent values (omega1, 3, 5, 7) and (v1, 3, 5, 7)."""
        o = np.repeat(np.asarray(omega, dtype=float), 2)
        x = np.repeat(np.asarray(v, dtype=float), 2)
        return cls(o, x)

    @classmethod
    def equal_omega(cls, omega, v1, v3, v5, v7):
        return cls.symmetric([omega] * 4, [v1, v3, v5, v7])

    @property
    def free_fermion_residual(self):
        o, v = self.even.padded(), self.odd.padded()
        return o[1] * o[3] + o[5] * o[7] - v[1] * v[3] - v[5] * v[7]

    def solvable(self, rtol=1e-12):
        o, v = self.even.padded(), self.odd.padded()
        scale = max(o[1] * o[3] + o[5] * o[7], v[1] * v[3] + v[5] * v[7], 1e-300)
        return abs(self.free_fermion_residual) <= rtol * scale

    def tables(self):
        """(4, 16) weight and admissibility tables for the enumeration engines."""
        lut = np.zeros(16)
        o, v = self.even.padded(), self.odd.padded()
        for i in range(1, 9):
            lut[EVEN_CODES[i - 1]] = o[i]
            lut[ODD_CODES[i - 1]] = v[i]
        lut = np.tile(lut, (4, 1))
        return lut, np.ones((4, 16), dtype=bool)


@dataclass(frozen=True)
class TransformedEvenWeights:
    """Even eight-vertex weights w~1..w~8 produced by the weak-graph map (may be negative)."""

    values: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in self.values)
        if len(a) != 8 or not all(math.isfinite(x) for x in a):
            raise ValueError("need eight finite transformed weights")
        object.__setattr__(self, "values", a)

    def __getitem__(self, i):
        return self.values[i - 1]

    def padded(self):
        return np.concatenate([[0.0], self.values])

    @property
    def free_fermion_residual(self):
        w = self.padded()
        return w[1] * w[2] + w[3] * w[4] - w[5] * w[6] - w[7] * w[8]


def _all_configs():
    configs = [EVEN_CONFIGS[i] for i in range(1, 9)] + [ODD_CONFIGS[i] for i in range(1, 9)]
    return np.array(configs, dtype=np.int64)


_CONFIGS = _all_configs()
# (-1)^(alpha . beta) over all sixteen neighborhoods; rows even 1..8 then odd 1..8
HADAMARD = (-1.0) ** (_CONFIGS @ _CONFIGS.T)

PRINTED_MATRIX = np.array(
    [
        # o1 o3 o5 o7 v1 v3 v5 v7
        [1, 1, 1, 1, 1, 1, 1, 1],
        [1, 1, 1, 1, -1, -1, -1, -1],
        [1, 1, -1, -1, -1, -1, 1, 1],
        [1, 1, -1, -1, 1, 1, -1, -1],
        [1, -1, 1, -1, -1, 1, 1, -1],
        [1, -1, 1, -1, 1, -1, -1, 1],
        [1, -1, -1, 1, -1, 1, -1, 1],
        [1, -1, -1, 1, 1, -1, 1, -1],
    ],
    dtype=float,
)


def _independent(s):
    o, v = s.even.padded(), s.odd.padded()
    return np.array([o[1], o[3], o[5], o[7], v[1], v[3], v[5], v[7]])


def weak_graph_transform(s, convention="exact"):
    """Even eight-vertex weights equivalent to symmetric sixteen-vertex weights."""
    if not isinstance(s, SixteenVertexWeights):
        raise TypeError("weak_graph_transform needs SixteenVertexWeights")
    if convention == "printed":
        return TransformedEvenWeights(tuple(0.5 * PRINTED_MATRIX @ _independent(s)))
    if convention != "exact":
        raise ValueError(f"unknown convention {convention!r}")
    W = np.concatenate([s.even.padded()[1:], s.odd.padded()[1:]])
    out = 0.25 * HADAMARD @ W
    # the odd images vanish identically for crease-reversal symmetric input
    return TransformedEvenWeights(tuple(out[:8]))


def inverse_weak_graph(w, convention="exact"):
    """Sixteen-vertex weights whose weak-graph image is ``w``."""
    if convention == "printed":
        x = 0.25 * PRINTED_MATRIX.T @ np.asarray(w.values)
        return SixteenVertexWeights.symmetric(x[:4], x[4:])
    if convention != "exact":
        raise ValueError(f"unknown convention {convention!r}")
    W = 0.25 * HADAMARD @ np.concatenate([w.values, np.zeros(8)])
    even = EvenVertexWeights(W[:8], signed=True)
    odd = OddVertexWeights(W[8:], signed=True)
    return SixteenVertexWeights(even, odd)


def fan_wu_coefficients(w, rtol=1e-10):
    """Harmonic coefficients A, B, C, D, E of the even free-fermion integrand.

    D = w3 w4 - w7 w8 multiplies cos(t1 - t2) and E = w3 w4 - w5 w6 multiplies
    cos(t1 + t2); both have a second printed form that agrees only under the
    free-fermion condition, which is checked here.
    """
    x = w.padded()
    d1, d2 = x[3] * x[4] - x[7] * x[8], x[5] * x[6] - x[1] * x[2]
    e1, e2 = x[3] * x[4] - x[5] * x[6], x[7] * x[8] - x[1] * x[2]
    scale = max(float(np.max(np.abs(x))) ** 2, 1e-300)
    if abs(d1 - d2) > rtol * scale or abs(e1 - e2) > rtol * scale:
        raise NotFreeFermion(f"transformed weights are not free-fermion (residual {w.free_fermion_residual:.3e})")
    return {
        (0, 0): x[1] ** 2 + x[2] ** 2 + x[3] ** 2 + x[4] ** 2,
        (1, 0): x[1] * x[3] - x[2] * x[4],
        (0, 1): x[1] * x[4] - x[2] * x[3],
        (1, -1): d1,
        (1, 1): e1,
    }


def even_ff_free_energy(w, tol=1e-13, max_order=1 << 17):
    """-beta f per site of the even free-fermion model, prefactor 1/(8 pi^2).

    The quadrature works on ln|P|; a clearly negative sample of P means the
    weights do not describe a physical free-fermion model and raises.
    """
    if isinstance(w, SixteenVertexWeights):
        w = weak_graph_transform(w)
    co = fan_wu_coefficients(w)
    C = laurent_from_cosine_series(co)
    val, order, conv, mn = torus_log_mean(C, tol=tol, max_order=max_order)
    scale = sum(abs(c) for c in co.values())
    if mn < -1e-9 * scale:
        raise NotFreeFermion(f"Fan-Wu integrand changes sign (min sample {mn:.3e})")
    return FreeEnergyResult(0.5 * val, order, conv, mn)


# even labels -> odd labels after flipping the horizontal crease on the
# column-pair boundary: even-column vertices flip their right crease,
# odd-column vertices their left crease
EVEN_TO_ODD_V = {1: 5, 2: 6, 3: 8, 4: 7, 5: 1, 6: 2, 7: 4, 8: 3}
EVEN_TO_ODD_W = {4: 5, 3: 6, 2: 8, 1: 7, 7: 1, 8: 2, 5: 4, 6: 3}


def even_to_odd_model(w):
    """Column-staggered odd model with the same torus partition function (even N)."""
    x = w.padded()
    v = [x[EVEN_TO_ODD_V[i]] for i in range(1, 9)]
    u = [x[EVEN_TO_ODD_W[i]] for i in range(1, 9)]
    units = {"v": OddVertexWeights(v, signed=True), "w": OddVertexWeights(u, signed=True)}
    return StaggeredModel(CpKind.SIMPLE_SQUARE, Staggering.COLUMN_TWO, units)


def sixteen_finite_Z(s, shape, method="pfaffian"):
    """Torus partition function from the transformed even model's Pfaffians."""
    shape = shape if isinstance(shape, LatticeShape) else LatticeShape(*shape)
    if shape.N % 2:
        raise ValueError("the even-to-odd mapping needs an even number of columns")
    return finite_Z(even_to_odd_model(weak_graph_transform(s)), (shape.M, shape.N), method=method)


def enumerate_sixteen_Z(s, shape, engine=None, chunk_bits=0):
    """Brute-force torus partition function with the Maekawa filter disabled."""
    shape = shape if isinstance(shape, LatticeShape) else LatticeShape(*shape)
    lut, allowed = s.tables()
    z, _, n = enumerate_tables(shape.M, shape.N, lut, allowed, engine=engine, chunk_bits=chunk_bits)
    return ExactPartition(z, n)


def maekawa_transitions(s):
    """Residuals of the printed transition conditions (plus the equal-omega pair)."""
    from .transitions import transition_residuals

    return transition_residuals(s)
