"""Closed-form thermodynamic free energies of the origami vertex models.

Each free energy is a normalized double integral of ln P(theta1, theta2),
where P is a cosine series

    P = A + 2 B cos(h_B . theta) + 2 C cos(h_C . theta) + ...

with one harmonic ``h`` per coefficient letter.  The letters, harmonics and
prefactors follow the reference tables; each table is defined once below.
Per-site free energies are ``prefactor * (2 pi)**2 * mean(ln P)``.

Every table is tied to a Bloch determinant of :mod:`flatfold.dimer` by a
unimodular change of momenta (:data:`TABLE_CELLS`), which is how the tables
are checked coefficient by coefficient.  The homogeneous simple-square table
is shipped in two forms: the printed one and the one that matches the dimer
determinant and the enumeration oracle (see ``homogeneous_integrand``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd

import numpy as np

from .dimer import bloch_determinant
from .model import CpKind, OddVertexWeights, Staggering
from .quadrature import evaluate_laurent, laurent_from_cosine_series, laurent_from_samples, torus_log_mean

#: harmonics of the thirteen-term four-unit table
FOUR_UNIT_HARMONICS = {
    "A": (0, 0),
    "B": (1, 0),
    "C": (0, 1),
    "D": (1, 1),
    "E": (1, -1),
    "F": (2, 0),
    "G": (0, 2),
    "H": (2, 1),
    "I": (2, -1),
    "J": (1, 2),
    "K": (1, -2),
    "L": (2, 2),
    "M": (2, -2),
}
TRAPEZOID_HARMONICS = {k: FOUR_UNIT_HARMONICS[k] for k in "ABCDGJL"}
KITE_HARMONICS = {k: FOUR_UNIT_HARMONICS[k] for k in "ACG"}
# the two-unit square tables attach D to theta1 - theta2 and E to theta1 + theta2
COLUMN_TWO_HARMONICS = {"A": (0, 0), "B": (1, 0), "C": (0, 1), "D": (1, -1), "E": (1, 1), "G": (0, 2), "H": (1, -2), "I": (1, 2)}
BIPARTITE_TWO_HARMONICS = {"A": (0, 0), "B": (1, 0), "C": (0, 1), "D": (1, -1), "E": (1, 1), "F": (2, 0), "G": (0, 2)}
HOMOGENEOUS_HARMONICS = {"A": (0, 0), "B": (1, 0), "C": (0, 1), "D": (1, -1), "E": (1, 1)}


@dataclass(frozen=True)
class FourierIntegrand:
    """Cosine-series integrand with prefactor ``1 / (denominator * pi**2)``."""

    name: str
    coefficients: dict
    harmonics: dict
    denominator: int
    notes: str = ""

    def __post_init__(self):
        missing = set(self.coefficients) - set(self.harmonics)
        if missing:
            raise ValueError(f"coefficients without harmonics: {sorted(missing)}")

    @property
    def prefactor(self):
        return 1.0 / (self.denominator * math.pi ** 2)

    @property
    def site_factor(self):
        """Per-site free energy divided by mean(ln P) over the torus."""
        return 4.0 / self.denominator

    def by_harmonic(self):
        """``{(k1, k2): c}`` with the constant term at ``(0, 0)``."""
        out = {}
        for letter, c in self.coefficients.items():
            h = self.harmonics[letter]
            out[h] = out.get(h, 0.0) + float(c)
        return out

    def laurent(self):
        return laurent_from_cosine_series(self.by_harmonic())

    def series(self, t1, t2):
        return evaluate_laurent(self.laurent(), t1, t2).real


@dataclass(frozen=True)
class FreeEnergyResult:
    value: float
    order: int
    converged: bool
    min_sample: float


def evaluate_free_energy(f, tol=1e-13, max_order=1 << 17):
    """Per-site free energy ``prefactor * integral of ln P`` over the torus.

    The inner integral is exact (Jensen's formula); the outer one is doubled
    until two successive orders agree to ``tol``.  ``min_sample`` is the
    smallest value of P on a check grid; a non-positive value flags a critical
    or unphysical point.
    """
    mean, order, ok, pmin = torus_log_mean(f.laurent(), tol=tol, max_order=max_order)
    return FreeEnergyResult(f.site_factor * mean, order, ok, pmin)


def _vals(x):
    if isinstance(x, OddVertexWeights):
        return x.padded()
    a = np.asarray(x, dtype=float)
    return a if a.shape == (9,) else np.concatenate([[0.0], a])


# -- Miura-ori --------------------------------------------------------------


def miura_integrand(t, u, v, w):
    """Thirteen-term table of the column-staggered Miura-ori (prefactor 1/32 pi^2)."""
    _, t1, t2, t3, t4, t5, t6, t7, t8 = _vals(t)
    _, u1, u2, u3, u4, u5, u6, u7, u8 = _vals(u)
    _, v1, v2, v3, v4, v5, v6, v7, v8 = _vals(v)
    _, w1, w2, w3, w4, w5, w6, w7, w8 = _vals(w)
    g = t1 * u3 * v2 * w4 + t2 * u4 * v1 * w3
    A = (
        u3**2 * v2**2 * w4**2 * t1**2
        + t2**2 * u4**2 * w3**2 * v1**2
        + (v5**2 * w6**2 + v7**2 * w8**2) * (t5**2 * u6**2 + t7**2 * u8**2)
        + (v5**2 * w7**2 + v7**2 * w5**2) * (t5**2 * u7**2 + t7**2 * u5**2)
        + (v6**2 * w5**2 + v8**2 * w7**2) * (t6**2 * u5**2 + t8**2 * u7**2)
        + (v6**2 * w8**2 + v8**2 * w6**2) * (t6**2 * u8**2 + t8**2 * u6**2)
        + 2 * t1 * t2 * v1 * v2 * u3 * u4 * w3 * w4
        + 2 * t5 * t6 * u5 * u6 * v7 * v8 * w7 * w8
        + 2 * t7 * t8 * u7 * u8 * v5 * v6 * w5 * w6
        + 2 * g * (t5 * u6 * v7 * w8 + t6 * u5 * v8 * w7 + t7 * u8 * v5 * w6 + t8 * u7 * v6 * w5)
        + 2 * (t7 * u5 * v5 * w7 + t8 * u6 * v6 * w8) * (t5 * u7 * v7 * w5 + t6 * u8 * v8 * w6)
        + 2 * (t7 * u8 * v7 * w8 + t8 * u7 * v8 * w7) * (t5 * u6 * v5 * w6 + t6 * u5 * v6 * w5)
    )
    B = (
        (-(v5**2) * w6 * w7 + v7**2 * w5 * w8) * (t5**2 * u6 * u7 - t7**2 * u5 * u8)
        + (-v5 * v8 * w6**2 + v6 * v7 * w8**2) * (t5 * t8 * u6**2 - t6 * t7 * u8**2)
        + (-v5 * v8 * w7**2 + v6 * v7 * w5**2) * (t5 * t8 * u7**2 - t6 * t7 * u5**2)
        + (v6**2 * w5 * w8 - v8**2 * w6 * w7) * (-(t6**2) * u5 * u8 + t8**2 * u6 * u7)
        + (u5 * u7 * w5 * w7 + u6 * u8 * w6 * w8) * (t5 * t6 * v7 * v8 + t7 * t8 * v5 * v6)
        + (u5 * u6 * w7 * w8 + u7 * u8 * w5 * w6) * (t5 * t7 * v5 * v7 + t6 * t8 * v6 * v8)
        + g * (t5 * u7 * v7 * w5 + t6 * u8 * v8 * w6 + t7 * u5 * v5 * w7 + t8 * u6 * v6 * w8)
    )
    C = (
        (-(u6**2) * w6 * w8 + u7**2 * w5 * w7) * (-(t5**2) * v5 * v7 + t8**2 * v6 * v8)
        + (u5**2 * w5 * w7 - u8**2 * w6 * w8) * (t6**2 * v6 * v8 - t7**2 * v5 * v7)
        - u5 * u7 * (t5 * t7 * (v5**2 * w7**2 + v7**2 * w5**2) - t6 * t8 * (v6**2 * w5**2 + v8**2 * w7**2))
        + u6 * u8 * (t5 * t7 * (v5**2 * w6**2 + v7**2 * w8**2) - t6 * t8 * (v6**2 * w8**2 + v8**2 * w6**2))
        + (v5 * v8 * w6 * w7 + v6 * v7 * w5 * w8) * (t5 * t6 * u5 * u6 + t7 * t8 * u7 * u8)
        + (v5 * v6 * w5 * w6 + v7 * v8 * w7 * w8) * (t5 * t8 * u6 * u7 + t6 * t7 * u5 * u8)
        + g * (t5 * u6 * v5 * w6 + t6 * u5 * v6 * w5 + t7 * u8 * v7 * w8 + t8 * u7 * v8 * w7)
    )
    p = u8 * (t6**2 * v6 * v8 - t7**2 * v5 * v7) * u5 + u6 * u7 * (t5**2 * v5 * v7 - t8**2 * v6 * v8)
    q = t7 * (-(v5**2) * w6 * w7 + v7**2 * w5 * w8) * t5 - t6 * t8 * (v6**2 * w5 * w8 - v8**2 * w6 * w7)
    r = t8 * (-(u6**2) * w6 * w8 + u7**2 * w5 * w7) * t5 - t6 * t7 * (u5**2 * w5 * w7 - u8**2 * w6 * w8)
    s = -u7 * (v5 * v8 * w7**2 - v6 * v7 * w5**2) * u5 + u6 * u8 * (v5 * v8 * w6**2 - v6 * v7 * w8**2)
    D = -p * w7 * w8 + q * u7 * u8 - r * v6 * v5 + s * t6 * t5 - (t5 * u7 * v5 * w7 + t6 * u8 * v6 * w8) * g
    E = p * w5 * w6 - q * u5 * u6 - s * t8 * t7 + r * v7 * v8 - g * (t7 * u5 * v7 * w5 + t8 * u6 * v8 * w6)
    x1 = v5 * v8 * w6 * w7 + v6 * v7 * w5 * w8
    x2 = t5 * t8 * u6 * u7 + t6 * t7 * u5 * u8
    x3 = u5 * u7 * w5 * w7 + u6 * u8 * w6 * w8
    x4 = t5 * t7 * v5 * v7 + t6 * t8 * v6 * v8
    coeffs = {
        "A": A,
        "B": B,
        "C": C,
        "D": D,
        "E": E,
        "F": t5 * t6 * u7 * u8 * v7 * v8 * w5 * w6 + t7 * t8 * u5 * u6 * v5 * v6 * w7 * w8 + x1 * x2,
        "G": t5 * t6 * u5 * u6 * v5 * v6 * w5 * w6 + t7 * t8 * u7 * u8 * v7 * v8 * w7 * w8 + x3 * x4,
        "H": -w7 * w8 * v5 * v6 * x2 - u7 * u8 * t5 * t6 * x1,
        "I": -w5 * w6 * v7 * v8 * x2 - u5 * u6 * t7 * t8 * x1,
        "J": -u7 * u8 * w7 * w8 * x4 - v5 * v6 * t5 * t6 * x3,
        "K": -u5 * u6 * w5 * w6 * x4 - v7 * v8 * t7 * t8 * x3,
        "L": t5 * t6 * u7 * u8 * v5 * v6 * w7 * w8,
        "M": t7 * t8 * u5 * u6 * v7 * v8 * w5 * w6,
    }
    return FourierIntegrand("miura", {k: float(c) for k, c in coeffs.items()}, FOUR_UNIT_HARMONICS, 32)


def miura_symmetric_integrand(y):
    """1 + 4y^4 + 16y^8 + 4y^4 (cos t1 + cos t2 - cos t1 cos t2), prefactor 1/16 pi^2.

    For the symmetric family the four-unit determinant is the square of this
    series, which is why the prefactor is twice the four-unit one.
    """
    y4 = float(y) ** 4
    coeffs = {"A": 1 + 4 * y4 + 16 * y4 * y4, "B": 2 * y4, "C": 2 * y4, "D": -y4, "E": -y4}
    return FourierIntegrand("miura-symmetric", coeffs, FOUR_UNIT_HARMONICS, 16)


# -- trapezoid ----------------------------------------------------------------


def trapezoid_integrand(v, w):
    """Seven-term table of the bipartite trapezoid (prefactor 1/16 pi^2)."""
    _, v1, v2, v3, v4, v5, v6, v7, v8 = _vals(v)
    _, w1, w2, w3, w4, w5, w6, w7, w8 = _vals(w)
    coeffs = {
        "A": v1**2 * w3**2 + 2 * v1 * v2 * w3 * w4 + v2**2 * w4**2 + v5**2 * w7**2 + v6**2 * w8**2 + v7**2 * w5**2 + v8**2 * w6**2,
        "B": -v5 * v7 * w5 * w7 - v6 * v8 * w6 * w8,
        "C": (v7 * w5 + v8 * w6) * (v1 * w3 + v2 * w4),
        "D": -(v5 * w7 + v6 * w8) * (v1 * w3 + v2 * w4),
        "G": v7 * v8 * w6 * w5,
        "J": -v5 * v8 * w6 * w7 - v6 * v7 * w5 * w8,
        "L": v5 * v6 * w7 * w8,
    }
    return FourierIntegrand("trapezoid", {k: float(c) for k, c in coeffs.items()}, TRAPEZOID_HARMONICS, 16)


def trapezoid_symmetric_integrand(y):
    """1 + 4y^4 + 2y^2 [cos t2 - cos(t1 + t2)], prefactor 1/8 pi^2."""
    y2 = float(y) ** 2
    coeffs = {"A": 1 + 4 * y2 * y2, "C": y2, "D": -y2}
    return FourierIntegrand("trapezoid-symmetric", coeffs, TRAPEZOID_HARMONICS, 8)


# -- Barreto's Mars -----------------------------------------------------------


def barreto_argument(t, u, v, w):
    """(t1u3v2w4 + t2u4v1w3 + t5u6v7w8 + t6u5v8w7)^2 - 2u3u4w3w4(t1t2v1v2 - t5t6v7v8)."""
    t, u, v, w = (_vals(x) for x in (t, u, v, w))
    s = t[1] * u[3] * v[2] * w[4] + t[2] * u[4] * v[1] * w[3] + t[5] * u[6] * v[7] * w[8] + t[6] * u[5] * v[8] * w[7]
    return float(s * s - 2 * u[3] * u[4] * w[3] * w[4] * (t[1] * t[2] * v[1] * v[2] - t[5] * t[6] * v[7] * v[8]))


def barreto_integrand(t, u, v, w):
    """Constant four-unit integrand: only A survives."""
    return FourierIntegrand("barreto", {"A": barreto_argument(t, u, v, w)}, FOUR_UNIT_HARMONICS, 32)


def barreto_free_energy(t, u, v, w):
    """Per-site free energy (1/8) ln(argument)."""
    a = barreto_argument(t, u, v, w)
    if not a > 0:
        raise ArithmeticError(f"Barreto argument must be positive, got {a}")
    return 0.125 * math.log(a)


# -- kite -------------------------------------------------------------------------

#: the eight admissible (v, w) pairs of a kite unit, in transfer-matrix order
KITE_PAIRS = ((1, 3), (1, 5), (8, 4), (8, 6), (2, 4), (2, 6), (7, 3), (7, 5))


@dataclass(frozen=True)
class KiteSpectrum:
    lambda_plus: float
    lambda_minus: float
    discriminant: float


def kite_transfer_matrix(v, w):
    """The rank-two 8x8 row transfer matrix over :data:`KITE_PAIRS`."""
    v, w = _vals(v), _vals(w)
    upper = [v[1] * w[3], 0, 0, v[8] * w[6], 0, v[2] * w[6], v[7] * w[3], 0]
    lower = [0, v[1] * w[5], v[8] * w[4], 0, v[2] * w[4], 0, 0, v[7] * w[5]]
    return np.array([upper] * 4 + [lower] * 4, dtype=float)


def kite_spectrum(v, w):
    """Non-zero eigenvalues (1/2)[v1w3 + v2w4 + v7w5 + v8w6 +- sqrt(D)]."""
    v, w = _vals(v), _vals(w)
    a, b, c, d = v[1] * w[3], v[2] * w[4], v[7] * w[5], v[8] * w[6]
    disc = (a - b) ** 2 + (c - d) ** 2 + 2 * (a + b) * (c + d) + 4 * v[1] * v[2] * w[5] * w[6] + 4 * v[7] * v[8] * w[3] * w[4]
    root = math.sqrt(max(disc, 0.0))
    s = a + b + c + d
    return KiteSpectrum(0.5 * (s + root), 0.5 * (s - root), float(disc))


def kite_row_Z(v, w, units):
    """Periodic one-row partition function Tr T^n = lambda_+^n + lambda_-^n."""
    sp = kite_spectrum(v, w)
    return sp.lambda_plus ** units + sp.lambda_minus ** units


def kite_Z(v, w, shape, rule="torus"):
    """Partition function of the kite on an M x N torus.

    Every row is the row below shifted by one column, so a row configuration
    must return to itself after M shifts: it is periodic with period
    ``g = gcd(M, N)`` and its weight enters ``M N / g`` times.  Hence

        Z = Tr T(weights ** (M N / g)) ** (g / 2).

    ``rule="literal"`` raises every weight to the M-th power and traces over
    the full row, ``Tr T(weights ** M) ** (N / 2)``; it coincides with the
    torus rule exactly when N divides M.
    """
    M, N = (shape.M, shape.N) if hasattr(shape, "M") else shape
    if M % 2 or N % 2:
        raise ValueError("the kite lives on the bipartite two-unit cell: M and N must be even")
    v, w = _vals(v), _vals(w)
    if rule == "torus":
        g = gcd(M, N)
        p, n = M * N // g, g // 2
    elif rule == "literal":
        p, n = M, N // 2
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return kite_row_Z(v ** p, w ** p, n)


def kite_integrand(v, w):
    """A + 2C cos t2 + 2G cos 2t2 (prefactor 1/16 pi^2)."""
    _, v1, v2, v3, v4, v5, v6, v7, v8 = _vals(v)
    _, w1, w2, w3, w4, w5, w6, w7, w8 = _vals(w)
    coeffs = {
        "A": v1**2 * w3**2 + v2**2 * w4**2 + v7**2 * w5**2 + 2 * v7 * v8 * w5 * w6 + v8**2 * w6**2,
        "C": (v7 * w5 + v8 * w6) * (v1 * w3 + v2 * w4),
        "G": w3 * w4 * v7 * v8,
    }
    return FourierIntegrand("kite", {k: float(c) for k, c in coeffs.items()}, KITE_HARMONICS, 16)


# -- simple square ------------------------------------------------------------


def column_two_integrand(v, w):
    """Column-staggered two-unit square lattice (prefactor 1/16 pi^2)."""
    _, v1, v2, v3, v4, v5, v6, v7, v8 = _vals(v)
    _, w1, w2, w3, w4, w5, w6, w7, w8 = _vals(w)
    coeffs = {
        "A": (v5**2 + v8**2) * (w6**2 + w7**2)
        + (v6**2 + v7**2) * (w5**2 + w8**2)
        + 2 * v1 * v3 * w1 * w3
        + 2 * v2 * v4 * w2 * w4
        + 2 * v5 * v8 * w6 * w7
        + 2 * v6 * v7 * w5 * w8,
        "B": v1 * v2 * w3 * w4 + v3 * v4 * w1 * w2 - v5 * v6 * w7 * w8 - v7 * v8 * w5 * w6 - (v5 * v7 - v6 * v8) * (w5 * w7 - w6 * w8),
        "C": w5 * w8 * (v6**2 + v7**2) - w6 * w7 * (v5**2 + v8**2) - v5 * v8 * (w6**2 + w7**2) + v6 * v7 * (w5**2 + w8**2),
        "D": (v3 * v4 - v5 * v6) * (w5 * w7 - w6 * w8) - (v5 * v7 - v6 * v8) * (w3 * w4 - w5 * w6),
        "E": (v1 * v2 - v5 * v6) * (w5 * w7 - w6 * w8) - (v5 * v7 - v6 * v8) * (w1 * w2 - w5 * w6),
        "G": v8 * v5 * w7 * w6 + v7 * v6 * w8 * w5 - v3 * v1 * w3 * w1 - v4 * v2 * w4 * w2,
        "H": (v1 * v2 - v7 * v8) * (w1 * w2 - w7 * w8),
        "I": (v1 * v2 - v5 * v6) * (w1 * w2 - w5 * w6),
    }
    return FourierIntegrand("column-two", {k: float(c) for k, c in coeffs.items()}, COLUMN_TWO_HARMONICS, 16)


def bipartite_two_integrand(v, w):
    """Bipartite-staggered two-unit square lattice (prefactor 1/16 pi^2)."""
    _, v1, v2, v3, v4, v5, v6, v7, v8 = _vals(v)
    _, w1, w2, w3, w4, w5, w6, w7, w8 = _vals(w)
    coeffs = {
        "A": w8**2 * v6**2
        + w7**2 * v5**2
        + w5**2 * v7**2
        + w6**2 * v8**2
        + w3**2 * v1**2
        + w4**2 * v2**2
        + w1**2 * v3**2
        + w2**2 * v4**2
        + 2 * (v8 * v7 + v5 * v6) * (w8 * w7 + w5 * w6),
        "B": (v1 * w3 + v2 * w4) * (v7 * w5 + v8 * w6) - (v3 * w1 + v4 * w2) * (v5 * w7 + v6 * w8),
        "C": (v3 * w1 + v4 * w2) * (v7 * w5 + v8 * w6) - (v1 * w3 + v2 * w4) * (v5 * w7 + v6 * w8),
        "D": v1 * v4 * w2 * w3 + v2 * v3 * w1 * w4 - v6 * v8 * w6 * w8 - v5 * v7 * w5 * w7,
        "E": v1 * v3 * w1 * w3 + v2 * v4 * w2 * w4 - v6 * v7 * w5 * w8 - v5 * v8 * w6 * w7,
        "F": -(v1 * v2 - v5 * v6) * (w1 * w2 - w5 * w6),
        "G": -(v1 * v2 - v7 * v8) * (w1 * w2 - w7 * w8),
    }
    return FourierIntegrand("bipartite-two", {k: float(c) for k, c in coeffs.items()}, BIPARTITE_TWO_HARMONICS, 16)


def homogeneous_integrand(v, corrected=True):
    """Homogeneous square lattice.

    ``corrected=False`` returns the literal reference table (prefactor
    1/8 pi^2).  At unit weights it gives the constant ln 8 and hence
    (1/2) ln 8 per site, whereas the lattice has 2**(V+1) admissible
    configurations on a torus, i.e. ln 2 per site.  Comparison with the
    momentum determinant shows that C, D and E are right, that B has v3 and
    v4 interchanged and that A is different; the corrected table below
    reproduces the determinant and uses the two-unit prefactor 1/16 pi^2.
    """
    _, v1, v2, v3, v4, v5, v6, v7, v8 = _vals(v)
    C = 2 * v1 * v2 * v3 * v4 - v5**2 * v7**2 - v6**2 * v8**2
    D = (v1 * v2 - v7 * v8) * (v5 * v6 - v3 * v4)
    E = (v1 * v2 - v5 * v6) * (v7 * v8 - v3 * v4)
    if corrected:
        A = 2 * (v5**2 + v8**2) * (v6**2 + v7**2) + 2 * v1**2 * v3**2 + 2 * v2**2 * v4**2 + 4 * v5 * v6 * v7 * v8
        B = 2 * v5 * v6 * v7 * v8 - v1**2 * v3**2 - v2**2 * v4**2
        name, den = "homogeneous", 16
    else:
        A = (v1 * v2 + v3 * v4) * (v5 * v6 + v7 * v8) + v1**2 * v4**2 + v2**2 * v3**2 + v5**2 * v7**2 + v6**2 * v8**2
        B = 2 * v5 * v6 * v7 * v8 - v1**2 * v4**2 - v2**2 * v3**2
        name, den = "homogeneous-printed", 8
    coeffs = {"A": A, "B": B, "C": C, "D": D, "E": E}
    return FourierIntegrand(name, {k: float(c) for k, c in coeffs.items()}, HOMOGENEOUS_HARMONICS, den)


def square_integrands(variant, v, w=None, corrected=True):
    """Simple-square table for ``variant`` in {homogeneous, column-two, bipartite-two}."""
    variant = variant.value if isinstance(variant, Staggering) else str(variant)
    if variant == "homogeneous":
        return homogeneous_integrand(v, corrected=corrected)
    if w is None:
        raise ValueError(f"{variant} needs two weight sets")
    if variant == "column-two":
        return column_two_integrand(v, w)
    if variant == "bipartite-two":
        return bipartite_two_integrand(v, w)
    raise ValueError(f"unknown square variant {variant!r}")


# -- link to the dimer determinant --------------------------------------------

#: Bloch cell and linear map theta -> phi for each table.  The map sends the
#: printed momenta to the momenta of :func:`flatfold.dimer.bloch_determinant`;
#: it is unimodular except for the homogeneous table, whose determinant on the
#: column-two cell depends on 2 phi1 only.
TABLE_CELLS = {
    "miura": ("column-four", ((1, 0), (0, 1))),
    "barreto": ("column-four", ((1, 0), (0, 1))),
    "column-two": ("column-two", ((0, -1), (1, 0))),
    "bipartite-two": ("bipartite-two", ((0, -1), (1, -1))),
    "trapezoid": ("bipartite-two", ((1, 1), (1, 0))),
    "kite": ("bipartite-two", ((1, 1), (1, 0))),
    "homogeneous": ("column-two", ((0.5, 0), (0, -1))),
}


def table_determinant(model, table, t1, t2):
    """Bloch determinant of ``model`` expressed in the printed momenta of ``table``."""
    cell, ((a, b), (c, d)) = TABLE_CELLS[table]
    t1, t2 = np.asarray(t1, float), np.asarray(t2, float)
    return bloch_determinant(model, a * t1 + b * t2, c * t1 + d * t2, cell)


def numerical_coefficients(model, table, n=8, tol=1e-13):
    """Fourier coefficients ``{(k1, k2): c}`` of :func:`table_determinant` in cosine form.

    The returned constant is the mean; every other entry is the coefficient of
    ``2 cos(k . theta)`` with harmonics folded onto the half plane used by the
    tables (each table names one of ``k`` and ``-k``).
    """
    g = 2 * np.pi * np.arange(n) / n
    T1, T2 = np.meshgrid(g, g, indexing="ij")
    C = laurent_from_samples(table_determinant(model, table, T1, T2), tol=tol)
    return {k: float(c.real) for k, c in C.items()}


def compare_with_determinant(f, model, table=None, n=8):
    """Largest coefficient mismatch between a printed table and the determinant.

    Returns ``(max_abs_err, scale)``; harmonics present in either side count.
    """
    table = table or f.name.replace("-printed", "")
    num = numerical_coefficients(model, table, n=n)
    printed = f.by_harmonic()
    keys = set(printed) | {k for k in num if k not in printed and (-k[0], -k[1]) not in printed}
    err = 0.0
    for k in keys:
        got = num.get(k, 0.0)
        err = max(err, abs(got - printed.get(k, 0.0)))
    scale = max(abs(x) for x in num.values()) if num else 1.0
    return err, scale


def free_energy_of(model, tol=1e-13):
    """Closed-form free energy appropriate to the model's crease pattern."""
    cp, st = model.cp, model.staggering
    if cp is CpKind.BARRETO_MARS:
        v, w, t, u = model.four_units()
        val = barreto_free_energy(t, u, v, w)
        return FreeEnergyResult(val, 1, True, barreto_argument(t, u, v, w))
    if cp is CpKind.MIURA:
        v, w, t, u = model.four_units()
        f = miura_integrand(t, u, v, w)
    elif cp is CpKind.TRAPEZOID:
        f = trapezoid_integrand(model.units["v"], model.units["w"])
    elif cp is CpKind.KITE:
        f = kite_integrand(model.units["v"], model.units["w"])
    elif st is Staggering.HOMOGENEOUS:
        f = homogeneous_integrand(model.units["v"])
    elif st is Staggering.COLUMN_TWO:
        f = column_two_integrand(model.units["v"], model.units["w"])
    elif st is Staggering.BIPARTITE_TWO:
        f = bipartite_two_integrand(model.units["v"], model.units["w"])
    else:
        raise ValueError("no closed-form table for the general four-unit square lattice; use dimer.thermo_free_energy")
    return evaluate_free_energy(f, tol=tol)
