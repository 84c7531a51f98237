"""Crease-reversal and layer-ordering defects as a lattice gas.

The pressure is the per-site free energy, beta P = -beta f, and the defect
density per site is rho = x d(beta P)/dx for the fugacity x in use.  Crease
defects use either the per-crease fugacity y or the face-flip fugacity
z = y^4; since y d/dy = 4 z d/dz the two densities differ by a factor 4 and
saturate at 2 and 1/2 respectively.  Layer-ordering defects are the third
colour of the three-colouring problem with fugacity z.

The isothermal compressibility is k_T = (1/rho) d rho / d(beta P), which for
any fugacity x equals (x / rho^2) d rho / dx.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .elliptic import agm, ellipk_minus_e
from .integrands import evaluate_free_energy, miura_symmetric_integrand, trapezoid_symmetric_integrand
from .model import DefectFugacity

Y_CRITICAL = math.sqrt(2) / 2
Z_CRITICAL = 0.25
COLORING_Z_CRITICAL = 1.0

MODELS = ("miura", "trapezoid", "barreto", "coloring")


def _fugacity(f, family):
    """(y, z) from a DefectFugacity or a bare number read in ``family``."""
    if family not in ("y", "z"):
        raise ValueError(f"unknown fugacity family {family!r}")
    if isinstance(f, DefectFugacity):
        return f.y, f.z
    x = float(f)
    if not x > 0:
        raise ValueError("fugacity must be positive")
    if family == "y":
        return x, x ** 4
    return x ** 0.25, x


def _moduli(z):
    """Modulus sqrt(z)/(1/4 + z) and its complement |1/4 - z|/(1/4 + z)."""
    d = 0.25 + z
    return math.sqrt(z) / d, abs(0.25 - z) / d


def density_miura_trapezoid(f, family="y"):
    """Crease-defect density of the symmetric Miura-ori and trapezoid families.

    rho(y) = 1 - (2/pi) (1/4 - y^4)/(1/4 + y^4) K(y^2/(1/4 + y^4)), evaluated as
    1 - sign(1/4 - y^4) k'/agm(1, k') so that rho(y_c) = 1 exactly.
    """
    _, z = _fugacity(f, family)
    _, kp = _moduli(z)
    if kp == 0:
        rho = 1.0
    else:
        rho = 1.0 - math.copysign(1.0, 0.25 - z) * kp / agm(1.0, kp)
    return rho if family == "y" else 0.25 * rho


def density_barreto(f, family="y"):
    y, z = _fugacity(f, family)
    return 2 * z / (1 + z) if family == "y" else z / (2 * (1 + z))


def pressure(f, model, family="y", tol=1e-13):
    """beta P, the per-site free energy of a defect family."""
    if model == "coloring":
        if family != "z":
            raise ValueError("layer-ordering defects only have the z fugacity")
        return coloring_pressure(float(f))
    y, z = _fugacity(f, family)
    if model == "barreto":
        return 0.5 * math.log1p(z)
    if model == "miura":
        return evaluate_free_energy(miura_symmetric_integrand(y), tol=tol).value
    if model == "trapezoid":
        return evaluate_free_energy(trapezoid_symmetric_integrand(y), tol=tol).value
    raise ValueError(f"unknown model {model!r}")


def density(f, model, family="y"):
    if model in ("miura", "trapezoid"):
        return density_miura_trapezoid(f, family)
    if model == "barreto":
        return density_barreto(f, family)
    if model == "coloring":
        if family != "z":
            raise ValueError("layer-ordering defects only have the z fugacity")
        return coloring_density(float(f))
    raise ValueError(f"unknown model {model!r}")


def density_derivatives(f, model="miura", family="y"):
    """d rho / d(fugacity) from the closed forms.

    Miura-ori and trapezoid: (4/(pi y)) (K - E) in y and (K - E)/(4 pi z) in
    z; Barreto's Mars: 8y^3/(1 + y^4)^2 and 1/(2 (1 + z)^2).
    """
    if model == "coloring":
        if family != "z":
            raise ValueError("layer-ordering defects only have the z fugacity")
        return coloring_density_derivative(float(f))
    y, z = _fugacity(f, family)
    if model in ("miura", "trapezoid"):
        k, kp = _moduli(z)
        diff = ellipk_minus_e(k, kp)
        return 4 / (math.pi * y) * diff if family == "y" else diff / (4 * math.pi * z)
    if model == "barreto":
        return 8 * y ** 3 / (1 + z) ** 2 if family == "y" else 0.5 / (1 + z) ** 2
    raise ValueError(f"unknown model {model!r}")


# -- three-colouring ---------------------------------------------------------


def _coloring_parts(z):
    """t, t^2 and q = 1 - 9t^2 without cancellation on either branch."""
    if not z > 0:
        raise ValueError("fugacity must be positive")
    if z == 1:
        return 0.0, 0.0, 1.0
    if z > 1:
        t2 = (z - 1) / (9 * z)
        q = 1 / z
    else:
        s = math.sqrt(1 + 12 * z + 36 * z * z + 32 * z ** 3)
        # 1 + 8z - s = 4z(1 - z)(1 + 8z)/(1 + 8z + s)
        t2 = 2 * (1 - z) * (1 + 8 * z) / (9 * (1 + 8 * z + s))
        # s - (1 + 6z) = 32 z^3 / (s + 1 + 6z)
        q = 16 * z * z * (1 + 2 * z / (s + 1 + 6 * z)) / (1 + 8 * z + s)
    return math.sqrt(t2), t2, q


def coloring_t(z):
    """Root 0 <= t < 1/3 of (1 - 3t^2)^3/(1 - 9t^2) = (1 + 2z)^3/(27 z^2)."""
    return _coloring_parts(z)[0]


def coloring_cubic_residual(t, z):
    """Relative residual of the cubic relation fixing t(z), in exact arithmetic.

    Near t = 1/3 the left side is ill-conditioned, so it is evaluated on the
    exact binary values of t and z rather than in floating point.
    """
    t, z = Fraction(t), Fraction(z)
    lhs = (1 - 3 * t * t) ** 3 / (1 - 9 * t * t)
    rhs = (1 + 2 * z) ** 3 / (27 * z * z)
    return float((lhs - rhs) / rhs)


def coloring_cubic_residual_q(z):
    """Relative residual of the cubic relation written in q = 1 - 9t^2.

    With 1 - 3t^2 = (2 + q)/3 the relation reads z^2 (2 + q)^3 = q (1 + 2z)^3.
    q is computed without cancellation, so this form stays well conditioned
    where t approaches 1/3 (small z) and one ulp of t spoils the t form.
    """
    q, z = Fraction(_coloring_parts(z)[2]), Fraction(z)
    rhs = q * (1 + 2 * z) ** 3
    return float((z * z * (2 + q) ** 3 - rhs) / rhs)


def coloring_pressure(z):
    """beta P of the three-colouring with fugacities (1, 1, z).

    P = (1/3) ln z + (1/2) ln[64 (1 - 9t^2)^(2/3) / (27 (1 + t)^3 (1 - 3t))],
    with 1 - 3t written as (1 - 9t^2)/(1 + 3t).
    """
    t, _, q = _coloring_parts(z)
    inner = math.log(64 / 27) - math.log(q) / 3 - 3 * math.log1p(t) + math.log1p(3 * t)
    return math.log(z) / 3 + 0.5 * inner


def coloring_density(z):
    """rho = z dP/dz = 1/3 + 2(z - 1)(1 - 3t^2) / (9 t (1 + t)(1 + 2z)).

    Obtained by differentiating P through t(z) with the cubic relation;
    rho(1) = 1/3.
    """
    t, t2, _ = _coloring_parts(z)
    if t == 0:
        return 1 / 3
    return 1 / 3 + 2 * (z - 1) * (1 - 3 * t2) / (9 * t * (1 + t) * (1 + 2 * z))


def coloring_density_derivative(z):
    """d rho/dz of the layer-ordering density, exact through t'(z).

    Diverges like |z - 1|^(-1/2) at the transition.
    """
    t, t2, q = _coloring_parts(z)
    if t == 0:
        return math.inf
    # t' = 2 (z - 1) q (1 - 3t^2) / (108 t^3 z (1 + 2z))
    dt = 2 * (z - 1) * q * (1 - 3 * t2) / (108 * t * t2 * z * (1 + 2 * z))
    g = 2 * (z - 1) / (1 + 2 * z)
    dg = 6 / (1 + 2 * z) ** 2
    # h = (1 - 3t^2)/(9 t (1 + t)), so rho = 1/3 + g h
    num, den = 1 - 3 * t2, 9 * t * (1 + t)
    h = num / den
    dh = (-6 * t * den - num * 9 * (1 + 2 * t)) / den ** 2
    return dg * h + g * dh * dt


# -- equations of state --------------------------------------------------------


@dataclass(frozen=True)
class CriticalMark:
    fugacity: float
    pressure: float
    density: float


@dataclass(frozen=True)
class LatticeGasCurve:
    model: str
    family: str
    fugacity: np.ndarray
    pressure: np.ndarray
    density: np.ndarray
    slope: np.ndarray
    compressibility: np.ndarray
    critical: list = field(default_factory=list)

    def rows(self):
        return list(zip(self.fugacity, self.pressure, self.density, self.slope, self.compressibility))


def critical_fugacity(model, family):
    if model in ("miura", "trapezoid"):
        return Y_CRITICAL if family == "y" else Z_CRITICAL
    if model == "coloring":
        return COLORING_Z_CRITICAL
    return None


def equation_of_state(model, family, grid, tol=1e-13):
    """Pressure, density, d rho/dx and k_T on a grid of positive fugacities."""
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or not np.all(x > 0):
        raise ValueError("grid must be a 1-d array of positive fugacities")
    P = np.array([pressure(v, model, family, tol) for v in x])
    rho = np.array([density(v, model, family) for v in x])
    slope = np.array([density_derivatives(v, model, family) for v in x])
    with np.errstate(divide="ignore", invalid="ignore"):
        kT = x * slope / rho ** 2
    marks = []
    xc = critical_fugacity(model, family)
    if xc is not None and x.min() <= xc <= x.max():
        marks.append(CriticalMark(xc, pressure(xc, model, family, tol), density(xc, model, family)))
    return LatticeGasCurve(model, family, x, P, rho, slope, kT, marks)
