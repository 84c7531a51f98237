import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatfold.elliptic import agm, ellipe, ellipk, ellipk_minus_e
from flatfold.enumeration import enumerate_density
from flatfold.latticegas import (
    coloring_cubic_residual,
    coloring_cubic_residual_q,
    coloring_density,
    coloring_density_derivative,
    coloring_pressure,
    coloring_t,
    density,
    density_barreto,
    density_derivatives,
    density_miura_trapezoid,
    equation_of_state,
    pressure,
)
from flatfold.model import symmetric_defect_weights

sp = pytest.importorskip("scipy.special")
YC = math.sqrt(2) / 2


@pytest.mark.parametrize("k", [0.0, 1e-8, 0.1, 0.5, 0.9, 0.999])
def test_elliptic_against_scipy(k):
    assert ellipk(k) == pytest.approx(sp.ellipk(k * k), rel=1e-14)
    assert ellipe(k) == pytest.approx(sp.ellipe(k * k), rel=1e-14)


@pytest.mark.parametrize("kp", [1e-3, 1e-6, 1e-9])
def test_elliptic_near_one_via_complement(kp):
    assert ellipk(kprime=kp) == pytest.approx(sp.ellipkm1(kp * kp), rel=1e-14)
    assert ellipe(kprime=kp) == pytest.approx(sp.ellipe(1 - kp * kp), rel=1e-14)


def test_elliptic_at_zero():
    assert ellipk(0.0) == ellipe(0.0) == pytest.approx(math.pi / 2, rel=1e-16)
    assert agm(1.0, 1.0) == 1.0


@given(st.floats(1e-6, 0.999999))
def test_k_minus_e_stable(k):
    ref = sp.ellipk(k * k) - sp.ellipe(k * k)
    assert ellipk_minus_e(k) == pytest.approx(ref, rel=1e-9, abs=1e-15)


def test_density_examples():
    assert density_miura_trapezoid(YC) == pytest.approx(1.0, abs=1e-12)
    assert density_miura_trapezoid(0.25, "z") == pytest.approx(0.25, abs=1e-12)
    assert density_miura_trapezoid(1e3) == pytest.approx(2.0, abs=1e-4)
    assert density_miura_trapezoid(1e6, "z") == pytest.approx(0.5, abs=1e-4)


def test_density_series_coefficients():
    # the printed series through z^4; the next coefficient is 36
    for z in (1e-3, 1e-2):
        r = density_miura_trapezoid(z, "z")
        c5 = (r - (z - z * z + 4 * z ** 3 - 9 * z ** 4)) / z ** 5
        assert 34 < c5 < 37
    y = 0.1
    assert density_miura_trapezoid(y) == pytest.approx(4 * y ** 4 - 4 * y ** 8 + 16 * y ** 12 - 36 * y ** 16, rel=1e-13)


def test_barreto_density():
    assert density_barreto(1.0) == 1.0
    assert density_barreto(1e6, "z") == pytest.approx(0.5, abs=1e-4)
    assert density_barreto(1e-4) == pytest.approx(0.0, abs=1e-15)
    assert density_derivatives(1.0, "barreto") == 2.0


@pytest.mark.parametrize("model", ["miura", "barreto"])
@pytest.mark.parametrize("family", ["y", "z"])
@pytest.mark.parametrize("x", [0.05, 0.3, 0.6, 0.9, 2.0])
def test_derivative_matches_finite_difference(model, family, x):
    h = 1e-5 * x
    fd = (density(x + h, model, family) - density(x - h, model, family)) / (2 * h)
    assert density_derivatives(x, model, family) == pytest.approx(fd, rel=1e-7)


def test_miura_derivative_small_y():
    y = 0.01
    assert density_derivatives(y, "miura") == pytest.approx(16 * y ** 3, rel=1e-6)


@pytest.mark.parametrize("y", [0.05, 0.2, 0.4, 0.6])
def test_density_is_log_derivative_of_quadrature(y):
    h = 1e-5 * y
    d = y * (pressure(y + h, "miura") - pressure(y - h, "miura")) / (2 * h)
    assert d == pytest.approx(density_miura_trapezoid(y), rel=1e-6, abs=1e-12)


def test_y_and_z_families_differ_by_four():
    for y in (0.3, 1.1):
        assert density(y, "miura", "y") == pytest.approx(4 * density(y ** 4, "miura", "z"), rel=1e-13)


@pytest.mark.parametrize("model,family", [("miura", "y"), ("miura", "z"), ("barreto", "y"), ("coloring", "z")])
def test_densities_increase(model, family):
    x = np.geomspace(0.01, 50, 120)
    rho = np.array([density(v, model, family) for v in x])
    assert np.all(np.diff(rho) > 0)
    top = 2.0 if family == "y" else 0.5
    assert np.all((rho >= 0) & (rho <= top))


@pytest.mark.parametrize("y", [0.3, 0.5, 0.9])
def test_enumerated_density_approaches_closed_form(y):
    m = symmetric_defect_weights("miura", y)
    gaps = [abs(enumerate_density(m, s) - density_miura_trapezoid(y)) for s in [(2, 2), (2, 4), (4, 4)]]
    assert gaps[0] > gaps[1] > gaps[2]


def test_coloring_examples():
    assert coloring_t(1.0) == 0.0
    assert coloring_pressure(1.0) == pytest.approx(1.5 * math.log(4 / 3), rel=1e-15)
    assert coloring_t(4.0) == pytest.approx(math.sqrt(12) / 12, rel=1e-15)
    assert coloring_density(1.0) == pytest.approx(1 / 3, abs=1e-12)
    assert coloring_density(1e6) == pytest.approx(0.5, abs=1e-4)
    assert coloring_density(1e-6) < 1e-5
    assert coloring_pressure(1e-9) == pytest.approx(0.0, abs=1e-6)


def test_coloring_cubic_on_log_grid():
    for z in np.geomspace(1e-2, 1e2, 50):
        assert abs(coloring_cubic_residual(coloring_t(z), z)) <= 1e-12
        assert 0 <= coloring_t(z) < 1 / 3


def test_coloring_cubic_q_form_wide_grid():
    for z in np.geomspace(1e-4, 1e4, 80):
        assert abs(coloring_cubic_residual_q(z)) <= 1e-14


def test_coloring_pressure_continuous_at_one():
    assert coloring_pressure(1 - 1e-10) == pytest.approx(coloring_pressure(1.0), abs=1e-9)
    assert coloring_pressure(1 + 1e-10) == pytest.approx(coloring_pressure(1.0), abs=1e-9)


@pytest.mark.parametrize("z", [0.05, 0.3, 0.7, 1.5, 4.0, 30.0])
def test_coloring_density_is_log_derivative(z):
    h = 1e-6 * z
    fd = z * (coloring_pressure(z + h) - coloring_pressure(z - h)) / (2 * h)
    assert coloring_density(z) == pytest.approx(fd, rel=1e-7)
    fd = (coloring_density(z + h) - coloring_density(z - h)) / (2 * h)
    assert coloring_density_derivative(z) == pytest.approx(fd, rel=1e-6)


def test_coloring_derivative_diverges():
    assert coloring_density_derivative(1.0) == math.inf
    assert coloring_density_derivative(1 + 1e-8) > 1e3


def test_barreto_equation_of_state():
    grid = np.geomspace(0.01, 100, 40)
    c = equation_of_state("barreto", "z", grid)
    assert np.allclose(c.pressure, -0.5 * np.log(1 - 2 * c.density), rtol=1e-12)
    assert np.allclose(c.density, grid / (2 * (1 + grid)), rtol=1e-14)
    assert c.critical == []


def test_miura_equation_of_state_marks_critical():
    grid = np.linspace(0.2, 1.2, 11)
    c = equation_of_state("miura", "y", grid)
    assert len(c.critical) == 1
    mark = c.critical[0]
    assert mark.fugacity == pytest.approx(YC) and mark.density == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(c.compressibility, grid * c.slope / c.density ** 2)
    assert len(c.rows()) == 11


def test_low_density_ideal_gas():
    c = equation_of_state("miura", "z", [1e-6])
    assert c.pressure[0] / c.density[0] == pytest.approx(1.0, rel=1e-5)


def test_bad_inputs():
    with pytest.raises(ValueError):
        density_miura_trapezoid(-1.0)
    with pytest.raises(ValueError):
        density(1.0, "miura", "x")
    with pytest.raises(ValueError):
        equation_of_state("kite", "y", [1.0])
    with pytest.raises(ValueError):
        equation_of_state("miura", "y", [0.0, 1.0])
    with pytest.raises(ValueError):
        density(0.5, "coloring", "y")
