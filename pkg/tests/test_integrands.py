import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatfold.dimer import thermo_free_energy
from flatfold.enumeration import enumerate_Z
from flatfold.integrands import (
    FourierIntegrand,
    HOMOGENEOUS_HARMONICS,
    barreto_argument,
    barreto_free_energy,
    bipartite_two_integrand,
    column_two_integrand,
    compare_with_determinant,
    evaluate_free_energy,
    free_energy_of,
    homogeneous_integrand,
    kite_integrand,
    kite_row_Z,
    kite_spectrum,
    kite_transfer_matrix,
    kite_Z,
    miura_integrand,
    miura_symmetric_integrand,
    square_integrands,
    trapezoid_integrand,
    trapezoid_symmetric_integrand,
)
from flatfold.model import OddVertexWeights, Staggering, random_free_fermion, random_model, symmetric_defect_weights

KITE_ONES = ([1, 1, 0, 0, 0, 0, 1, 1], [0, 0, 1, 1, 1, 1, 0, 0])


def _fe(f):
    return evaluate_free_energy(f).value


def test_miura_symmetric_is_exact_square():
    y = 0.5
    v, w, t, u = symmetric_defect_weights("miura", y).four_units()
    f, g = miura_integrand(t, u, v, w), miura_symmetric_integrand(y)
    th = np.random.default_rng(0).uniform(0, 2 * np.pi, (2, 20))
    assert np.allclose(f.series(*th), g.series(*th) ** 2, rtol=1e-13)
    assert _fe(f) == pytest.approx(_fe(g), rel=1e-12)


def test_symmetric_series_printed_form():
    y = 0.7
    g = miura_symmetric_integrand(y)
    t1, t2 = 0.4, 1.3
    y4 = y ** 4
    printed = 1 + 4 * y4 + 16 * y4 ** 2 + 4 * y4 * (math.cos(t1) + math.cos(t2) - math.cos(t1) * math.cos(t2))
    assert g.series(t1, t2) == pytest.approx(printed, rel=1e-14)
    h = trapezoid_symmetric_integrand(y)
    printed = 1 + 4 * y4 + 2 * y * y * (math.cos(t2) - math.cos(t1 + t2))
    assert h.series(t1, t2) == pytest.approx(printed, rel=1e-14)


@pytest.mark.parametrize("cp", ["miura", "trapezoid"])
def test_zero_fugacity_constant(cp):
    m = symmetric_defect_weights(cp, 0.0)
    f = free_energy_of(m)
    assert f.value == 0.0


def test_trapezoid_nonzero_letters():
    f = trapezoid_integrand(random_free_fermion(np.random.default_rng(0), (3, 4)), random_free_fermion(np.random.default_rng(1), (1, 2)))
    assert set(f.coefficients) == set("ABCDGJL")


def test_constant_integrand():
    f = FourierIntegrand("c", {"A": 3.0}, HOMOGENEOUS_HARMONICS, 16)
    assert _fe(f) == pytest.approx(f.prefactor * (2 * math.pi) ** 2 * math.log(3.0), rel=1e-14)


@pytest.mark.parametrize("y", [0.2, 0.5, 0.9, 1.3])
def test_miura_equals_trapezoid(y):
    a = free_energy_of(symmetric_defect_weights("miura", y)).value
    b = free_energy_of(symmetric_defect_weights("trapezoid", y)).value
    assert a == pytest.approx(b, rel=1e-10)


def test_miura_closed_form_matches_dimer():
    m = symmetric_defect_weights("miura", 0.3)
    assert free_energy_of(m).value == pytest.approx(thermo_free_energy(m).value, rel=1e-10)


@pytest.mark.parametrize("cp,table,stag", [
    ("miura", "miura", None), ("trapezoid", "trapezoid", None), ("barreto", "barreto", None), ("kite", "kite", None),
    ("square", "column-two", Staggering.COLUMN_TWO), ("square", "bipartite-two", Staggering.BIPARTITE_TWO),
    ("square", "homogeneous", Staggering.HOMOGENEOUS),
])
def test_printed_tables_match_determinant(cp, table, stag, rng):
    for _ in range(5):
        m = random_model(cp, rng, stag)
        v, w, t, u = m.four_units()
        f = {
            "miura": lambda: miura_integrand(t, u, v, w),
            "trapezoid": lambda: trapezoid_integrand(v, w),
            "barreto": lambda: FourierIntegrand("barreto", {"A": barreto_argument(t, u, v, w)}, HOMOGENEOUS_HARMONICS, 32),
            "kite": lambda: kite_integrand(v, w),
            "column-two": lambda: column_two_integrand(v, w),
            "bipartite-two": lambda: bipartite_two_integrand(v, w),
            "homogeneous": lambda: homogeneous_integrand(v),
        }[table]()
        err, scale = compare_with_determinant(f, m, table=table)
        assert err <= 1e-9 * scale


def test_barreto_examples():
    for y in (1.0, 0.6):
        v, w, t, u = symmetric_defect_weights("barreto", y).four_units()
        assert barreto_free_energy(t, u, v, w) == pytest.approx(0.5 * math.log1p(y ** 4), rel=1e-14)
    v, w, t, u = symmetric_defect_weights("barreto", 0.0).four_units()
    assert barreto_free_energy(t, u, v, w) == 0.0


@given(st.floats(0.01, 10), st.floats(0.01, 10))
def test_barreto_increasing(y1, y2):
    if y1 == y2:
        return
    lo, hi = sorted((y1, y2))
    f = lambda y: barreto_free_energy(*_tuvw(symmetric_defect_weights("barreto", y)))
    assert f(lo) < f(hi)


def _tuvw(m):
    v, w, t, u = m.four_units()
    return t, u, v, w


def test_kite_spectrum_examples():
    sp = kite_spectrum(*KITE_ONES)
    assert (sp.discriminant, sp.lambda_plus, sp.lambda_minus) == (16.0, 4.0, 0.0)
    sp = kite_spectrum([2.5, 0, 0, 0, 0, 0, 0, 0], [0, 0, 1.5, 0, 0, 0, 0, 0])
    assert sp.lambda_plus == pytest.approx(3.75) and sp.lambda_minus == 0.0
    assert kite_row_Z(*KITE_ONES, 3) == 64.0
    assert kite_row_Z(*KITE_ONES, 1) == pytest.approx(np.trace(kite_transfer_matrix(*KITE_ONES)))


@given(st.integers(0, 10_000))
def test_kite_spectrum_matches_transfer_matrix(seed):
    m = random_model("kite", np.random.default_rng(seed))
    v, w = m.units["v"], m.units["w"]
    T = kite_transfer_matrix(v, w)
    sp = kite_spectrum(v, w)
    assert sp.discriminant >= 0
    # the zero eigenvalues sit in a nilpotent block, so compare traces of powers
    P = np.eye(len(T))
    for n in range(1, 6):
        P = P @ T
        assert np.trace(P) == pytest.approx(sp.lambda_plus ** n + sp.lambda_minus ** n, rel=1e-12)


@pytest.mark.parametrize("shape", [(2, 2), (2, 4), (4, 2), (4, 4), (2, 6), (6, 2), (2, 8)])
def test_kite_Z_matches_oracle(shape, rng):
    m = random_model("kite", rng)
    assert kite_Z(m.units["v"], m.units["w"], shape) == pytest.approx(enumerate_Z(m, shape).value, rel=1e-12)


def test_kite_literal_rule_only_when_columns_divide_rows(rng):
    m = random_model("kite", rng)
    v, w = m.units["v"], m.units["w"]
    assert kite_Z(v, w, (4, 2), rule="literal") == pytest.approx(kite_Z(v, w, (4, 2)), rel=1e-12)
    assert kite_Z(v, w, (2, 4), rule="literal") != pytest.approx(enumerate_Z(m, (2, 4)).value, rel=1e-6)


def test_homogeneous_unit_weights():
    a = OddVertexWeights(np.ones(8))
    f = homogeneous_integrand(a)
    assert {k: c for k, c in f.coefficients.items() if k != "A"} == {"B": 0, "C": 0, "D": 0, "E": 0}
    assert _fe(f) == pytest.approx(math.log(2), rel=1e-14)
    assert _fe(homogeneous_integrand(a, corrected=False)) == pytest.approx(0.5 * math.log(8), rel=1e-14)


def test_column_two_reduces_to_homogeneous(rng):
    a = random_free_fermion(rng)
    assert _fe(column_two_integrand(a, a)) == pytest.approx(_fe(homogeneous_integrand(a)), rel=1e-12)


def test_bipartite_two_with_trapezoid_masks(rng):
    m = random_model("trapezoid", rng)
    v, w = m.units["v"], m.units["w"]
    assert _fe(square_integrands("bipartite-two", v, w)) == pytest.approx(_fe(trapezoid_integrand(v, w)), rel=1e-12)


def test_square_integrands_dispatch(rng):
    a = random_free_fermion(rng)
    assert square_integrands("homogeneous", a).name == "homogeneous"
    assert square_integrands(Staggering.COLUMN_TWO, a, a).name == "column-two"
    with pytest.raises(ValueError):
        square_integrands("column-two", a)


@given(st.integers(0, 10_000))
def test_integrands_positive(seed):
    rng = np.random.default_rng(seed)
    m = random_model("miura", rng)
    v, w, t, u = m.four_units()
    f = miura_integrand(t, u, v, w)
    g = np.linspace(0, 2 * np.pi, 33)
    T1, T2 = np.meshgrid(g, g)
    assert np.min(f.series(T1, T2)) > 0
