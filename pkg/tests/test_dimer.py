import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatfold.dimer import (
    GaugeError,
    bond_to_vertex,
    finite_Z,
    finite_matrix,
    fourier_modes,
    momentum_determinant,
    momentum_matrix,
    thermo_free_energy,
    vertex_to_bond,
)
from flatfold.enumeration import enumerate_Z
from flatfold.model import CpKind, OddVertexWeights, Staggering, random_free_fermion, random_model, symmetric_defect_weights

FEASIBLE = [(2, 2), (2, 4), (4, 2)]


def test_bond_weights_all_ones():
    z = vertex_to_bond(OddVertexWeights(np.ones(8)))
    assert z.z == (1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0)


def test_bond_weights_miura():
    y = 0.5
    z = vertex_to_bond(symmetric_defect_weights("miura", y).units["v"])
    # z3 = (v7 - v4)/v2 and z4 = (v3 - v8)/v6 straight from the relations
    assert z.z[4:] == (0.0, 0.5, 0.5, 0.5)
    assert z[3] == pytest.approx(1.0) and z[4] == pytest.approx(-1.0)
    assert z[1] == pytest.approx((0 + y * y - 0) / (y * y))


@given(st.integers(0, 10_000))
def test_bond_round_trip(seed):
    w = random_free_fermion(np.random.default_rng(seed))
    z = vertex_to_bond(w, gauge="paper")
    assert np.allclose(bond_to_vertex(z.z), w.v, rtol=1e-12, atol=1e-14)


def test_auto_gauge_covers_masked_units():
    w = symmetric_defect_weights("miura", 0.5).units["w"]
    assert w[2] == 0
    with pytest.raises(GaugeError):
        vertex_to_bond(w, gauge="paper")
    z = vertex_to_bond(w)
    assert np.allclose(bond_to_vertex(z.z), w.v, atol=1e-14)


def test_lone_ground_state_has_no_cluster():
    w = symmetric_defect_weights("miura", 0.0).units["v"]
    with pytest.raises(GaugeError):
        vertex_to_bond(w)


def test_not_free_fermion_rejected():
    with pytest.raises(GaugeError):
        vertex_to_bond(OddVertexWeights([1, 1, 0, 0, 1, 1, 1, 1]))


@given(st.integers(0, 10_000), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_cluster_matrix_anti_hermitian(seed, t1, t2):
    # K(theta)^T = -K(-theta): antisymmetric at theta in {0, pi}^2, anti-Hermitian everywhere
    m = random_model("miura", np.random.default_rng(seed))
    K = momentum_matrix(m, t1, t2)
    assert K.shape == (20, 20)
    assert np.array_equal(K, -K.conj().T)
    assert np.array_equal(K.T, -momentum_matrix(m, -t1, -t2))


@given(st.integers(0, 10_000), st.sampled_from([(1, 1), (1, -1), (-1, 1), (-1, -1)]))
def test_torus_matrix_antisymmetric(seed, sector):
    m = random_model("square", np.random.default_rng(seed), Staggering.COLUMN_FOUR)
    K = finite_matrix(m, (2, 4), *sector)
    assert np.array_equal(K, -K.T)


@given(st.integers(0, 10_000), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_determinant_real_and_even(seed, t1, t2):
    m = random_model("square", np.random.default_rng(seed), Staggering.COLUMN_FOUR)
    d = momentum_determinant(m, t1, t2)
    d2 = momentum_determinant(m, -t1, -t2)
    assert abs(np.imag(d)) <= 1e-10 * abs(d)
    assert np.real(d) >= -1e-9 * abs(d)
    assert np.real(d) == pytest.approx(np.real(d2), rel=1e-10)


def test_barreto_determinant_constant():
    m = symmetric_defect_weights("barreto", 0.8)
    vals = [momentum_determinant(m, a, b) for a, b in np.random.default_rng(0).uniform(0, 6, (10, 2))]
    assert np.allclose(vals, vals[0], rtol=1e-12)


def test_miura_determinant_at_origin():
    y = 0.5
    m = symmetric_defect_weights("miura", y)
    y4 = y ** 4
    series = 1 + 4 * y4 + 16 * y4 * y4 + 4 * y4 * (1 + 1 - 1)
    # the four-unit determinant is the square of the symmetric series
    assert momentum_determinant(m, 0.0, 0.0).real == pytest.approx(series ** 2, rel=1e-12)


def test_thirteen_harmonics(rng):
    allowed = {(0, 0)} | {(a, b) for a in (-2, -1, 0, 1, 2) for b in (-2, -1, 0, 1, 2)}
    for _ in range(5):
        m = random_model("miura", rng)
        C = fourier_modes(m, tol=1e-12)
        assert set(C) <= allowed
        half = {k for k in C if k > (0, 0) or k == (0, 0)}
        assert len(half) <= 13
        for k, c in C.items():
            assert abs(c - np.conj(C[(-k[0], -k[1])])) <= 1e-10 * abs(C[(0, 0)])


@pytest.mark.parametrize("cp,stag", [
    ("miura", None), ("trapezoid", None), ("barreto", None), ("kite", None),
    ("square", Staggering.HOMOGENEOUS), ("square", Staggering.COLUMN_TWO),
    ("square", Staggering.BIPARTITE_TWO), ("square", Staggering.COLUMN_FOUR),
])
def test_finite_Z_matches_oracle(cp, stag, rng):
    for _ in range(3):
        m = random_model(cp, rng, stag)
        for shape in FEASIBLE:
            assert finite_Z(m, shape) == pytest.approx(enumerate_Z(m, shape).value, rel=1e-10)


@pytest.mark.parametrize("cp", ["miura", "trapezoid"])
def test_finite_Z_symmetric_family(cp):
    m = symmetric_defect_weights(cp, 0.5)
    for shape in FEASIBLE:
        assert finite_Z(m, shape) == pytest.approx(enumerate_Z(m, shape).value, rel=1e-10)


def test_barreto_finite_Z_closed_form():
    m = symmetric_defect_weights("barreto", 0.7)
    assert finite_Z(m, (2, 2)) == pytest.approx((1 + 0.7 ** 4) ** 2, rel=1e-12)


def test_momentum_method_matches_pfaffian(rng):
    m = random_model("miura", rng)
    for shape in [(2, 2), (2, 4), (4, 4), (4, 6)]:
        assert finite_Z(m, shape, method="momentum") == pytest.approx(finite_Z(m, shape), rel=1e-10)


def test_thermo_limits():
    assert thermo_free_energy(symmetric_defect_weights("miura", 1e-3)).value == pytest.approx(0, abs=1e-11)
    assert thermo_free_energy(symmetric_defect_weights("barreto", 1.0)).value == pytest.approx(0.5 * math.log(2), rel=1e-13)


def test_finite_size_trend():
    m = symmetric_defect_weights("miura", 0.5)
    f = thermo_free_energy(m).value
    gaps = [abs(math.log(finite_Z(m, (n, n), method="momentum")) / n ** 2 - f) for n in (4, 8, 16)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-6
