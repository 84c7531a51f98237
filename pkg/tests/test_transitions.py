import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatfold.model import CreaseAssignmentWeights, OddVertexWeights, StaggeredModel, Staggering, random_model, symmetric_defect_weights
from flatfold.sixteen import SixteenVertexWeights
from flatfold.transitions import (
    corner_determinants,
    determinant_minimum,
    locate_critical,
    transition_residuals,
)

YC = math.sqrt(2) / 2
LENGTHS = {"miura": 8, "miura-symmetric": 4, "trapezoid": 4, "homogeneous": 4, "column-two": 4,
           "bipartite-two": 4, "four-unit": 4, "crease": 8, "sixteen": 4}


@pytest.mark.parametrize("cp,cond", [("miura", "miura-symmetric"), ("trapezoid", "trapezoid-symmetric"), ("trapezoid", None)])
def test_residual_vanishes_at_critical_point(cp, cond):
    r = transition_residuals(symmetric_defect_weights(cp, YC), cond)
    assert np.min(np.abs(r.residuals)) < 1e-14
    r = transition_residuals(symmetric_defect_weights(cp, 0.5), cond)
    assert np.min(np.abs(r.residuals)) > 0.1


def test_miura_general_set_vanishes_at_critical_point():
    r = transition_residuals(symmetric_defect_weights("miura", YC))
    assert len(r) == 8
    assert r.residuals[r.labels.index("2(-,-)")] == pytest.approx(0, abs=1e-14)


@pytest.mark.parametrize("name,stag", [("homogeneous", Staggering.HOMOGENEOUS), ("column-two", Staggering.COLUMN_TWO),
                                       ("bipartite-two", Staggering.BIPARTITE_TWO), ("four-unit", Staggering.COLUMN_FOUR)])
def test_square_set_lengths(name, stag, rng):
    r = transition_residuals(random_model("square", rng, stag))
    assert r.model == name and len(r) == LENGTHS[name]


@given(st.lists(st.floats(0.05, 3.0), min_size=8, max_size=8))
def test_homogeneous_positive_weights_never_critical(v):
    m = StaggeredModel.build("square", Staggering.HOMOGENEOUS, v=v)
    assert np.all(transition_residuals(m).residuals > 0)


@pytest.mark.parametrize("cp", ["miura", "trapezoid"])
def test_locate_symmetric_critical_point(cp):
    pts = locate_critical(lambda y: symmetric_defect_weights(cp, y), (0.1, 1.0))
    assert len(pts) == 1
    p = pts[0]
    assert abs(p.parameter - YC) <= 1e-9
    assert p.physical and p.parameter > 0 and abs(p.residual) <= 1e-12
    assert p.bracket[0] <= p.parameter <= p.bracket[1]


@pytest.mark.parametrize("cp", ["barreto", "kite"])
def test_no_transition(cp):
    assert locate_critical(lambda y: symmetric_defect_weights(cp, y), (0.01, 100)) == []


@pytest.mark.parametrize("cp", ["miura", "trapezoid"])
def test_determinant_vanishes_on_corner_at_critical_point(cp):
    m = symmetric_defect_weights(cp, YC)
    d = corner_determinants(m)
    assert min(d.values()) <= 1e-9 * max(d.values())
    assert determinant_minimum(m) <= 1e-9
    assert min(corner_determinants(symmetric_defect_weights(cp, 0.5)).values()) > 0.1


@given(st.integers(0, 10_000), st.floats(0.2, 5.0))
def test_residuals_are_homogeneous(seed, lam):
    rng = np.random.default_rng(seed)
    for cp, stag in [("miura", None), ("trapezoid", None), ("square", Staggering.COLUMN_FOUR), ("square", Staggering.HOMOGENEOUS)]:
        m = random_model(cp, rng, stag)
        scaled = StaggeredModel(m.cp, m.staggering, {k: OddVertexWeights(lam * w.v) for k, w in m.units.items()})
        r0, r1 = transition_residuals(m), transition_residuals(scaled)
        expect = r0.residuals * lam ** np.array(r0.degrees)
        assert np.allclose(r1.residuals, expect, rtol=1e-10, atol=1e-12 * np.max(np.abs(expect)))


@given(st.lists(st.floats(0.1, 3.0), min_size=16, max_size=16))
def test_crease_sufficient_condition(w):
    keys = ["a_m", "a_v", "b_m", "b_v", "c_m", "c_v", "d_m", "d_v", "e_m", "e_v", "f_m", "f_v", "g_m", "g_v", "h_m", "h_v"]
    g = dict(zip(keys, w))
    g.update(f_m=0.0, h_v=0.0, b_m=0.0, d_m=0.0)
    r = transition_residuals(g)
    assert len(r) == 8
    assert np.min(np.abs(r.residuals)) == 0.0


def test_crease_weights_object():
    r = transition_residuals(CreaseAssignmentWeights())
    assert r.model == "crease" and len(r) == 8


def test_sixteen_equal_omega_root():
    pts = locate_critical(lambda x: SixteenVertexWeights.equal_omega(1.0, x, 1.0, 1.0, 1.0), (0.5, 10.0))
    assert any(abs(p.parameter - 5.0) <= 1e-9 for p in pts)


def test_mismatch_errors(rng):
    with pytest.raises(ValueError):
        transition_residuals(random_model("miura", rng), "crease")
    with pytest.raises(ValueError):
        transition_residuals(CreaseAssignmentWeights(), "miura")
    with pytest.raises(TypeError):
        transition_residuals(3.0)
    with pytest.raises(ValueError):
        locate_critical(lambda y: symmetric_defect_weights("miura", y), (0.0, 1.0))
