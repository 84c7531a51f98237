import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatfold.model import (
    CpKind,
    CreaseAssignmentWeights,
    CreaseState,
    OddVertexWeights,
    StaggeredModel,
    Staggering,
    VertexNeighborhood,
    apply_crease_weights,
    classify_vertex,
    free_fermion_residual,
    maekawa_ok,
    random_model,
    symmetric_defect_weights,
)

M, V = CreaseState.MOUNTAIN, CreaseState.VALLEY
ALL = [VertexNeighborhood(*s) for s in itertools.product((V, M), repeat=4)]


def test_classify_examples():
    assert classify_vertex(VertexNeighborhood(V, M, V, V)) == (1, "odd")
    assert classify_vertex(VertexNeighborhood(M, V, M, M)) == (2, "odd")
    assert classify_vertex(VertexNeighborhood(V, V, V, V)) == (1, "even")


def test_classify_is_bijection():
    labels = {classify_vertex(n) for n in ALL}
    assert len(labels) == 16
    assert labels == {(i, p) for i in range(1, 9) for p in ("odd", "even")}


def test_parity_matches_maekawa():
    for n in ALL:
        assert (classify_vertex(n).parity == "odd") == maekawa_ok(n)


def test_maekawa_examples():
    assert maekawa_ok(VertexNeighborhood(M, M, M, V))
    assert not maekawa_ok(VertexNeighborhood(M, M, V, V))
    assert not maekawa_ok(VertexNeighborhood(M, M, M, M))


def test_free_fermion_residual_examples():
    y = 0.3
    assert free_fermion_residual(OddVertexWeights([1, 2 * y * y, 0, 0, y, y, y, y])) == pytest.approx(0, abs=1e-15)
    assert free_fermion_residual(OddVertexWeights(np.ones(8))) == 0
    assert free_fermion_residual(OddVertexWeights([1, 1, 0, 0, 1, 1, 1, 1])) == -1


def test_negative_weights_rejected():
    with pytest.raises(ValueError):
        OddVertexWeights([1, -1, 0, 0, 0, 0, 0, 0])


def test_symmetric_miura_example():
    m = symmetric_defect_weights("miura", 0.5)
    assert list(m.units["v"]) == [1, 0.5, 0, 0, 0.5, 0.5, 0.5, 0.5]
    assert m.is_free_fermion()


def test_symmetric_barreto_unit_weights():
    m = symmetric_defect_weights("barreto", 1.0)
    for slot in ("v", "w", "t", "u"):
        w = m.unit(slot)
        for i in range(1, 9):
            assert w[i] == (0.0 if i in CpKind.BARRETO_MARS.forbidden(slot) else 1.0)


def test_symmetric_zero_limit_keeps_ground_state():
    for cp in ("miura", "trapezoid", "barreto", "kite"):
        m = symmetric_defect_weights(cp, 0.0)
        for name, label in CpKind.parse(cp).ground_state.items():
            w = m.units[name]
            assert w[label] == 1.0
            assert sum(w) == 1.0


def test_symmetric_rejects_negative():
    with pytest.raises(ValueError):
        symmetric_defect_weights("miura", -0.1)


def test_masks_match_catalogue():
    f = CpKind.MIURA.forbidden
    assert f("v") == f("t") == {3, 4} and f("w") == f("u") == {1, 2}
    f = CpKind.TRAPEZOID.forbidden
    assert f("v") == {3, 4} and f("w") == {1, 2}
    f = CpKind.KITE.forbidden
    assert f("v") == {3, 4, 5, 6} and f("w") == {1, 2, 7, 8}
    assert sum(len(CpKind.BARRETO_MARS.forbidden(s)) for s in "vwtu") == 16
    assert all(not CpKind.SIMPLE_SQUARE.forbidden(s) for s in "vwtu")


def test_masked_weight_must_vanish():
    with pytest.raises(ValueError):
        StaggeredModel.build("trapezoid", v=np.ones(8), w=[0, 0, 1, 1, 1, 1, 1, 1])


@given(st.fractions(min_value=Fraction(1, 100), max_value=10))
def test_symmetric_family_free_fermion_exact(y):
    # rational check of v1 v2 + v3 v4 = v5 v6 + v7 v8 for the printed family
    for cp, four in (("miura", 2), ("trapezoid", 2), ("barreto", 1), ("kite", 1)):
        m = symmetric_defect_weights(cp, float(y))
        for name, w in m.units.items():
            ground = CpKind.parse(cp).ground_state[name]
            vals = []
            for i in range(1, 9):
                if w[i] == 0:
                    vals.append(Fraction(0))
                    continue
                d = sum(a != b for a, b in zip(_cfg(i), _cfg(ground)))
                vals.append({0: Fraction(1), 2: y, 4: four * y * y}[d])
            assert np.allclose([float(x) for x in vals], list(w), rtol=1e-15)
            r = vals[0] * vals[1] + vals[2] * vals[3] - vals[4] * vals[5] - vals[6] * vals[7]
            assert r == 0


def _cfg(i):
    from flatfold.model import ODD_CONFIGS

    return ODD_CONFIGS[i]


def test_crease_weights_identity():
    m = random_model("square", np.random.default_rng(1), Staggering.COLUMN_FOUR)
    out = apply_crease_weights(m, CreaseAssignmentWeights())
    assert all(out.units[s] == m.units[s] for s in "vwtu")


def test_crease_weight_a_m_doubles_lower_mountains():
    m = symmetric_defect_weights("square", 1.0, Staggering.COLUMN_FOUR)
    out = apply_crease_weights(m, CreaseAssignmentWeights(a_m=2.0))
    assert [i for i in range(1, 9) if out.units["v"][i] == 2.0] == [1, 4, 6, 8]
    assert all(out.units[s] == m.units[s] for s in "wtu")


@given(st.integers(0, 10_000))
def test_crease_weights_preserve_free_fermion(seed):
    rng = np.random.default_rng(seed)
    m = random_model("square", rng, Staggering.COLUMN_FOUR)
    c = CreaseAssignmentWeights(*rng.uniform(0.2, 3.0, 16))
    out = apply_crease_weights(m, c)
    for s in "vwtu":
        assert out.units[s].is_free_fermion(1e-12)


def test_random_model_respects_masks(rng):
    for cp in CpKind:
        m = random_model(cp, rng)
        assert m.is_free_fermion()
        for slot in "vwtu":
            w = m.unit(slot)
            assert all(w[i] == 0 for i in cp.forbidden(slot))
            assert all(w[i] > 0 for i in range(1, 9) if i not in cp.forbidden(slot))
