import math

import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given
from hypothesis import strategies as st

from flatfold.enumeration import (
    BudgetExceeded,
    LatticeShape,
    admissible_masks,
    count_flat_foldable,
    edges_to_mask,
    enumerate_density,
    enumerate_tables,
    enumerate_Z,
    enumerate_Z_exact,
    homogeneous_model,
    mask_to_edges,
    neighborhood_codes,
)
from flatfold.model import ODD_INDEX_BY_CODE, SLOTS, CpKind, OddVertexWeights, StaggeredModel, hamming, random_model, sublattice, symmetric_defect_weights

ENGINES = ("numba", "numpy")


def test_square_all_ones_count():
    ex = enumerate_Z(homogeneous_model(np.ones(8)), (2, 2))
    assert ex.config_count == 32 and ex.value == 32.0


@pytest.mark.parametrize("cp", ["miura", "trapezoid", "barreto", "kite"])
@pytest.mark.parametrize("shape", [(2, 2), (2, 4), (4, 4)])
def test_ground_state_only_at_zero(cp, shape):
    ex = enumerate_Z(symmetric_defect_weights(cp, 0.0), shape)
    assert ex.value == 1.0


def test_frozen_counts():
    # oracle values, computed once by exhaustive enumeration
    expected = {
        "miura": (18, 114, 2970),
        "trapezoid": (18, 114, 2970),
        "barreto": (4, 16, 256),
        "kite": (4, 4, 16),
    }
    for cp, counts in expected.items():
        assert tuple(count_flat_foldable(cp, s) for s in [(2, 2), (2, 4), (4, 4)]) == counts


def test_frozen_miura_2x4():
    m = symmetric_defect_weights("miura", 0.5)
    ex = enumerate_Z(m, (2, 4))
    assert ex.value == 2.56640625 and ex.config_count == 114
    assert enumerate_Z_exact(m, (2, 4)) == (Fraction(657, 256), 114)
    assert enumerate_density(m, (2, 4)) == pytest.approx(0.42922374429223742, rel=1e-14)


@pytest.mark.parametrize("y", [0.3, 0.7, 1.0])
def test_barreto_lattice_gas(y):
    ex = enumerate_Z(symmetric_defect_weights("barreto", y), (4, 4))
    assert ex.config_count == 2 ** 8
    assert ex.value == pytest.approx((1 + y ** 4) ** 8, rel=1e-13)


def test_barreto_density_at_one():
    m = symmetric_defect_weights("barreto", 1.0)
    for shape in [(2, 4), (4, 4)]:
        assert enumerate_density(m, shape) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("engine", ENGINES)
def test_engines_agree(engine, rng):
    m = random_model("miura", rng)
    ref = enumerate_Z(m, (2, 4), engine="numba")
    got = enumerate_Z(m, (2, 4), engine=engine)
    assert got.config_count == ref.config_count
    assert got.value == pytest.approx(ref.value, rel=1e-13)


@pytest.mark.parametrize("chunk_bits", [0, 3, 6])
def test_chunking_is_deterministic(chunk_bits, rng):
    m = random_model("square", rng)
    ref = enumerate_Z(m, (2, 3))
    got = enumerate_Z(m, (2, 3), chunk_bits=chunk_bits)
    assert got.config_count == ref.config_count
    assert got.value == pytest.approx(ref.value, rel=1e-14)


def test_budget_enforced():
    with pytest.raises(BudgetExceeded):
        enumerate_Z(homogeneous_model(np.ones(8)), (4, 5))


def test_shape_checked():
    with pytest.raises(ValueError):
        enumerate_Z(symmetric_defect_weights("miura", 0.5), (3, 4))


@pytest.mark.parametrize("cp", list(CpKind))
def test_configurations_use_unmasked_labels(cp):
    m = symmetric_defect_weights(cp, 1.0)
    shape = LatticeShape(2, 4)
    _, allowed = m.tables()
    for mask in admissible_masks(allowed, shape):
        codes = neighborhood_codes(int(mask), shape)
        for r in range(shape.M):
            for c in range(shape.N):
                label = ODD_INDEX_BY_CODE[codes[r, c]]
                assert label > 0
                assert label not in cp.forbidden(SLOTS[sublattice(r, c)])


@given(st.integers(0, 2 ** 16 - 1))
def test_mask_round_trip(mask):
    shape = LatticeShape(2, 4)
    assert edges_to_mask(mask_to_edges(mask, shape)) == mask


@given(st.floats(0.2, 2.0))
def test_density_is_log_derivative(y):
    h = 1e-5
    shape = (2, 4)
    lz = lambda x: math.log(enumerate_Z(symmetric_defect_weights("miura", x), shape).value)
    fd = y * (lz(y + h) - lz(y - h)) / (2 * h) / 8
    rho = enumerate_density(symmetric_defect_weights("miura", y), shape)
    assert fd == pytest.approx(rho, rel=1e-8, abs=1e-9)


@given(st.integers(0, 10_000))
def test_translation_invariance(seed):
    rng = np.random.default_rng(seed)
    m = random_model("miura", rng)
    lut, allowed = m.tables()
    z0, _, _ = enumerate_tables(2, 4, lut, allowed)
    # shifting the weight pattern by one row or one column permutes the slot tables
    z1, _, _ = enumerate_tables(2, 4, lut[[2, 3, 0, 1]], allowed[[2, 3, 0, 1]])
    z2, _, _ = enumerate_tables(2, 4, lut[[1, 0, 3, 2]], allowed[[1, 0, 3, 2]])
    assert z1 == pytest.approx(z0, rel=1e-12)
    assert z2 == pytest.approx(z0, rel=1e-12)


def _rescaled(cp, y, ground_w, four_w):
    m = symmetric_defect_weights(cp, y)
    units = {}
    for name, w in m.units.items():
        g = m.cp.ground_state[name]
        vals = w.padded()
        for i in range(1, 9):
            d = hamming(i, g)
            if d == 0:
                vals[i] = ground_w
            elif d == 4 and vals[i] != 0:
                vals[i] = four_w * y * y
        units[name] = OddVertexWeights(vals[1:])
    return StaggeredModel(m.cp, m.staggering, units)


@pytest.mark.parametrize("cp", ["miura", "trapezoid"])
@pytest.mark.parametrize("shape", [(2, 2), (2, 4)])
def test_global_reversal_duality(cp, shape):
    # each configuration weighs y^(reversed creases) 2^(fully reversed vertices);
    # global reversal swaps reversed with unreversed creases and the 2 moves to
    # the vertices left untouched
    y = 0.6
    lhs = enumerate_Z(symmetric_defect_weights(cp, y), shape).value
    rhs = enumerate_Z(_rescaled(cp, 1 / y, 2.0, 1.0), shape).value
    assert lhs == pytest.approx(y ** (2 * shape[0] * shape[1]) * rhs, rel=1e-12)
