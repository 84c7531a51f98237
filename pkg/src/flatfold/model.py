"""Crease states, vertex configurations, crease-pattern catalogue and weight sets.

A vertex of the square lattice sees four creases (up, down, left, right), each
either a mountain or a valley fold.  Neighborhoods with an odd number of
mountains satisfy Maekawa's condition and are labelled 1..8 in the odd
catalogue; the remaining eight carry the even labels 1..8.

Weight sets are attached to up to four sublattice classes arranged in a 2x2
unit cell::

    t u        (row 1)
    v w        (row 0)

with ``v`` at the origin.  Row indices grow upwards and column indices to the
right.  Two-unit and homogeneous staggerings are special cases of this layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import NamedTuple

import numpy as np


class CreaseState(IntEnum):
    VALLEY = 0
    MOUNTAIN = 1

    @property
    def line_style(self):
        return "solid" if self is CreaseState.MOUNTAIN else "dashed"


M_ = CreaseState.MOUNTAIN
V_ = CreaseState.VALLEY


class VertexNeighborhood(NamedTuple):
    up: CreaseState
    down: CreaseState
    left: CreaseState
    right: CreaseState

    @property
    def code(self):
        return neighborhood_code(self)

    @classmethod
    def from_code(cls, code):
        return cls(*(CreaseState((code >> s) & 1) for s in (3, 2, 1, 0)))


# (up, down, left, right), 1 = mountain
ODD_CONFIGS = {
    1: (0, 1, 0, 0),
    2: (1, 0, 1, 1),
    3: (1, 0, 0, 0),
    4: (0, 1, 1, 1),
    5: (0, 0, 0, 1),
    6: (1, 1, 1, 0),
    7: (0, 0, 1, 0),
    8: (1, 1, 0, 1),
}
EVEN_CONFIGS = {
    1: (0, 0, 0, 0),
    2: (1, 1, 1, 1),
    3: (1, 1, 0, 0),
    4: (0, 0, 1, 1),
    5: (0, 1, 0, 1),
    6: (1, 0, 1, 0),
    7: (0, 1, 1, 0),
    8: (1, 0, 0, 1),
}


def neighborhood_code(n):
    """4-bit code ``up<<3 | down<<2 | left<<1 | right`` of a neighborhood."""
    up, down, left, right = (int(x) for x in n)
    return (up << 3) | (down << 2) | (left << 1) | right


def _code_table(configs):
    table = np.zeros(16, dtype=np.int64)
    for idx, bits in configs.items():
        table[neighborhood_code(bits)] = idx
    return table


#: odd label (1..8) of each 4-bit code, 0 for even codes
ODD_INDEX_BY_CODE = _code_table(ODD_CONFIGS)
#: even label (1..8) of each 4-bit code, 0 for odd codes
EVEN_INDEX_BY_CODE = _code_table(EVEN_CONFIGS)
ODD_CODES = np.array([neighborhood_code(ODD_CONFIGS[i]) for i in range(1, 9)])
EVEN_CODES = np.array([neighborhood_code(EVEN_CONFIGS[i]) for i in range(1, 9)])


class VertexClass(NamedTuple):
    index: int
    parity: str  # "odd" or "even"


def classify_vertex(n):
    """Label of a neighborhood in the odd or even catalogue.

    The map is a bijection between the 16 neighborhoods and the pairs
    ``(index, parity)``.
    """
    code = neighborhood_code(n)
    if ODD_INDEX_BY_CODE[code]:
        return VertexClass(int(ODD_INDEX_BY_CODE[code]), "odd")
    return VertexClass(int(EVEN_INDEX_BY_CODE[code]), "even")


def maekawa_ok(n):
    """True iff mountains and valleys differ by exactly two."""
    mountains = sum(int(x) for x in n)
    return abs(2 * mountains - 4) == 2


def hamming(i, j, configs=ODD_CONFIGS):
    """Number of creases that differ between two labelled configurations."""
    return sum(a != b for a, b in zip(configs[i], configs[j]))


def _as_weights(values, name, signed=False):
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.shape != (8,):
        raise ValueError(f"{name} needs exactly 8 weights, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} weights must be finite")
    if not signed and np.any(arr < 0):
        raise ValueError(f"{name} weights must be non-negative")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OddVertexWeights:
    """Weights v_1..v_8 of one sublattice class; ``w[i]`` is 1-based.

    Weights must be non-negative unless ``signed=True``, which is reserved for
    algebraic images such as weak-graph transforms.
    """

    v: np.ndarray

    def __init__(self, values, signed=False):
        object.__setattr__(self, "v", _as_weights(values, "odd vertex", signed))

    def __getitem__(self, i):
        if not 1 <= i <= 8:
            raise IndexError("weights are indexed 1..8")
        return float(self.v[i - 1])

    def __iter__(self):
        return iter(float(x) for x in self.v)

    def __eq__(self, other):
        return isinstance(other, OddVertexWeights) and np.array_equal(self.v, other.v)

    def __hash__(self):
        return hash(self.v.tobytes())

    def __repr__(self):
        return f"OddVertexWeights({[float(x) for x in self.v]})"

    def padded(self):
        """Length-9 array with a dummy slot 0 so that ``a[i]`` is v_i."""
        return np.concatenate([[0.0], self.v])

    def scaled(self, factors):
        f = np.asarray(factors, dtype=float)
        return OddVertexWeights(self.v * f, signed=bool(np.any(self.v * f < 0)))

    def residual(self):
        return free_fermion_residual(self)

    def is_free_fermion(self, rtol=1e-12):
        v = np.abs(self.v)
        scale = max(v[0] * v[1] + v[2] * v[3], v[4] * v[5] + v[6] * v[7], np.finfo(float).tiny)
        return abs(free_fermion_residual(self)) <= rtol * scale


@dataclass(frozen=True)
class EvenVertexWeights:
    """Weights of the even catalogue, 1-based like :class:`OddVertexWeights`."""

    w: np.ndarray

    def __init__(self, values, signed=False):
        object.__setattr__(self, "w", _as_weights(values, "even vertex", signed))

    def __getitem__(self, i):
        if not 1 <= i <= 8:
            raise IndexError("weights are indexed 1..8")
        return float(self.w[i - 1])

    def __eq__(self, other):
        return isinstance(other, EvenVertexWeights) and np.array_equal(self.w, other.w)

    def __hash__(self):
        return hash(self.w.tobytes())

    def padded(self):
        return np.concatenate([[0.0], self.w])


def free_fermion_residual(w):
    """v1*v2 + v3*v4 - v5*v6 - v7*v8."""
    v = w.v if isinstance(w, OddVertexWeights) else np.asarray(w, dtype=float)
    return float(v[0] * v[1] + v[2] * v[3] - v[4] * v[5] - v[6] * v[7])


class Staggering(Enum):
    HOMOGENEOUS = "homogeneous"
    COLUMN_TWO = "column-two"
    BIPARTITE_TWO = "bipartite-two"
    COLUMN_FOUR = "column-four"

    @property
    def unit_names(self):
        """Distinct weight sets carried by the staggering."""
        return _STAGGER_NAMES[self]

    @property
    def layout(self):
        """Unit name at sublattice slots (v, w, t, u) of the 2x2 cell."""
        return _STAGGER_LAYOUT[self]

    def check_shape(self, M, N):
        if M < 1 or N < 1:
            raise ValueError("lattice dimensions must be positive")
        if self is Staggering.COLUMN_TWO and N % 2:
            raise ValueError("column-two staggering needs an even number of columns")
        if self in (Staggering.BIPARTITE_TWO, Staggering.COLUMN_FOUR) and (M % 2 or N % 2):
            raise ValueError(f"{self.value} staggering needs even M and N")


_STAGGER_NAMES = {
    Staggering.HOMOGENEOUS: ("v",),
    Staggering.COLUMN_TWO: ("v", "w"),
    Staggering.BIPARTITE_TWO: ("v", "w"),
    Staggering.COLUMN_FOUR: ("v", "w", "t", "u"),
}
_STAGGER_LAYOUT = {
    Staggering.HOMOGENEOUS: ("v", "v", "v", "v"),
    Staggering.COLUMN_TWO: ("v", "w", "v", "w"),
    Staggering.BIPARTITE_TWO: ("v", "w", "w", "v"),
    Staggering.COLUMN_FOUR: ("v", "w", "t", "u"),
}
SLOTS = ("v", "w", "t", "u")


def sublattice(r, c):
    """Slot index 0..3 (v, w, t, u) of vertex (r, c)."""
    return 2 * (r % 2) + (c % 2)


class CpKind(Enum):
    """Crease-pattern kinds with their allowed-weight masks."""

    MIURA = "miura"
    TRAPEZOID = "trapezoid"
    BARRETO_MARS = "barreto"
    KITE = "kite"
    SIMPLE_SQUARE = "square"

    @property
    def default_staggering(self):
        return _CP_STAGGER[self]

    def forbidden(self, slot):
        """Set of disallowed indices at a slot (v, w, t, u) of the 2x2 cell."""
        return _CP_FORBIDDEN[self].get(slot, frozenset())

    def allowed_mask(self, slot):
        bad = self.forbidden(slot)
        return np.array([i not in bad for i in range(1, 9)])

    @property
    def ground_state(self):
        """Ground-state label per unit name, or None for the simple square."""
        return _CP_GROUND.get(self)

    @classmethod
    def parse(cls, name):
        key = str(name).strip().lower().replace("_", "-")
        aliases = {"barreto-mars": "barreto", "mars": "barreto", "simple-square": "square", "simplesquare": "square"}
        key = aliases.get(key, key)
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown crease pattern {name!r}")


_CP_STAGGER = {
    CpKind.MIURA: Staggering.COLUMN_FOUR,
    CpKind.TRAPEZOID: Staggering.BIPARTITE_TWO,
    CpKind.BARRETO_MARS: Staggering.COLUMN_FOUR,
    CpKind.KITE: Staggering.BIPARTITE_TWO,
    CpKind.SIMPLE_SQUARE: Staggering.HOMOGENEOUS,
}
_CP_FORBIDDEN = {
    CpKind.MIURA: {"v": frozenset({3, 4}), "t": frozenset({3, 4}), "w": frozenset({1, 2}), "u": frozenset({1, 2})},
    # bipartite two-unit patterns: slot t carries the w unit, slot u the v unit
    CpKind.TRAPEZOID: {"v": frozenset({3, 4}), "w": frozenset({1, 2}), "t": frozenset({1, 2}), "u": frozenset({3, 4})},
    CpKind.BARRETO_MARS: {
        "t": frozenset({3, 4, 7, 8}),
        "u": frozenset({1, 2, 7, 8}),
        "v": frozenset({3, 4, 5, 6}),
        "w": frozenset({1, 2, 5, 6}),
    },
    CpKind.KITE: {
        "v": frozenset({3, 4, 5, 6}),
        "w": frozenset({1, 2, 7, 8}),
        "t": frozenset({1, 2, 7, 8}),
        "u": frozenset({3, 4, 5, 6}),
    },
    CpKind.SIMPLE_SQUARE: {},
}
_CP_GROUND = {
    CpKind.MIURA: {"v": 1, "w": 3, "t": 2, "u": 4},
    CpKind.TRAPEZOID: {"v": 1, "w": 3},
    CpKind.BARRETO_MARS: {"v": 1, "w": 3, "t": 2, "u": 4},
    CpKind.KITE: {"v": 8, "w": 6},
}


@dataclass(frozen=True)
class StaggeredModel:
    """A crease-pattern kind plus its weight sets.

    ``units`` maps the names required by ``staggering`` (see
    :attr:`Staggering.unit_names`) to :class:`OddVertexWeights`.
    """

    cp: CpKind
    staggering: Staggering
    units: dict = field(default_factory=dict)

    def __post_init__(self):
        need = set(self.staggering.unit_names)
        have = set(self.units)
        if need != have:
            raise ValueError(f"{self.staggering.value} staggering needs units {sorted(need)}, got {sorted(have)}")
        for name, w in self.units.items():
            if not isinstance(w, OddVertexWeights):
                self.units[name] = w = OddVertexWeights(w)
        for slot, name in zip(SLOTS, self.staggering.layout):
            bad = self.cp.forbidden(slot)
            w = self.units[name]
            hit = [i for i in sorted(bad) if w[i] != 0.0]
            if hit:
                raise ValueError(f"{self.cp.value}: weights {[slot + str(i) for i in hit]} must vanish")

    @classmethod
    def build(cls, cp, staggering=None, **units):
        cp = cp if isinstance(cp, CpKind) else CpKind.parse(cp)
        staggering = staggering or cp.default_staggering
        return cls(cp, staggering, {k: OddVertexWeights(v) for k, v in units.items()})

    def unit(self, slot):
        """Weights in slot ``v``, ``w``, ``t`` or ``u`` of the 2x2 cell."""
        return self.units[self.staggering.layout[SLOTS.index(slot)]]

    def four_units(self):
        """Weights (v, w, t, u) of the equivalent four-unit model."""
        return tuple(self.unit(s) for s in SLOTS)

    def weights_at(self, r, c):
        return self.unit(SLOTS[sublattice(r, c)])

    def as_four_unit(self):
        v, w, t, u = self.four_units()
        return StaggeredModel(self.cp, Staggering.COLUMN_FOUR, {"v": v, "w": w, "t": t, "u": u})

    def is_free_fermion(self, rtol=1e-12):
        return all(w.is_free_fermion(rtol) for w in self.units.values())

    def check_free_fermion(self, rtol=1e-12):
        for name, w in self.units.items():
            if not w.is_free_fermion(rtol):
                raise ValueError(f"unit {name} violates the free-fermion condition (residual {w.residual():.3e})")

    def tables(self):
        """Per-slot lookup tables indexed by 4-bit neighborhood code.

        Returns ``(weights, allowed)``, both shaped (4, 16).  ``allowed`` marks
        Maekawa neighborhoods whose label is not masked out for the pattern.
        """
        lut = np.zeros((4, 16))
        allowed = np.zeros((4, 16), dtype=bool)
        for s, slot in enumerate(SLOTS):
            w = self.unit(slot)
            bad = self.cp.forbidden(slot)
            for i in range(1, 9):
                code = ODD_CODES[i - 1]
                lut[s, code] = w[i]
                allowed[s, code] = i not in bad
        return lut, allowed


@dataclass(frozen=True)
class CreaseAssignmentWeights:
    """Per-crease factors: a, b (v), c, d (w), e, f (t), g, h (u).

    The first letter of each pair multiplies according to the state of the
    crease below the vertex, the second according to the crease on its right.
    """

    a_m: float = 1.0
    a_v: float = 1.0
    b_m: float = 1.0
    b_v: float = 1.0
    c_m: float = 1.0
    c_v: float = 1.0
    d_m: float = 1.0
    d_v: float = 1.0
    e_m: float = 1.0
    e_v: float = 1.0
    f_m: float = 1.0
    f_v: float = 1.0
    g_m: float = 1.0
    g_v: float = 1.0
    h_m: float = 1.0
    h_v: float = 1.0

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if not getattr(self, name) > 0:
                raise ValueError(f"crease weight {name} must be positive")

    def pair(self, letter):
        return getattr(self, letter + "_m"), getattr(self, letter + "_v")


_CREASE_LETTERS = {"v": ("a", "b"), "w": ("c", "d"), "t": ("e", "f"), "u": ("g", "h")}


def crease_factors(c, slot):
    """Multipliers for labels 1..8 of a slot from its lower and right creases."""
    lower, right = _CREASE_LETTERS[slot]
    lm, lv = c.pair(lower)
    rm, rv = c.pair(right)
    out = np.empty(8)
    for i in range(1, 9):
        _, down, _, r = ODD_CONFIGS[i]
        out[i - 1] = (lm if down else lv) * (rm if r else rv)
    return out


def apply_crease_weights(m, c):
    """Multiply every weight by the factors of its lower and right creases."""
    v, w, t, u = m.four_units()
    units = {s: x.scaled(crease_factors(c, s)) for s, x in zip(SLOTS, (v, w, t, u))}
    return StaggeredModel(m.cp, Staggering.COLUMN_FOUR, units)


@dataclass(frozen=True)
class DefectFugacity:
    """Per-crease fugacity y and the face-flip fugacity z = y**4."""

    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError("fugacity must be positive")

    @property
    def z(self):
        return self.y ** 4

    @classmethod
    def from_z(cls, z):
        if not z > 0:
            raise ValueError("fugacity must be positive")
        return cls(z ** 0.25)


def _symmetric_unit(ground, y, bad, four_factor):
    vals = np.zeros(8)
    for i in range(1, 9):
        if i in bad:
            continue
        d = hamming(i, ground)
        vals[i - 1] = {0: 1.0, 2: y, 4: four_factor * y * y}[d]
    return OddVertexWeights(vals)


def symmetric_defect_weights(cp, y, staggering=None, reference=None):
    """One-parameter defect family: each reversed crease costs a factor y.

    A vertex whose four creases are all reversed relative to the ground state
    carries ``2 y**2`` for Miura and trapezoid (forced by the free-fermion
    condition) and ``y**2`` otherwise.  For the simple square ``reference``
    gives the label taken as defect-free per unit name (default: label 1 for
    every unit).  ``y = 0`` is accepted as the defect-free limit.
    """
    cp = cp if isinstance(cp, CpKind) else CpKind.parse(cp)
    y = float(y)
    if not (np.isfinite(y) and y >= 0):
        raise ValueError("fugacity y must be positive")
    stag = staggering or cp.default_staggering
    four = 2.0 if cp in (CpKind.MIURA, CpKind.TRAPEZOID) else 1.0
    ground = cp.ground_state
    if ground is None:
        ground = reference or {n: 1 for n in stag.unit_names}
    elif stag is not cp.default_staggering:
        raise ValueError(f"{cp.value} is defined with {cp.default_staggering.value} staggering")
    units = {}
    for name in stag.unit_names:
        slot = SLOTS[stag.layout.index(name)]
        units[name] = _symmetric_unit(ground[name], y, cp.forbidden(slot), four)
    return StaggeredModel(cp, stag, units)


_PARTNER = {1: 2, 2: 1, 3: 4, 4: 3, 5: 6, 6: 5, 7: 8, 8: 7}


def random_free_fermion(rng, forbidden=(), low=0.3, high=1.4):
    """Random positive free-fermion weights vanishing on ``forbidden``.

    All allowed weights are drawn uniformly from [low, high); one of them is
    then solved from the free-fermion condition, retrying until it is positive.
    """
    forbidden = set(forbidden)
    for _ in range(1000):
        x = np.zeros(9)
        for i in range(1, 9):
            if i not in forbidden:
                x[i] = rng.uniform(low, high)
        for k in (8, 7, 6, 5, 2, 1, 4, 3):
            p = _PARTNER[k]
            if k in forbidden or p in forbidden:
                continue
            x[k] = 0.0
            r = x[1] * x[2] + x[3] * x[4] - x[5] * x[6] - x[7] * x[8]
            x[k] = r / x[p] if k >= 5 else -r / x[p]
            break
        else:
            raise ValueError("no free pair left to satisfy the free-fermion condition")
        if x[k] > 0:
            return OddVertexWeights(x[1:])
    raise RuntimeError("could not draw positive free-fermion weights")


def random_model(cp, rng, staggering=None, low=0.3, high=1.4):
    """StaggeredModel with independent random free-fermion units."""
    cp = cp if isinstance(cp, CpKind) else CpKind.parse(cp)
    stag = staggering or cp.default_staggering
    units = {}
    for name in stag.unit_names:
        slot = SLOTS[stag.layout.index(name)]
        units[name] = random_free_fermion(rng, cp.forbidden(slot), low, high)
    return StaggeredModel(cp, stag, units)
