"""Face three-colourings of Miura-ori and trapezoid crease configurations.

Face F(r, c) of an M x N torus has vertex (r, c) as its lower-left corner:
its left side is the up crease u(r, c) and its lower side the right crease
h(r, c).  Crossing a crease along its arrow raises the colour by one (mod 3)
at a valley and lowers it at a mountain.  The arrows are fixed once per
crease class of the 2 x 2 cell by requiring the ground state to map to the
checkerboard with F(0, 0) = 0 and its right neighbour 1.

Around a vertex the four colour steps are +-1 and must add up to zero, so a
vertex is mapped exactly when two steps are +1 and two are -1.  For Miura-ori
and trapezoid these are precisely the six admissible neighbourhoods, which
gives the 3-to-1 correspondence between flat-foldable configurations and
proper colourings.  On a torus the steps must also add up to a multiple of 3
around the two non-contractible loops; configurations that fail this are
locally flat-foldable but have no colouring and are reported separately.

For the kite the same construction maps every configuration injectively but
reaches only colourings whose defect lines shift whole bands of faces.
Barreto's Mars only has its ground state mapped.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _accel
from ._accel import njit
from .enumeration import BudgetExceeded, LatticeShape, admissible_masks, edges_to_mask, mask_to_edges
from .model import ODD_CODES, ODD_CONFIGS, SLOTS, CpKind, sublattice

COLORABLE = (CpKind.MIURA, CpKind.TRAPEZOID, CpKind.KITE)
MAX_COLORING_LEAVES = 2e9
MAX_TRANSFER_ROWS = 5000


class ColoringError(ValueError):
    """The configuration has no colouring under the arrow convention."""


class NotFlatFoldable(ColoringError):
    pass


class HolonomyError(ColoringError):
    """Locally consistent but the colour steps wind around the torus."""


class ColoringUnsupported(ColoringError):
    pass


@dataclass(frozen=True)
class ColorFugacities:
    z0: float = 1.0
    z1: float = 1.0
    z2: float = 1.0

    def __post_init__(self):
        for name in ("z0", "z1", "z2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"colour fugacity {name} must be positive")

    def as_array(self):
        return np.array([self.z0, self.z1, self.z2], dtype=float)

    @classmethod
    def defect(cls, z):
        """Two ground colours at fugacity 1 and the defect colour at z."""
        return cls(1.0, 1.0, float(z))


@dataclass(frozen=True, eq=False)
class FaceColoring:
    shape: LatticeShape
    colors: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.colors, dtype=np.int64).reshape(self.shape.M, self.shape.N)
        if c.min() < 0 or c.max() > 2:
            raise ValueError("colours must be 0, 1 or 2")
        object.__setattr__(self, "colors", c)

    def __eq__(self, other):
        return isinstance(other, FaceColoring) and self.shape == other.shape and np.array_equal(self.colors, other.colors)

    def is_proper(self):
        c = self.colors
        return bool(np.all(c != np.roll(c, 1, axis=0)) and np.all(c != np.roll(c, 1, axis=1)))

    def shifted(self, k):
        return FaceColoring(self.shape, (self.colors + k) % 3)


def _cp(cp):
    return cp if isinstance(cp, CpKind) else CpKind.parse(cp)


def _shape(shape):
    return shape if isinstance(shape, LatticeShape) else LatticeShape(*shape)


def ground_edges(cp, shape):
    """(M, N, 2) crease states of the ground state: [..., 0] = h(r, c), [..., 1] = u(r, c)."""
    cp = _cp(cp)
    shape = _shape(shape)
    stag = cp.default_staggering
    stag.check_shape(shape.M, shape.N)
    ground = cp.ground_state
    if ground is None:
        raise ColoringUnsupported(f"{cp.value} has no ground state")
    M, N = shape.M, shape.N
    labels = np.empty((M, N), dtype=np.int64)
    for r in range(M):
        for c in range(N):
            unit = stag.layout[sublattice(r, c)]
            labels[r, c] = ground[unit]
    edges = np.empty((M, N, 2), dtype=np.int64)
    for r in range(M):
        for c in range(N):
            up, down, left, right = ODD_CONFIGS[labels[r, c]]
            edges[r, c] = (right, up)
            if ODD_CONFIGS[labels[(r + 1) % M, c]][1] != up or ODD_CONFIGS[labels[r, (c + 1) % N]][2] != right:
                raise RuntimeError(f"ground labels of {cp.value} do not tile consistently")
    return edges


@lru_cache(maxsize=None)
def arrow_signs(cp):
    """(2, 2, 2) signs of the arrows: [r % 2, c % 2, 0] for h(r, c), [..., 1] for u(r, c).

    +1 means the arrow points up across h or right across u.
    """
    cp = _cp(cp)
    edges = ground_edges(cp, (2, 2))
    color = np.add.outer(np.arange(2), np.arange(2)) % 2
    signs = np.empty((2, 2, 2), dtype=np.int64)
    for r in range(2):
        for c in range(2):
            # h(r, c): from F(r-1, c) up to F(r, c)
            step = color[r, c] - color[(r - 1) % 2, c]
            signs[r, c, 0] = step * (1 - 2 * edges[r, c, 0])
            # u(r, c): from F(r, c-1) right to F(r, c)
            step = color[r, c] - color[r, (c - 1) % 2]
            signs[r, c, 1] = step * (1 - 2 * edges[r, c, 1])
    return signs


def _steps(edges, cp):
    """Integer colour steps (+-1) across every crease in the positive direction."""
    M, N = edges.shape[-3], edges.shape[-2]
    a = arrow_signs(cp)
    tile = a[np.arange(M) % 2][:, np.arange(N) % 2]
    return tile * (1 - 2 * edges)


def vertex_sums(edges, cp):
    """Sum of the four colour steps around every vertex (zero where mapped)."""
    d = _steps(edges, cp)
    dh, du = d[..., 0], d[..., 1]
    # F(r-1,c-1) -> F(r-1,c) -> F(r,c) -> F(r,c-1) -> F(r-1,c-1)
    return np.roll(du, 1, axis=-2) + dh - du - np.roll(dh, 1, axis=-1)


def mapped_labels(cp):
    """Per slot, the labels whose colour steps balance around the vertex."""
    cp = _cp(cp)
    a = arrow_signs(cp)
    out = {}
    for s, slot in enumerate(SLOTS):
        r, c = divmod(s, 2)
        ok = set()
        for i in range(1, 9):
            up, down, left, right = ODD_CONFIGS[i]
            total = (
                a[(r - 1) % 2, c, 1] * (1 - 2 * down)
                + a[r, c, 0] * (1 - 2 * right)
                - a[r, c, 1] * (1 - 2 * up)
                - a[r, (c - 1) % 2, 0] * (1 - 2 * left)
            )
            if total == 0:
                ok.add(i)
        out[slot] = frozenset(ok)
    return out


def holonomy(edges, cp):
    """Colour change around a row loop and a column loop of faces (integers)."""
    d = _steps(edges, cp)
    row = d[..., 0, :, 1].sum(axis=-1)
    col = d[..., :, 0, 0].sum(axis=-1)
    return row, col


def _edges(cfg, shape):
    if isinstance(cfg, (int, np.integer)):
        return mask_to_edges(int(cfg), shape)
    e = np.asarray(cfg, dtype=np.int64)
    if e.shape != (shape.M, shape.N, 2):
        raise ValueError("configuration must be a mask or an (M, N, 2) crease array")
    return e


def creases_to_coloring(cfg, cp, shape, seed_color=0):
    """Colouring reached from F(0, 0) = seed_color by following the arrows.

    ``cfg`` is a configuration mask or an (M, N, 2) crease array.
    """
    cp = _cp(cp)
    shape = _shape(shape)
    edges = _edges(cfg, shape)
    if cp is CpKind.BARRETO_MARS:
        if not np.array_equal(edges, ground_edges(cp, shape)):
            raise ColoringUnsupported("Barreto's Mars defects have no colouring; only its ground state maps")
        return _propagate(edges, cp, shape, seed_color)
    if cp not in COLORABLE:
        raise ColoringUnsupported(f"no colouring convention for {cp.value}")
    return _propagate(edges, cp, shape, seed_color)


def _propagate(edges, cp, shape, seed_color):
    if seed_color not in (0, 1, 2):
        raise ValueError("seed colour must be 0, 1 or 2")
    bad = np.argwhere(vertex_sums(edges, cp) != 0)
    if len(bad):
        r, c = bad[0]
        raise NotFlatFoldable(f"colour steps do not close around vertex ({r}, {c})")
    row, col = holonomy(edges, cp)
    if row % 3 or col % 3:
        raise HolonomyError(f"colour winds by ({int(row)}, {int(col)}) around the torus")
    d = _steps(edges, cp)
    M, N = shape.M, shape.N
    colors = np.empty((M, N), dtype=np.int64)
    colors[0, 0] = seed_color
    for c in range(1, N):
        colors[0, c] = colors[0, c - 1] + d[0, c, 1]
    for r in range(1, M):
        colors[r] = colors[r - 1] + d[r, :, 0]
    return FaceColoring(shape, colors % 3)


def coloring_to_creases(fc, cp):
    """Crease array of a proper colouring (inverse of :func:`creases_to_coloring`)."""
    cp = _cp(cp)
    if not fc.is_proper():
        raise ColoringError("colouring is not proper")
    c = fc.colors
    a = arrow_signs(cp)
    M, N = c.shape
    tile = a[np.arange(M) % 2][:, np.arange(N) % 2]
    # lift the mod-3 difference to +-1 and read the crease state off the arrow
    up = (c - np.roll(c, 1, axis=0)) % 3
    right = (c - np.roll(c, 1, axis=1)) % 3
    step = np.stack([np.where(up == 1, 1, -1), np.where(right == 1, 1, -1)], axis=-1)
    edges = (1 - step * tile) // 2
    return edges.astype(np.int64)


def coloring_to_mask(fc, cp):
    return edges_to_mask(coloring_to_creases(fc, cp))


# -- counting ----------------------------------------------------------------


@njit(cache=True, nogil=True)
def _coloring_dfs(M, N, z):
    n = M * N
    col = np.full(n, -1, dtype=np.int64)
    total = 0.0
    count = 0
    weight = np.ones(n + 1)
    k = 0
    while k >= 0:
        if k == n:
            total += weight[n]
            count += 1
            k -= 1
            continue
        r = k // N
        c = k - r * N
        nxt = col[k] + 1
        placed = False
        while nxt < 3:
            ok = True
            if c > 0 and col[k - 1] == nxt:
                ok = False
            if ok and r > 0 and col[k - N] == nxt:
                ok = False
            if ok and c == N - 1 and col[r * N] == nxt:
                ok = False
            if ok and r == M - 1 and col[c] == nxt:
                ok = False
            if ok:
                placed = True
                break
            nxt += 1
        if placed:
            col[k] = nxt
            weight[k + 1] = weight[k] * z[nxt]
            k += 1
        else:
            col[k] = -1
            k -= 1
    return total, count


def _proper_rows(N):
    rows = []
    for code in range(3 ** N):
        row = [(code // 3 ** i) % 3 for i in range(N)]
        if all(row[i] != row[(i + 1) % N] for i in range(N)):
            rows.append(row)
    return np.array(rows, dtype=np.int64)


def _coloring_transfer(M, N, z):
    rows = _proper_rows(N)
    if len(rows) > MAX_TRANSFER_ROWS:
        raise BudgetExceeded(f"{len(rows)} proper rows exceed the transfer budget")
    T = np.all(rows[:, None, :] != rows[None, :, :], axis=-1).astype(float)
    w = np.prod(z[rows], axis=1)
    A = T * w[None, :]
    P = np.linalg.matrix_power(A, M)
    C = np.linalg.matrix_power(T, M)
    return float(np.trace(P)), int(round(np.trace(C)))


def count_colorings(shape, fugacities=None, engine=None):
    """Weighted number of proper 3-colourings of the faces of an M x N torus.

    Returns ``(weighted sum, number of colourings)``; each colouring weighs
    the product of the fugacities of its face colours.
    """
    shape = _shape(shape)
    z = (fugacities or ColorFugacities()).as_array()
    engine = engine or ("numba" if _accel.numba_enabled() else "numpy")
    if engine == "numba":
        if 3 * (4 / 3) ** (1.5 * shape.M * shape.N) > MAX_COLORING_LEAVES:
            raise BudgetExceeded("too many colourings for depth-first counting")
        total, n = _coloring_dfs(shape.M, shape.N, z)
        return float(total), int(n)
    if engine == "numpy":
        return _coloring_transfer(shape.M, shape.N, z)
    raise ValueError(f"unknown engine {engine!r}")


@dataclass(frozen=True)
class CountIdentity:
    colorings: int
    flat_foldable: int
    consistent: int
    winding: int

    @property
    def holds(self):
        return self.colorings == 3 * self.consistent


def flat_foldable_masks(cp, shape):
    cp = _cp(cp)
    shape = _shape(shape)
    cp.default_staggering.check_shape(shape.M, shape.N)
    return admissible_masks(_allowed_table(cp), shape)


def _allowed_table(cp):
    allowed = np.zeros((4, 16), dtype=bool)
    for s, slot in enumerate(SLOTS):
        bad = cp.forbidden(slot)
        for i in range(1, 9):
            allowed[s, ODD_CODES[i - 1]] = i not in bad
    return allowed


def count_identity(cp, shape, engine=None):
    """Compare proper colourings with 3 x the colourable flat-foldable configurations."""
    cp = _cp(cp)
    shape = _shape(shape)
    masks = flat_foldable_masks(cp, shape)
    edges = np.stack([mask_to_edges(int(m), shape) for m in masks])
    row, col = holonomy(edges, cp)
    ok = (row % 3 == 0) & (col % 3 == 0)
    _, n = count_colorings(shape, engine=engine)
    return CountIdentity(n, len(masks), int(ok.sum()), int((~ok).sum()))


def colored_sixvertex_weights(f):
    """(6, 3) array of colour-resolved even six-vertex weights omega_{i, j}.

    omega_1,j^4 = omega_2,j^4 = z_j^2 z_{j-1} z_{j+1}, omega_3,j^4 = z_j z_{j-1}^2 z_{j+1},
    omega_4,j^4 = z_j z_{j-1} z_{j+1}^2, omega_5,j^2 = omega_6,j-1^2 = z_j^2 z_{j-1}^2.
    """
    z = f.as_array()
    out = np.empty((6, 3))
    for j in range(3):
        zj, zm, zp = z[j], z[(j - 1) % 3], z[(j + 1) % 3]
        out[0, j] = out[1, j] = (zj * zj * zm * zp) ** 0.25
        out[2, j] = (zj * zm * zm * zp) ** 0.25
        out[3, j] = (zj * zm * zp * zp) ** 0.25
        out[4, j] = zj * zm
        out[5, (j - 1) % 3] = zj * zm
    return out


def flip_face(edges, r, c):
    """Reverse the four creases bounding face F(r, c)."""
    M, N = edges.shape[0], edges.shape[1]
    e = edges.copy()
    e[r, c, 0] ^= 1
    e[(r + 1) % M, c, 0] ^= 1
    e[r, c, 1] ^= 1
    e[r, (c + 1) % N, 1] ^= 1
    return e
