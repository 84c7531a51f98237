"""Exhaustive enumeration of crease assignments on small tori.

Every vertex (r, c) of an M x N torus owns its right crease ``h(r, c)`` and its
up crease ``u(r, c)``, stored as bits ``2*(r*N + c)`` and ``2*(r*N + c) + 1``
of a configuration mask.  A configuration contributes the product of the
vertex weights of its slots; it is admissible when every vertex label is
allowed by the lookup tables (Maekawa plus the crease-pattern mask).

Two interchangeable engines walk the 2^(2MN) assignments:

* a numba depth-first kernel that sets creases in bit order and scores each
  vertex as soon as its four creases are known, so a rejected vertex discards
  the whole subtree at once;
* a pure-numpy fallback that scores blocks of consecutive masks at once.

The engine follows :mod:`flatfold._accel`; both return identical sums up to
floating-point reassociation.  An exact rational path is provided for
certifying identities on small shapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _accel
from ._accel import njit
from .model import (
    ODD_CODES,
    SLOTS,
    CpKind,
    OddVertexWeights,
    StaggeredModel,
    Staggering,
    hamming,
    symmetric_defect_weights,
    sublattice,
)

MAX_EDGES = 32


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class LatticeShape:
    M: int
    N: int

    def __post_init__(self):
        if self.M < 1 or self.N < 1:
            raise ValueError("lattice dimensions must be positive")

    @property
    def sites(self):
        return self.M * self.N

    @property
    def edges(self):
        return 2 * self.M * self.N


@dataclass(frozen=True)
class ExactPartition:
    value: float
    config_count: int
    weighted_score: float = 0.0

    @property
    def mean_score(self):
        return self.weighted_score / self.value if self.value else 0.0


def _shape(shape):
    return shape if isinstance(shape, LatticeShape) else LatticeShape(*shape)


def edge_index(r, c, kind, M, N):
    """Bit of the right ('h') or up ('u') crease owned by vertex (r, c)."""
    return 2 * ((r % M) * N + (c % N)) + (0 if kind == "h" else 1)


def vertex_edges(M, N):
    """(MN, 4) edge bits of the up, down, left, right creases of each vertex."""
    out = np.empty((M * N, 4), dtype=np.int64)
    for r in range(M):
        for c in range(N):
            out[r * N + c] = (
                edge_index(r, c, "u", M, N),
                edge_index(r - 1, c, "u", M, N),
                edge_index(r, c - 1, "h", M, N),
                edge_index(r, c, "h", M, N),
            )
    return out


def vertex_slots(M, N):
    return np.array([sublattice(r, c) for r in range(M) for c in range(N)], dtype=np.int64)


def _completion_lists(vedges, E):
    """CSR lists of the vertices whose last crease is bit ``k``."""
    last = vedges.max(axis=1)
    order = np.argsort(last, kind="stable")
    ptr = np.zeros(E + 1, dtype=np.int64)
    for k in last:
        ptr[k + 1] += 1
    return np.cumsum(ptr), order.astype(np.int64)


@njit(cache=True, nogil=True)
def _dfs_kernel(E, lo, hi, ptr, vtx, vedges, vslot, lut, score, allowed):
    bits = np.zeros(E, dtype=np.int64)
    nxt = np.zeros(E + 1, dtype=np.int64)
    pw = np.ones(E + 1)
    ps = np.zeros(E + 1)
    z = 0.0
    zc = 0.0
    s = 0.0
    sc = 0.0
    count = 0
    level = 0
    nxt[0] = lo[0]
    while level >= 0:
        if level == E:
            # Kahan-compensated accumulation
            yv = pw[E] - zc
            tv = z + yv
            zc = (tv - z) - yv
            z = tv
            yv = pw[E] * ps[E] - sc
            tv = s + yv
            sc = (tv - s) - yv
            s = tv
            count += 1
            level -= 1
            continue
        b = nxt[level]
        if b > hi[level]:
            level -= 1
            continue
        nxt[level] = b + 1
        bits[level] = b
        w = pw[level]
        acc = ps[level]
        ok = True
        for j in range(ptr[level], ptr[level + 1]):
            x = vtx[j]
            code = (bits[vedges[x, 0]] << 3) | (bits[vedges[x, 1]] << 2) | (bits[vedges[x, 2]] << 1) | bits[vedges[x, 3]]
            sl = vslot[x]
            if not allowed[sl, code]:
                ok = False
                break
            w *= lut[sl, code]
            acc += score[sl, code]
        if ok:
            pw[level + 1] = w
            ps[level + 1] = acc
            level += 1
            if level < E:
                nxt[level] = lo[level]
    return z, s, count


@njit(cache=True, nogil=True)
def _collect_kernel(E, ptr, vtx, vedges, vslot, allowed, cap):
    out = np.empty(cap, dtype=np.int64)
    bits = np.zeros(E, dtype=np.int64)
    nxt = np.zeros(E + 1, dtype=np.int64)
    n = 0
    level = 0
    while level >= 0:
        if level == E:
            if n < cap:
                m = 0
                for k in range(E):
                    m |= bits[k] << k
                out[n] = m
            n += 1
            level -= 1
            continue
        b = nxt[level]
        if b > 1:
            level -= 1
            continue
        nxt[level] = b + 1
        bits[level] = b
        ok = True
        for j in range(ptr[level], ptr[level + 1]):
            x = vtx[j]
            code = (bits[vedges[x, 0]] << 3) | (bits[vedges[x, 1]] << 2) | (bits[vedges[x, 2]] << 1) | bits[vedges[x, 3]]
            if not allowed[vslot[x], code]:
                ok = False
                break
        if ok:
            level += 1
            if level < E:
                nxt[level] = 0
    return out, n


def _numpy_sum(M, N, lut, score, allowed, prefix, plen, block=1 << 20):
    """Score every mask with the given low-bit prefix, block by block."""
    E = 2 * M * N
    vedges = vertex_edges(M, N)
    vslot = vertex_slots(M, N)
    free = E - plen
    total = 2 ** free
    zs, ss, count = [], [], 0
    for start in range(0, total, block):
        hi = np.arange(start, min(start + block, total), dtype=np.int64)
        masks = (hi << plen) | prefix
        w = np.ones(masks.shape[0])
        acc = np.zeros(masks.shape[0])
        ok = np.ones(masks.shape[0], dtype=bool)
        for x in range(M * N):
            e = vedges[x]
            code = (
                (((masks >> e[0]) & 1) << 3)
                | (((masks >> e[1]) & 1) << 2)
                | (((masks >> e[2]) & 1) << 1)
                | ((masks >> e[3]) & 1)
            )
            sl = vslot[x]
            ok &= allowed[sl][code]
            w *= lut[sl][code]
            acc += score[sl][code]
        w = np.where(ok, w, 0.0)
        zs.append(float(np.sum(w)))
        ss.append(float(np.sum(w * acc)))
        count += int(np.count_nonzero(ok))
    return math.fsum(zs), math.fsum(ss), count


def enumerate_tables(M, N, lut, allowed, score=None, chunk_bits=0, engine=None):
    """Weighted sum over all crease assignments for raw lookup tables.

    ``lut``, ``score`` and ``allowed`` are (4, 16) arrays indexed by slot and
    neighborhood code.  Returns ``(Z, sum of weight*score, admissible count)``
    where ``score`` is additive over vertices.  The mask space is split on its
    lowest ``chunk_bits`` bits into independent chunks whose partial sums are
    reduced in chunk order, so the result does not depend on how the chunks
    are scheduled.
    """
    E = 2 * M * N
    if E > MAX_EDGES:
        raise BudgetExceeded(f"{E} creases exceed the enumeration budget of {MAX_EDGES}")
    lut = np.ascontiguousarray(lut, dtype=float)
    allowed = np.ascontiguousarray(allowed, dtype=np.bool_)
    score = np.zeros_like(lut) if score is None else np.ascontiguousarray(score, dtype=float)
    engine = engine or ("numba" if _accel.numba_enabled() else "numpy")
    chunk_bits = max(0, min(int(chunk_bits), E))
    zs, ss, count = [], [], 0
    if engine == "numba":
        vedges = vertex_edges(M, N)
        vslot = vertex_slots(M, N)
        ptr, vtx = _completion_lists(vedges, E)
        for prefix in range(2 ** chunk_bits):
            lo = np.zeros(E + 1, dtype=np.int64)
            hi = np.ones(E + 1, dtype=np.int64)
            for k in range(chunk_bits):
                lo[k] = hi[k] = (prefix >> k) & 1
            z, s, n = _dfs_kernel(E, lo, hi, ptr, vtx, vedges, vslot, lut, score, allowed)
            zs.append(z)
            ss.append(s)
            count += int(n)
    elif engine == "numpy":
        for prefix in range(2 ** chunk_bits):
            z, s, n = _numpy_sum(M, N, lut, score, allowed, prefix, chunk_bits)
            zs.append(z)
            ss.append(s)
            count += n
    else:
        raise ValueError(f"unknown engine {engine!r}")
    return math.fsum(zs), math.fsum(ss), count


def _model_tables(model, shape):
    shape = _shape(shape)
    model.staggering.check_shape(shape.M, shape.N)
    lut, allowed = model.tables()
    return shape, lut, allowed


def enumerate_Z(model, shape, engine=None, chunk_bits=0):
    """Brute-force partition function and admissible-configuration count."""
    shape, lut, allowed = _model_tables(model, shape)
    z, _, n = enumerate_tables(shape.M, shape.N, lut, allowed, engine=engine, chunk_bits=chunk_bits)
    return ExactPartition(z, n)


def enumerate_density(model, shape, family="creaseY", engine=None):
    """Mean number of defects per site of a symmetric defect family.

    For ``creaseY`` this is the mean number of reversed creases per site,
    ``y d ln Z / dy / MN``; ``creaseZ`` measures face flips, ``z d ln Z / dz / MN``
    with ``z = y**4``, which is a quarter of it.  ``model`` must come from
    :func:`symmetric_defect_weights`.
    """
    expo = defect_exponents(model)
    shape, lut, allowed = _model_tables(model, shape)
    z, s, _ = enumerate_tables(shape.M, shape.N, lut, allowed, score=expo, engine=engine)
    rho = s / z / shape.sites
    if family == "creaseY":
        return rho
    if family == "creaseZ":
        return rho / 4.0
    raise ValueError(f"unknown density family {family!r}")


def defect_exponents(model):
    """Power of y carried by each slot weight of a symmetric defect family.

    A label at Hamming distance d from the defect-free label carries y**(d/2):
    every reversed crease is shared by two vertices.
    """
    ground = model.cp.ground_state or {n: 1 for n in model.staggering.unit_names}
    expo = np.zeros((4, 16))
    for s, slot in enumerate(SLOTS):
        name = model.staggering.layout[s]
        for i in range(1, 9):
            expo[s, ODD_CODES[i - 1]] = hamming(i, ground[name]) // 2
    return expo


def count_flat_foldable(cp, shape, engine=None):
    """Number of locally flat-foldable crease assignments of a pattern."""
    cp = cp if isinstance(cp, CpKind) else CpKind.parse(cp)
    model = symmetric_defect_weights(cp, 1.0)
    return enumerate_Z(model, shape, engine=engine).config_count


def admissible_masks(allowed, shape, cap=1 << 22):
    """Sorted bitmasks of all admissible configurations for an allowed table."""
    shape = _shape(shape)
    M, N = shape.M, shape.N
    E = 2 * M * N
    if E > MAX_EDGES:
        raise BudgetExceeded(f"{E} creases exceed the enumeration budget of {MAX_EDGES}")
    allowed = np.ascontiguousarray(allowed, dtype=np.bool_)
    vedges = vertex_edges(M, N)
    vslot = vertex_slots(M, N)
    if _accel.numba_enabled():
        ptr, vtx = _completion_lists(vedges, E)
        out, n = _collect_kernel(E, ptr, vtx, vedges, vslot, allowed, cap)
        if n > cap:
            raise BudgetExceeded(f"{n} admissible configurations exceed cap {cap}")
        return np.sort(out[:n])
    found = []
    for start in range(0, 2 ** E, 1 << 20):
        masks = np.arange(start, min(start + (1 << 20), 2 ** E), dtype=np.int64)
        ok = np.ones(masks.shape[0], dtype=bool)
        for x in range(M * N):
            e = vedges[x]
            code = (
                (((masks >> e[0]) & 1) << 3)
                | (((masks >> e[1]) & 1) << 2)
                | (((masks >> e[2]) & 1) << 1)
                | ((masks >> e[3]) & 1)
            )
            ok &= allowed[vslot[x]][code]
        found.append(masks[ok])
    out = np.concatenate(found)
    if out.shape[0] > cap:
        raise BudgetExceeded(f"{out.shape[0]} admissible configurations exceed cap {cap}")
    return out


def mask_to_edges(mask, shape):
    """(M, N, 2) array of crease states: [..., 0] right crease, [..., 1] up crease."""
    shape = _shape(shape)
    E = shape.edges
    bits = np.array([(int(mask) >> k) & 1 for k in range(E)], dtype=np.int8)
    return bits.reshape(shape.M, shape.N, 2)


def edges_to_mask(edges):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1)
    return int(sum(int(b) << k for k, b in enumerate(edges)))


def neighborhood_codes(mask, shape):
    """(M, N) array of 4-bit neighborhood codes of a configuration."""
    shape = _shape(shape)
    M, N = shape.M, shape.N
    ve = vertex_edges(M, N)
    m = int(mask)
    codes = [((m >> e[0]) & 1) << 3 | ((m >> e[1]) & 1) << 2 | ((m >> e[2]) & 1) << 1 | ((m >> e[3]) & 1) for e in ve]
    return np.array(codes, dtype=np.int64).reshape(M, N)


def enumerate_Z_exact(model, shape, weights=None):
    """Partition function in exact rational arithmetic.

    ``weights`` optionally maps unit names to sequences of eight
    :class:`fractions.Fraction` (or ints) replacing the float weights, so that
    identities can be certified without rounding.
    """
    shape, lut_f, allowed = _model_tables(model, shape)
    M, N = shape.M, shape.N
    E = shape.edges
    if E > 24:
        raise BudgetExceeded("exact mode is limited to 24 creases")
    lut = [[Fraction(0)] * 16 for _ in range(4)]
    for s, slot in enumerate(SLOTS):
        name = model.staggering.layout[s]
        src = weights[name] if weights is not None else [Fraction(x) for x in model.units[name].v]
        for i in range(8):
            lut[s][ODD_CODES[i]] = Fraction(src[i])
    vedges = vertex_edges(M, N)
    vslot = vertex_slots(M, N)
    ptr, vtx = _completion_lists(vedges, E)
    bits = [0] * E
    total = Fraction(0)
    count = 0

    def walk(level, w):
        nonlocal total, count
        if level == E:
            total += w
            count += 1
            return
        for b in (0, 1):
            bits[level] = b
            ww = w
            ok = True
            for j in range(ptr[level], ptr[level + 1]):
                x = vtx[j]
                e = vedges[x]
                code = bits[e[0]] << 3 | bits[e[1]] << 2 | bits[e[2]] << 1 | bits[e[3]]
                if not allowed[vslot[x], code]:
                    ok = False
                    break
                ww = ww * lut[vslot[x]][code]
            if ok:
                walk(level + 1, ww)

    walk(0, Fraction(1))
    return total, count


def homogeneous_model(v, cp=CpKind.SIMPLE_SQUARE):
    return StaggeredModel(cp, Staggering.HOMOGENEOUS, {"v": OddVertexWeights(v)})
