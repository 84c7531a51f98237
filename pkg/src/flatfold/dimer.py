"""Dimer (Pfaffian) solution of the staggered free-fermion odd 8-vertex model.

Each vertex is replaced by a five-site cluster with sites U, D, L, R, C and
internal bonds z1..z8; an external crease is a mountain exactly when the
external bond crossing it is covered.  Summing the cluster dimer coverings for
a fixed external pattern reproduces the vertex weights

    v1 = z1 z8 + z3 z7    v2 = z6    v3 = z2 z7 + z4 z8    v4 = z5
    v5 = z1 z6 + z4 z5    v6 = z8    v7 = z2 z5 + z3 z6    v8 = z7

which can be solved for z exactly when v1 v2 + v3 v4 = v5 v6 + v7 v8.

The Kasteleyn orientation used throughout (site order U, D, L, R, C) is

* inside a cluster: U->L z1, U->R z3, U->C z5, D->L z4, D->R z2, C->D z6,
  C->L z7, R->C z8;
* horizontal creases: R(r, c) -> L(r, c+1) with weight +1;
* vertical creases: U(r, c) -> D(r+1, c) with weight (-1)**c.

On a torus the four boundary sectors (periodic or antiperiodic in each
direction) are combined as Z = (-Pf[++] + Pf[+-] + Pf[-+] + Pf[--]) / 2, the
first sign referring to the vertical direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .enumeration import LatticeShape, _shape
from .model import OddVertexWeights, StaggeredModel, sublattice, SLOTS
from .pfaffian import pfaffian
from .quadrature import laurent_from_samples, torus_log_mean

U, D, L, R, C = range(5)


class GaugeError(ValueError):
    """The requested bond parameterization does not exist for these weights."""


@dataclass(frozen=True)
class DimerBondWeights:
    z: tuple  # (z1, ..., z8)

    def __getitem__(self, i):
        return self.z[i - 1]

    def vertex_weights(self):
        return bond_to_vertex(self.z)


def bond_to_vertex(z):
    z1, z2, z3, z4, z5, z6, z7, z8 = (float(x) for x in z)
    return np.array(
        [z1 * z8 + z3 * z7, z6, z2 * z7 + z4 * z8, z5, z1 * z6 + z4 * z5, z8, z2 * z5 + z3 * z6, z7]
    )


def vertex_to_bond(w, gauge="auto", rtol=1e-10):
    """Cluster bond weights reproducing the vertex weights ``w``.

    ``gauge="paper"`` fixes z2 = 1 and needs v2 v6 != 0.  ``gauge="auto"``
    uses that choice when possible and otherwise solves the (rank-deficient)
    linear system for z1..z4 in the least-norm sense, which covers masked
    units with v2 v6 = 0 exactly instead of by perturbation.  Weights with no
    cluster representation at all (a lone ground-state label, the y = 0 end
    of a defect family) raise :class:`GaugeError`.
    """
    v = w.padded() if isinstance(w, OddVertexWeights) else np.concatenate([[0.0], np.asarray(w, float)])
    if v[2] != 0 and v[6] != 0:
        z1 = (v[4] * v[8] + v[5] * v[6] - v[3] * v[4]) / (v[2] * v[6])
        z = (z1, 1.0, (v[7] - v[4]) / v[2], (v[3] - v[8]) / v[6], v[4], v[2], v[8], v[6])
    elif gauge == "paper":
        raise GaugeError("z2 = 1 gauge needs v2 and v6 non-zero")
    else:
        A = np.array(
            [[v[6], 0, v[8], 0], [0, v[8], 0, v[6]], [v[2], 0, 0, v[4]], [0, v[4], v[2], 0]], dtype=float
        )
        rhs = np.array([v[1], v[3], v[5], v[7]])
        sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        z = (sol[0], sol[1], sol[2], sol[3], v[4], v[2], v[8], v[6])
    back = bond_to_vertex(z)
    scale = max(np.max(np.abs(v[1:])), np.finfo(float).tiny)
    if np.max(np.abs(back - v[1:])) > rtol * scale * max(1.0, scale):
        raise GaugeError("weights are not free-fermion: no bond weights reproduce them")
    return DimerBondWeights(tuple(float(x) for x in z))


def cluster_block(z):
    """Antisymmetric 5x5 block of one vertex cluster (site order U, D, L, R, C)."""
    z = z.z if isinstance(z, DimerBondWeights) else tuple(z)
    T = np.zeros((5, 5))
    T[U, L] = z[0]
    T[U, R] = z[2]
    T[U, C] = z[4]
    T[D, L] = z[3]
    T[D, R] = z[1]
    T[D, C] = -z[5]
    T[L, C] = -z[6]
    T[R, C] = z[7]
    return T - T.T


# -- Bloch matrices ---------------------------------------------------------

#: cell vertices and lattice vectors (rows, columns) of each unit cell
CELLS = {
    "column-four": ([(0, 0), (0, 1), (1, 0), (1, 1)], (2, 0), (0, 2)),
    "column-two": ([(0, 0), (0, 1)], (1, 0), (0, 2)),
    "bipartite-two": ([(0, 0), (0, 1)], (1, 1), (0, 2)),
}


def _gauge(cell):
    # a row gauge (-1)^(r(r+1)/2) makes the vertical signs invariant under the
    # diagonal translation (1, 1)
    if cell == "bipartite-two":
        return lambda r, c: -1.0 if (r * (r + 1) // 2) % 2 else 1.0
    return lambda r, c: 1.0


def _bond_sign(r, c, kind):
    return 1.0 if kind == "h" else (-1.0 if c % 2 else 1.0)


def bloch_terms(model, cell="column-four", gauge="auto"):
    """Hopping decomposition of the Bloch matrix of a unit cell.

    Returns ``{(n1, n2): K_n}`` with ``K(phi) = sum_n exp(i n.phi) K_n``, where
    ``phi1`` and ``phi2`` are conjugate to the two lattice vectors of
    :data:`CELLS`.  Column-two and bipartite-two cells are only meaningful for
    models with the matching staggering (or a homogeneous one).
    """
    verts, a1, a2 = CELLS[cell]
    g = _gauge(cell)
    n = 5 * len(verts)
    basis = np.array([a1, a2], dtype=float).T
    inv = np.linalg.inv(basis)
    index = {p: i for i, p in enumerate(verts)}
    if cell != "column-four":
        for r in range(2):
            for c in range(2):
                p = _reduce((r, c), verts, inv, index)[0]
                if model.weights_at(r, c) != model.weights_at(*verts[p]):
                    raise ValueError(f"model staggering does not fit the {cell} cell")
    terms = {(0, 0): np.zeros((n, n))}
    for i, (r, c) in enumerate(verts):
        terms[(0, 0)][5 * i : 5 * i + 5, 5 * i : 5 * i + 5] += cluster_block(vertex_to_bond(model.weights_at(r, c), gauge))
        for tgt, a, b, kind in (((r, c + 1), R, L, "h"), ((r + 1, c), U, D, "u")):
            j, shift = _reduce(tgt, verts, inv, index)
            k = _bond_sign(r, c, kind) * g(r, c) * g(*tgt)
            # translation invariance of the gauged orientation
            for d in (a1, a2):
                r2, c2 = r + d[0], c + d[1]
                t2 = (tgt[0] + d[0], tgt[1] + d[1])
                assert _bond_sign(r2, c2, kind) * g(r2, c2) * g(*t2) == k
            fwd, bwd = shift, (-shift[0], -shift[1])
            terms.setdefault(fwd, np.zeros((n, n)))[5 * i + a, 5 * j + b] += k
            terms.setdefault(bwd, np.zeros((n, n)))[5 * j + b, 5 * i + a] -= k
    return terms


def _reduce(p, verts, inv, index):
    for q in verts:
        d = np.array(p, dtype=float) - np.array(q, dtype=float)
        nn = inv @ d
        if np.allclose(nn, np.round(nn)):
            return index[q], (int(round(nn[0])), int(round(nn[1])))
    raise ValueError(f"cannot reduce {p}")


def bloch_matrix(model, phi1, phi2, cell="column-four", gauge="auto"):
    """Bloch matrices K(phi) stacked over the broadcast shape of the momenta."""
    terms = bloch_terms(model, cell, gauge)
    phi1, phi2 = np.broadcast_arrays(np.asarray(phi1, float), np.asarray(phi2, float))
    out = np.zeros(phi1.shape + terms[(0, 0)].shape, dtype=complex)
    for (n1, n2), K in terms.items():
        out += np.exp(1j * (n1 * phi1 + n2 * phi2))[..., None, None] * K
    return out


def momentum_matrix(model, theta1, theta2, gauge="auto"):
    """The 20x20 four-unit matrix; theta1 is conjugate to the vertical period."""
    return bloch_matrix(model, theta1, theta2, "column-four", gauge)


def bloch_determinant(model, phi1, phi2, cell="column-four", gauge="auto", check=True):
    K = bloch_matrix(model, phi1, phi2, cell, gauge)
    d = np.linalg.det(K)
    if check:
        scale = np.maximum(np.abs(d), 1e-300)
        if np.any(np.abs(d.imag) > 1e-10 * np.maximum(scale, 1.0)):
            raise ArithmeticError("momentum determinant is not real; weights are not free-fermion")
    return d.real


def momentum_determinant(model, theta1, theta2, gauge="auto"):
    """D(theta1, theta2) of the four-unit cell (real for free-fermion weights)."""
    return bloch_determinant(model, theta1, theta2, "column-four", gauge)


def fourier_modes(model, cell="column-four", n=8, tol=1e-13):
    """Exact Fourier coefficients of the Bloch determinant.

    The determinant is a trigonometric polynomial of degree at most two in each
    momentum for these cells, so an ``n x n`` sample grid with ``n >= 5``
    resolves it without aliasing.  Returns a dict ``{(k1, k2): c}`` of the
    non-negligible Laurent coefficients of exp(i (k1 t1 + k2 t2)).
    """
    g = 2 * np.pi * np.arange(n) / n
    t1, t2 = np.meshgrid(g, g, indexing="ij")
    vals = bloch_determinant(model, t1, t2, cell)
    return laurent_from_samples(vals, tol=tol)


# -- finite tori ------------------------------------------------------------


def finite_matrix(model, shape, s1=1, s2=1, gauge="auto"):
    """Real antisymmetric matrix of an M x N torus.

    ``s1`` (``s2``) multiplies the vertical (horizontal) creases that wrap
    around the torus; -1 selects the antiperiodic sector.
    """
    shape = _shape(shape)
    M, N = shape.M, shape.N
    if N % 2:
        raise ValueError("the Kasteleyn orientation needs an even number of columns")
    model.staggering.check_shape(M, N)
    blocks = {}
    K = np.zeros((5 * M * N, 5 * M * N))

    def site(r, c, s):
        return 5 * ((r % M) * N + (c % N)) + s

    for r in range(M):
        for c in range(N):
            w = model.weights_at(r, c)
            if w not in blocks:
                blocks[w] = cluster_block(vertex_to_bond(w, gauge))
            b = site(r, c, 0)
            K[b : b + 5, b : b + 5] = blocks[w]
            hv = s2 if c == N - 1 else 1
            vv = (s1 if r == M - 1 else 1) * (-1 if c % 2 else 1)
            for (i, j, val) in ((site(r, c, R), site(r, c + 1, L), hv), (site(r, c, U), site(r + 1, c, D), vv)):
                K[i, j] += val
                K[j, i] -= val
    return K


SECTORS = ((1, 1), (1, -1), (-1, 1), (-1, -1))
#: sign of each sector Pfaffian in Z = sum(sign * Pf) / 2, fixed against the
#: enumeration oracle
SECTOR_SIGNS = {(1, 1): -1, (1, -1): 1, (-1, 1): 1, (-1, -1): 1}


def sector_pfaffians(model, shape, gauge="auto"):
    return {s: float(pfaffian(finite_matrix(model, shape, *s, gauge), check=False)) for s in SECTORS}


def sector_determinants(model, shape):
    """det of each sector as the product of momentum determinants.

    Antiperiodic boundaries shift the momenta by half a grid step.  The
    four-unit cell is used, so M and N must be even.
    """
    shape = _shape(shape)
    out = {}
    for s in SECTORS:
        pairs, selfconj = _momentum_classes(shape, s)
        vals = [momentum_determinant(model, t1, t2) for t1, t2 in selfconj]
        vals += [momentum_determinant(model, t1, t2) ** 2 for t1, t2 in pairs]
        out[s] = float(np.prod(vals))
    return out


def _momentum_classes(shape, s):
    """Split the momenta of one sector into conjugate pairs and self-conjugate points.

    Returns one representative per pair ``(theta, -theta)`` and the list of
    momenta with ``theta = -theta`` mod 2 pi (components in {0, pi}).
    """
    if shape.M % 2 or shape.N % 2:
        raise ValueError("momentum products use the 2x2 cell: M and N must be even")
    Mu, Nu = shape.M // 2, shape.N // 2
    d1 = 0 if s[0] == 1 else 1
    d2 = 0 if s[1] == 1 else 1
    seen = set()
    pairs, selfconj = [], []
    for a in range(Mu):
        for b in range(Nu):
            if (a, b) in seen:
                continue
            # momenta are 2 pi (2a + d) / (2 Mu); the conjugate index solves 2a' + d = -(2a + d)
            ca = (-(2 * a + d1) - d1) // 2 % Mu
            cb = (-(2 * b + d2) - d2) // 2 % Nu
            theta = (np.pi * (2 * a + d1) / Mu, np.pi * (2 * b + d2) / Nu)
            seen.update({(a, b), (ca, cb)})
            if (ca, cb) == (a, b):
                selfconj.append(theta)
            else:
                pairs.append(theta)
    return pairs, selfconj


def momentum_sector_pfaffians(model, shape, gauge="auto"):
    """Sector Pfaffians assembled from the momentum blocks.

    A conjugate pair ``(theta, -theta)`` contributes ``D(theta)``, which fixes
    the sign without a square root; a self-conjugate momentum has a real
    antisymmetric Bloch matrix whose own Pfaffian is taken.  The result equals
    the real-space Pfaffian of :func:`finite_matrix` including its sign.
    """
    shape = _shape(shape)
    out = {}
    for s in SECTORS:
        pairs, selfconj = _momentum_classes(shape, s)
        factors = []
        for t1, t2 in selfconj:
            K = momentum_matrix(model, t1, t2, gauge)
            if np.max(np.abs(K.imag), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(K))):
                raise ArithmeticError("self-conjugate Bloch matrix is not real")
            factors.append(float(pfaffian(K.real)))
        for t1, t2 in pairs:
            factors.append(momentum_determinant(model, t1, t2, gauge))
        out[s] = float(np.prod(factors))
    return out


def finite_Z(model, shape, method="pfaffian", gauge="auto"):
    """Partition function of a torus from four boundary-sector Pfaffians.

    ``method="pfaffian"`` evaluates the real-space Pfaffians directly;
    ``method="momentum"`` builds the same Pfaffians from Bloch blocks (even M
    and N only).  The sectors combine with the fixed signs
    :data:`SECTOR_SIGNS`; the row-major site ordering contributes a further
    ``(-1)^(MN/2)``.
    """
    shape = _shape(shape)
    if method == "pfaffian":
        pf = sector_pfaffians(model, shape, gauge)
    elif method == "momentum":
        pf = momentum_sector_pfaffians(model, shape, gauge)
    else:
        raise ValueError(f"unknown method {method!r}")
    order_sign = -1 if (shape.M * shape.N // 2) % 2 else 1
    return order_sign * 0.5 * math.fsum(SECTOR_SIGNS[s] * pf[s] for s in SECTORS)


# -- thermodynamic limit ----------------------------------------------------


@dataclass(frozen=True)
class FreeEnergy:
    value: float
    order: int
    converged: bool
    min_sample: float


def thermo_free_energy(model, tol=1e-13, max_order=1 << 17):
    """Per-site -beta f = (1/(32 pi^2)) * integral of ln D over the momentum torus.

    The inner integral over theta2 is done exactly from the roots of D as a
    polynomial in exp(i theta2); the outer one uses the periodic midpoint rule,
    doubled until successive values agree to ``tol``.
    """
    C = fourier_modes(model)
    mean, order, ok, dmin = torus_log_mean(C, tol=tol, max_order=max_order)
    return FreeEnergy(mean / 8.0, order, ok, dmin)
