"""Averages of ln|P| over the momentum torus for trigonometric polynomials P.

A trigonometric polynomial is stored as a Laurent dictionary ``{(k1, k2): c}``
with ``P(t1, t2) = sum c * exp(i (k1 t1 + k2 t2))``.  For fixed ``t1`` it is a
polynomial in ``x = exp(i t2)`` and Jensen's formula gives the exact average
over ``t2``::

    mean_t2 ln|P| = ln|leading coefficient| + sum over roots of ln max(1, |root|)

The remaining one-dimensional average over ``t1`` is periodic and analytic away
from critical points, so the midpoint rule converges spectrally; the order is
doubled until two successive values agree.  Near a critical point the
integrand only has an integrable kink and the doubling still converges,
algebraically.
"""

import numpy as np


def laurent_from_samples(vals, tol=1e-13):
    """Laurent coefficients of a trigonometric polynomial sampled on a uniform grid."""
    vals = np.asarray(vals)
    n1, n2 = vals.shape
    F = np.fft.fft2(vals) / (n1 * n2)
    scale = max(np.max(np.abs(F)), np.finfo(float).tiny)
    out = {}
    for i in range(n1):
        k1 = i if i < (n1 + 1) // 2 else i - n1
        for j in range(n2):
            k2 = j if j < (n2 + 1) // 2 else j - n2
            c = F[i, j]
            if abs(c) > tol * scale:
                out[(k1, k2)] = complex(c)
    return out


def laurent_from_cosine_series(coeffs):
    """Laurent form of ``A + sum 2 c_k cos(k1 t1 + k2 t2)``.

    ``coeffs`` maps harmonics to real coefficients; ``(0, 0)`` is the constant.
    """
    out = {}
    for (k1, k2), c in coeffs.items():
        if (k1, k2) == (0, 0):
            out[(0, 0)] = out.get((0, 0), 0) + complex(c)
        else:
            out[(k1, k2)] = out.get((k1, k2), 0) + complex(c)
            out[(-k1, -k2)] = out.get((-k1, -k2), 0) + complex(c)
    return out


def evaluate_laurent(C, t1, t2):
    t1, t2 = np.broadcast_arrays(np.asarray(t1, float), np.asarray(t2, float))
    out = np.zeros(t1.shape, dtype=complex)
    for (k1, k2), c in C.items():
        out += c * np.exp(1j * (k1 * t1 + k2 * t2))
    return out


def mean_log_inner(C, t1):
    """Exact average of ln|P(t1, t2)| over t2 for each sample t1."""
    t1 = np.asarray(t1, dtype=float)
    # exact zeros (vanishing table entries) would otherwise fix a zero leading coefficient
    scale = max(abs(c) for c in C.values())
    C = {k: c for k, c in C.items() if abs(c) > 1e-15 * scale}
    k2s = sorted({k2 for (_, k2) in C})
    lo, hi = k2s[0], k2s[-1]
    deg = hi - lo
    q = np.zeros((t1.shape[0], deg + 1), dtype=complex)
    for (k1, k2), c in C.items():
        q[:, k2 - lo] += c * np.exp(1j * k1 * t1)
    lead = q[:, deg]
    if deg == 0:
        return np.log(np.abs(lead))
    comp = np.zeros((t1.shape[0], deg, deg), dtype=complex)
    comp[:, 0, :] = -q[:, deg - 1 :: -1] / lead[:, None]
    if deg > 1:
        idx = np.arange(deg - 1)
        comp[:, idx + 1, idx] = 1.0
    roots = np.linalg.eigvals(comp)
    return np.log(np.abs(lead)) + np.sum(np.log(np.maximum(1.0, np.abs(roots))), axis=1)


def torus_log_mean(C, tol=1e-13, start_order=32, max_order=1 << 17):
    """Average of ln|P| over the torus.

    Returns ``(value, order, converged, min_sample)``; ``min_sample`` is the
    smallest real part of P on a 64 x 64 check grid, which must be positive
    for a physical free energy away from criticality.
    """
    g = 2 * np.pi * (np.arange(64) + 0.5) / 64
    T1, T2 = np.meshgrid(g, g, indexing="ij")
    min_sample = float(np.min(evaluate_laurent(C, T1, T2).real))
    n = start_order
    prev = None
    while True:
        t1 = 2 * np.pi * (np.arange(n) + 0.5) / n
        val = float(np.mean(mean_log_inner(C, t1)))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val, n, True, min_sample
        if n >= max_order:
            return val, n, False, min_sample
        prev = val
        n *= 2
