"""Complete elliptic integrals by the arithmetic-geometric mean.

Arguments are the modulus k (K(k) = int_0^{pi/2} (1 - k^2 sin^2)^(-1/2)), not
the parameter m = k^2.  The defect-density series 4y^4 - 4y^8 + 16y^12 - ...
only comes out with the modulus reading, which fixes the convention.

Every function also takes the complementary modulus k' directly, because the
densities need K near k = 1, where 1 - k^2 loses all precision.
"""

from __future__ import annotations

import math


def agm(a, b, tol=1e-16):
    """Arithmetic-geometric mean of two non-negative numbers."""
    if a < 0 or b < 0:
        raise ValueError("agm needs non-negative arguments")
    for _ in range(64):
        if abs(a - b) <= tol * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def _kprime(k, kprime):
    if kprime is not None:
        if not 0 <= kprime <= 1:
            raise ValueError("complementary modulus must lie in [0, 1]")
        return float(kprime)
    if not 0 <= abs(k) <= 1:
        raise ValueError("modulus must satisfy |k| <= 1")
    return math.sqrt((1 - k) * (1 + k))


def _agm_sum(k, kp):
    """K and sum_n 2^(n-1) c_n^2 with c_{n+1} = c_n^2 / (4 a_{n+1}) (no cancellation)."""
    if kp == 0:
        return math.inf, 1.0
    a, b = 1.0, kp
    c = k if k is not None else math.sqrt((1 - kp) * (1 + kp))
    s = 0.5 * c * c
    p = 0.5
    for _ in range(64):
        a_next = 0.5 * (a + b)
        c = c * c / (4 * a_next)
        b = math.sqrt(a * b)
        a = a_next
        p *= 2
        term = p * c * c
        s += term
        if term <= 1e-17 * s and abs(a - b) <= 1e-16 * a:
            break
    return math.pi / (2 * a), s


def ellipk(k=None, kprime=None):
    """K in the modulus convention; K(0) = pi/2, diverges as k -> 1."""
    kp = _kprime(k if k is not None else 0.0, kprime)
    if kp == 0:
        return math.inf
    return math.pi / (2 * agm(1.0, kp))


def ellipe(k=None, kprime=None):
    """E in the modulus convention; E(0) = pi/2, E(1) = 1."""
    kp = _kprime(k if k is not None else 0.0, kprime)
    if kp == 0:
        return 1.0
    K, s = _agm_sum(abs(k) if k is not None else None, kp)
    return K * (1 - s)


def ellipk_minus_e(k=None, kprime=None):
    """K - E computed as K * sum_n 2^(n-1) c_n^2, accurate for small k."""
    kp = _kprime(k if k is not None else 0.0, kprime)
    if kp == 0:
        return math.inf
    K, s = _agm_sum(abs(k) if k is not None else None, kp)
    return K * s
