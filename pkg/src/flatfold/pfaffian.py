"""Pfaffian of a dense antisymmetric matrix.

Parlett-Reid style elimination with partial pivoting: each step pivots the
largest entry of the current column into the super-diagonal position, records
the 2x2 block and eliminates the remaining rows with a skew-symmetric rank-2
update.  Cost is O(n^3), comparable to an LU factorization.
"""

import numpy as np


def pfaffian(A, check=True):
    """Pfaffian of the antisymmetric matrix ``A`` (real or complex)."""
    A = np.array(A, dtype=complex if np.iscomplexobj(A) else float, copy=True)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise ValueError("pfaffian needs a square matrix")
    if check:
        scale = max(np.max(np.abs(A)), 1.0) if n else 1.0
        if np.max(np.abs(A + A.T), initial=0.0) > 1e-12 * scale:
            raise ValueError("matrix is not antisymmetric")
    if n % 2:
        return A.dtype.type(0)
    pf = A.dtype.type(1)
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(A[k + 1 :, k])))
        if kp != k + 1:
            A[[k + 1, kp], :] = A[[kp, k + 1], :]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            pf = -pf
        piv = A[k, k + 1]
        if piv == 0:
            return A.dtype.type(0)
        pf *= piv
        if k + 2 < n:
            tau = A[k, k + 2 :] / piv
            col = A[k + 2 :, k + 1]
            A[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return pf
