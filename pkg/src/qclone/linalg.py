"""Dense complex linear algebra on small spaces.

All matrices are plain ``numpy`` ``complex128`` arrays. Qubit ordering is
big-endian: subsystem 0 is the most significant tensor factor, so the basis
state ``|q0 q1 q2>`` has index ``4*q0 + 2*q1 + q2``.
"""
from functools import reduce

import numpy as np

from .errors import DimensionError, NotHermitianError

ATOL = 1e-10


def as_matrix(m):
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def dagger(m):
    return np.conj(np.asarray(m)).T


def close(a, b, atol=ATOL):
    """Entrywise comparison with an absolute tolerance."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= atol))


def is_hermitian(m, atol=ATOL):
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and close(m, dagger(m), atol)


def is_unitary(m, atol=ATOL):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return close(dagger(m) @ m, np.eye(m.shape[0]), atol)


def tensor_product(*mats):
    """Kronecker product, first argument most significant."""
    if not mats:
        raise DimensionError("tensor_product needs at least one operand")
    return reduce(np.kron, (np.asarray(m, dtype=np.complex128) for m in mats))


def partial_trace(m, dims, keep):
    """Trace out every subsystem of ``m`` not listed in ``keep``.

    ``dims`` lists the subsystem dimensions in tensor order; the kept
    subsystems stay in their original relative order.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    n = len(dims)
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise DimensionError(f"matrix shape {m.shape} does not match subsystem dims {dims}")
    keep = sorted(set(keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {n} subsystems")

    t = m.reshape(dims + dims)
    row = list(range(n))
    col = [n + i for i in range(n)]
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = row + col
    out_idx = [row[i] for i in keep] + [col[i] for i in keep]
    kd = int(np.prod([dims[i] for i in keep])) if keep else 1
    r = np.einsum(t, out, out_idx)
    return np.asarray(r).reshape(kd, kd)


def eig_hermitian(m, atol=ATOL):
    """Eigenvalues (ascending) and unitary eigenvector matrix of a Hermitian matrix."""
    m = as_matrix(m)
    if not is_hermitian(m, atol):
        raise NotHermitianError("eig_hermitian requires a Hermitian matrix")
    w, v = np.linalg.eigh((m + dagger(m)) / 2)
    return w, v


def svd(m):
    """Return ``(U, S, V)`` with ``m = U @ S @ V``; S real, descending, diagonal."""
    m = as_matrix(m)
    u, s, vh = np.linalg.svd(m)
    return u, np.diag(s).astype(np.complex128), vh


def sqrtm_psd(m, clamp=1e-12):
    """Positive square root of a positive semidefinite matrix.

    Eigenvalues in ``[-clamp, 0)`` are treated as roundoff and set to zero.
    """
    w, v = eig_hermitian(m)
    if w.min() < -clamp:
        raise NotHermitianError(f"matrix is not positive semidefinite (min eigenvalue {w.min():.3e})")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ dagger(v)


def trace_distance(rho, sigma):
    d = as_matrix(rho) - as_matrix(sigma)
    w = np.linalg.eigvalsh((d + dagger(d)) / 2)
    return 0.5 * float(np.sum(np.abs(w)))


def ket_fidelity(a, b):
    """``|<a|b>|^2`` for normalized kets; insensitive to global phase."""
    return float(abs(np.vdot(a, b)) ** 2)


def projector(ket):
    ket = np.asarray(ket, dtype=np.complex128).reshape(-1)
    return np.outer(ket, np.conj(ket))


def contract_subsystems(vec, dims, measured, ket):
    """Apply ``<ket|`` on the ``measured`` subsystems of a vector (or of each column).

    ``vec`` has leading dimension ``prod(dims)``; an optional trailing axis is
    treated as a batch (e.g. the two columns of an isometry). The result keeps
    the unmeasured subsystems in their original order.
    """
    vec = np.asarray(vec, dtype=np.complex128)
    dims = list(dims)
    n = len(dims)
    measured = list(measured)
    rest = [i for i in range(n) if i not in measured]
    batch = vec.shape[1:]
    t = vec.reshape(dims + list(batch))
    t = np.moveaxis(t, measured + rest, list(range(n)))
    md = int(np.prod([dims[i] for i in measured]))
    rd = int(np.prod([dims[i] for i in rest])) if rest else 1
    t = t.reshape((md, rd) + batch)
    bra = np.conj(np.asarray(ket, dtype=np.complex128).reshape(-1))
    if bra.shape != (md,):
        raise DimensionError(f"ket of length {bra.shape[0]} does not match measured dimension {md}")
    return np.tensordot(bra, t, axes=(0, 0))
