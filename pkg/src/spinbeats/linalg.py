"""Small dense complex linear algebra used throughout the package.

Operators, unitaries and density matrices are plain ``numpy`` complex arrays.
The Hermitian eigensolver is a cyclic Jacobi iteration; matrices here never
exceed a few dozen rows so the quadratic sweep cost is irrelevant.
"""
from __future__ import annotations

import string
from functools import reduce
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10


class DimensionError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {m.shape}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = as_matrix(a)
    return a.shape[0] == a.shape[1] and float(np.max(np.abs(a - dagger(a)), initial=0.0)) < tol


def kron(*factors) -> np.ndarray:
    """Kronecker product of one or more matrices, left factor most significant."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    return reduce(np.kron, (np.asarray(f) for f in factors))


def jacobi_eigh(h, tol: float = 1e-15, max_sweeps: int = 64):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(w, v)`` with ascending real eigenvalues ``w`` and unitary ``v``
    such that ``h = v @ diag(w) @ v^H``.
    """
    a = as_matrix(h).copy()
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionError("matrix must be square")
    if not is_hermitian(a, tol=max(HERMITIAN_TOL, 1e-12 * np.abs(a).max(initial=0.0))):
        raise NotHermitianError("jacobi_eigh requires a Hermitian matrix")
    a = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return np.real(np.diag(a)).copy(), v

    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a[offdiag])
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= tol * scale * 1e-3:
                    continue
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                theta = 0.5 * np.arctan2(2.0 * r, app - aqq)
                c, s = np.cos(theta), np.sin(theta)
                # phase-strip the (p, q) element, then a real Givens rotation
                g = np.array([[c, -s], [s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = dagger(g) @ a[idx, :]
                v[:, idx] = v[:, idx] @ g
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


class HermitianPropagator:
    """Cache of ``exp(-i h t)`` built from a single eigen-decomposition of ``h``."""

    def __init__(self, h):
        h = as_matrix(h)
        if not is_hermitian(h, tol=max(HERMITIAN_TOL, 1e-12 * np.abs(h).max(initial=0.0))):
            raise NotHermitianError("propagator requires a Hermitian generator")
        self.h = h
        self.energies, self.vectors = jacobi_eigh(h)

    def unitary(self, t: float) -> np.ndarray:
        phases = np.exp(-1j * self.energies * t)
        return (self.vectors * phases) @ dagger(self.vectors)


def hermitian_evolve(h, t: float) -> np.ndarray:
    """Return ``U = exp(-i h t)`` for Hermitian ``h``."""
    return HermitianPropagator(h).unitary(t)


def conjugate(rho: np.ndarray, u: np.ndarray) -> np.ndarray:
    return u @ rho @ dagger(u)


def _check_dims(rho: np.ndarray, dims: Sequence[int]) -> None:
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise DimensionError(f"dims {list(dims)} do not match matrix shape {rho.shape}")


def partial_trace(rho, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` lists subsystem dimensions in tensor order; the kept subsystems
    appear in the result in ascending index order.
    """
    rho = as_matrix(rho)
    dims = [int(d) for d in dims]
    _check_dims(rho, dims)
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {n} subsystems")

    letters = string.ascii_letters
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    t = np.einsum("".join(row) + "".join(col) + "->" + out, rho.reshape(dims + dims))
    d = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(d, d)


def apply_kraus(rho, kraus: Sequence[np.ndarray], targets: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Apply ``sum_k K rho K^H`` with each ``K`` acting on the ``targets`` subsystems."""
    rho = as_matrix(rho)
    dims = [int(d) for d in dims]
    _check_dims(rho, dims)
    targets = [int(t) for t in targets]
    n = len(dims)
    tdims = [dims[t] for t in targets]
    tsize = int(np.prod(tdims))

    letters = string.ascii_letters
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    new_row = list(row)
    new_col = list(col)
    k_out = letters[2 * n:2 * n + len(targets)]
    k_out_c = letters[2 * n + len(targets):2 * n + 2 * len(targets)]
    for j, t in enumerate(targets):
        new_row[t] = k_out[j]
        new_col[t] = k_out_c[j]
    k_sub = k_out + "".join(row[t] for t in targets)
    kc_sub = k_out_c + "".join(col[t] for t in targets)
    spec = f"{k_sub},{''.join(row)}{''.join(col)},{kc_sub}->{''.join(new_row)}{''.join(new_col)}"

    tensor = rho.reshape(dims + dims)
    acc = np.zeros_like(tensor)
    for k in kraus:
        k = np.asarray(k, dtype=complex)
        if k.shape != (tsize, tsize):
            raise DimensionError(f"operator shape {k.shape} does not act on target dims {tdims}")
        kt = k.reshape(tdims + tdims)
        acc += np.einsum(spec, kt, tensor, np.conj(kt))
    return acc.reshape(rho.shape)


def apply_unitary(rho, u: np.ndarray, targets: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    return apply_kraus(rho, [u], targets, dims)


def embed(op: np.ndarray, target: int, dims: Sequence[int]) -> np.ndarray:
    """Lift a single-subsystem operator to the full tensor-product space."""
    factors = [op if i == target else np.eye(d) for i, d in enumerate(dims)]
    return kron(*factors)


def validate_density_matrix(rho, tol_herm: float = HERMITIAN_TOL, tol_trace: float = TRACE_TOL,
                            tol_pos: float = POSITIVITY_TOL) -> np.ndarray:
    """Return ``rho`` as an array, raising ``ValueError`` if it is not a valid state."""
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise DimensionError("density matrix must be square")
    if not is_hermitian(rho, tol_herm):
        raise NotHermitianError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol_trace:
        raise ValueError(f"density matrix trace {tr!r} differs from 1")
    lo = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0]
    if lo < -tol_pos:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")
    return rho


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Full-rank (by default) random state ``A A^H / tr`` with complex Gaussian ``A``."""
    k = dim if rank is None else rank
    a = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    rho = a @ dagger(a)
    return rho / np.trace(rho).real


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (a + dagger(a))
