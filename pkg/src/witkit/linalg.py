"""Dense complex linear algebra for few-qubit operators.

Everything targets square matrices of dimension 2 to 8: Kronecker
products, partial transposition, a self-contained Hermitian eigensolver
(cyclic Jacobi with complex rotations), and a numerical rank for small
families of real matrices or vectors.

Convention: the first tensor factor is the most significant subsystem,
so a computational basis index reads left to right as parties A, B, C.
All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import math

import numpy as np

HERMITICITY_TOL = 1e-10
RANK_TOL = 1e-8
JACOBI_TOL = 1e-13


def as_matrix(m) -> np.ndarray:
    """Coerce to a square complex ndarray."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def hermiticity_defect(m) -> float:
    """Max entrywise |M - M^dagger|."""
    a = as_matrix(m)
    return float(np.abs(a - a.conj().T).max())


def is_hermitian(m, tol: float = HERMITICITY_TOL) -> bool:
    return hermiticity_defect(m) <= tol


def kron(a, b) -> np.ndarray:
    """Kronecker product, first factor most significant."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(factors) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    factors = list(factors)
    if not factors:
        raise ValueError("kron_all needs at least one factor")
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, as_matrix(f))
    return out


def partial_transpose(m, party: int, local_dims) -> np.ndarray:
    """Transpose the indices of one subsystem only.

    ``local_dims`` lists the subsystem dimensions in tensor order; their
    product must equal the matrix dimension.  Applying the map twice
    returns the input exactly.
    """
    a = as_matrix(m)
    dims = [int(d) for d in local_dims]
    total = int(np.prod(dims))
    if total != a.shape[0]:
        raise ValueError(f"local dims {dims} do not match matrix dim {a.shape[0]}")
    if not 0 <= party < len(dims):
        raise ValueError(f"party index {party} out of range for {len(dims)} parties")
    n = len(dims)
    t = a.reshape(dims + dims)
    axes = list(range(2 * n))
    axes[party], axes[n + party] = axes[n + party], axes[party]
    return np.ascontiguousarray(t.transpose(axes).reshape(total, total))


def jacobi_eigh(m, tol: float = JACOBI_TOL, max_sweeps: int = 100):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as columns.  Sweeps stop once the off-diagonal Frobenius
    norm drops below ``tol`` times the Frobenius norm of the input.
    """
    h = as_matrix(m).copy()
    n = h.shape[0]
    v = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(h))
    if scale == 0.0:
        return np.zeros(n), v
    skip = tol * scale / (4 * n * n)
    for _ in range(max_sweeps):
        off = h - np.diag(np.diag(h))
        if np.linalg.norm(off) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = abs(h[p, q])
                if b <= skip:
                    continue
                phase = h[p, q] / b
                tau = (h[q, q].real - h[p, p].real) / (2.0 * b)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(tau, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                sp = (t * c) * phase
                col_p = h[:, p] * c - h[:, q] * np.conj(sp)
                col_q = h[:, p] * sp + h[:, q] * c
                h[:, p], h[:, q] = col_p, col_q
                row_p = h[p, :] * c - h[q, :] * sp
                row_q = h[p, :] * np.conj(sp) + h[q, :] * c
                h[p, :], h[q, :] = row_p, row_q
                vcol_p = v[:, p] * c - v[:, q] * np.conj(sp)
                vcol_q = v[:, p] * sp + v[:, q] * c
                v[:, p], v[:, q] = vcol_p, vcol_q
    else:
        raise RuntimeError("Jacobi eigensolver did not converge")
    vals = np.real(np.diag(h))
    order = np.argsort(vals, kind="stable")
    return vals[order], v[:, order]


def hermitian_eigenvalues(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, sorted ascending.

    Raises ``ValueError`` if the input is not Hermitian within ``tol``.
    """
    a = as_matrix(m)
    if hermiticity_defect(a) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    vals, _ = jacobi_eigh((a + a.conj().T) / 2.0)
    return vals


def numerical_rank(vectors, tol: float = RANK_TOL) -> int:
    """Dimension of the span of a family of real matrices or vectors.

    Counts the singular values of the stacked (flattened) family above
    ``tol`` times the largest one.  All inputs must share one shape.
    """
    items = [np.asarray(v, dtype=float) for v in vectors]
    if not items:
        raise ValueError("numerical_rank needs a nonempty family")
    shape = items[0].shape
    if any(v.shape != shape for v in items):
        raise ValueError("all inputs must have the same shape")
    stacked = np.vstack([v.ravel() for v in items])
    svals = np.linalg.svd(stacked, compute_uv=False)
    if svals.size == 0 or svals[0] == 0.0:
        return 0
    return int(np.sum(svals > tol * svals[0]))
