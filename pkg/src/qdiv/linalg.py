"""Dense complex Hermitian linear algebra used by every other module.

All functions accept and return plain complex ndarrays. Eigendecompositions
are deterministic: ascending eigenvalues with each eigenvector's phase fixed
so its largest-magnitude component is real positive.
"""

from typing import Callable, NamedTuple

import numpy as np

from .config import HERMITICITY_RTOL, PSD_CLIP_RTOL, SUPPORT_RTOL
from .errors import (EigenSolverError, FactorSolveError, MatrixDomainError,
                     PSDViolationError, RankError)


class EigenSystem(NamedTuple):
    eigenvalues: np.ndarray   # real, ascending
    eigenvectors: np.ndarray  # unitary; column j pairs with eigenvalue j


def hermitian_defect(m: np.ndarray) -> float:
    """max |m[j,k] - conj(m[k,j])|."""
    return float(np.abs(m - m.conj().T).max()) if m.size else 0.0


def check_hermitian(m: np.ndarray, rtol: float = HERMITICITY_RTOL, what: str = "matrix") -> np.ndarray:
    m = np.ascontiguousarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError(f"{what} contains non-finite entries")
    scale = max(float(np.abs(m).max()), 1.0)
    defect = hermitian_defect(m)
    if defect > rtol * scale:
        raise ValueError(f"{what} is not Hermitian: defect {defect:.3e} exceeds {rtol:.0e} * {scale:.3e}")
    return (m + m.conj().T) / 2


def _canonical_phases(v: np.ndarray) -> np.ndarray:
    # Rotate each column so its largest-magnitude component is real positive.
    idx = np.abs(v).argmax(axis=0)
    lead = v[idx, np.arange(v.shape[1])]
    phase = np.where(np.abs(lead) > 0, lead / np.abs(np.where(np.abs(lead) > 0, lead, 1.0)), 1.0)
    return v / phase


def eigh(h: np.ndarray) -> EigenSystem:
    """Deterministic Hermitian eigendecomposition, eigenvalues ascending."""
    h = check_hermitian(h, what="eigh input")
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigh failed to converge on a {h.shape[0]}x{h.shape[0]} matrix") from exc
    return EigenSystem(w, _canonical_phases(v))


def support_cutoff(eigenvalues: np.ndarray) -> float:
    top = float(eigenvalues.max(initial=0.0))
    return SUPPORT_RTOL * top if top > 0 else 0.0


def clip_psd_eigenvalues(w: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Zero out roundoff-negative eigenvalues; reject genuine violations."""
    top = float(w.max(initial=0.0))
    floor = -PSD_CLIP_RTOL * max(top, 1e-300)
    wmin = float(w.min(initial=0.0))
    if wmin < floor:
        raise PSDViolationError(f"{what} has eigenvalue {wmin:.3e} below the clip floor {floor:.3e}")
    return np.maximum(w, 0.0)


def matrix_function(h: np.ndarray, fn: Callable[[np.ndarray], np.ndarray],
                    support_only: bool = False) -> np.ndarray:
    """V diag(fn(w)) V^dag; with support_only, fn acts on eigenvalues above
    the support cutoff and the rest map to zero."""
    w, v = eigh(h)
    if support_only:
        cut = support_cutoff(w)
        keep = w > cut
        fw = np.zeros_like(w)
        if keep.any():
            vals = fn(w[keep])
            if not np.all(np.isfinite(vals)):
                bad = w[keep][~np.isfinite(np.atleast_1d(vals))][0]
                raise MatrixDomainError(f"function not finite at supported eigenvalue {bad!r}")
            fw[keep] = vals
    else:
        with np.errstate(all="ignore"):
            fw = np.asarray(fn(w), dtype=float)
        if not np.all(np.isfinite(fw)):
            bad = w[~np.isfinite(fw)][0]
            raise MatrixDomainError(f"function not finite at eigenvalue {bad!r}")
    return (v * fw) @ v.conj().T


def sqrtm_psd(h: np.ndarray) -> np.ndarray:
    return matrix_function(h, np.sqrt, support_only=True)


def pinv_psd(h: np.ndarray) -> np.ndarray:
    """Moore-Penrose inverse of a PSD matrix via its support."""
    return matrix_function(h, lambda x: 1.0 / x, support_only=True)


def logm_support(h: np.ndarray) -> np.ndarray:
    """Logarithm on the support of a PSD matrix, zero on the kernel."""
    return matrix_function(h, np.log, support_only=True)


def positive_part(h: np.ndarray) -> np.ndarray:
    return matrix_function(h, lambda x: np.maximum(x, 0.0))


def support_projector(h: np.ndarray) -> np.ndarray:
    w, v = eigh(h)
    keep = w > support_cutoff(w)
    cols = v[:, keep]
    return cols @ cols.conj().T


def support_rank(h: np.ndarray) -> int:
    w, _ = eigh(h)
    return int(np.sum(w > support_cutoff(w)))


def polar_unitary(t: np.ndarray) -> np.ndarray:
    """Unitary U such that T @ U is Hermitian positive semidefinite.

    From the SVD T = W S Vh the answer is U = Vh^dag W^dag, giving
    T U = W S W^dag. Requires full rank.
    """
    t = np.asarray(t, dtype=complex)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValueError(f"polar_unitary needs a square matrix, got {t.shape}")
    w, s, vh = np.linalg.svd(t)
    if s[-1] <= SUPPORT_RTOL * s[0]:
        raise RankError(f"polar_unitary needs full rank; singular values range [{s[-1]:.3e}, {s[0]:.3e}]")
    u = vh.conj().T @ w.conj().T
    prod = t @ u
    defect = hermitian_defect(prod)
    if defect > 1e-10 * max(1.0, float(np.abs(prod).max())):
        raise EigenSolverError(f"polar product not Hermitian: defect {defect:.3e}")
    return u


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values."""
    m = np.asarray(m, dtype=complex)
    return float(np.linalg.svd(m, compute_uv=False).sum())


def frobenius(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def hermitian_factor_solve(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Hermitian L with B L = A, when A B^dag is Hermitian and im A <= im B.

    Construction mirrors the existence proof: compact SVD B = U X V, a row
    frame Vt for the complement of V's row space, a least-squares C with
    A = B C, and
        L = V^dag X^-1 U^dag A B^dag U X^-1 V
            + Vt^dag Vt C^dag V^dag V + V^dag V C Vt^dag Vt.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: A {a.shape} vs B {b.shape}")
    scale = max(float(np.abs(a).max(initial=0.0)), float(np.abs(b).max(initial=0.0)), 1.0)

    ab = a @ b.conj().T
    defect = hermitian_defect(ab)
    if defect > tol * scale * scale:
        raise FactorSolveError(f"A B^dag is not Hermitian: residual {defect:.3e}")

    u_full, s, vh_full = np.linalg.svd(b)
    rank = int(np.sum(s > SUPPORT_RTOL * s[0])) if s.size and s[0] > 0 else 0
    if rank == 0:
        raise FactorSolveError("B is zero; factor solve undefined")
    u, x, v = u_full[:, :rank], s[:rank], vh_full[:rank, :]
    vt = vh_full[rank:, :]

    # image containment: (1 - P_B) A must vanish
    pb = u @ u.conj().T
    resid = frobenius(a - pb @ a)
    if resid > tol * scale:
        raise FactorSolveError(f"im A not contained in im B: projector residual {resid:.3e}")

    c = np.linalg.lstsq(b, a, rcond=None)[0]
    xinv = 1.0 / x
    core = (v.conj().T * xinv) @ u.conj().T @ ab @ u @ (xinv[:, None] * v)
    pv = v.conj().T @ v
    pvt = vt.conj().T @ vt if vt.size else np.zeros_like(pv)
    l = core + pvt @ c.conj().T @ pv + pv @ c @ pvt
    l = (l + l.conj().T) / 2

    err = frobenius(b @ l - a)
    if err > tol * (1 + frobenius(a)):
        raise FactorSolveError(f"factor solve residual {err:.3e} exceeds tolerance")
    return l
