"""Classical Fisher information, SLD/RLD operators, the monotone metric
family, integral divergences, and the multi-parameter lower bound.

Every metric in the family is determined by an operator monotone function f
with f(1) = 1 and f(x) = x f(1/x); the metric value in the eigenbasis of rho
is sum over (j, k) of conj(X_jk) Y_jk / (lam_k f(lam_j / lam_k)).
"""

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES, SUPPORT_RTOL
from .errors import RankError, SupportViolationError
from .linalg import (eigh, frobenius, matrix_function, pinv_psd,
                     support_projector, trace_norm)
from .states import (ClassicalDistribution, DensityMatrix, Measurement,
                     TangentDirection, measure, measure_tangent)

_OP_RESID = DEFAULT_TOLERANCES["operator_residual"]


def _h_ratio(x: np.ndarray, beta: float) -> np.ndarray:
    """beta (x - 1) / (x^beta - 1), continued to 1 at x = 1; beta = 0 gives
    (x - 1)/ln x. Second-order series near x = 1 avoids cancellation."""
    x = np.asarray(x, dtype=float)
    u = x - 1.0
    out = np.empty_like(u)
    if beta == 1.0:
        out[...] = 1.0
        return out
    small = np.abs(u) < 1e-6
    big = ~small
    if beta == 0.0:
        out[big] = u[big] / np.log(x[big])
    else:
        out[big] = beta * u[big] / np.expm1(beta * np.log1p(u[big]))
    b1 = beta - 1.0
    out[small] = 1.0 - b1 * u[small] / 2 + (b1 * b1 / 4 - b1 * (beta - 2.0) / 6) * u[small] ** 2
    return out


def f_alpha(x, alpha: float, normalized: bool = True):
    """Two-parameter operator monotone family, |alpha| <= 3.

    Normalized so f(1) = 1, which makes alpha = +-3 coincide with the RLD
    function 2x/(x+1) and alpha = +-1 with the BKM function (x-1)/ln x.
    With normalized=False the raw product form is returned (its value at 1
    is (4 - alpha^2)/(1 - alpha^2), divergent at alpha = +-1).
    """
    if abs(alpha) > 3:
        raise ValueError(f"alpha must lie in [-3, 3], got {alpha}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("f_alpha needs positive arguments")
    val = _h_ratio(arr, (1 - alpha) / 2) * _h_ratio(arr, (1 + alpha) / 2)
    if not normalized:
        denom = (1 - alpha * alpha)
        if denom == 0:
            raise ValueError("unnormalized form diverges at alpha = +-1")
        val = val * (4 - alpha * alpha) / denom
    return val if isinstance(x, np.ndarray) else float(val)


@dataclass(frozen=True)
class MetricSpec:
    """A monotone metric, named by its operator monotone function."""

    name: str
    f: Callable[[np.ndarray], np.ndarray]


def sld_metric() -> MetricSpec:
    return MetricSpec("sld", lambda x: (np.asarray(x, dtype=float) + 1) / 2)


def rld_metric() -> MetricSpec:
    return MetricSpec("rld", lambda x: 2 * np.asarray(x, dtype=float) / (np.asarray(x, dtype=float) + 1))


def bkm_metric() -> MetricSpec:
    return MetricSpec("bkm", lambda x: _h_ratio(x, 0.0))


def wy_metric() -> MetricSpec:
    return MetricSpec("wy", lambda x: f_alpha(x, 0.0))


def alpha_metric(alpha: float) -> MetricSpec:
    if abs(alpha) > 3:
        raise ValueError(f"alpha must lie in [-3, 3], got {alpha}")
    return MetricSpec(f"alpha={alpha:g}", lambda x, a=alpha: f_alpha(x, a))


def custom_metric(f: Callable[[np.ndarray], np.ndarray], name: str = "custom") -> MetricSpec:
    """Wrap a user-supplied operator monotone f; checks normalization and the
    symmetry f(x) = x f(1/x) on a grid (not operator monotonicity itself)."""
    grid = np.linspace(0.05, 20.0, 97)
    fx = np.asarray(f(grid), dtype=float)
    if abs(float(f(np.array([1.0]))[0]) - 1.0) > 1e-10:
        raise ValueError("custom metric function must satisfy f(1) = 1")
    sym = np.abs(grid * np.asarray(f(1.0 / grid), dtype=float) - fx).max()
    if sym > 1e-10:
        raise ValueError(f"custom metric function breaks f(x) = x f(1/x): defect {sym:.3e}")
    return MetricSpec(name, f)


def named_metric(name: str) -> MetricSpec:
    """Resolve 'sld' | 'rld' | 'bkm' | 'wy' | 'alpha=A'."""
    key = name.lower()
    table = {"sld": sld_metric, "rld": rld_metric, "bkm": bkm_metric, "wy": wy_metric}
    if key in table:
        return table[key]()
    if key.startswith("alpha="):
        return alpha_metric(float(key.split("=", 1)[1]))
    raise ValueError(f"unknown metric spec {name!r}")


# ---------------------------------------------------------------------------
# classical Fisher information


def classical_fisher(p: ClassicalDistribution, dps: Sequence[np.ndarray]) -> np.ndarray:
    """J_ij = sum_x dp_i(x) dp_j(x) / p(x); requires dp = 0 off the support."""
    pv = p.probs
    mat = np.zeros((len(dps), len(dps)))
    cols = []
    for dp in dps:
        dp = np.asarray(dp, dtype=float)
        if dp.shape != pv.shape:
            raise ValueError(f"tangent length {dp.shape} != distribution length {pv.shape}")
        if abs(dp.sum()) > 1e-9:
            raise ValueError(f"tangent must sum to 0, got {dp.sum():.3e}")
        off = np.abs(dp[pv <= 0]).max(initial=0.0)
        if off > 0:
            raise SupportViolationError(f"tangent weight {off:.3e} outside the support: Fisher information infinite")
        cols.append(dp)
    mask = pv > 0
    for i, di in enumerate(cols):
        for j in range(i, len(cols)):
            val = float(np.sum(di[mask] * cols[j][mask] / pv[mask]))
            mat[i, j] = mat[j, i] = val
    return mat


def classical_fisher_scalar(p: ClassicalDistribution, dp: np.ndarray) -> float:
    return float(classical_fisher(p, [dp])[0, 0])


# ---------------------------------------------------------------------------
# logarithmic derivative operators


def sld_operator(rho: DensityMatrix, x: TangentDirection) -> np.ndarray:
    """Symmetric logarithmic derivative: L_jk = 2 X_jk / (lam_j + lam_k) in
    rho's eigenbasis, zero-filled where the denominator vanishes."""
    lam, v = rho.eigensystem()
    xt = v.conj().T @ x.matrix @ v
    den = lam[:, None] + lam[None, :]
    cut = SUPPORT_RTOL * max(float(lam.max()), 0.0)
    l = np.where(den > cut, 2 * xt / np.where(den > cut, den, 1.0), 0.0)
    out = v @ l @ v.conj().T
    return (out + out.conj().T) / 2


def sld_defect(rho: DensityMatrix, x: TangentDirection, l: np.ndarray) -> float:
    """Residual of the defining equation, ||(L rho + rho L)/2 - X||_F."""
    return frobenius((l @ rho.matrix + rho.matrix @ l) / 2 - x.matrix)


def rld_operator(rho: DensityMatrix, x: TangentDirection) -> np.ndarray:
    """Right logarithmic derivative L = X rho^-1; exists iff X lives on the
    support of rho."""
    proj = support_projector(rho.matrix)
    comp = np.eye(rho.dim) - proj
    resid = frobenius(comp @ x.matrix @ comp)
    if resid > _OP_RESID:
        raise SupportViolationError(
            f"tangent leaks off the support of rho (residual {resid:.3e}): RLD does not exist")
    l = proj @ x.matrix @ pinv_psd(rho.matrix)
    err = frobenius(l @ rho.matrix - proj @ x.matrix @ proj)
    if err > 1e-9 * (1 + frobenius(x.matrix)):
        raise SupportViolationError(f"RLD residual {err:.3e} exceeds tolerance")
    return l


# ---------------------------------------------------------------------------
# the metric family


def petz_metric(spec: MetricSpec, rho: DensityMatrix, x: TangentDirection,
                y: TangentDirection | None = None) -> complex:
    """Metric value g^f_rho(X, Y); real for X = Y."""
    y = x if y is None else y
    lam, v = rho.eigensystem()
    if lam[0] <= SUPPORT_RTOL * lam[-1]:
        raise RankError("petz_metric needs full-rank rho; restrict to the support first")
    xt = v.conj().T @ x.matrix @ v
    yt = v.conj().T @ y.matrix @ v
    ratio = lam[:, None] / lam[None, :]
    kernel = 1.0 / (lam[None, :] * np.asarray(spec.f(ratio), dtype=float))
    return complex(np.sum(np.conj(xt) * yt * kernel))


def metric_scalar(spec: MetricSpec, rho: DensityMatrix, x: TangentDirection) -> float:
    return float(petz_metric(spec, rho, x).real)


def sld_optimal_measurement(rho: DensityMatrix, x: TangentDirection) -> tuple[Measurement, float]:
    """Projective measurement in the SLD eigenbasis; its classical Fisher
    information equals the SLD metric value."""
    lam, _ = rho.eigensystem()
    if lam[0] <= SUPPORT_RTOL * lam[-1]:
        raise RankError("sld_optimal_measurement needs full-rank rho")
    l = sld_operator(rho, x)
    _, basis = eigh(l)
    effects = tuple(np.outer(basis[:, k], basis[:, k].conj()) for k in range(rho.dim))
    m = Measurement(effects)
    p = measure(m, rho)
    dp = measure_tangent(m, x)
    achieved = classical_fisher_scalar(p, dp - dp.sum() / dp.size)
    return m, achieved


# ---------------------------------------------------------------------------
# multi-parameter RLD matrix and the weighted trace bound


def rld_matrix(rho: DensityMatrix, tangents: Sequence[TangentDirection]) -> np.ndarray:
    """Complex Fisher matrix J_ij = tr(rho L_j^dag L_i) for RLD operators."""
    ls = [rld_operator(rho, x) for x in tangents]
    m = len(ls)
    j = np.empty((m, m), dtype=complex)
    for i in range(m):
        for k in range(i, m):
            j[i, k] = np.trace(rho.matrix @ ls[k].conj().T @ ls[i])
            j[k, i] = np.conj(j[i, k])
    return j


def _check_weight(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or np.abs(g - g.T).max() > 1e-10:
        raise ValueError("weight matrix must be real symmetric")
    w = np.linalg.eigvalsh(g)
    if w.min() < -1e-12 * max(abs(w).max(), 1.0):
        raise ValueError(f"weight matrix must be PSD, min eigenvalue {w.min():.3e}")
    return g


def holevo_rld_bound(g: np.ndarray, j: np.ndarray) -> float:
    """tr(G Re J) + trace norm of sqrt(G) Im J sqrt(G), the scalarized lower
    bound on any real Fisher matrix dominating J."""
    g = _check_weight(g)
    sg = matrix_function(g.astype(complex), np.sqrt, support_only=True).real
    k = sg @ np.imag(j) @ sg
    return float(np.trace(g @ np.real(j)) + trace_norm(k))


def holevo_rld_minimizer(g: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Real symmetric J* >= J attaining the bound: Re J + G^-1/2 |K| G^-1/2
    with K = sqrt(G) Im J sqrt(G)."""
    g = _check_weight(g)
    sg = matrix_function(g.astype(complex), np.sqrt, support_only=True).real
    isg = matrix_function(g.astype(complex), lambda v: 1 / np.sqrt(v), support_only=True).real
    k = sg @ np.imag(j) @ sg
    k = (k - k.T) / 2   # antisymmetric by construction; drop roundoff dust
    absk = matrix_function((1j * k).astype(complex), np.abs)
    return np.real(np.real(j) + isg @ absk @ isg)


# ---------------------------------------------------------------------------
# divergences induced by integrating a metric along the mixture path


def integral_divergence(spec: MetricSpec, rho: DensityMatrix, sigma: DensityMatrix,
                        nodes: int = 64) -> float:
    """Divergence from the double integral of the metric along the segment
    s rho + (1 - s) sigma, reduced to int_0^1 (1 - s) g(s) ds.

    Gauss-Legendre, node count doubling from `nodes` until successive
    estimates differ by less than the quadrature tolerance or 1024 nodes.
    """
    if nodes < 2:
        raise ValueError("need at least 2 quadrature nodes")
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    for nm, state in (("rho", rho), ("sigma", sigma)):
        lam, _ = state.eigensystem()
        if lam[0] <= SUPPORT_RTOL * lam[-1]:
            raise RankError(f"integral_divergence needs full-rank states; {nm} is singular")
    diff = rho.matrix - sigma.matrix

    def estimate(n_nodes: int) -> float:
        xs, ws = np.polynomial.legendre.leggauss(n_nodes)
        total = 0.0
        for xi, wi in zip(0.5 * (xs + 1), 0.5 * ws):
            lam, v = eigh(xi * rho.matrix + (1 - xi) * sigma.matrix)
            xt = v.conj().T @ diff @ v
            ratio = lam[:, None] / lam[None, :]
            kernel = 1.0 / (lam[None, :] * np.asarray(spec.f(ratio), dtype=float))
            total += wi * (1 - xi) * float(np.sum(np.conj(xt) * xt * kernel).real)
        return total

    step_tol = DEFAULT_TOLERANCES["quadrature_step"]
    prev = estimate(nodes)
    n = nodes
    while n < 1024:
        n *= 2
        cur = estimate(n)
        if abs(cur - prev) < step_tol:
            return cur
        prev = cur
    return prev
