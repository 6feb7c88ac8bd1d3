"""Scalar divergences on classical and quantum pairs.

Conventions: natural logarithm throughout. Support-violating pairs are
reported through an explicit flag on the report rather than fed onward as
float infinities.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOLERANCES
from .linalg import (eigh, logm_support, matrix_function, pinv_psd,
                     sqrtm_psd, support_projector, frobenius)
from .states import (ClassicalDistribution, DensityMatrix, Measurement,
                     random_unitary)

SUPPORT_CONTAINED = "contained"
SUPPORT_EQUAL = "equal"
SUPPORT_VIOLATED = "violated"

_SUPPORT_TOL = DEFAULT_TOLERANCES["support"]


@dataclass(frozen=True)
class DivergenceReport:
    """Value in nats plus the support relation that qualifies it."""

    value: float
    support_condition: str
    notes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.support_condition != SUPPORT_VIOLATED and self.value < -1e-10:
            raise ValueError(f"divergence {self.value!r} negative beyond tolerance")

    @property
    def finite(self) -> bool:
        return self.support_condition != SUPPORT_VIOLATED and math.isfinite(self.value)


def support_relation(rho: DensityMatrix, sigma: DensityMatrix) -> str:
    """Classify supp(rho) vs supp(sigma) by projector residuals."""
    proj_s = support_projector(sigma.matrix)
    comp = np.eye(rho.dim) - proj_s
    leak = frobenius(comp @ rho.matrix @ comp)
    if leak > _SUPPORT_TOL:
        return SUPPORT_VIOLATED
    proj_r = support_projector(rho.matrix)
    if frobenius(proj_r - proj_s) <= _SUPPORT_TOL:
        return SUPPORT_EQUAL
    return SUPPORT_CONTAINED


def kl(p: ClassicalDistribution, q: ClassicalDistribution) -> float:
    """Relative entropy sum p (ln p - ln q), with 0 ln 0 = 0.

    Returns +inf when the support of p escapes the support of q.
    """
    if len(p) != len(q):
        raise ValueError(f"length mismatch: {len(p)} vs {len(q)}")
    pv, qv = p.probs, q.probs
    mask = pv > 0
    if np.any(qv[mask] <= 0):
        return math.inf
    return float(np.sum(pv[mask] * (np.log(pv[mask]) - np.log(qv[mask]))))


def _check_dims(rho: DensityMatrix, sigma: DensityMatrix) -> None:
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")


def umegaki(rho: DensityMatrix, sigma: DensityMatrix) -> DivergenceReport:
    """tr rho (ln rho - ln sigma), logarithms restricted to supports."""
    _check_dims(rho, sigma)
    rel = support_relation(rho, sigma)
    if rel == SUPPORT_VIOLATED:
        return DivergenceReport(math.inf, rel, ("support of rho escapes support of sigma",))
    val = np.trace(rho.matrix @ (logm_support(rho.matrix) - logm_support(sigma.matrix)))
    return DivergenceReport(float(val.real), rel)


def rld_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> DivergenceReport:
    """tr rho ln(sqrt(rho) sigma^-1 sqrt(rho)), the upper admissible divergence."""
    _check_dims(rho, sigma)
    rel = support_relation(rho, sigma)
    if rel == SUPPORT_VIOLATED:
        return DivergenceReport(math.inf, rel, ("support of rho escapes support of sigma",))
    sr = sqrtm_psd(rho.matrix)
    inner = sr @ pinv_psd(sigma.matrix) @ sr
    val = np.trace(rho.matrix @ logm_support((inner + inner.conj().T) / 2))
    return DivergenceReport(float(val.real), rel)


def fidelity_logdiv(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """ln of the trace norm of sqrt(rho) sqrt(sigma); always <= 0.

    Monotone in the opposite orientation from the relative entropies; kept as
    the counterexample functional for the continuity axiom, -inf on pairs
    with orthogonal supports.
    """
    _check_dims(rho, sigma)
    prod = sqrtm_psd(rho.matrix) @ sqrtm_psd(sigma.matrix)
    tn = float(np.linalg.svd(prod, compute_uv=False).sum())
    if tn <= 0.0:
        return -math.inf
    return float(np.log(tn))


def dmax(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Max-relative entropy ln lambda_max(sigma^-1/2 rho sigma^-1/2).

    The smallest a with rho <= e^a sigma; +inf when sigma's support does not
    carry rho.
    """
    _check_dims(rho, sigma)
    if support_relation(rho, sigma) == SUPPORT_VIOLATED:
        return math.inf
    isq = matrix_function(sigma.matrix, lambda x: x ** -0.5, support_only=True)
    inner = isq @ rho.matrix @ isq
    w, _ = eigh((inner + inner.conj().T) / 2)
    top = float(w[-1])
    if top <= 0.0:
        return -math.inf
    return float(np.log(top))


# ---------------------------------------------------------------------------
# measured divergence lower bound


def _basis_measurement(v: np.ndarray) -> Measurement:
    d = v.shape[0]
    return Measurement(tuple(np.outer(v[:, k], v[:, k].conj()) for k in range(d)))


def _projective_kl(v: np.ndarray, rho: np.ndarray, sigma: np.ndarray) -> float:
    p = np.einsum("ik,ij,jk->k", v.conj(), rho, v).real
    q = np.einsum("ik,ij,jk->k", v.conj(), sigma, v).real
    p = np.maximum(p, 0.0)
    q = np.maximum(q, 0.0)
    mask = p > 1e-300
    if np.any(q[mask] <= 0):
        return math.inf
    return float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask]))))


def measured_div_lower(rho: DensityMatrix, sigma: DensityMatrix,
                       budget: int = 500, seed: int = 0) -> tuple[float, Measurement]:
    """Best KL found over rank-1 projective measurements.

    Seeded random restarts plus a local unitary perturbation search, spending
    at most `budget` KL evaluations. A heuristic lower bound for the measured
    divergence, not a certified optimum.
    """
    _check_dims(rho, sigma)
    rng = np.random.default_rng(seed)
    d = rho.dim
    r, s = rho.matrix, sigma.matrix

    # Deterministic starts: eigenbases of rho, sigma, their difference, and a
    # generic combination (recovers a common eigenbasis on commuting pairs
    # even when one spectrum is degenerate).
    starts = [eigh(r).eigenvectors, eigh(s).eigenvectors,
              eigh(r - s).eigenvectors, eigh(r + np.sqrt(2.0) * s).eigenvectors]
    evals = 0
    best_v, best = None, -math.inf
    for v in starts:
        if evals >= budget:
            break
        val = _projective_kl(v, r, s)
        evals += 1
        if val > best and math.isfinite(val):
            best, best_v = val, v
    while evals < max(budget // 4, 8) and evals < budget:
        v = random_unitary(d, rng)
        val = _projective_kl(v, r, s)
        evals += 1
        if val > best and math.isfinite(val):
            best, best_v = val, v

    step, stale = 0.3, 0
    while evals < budget:
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = (g + g.conj().T) / 2
        w, u = np.linalg.eigh(h)
        rot = (u * np.exp(1j * step * w)) @ u.conj().T
        cand = rot @ best_v
        val = _projective_kl(cand, r, s)
        evals += 1
        if val > best and math.isfinite(val):
            best, best_v = val, cand
            stale = 0
        else:
            stale += 1
            if stale >= 12:
                step = max(step * 0.5, 1e-4)
                stale = 0
    return best, _basis_measurement(best_v)
