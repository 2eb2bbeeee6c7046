"""Quantum Fisher information, Cramer-Rao bounds and optimal-time scans.

The spectral-sum QFI/QFIM evaluators work on (rho, d rho) pairs from any
representation; block-decomposed states are handled by summing per-block
contributions weighted with the block multiplicities (the derivative shares
the block structure, so no cross-block matrix elements arise).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_EIGEN_CUTOFF = 1e-12


class EndpointMaximumError(RuntimeError):
    """The scanned maximum sits on a grid endpoint; widen the grid."""


@dataclass
class QfiCurve:
    times: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)


@dataclass
class QfimMatrix:
    entries: np.ndarray            # 3x3 (or PxP) real symmetric
    nominal: dict
    time: float


@dataclass
class SldSet:
    operators: dict                # name -> Hermitian matrix
    incompatibility: dict          # (name, name) -> |Tr(rho [L_mu, L_nu])|


@dataclass
class WeightedBound:
    value: float
    condition_number: float


@dataclass
class ScanResult:
    n_spins: int
    q_max: float
    t_opt: float
    channel: str

    @property
    def g_max(self) -> float:
        return self.q_max / self.t_opt ** 2


def _check_hermitian(m: np.ndarray, tol: float, what: str) -> None:
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise ValueError(f"{what} is not Hermitian within {tol}")


def qfi(rho: np.ndarray, drho: np.ndarray,
        eigen_cutoff: float = DEFAULT_EIGEN_CUTOFF) -> float:
    """Q = 2 sum_{k,l} |<k|drho|l>|^2 / (lambda_k + lambda_l), pairs above cutoff."""
    _check_hermitian(rho, 1e-8, "rho")
    _check_hermitian(drho, 1e-8, "drho")
    evals, evecs = np.linalg.eigh((rho + rho.conj().T) / 2.0)
    d = evecs.conj().T @ drho @ evecs
    denom = evals[:, None] + evals[None, :]
    mask = denom > eigen_cutoff
    return float(2.0 * np.sum(np.abs(d[mask]) ** 2 / denom[mask]))


def qfim(rho: np.ndarray, drhos: dict,
         eigen_cutoff: float = DEFAULT_EIGEN_CUTOFF) -> np.ndarray:
    """QFI matrix over the given parameter derivatives (ordered by dict)."""
    _check_hermitian(rho, 1e-8, "rho")
    evals, evecs = np.linalg.eigh((rho + rho.conj().T) / 2.0)
    names = list(drhos)
    mats = [evecs.conj().T @ drhos[name] @ evecs for name in names]
    denom = evals[:, None] + evals[None, :]
    mask = denom > eigen_cutoff
    inv = np.where(mask, 1.0 / np.where(mask, denom, 1.0), 0.0)
    P = len(names)
    Q = np.zeros((P, P))
    for i in range(P):
        for k in range(i, P):
            val = 2.0 * np.sum((mats[i] * mats[k].conj() * inv)[mask]).real
            Q[i, k] = Q[k, i] = val
    return Q


def qfi_blocks(blocks, dblocks, degeneracies,
               eigen_cutoff: float = DEFAULT_EIGEN_CUTOFF) -> float:
    """QFI of a block-diagonal state: multiplicity-weighted per-block sums."""
    total = 0.0
    for d, b, db in zip(degeneracies, blocks, dblocks):
        total += d * qfi(b, db, eigen_cutoff)
    return total


def qfim_blocks(blocks, dblocks_by_name, degeneracies,
                eigen_cutoff: float = DEFAULT_EIGEN_CUTOFF) -> np.ndarray:
    names = list(dblocks_by_name)
    P = len(names)
    Q = np.zeros((P, P))
    for i, (d, b) in enumerate(zip(degeneracies, blocks)):
        partials = {name: dblocks_by_name[name][i] for name in names}
        Q += d * qfim(b, partials, eigen_cutoff)
    return Q


def sld_and_compatibility(rho: np.ndarray, drhos: dict,
                          eigen_cutoff: float = DEFAULT_EIGEN_CUTOFF) -> SldSet:
    """Symmetric logarithmic derivatives and the pairwise Im-part measure.

    L_mu is built in the eigenbasis of rho, (L_mu)_kl = 2 (drho_mu)_kl /
    (lambda_k + lambda_l) on supported pairs and zero elsewhere;
    incompatibility(mu, nu) = |Tr(rho [L_mu, L_nu])|.
    """
    evals, evecs = np.linalg.eigh((rho + rho.conj().T) / 2.0)
    denom = evals[:, None] + evals[None, :]
    mask = denom > eigen_cutoff
    ops = {}
    for name, drho in drhos.items():
        d = evecs.conj().T @ drho @ evecs
        L = np.where(mask, 2.0 * d / np.where(mask, denom, 1.0), 0.0)
        ops[name] = evecs @ L @ evecs.conj().T
    names = list(drhos)
    incompat = {}
    for i, mu in enumerate(names):
        for nu in names[i + 1:]:
            comm = ops[mu] @ ops[nu] - ops[nu] @ ops[mu]
            incompat[(mu, nu)] = float(abs(np.trace(rho @ comm)))
    return SldSet(operators=ops, incompatibility=incompat)


def weighted_qcrb(Q: np.ndarray, W=None, repetitions: int = 1,
                  pinv_cutoff: float = 1e-10) -> WeightedBound:
    """Tr(W pinv(Q)) / M via eigenvalue pseudo-inversion.

    pinv_cutoff is relative to the largest eigenvalue of Q.  Returns an
    infinite bound when Q lies entirely below the cutoff.
    """
    Q = np.asarray(Q, dtype=float)
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if W is None:
        W = np.eye(Q.shape[0])
    W = np.asarray(W, dtype=float)
    if np.linalg.eigvalsh((W + W.T) / 2.0).min() < -1e-12:
        raise ValueError("weight matrix must be PSD")
    evals, evecs = np.linalg.eigh((Q + Q.T) / 2.0)
    lam_max = float(evals.max(initial=0.0))
    cut = pinv_cutoff * lam_max
    supported = evals > cut
    if not np.any(supported):
        return WeightedBound(value=float("inf"), condition_number=float("inf"))
    inv = np.zeros_like(evals)
    inv[supported] = 1.0 / evals[supported]
    pinv = evecs @ np.diag(inv) @ evecs.T
    cond = lam_max / float(evals[supported].min())
    return WeightedBound(value=float(np.trace(W @ pinv)) / repetitions,
                         condition_number=cond)


def gain_curve(q: QfiCurve) -> QfiCurve:
    """G(t) = Q(t)/t^2; requires strictly positive sample times."""
    if np.any(q.times <= 0):
        raise ValueError("gain requires t > 0 (exclude the origin)")
    return QfiCurve(times=q.times, values=q.values / q.times ** 2,
                    metadata=dict(q.metadata, quantity="gain"))


def integrated_gain(g: QfiCurve, T: float = 50.0) -> float:
    """Composite trapezoid of G over samples up to T."""
    mask = g.times <= T + 1e-12
    return float(np.trapezoid(g.values[mask], g.times[mask]))


def refine_maximum(f, t_lo: float, t_hi: float, tol: float = 1e-4) -> tuple[float, float]:
    """Golden-section maximization of f on [t_lo, t_hi]."""
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = t_lo, t_hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    t_star = (a + b) / 2.0
    return t_star, f(t_star)


def scan_optimal_time(curve: QfiCurve, evaluator, channel: str,
                      n_spins: int, refine_tol: float = 1e-4) -> ScanResult:
    """Locate (Q_max, t_opt) on a sampled curve, refining continuously.

    `evaluator(t)` recomputes Q at an arbitrary time (re-running the
    evolution); the sampled maximum must be interior to the grid.
    """
    k = int(np.argmax(curve.values))
    if k == 0 or k == len(curve.values) - 1:
        raise EndpointMaximumError(
            f"maximum at grid endpoint t={curve.times[k]}; widen the time grid"
        )
    t_star, q_star = refine_maximum(evaluator, curve.times[k - 1],
                                    curve.times[k + 1], refine_tol)
    if q_star < curve.values[k]:
        t_star, q_star = float(curve.times[k]), float(curve.values[k])
    return ScanResult(n_spins=n_spins, q_max=float(q_star),
                      t_opt=float(t_star), channel=channel)
