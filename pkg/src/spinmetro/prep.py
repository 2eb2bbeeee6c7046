"""Probe preparation by one-axis and two-axis twisting.

All twisting exponentials are evaluated by exact Hermitian diagonalization
of the generator (dimension <= N+1), never by series expansion.  Preparation
is noiseless; dissipation applies only during sensing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spin_core import SymmetricState, basis_state, collective_ops, ghz_axis, multi_ghz

TWIST_KINDS = ("OAT", "TAT_minus", "TAT_plus")

_GENERATOR_TAG = {
    "OAT": "J_x^2",
    "TAT_minus": "J_x^2-J_y^2",
    "TAT_plus": "J_x^2+J_z^2",
}


@dataclass(frozen=True)
class TwistingSpec:
    kind: str
    chi_t: float

    def __post_init__(self):
        if self.kind not in TWIST_KINDS:
            raise ValueError(f"kind must be one of {TWIST_KINDS}")


def _twist_unitary_apply(kind: str, chi_t: float, amps: np.ndarray) -> np.ndarray:
    j = (len(amps) - 1) / 2.0
    G = collective_ops(j).for_tag(_GENERATOR_TAG[kind])
    evals, evecs = np.linalg.eigh(G)
    phases = np.exp(-1j * chi_t * evals)
    return evecs @ (phases * (evecs.conj().T @ amps))


def oat_evolve(n_spins: int, chi_t: float) -> SymmetricState:
    """exp(-i chi_t J_x^2) applied to the coherent state |j, -j>."""
    if n_spins < 2:
        raise ValueError("need n_spins >= 2")
    start = basis_state(n_spins / 2.0, -n_spins / 2.0)
    amps = _twist_unitary_apply("OAT", chi_t, start.amplitudes)
    return SymmetricState(n_spins, amps).normalized()


def tat_evolve(initial: SymmetricState, kind: str, chi_t: float) -> SymmetricState:
    """exp(-i chi_t G) |initial> with G selected by the twisting kind."""
    if kind not in TWIST_KINDS:
        raise ValueError(f"kind must be one of {TWIST_KINDS}")
    amps = _twist_unitary_apply(kind, chi_t, initial.amplitudes)
    return SymmetricState(initial.two_j, amps).normalized()


def fidelity(a: SymmetricState, b: SymmetricState) -> float:
    """|<a|b>|^2."""
    return float(abs(a.inner(b)) ** 2)


def _component_matrix(n_spins: int) -> np.ndarray:
    """Columns: GHZ_x, GHZ_y, GHZ_z amplitudes."""
    return np.stack([ghz_axis(n_spins, ax).amplitudes for ax in "xyz"], axis=1)


def multi_ghz_fidelity(state: SymmetricState) -> tuple[float, np.ndarray]:
    """Best overlap with a phase-adjusted multi-GHZ target.

    The target is (GHZ_x + e^{i a} GHZ_y + e^{i b} GHZ_z)/norm with the two
    relative phases chosen to maximize the overlap; the optimum is found by
    projecting the state onto the span of the three components and reading
    the phases off the projection coefficients.

    Returns (fidelity, component phases (0, a, b)).
    """
    C = _component_matrix(state.n_spins)          # (dim, 3)
    G = C.conj().T @ C                            # Gram matrix
    y = C.conj().T @ state.amplitudes
    # least-squares projection of |state> onto span{components}; the phases
    # of the projection coefficients are the optimal component phases
    coef = np.linalg.solve(G, y)
    if np.max(np.abs(coef)) < 1e-14:
        return 0.0, np.zeros(3)
    phases = np.angle(coef) - np.angle(coef[0])
    phases[0] = 0.0
    target = C @ np.exp(1j * phases)
    target /= np.linalg.norm(target)
    fid = float(abs(np.vdot(target, state.amplitudes)) ** 2)
    return fid, phases


def _golden_section(f, lo: float, hi: float, tol: float) -> float:
    """Maximize a unimodal f on [lo, hi]."""
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
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
    return (a + b) / 2.0


def find_multi_ghz_time(n_spins: int, chi_t_grid) -> tuple[float, float, np.ndarray]:
    """Locate the TAT time maximizing overlap with a multi-GHZ target.

    Scans the grid, then refines around the best grid point by golden
    section to 1e-6.  Returns (chi_t_star, fidelity_star, component_phases).
    Low fidelity is reported, never raised.
    """
    grid = np.asarray(chi_t_grid, dtype=float)
    if grid.size == 0 or np.any(grid < 0):
        raise ValueError("chi_t_grid must be nonempty and nonnegative")
    start = ghz_axis(n_spins, "z")

    def fid_at(chi_t: float) -> float:
        return multi_ghz_fidelity(tat_evolve(start, "TAT_minus", chi_t))[0]

    values = np.array([fid_at(ct) for ct in grid])
    k = int(np.argmax(values))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    if lo == hi:
        chi_star = grid[k]
    else:
        chi_star = _golden_section(fid_at, lo, hi, 1e-6)
        if fid_at(chi_star) < values[k]:
            chi_star = grid[k]
    fid_star, phases = multi_ghz_fidelity(tat_evolve(start, "TAT_minus", chi_star))
    return float(chi_star), float(fid_star), phases
