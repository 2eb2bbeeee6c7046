"""Lindblad generators for local/collective spin noise and their integration.

Conventions:
  * dissipator D[L]rho = L rho L+ - (1/2){L+L, rho}; a channel rate g is the
    coefficient multiplying D[L].
  * jump operators: collective emission J-, pumping J+, dephasing J_z;
    local emission sigma-^(n), pumping sigma+^(n), dephasing sigma_z^(n)/sqrt(2)
    (one jump per spin, each at the channel rate).
  * estimated parameters enter the Hamiltonian linearly, H = sum_k c_k O_k
    + sum_mu phi_mu O_mu.

Local channels act in the full 2^N product space (permutation symmetry is
broken at the level of individual trajectories); see block_rep for the fast
permutation-invariant representation used by the larger scans.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from . import spin_core
from .spin_core import (
    FULL_SPACE_MATRIX_CAP,
    CollectiveOps,
    SymmetricState,
    collective_full,
    collective_ops,
    pauli_site,
)

SCOPES = ("local", "collective")
KINDS = ("emission", "pumping", "dephasing")
REPRESENTATIONS = ("symmetric", "full")


class RepresentationError(ValueError):
    """Channel requested in a representation that cannot host it."""


class IntegratorError(RuntimeError):
    """The ODE integrator failed to meet its tolerance."""


@dataclass(frozen=True)
class NoiseChannel:
    """One row of the noise-model table: (scope, kind, rate)."""

    scope: str
    kind: str
    rate: float

    def __post_init__(self):
        if self.scope not in SCOPES:
            raise ValueError(f"scope must be one of {SCOPES}")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.rate < 0:
            raise ValueError("rate must be nonnegative")


@dataclass(frozen=True)
class HamiltonianSpec:
    """Static collective terms plus linearly entering estimated parameters."""

    static_terms: tuple = ()       # ((coefficient, tag), ...)
    parameters: tuple = ()         # ((name, tag), ...)

    def __post_init__(self):
        names = [name for name, _ in self.parameters]
        if len(set(names)) != len(names):
            raise ValueError("parameter names must be unique")

    def parameter_names(self) -> list[str]:
        return [name for name, _ in self.parameters]


@dataclass
class DensityMatrix:
    representation: str
    n_spins: int
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def check(self, herm_tol=1e-10, trace_tol=1e-8, eig_tol=1e-8) -> None:
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > herm_tol:
            raise ValueError("density matrix not Hermitian within tolerance")
        if abs(np.trace(m).real - 1.0) > trace_tol:
            raise ValueError("density matrix trace differs from 1")
        if np.linalg.eigvalsh(m).min() < -eig_tol:
            raise ValueError("density matrix has a significantly negative eigenvalue")


@dataclass
class SensitivityBundle:
    """State rho(t) together with its parameter derivatives at one time."""

    state: DensityMatrix
    partials: dict                 # parameter name -> Hermitian traceless matrix
    time: float


def density_from_state(state: SymmetricState, representation="symmetric") -> DensityMatrix:
    n = state.n_spins
    if representation == "symmetric":
        return DensityMatrix("symmetric", n, state.density_matrix())
    if representation == "full":
        if n > FULL_SPACE_MATRIX_CAP:
            raise ValueError(f"n_spins={n} exceeds full-space density-matrix cap")
        vec = spin_core.embed_symmetric(state, n)
        return DensityMatrix("full", n, np.outer(vec, vec.conj()))
    raise ValueError(f"unknown representation {representation!r}")


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def operator_for_tag(tag: str, n_spins: int, representation: str) -> np.ndarray:
    """Collective polynomial tag -> dense matrix in the given representation."""
    if representation == "symmetric":
        return collective_ops(n_spins / 2.0).for_tag(tag)
    if representation == "full":
        jx = collective_full(n_spins, "x").toarray()
        jy = collective_full(n_spins, "y").toarray()
        jz = collective_full(n_spins, "z").toarray()
        ops = CollectiveOps(jx=jx, jy=jy, jz=jz, jplus=jx + 1j * jy,
                            jminus=jx - 1j * jy, jsq=jx @ jx + jy @ jy + jz @ jz)
        return ops.for_tag(tag)
    raise ValueError(f"unknown representation {representation!r}")


def build_jump_operators(channel: NoiseChannel, n_spins: int,
                         representation: str) -> list[tuple[float, sp.csr_matrix]]:
    """Jump operators (rate, L) realizing one noise channel."""
    if representation not in REPRESENTATIONS:
        raise ValueError(f"unknown representation {representation!r}")
    if channel.scope == "local" and representation == "symmetric" and n_spins > 1:
        raise RepresentationError(
            "local channels break permutation symmetry; use the full-space "
            "or block representation for N > 1"
        )
    if channel.scope == "collective":
        if representation == "symmetric":
            ops = collective_ops(n_spins / 2.0)
            mat = {"emission": ops.jminus, "pumping": ops.jplus,
                   "dephasing": ops.jz}[channel.kind]
            return [(channel.rate, sp.csr_matrix(mat))]
        mat = {"emission": collective_full(n_spins, "-"),
               "pumping": collective_full(n_spins, "+"),
               "dephasing": collective_full(n_spins, "z")}[channel.kind]
        return [(channel.rate, mat.tocsr())]
    # local scope
    if n_spins == 1 and representation == "symmetric":
        # single spin: sector and product space coincide
        representation = "full"
    which = {"emission": "-", "pumping": "+", "dephasing": "z"}[channel.kind]
    scale = 1.0 / np.sqrt(2.0) if channel.kind == "dephasing" else 1.0
    return [(channel.rate, (pauli_site(n_spins, site, which) * scale).tocsr())
            for site in range(n_spins)]


def jump_operators_for(channels, n_spins: int, representation: str):
    jumps = []
    for ch in channels:
        jumps.extend(build_jump_operators(ch, n_spins, representation))
    return jumps


# ---------------------------------------------------------------------------
# generator
# ---------------------------------------------------------------------------

class _Generator:
    """Precompiled right-hand side of the master equation."""

    def __init__(self, H, jumps, dim):
        self.dim = dim
        self.H = None if H is None else np.asarray(H, dtype=complex)
        self.terms = []
        acc = sp.csr_matrix((dim, dim), dtype=complex)
        for rate, L in jumps:
            if rate == 0.0:
                continue
            L = sp.csr_matrix(L, dtype=complex)
            self.terms.append((rate, L, L.conj().T.tocsr()))
            acc = acc + rate * (L.conj().T @ L)
        # -(1/2) sum_k g_k L+L enters symmetrically from left and right
        self.half_acc = (0.5 * acc).toarray() if self.terms else None

    def apply(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rho)
        if self.H is not None:
            out += -1j * (self.H @ rho - rho @ self.H)
        for rate, L, Ld in self.terms:
            out += rate * (L @ rho @ Ld)
        if self.half_acc is not None:
            out -= self.half_acc @ rho + rho @ self.half_acc
        return out


def apply_generator(H, jumps, rho: np.ndarray) -> np.ndarray:
    """-i[H, rho] + sum_k g_k (L rho L+ - (1/2){L+L, rho})."""
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    if H is not None and np.asarray(H).shape != rho.shape:
        raise ValueError("dimension mismatch between H and rho")
    for _, L in jumps:
        if L.shape != rho.shape:
            raise ValueError("dimension mismatch between jump operator and rho")
    gen = _Generator(H, jumps, dim)
    return gen.apply(rho)


def _hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2.0


def _integrate(rhs, y0: np.ndarray, times, rtol, atol, method) -> np.ndarray:
    t0, t1 = float(times[0]), float(times[-1])
    if t1 == t0:
        return np.array([y0])
    sol = solve_ivp(rhs, (t0, t1), y0, t_eval=np.asarray(times, dtype=float),
                    method=method, rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegratorError(f"integration failed: {sol.message}")
    return sol.y.T


def evolve(rho0: DensityMatrix, H, channels, time_grid,
           rtol=1e-8, atol=1e-10, method="DOP853") -> list[DensityMatrix]:
    """Integrate the master equation, returning snapshots at the grid times.

    time_grid must be strictly increasing and start at 0.
    """
    times = np.asarray(time_grid, dtype=float)
    if times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise ValueError("time_grid must be strictly increasing and start at 0")
    jumps = jump_operators_for(channels, rho0.n_spins, rho0.representation)
    gen = _Generator(H, jumps, rho0.dim)
    dim = rho0.dim

    def rhs(_t, y):
        rho = y.reshape(dim, dim)
        return gen.apply(rho).ravel()

    ys = _integrate(rhs, rho0.matrix.astype(complex).ravel(), times, rtol, atol, method)
    out = []
    for t, y in zip(times, ys):
        mat = _hermitize(y.reshape(dim, dim))
        out.append(DensityMatrix(rho0.representation, rho0.n_spins, mat))
    return out


def hamiltonian_matrices(spec: HamiltonianSpec, n_spins: int, representation: str,
                         nominal: dict):
    """(H at the nominal point, {parameter -> generator matrix O_mu})."""
    dim = len(operator_for_tag("J_z", n_spins, representation))
    H = np.zeros((dim, dim), dtype=complex)
    for coeff, tag in spec.static_terms:
        H = H + coeff * operator_for_tag(tag, n_spins, representation)
    param_ops = {}
    for name, tag in spec.parameters:
        op = operator_for_tag(tag, n_spins, representation)
        param_ops[name] = op
        H = H + nominal.get(name, 0.0) * op
    return H, param_ops


def evolve_with_sensitivities(rho0: DensityMatrix, spec: HamiltonianSpec,
                              channels, time_grid, nominal=None,
                              rtol=1e-8, atol=1e-10,
                              method="DOP853") -> list[SensitivityBundle]:
    """Jointly propagate rho and its parameter derivatives.

    d(rho)/dt = Ltot[rho];  d(d_mu rho)/dt = -i[O_mu, rho] + Ltot[d_mu rho],
    valid for parameters entering the Hamiltonian linearly and a
    parameter-independent initial state.
    """
    nominal = dict(nominal or {})
    times = np.asarray(time_grid, dtype=float)
    if times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise ValueError("time_grid must be strictly increasing and start at 0")
    names = spec.parameter_names()
    H, param_ops = hamiltonian_matrices(spec, rho0.n_spins, rho0.representation, nominal)
    jumps = jump_operators_for(channels, rho0.n_spins, rho0.representation)
    gen = _Generator(H, jumps, rho0.dim)
    dim = rho0.dim
    n_blocks = 1 + len(names)
    gens = [param_ops[name] for name in names]

    def rhs(_t, y):
        blocks = y.reshape(n_blocks, dim, dim)
        rho = blocks[0]
        out = np.empty_like(blocks)
        out[0] = gen.apply(rho)
        for i, O in enumerate(gens):
            out[i + 1] = -1j * (O @ rho - rho @ O) + gen.apply(blocks[i + 1])
        return out.ravel()

    y0 = np.zeros((n_blocks, dim, dim), dtype=complex)
    y0[0] = rho0.matrix
    ys = _integrate(rhs, y0.ravel(), times, rtol, atol, method)
    bundles = []
    for t, y in zip(times, ys):
        blocks = y.reshape(n_blocks, dim, dim)
        state = DensityMatrix(rho0.representation, rho0.n_spins, _hermitize(blocks[0]))
        partials = {name: _hermitize(blocks[i + 1]) for i, name in enumerate(names)}
        bundles.append(SensitivityBundle(state=state, partials=partials, time=float(t)))
    return bundles


# ---------------------------------------------------------------------------
# superoperator (vectorized) form: dense oracle and steady states
# ---------------------------------------------------------------------------

def liouvillian_matrix(H, jumps, dim: int) -> np.ndarray:
    """Dense superoperator acting on vec(rho) (column-major stacking C-order:
    vec(rho)[i*dim+j] = rho[i,j])."""
    eye = np.eye(dim)
    L_total = np.zeros((dim * dim, dim * dim), dtype=complex)
    if H is not None:
        Hd = np.asarray(H, dtype=complex)
        L_total += -1j * (np.kron(Hd, eye) - np.kron(eye, Hd.T))
    for rate, L in jumps:
        if rate == 0.0:
            continue
        Ld = np.asarray(L.toarray() if sp.issparse(L) else L, dtype=complex)
        A = Ld.conj().T @ Ld
        L_total += rate * (np.kron(Ld, Ld.conj())
                           - 0.5 * np.kron(A, eye) - 0.5 * np.kron(eye, A.T))
    return L_total


def evolve_expm(rho0: DensityMatrix, H, channels, time_grid) -> list[DensityMatrix]:
    """Matrix-exponential propagation of the vectorized Liouvillian.

    Cross-check oracle for dimensions <= 64.
    """
    if rho0.dim > 64:
        raise ValueError("expm oracle limited to dimensions <= 64")
    jumps = jump_operators_for(channels, rho0.n_spins, rho0.representation)
    Lmat = liouvillian_matrix(H, jumps, rho0.dim)
    times = np.asarray(time_grid, dtype=float)
    out = []
    prev_t = 0.0
    vec = rho0.matrix.astype(complex).ravel()
    for t in times:
        if t != prev_t:
            vec = expm(Lmat * (t - prev_t)) @ vec
            prev_t = t
        mat = _hermitize(vec.reshape(rho0.dim, rho0.dim))
        out.append(DensityMatrix(rho0.representation, rho0.n_spins, mat))
    return out


def steady_state(H, channels, n_spins: int, representation: str) -> DensityMatrix:
    """Unique null vector of the Liouvillian, normalized to unit trace."""
    jumps = jump_operators_for(channels, n_spins, representation)
    dim = 2 ** n_spins if representation == "full" else n_spins + 1
    Lmat = liouvillian_matrix(H, jumps, dim)
    _, s, vh = np.linalg.svd(Lmat)
    tol = max(s[0] * 1e-10, 1e-12)
    null_dim = int(np.sum(s < tol))
    if null_dim == 0:
        raise ValueError("no steady state found (generator has trivial null space)")
    if null_dim > 1:
        raise ValueError(f"degenerate steady state: null-space dimension {null_dim}")
    rho = _hermitize(vh[-1].reshape(dim, dim))
    rho = rho / np.trace(rho).real
    result = DensityMatrix(representation, n_spins, rho)
    residual = np.linalg.norm(apply_generator(H, jumps, rho))
    if residual > 1e-10:
        raise ValueError(f"steady-state residual {residual:.2e} too large")
    return result
