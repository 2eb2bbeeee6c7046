"""Permutation-invariant block representation for local noise at larger N.

Uniform-rate local channels commute with spin permutations, so a state that
starts permutation invariant (any symmetric-sector probe) stays inside the
Schur-Weyl commutant: rho = sum_j rho_j (x) I_{d_j} over total-spin blocks j,
with d_j the multiplicity of each block.  Storing one (2j+1)x(2j+1) matrix
per block reduces N=10 local-noise dynamics from a 2^20-dimensional
Liouvillian to dimension sum_j (2j+1)^2 = 286.

The reduced maps for local channels are *derived numerically* by applying
the exact full-space dissipator to a basis of invariant operators and
projecting back, so no Clebsch-Gordan coefficient algebra enters; the
construction is validated against full-space evolution in the test suite.

Vectorization convention is row-major throughout: vec(rho)[i*n+j] = rho_ij,
hence (A rho B) -> kron(A, B.T) vec(rho).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, sqrt

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from .spin_core import SymmetricState, collective_full, collective_ops, pauli_site

BLOCK_N_CAP = 12


def block_two_js(n_spins: int) -> tuple[int, ...]:
    """Doubled total-spin labels N, N-2, ..., (1 or 0), descending."""
    return tuple(range(n_spins, -1, -2))


def block_degeneracy(n_spins: int, two_j: int) -> int:
    k = (n_spins - two_j) // 2
    d = comb(n_spins, k)
    if k > 0:
        d -= comb(n_spins, k - 1)
    return d


@dataclass(frozen=True)
class BlockBasis:
    """Aligned (j, m, alpha) basis of the 2^N space, grouped by magnetization.

    sector_indices[k] lists the computational-basis states with k down spins;
    vectors[(two_j, a)] holds the d_j copies of |j, m=j-a> restricted to
    their magnetization sector (columns are the alpha copies, aligned across
    m by explicit lowering from the highest weight).
    """

    n_spins: int
    two_js: tuple
    degeneracies: tuple
    sector_indices: tuple
    vectors: dict

    @property
    def block_dims(self) -> tuple:
        return tuple(tj + 1 for tj in self.two_js)

    @property
    def size(self) -> int:
        return sum(d * d for d in self.block_dims)

    def offsets(self) -> list[int]:
        offs, acc = [], 0
        for d in self.block_dims:
            offs.append(acc)
            acc += d * d
        return offs

    def sector_of(self, two_j: int, a: int) -> int:
        """Down-spin count of |j, m=j-a>:  k = (N - 2m)/2."""
        two_m = two_j - 2 * a
        return (self.n_spins - two_m) // 2


@lru_cache(maxsize=None)
def block_basis(n_spins: int) -> BlockBasis:
    if n_spins > BLOCK_N_CAP:
        raise ValueError(f"n_spins={n_spins} exceeds block-representation cap")
    dim = 2 ** n_spins
    popcounts = np.array([bin(i).count("1") for i in range(dim)])
    sectors = tuple(np.nonzero(popcounts == k)[0] for k in range(n_spins + 1))

    jm = collective_full(n_spins, "-")
    jz = collective_full(n_spins, "z")
    jp = collective_full(n_spins, "+")
    jsq = (jp @ jm + jz @ jz - jz).tocsr()   # J^2 = J+J- + Jz^2 - Jz
    two_js = block_two_js(n_spins)
    degens = tuple(block_degeneracy(n_spins, tj) for tj in two_js)

    vectors: dict = {}
    for tj, d_j in zip(two_js, degens):
        j = tj / 2.0
        k_top = (n_spins - tj) // 2
        idx = sectors[k_top]
        sub = jsq[np.ix_(idx, idx)].toarray()
        evals, evecs = np.linalg.eigh((sub + sub.conj().T) / 2.0)
        mask = np.abs(evals - j * (j + 1)) < 1e-6
        if int(mask.sum()) != d_j:
            raise RuntimeError(
                f"J^2 sector decomposition found {int(mask.sum())} copies of "
                f"j={j}, expected {d_j}"
            )
        v = evecs[:, mask]                   # (dim_sector, d_j), m = +j
        vectors[(tj, 0)] = v.astype(complex)
        # lower the aligned copies step by step
        for a in range(1, tj + 1):
            m = j - (a - 1)
            k_src, k_dst = k_top + a - 1, k_top + a
            jm_block = jm[np.ix_(sectors[k_dst], sectors[k_src])]
            coeff = sqrt(j * (j + 1) - m * (m - 1))
            vectors[(tj, a)] = (jm_block @ vectors[(tj, a - 1)]) / coeff
    return BlockBasis(n_spins=n_spins, two_js=two_js, degeneracies=degens,
                      sector_indices=sectors, vectors=vectors)


# ---------------------------------------------------------------------------
# reduced maps
# ---------------------------------------------------------------------------

def _entry_index(basis: BlockBasis, tj: int, a: int, b: int) -> int:
    blk = basis.two_js.index(tj)
    return basis.offsets()[blk] + a * (tj + 1) + b


@lru_cache(maxsize=None)
def local_dissipator_matrix(n_spins: int, kind: str) -> np.ndarray:
    """Reduced superoperator of sum_n D[L_n] at unit rate, on the block rep.

    kind 'emission' -> L_n = sigma-^(n); 'pumping' -> sigma+^(n);
    'dephasing' -> sigma_z^(n)/sqrt(2).
    """
    basis = block_basis(n_spins)
    N = n_spins
    sectors = basis.sector_indices
    size = basis.size
    offsets = basis.offsets()
    D = np.zeros((size, size), dtype=complex)

    if kind == "dephasing":
        # sector-restricted sigma_z diagonals (+1 up / -1 down per site)
        zdiags = []
        for k in range(N + 1):
            idx = sectors[k]
            zdiags.append(np.array(
                [[1.0 if not (state >> (N - 1 - site)) & 1 else -1.0
                  for state in idx] for site in range(N)]
            ))
        # bit order must match pauli_site's kron convention: site 0 leftmost
    else:
        which = "-" if kind == "emission" else "+"
        shift = 1 if kind == "emission" else -1
        restricted = {}
        for site in range(N):
            op = pauli_site(N, site, which).tocsr()
            for k in range(N + 1):
                k2 = k + shift
                if 0 <= k2 <= N:
                    restricted[(site, k)] = op[np.ix_(sectors[k2], sectors[k])]

    def acc_rate(k: int) -> float:
        # diagonal of sum_n L+L within sector k
        if kind == "emission":
            return float(N - k)          # number of up spins
        if kind == "pumping":
            return float(k)              # number of down spins
        return N / 2.0                   # dephasing with L = sigma_z/sqrt(2)

    for blk, tj in enumerate(basis.two_js):
        d_j = basis.degeneracies[blk]
        bdim = tj + 1
        for a in range(bdim):
            for b in range(bdim):
                col = offsets[blk] + a * bdim + b
                ka, kb = basis.sector_of(tj, a), basis.sector_of(tj, b)
                va, vb = basis.vectors[(tj, a)], basis.vectors[(tj, b)]
                E = va @ vb.conj().T
                # anticommutator part stays in (ka, kb): scalar multiple of E
                D[col, col] += -0.5 * (acc_rate(ka) + acc_rate(kb))
                # jump part
                if kind == "dephasing":
                    X = 0.5 * sum(
                        (zdiags[ka][site][:, None] * E) * zdiags[kb][site][None, :]
                        for site in range(N)
                    )
                    k1, k2 = ka, kb
                else:
                    shift = 1 if kind == "emission" else -1
                    k1, k2 = ka + shift, kb + shift
                    if not (0 <= k1 <= N and 0 <= k2 <= N):
                        continue
                    X = sum(
                        restricted[(site, ka)] @ E @ restricted[(site, kb)].conj().T
                        for site in range(N)
                    )
                    X = np.asarray(X)
                # project X (supported on sector pair (k1, k2)) back onto the basis
                m1, m2 = N - 2 * k1, N - 2 * k2       # doubled magnetizations
                for tjp, d_jp in zip(basis.two_js, basis.degeneracies):
                    if tjp < abs(m1) or tjp < abs(m2):
                        continue
                    ap = (tjp - m1) // 2
                    bp = (tjp - m2) // 2
                    w1 = basis.vectors[(tjp, ap)]
                    w2 = basis.vectors[(tjp, bp)]
                    c = np.trace(w1.conj().T @ X @ w2) / d_jp
                    D[_entry_index(basis, tjp, ap, bp), col] += c
    return D


class _TrivialOps:
    """Spin-0 block: every collective operator is the 1x1 zero matrix."""

    def __init__(self):
        zero = np.zeros((1, 1), dtype=complex)
        self.jx = self.jy = self.jz = self.jplus = self.jminus = zero

    def for_tag(self, tag: str) -> np.ndarray:
        return np.zeros((1, 1), dtype=complex)


def _block_ops(two_j: int):
    return _TrivialOps() if two_j == 0 else collective_ops(two_j / 2.0)


def _block_commutator_super(H: np.ndarray) -> np.ndarray:
    n = H.shape[0]
    eye = np.eye(n)
    return -1j * (np.kron(H, eye) - np.kron(eye, H.T))


def _block_dissipator_super(L: np.ndarray) -> np.ndarray:
    n = L.shape[0]
    eye = np.eye(n)
    A = L.conj().T @ L
    return (np.kron(L, L.conj())
            - 0.5 * np.kron(A, eye) - 0.5 * np.kron(eye, A.T))


def _blockwise(basis: BlockBasis, per_block) -> np.ndarray:
    """Assemble a block-diagonal superoperator from a map two_j -> matrix."""
    mats = [per_block(tj) for tj in basis.two_js]
    out = np.zeros((basis.size, basis.size), dtype=complex)
    for off, tj, m in zip(basis.offsets(), basis.two_js, mats):
        d2 = (tj + 1) ** 2
        out[off:off + d2, off:off + d2] = m
    return out


def hamiltonian_blocks(static_terms, nominal_terms, basis: BlockBasis):
    """Per-block Hamiltonian matrices from (coefficient, tag) pairs."""
    def H_for(tj):
        ops = _block_ops(tj)
        H = np.zeros((tj + 1, tj + 1), dtype=complex)
        for coeff, tag in list(static_terms) + list(nominal_terms):
            H = H + coeff * ops.for_tag(tag)
        return H
    return {tj: H_for(tj) for tj in basis.two_js}


def reduced_liouvillian(basis: BlockBasis, ham_blocks: dict, channels) -> np.ndarray:
    """Dense reduced generator combining Hamiltonian, collective and local noise."""
    L = _blockwise(basis, lambda tj: _block_commutator_super(ham_blocks[tj]))
    for ch in channels:
        if ch.rate == 0.0:
            continue
        if ch.scope == "collective":
            def diss(tj, kind=ch.kind):
                ops = _block_ops(tj)
                mat = {"emission": ops.jminus, "pumping": ops.jplus,
                       "dephasing": ops.jz}[kind]
                return _block_dissipator_super(mat)
            L = L + ch.rate * _blockwise(basis, diss)
        else:
            L = L + ch.rate * local_dissipator_matrix(basis.n_spins, ch.kind)
    return L


def reduced_commutator(basis: BlockBasis, tag: str) -> np.ndarray:
    """Reduced superoperator of rho -> -i[O_tag, rho] for a collective tag."""
    def per_block(tj):
        return _block_commutator_super(_block_ops(tj).for_tag(tag))
    return _blockwise(basis, per_block)


# ---------------------------------------------------------------------------
# states and propagation
# ---------------------------------------------------------------------------

@dataclass
class BlockState:
    """rho = (+)_j  r_j (x) I_{d_j}: one matrix per total-spin block."""

    basis: BlockBasis
    coeffs: np.ndarray             # flat vector, length basis.size

    def blocks(self) -> list[np.ndarray]:
        out = []
        for off, tj in zip(self.basis.offsets(), self.basis.two_js):
            d = tj + 1
            out.append(self.coeffs[off:off + d * d].reshape(d, d))
        return out

    def trace(self) -> float:
        return float(sum(d * np.trace(b).real
                         for d, b in zip(self.basis.degeneracies, self.blocks())))

    def top_block(self) -> np.ndarray:
        """Symmetric-sector (j = N/2) block in Dicke order."""
        return self.blocks()[0]

    def to_full(self) -> np.ndarray:
        """Expand into the 2^N product space (validation helper)."""
        N = self.basis.n_spins
        dim = 2 ** N
        rho = np.zeros((dim, dim), dtype=complex)
        for tj, block in zip(self.basis.two_js, self.blocks()):
            for a in range(tj + 1):
                for b in range(tj + 1):
                    if block[a, b] == 0.0:
                        continue
                    va = self.basis.vectors[(tj, a)]
                    vb = self.basis.vectors[(tj, b)]
                    ia = self.basis.sector_indices[self.basis.sector_of(tj, a)]
                    ib = self.basis.sector_indices[self.basis.sector_of(tj, b)]
                    rho[np.ix_(ia, ib)] += block[a, b] * (va @ vb.conj().T)
        return rho


def block_state_from_symmetric(state: SymmetricState) -> BlockState:
    basis = block_basis(state.n_spins)
    coeffs = np.zeros(basis.size, dtype=complex)
    d = state.dim
    coeffs[:d * d] = state.density_matrix().ravel()
    return BlockState(basis, coeffs)


class Propagator:
    """exp(L t) applied to vectors by Pade scaling-and-squaring.

    Sensitivity generators are block triangular with repeated spectrum
    (hence defective: secular t*exp(lambda t) modes), so eigendecomposition
    is deliberately avoided.  Uniform grids reuse a single step matrix.
    """

    def __init__(self, L: np.ndarray):
        self.L = np.ascontiguousarray(L)

    def apply(self, t: float, y0: np.ndarray) -> np.ndarray:
        if t == 0.0:
            return y0.copy()
        return expm(self.L * t) @ y0

    def grid(self, times, y0: np.ndarray) -> np.ndarray:
        """Propagate along a strictly increasing grid (t >= 0)."""
        times = np.asarray(times, dtype=float)
        out = np.empty((len(times), y0.size), dtype=complex)
        out[0] = self.apply(times[0], y0)
        steps = np.diff(times)
        uniform = steps.size and np.allclose(steps, steps[0], rtol=1e-12, atol=0)
        P = expm(self.L * steps[0]) if uniform else None
        y = out[0].copy()
        for i, h in enumerate(steps, start=1):
            y = (P @ y) if P is not None else expm(self.L * h) @ y
            out[i] = y
        return out


def sensitivity_generator(basis: BlockBasis, L_red: np.ndarray,
                          param_tags: list[str]) -> np.ndarray:
    """Block-triangular generator for (rho, d_mu rho) joint propagation."""
    M = basis.size
    n = 1 + len(param_tags)
    big = np.zeros((n * M, n * M), dtype=complex)
    for i in range(n):
        big[i * M:(i + 1) * M, i * M:(i + 1) * M] = L_red
    for i, tag in enumerate(param_tags, start=1):
        big[i * M:(i + 1) * M, 0:M] = reduced_commutator(basis, tag)
    return big
