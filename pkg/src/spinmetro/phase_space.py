"""Husimi sphere distributions, Bloch vectors and density-matrix snapshots."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spin_core import SymmetricState, coherent_amplitudes

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass
class SphereGrid:
    thetas: np.ndarray             # n_theta values in [0, pi]
    phis: np.ndarray               # n_phi values in [0, 2*pi)
    values: np.ndarray             # (n_theta, n_phi), nonnegative

    def normalization(self, two_j: int) -> float:
        """(2j+1)/(4 pi) * integral of Q over the sphere.

        Composite Simpson in theta (sin-weighted), exact periodic rule in
        phi; equals 1 for a normalized state by the coherent-state
        resolution of identity.
        """
        from scipy.integrate import simpson

        dphi = 2 * np.pi / len(self.phis)
        per_theta = self.values.sum(axis=1) * dphi
        integral = simpson(per_theta * np.sin(self.thetas), x=self.thetas)
        return float((two_j + 1) / (4 * np.pi) * integral)


@dataclass
class BlochVector:
    r_x: float
    r_y: float
    r_z: float

    def norm(self) -> float:
        return float(np.sqrt(self.r_x ** 2 + self.r_y ** 2 + self.r_z ** 2))


def sphere_grid_axes(n_theta: int = 101, n_phi: int = 201):
    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = np.arange(n_phi) * (2 * np.pi / n_phi)
    return thetas, phis


def husimi(state, n_theta: int = 101, n_phi: int = 201) -> SphereGrid:
    """Q(theta, phi) = <theta,phi| rho |theta,phi> on a uniform sphere grid.

    Accepts a SymmetricState or a symmetric-sector density matrix.
    """
    if isinstance(state, SymmetricState):
        rho = None
        amps = state.amplitudes
        two_j = state.two_j
    else:
        rho = np.asarray(state, dtype=complex)
        two_j = rho.shape[0] - 1
        amps = None
    thetas, phis = sphere_grid_axes(n_theta, n_phi)
    j = two_j / 2.0
    values = np.empty((n_theta, n_phi))
    for it, theta in enumerate(thetas):
        # coherent amplitudes factorize: theta-dependent magnitude times
        # e^{-i m phi}; evaluate the phi sweep as a vector product
        base = coherent_amplitudes(j, theta, 0.0)
        m = (two_j - 2 * np.arange(two_j + 1)) / 2.0
        phase = np.exp(1j * np.outer(phis, m))          # <theta,phi| phases
        bra = phase * base.conj()[None, :]
        if rho is None:
            values[it] = np.abs(bra @ amps) ** 2
        else:
            values[it] = np.real(np.einsum("pi,ij,pj->p", bra, rho, bra.conj()))
    return SphereGrid(thetas=thetas, phis=phis, values=np.maximum(values, 0.0))


def bloch_vector(rho: np.ndarray) -> BlochVector:
    """r_mu = Tr(rho sigma_mu) for a single-spin density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError("Bloch vector requires a 2x2 density matrix")
    return BlochVector(
        r_x=float(np.trace(rho @ _PAULI["x"]).real),
        r_y=float(np.trace(rho @ _PAULI["y"]).real),
        r_z=float(np.trace(rho @ _PAULI["z"]).real),
    )


@dataclass
class MatrixSnapshot:
    time: float
    tag: str
    real: np.ndarray
    imag: np.ndarray
    row_labels: list
    col_labels: list


def matrix_snapshot(matrix: np.ndarray, time: float, tag: str,
                    basis: str = "dicke") -> MatrixSnapshot:
    """Lossless record of both matrix parts with basis labels.

    basis 'dicke': labels m=+j..-j (index 0 is m=+j); 'product': bitstrings.
    """
    matrix = np.asarray(matrix, dtype=complex)
    dim = matrix.shape[0]
    if basis == "dicke":
        two_j = dim - 1
        labels = [f"m={(two_j - 2 * k) / 2:+g}" for k in range(dim)]
    elif basis == "product":
        n = int(round(np.log2(dim)))
        labels = [format(i, f"0{n}b") for i in range(dim)]
    else:
        raise ValueError(f"unknown basis {basis!r}")
    return MatrixSnapshot(time=float(time), tag=tag,
                          real=matrix.real.copy(), imag=matrix.imag.copy(),
                          row_labels=labels, col_labels=list(labels))


def equatorial_fringe_count(grid: SphereGrid) -> int:
    """Number of local maxima of Q around the equator (GHZ fringe counter)."""
    i_eq = int(np.argmin(np.abs(grid.thetas - np.pi / 2)))
    ring = grid.values[i_eq]
    n = len(ring)
    level = np.median(ring)
    count = 0
    for k in range(n):
        prev_v, next_v = ring[(k - 1) % n], ring[(k + 1) % n]
        if ring[k] > prev_v and ring[k] >= next_v and ring[k] > level:
            count += 1
    return count
