"""Scenario evaluation: probe evolution with sensitivities, QFI/QFIM curves
and the optimal-time / spin-number / control-strength scans.

Representation dispatch: collective-only channels evolve in the symmetric
sector (dimension N+1); any local channel switches to the permutation-
invariant block representation (see block_rep).  Propagation uses the exact
exponential of the reduced generator, so arbitrary probe times (needed by
the golden-section refinements) cost one expm of a small matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import metrology
from .block_rep import (
    BLOCK_N_CAP,
    Propagator,
    block_basis,
    block_state_from_symmetric,
    hamiltonian_blocks,
    reduced_commutator,
    reduced_liouvillian,
    sensitivity_generator,
    _block_commutator_super,
    _block_dissipator_super,
)
from .liouville import HamiltonianSpec, NoiseChannel
from .metrology import QfiCurve, ScanResult
from .spin_core import SymmetricState, collective_ops


@dataclass
class SpectralBundle:
    """State and parameter derivatives at one time, in block-diagonal form."""

    time: float
    degeneracies: tuple
    blocks: list                   # list of (dim_b, dim_b) matrices
    partials: dict                 # name -> list of matrices (same layout)

    def trace(self) -> float:
        return float(sum(d * np.trace(b).real
                         for d, b in zip(self.degeneracies, self.blocks)))

    def qfi(self, name: str, eigen_cutoff=metrology.DEFAULT_EIGEN_CUTOFF) -> float:
        return metrology.qfi_blocks(self.blocks, self.partials[name],
                                    self.degeneracies, eigen_cutoff)

    def qfim(self, names, eigen_cutoff=metrology.DEFAULT_EIGEN_CUTOFF) -> np.ndarray:
        partials = {n: self.partials[n] for n in names}
        return metrology.qfim_blocks(self.blocks, partials,
                                     self.degeneracies, eigen_cutoff)


def _hermitize(m):
    return (m + m.conj().T) / 2.0


class ReducedSystem:
    """Probe + generator compiled into a propagatable reduced form."""

    def __init__(self, probe: SymmetricState, spec: HamiltonianSpec,
                 channels, nominal=None):
        nominal = dict(nominal or {})
        n = probe.n_spins
        self.n_spins = n
        self.param_names = spec.parameter_names()
        param_tags = [tag for _, tag in spec.parameters]
        nominal_terms = [(nominal.get(name, 0.0), tag)
                         for name, tag in spec.parameters]
        use_block = any(ch.scope == "local" for ch in channels) and n > 1
        if use_block:
            if n > BLOCK_N_CAP:
                raise ValueError(f"local noise supported up to N={BLOCK_N_CAP}")
            basis = block_basis(n)
            self.block_dims = basis.block_dims
            self.degeneracies = basis.degeneracies
            ham = hamiltonian_blocks(spec.static_terms, nominal_terms, basis)
            L = reduced_liouvillian(basis, ham, channels)
            commutators = [reduced_commutator(basis, tag) for tag in param_tags]
            y0 = block_state_from_symmetric(probe).coeffs
        else:
            ops = collective_ops(n / 2.0)
            dim = n + 1
            self.block_dims = (dim,)
            self.degeneracies = (1,)
            H = np.zeros((dim, dim), dtype=complex)
            for coeff, tag in list(spec.static_terms) + nominal_terms:
                H = H + coeff * ops.for_tag(tag)
            L = _block_commutator_super(H)
            for ch in channels:
                if ch.rate == 0.0:
                    continue
                L = L + ch.rate * _block_dissipator_super(
                    _single_block_jump(ch, ops))
            commutators = [_block_commutator_super(ops.for_tag(tag))
                           for tag in param_tags]
            y0 = probe.density_matrix().ravel()
        self.size = sum(d * d for d in self.block_dims)
        M, P = self.size, len(self.param_names)
        big = np.zeros(((1 + P) * M, (1 + P) * M), dtype=complex)
        for i in range(1 + P):
            big[i * M:(i + 1) * M, i * M:(i + 1) * M] = L
        for i, C in enumerate(commutators, start=1):
            big[i * M:(i + 1) * M, 0:M] = C
        self._prop = Propagator(big)
        self._y0 = np.concatenate([y0, np.zeros(P * M, dtype=complex)])

    def _split(self, t: float, y: np.ndarray) -> SpectralBundle:
        M = self.size
        views = y.reshape(1 + len(self.param_names), M)
        offs, blocks_per_row = [], []
        acc = 0
        for d in self.block_dims:
            offs.append(acc)
            acc += d * d
        def to_blocks(vec):
            return [_hermitize(vec[o:o + d * d].reshape(d, d))
                    for o, d in zip(offs, self.block_dims)]
        return SpectralBundle(
            time=float(t),
            degeneracies=self.degeneracies,
            blocks=to_blocks(views[0]),
            partials={name: to_blocks(views[i + 1])
                      for i, name in enumerate(self.param_names)},
        )

    def bundles(self, times) -> list[SpectralBundle]:
        ys = self._prop.grid(times, self._y0)
        return [self._split(t, y) for t, y in zip(times, ys)]

    def bundle_at(self, t: float) -> SpectralBundle:
        return self._split(t, self._prop.apply(t, self._y0))


def _single_block_jump(ch: NoiseChannel, ops) -> np.ndarray:
    """Jump matrix for a collective channel (or N=1 local) in one block."""
    if ch.scope == "collective":
        return {"emission": ops.jminus, "pumping": ops.jplus,
                "dephasing": ops.jz}[ch.kind]
    # N = 1 local: sigma-, sigma+, sigma_z/sqrt(2)
    return {"emission": ops.jminus, "pumping": ops.jplus,
            "dephasing": ops.jz * np.sqrt(2.0)}[ch.kind]


# ---------------------------------------------------------------------------
# curves and scans
# ---------------------------------------------------------------------------

def single_parameter_spec(static_terms=()) -> HamiltonianSpec:
    """H = (static terms) + phi J_z."""
    return HamiltonianSpec(static_terms=tuple(static_terms),
                           parameters=(("phi", "J_z"),))


def three_parameter_spec(static_terms=()) -> HamiltonianSpec:
    """H = (static terms) + phi_x J_x + phi_y J_y + phi_z J_z."""
    return HamiltonianSpec(
        static_terms=tuple(static_terms),
        parameters=(("phi_x", "J_x"), ("phi_y", "J_y"), ("phi_z", "J_z")),
    )


def qfi_time_curve(probe, spec, channels, times, nominal=None,
                   param: str = "phi", metadata=None) -> QfiCurve:
    system = ReducedSystem(probe, spec, channels, nominal)
    times = np.asarray(times, dtype=float)
    values = np.array([b.qfi(param) for b in system.bundles(times)])
    return QfiCurve(times=times, values=values, metadata=dict(metadata or {}))


def qfim_time_curve(probe, spec, channels, times, nominal=None):
    """List of (t, QFIM) along the grid."""
    system = ReducedSystem(probe, spec, channels, nominal)
    names = spec.parameter_names()
    return [(b.time, b.qfim(names))
            for b in system.bundles(np.asarray(times, dtype=float))]


def scan_optimal_time(probe, spec, channels, t_grid, nominal=None,
                      channel_tag: str = "", param: str = "phi",
                      refine_tol: float = 1e-4) -> ScanResult:
    """Q_max / t_opt with golden-section refinement on the exact propagator."""
    system = ReducedSystem(probe, spec, channels, nominal)
    times = np.asarray(t_grid, dtype=float)
    curve = QfiCurve(times=times,
                     values=np.array([b.qfi(param) for b in system.bundles(times)]))
    return metrology.scan_optimal_time(
        curve, lambda t: system.bundle_at(t).qfi(param),
        channel=channel_tag, n_spins=probe.n_spins, refine_tol=refine_tol)


def scan_spin_number(channel: NoiseChannel, n_list, t_grid, probe_factory,
                     spec_factory=None, nominal=None) -> list[ScanResult]:
    """Per-N optimal-time scans for one channel (Fig.-3-style data)."""
    results = []
    for n in n_list:
        spec = (spec_factory or (lambda _n: single_parameter_spec()))(n)
        results.append(scan_optimal_time(
            probe_factory(n), spec, [channel], t_grid, nominal=nominal,
            channel_tag=f"{channel.scope}_{channel.kind}"))
    return results


def integrated_gain_for_control(probe, channels, control_terms, t_grid,
                                nominal=None, T: float = 50.0) -> float:
    """Integrated gain with a static control Hamiltonian added to phi J_z."""
    spec = single_parameter_spec(static_terms=control_terms)
    curve = qfi_time_curve(probe, spec, channels, t_grid, nominal=nominal)
    positive = curve.times > 0
    gain = metrology.gain_curve(
        QfiCurve(times=curve.times[positive], values=curve.values[positive]))
    return metrology.integrated_gain(gain, T=T)


CONTROL_TAGS = {
    "linear_jx": "J_x",
    "quadratic_jx2": "J_x^2",
    "tat_xz": "J_x^2+J_z^2",
}


def control_terms(kind: str, chi: float):
    if kind not in CONTROL_TAGS:
        raise ValueError(f"unknown control kind {kind!r}")
    return ((chi, CONTROL_TAGS[kind]),) if chi != 0.0 else ()
