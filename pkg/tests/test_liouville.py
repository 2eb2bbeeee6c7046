"""Unit tests for the Lindblad solvers (ODE vs. exponential oracle)."""

import numpy as np
import pytest

from spinmetro import engine
from spinmetro.liouville import (DensityMatrix, HamiltonianSpec, NoiseChannel,
                                 apply_generator, build_jump_operators,
                                 density_from_state, evolve, evolve_expm,
                                 evolve_with_sensitivities,
                                 hamiltonian_matrices, jump_operators_for,
                                 liouvillian_matrix, operator_for_tag,
                                 steady_state)
from spinmetro.spin_core import ghz_axis, spin_coherent_state


def test_noise_channel_validation():
    with pytest.raises(ValueError):
        NoiseChannel("global", "emission", 0.1)
    with pytest.raises(ValueError):
        NoiseChannel("local", "amplitude", 0.1)
    with pytest.raises(ValueError):
        NoiseChannel("local", "emission", -0.1)


def test_local_jump_operators_full_space():
    n = 3
    jumps = build_jump_operators(NoiseChannel("local", "dephasing", 0.5), n,
                                 "full")
    assert len(jumps) == n  # one (rate, L) pair per site
    for rate, L in jumps:
        assert rate == 0.5
        # L = sigma_z / sqrt(2), so L^2 = I/2
        assert np.allclose((L @ L).toarray(), 0.5 * np.eye(2 ** n))
    jumps = build_jump_operators(NoiseChannel("collective", "emission", 0.5),
                                 n, "full")
    assert len(jumps) == 1


def test_local_noise_requires_full_or_block():
    from spinmetro.liouville import RepresentationError
    with pytest.raises(RepresentationError):
        build_jump_operators(NoiseChannel("local", "emission", 0.1), 3,
                             "symmetric")


def test_evolve_requires_grid_from_zero():
    rho0 = density_from_state(ghz_axis(2, "z"))
    H = operator_for_tag("J_z", 2, "symmetric")
    with pytest.raises(ValueError):
        evolve(rho0, H, (), np.array([0.5, 1.0]))


def test_unitary_evolution_matches_exact():
    n = 4
    rho0 = density_from_state(ghz_axis(n, "z"))
    phi = 0.7
    H = phi * operator_for_tag("J_z", n, "symmetric")
    times = np.linspace(0.0, 3.0, 7)
    snaps = evolve(rho0, H, (), times, rtol=1e-11, atol=1e-13)
    for t, s in zip(times, snaps):
        U = np.diag(np.exp(-1j * t * np.diag(H)))
        exact = U @ rho0.matrix @ U.conj().T
        assert np.max(np.abs(s.matrix - exact)) < 1e-9


@pytest.mark.parametrize("scope,kind", [
    ("collective", "emission"), ("collective", "pumping"),
    ("collective", "dephasing"), ("local", "emission"),
    ("local", "dephasing"),
])
def test_ode_matches_expm_oracle(scope, kind):
    """DOP853 propagation cross-checked against expm of the Liouvillian."""
    n = 3
    rep = "full" if scope == "local" else "symmetric"
    rho0 = density_from_state(spin_coherent_state(n / 2, 1.1, 0.4), rep)
    H = 0.5 * operator_for_tag("J_z", n, rep)
    channels = (NoiseChannel(scope, kind, 0.3),)
    times = np.linspace(0.0, 4.0, 9)
    ode = evolve(rho0, H, channels, times, rtol=1e-11, atol=1e-13)
    exact = evolve_expm(rho0, H, channels, times)
    for a, b in zip(ode, exact):
        assert np.max(np.abs(a.matrix - b.matrix)) < 1e-8


def test_liouvillian_matrix_matches_generator():
    n = 2
    H = 0.3 * operator_for_tag("J_x", n, "symmetric")
    jumps = jump_operators_for((NoiseChannel("collective", "emission", 0.2),),
                               n, "symmetric")
    dim = n + 1
    Lmat = liouvillian_matrix(H, jumps, dim)
    rng = np.random.default_rng(7)
    rho = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = rho + rho.conj().T
    assert np.allclose(Lmat @ rho.ravel(),
                       apply_generator(H, jumps, rho).ravel(), atol=1e-12)


def test_trace_and_positivity_preserved():
    n = 4
    rho0 = density_from_state(ghz_axis(n, "z"))
    H = 0.4 * operator_for_tag("J_z", n, "symmetric")
    channels = (NoiseChannel("collective", "dephasing", 0.25),)
    snaps = evolve(rho0, H, channels, np.linspace(0, 6, 13))
    for s in snaps:
        assert abs(s.trace() - 1.0) < 1e-7
        s.check(eig_tol=1e-6)
        assert s.purity() <= 1.0 + 1e-9


def test_collective_emission_steady_state_is_ground():
    n = 3
    H = np.zeros((n + 1, n + 1))
    ss = steady_state(H, (NoiseChannel("collective", "emission", 0.5),), n,
                      "symmetric")
    pops = np.diag(ss.matrix).real
    assert abs(pops[-1] - 1.0) < 1e-8  # all population in m = -j


def test_sensitivities_match_finite_difference():
    n = 3
    spec = engine.single_parameter_spec()
    nominal = {"phi": 0.4}
    channels = (NoiseChannel("collective", "dephasing", 0.2),)
    rho0 = density_from_state(ghz_axis(n, "z"))
    times = np.linspace(0.0, 2.0, 5)
    bundles = evolve_with_sensitivities(rho0, spec, channels, times,
                                        nominal=nominal, rtol=1e-11,
                                        atol=1e-13)
    eps = 1e-5
    snaps = {}
    for sign in (+1, -1):
        H, _ = hamiltonian_matrices(spec, n, "symmetric",
                                    {"phi": nominal["phi"] + sign * eps})
        snaps[sign] = evolve(rho0, H, channels, times, rtol=1e-11, atol=1e-13)
    for k in range(1, len(times)):
        fd = (snaps[+1][k].matrix - snaps[-1][k].matrix) / (2 * eps)
        assert np.max(np.abs(fd - bundles[k].partials["phi"])) < 1e-7


def test_hamiltonian_matrices_static_terms():
    spec = HamiltonianSpec(static_terms=((0.3, "J_x^2"),),
                           parameters=(("phi", "J_z"),))
    H, param_ops = hamiltonian_matrices(spec, 2, "symmetric", {"phi": 0.5})
    jx = operator_for_tag("J_x", 2, "symmetric")
    jz = operator_for_tag("J_z", 2, "symmetric")
    assert np.allclose(H, 0.3 * jx @ jx + 0.5 * jz)
    assert np.allclose(param_ops["phi"], jz)


def test_evolve_expm_dimension_cap():
    n = 7  # full space 128 > 64 cap
    rho0 = density_from_state(ghz_axis(n, "z"), "full")
    H = operator_for_tag("J_z", n, "full")
    with pytest.raises(ValueError):
        evolve_expm(rho0, H, (), np.linspace(0, 1, 3))
