"""Tests for quantum Fisher information and Cramér-Rao machinery."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinmetro import metrology
from spinmetro.metrology import (EndpointMaximumError, QfiCurve, gain_curve,
                                 integrated_gain, qfi, qfi_blocks, qfim,
                                 qfim_blocks, refine_maximum,
                                 sld_and_compatibility, weighted_qcrb)


def _random_density(dim, rng, rank=None):
    rank = rank or dim
    A = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


def _pure_state_pair(dim, rng, eps=1e-6):
    """Pure state |psi(x)> = exp(-i x G)|psi0> and its derivative at x=0."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    G = (G + G.conj().T) / 2
    dpsi = -1j * G @ v
    rho = np.outer(v, v.conj())
    drho = np.outer(dpsi, v.conj()) + np.outer(v, dpsi.conj())
    return v, dpsi, rho, drho, G


def test_pure_state_qfi_oracle():
    """For pure states Q = 4 (<dpsi|dpsi> - |<psi|dpsi>|^2) = 4 Var(G)."""
    rng = np.random.default_rng(11)
    for dim in (2, 4, 7):
        v, dpsi, rho, drho, G = _pure_state_pair(dim, rng)
        var = (np.vdot(v, G @ G @ v) - np.vdot(v, G @ v) ** 2).real
        assert abs(qfi(rho, drho) - 4 * var) < 1e-8 * max(1.0, 4 * var)


def test_qfi_unitary_invariance():
    rng = np.random.default_rng(5)
    dim = 5
    rho = _random_density(dim, rng)
    d = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    drho = (d + d.conj().T) / 2
    drho -= np.trace(drho).real / dim * np.eye(dim)
    base = qfi(rho, drho)
    # random unitary from QR
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim))
                        + 1j * rng.normal(size=(dim, dim)))
    assert abs(qfi(q @ rho @ q.conj().T, q @ drho @ q.conj().T)
               - base) < 1e-8 * max(1.0, base)


def test_sld_equation_and_qfi_consistency():
    """SLD L solves drho = (rho L + L rho)/2 and Q = Tr[rho L^2]."""
    rng = np.random.default_rng(2)
    dim = 4
    rho = _random_density(dim, rng)
    d = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    drho = (d + d.conj().T) / 2
    slds = sld_and_compatibility(rho, {"x": drho})
    L = slds.operators["x"]
    assert np.allclose(0.5 * (rho @ L + L @ rho), drho, atol=1e-8)
    q_from_sld = np.trace(rho @ L @ L).real
    assert abs(q_from_sld - qfi(rho, drho)) < 1e-8


def test_qfim_diagonal_matches_qfi():
    rng = np.random.default_rng(8)
    dim = 4
    rho = _random_density(dim, rng)
    drhos = {}
    for name in ("a", "b"):
        d = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        drhos[name] = (d + d.conj().T) / 2
    Q = qfim(rho, drhos)
    assert Q.shape == (2, 2)
    assert np.allclose(Q, Q.T, atol=1e-10)
    assert abs(Q[0, 0] - qfi(rho, drhos["a"])) < 1e-8
    assert abs(Q[1, 1] - qfi(rho, drhos["b"])) < 1e-8
    evals = np.linalg.eigvalsh(Q)
    assert np.all(evals > -1e-9)


def test_qfi_blocks_with_multiplicities():
    """Block QFI equals QFI of the expanded block-diagonal matrix."""
    rng = np.random.default_rng(4)
    dims = (3, 2)
    degs = (1, 3)
    blocks, dblocks = [], []
    for d in dims:
        blocks.append(_random_density(d, rng))
        m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        dblocks.append((m + m.conj().T) / 2)
    # weight blocks so the expanded matrix has unit trace
    w = (0.4, 0.2)  # 0.4*1 + 0.2*3 = 1
    blocks = [wk * b for wk, b in zip(w, blocks)]
    dblocks = [wk * db for wk, db in zip(w, dblocks)]
    total = sum(d * g for d, g in zip(dims, degs))
    rho = np.zeros((total, total), dtype=complex)
    drho = np.zeros_like(rho)
    off = 0
    for d, g, b, db in zip(dims, degs, blocks, dblocks):
        for _ in range(g):
            rho[off:off + d, off:off + d] = b / g
            drho[off:off + d, off:off + d] = db / g
            off += d
    # per-copy matrices are b/g; the block helper takes the per-copy
    # matrices with their multiplicities
    per_blocks = [b / g for b, g in zip(blocks, degs)]
    per_dblocks = [db / g for db, g in zip(dblocks, degs)]
    got = qfi_blocks(per_blocks, per_dblocks, degs)
    want = qfi(rho, drho)
    assert abs(got - want) < 1e-8 * max(1.0, want)
    # multi-parameter version agrees on the diagonal
    Q = qfim_blocks(per_blocks, {"x": per_dblocks}, degs)
    assert abs(Q[0, 0] - got) < 1e-10


def test_weighted_qcrb_values():
    Q = np.diag([4.0, 2.0])
    b = weighted_qcrb(Q)
    assert abs(b.value - (0.25 + 0.5)) < 1e-12
    assert b.condition_number == pytest.approx(2.0)
    b = weighted_qcrb(Q, repetitions=10)
    assert abs(b.value - 0.075) < 1e-12
    W = np.diag([1.0, 4.0])
    b = weighted_qcrb(Q, W=W)
    assert abs(b.value - (0.25 + 2.0)) < 1e-12


def test_weighted_qcrb_singular_uses_pseudoinverse():
    # unsupported directions are dropped rather than raising
    b = weighted_qcrb(np.diag([1.0, 0.0]))
    assert b.value == pytest.approx(1.0)
    b = weighted_qcrb(np.zeros((2, 2)))
    assert b.value == float("inf")


def test_gain_curve_and_integrated_gain():
    times = np.linspace(0.5, 10.0, 96)
    values = 100.0 * times ** 2 * np.exp(-times)
    g = gain_curve(QfiCurve(times=times, values=values))
    assert np.allclose(g.values, 100.0 * np.exp(-times))
    got = integrated_gain(g, T=10.0)
    want = np.trapezoid(100.0 * np.exp(-times), times)
    assert abs(got - want) < 1e-9


@given(center=st.floats(1.0, 9.0))
@settings(max_examples=20, deadline=None)
def test_refine_maximum_parabola(center):
    f = lambda t: -(t - center) ** 2
    t_star, f_star = refine_maximum(f, 0.0, 10.0, tol=1e-6)
    assert abs(t_star - center) < 1e-4
    assert f_star <= 0.0


def test_scan_optimal_time_rejects_endpoint_maximum():
    times = np.linspace(0.1, 5.0, 50)
    curve = QfiCurve(times=times, values=times ** 2)  # maximal at the end
    with pytest.raises(EndpointMaximumError):
        metrology.scan_optimal_time(curve, lambda t: t ** 2, channel="none",
                                    n_spins=2)


def test_scan_optimal_time_interior():
    times = np.linspace(0.1, 10.0, 100)
    f = lambda t: t ** 2 * np.exp(-t)
    curve = QfiCurve(times=times, values=f(times))
    r = metrology.scan_optimal_time(curve, f, channel="demo", n_spins=4)
    assert abs(r.t_opt - 2.0) < 1e-3      # maximum of t^2 e^-t
    assert abs(r.q_max - f(2.0)) < 1e-6
    assert abs(r.g_max - f(2.0) / r.t_opt ** 2) < 1e-9
    assert r.channel == "demo" and r.n_spins == 4
