"""Unit tests for collective-spin operators and special states."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinmetro.spin_core import (SymmetricState, basis_state,
                                 coherent_amplitudes, collective_full,
                                 collective_ops, dicke_dim, embed_symmetric,
                                 embedding_isometry, ghz_axis, m_values,
                                 multi_ghz, multi_ghz_norm_sq,
                                 operator_from_tag, pauli_site,
                                 spin_coherent_state)


@pytest.mark.parametrize("two_j", [1, 2, 3, 7, 20])
def test_su2_algebra(two_j):
    ops = collective_ops(two_j / 2.0)
    j = two_j / 2.0
    for a, b, c in (("jx", "jy", "jz"), ("jy", "jz", "jx"), ("jz", "jx", "jy")):
        A, B, C = (getattr(ops, k) for k in (a, b, c))
        assert np.allclose(A @ B - B @ A, 1j * C, atol=1e-12)
    assert np.allclose(ops.jsq, j * (j + 1) * np.eye(two_j + 1), atol=1e-12)
    assert np.allclose(ops.jplus, ops.jx + 1j * ops.jy)
    for k in ("jx", "jy", "jz"):
        m = getattr(ops, k)
        assert np.allclose(m, m.conj().T)


def test_m_values_descending():
    assert np.allclose(m_values(2.5), [2.5, 1.5, 0.5, -0.5, -1.5, -2.5])
    assert dicke_dim(2.5) == 6


def test_jz_diagonal_matches_m():
    ops = collective_ops(3)
    assert np.allclose(np.diag(ops.jz), m_values(3))


def test_basis_state_and_ladder():
    # J+ |j, m> = sqrt(j(j+1) - m(m+1)) |j, m+1>
    j, m = 2, 0
    ops = collective_ops(j)
    up = ops.jplus @ basis_state(j, m).amplitudes
    expect = np.sqrt(j * (j + 1) - m * (m + 1)) * basis_state(j, m + 1).amplitudes
    assert np.allclose(up, expect)


@given(theta=st.floats(0.0, np.pi), phi=st.floats(0.0, 2 * np.pi),
       two_j=st.integers(1, 12))
@settings(max_examples=30, deadline=None)
def test_coherent_state_properties(theta, phi, two_j):
    j = two_j / 2.0
    state = spin_coherent_state(j, theta, phi)
    assert abs(state.norm() - 1.0) < 1e-12
    ops = collective_ops(j)
    direction = np.array([np.sin(theta) * np.cos(phi),
                          np.sin(theta) * np.sin(phi), np.cos(theta)])
    mean = np.array([state.expectation(o) for o in (ops.jx, ops.jy, ops.jz)])
    assert np.allclose(mean, j * direction, atol=1e-10)
    # eigenstate of the rotated J with maximal eigenvalue
    jn = direction[0] * ops.jx + direction[1] * ops.jy + direction[2] * ops.jz
    assert np.allclose(jn @ state.amplitudes, j * state.amplitudes, atol=1e-10)


def test_coherent_poles():
    n = 6
    up = coherent_amplitudes(n / 2, 0.0, 0.0)
    assert abs(up[0] - 1.0) < 1e-12 and np.all(np.abs(up[1:]) < 1e-12)
    down = coherent_amplitudes(n / 2, np.pi, 0.0)
    assert abs(abs(down[-1]) - 1.0) < 1e-12


def test_ghz_axis_states():
    n = 4
    z = ghz_axis(n, "z")
    assert abs(z.amplitudes[0] - 1 / np.sqrt(2)) < 1e-12
    assert abs(abs(z.amplitudes[-1]) - 1 / np.sqrt(2)) < 1e-12
    assert np.all(np.abs(z.amplitudes[1:-1]) < 1e-12)
    for axis in ("x", "y"):
        s = ghz_axis(n, axis)
        assert abs(s.norm() - 1.0) < 1e-12
        # superposition of the two coherent states along +-axis
        theta = np.pi / 2
        phi = 0.0 if axis == "x" else np.pi / 2
        plus = coherent_amplitudes(n / 2, theta, phi)
        minus = coherent_amplitudes(n / 2, np.pi - theta, phi + np.pi)
        overlap_sq = (abs(np.vdot(plus, s.amplitudes)) ** 2
                      + abs(np.vdot(minus, s.amplitudes)) ** 2)
        assert overlap_sq > 0.99  # poles nearly orthogonal for n=4


def test_ghz_relative_phase():
    n = 4
    s = ghz_axis(n, "z", rel_phase=np.pi / 3)
    ratio = s.amplitudes[-1] / s.amplitudes[0]
    assert abs(ratio - np.exp(1j * np.pi / 3)) < 1e-12


def test_multi_ghz_normalized_and_symmetric():
    for n in (2, 4, 8, 50):
        s = multi_ghz(n)
        assert abs(s.norm() - 1.0) < 1e-12
        assert multi_ghz_norm_sq(n) > 0
        # invariant (up to phase) under m -> -m for the six-pole combination
        flipped = s.amplitudes[::-1]
        assert abs(abs(np.vdot(flipped, s.amplitudes)) - 1.0) < 1e-9


def test_operator_from_tag_polynomials():
    ops = collective_ops(2)
    assert np.allclose(operator_from_tag("J_x^2", ops), ops.jx @ ops.jx)
    assert np.allclose(operator_from_tag("J_x^2-J_y^2", ops),
                       ops.jx @ ops.jx - ops.jy @ ops.jy)
    assert np.allclose(operator_from_tag("J_x^2+J_z^2", ops),
                       ops.jx @ ops.jx + ops.jz @ ops.jz)
    with pytest.raises(ValueError):
        operator_from_tag("J_w", ops)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_full_space_consistency(n):
    # collective_full equals the sum of single-site Pauli/2 operators
    for which in "xyz":
        total = sum(pauli_site(n, k, which) for k in range(n)) / 2.0
        assert np.allclose(collective_full(n, which).toarray(),
                           total.toarray())
    # embedding isometry intertwines symmetric and full operators
    V = embedding_isometry(n).toarray()
    assert np.allclose(V.conj().T @ V, np.eye(n + 1), atol=1e-12)
    ops = collective_ops(n / 2.0)
    for which, sym in (("x", ops.jx), ("y", ops.jy), ("z", ops.jz)):
        full = collective_full(n, which).toarray()
        assert np.allclose(full @ V, V @ sym, atol=1e-12)


def test_embed_symmetric_expectations():
    n = 3
    state = ghz_axis(n, "z")
    vec = embed_symmetric(state, n)
    assert abs(np.vdot(vec, vec) - 1.0) < 1e-12
    jz_full = collective_full(n, "z").toarray()
    ops = collective_ops(n / 2.0)
    assert abs(np.vdot(vec, jz_full @ vec).real
               - state.expectation(ops.jz)) < 1e-12


def test_symmetric_state_validation():
    with pytest.raises(ValueError):
        SymmetricState(4, np.zeros(4))  # needs 5 amplitudes
