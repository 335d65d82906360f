from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import eigvals

from uamo_lab.checks import multiset_distance
from uamo_lab.model import (GOLDEN, Lattice, ModelError, ModelParams, Variant, build_floquet, build_shift,
                            coin_at, coin_sqrt, fibonacci_approximant, fibonacci_ring, localized_state,
                            skin_matrix, skin_transform, verify_pt_symmetry)

unit = st.floats(0.0, 1.0)
phase = st.floats(0.0, 1.0, exclude_max=True)


def test_coin_examples():
    q = coin_at(0, ModelParams(0.5, 0.5))
    assert np.allclose(q, [[0.5 + 0.8660254037844386j, 0], [0, 0.5 - 0.8660254037844386j]], atol=1e-15)
    for x in (-3, 0, 7):
        assert np.allclose(coin_at(x, ModelParams(0.5, 0.0, 0.3)), np.diag([1j, -1j]))
    assert np.allclose(coin_at(0, ModelParams(0.5, 1.0, 0.25)), [[0, -1], [1, 0]], atol=1e-15)


@given(unit, phase, st.integers(-200, 200))
def test_coin_special_unitary(l2, th, x):
    q = coin_at(x, ModelParams(0.5, l2, th))
    assert abs(np.linalg.det(q) - 1) < 1e-14
    assert np.allclose(q.conj().T @ q, np.eye(2), atol=1e-14)


def test_params_validation():
    with pytest.raises(ModelError):
        ModelParams(1.2, 0.5)
    with pytest.raises(ModelError):
        ModelParams(0.5, -0.1)
    with pytest.raises(ModelError):
        ModelParams(0.5, 0.5, phi=Fraction(3, 2))
    p = ModelParams(0.6, 0.8)
    assert abs(p.lambda1p - 0.8) < 1e-15 and abs(p.lambda2p - 0.6) < 1e-15


def test_fibonacci():
    assert fibonacci_approximant(89) == Fraction(55, 89)
    assert fibonacci_ring(144) == Fraction(89, 144)
    with pytest.raises(ModelError):
        fibonacci_ring(100)


def test_periodic_requires_dividing_approximant():
    with pytest.raises(ModelError):
        build_shift(ModelParams(0.5, 0.5), Lattice.ring(89))
    with pytest.raises(ModelError):
        build_shift(ModelParams(0.5, 0.5, phi=Fraction(55, 89)), Lattice.ring(90))
    build_shift(ModelParams(0.5, 0.5, phi=Fraction(55, 89)), Lattice.ring(178))


def test_shift_examples():
    lat = Lattice.open(9)
    s = build_shift(ModelParams(1.0, 0.5), lat)
    i = lat.index(0)
    assert s[2 * (i + 1), 2 * i] == 1 and s[2 * (i - 1) + 1, 2 * i + 1] == 1
    assert np.count_nonzero(s[:, 2 * i]) == 1
    s = build_shift(ModelParams(0.0, 0.5), lat)
    assert np.allclose(s[2 * i:2 * i + 2, 2 * i:2 * i + 2], [[0, -1], [1, 0]])
    assert np.count_nonzero(s) == 2 * lat.size
    s = build_shift(ModelParams(0.5, 0.5, eta=0.1), lat)
    assert abs(s[2 * (i + 1), 2 * i] - 0.9372280437926691) < 1e-12
    assert abs(s[2 * (i - 1) + 1, 2 * i + 1] - 0.5 * np.exp(-0.2 * np.pi)) < 1e-15


@settings(max_examples=30, deadline=None)
@given(unit, unit, phase)
def test_unitarity_ring(l1, l2, th):
    op = build_floquet(ModelParams(l1, l2, th, 0.0, Fraction(21, 34)), Lattice.ring(34))
    w = op.matrix()
    assert np.allclose(w.conj().T @ w, np.eye(68), atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(unit, unit, phase, st.floats(-0.3, 0.3), st.booleans())
def test_matrix_free_matches_dense(l1, l2, th, eta, ring):
    lat = Lattice.ring(21) if ring else Lattice.open(21)
    p = ModelParams(l1, l2, th, eta, Fraction(13, 21) if ring else GOLDEN)
    psi = np.random.default_rng(1).normal(size=42) + 0j
    for v in (Variant.STANDARD, Variant.LOSSY_REALIZED):
        op = build_floquet(p, lat, v)
        assert np.allclose(op.apply(psi), op.matrix() @ psi, atol=1e-12)


def test_bloch_oracle():
    n = 34
    for l1 in (0.2, 0.9):
        z = eigvals(build_floquet(ModelParams(l1, 0.0, 0.0, 0.0, Fraction(21, 34)), Lattice.ring(n)).matrix())
        k = 2 * np.pi * np.arange(n) / n
        r = np.sqrt(1 - (l1 * np.sin(k)) ** 2)
        ref = np.r_[-l1 * np.sin(k) + 1j * r, -l1 * np.sin(k) - 1j * r]
        assert multiset_distance(z, ref) < 1e-9


def test_duality_eta0():
    p = ModelParams(0.3, 0.7, 0.0, 0.0, Fraction(34, 55))
    lat = Lattice.ring(55)
    a = eigvals(build_floquet(p, lat).matrix())
    b = eigvals(build_floquet(p.with_(lambda1=0.7, lambda2=0.3), lat).matrix())
    d = eigvals(build_floquet(p, lat, Variant.DUAL).matrix())
    assert multiset_distance(a, b) < 1e-9 and multiset_distance(a, d) < 1e-9


def test_complexified_dual_isospectral_nonhermitian():
    p = ModelParams(0.25, 0.5, 0.0, 0.2, Fraction(34, 55))
    lat = Lattice.ring(55)
    a = eigvals(build_floquet(p, lat).matrix())
    op = build_floquet(p, lat, Variant.DUAL)
    assert "warning" in op.meta
    assert multiset_distance(a, eigvals(op.matrix())) < 1e-9
    mech = eigvals(build_floquet(p, lat, Variant.DUAL, dual_mode="mechanical").matrix())
    assert multiset_distance(a, mech) > 1e-3


@settings(max_examples=15, deadline=None)
@given(unit, st.floats(0.0, 0.999), phase, st.floats(-0.3, 0.3))
def test_symmetrized_isospectral(l1, l2, th, eta):
    p = ModelParams(l1, l2, th, eta, Fraction(13, 21))
    lat = Lattice.ring(21)
    a = eigvals(build_floquet(p, lat).matrix())
    b = eigvals(build_floquet(p, lat, Variant.SYMMETRIZED).matrix())
    assert multiset_distance(a, b) < 1e-9 * max(1, np.abs(a).max())


def test_coin_sqrt_examples():
    assert np.allclose(coin_sqrt(np.eye(2)), np.eye(2))
    assert np.allclose(coin_sqrt(np.diag([1j, -1j])), np.diag(np.exp([0.25j * np.pi, -0.25j * np.pi])))
    q = coin_at(0, ModelParams(0.5, 0.5))
    r = coin_sqrt(q)
    assert np.max(np.abs(r @ r - q)) < 1e-12
    with pytest.raises(ModelError):
        coin_sqrt(-np.eye(2))


@given(st.floats(0.0, 0.999), phase, st.integers(-50, 50))
def test_coin_sqrt_property(l2, th, x):
    q = coin_at(x, ModelParams(0.5, l2, th))
    r = coin_sqrt(q)
    assert np.max(np.abs(r @ r - q)) < 1e-12
    assert np.all(np.abs(np.angle(np.linalg.eigvals(r))) <= np.pi / 2 + 1e-12)


def test_skin_transform():
    lat = Lattice.open(15)
    psi = np.arange(30) + 1j
    assert np.allclose(skin_transform(psi, 0.0, lat), psi)
    back = skin_transform(skin_transform(psi, 0.1, lat), 0.1, lat, inverse=True)
    assert np.allclose(back, psi)
    with pytest.raises(ModelError):
        skin_transform(psi, 20.0, lat)
    with pytest.raises(ModelError):
        skin_transform(np.ones(2 * 21), 0.1, Lattice.ring(21))


@settings(max_examples=15, deadline=None)
@given(unit, unit, phase, st.floats(-0.3, 0.3))
def test_skin_similarity(l1, l2, th, eta):
    lat = Lattice.open(25)
    p = ModelParams(l1, l2, th, eta)
    v = skin_matrix(eta, lat)
    w0 = build_floquet(p.with_(eta=0.0), lat).matrix()
    assert np.max(np.abs(v @ w0 @ np.linalg.inv(v) - build_floquet(p, lat).matrix())) < 1e-10


def test_open_spectrum_eta_independent():
    lat = Lattice.open(41)
    p = ModelParams(0.4, 0.6, 0.1, 0.0)
    a = eigvals(build_floquet(p, lat).matrix())
    b = eigvals(build_floquet(p.with_(eta=0.08), lat).matrix())
    assert multiset_distance(a, b) < 1e-8


def test_pt_relation_reports_deviation():
    # the stated antilinear relation does not hold for this operator; the check reports it
    r = verify_pt_symmetry(ModelParams(0.5, 0.25, 0.0, 0.0, Fraction(13, 21)), Lattice.ring(21))
    assert r["deviation"] > 1e-3
    with pytest.raises(ModelError):
        verify_pt_symmetry(ModelParams(0.5, 0.25), Lattice.open(20))
    assert np.isfinite(verify_pt_symmetry(ModelParams(0.5, 0.25), Lattice.open(21))["deviation"])


def test_localized_state():
    lat = Lattice.open(11)
    psi = localized_state(lat)
    assert abs(np.linalg.norm(psi) - 1) < 1e-15
    assert psi[2 * lat.origin + 1] == pytest.approx(1j / np.sqrt(2))
