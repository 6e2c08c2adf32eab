import math

import numpy as np
import pytest

from tensorspectra.eigenpairs import (
    Eigenpair,
    discontinuity_exponent,
    eigenpair_count_bound,
    find_real_eigenpairs,
    instanton_from_eigenpair,
)
from tensorspectra.errors import DomainError, NoMatchingPairs, SignMismatch
from tensorspectra.tensors import (
    SymmetricTensor,
    contract_gradient,
    from_dense,
    multiset_table,
    sample_goe,
)


# ---------------------------------------------------------------- fixtures

def example_tensor():
    """T x^3 = 2 x1^3 + 3 x1 x2^2 + 3 x1 x3^2; real classes: lambda = 2, x = e1."""
    data = np.zeros(math.comb(3 + 3 - 1, 3))
    _, rank, _ = multiset_table(3, 3)
    data[rank[(0, 0, 0)]] = 2.0
    data[rank[(0, 1, 1)]] = 1.0
    data[rank[(0, 2, 2)]] = 1.0
    return SymmetricTensor(3, 3, data)


def diagonal_tensor(diag):
    p = 3
    N = len(diag)
    data = np.zeros(math.comb(N + p - 1, p))
    _, rank, _ = multiset_table(p, N)
    for i, d in enumerate(diag):
        data[rank[(i, i, i)]] = d
    return SymmetricTensor(p, N, data)


def char_poly_eigenvalues(matrix):
    """Characteristic-polynomial oracle, independent of the Newton solver."""
    return np.sort(np.roots(np.poly(matrix)).real)


# ------------------------------------------------------------------ solver

def test_example_tensor_eigenpair():
    T = example_tensor()
    pairs = find_real_eigenpairs(T, n_starts=100, tol=1e-10, seed=1)
    assert len(pairs) == 1
    pair = pairs[0]
    assert pair.lam == pytest.approx(2.0, abs=1e-9)
    # this tensor carries a continuum of complex eigenvectors, so the real
    # critical manifold is degenerate at e1: x is only residual^(1/3) sharp
    # and the solver flags the cluster
    assert min(np.linalg.norm(pair.x - [1, 0, 0]), np.linalg.norm(pair.x + [1, 0, 0])) < 1e-3
    assert pair.residual < 1e-10
    assert pair.degenerate


def test_eigenpair_invariants():
    T = sample_goe(3, 5, seed=3)
    pairs = find_real_eigenpairs(T, n_starts=150, tol=1e-10, seed=4)
    assert pairs
    for pair in pairs:
        assert abs(pair.x @ pair.x - 1) < 1e-10
        g = contract_gradient(T, pair.x)
        assert np.linalg.norm(g - pair.lam * pair.x) < 1e-9
        # Rayleigh consistency
        assert abs(pair.lam - pair.x @ g) < 1e-10


def test_odd_p_sign_convention():
    T = sample_goe(3, 4, seed=8)
    pairs = find_real_eigenpairs(T, n_starts=120, tol=1e-10, seed=9)
    assert all(pair.lam >= 0 for pair in pairs)


def test_p2_matches_characteristic_polynomial():
    rng = np.random.default_rng(5)
    for trial in range(3):
        M = rng.normal(size=(4, 4))
        M = (M + M.T) / 2
        T = from_dense(M)
        pairs = find_real_eigenpairs(T, n_starts=200, tol=1e-10, seed=trial)
        found = np.sort([pair.lam for pair in pairs])
        expected = char_poly_eigenvalues(M)
        assert len(found) == 4
        assert np.allclose(found, expected, atol=1e-8)


def test_diagonal_tensor_pairs():
    diag = [1.0, 2.0, 3.0]
    T = diagonal_tensor(diag)
    pairs = find_real_eigenpairs(T, n_starts=300, tol=1e-10, seed=2)
    lams = [pair.lam for pair in pairs]
    for i, d in enumerate(diag):
        match = [
            pair
            for pair in pairs
            if abs(pair.lam - d) < 1e-8
            and min(
                np.linalg.norm(pair.x - np.eye(3)[i]),
                np.linalg.norm(pair.x + np.eye(3)[i]),
            )
            < 1e-6
        ]
        assert match, f"basis pair ({d}, e{i}) not found among {lams}"
        # e_i indeed solves the eigen equations exactly
        g = contract_gradient(T, np.eye(3)[i])
        assert np.allclose(g, d * np.eye(3)[i])


def test_count_bound():
    assert eigenpair_count_bound(3, 3) == 7
    assert eigenpair_count_bound(3, 1) == 1
    assert eigenpair_count_bound(4, 2) == 4
    with pytest.raises(DomainError):
        eigenpair_count_bound(2, 3)


def test_found_classes_within_bound():
    for seed in (0, 1):
        T = sample_goe(3, 3, seed=seed)
        pairs = find_real_eigenpairs(T, n_starts=250, tol=1e-10, seed=seed)
        assert len(pairs) <= eigenpair_count_bound(3, 3)


def test_all_starts_failing_warns():
    # max_iter-starved solve on a generic tensor: every start is discarded
    T = sample_goe(3, 4, seed=0)
    with pytest.warns(UserWarning):
        pairs = find_real_eigenpairs(T, n_starts=1, tol=1e-30, seed=0)
    assert pairs == []


# --------------------------------------------------------------- instantons

def test_instanton_frozen_examples():
    T = example_tensor()
    pair = Eigenpair(2.0, np.array([1.0, 0, 0]), 0.0)

    inst = instanton_from_eigenpair(T, pair, y=2.0)
    assert np.allclose(inst.phi, [1.0, 0, 0])
    assert inst.action == pytest.approx(1 / 6, abs=1e-12)

    inst16 = instanton_from_eigenpair(T, pair, y=16.0)
    assert np.allclose(inst16.phi, [8.0, 0, 0])
    assert inst16.action == pytest.approx(64 / 6, rel=1e-12)


def test_instanton_at_y_equal_lambda_is_the_eigenvector():
    T = sample_goe(3, 4, seed=13)
    pairs = find_real_eigenpairs(T, n_starts=100, tol=1e-10, seed=14)
    pair = pairs[0]
    inst = instanton_from_eigenpair(T, pair, y=pair.lam)
    assert np.allclose(inst.phi, pair.x, atol=1e-8)
    assert inst.phi @ inst.phi == pytest.approx(1.0, abs=1e-8)


def test_instanton_equation_of_motion():
    T = sample_goe(3, 5, seed=21)
    pairs = find_real_eigenpairs(T, n_starts=150, tol=1e-11, seed=22)
    for pair in pairs[:3]:
        if pair.lam == 0:
            continue
        y = 1.7 * pair.lam
        inst = instanton_from_eigenpair(T, pair, y)
        eom = np.linalg.norm(inst.phi - contract_gradient(T, inst.phi) / y)
        assert eom < 1e-8 * max(1.0, np.linalg.norm(inst.phi))


def test_instanton_sign_mismatch():
    T = example_tensor()
    pair = Eigenpair(2.0, np.array([1.0, 0, 0]), 0.0)
    with pytest.raises(SignMismatch):
        instanton_from_eigenpair(T, pair, y=-1.0)


# ---------------------------------------------------------------- exponents

def test_discontinuity_exponent_example():
    T = example_tensor()
    pairs = [Eigenpair(2.0, np.array([1.0, 0, 0]), 0.0)]
    assert discontinuity_exponent(T, 2.0, pairs=pairs) == pytest.approx(1 / 6)
    # exponent -> 0 as y -> 0+
    small = discontinuity_exponent(T, 1e-8, pairs=pairs)
    assert small < 1e-17


def test_discontinuity_exponent_sign_handling():
    T = example_tensor()
    pairs = [Eigenpair(2.0, np.array([1.0, 0, 0]), 0.0)]
    # odd p: the mirrored class (-2, -e1) matches negative y
    assert discontinuity_exponent(T, -2.0, pairs=pairs) == pytest.approx(1 / 6)


def test_discontinuity_exponent_requires_p3():
    M = from_dense(np.eye(2))
    with pytest.raises(DomainError):
        discontinuity_exponent(M, 1.0)


def test_discontinuity_exponent_no_pairs():
    T = example_tensor()
    with pytest.raises(NoMatchingPairs):
        discontinuity_exponent(T, 1.0, pairs=[])


def test_exponent_dominated_by_largest_eigenvalue():
    T = sample_goe(3, 4, seed=33)
    pairs = find_real_eigenpairs(T, n_starts=200, tol=1e-10, seed=34)
    lam_max = max(pair.lam for pair in pairs)
    y = 3.0 * lam_max
    expo = discontinuity_exponent(T, y, pairs=pairs)
    assert expo == pytest.approx((1 / 6) * (y / lam_max) ** 2, rel=1e-10)
