import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symrmt.catalog import catalog
from symrmt.eigen import MAX_N, balance, eigenvalues_general, hessenberg
from symrmt.errors import ContractError
from symrmt.spectra import match_multisets, sampler_for

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rand_c(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def haar(rng, n):
    q, r = np.linalg.qr(rand_c(rng, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_identity():
    assert np.allclose(eigenvalues_general(np.eye(3)), 1.0, atol=1e-14)


def test_rotation_generator():
    w = eigenvalues_general(np.array([[0, 1], [-1, 0]]))
    assert match_multisets(w, np.array([1j, -1j])) <= 1e-14


def test_companion_cubic():
    # lambda^3 - 6 lambda^2 + 11 lambda - 6 = (lambda - 1)(lambda - 2)(lambda - 3)
    comp = np.array([[6, -11, 6], [1, 0, 0], [0, 1, 0]], dtype=float)
    w = eigenvalues_general(comp)
    assert match_multisets(w, np.array([1, 2, 3])) <= 1e-10


def test_empty_and_errors():
    assert eigenvalues_general(np.zeros((0, 0))).size == 0
    with pytest.raises(ContractError):
        eigenvalues_general(np.zeros((2, 3)))
    with pytest.raises(ContractError):
        eigenvalues_general(np.array([[np.inf, 0], [0, 1]]))


def test_size_limit_is_enforced():
    with pytest.raises(ContractError):
        eigenvalues_general(np.zeros((MAX_N + 1, MAX_N + 1)))


def test_zero_and_nilpotent():
    assert np.all(eigenvalues_general(np.zeros((4, 4))) == 0)
    jordan = np.diag(np.ones(3), 1)
    assert np.max(np.abs(eigenvalues_general(jordan))) <= 1e-5


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 24))
def test_matches_lapack(seed, n):
    a = rand_c(np.random.default_rng(seed), n)
    w = eigenvalues_general(a)
    ref = np.linalg.eigvals(a)
    assert match_multisets(w, ref, 1e-8) <= 1e-8 * max(1.0, np.max(np.abs(ref)))


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(2, 16))
def test_badly_scaled_nonnormal(seed, n):
    rng = np.random.default_rng(seed)
    d = np.diag(10.0 ** rng.uniform(-4, 4, n))
    a = d @ np.triu(rand_c(rng, n)) @ np.linalg.inv(d)
    w = eigenvalues_general(a)
    assert match_multisets(w, np.diag(a), 1e-7) <= 1e-7 * max(1.0, np.max(np.abs(np.diag(a))))


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(2, 12))
def test_hessenberg_and_balance_preserve_spectrum(seed, n):
    a = rand_c(np.random.default_rng(seed), n)
    h = hessenberg(a)
    assert np.all(np.abs(np.tril(h, -2)) == 0.0)
    ref = np.linalg.eigvals(a)
    tol = 1e-9 * max(1.0, np.max(np.abs(ref)))
    assert match_multisets(np.linalg.eigvals(h), ref, tol) <= tol
    assert match_multisets(np.linalg.eigvals(balance(a)), ref, tol) <= tol


def test_unitary_invariance_on_catalog_samples():
    rng = np.random.default_rng(7)
    for e in catalog():
        spec = e.build_n(8) if 8 % e.size_factor == 0 else e.build(2)
        h = sampler_for(spec, seed=3).sample(0)
        u = haar(rng, spec.n)
        w0 = eigenvalues_general(h)
        w1 = eigenvalues_general(u @ h @ u.conj().T)
        assert match_multisets(w0, w1, 1e-8) <= 1e-8, e.key
