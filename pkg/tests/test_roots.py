import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symrmt.catalog import get_entry
from symrmt.errors import ContractError
from symrmt.roots import (FAMILIES, dump_table0, expected_root_count, jacobian, load_table0,
                          mc_jacobian_check, multiplicities_from_beta, nanotube_observables,
                          parse_table0, restricted_positive_roots, table0_lookup, table0_path)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def as_set(data):
    return {tuple(r) for r in data.positive_roots}


def test_roots_A2():
    data = restricted_positive_roots("A", 2)
    assert as_set(data) == {(1, -1, 0), (1, 0, -1), (0, 1, -1)}
    assert set(data.classes) == {"ordinary"}


def test_roots_C1():
    data = restricted_positive_roots("C", 1)
    assert as_set(data) == {(2,)} and data.classes == ("long",)


def test_roots_BC2():
    # q1 - q2 and q1 + q2 are the only ordinary roots at rank 2; 6 = r(r + 1) in all
    data = restricted_positive_roots("BC", 2)
    assert data.counts() == {"ordinary": 2, "short": 2, "long": 2}
    assert as_set(data) == {(1, -1), (1, 1), (1, 0), (0, 1), (2, 0), (0, 2)}


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("rank", [1, 2, 3, 5])
def test_root_counts_and_classes(family, rank):
    data = restricted_positive_roots(family, rank)
    assert len(data.positive_roots) == expected_root_count(family, rank)
    assert len(set(data.positive_roots)) == len(data.positive_roots)
    for root, cls in zip(data.roots, data.classes):
        nz = np.abs(root[root != 0])
        kind = {(1, 1): "ordinary", (1,): "short", (2,): "long"}[tuple(sorted(nz))]
        assert kind == cls


def test_roots_errors():
    with pytest.raises(ContractError):
        restricted_positive_roots("E", 2)
    with pytest.raises(ContractError):
        restricted_positive_roots("A", 0)


def test_jacobian_examples():
    a = restricted_positive_roots("A", 1).with_multiplicities(2)
    q1, q2 = 0.7, -1.9
    assert jacobian("0", [q1, q2], a).value == pytest.approx((q1 - q2) ** 2)
    assert jacobian("0", [1.0, 0.0], a).value == pytest.approx(1.0)
    c = restricted_positive_roots("C", 1).with_multiplicities(0, 2, 0)
    t = 0.5
    assert jacobian("-", [t], c).value == pytest.approx(np.sinh(2 * t) ** 2)
    assert jacobian("-", [0.5], c).value == pytest.approx(1.3811, abs=1e-4)


def test_jacobian_vanishes_on_coincident_coordinates():
    data = restricted_positive_roots("BC", 3).with_multiplicities(1, 2, 3)
    v = jacobian(0, [0.4, 0.4, 1.1], data)
    assert v.value == 0.0 and v.log_value == -np.inf


def test_jacobian_contract():
    data = restricted_positive_roots("A", 2).with_multiplicities(2)
    with pytest.raises(ContractError):
        jacobian("0", [1.0, 2.0], data)
    with pytest.raises(ContractError):
        jacobian("x", [1.0, 2.0, 3.0], data)
    with pytest.raises(ContractError):
        data.with_multiplicities(-1)


def test_jacobian_log_domain_for_large_rank():
    data = restricted_positive_roots("A", 40).with_multiplicities(4)
    q = np.arange(41) * 3.0
    v = jacobian("0", q, data)
    assert np.isfinite(v.log_value) and v.log_value > 709
    assert v.value == np.inf
    ref = sum(4 * np.log(abs(q[i] - q[j])) for i in range(41) for j in range(i + 1, 41))
    assert v.log_value == pytest.approx(ref, rel=1e-12)


def family_data(draw_family, rank):
    return restricted_positive_roots(draw_family, rank).with_multiplicities(2, 1, 3)


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from(FAMILIES), st.integers(1, 4), st.floats(0.2, 3.0))
def test_J0_homogeneous(seed, family, rank, t):
    data = family_data(family, rank)
    q = np.random.default_rng(seed).standard_normal(data.n_coords)
    lhs = jacobian("0", t * q, data).log_value
    rhs = data.degree * np.log(t) + jacobian("0", q, data).log_value
    assert lhs == pytest.approx(rhs, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from(FAMILIES), st.integers(1, 4))
def test_curved_jacobians_reduce_to_flat(seed, family, rank):
    data = family_data(family, rank)
    q = np.random.default_rng(seed).standard_normal(data.n_coords)
    devs = []
    for eps in (1e-1, 1e-2, 1e-3):
        j0 = jacobian("0", eps * q, data).log_value
        devs.append([abs(np.expm1(jacobian(c, eps * q, data).log_value - j0)) for c in "+-"])
    devs = np.array(devs)
    assert np.all(devs[-1] < 1e-4)
    assert np.all(devs[-1] <= devs[0] + 1e-15)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from(FAMILIES), st.integers(2, 4), st.sampled_from("0+-"))
def test_jacobian_permutation_invariant(seed, family, rank, curvature):
    rng = np.random.default_rng(seed)
    data = family_data(family, rank)
    q = rng.standard_normal(data.n_coords)
    perm = rng.permutation(data.n_coords)
    a = jacobian(curvature, q, data).log_value
    b = jacobian(curvature, q[perm], data).log_value
    assert a == pytest.approx(b, abs=1e-9)


def test_multiplicities_from_beta_examples():
    assert multiplicities_from_beta(2, 0) == (2, 1, 0)
    assert multiplicities_from_beta(1, 0) == (1, 0, 0)
    assert multiplicities_from_beta(4, 1) == (4, 3, 4)
    with pytest.raises(ContractError):
        multiplicities_from_beta(3, 0)
    with pytest.raises(ContractError):
        multiplicities_from_beta(2, -1)


def test_table_lookup_examples():
    assert table0_lookup("AII").multiplicities() == (4, 0, 0)
    assert table0_lookup("DIII-e").multiplicities() == (4, 1, 0)
    bdi = table0_lookup("BDI")
    assert bdi.multiplicity_formulas == ("1", "0", "nu")
    assert bdi.multiplicities(3) == (1, 0, 3)
    with pytest.raises(ContractError):
        table0_lookup("E7")


def test_table_rows():
    labels = load_table0().labels()
    assert labels == ["A", "AI", "AII", "AIII", "B", "C", "CI", "CII", "D", "DIII-e",
                      "DIII-o", "BDI"]
    aiii = table0_lookup("AIII")
    assert aiii.compact_coset == "SU(p+q)/SU(p)xSU(q)xU(1)"
    assert aiii.family(0) == "C" and aiii.family(2) == "BC"
    assert table0_lookup("DIII-o").multiplicities() == (4, 1, 4)
    assert table0_lookup("CI").root_data(3).multiplicities == (1, 1, 0)


@pytest.mark.parametrize("nu", [0, 1, 2, 5])
def test_beta_relation_on_beta_labelled_rows(nu):
    rows = [r for r in load_table0().records if r.beta is not None]
    assert {r.label for r in rows} == {"AIII", "BDI", "CII"}
    for r in rows:
        assert multiplicities_from_beta(r.beta, nu) == r.multiplicities(nu)


def test_table_file_roundtrip():
    text = table0_path().read_text(encoding="utf-8")
    assert dump_table0(parse_table0(text)) == text
    with pytest.raises(ContractError):
        parse_table0('{"version": 2, "records": []}')


def test_observable_examples():
    assert nanotube_observables(1, 1, 3, 1, 4).var_ratio == pytest.approx(2 / 3)
    assert nanotube_observables(0, 1, 3, 1, 4).mean_log_dg == 0.0
    obs = nanotube_observables(1, 1, 3, 1, 4)
    assert (obs.mean_log_dg, obs.xi) == pytest.approx((-2.0, 1.0))


def test_observable_errors():
    with pytest.raises(ContractError):
        nanotube_observables(1, 1, 3, 0, 0)
    with pytest.raises(ContractError):
        nanotube_observables(1, 1, 0, 1, 0)
    with pytest.raises(ContractError):
        nanotube_observables(1, 1, 1, -1, 4)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 10), st.floats(0.1, 10), st.floats(0.1, 10),
       st.integers(0, 4), st.integers(0, 8), st.floats(0.1, 5))
def test_observables_linear_in_s_and_l(s, l, gamma, m_l, m_s, k):
    if m_l + m_s / 2 == 0:
        return
    a = nanotube_observables(s, l, gamma, m_l, m_s)
    b = nanotube_observables(k * s, k * l, gamma, m_l, m_s)
    assert b.mean_log_dg == pytest.approx(k * a.mean_log_dg, abs=1e-12)
    assert b.xi == pytest.approx(k * a.xi)
    assert b.var_ratio == a.var_ratio


def test_mc_jacobian_entry_5():
    rep = mc_jacobian_check(get_entry("5"), 100_000, seed=1)
    assert rep.beta == 2 and rep.class_label == "A"
    assert rep.flat_deviation(500) <= 0.10
    assert abs(rep.slope - 2) <= 0.15
    # repulsion: the bin at the diagonal holds far fewer samples than the peak
    assert rep.counts[0] < 0.02 * rep.counts.max()
    assert rep.p_value > 1e-3


def test_mc_jacobian_entry_17():
    rep = mc_jacobian_check(get_entry("17(+)"), 100_000, seed=2)
    assert rep.beta == 1 and rep.class_label == "AI"
    assert rep.p_value > 1e-4
    assert abs(rep.slope - 1) <= 0.15


def test_mc_jacobian_rejects_complex_spectra():
    with pytest.raises(ContractError, match="non-hermitean"):
        mc_jacobian_check(get_entry("2"), 100)
