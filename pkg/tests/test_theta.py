import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adez.lattice import DEFAULT_SPECS, discriminant_data, parse_spec
from adez.theta import (
    S_SAMPLES,
    ThetaDomainError,
    choose_bound,
    cocycle_obstruction,
    invariant_theta,
    principal_power,
    tail_bound,
    theta_sampler,
    theta_vector,
    verify_S_rotated,
    verify_S_squared,
    verify_S_transform,
    verify_T_transform,
)
from adez.weil import e, weil_for
from oracles import A1_THETA_XI1, a1_theta, e8_theta


def setup(name):
    spec = parse_spec(name)
    return discriminant_data(spec), weil_for(spec)


def test_a1_frozen_values(fixture_data):
    data, _ = setup("A1")
    for row in fixture_data("a1_theta.json"):
        th = theta_vector(data, row["xi"])
        assert np.max(np.abs(th.values - np.array(row["theta"]))) < 1e-13
    th = theta_vector(data, 1.0)
    assert abs(th.values[0] - A1_THETA_XI1[0]) < 1e-9
    assert abs(th.values[1] - A1_THETA_XI1[1]) < 1e-9


def test_a1_against_live_oracle():
    data, _ = setup("A1")
    xi = 0.8 + 0.3j
    ref = a1_theta(xi)
    th = theta_vector(data, xi)
    assert max(abs(th.values[0] - ref[0]), abs(th.values[1] - ref[1])) < 1e-12


def test_large_xi_limit():
    for name in ("A3", "D5", "E8"):
        data, _ = setup(name)
        th = theta_vector(data, 40.0)
        target = np.zeros(data.l)
        target[0] = 1
        assert np.max(np.abs(th.values - target)) < 1e-30 + 1e-20


def test_psi_removes_constant():
    data, _ = setup("D4")
    th = theta_vector(data, 1.2)
    assert th.psi.values[0] == th.values[0] - 1
    assert np.array_equal(th.psi.values[1:], th.values[1:])


@pytest.mark.parametrize("spec", DEFAULT_SPECS, ids=str)
def test_s_law(spec):
    data, rep = discriminant_data(spec), weil_for(spec)
    chk = verify_S_transform(data, rep)
    assert chk.max_residual < 1e-9
    assert chk.max_tail < 1e-11


@pytest.mark.parametrize("spec", DEFAULT_SPECS, ids=str)
def test_t_law(spec):
    data, rep = discriminant_data(spec), weil_for(spec)
    assert verify_T_transform(data, rep).max_residual < 1e-10


def test_s_law_examples():
    data, rep = setup("A1")
    chk = verify_S_transform(data, rep, taus=(2j,))
    assert chk.max_residual < 1e-9
    # at tau = i/3 the rigorous tail needs more vectors than the ceiling
    # allows, so that side comes from the sigma_3 series
    data, rep = setup("E8")
    b = theta_vector(data, 3j, plane="tau")
    assert abs(e8_theta(1j / 3) - 81 * b.values[0]) < 1e-9
    with pytest.raises(ThetaDomainError):
        theta_vector(data, 1j / 3, plane="tau")


def test_t_law_examples():
    data, rep = setup("A2")
    assert verify_T_transform(data, rep, taus=(1j,)).max_residual < 1e-10
    data, rep = setup("A1")
    assert verify_T_transform(data, rep, taus=(0.5 + 2j,)).max_residual < 1e-10


@pytest.mark.parametrize("name", ["A1", "A2", "D5", "E6", "E7", "E8"])
def test_rotated_law_has_no_extra_phase(name):
    data, rep = setup(name)
    assert verify_S_rotated(data, rep).max_residual < 1e-11
    shifted = verify_S_rotated(data, rep, phase=e(data.k / 2))
    if data.k % 4 == 0:
        assert shifted.max_residual < 1e-11
    else:
        assert shifted.max_residual > 0.1


@pytest.mark.parametrize("name", ["A1", "A4", "D6", "E7"])
def test_s_squared_is_center(name):
    data, rep = setup(name)
    assert verify_S_squared(data, rep).max_residual < 1e-10


@pytest.mark.parametrize("name", ["A1", "A3", "D4", "E6"])
def test_cocycle(name):
    data, rep = setup(name)
    obs = cocycle_obstruction(data, rep, taus=S_SAMPLES[:2])
    assert obs["S"] < 1e-10
    assert obs["T"] < 1e-10


def test_tail_bound_decreases_and_is_honest():
    data, _ = setup("D4")
    b = choose_bound(data, 1.0, 1e-12)
    assert tail_bound(data, 1.0, float(b)) < 1e-12
    assert tail_bound(data, 1.0, 2 * float(b)) < tail_bound(data, 1.0, float(b))
    # doubling the bound moves the value by less than the first tail estimate
    lo = theta_vector(data, 1.0, bound=b)
    hi = theta_vector(data, 1.0, bound=2 * b)
    assert np.max(np.abs(lo.values - hi.values)) <= lo.tail_bound


def test_domain_errors():
    data, _ = setup("A2")
    with pytest.raises(ThetaDomainError):
        theta_vector(data, 1e-4)
    with pytest.raises(ThetaDomainError):
        theta_vector(data, 0.5 + 1e-5j, plane="tau")
    with pytest.raises(ValueError):
        theta_vector(data, 1.0, plane="sigma")
    with pytest.raises(ThetaDomainError, match="ceiling"):
        choose_bound(discriminant_data(parse_spec("E8")), 0.01, 1e-12)


@pytest.mark.parametrize("name,pattern", [
    ("E6", "(0,theta1,-theta1)"),
    ("E8", "(theta0)"),
    ("A4", "(theta0,theta1,theta2,theta2,theta1)"),
])
def test_invariant_theta_patterns(name, pattern):
    data, rep = setup(name)
    found = invariant_theta(data, rep)
    assert len(found) == 1
    assert found[0].pattern == pattern
    v = found[0].values(theta_vector(data, 0.9 + 0.2j))
    c = e(-rep.k) * rep.rho_c
    assert np.max(np.abs(c @ v - v)) < 1e-12


def test_invariant_theta_empty():
    data, rep = setup("A1")
    assert invariant_theta(data, rep) == []


def test_sampler_matches_vector():
    data, _ = setup("E7")
    th = theta_vector(data, 1.1)
    f = theta_sampler(data, th.truncation_bound)
    assert np.max(np.abs(f(1.1) - th.values)) < 1e-14


def test_principal_power():
    assert abs(principal_power(-1j * 2j, 2.5) - 2 ** 2.5) < 1e-13
    assert abs(principal_power(1j, 0.5) - cmath.exp(1j * math.pi / 4)) < 1e-15


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["A1", "A2", "D4", "E6", "E8"]), st.floats(-2, 2), st.floats(0.5, 2))
def test_t_law_random(name, x, y):
    data, rep = setup(name)
    assert verify_T_transform(data, rep, taus=(complex(x, y),)).max_residual < 1e-10


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["A1", "A3", "D5", "E7"]), st.floats(-1, 1), st.floats(0.6, 1.6))
def test_s_law_random(name, x, y):
    data, rep = setup(name)
    assert verify_S_transform(data, rep, taus=(complex(x, y),)).max_residual < 1e-9
