"""Eigenfunction ratio test, functional iteration, and entropy utilities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarbec import criterion as cr
from polarbec import erasure as er
from polarbec.errors import DegenerateFitError, InvalidCandidateError


def test_binary_entropy_values():
    assert cr.binary_entropy(0.5) == 1.0
    assert cr.binary_entropy(0.0) == 0.0
    assert cr.binary_entropy(1.0) == 0.0
    assert cr.binary_entropy(0.11) == pytest.approx(0.499915958164528, abs=1e-14)


def test_binary_entropy_domain():
    with pytest.raises(ValueError):
        cr.binary_entropy(-0.01)
    with pytest.raises(ValueError):
        cr.binary_entropy(1.01)


def test_binary_entropy_inv_values():
    assert cr.binary_entropy_inv(1.0) == pytest.approx(0.5, abs=1e-12)
    assert cr.binary_entropy_inv(0.0) == 0.0
    assert cr.binary_entropy_inv(0.5) == pytest.approx(0.1100278644385071, abs=1e-10)
    with pytest.raises(ValueError):
        cr.binary_entropy_inv(1.5)


def test_entropy_round_trip():
    ys = np.linspace(0.0, 1.0, 1000)
    for y in ys:
        p = cr.binary_entropy_inv(float(y))
        assert cr.binary_entropy(p) == pytest.approx(float(y), abs=1e-10)


def test_sup_ratio_builtin_families():
    got = cr.sup_ratio(cr.CandidateH.power(0.64), 100000)
    assert round(got.ratio, 3) == 0.833
    assert got.ratio == pytest.approx(0.8326048558320692, abs=1e-9)
    assert got.argmax == pytest.approx(0.2748539651544183, abs=1e-6)
    # the candidate is symmetric, so the mirror point attains the same value
    mirrored = cr._ratio_at(cr.CandidateH.power(0.64), 1.0 - got.argmax)
    assert float(mirrored) == pytest.approx(got.ratio, abs=1e-12)


def test_sup_ratio_alpha_half_at_center():
    h = cr.CandidateH.power(0.5)
    value = (h(0.25) + h(0.75)) / (2.0 * h(0.5))
    assert float(value) == pytest.approx(math.sqrt(3.0) / 2.0, abs=1e-14)
    # the center value lower-bounds the sup
    assert cr.sup_ratio(h, 4096).ratio >= float(value) - 1e-12


def test_sup_ratio_one_sided_limits():
    # ratio(xi) -> 2**(alpha-1) at both endpoints for the power family
    got = cr.sup_ratio(cr.CandidateH.power(0.64), 100000)
    want = 2.0 ** (0.64 - 1.0)
    assert got.left_limit == pytest.approx(want, abs=5e-3)
    assert got.right_limit == pytest.approx(want, abs=5e-3)


def test_sup_ratio_rejects_coarse_grid():
    with pytest.raises(ValueError):
        cr.sup_ratio(cr.CandidateH.power(0.64), 999)


def test_sup_ratio_symmetric_under_grid_mirror():
    xi, ratios = cr.ratio_curve(cr.CandidateH.power(0.64), 4096)
    mirrored = cr._ratio_at(cr.CandidateH.power(0.64), 1.0 - xi)
    assert np.allclose(ratios, mirrored, atol=1e-12)


def test_invalid_candidate_rejected():
    # a tabulated candidate violating h > 0 on (0,1)
    grid = np.linspace(0.0, 1.0, 2001)
    values = np.maximum(0.0, 0.25 - np.abs(grid - 0.3))  # zero on a subinterval
    with pytest.raises(InvalidCandidateError):
        cr.sup_ratio(cr.CandidateH.tabulated(cr.GridFunction(grid, values)), 4096)


def test_tabulated_matches_power_family():
    grid = np.linspace(0.0, 1.0, 1 << 15)
    values = (grid * (1.0 - grid)) ** 0.64
    tab = cr.sup_ratio(cr.CandidateH.tabulated(cr.GridFunction(grid, values)), 8192)
    direct = cr.sup_ratio(cr.CandidateH.power(0.64), 8192)
    assert tab.ratio == pytest.approx(direct.ratio, abs=2e-4)


def test_mu_star_from_ratio():
    assert cr.mu_star_from_ratio(2.0 ** -0.25) == pytest.approx(4.0, abs=1e-12)
    got = cr.mu_star_from_ratio(0.833)
    assert got == pytest.approx(-1.0 / math.log2(0.833), abs=1e-12)
    assert got == pytest.approx(3.793459781999537, abs=1e-12)
    for bad in (0.70, 2.0 ** -0.5, 1.0, 1.2):
        with pytest.raises(ValueError):
            cr.mu_star_from_ratio(bad)


def test_grid_function_validation():
    with pytest.raises(ValueError):
        cr.GridFunction(np.array([0.0, 0.5, 0.5, 1.0]), np.zeros(4))  # not strictly increasing
    with pytest.raises(ValueError):
        cr.GridFunction(np.array([0.0, 1.0]), np.zeros(3))  # length mismatch


def test_iterate_g_start_is_indicator():
    its = cr.iterate_g(0.1, 0.9, 0, 4096)
    g0 = its[0]
    assert float(g0(0.5)) == 1.0
    assert float(g0(0.05)) == 0.0
    assert float(g0(0.95)) == 0.0


def test_iterate_g_one_step_examples():
    its = cr.iterate_g(0.01, 0.99, 1, 8192)
    # xi = 0.5: both images 0.25 and 0.75 sit inside (a, b)
    assert float(its[1](0.5)) == pytest.approx(1.0, abs=1e-12)
    # xi = 0.05: 0.0025 is outside, 0.0975 is inside
    assert float(its[1](0.05)) == pytest.approx(0.5, abs=1e-12)


def test_iterate_g_preserves_range_and_endpoints():
    its = cr.iterate_g(0.01, 0.99, 12, 4096)
    for g in its[1:]:
        assert np.all(g.values >= 0.0) and np.all(g.values <= 1.0)
        assert g.values[0] == 0.0 and g.values[-1] == 0.0


def test_iterate_g_interior_mass_decays():
    its = cr.iterate_g(0.01, 0.99, 20, 8192)
    at_half = [float(g(0.5)) for g in its]
    assert all(b <= a + 1e-12 for a, b in zip(at_half, at_half[1:]))


def test_iterate_g_validates_inputs():
    with pytest.raises(ValueError):
        cr.iterate_g(0.5, 0.5, 5, 4096)
    with pytest.raises(ValueError):
        cr.iterate_g(0.01, 0.99, 5, 1024)


def test_expectation_identity_one_step():
    # averaging g0 over the two children equals g1 at the parent
    its = cr.iterate_g(0.01, 0.99, 1, 8192)
    g0, g1 = its[0], its[1]
    for z in (0.2, 0.37, 0.5, 0.8):
        avg = 0.5 * (float(g0(z * z)) + float(g0(2 * z - z * z)))
        assert avg == pytest.approx(float(g1(z)), abs=1e-3)


def test_direct_count_oracle():
    """Iterated interior mass vs exact channel counting, levels 1..16."""
    its = cr.iterate_g(0.01, 0.99, 16, 1 << 13)
    le, lr = er.level_log_table(er.RootChannel(0.5), 1)
    for n in range(1, 17):
        if n > 1:
            le, lr = er.extend_log_table(le, lr, 1)
        z = er.linear_erasures(le)
        frac = float(np.mean((z > 0.01) & (z < 0.99)))
        assert float(its[n](0.5)) == pytest.approx(frac, abs=2e-3)


def _constant_iterates(values):
    grid = np.array([0.0, 1.0])
    return [cr.GridFunction(grid, np.array([v, v], dtype=np.float64)) for v in values]


def test_estimate_mu_recovers_planted_exponent():
    planted = [2.0 ** (-n / 4.0) for n in range(24)]
    assert cr.estimate_mu(_constant_iterates(planted), 0.5) == pytest.approx(4.0, abs=1e-9)


@given(st.floats(min_value=2.5, max_value=12.0))
@settings(max_examples=25)
def test_estimate_mu_planted_property(mu):
    planted = [2.0 ** (-n / mu) for n in range(20)]
    assert cr.estimate_mu(_constant_iterates(planted), 0.3) == pytest.approx(mu, rel=1e-9)


def test_estimate_mu_degenerate_inputs():
    with pytest.raises(ValueError):
        cr.estimate_mu(_constant_iterates([0.5] * 9), 0.5)  # too few iterates
    with pytest.raises(DegenerateFitError):
        cr.estimate_mu(_constant_iterates([0.5] * 20), 0.5)  # zero slope
    dead = [2.0 ** -n for n in range(10)] + [0.0] * 10
    with pytest.raises(DegenerateFitError):
        cr.estimate_mu(_constant_iterates(dead), 0.5)  # underflow in the window


def test_full_pipeline_estimate():
    its = cr.iterate_g(0.01, 0.99, 30, 1 << 13)
    mu = cr.estimate_mu(its, 0.5)
    assert mu == pytest.approx(3.628421745016466, abs=1e-9)
