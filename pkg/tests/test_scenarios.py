import itertools

import numpy as np
import pytest

from conftest import eigenprojector
from switchlab.linalg import PAULI_X, PAULI_Y, PAULI_Z, PHI_PLUS, ghz_ket, projector
from switchlab.ops import joint_switch_instrument
from switchlab.scenarios import (
    GHZ_IMPLICATIONS,
    ChainedScenarioConfig,
    GhzScenarioConfig,
    build_chained_switch,
    build_ghz_mermin,
    build_ghz_three_switch,
    chained_directions,
    order_zero_conditions,
    restrict_chained,
    switch_implications,
    verify_switch_data_conditions,
)
from switchlab.tables import check_implication, prob, violation_mass


def pauli(n):
    return n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z


@pytest.fixture(scope="module")
def switch_data():
    return build_ghz_three_switch(GhzScenarioConfig())


def test_plain_ghz_against_projector_loop():
    d = build_ghz_mermin()
    rho = projector(ghz_ket(3))
    ops = {0: PAULI_Y, 1: PAULI_X}
    for x, y, z, a, b, c in itertools.product((0, 1), repeat=6):
        proj = [eigenprojector(ops[s], (-1) ** o) for s, o in ((x, a), (y, b), (z, c))]
        expect = np.real(np.trace(rho @ np.kron(np.kron(*proj[:2]), proj[2])))
        got = d.conditional.values[a, b, c, x, y, z]
        assert got == pytest.approx(expect, abs=1e-12)


def test_plain_ghz_implications_hold():
    d = build_ghz_mermin()
    for ant, cons in GHZ_IMPLICATIONS:
        assert violation_mass(d.joint, ant, cons) < 1e-12
        assert check_implication(d.possible, ant, cons)


def test_three_switch_matches_instrument_products(switch_data):
    rho = projector(ghz_ket(3))
    q = switch_data.conditional.reorder(
        ["a1", "a2", "a3", "b1", "b2", "b3", "c1", "c2", "c3", "x1", "x2", "y1", "y2", "z1", "z2"]).values
    for xs in [(0, 0, 1, 1, 0, 1), (1, 1, 1, 1, 1, 1), (1, 0, 0, 1, 1, 0)]:
        wings = [joint_switch_instrument(xs[2 * k], xs[2 * k + 1]).effects() for k in range(3)]
        for oa, ob, oc in [((0, 1, 0), (1, 1, 1), (0, 0, 1)), ((1, 0, 0), (0, 1, 1), (1, 1, 0))]:
            eff = np.kron(np.kron(wings[0][oa], wings[1][ob]), wings[2][oc])
            assert q[oa + ob + oc + xs] == pytest.approx(np.real(np.trace(rho @ eff)), abs=1e-12)


def test_switch_data_is_normalized(switch_data):
    assert switch_data.conditional.normalization_defect() < 1e-12
    assert switch_data.joint.total() == pytest.approx(1.0, abs=1e-12)


def test_switch_data_conditions_hold(switch_data):
    report = verify_switch_data_conditions(switch_data)
    assert report.passed
    assert len(report.conditions) == 13
    assert len(switch_implications()) == 4
    assert all(len(order_zero_conditions(s)) == 3 for s in "ABC")


def test_noisy_data_fails_conditions():
    report = verify_switch_data_conditions(build_ghz_three_switch(GhzScenarioConfig(noise=0.3)))
    assert not report.passed
    assert report.failures()


def test_noise_validation():
    with pytest.raises(ValueError):
        GhzScenarioConfig(noise=1.5)
    with pytest.raises(ValueError):
        ChainedScenarioConfig(N=1)
    with pytest.raises(ValueError):
        ChainedScenarioConfig(schedule="zigzag")


def _angle(u, v):
    return np.arccos(np.clip(np.dot(u, v), -1, 1))


@pytest.mark.parametrize("N", range(2, 10))
def test_spherical_schedule_geometry(N):
    a, b = chained_directions(N)
    theta = np.pi / (N + 1)
    flip = np.array([1, -1, 1])
    # correlation-space partners of B are its y-reflections
    pts = np.empty((2 * N + 2, 3))
    pts[0::2], pts[1::2] = a, b * flip
    assert np.allclose(np.linalg.norm(pts, axis=1), 1)
    for u, v in zip(pts, pts[1:]):
        assert _angle(u, v) == pytest.approx(theta, abs=1e-12)
    assert _angle(pts[0], pts[-1]) == pytest.approx(np.pi - theta, abs=1e-12)


def equality_oracle(a_dir, b_dir):
    """R(a = b) for Phi+ from eigenprojectors."""
    rho = projector(PHI_PLUS)
    total = 0.0
    for s in (1.0, -1.0):
        eff = np.kron(eigenprojector(pauli(a_dir), s), eigenprojector(pauli(b_dir), s))
        total += np.real(np.trace(rho @ eff))
    return total


@pytest.mark.parametrize("schedule", ["spherical", "planar", "optimal"])
@pytest.mark.parametrize("N", [2, 3, 5])
def test_restricted_table_matches_phi_plus_oracle(schedule, N):
    d = build_chained_switch(ChainedScenarioConfig(N, schedule))
    R, alpha = restrict_chained(d, N)
    assert alpha < 1e-12
    a, b = chained_directions(N, schedule)
    v = R.reorder(["a", "b", "x3", "y"]).values
    for x, y in itertools.product(range(N + 1), repeat=2):
        assert v[0, 0, x, y] + v[1, 1, x, y] == pytest.approx(equality_oracle(a[x], b[y]), abs=1e-12)


def test_restricted_table_first_entry():
    theta = np.pi / 4
    R, _ = restrict_chained(build_chained_switch(ChainedScenarioConfig(3)))
    v = R.reorder(["a", "b", "x3", "y"]).values
    assert v[0, 0, 0, 0] + v[1, 1, 0, 0] == pytest.approx(np.cos(theta / 2) ** 2, abs=1e-12)


def test_chained_x3_zero_uses_a1_under_ones():
    d = build_chained_switch(ChainedScenarioConfig(2))
    # at x1 = x2 = 1 the first outcome is the Z measurement of the control
    for y in range(3):
        p = prob(d.joint, {"a1": 0, "b": 0}, {"x1": 1, "x2": 1, "x3": 1, "y": y})
        assert p == pytest.approx(equality_oracle((0, 0, 1), chained_directions(2)[1][y]) / 2, abs=1e-12)


def test_restrict_checks_n():
    d = build_chained_switch(ChainedScenarioConfig(3))
    with pytest.raises(ValueError):
        restrict_chained(d, 4)
