import itertools

import numpy as np
import pytest

from conftest import eigenprojector, random_density
from switchlab.linalg import KET0, PAULI_X, PAULI_Y, PAULI_Z, partial_trace, projector, tensor_product
from switchlab.ops import (
    ControlBasis,
    CPMap,
    DimensionError,
    Instrument,
    agent_instrument,
    angle_measurement,
    direction_measurement,
    identity_instrument,
    joint_switch_instrument,
    switch_operator,
    switch_supermap,
    validate_instrument,
    x_measurement,
    y_measurement,
)


def random_unitary(rng, d=2):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / abs(np.diag(r)))


@pytest.mark.parametrize("basis", list(ControlBasis))
def test_switch_of_unitaries_is_unitary(rng, basis):
    w = switch_operator(random_unitary(rng), random_unitary(rng), basis)
    assert np.allclose(w.conj().T @ w, np.eye(4), atol=1e-12)


def test_switch_of_identities_is_identity():
    assert np.allclose(switch_operator(np.eye(2), np.eye(2)), np.eye(4))


def test_switch_orders_by_control_branch():
    e, f = PAULI_X, PAULI_Z
    w = switch_operator(e, f, ControlBasis.Z)
    assert np.allclose(w[:2, :2], f @ e)
    assert np.allclose(w[2:, 2:], e @ f)


def test_switch_rejects_mismatched_operators():
    with pytest.raises(DimensionError):
        switch_operator(np.eye(2), np.eye(3))


@pytest.mark.parametrize("x", [0, 1])
def test_agent_instruments_are_trace_preserving(x):
    assert validate_instrument(agent_instrument(x)).passed


def test_agent_instrument_rejects_bad_setting():
    with pytest.raises(ValueError):
        agent_instrument(2)


def test_cpmap_requires_dimensions_for_zero_map():
    with pytest.raises(DimensionError):
        CPMap.from_kraus([])
    assert np.allclose(CPMap.zero(2)(np.eye(2)), 0)


def test_instrument_rejects_mixed_dimensions():
    with pytest.raises(DimensionError):
        Instrument({0: CPMap.identity(2), 1: CPMap.identity(3)})


def test_direction_measurement_matches_eigenprojectors():
    n = np.array([0.6, 0.0, 0.8])
    op = n[0] * PAULI_X + n[2] * PAULI_Z
    eff = direction_measurement(n).effects()
    assert np.allclose(eff[0], eigenprojector(op, 1.0))
    assert np.allclose(eff[1], eigenprojector(op, -1.0))
    assert np.allclose(y_measurement().effects()[0], eigenprojector(PAULI_Y, 1.0))
    assert np.allclose(x_measurement().effects()[1], eigenprojector(PAULI_X, -1.0))


def test_angle_measurement_probability():
    # |0> measured along pi/4 from Z: cos^2(pi/8)
    p = angle_measurement(np.pi / 4).probabilities(projector(KET0))
    assert p[0] == pytest.approx(0.853553, abs=5e-7)
    assert p[0] == pytest.approx(np.cos(np.pi / 8) ** 2, abs=1e-12)


def test_switch_supermap_is_an_instrument():
    inst = switch_supermap(agent_instrument(1), agent_instrument(0))
    assert validate_instrument(inst).passed
    assert set(inst.outcomes) == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_switch_of_identity_instruments_acts_trivially(rng):
    rho = random_density(rng, 4)
    out = switch_supermap(identity_instrument(), identity_instrument()).apply(rho)
    assert np.allclose(out[(0, 0)], rho)


def density_route(x1, x2, rho_c, basis=ControlBasis.X):
    """Oracle: run the supermap on rho_c (x) |0><0|, measure Y on the control, trace the target."""
    sw = switch_supermap(agent_instrument(x1), agent_instrument(x2), basis)
    proj = {0: eigenprojector(PAULI_Y, 1.0), 1: eigenprojector(PAULI_Y, -1.0)}
    out = {}
    for (a1, a2), m in sw.maps.items():
        state = m(tensor_product(rho_c, projector(KET0)))
        control = partial_trace(state, [2, 2], keep=[0])
        for a3 in (0, 1):
            out[(a1, a2, a3)] = float(np.real(np.trace(proj[a3] @ control)))
    return out


@pytest.mark.parametrize("x1,x2", list(itertools.product((0, 1), repeat=2)))
@pytest.mark.parametrize("basis", list(ControlBasis))
def test_joint_instrument_matches_density_route(rng, x1, x2, basis):
    inst = joint_switch_instrument(x1, x2, basis=basis)
    assert validate_instrument(inst).passed
    for _ in range(3):
        rho = random_density(rng, 2)
        expect = density_route(x1, x2, rho, basis)
        got = inst.probabilities(rho)
        for k, v in expect.items():
            assert got[k] == pytest.approx(v, abs=1e-12)


def test_joint_instrument_with_mixed_target(rng):
    target = random_density(rng, 2)
    inst = joint_switch_instrument(1, 0, target_init=target)
    assert validate_instrument(inst).passed


def test_all_one_marginal_is_x_measurement(rng):
    inst = joint_switch_instrument(1, 1)
    rho = random_density(rng, 2)
    p = inst.probabilities(rho)
    plus = eigenprojector(PAULI_X, 1.0)
    p_a1_0 = sum(p[(0, a2, a3)] for a2 in (0, 1) for a3 in (0, 1))
    assert p_a1_0 == pytest.approx(np.real(np.trace(plus @ rho)), abs=1e-12)
