"""Concrete experiments: the three-switch GHZ setup and the single-switch chained setup.

All probabilities are exact Born-rule values computed from instrument
effects, ``Q(out | in) = Tr[rho (E_A (x) E_B (x) ...)]``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .linalg import PHI_PLUS, ghz_ket, projector
from .ops import (
    ControlBasis,
    Instrument,
    direction_measurement,
    joint_switch_instrument,
    x_measurement,
    y_measurement,
)
from .tables import (
    DEFAULT_EPS,
    Assignment,
    Parity,
    PossTable,
    ProbTable,
    VarSpec,
    check_implication,
    joint_from_conditional,
    mass,
    possibilize,
    ZeroMassError,
    prob,
    violation_mass,
)

SWITCHES = ("A", "B", "C")
# per-switch (output prefix, input prefix)
WING_LETTERS = {"A": ("a", "x"), "B": ("b", "y"), "C": ("c", "z")}

GHZ_OUTPUTS = tuple(f"{o}{k}" for o, _ in WING_LETTERS.values() for k in (1, 2, 3))
GHZ_INPUTS = tuple(f"{i}{k}" for _, i in WING_LETTERS.values() for k in (1, 2))


@dataclass
class ScenarioData:
    """Conditional and joint tables of one experiment."""

    conditional: ProbTable
    joint: ProbTable
    config: dict = field(default_factory=dict)
    eps: float = DEFAULT_EPS

    @property
    def possible(self) -> PossTable:
        return possibilize(self.joint, self.eps)

    @property
    def outputs(self) -> tuple[str, ...]:
        return tuple(n for n in self.conditional.names if n not in self.conditional.given)

    @property
    def inputs(self) -> tuple[str, ...]:
        return self.conditional.given

    def to_json(self) -> dict:
        return {"config": self.config, "conditional": self.conditional.to_json(), "joint": self.joint.to_json()}


def _from_conditional(cond_values: np.ndarray, outputs, inputs, config, cards=None) -> ScenarioData:
    cards = cards or {}
    variables = [VarSpec(n, cards.get(n, 2)) for n in (*outputs, *inputs)]
    cond = ProbTable(variables, np.clip(cond_values, 0.0, None), given=inputs)
    return ScenarioData(cond, joint_from_conditional(cond), config)


def _effects(inst: Instrument) -> np.ndarray:
    """Stack instrument effects into shape ``(*outcome_shape, d, d)``."""
    outs = inst.outcomes
    eff = inst.effects()
    if isinstance(outs[0], tuple):
        shape = tuple(max(o[i] for o in outs) + 1 for i in range(len(outs[0])))
    else:
        shape = (max(outs) + 1,)
    arr = np.zeros(shape + (inst.dim_in, inst.dim_in), dtype=complex)
    for o, e in eff.items():
        arr[o if isinstance(o, tuple) else (o,)] = e
    return arr


def switch_wing_effects(final: Instrument | None = None, basis: ControlBasis = ControlBasis.X) -> np.ndarray:
    """Effects of one switch wing, shape ``(x1, x2, a1, a2, a3, 2, 2)``."""
    out = np.zeros((2, 2, 2, 2, 2, 2, 2), dtype=complex)
    for x1, x2 in itertools.product((0, 1), repeat=2):
        out[x1, x2] = _effects(joint_switch_instrument(x1, x2, final, basis))
    return out


def _born(rho: np.ndarray, *wings: np.ndarray, setting_ndims: tuple[int, ...], outcome_ndims: tuple[int, ...]) -> np.ndarray:
    """Born probabilities ``Tr[rho (E_1 (x) ... (x) E_n)]`` as ``[outcomes..., settings...]``.

    Each wing array is ``[settings..., outcomes..., d, d]``.
    """
    n = len(wings)
    dims = [w.shape[-1] for w in wings]
    rho_t = rho.reshape(dims + dims)
    counter = itertools.count()
    row = [next(counter) for _ in range(n)]
    col = [next(counter) for _ in range(n)]
    operands: list = [rho_t, row + col]
    out_outcomes, out_settings = [], []
    for k, w in enumerate(wings):
        s = [next(counter) for _ in range(setting_ndims[k])]
        o = [next(counter) for _ in range(outcome_ndims[k])]
        operands += [w, s + o + [col[k], row[k]]]
        out_outcomes += o
        out_settings += s
    q = np.einsum(*operands, out_outcomes + out_settings, optimize=True)
    return np.real(q)


def depolarized(psi: np.ndarray, strength: float) -> np.ndarray:
    if not 0.0 <= strength <= 1.0:
        raise ValueError(f"depolarizing strength must lie in [0, 1], got {strength}")
    d = psi.shape[0]
    return (1 - strength) * projector(psi) + strength * np.eye(d) / d


# ---------------------------------------------------------------------------
# plain GHZ-Mermin
# ---------------------------------------------------------------------------

GHZ_IMPLICATIONS = (
    (Assignment.of(x=1, y=1, z=1), Parity("abc", 0)),
    (Assignment.of(x=1, y=0, z=0), Parity("abc", 1)),
    (Assignment.of(x=0, y=1, z=0), Parity("abc", 1)),
    (Assignment.of(x=0, y=0, z=1), Parity("abc", 1)),
)


def build_ghz_mermin(noise: float = 0.0) -> ScenarioData:
    """Three parties on a GHZ state; setting 0 measures Y, setting 1 measures X."""
    rho = depolarized(ghz_ket(3), noise)
    wing = np.stack([_effects(y_measurement()), _effects(x_measurement())])
    q = _born(rho, wing, wing, wing, setting_ndims=(1, 1, 1), outcome_ndims=(1, 1, 1))
    return _from_conditional(q, ("a", "b", "c"), ("x", "y", "z"), {"scenario": "ghz-mermin", "noise": noise})


# ---------------------------------------------------------------------------
# three-switch GHZ
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GhzScenarioConfig:
    noise: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError(f"depolarizing strength must lie in [0, 1], got {self.noise}")


def _all(prefix: str, value: int) -> dict:
    return {f"{prefix}1": value, f"{prefix}2": value}


def switch_implications() -> list[tuple[str, Assignment, Parity]]:
    """The four parity implications of the three-switch data."""
    rows = []
    for name, (xv, yv, zv), parity_vars, target in (
        ("x=1,y=1,z=1 => a1+b1+c1=0", (1, 1, 1), ("a1", "b1", "c1"), 0),
        ("x=1,y=0,z=0 => a1+b3+c3=1", (1, 0, 0), ("a1", "b3", "c3"), 1),
        ("x=0,y=1,z=0 => a3+b1+c3=1", (0, 1, 0), ("a3", "b1", "c3"), 1),
        ("x=0,y=0,z=1 => a3+b3+c1=1", (0, 0, 1), ("a3", "b3", "c1"), 1),
    ):
        ant = Assignment.of({**_all("x", xv), **_all("y", yv), **_all("z", zv)})
        rows.append((name, ant, Parity(parity_vars, target)))
    return rows


def order_zero_conditions(switch: str) -> list[tuple[str, Assignment]]:
    """Events that must be impossible in one switch's marginal for forced determinism."""
    o, i = WING_LETTERS[switch]
    return [
        (f"{switch}: r({o}1=1,{i}2=0)=0", Assignment.of({f"{o}1": 1, f"{i}2": 0})),
        (f"{switch}: r({o}2=1,{i}1=0)=0", Assignment.of({f"{o}2": 1, f"{i}1": 0})),
        (f"{switch}: r({o}1={o}2=0,{i}1={i}2=1)=0", Assignment.of({f"{o}1": 0, f"{o}2": 0, f"{i}1": 1, f"{i}2": 1})),
    ]


def build_ghz_three_switch(cfg: GhzScenarioConfig = GhzScenarioConfig()) -> ScenarioData:
    """Three X-controlled switches whose controls share a (possibly depolarized) GHZ state."""
    rho = depolarized(ghz_ket(3), cfg.noise)
    wing = switch_wing_effects(y_measurement(), ControlBasis.X)
    q = _born(rho, wing, wing, wing, setting_ndims=(2, 2, 2), outcome_ndims=(3, 3, 3))
    config = {"scenario": "ghz-three-switch", "control_basis": "X", "final_measurement": "Y",
              "target_init": "|0>", "noise": cfg.noise}
    return _from_conditional(q, GHZ_OUTPUTS, GHZ_INPUTS, config)


@dataclass(frozen=True)
class ConditionResult:
    name: str
    passed: bool
    mass: float

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "detail": round(self.mass, 9)}


@dataclass
class ConditionsReport:
    conditions: list[ConditionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failures(self) -> list[str]:
        return [c.name for c in self.conditions if not c.passed]


def verify_switch_data_conditions(d: ScenarioData) -> ConditionsReport:
    """The four parity implications plus the nine per-switch zero conditions.

    A condition passes when it holds in the possibility table; the reported
    mass is the probability of the offending cells.
    """
    q, P = d.possible, d.joint
    out = []
    for name, ant, cons in switch_implications():
        out.append(ConditionResult(name, check_implication(q, ant, cons), violation_mass(P, ant, cons)))
    for s in SWITCHES:
        for name, event in order_zero_conditions(s):
            out.append(ConditionResult(name, not bool((q.values & event.mask(q)).any()), mass(P, event)))
    return ConditionsReport(out)


# ---------------------------------------------------------------------------
# single-switch chained setup
# ---------------------------------------------------------------------------

SCHEDULES = ("spherical", "planar", "optimal")


def _zx(phi: float) -> np.ndarray:
    return np.array([np.sin(phi), 0.0, np.cos(phi)])


def _reflect_y(v: np.ndarray) -> np.ndarray:
    # <Phi+| m.s (x) n.s |Phi+> = m . (nx, -ny, nz)
    return v * np.array([1.0, -1.0, 1.0])


def _spherical_chain(N: int) -> np.ndarray:
    """2N+2 unit vectors, consecutive ones pi/(N+1) apart, first and last pi - pi/(N+1) apart.

    Starts at +Z. Steps run along the Z-X great circle: forward to N*theta,
    then back-and-forth. For even N the first step is replaced by a detour
    through the apex of an equilateral spherical triangle, which fixes the
    step-count parity.
    """
    theta = np.pi / (N + 1)
    pts = [_zx(0.0)]
    pos = 0
    if N % 2 == 0:
        u0, u1 = _zx(0.0), _zx(theta)
        mid = (u0 + u1) / np.linalg.norm(u0 + u1)
        a = np.cos(theta) / np.cos(theta / 2)
        pts.append(a * mid + np.sqrt(1 - a * a) * np.array([0.0, 1.0, 0.0]))
        pos = 1
        pts.append(_zx(theta))
    while pos < N:
        pos += 1
        pts.append(_zx(pos * theta))
    while len(pts) < 2 * N + 2:
        pts.append(_zx((pos - 1) * theta))
        pts.append(_zx(pos * theta))
    return np.array(pts)


def chained_directions(N: int, schedule: str = "spherical") -> tuple[np.ndarray, np.ndarray]:
    """Bloch directions ``(A[x3], B[y])`` for ``x3, y in 0..N``.

    ``spherical``: neighbouring settings pi/(N+1) apart and the (0, N) pair
    pi - pi/(N+1) apart in correlation space, matching the closed form
    ``(N+1)(cos(pi/(N+1)) + 1) - 1``; leaves the Z-X plane when needed.
    ``planar``: A at 2j*theta, B at (2i+1)*theta in the Z-X plane.
    ``optimal``: the planar chain with spacing pi/(2N+2).
    """
    if N < 2:
        raise ValueError(f"chained scenario needs N >= 2, got {N}")
    if schedule == "spherical":
        pts = _spherical_chain(N)
        return pts[0::2], np.array([_reflect_y(p) for p in pts[1::2]])
    if schedule in ("planar", "optimal"):
        theta = np.pi / (N + 1) if schedule == "planar" else np.pi / (2 * N + 2)
        a = np.array([_zx(2 * j * theta) for j in range(N + 1)])
        b = np.array([_zx((2 * i + 1) * theta) for i in range(N + 1)])
        return a, b
    raise ValueError(f"unknown schedule {schedule!r}; choose from {SCHEDULES}")


@dataclass(frozen=True)
class ChainedScenarioConfig:
    N: int = 3
    schedule: str = "spherical"
    noise: float = 0.0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"chained scenario needs N >= 2, got {self.N}")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError("depolarizing strength must lie in [0, 1]")

    @property
    def theta(self) -> float:
        return np.pi / (self.N + 1)


CHAINED_OUTPUTS = ("a1", "a2", "a3", "b")
CHAINED_INPUTS = ("x1", "x2", "x3", "y")


def build_chained_switch(cfg: ChainedScenarioConfig = ChainedScenarioConfig()) -> ScenarioData:
    """Z-controlled switch whose control is half of ``|Phi+>``; B measures the other half."""
    N = cfg.N
    a_dirs, b_dirs = chained_directions(N, cfg.schedule)
    wing_a = np.zeros((2, 2, N + 1, 2, 2, 2, 2, 2), dtype=complex)
    for x1, x2 in itertools.product((0, 1), repeat=2):
        for j, n in enumerate(a_dirs):
            wing_a[x1, x2, j] = _effects(joint_switch_instrument(x1, x2, direction_measurement(n), ControlBasis.Z))
    wing_b = np.stack([_effects(direction_measurement(n)) for n in b_dirs])
    rho = depolarized(PHI_PLUS, cfg.noise)
    q = _born(rho, wing_a, wing_b, setting_ndims=(3, 1), outcome_ndims=(3, 1))
    config = {"scenario": "chained-switch", "N": N, "schedule": cfg.schedule, "control_basis": "Z",
              "shared_state": "Phi+", "noise": cfg.noise,
              "a_directions": np.round(a_dirs, 12).tolist(), "b_directions": np.round(b_dirs, 12).tolist()}
    return _from_conditional(q, CHAINED_OUTPUTS, CHAINED_INPUTS, config, cards={"x3": N + 1, "y": N + 1})


def chained_alpha(joint: ProbTable, prefix: str = "a", inputs: str = "x") -> float:
    """``P(o1=1 | i=10) + P(o2=1 | i=01) + P(o1 o2=00 | i=11)``."""
    o1, o2, i1, i2 = f"{prefix}1", f"{prefix}2", f"{inputs}1", f"{inputs}2"
    joint = joint.marginalize([o1, o2, i1, i2])
    return (
        prob(joint, {o1: 1}, {i1: 1, i2: 0})
        + prob(joint, {o2: 1}, {i1: 0, i2: 1})
        + prob(joint, {o1: 0, o2: 0}, {i1: 1, i2: 1})
    )


def restrict_chained(d: ScenarioData | ProbTable, N: int | None = None) -> tuple[ProbTable, float]:
    """Restricted table ``R(a b | x3 y)`` and the determinism penalty alpha.

    For ``x3 = 0`` the outcome is ``a1`` at ``x1 = x2 = 1``; otherwise it
    is ``a3`` at ``x1 = x2 = 0``.
    """
    joint = d.joint if isinstance(d, ScenarioData) else d
    n_settings = joint.card("x3")
    if N is not None and N + 1 != n_settings:
        raise ValueError(f"table has {n_settings} settings, expected N+1 = {N + 1}")
    if joint.card("y") != n_settings:
        raise ValueError("x3 and y must range over the same settings")
    v = joint.marginalize(["a1", "a3", "b", "x1", "x2", "x3", "y"]).reorder(
        ["x1", "x2", "a1", "a3", "b", "x3", "y"]).values
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = v / v.sum(axis=(2, 3, 4), keepdims=True)
    if not np.isfinite(cond[[0, 1], [0, 1]]).all():
        raise ZeroMassError("restricted table needs x1 = x2 settings with nonzero mass")
    r = np.empty((2, 2, n_settings, n_settings))
    r[:, :, 0] = cond[1, 1].sum(axis=1)[:, :, 0]
    r[:, :, 1:] = cond[0, 0].sum(axis=0)[:, :, 1:]
    R = ProbTable([VarSpec("a", 2), VarSpec("b", 2), VarSpec("x3", n_settings), VarSpec("y", n_settings)], r,
                  given=("x3", "y"))
    return R, chained_alpha(joint)


__all__ = [
    "GhzScenarioConfig",
    "ChainedScenarioConfig",
    "ScenarioData",
    "build_ghz_mermin",
    "build_ghz_three_switch",
    "build_chained_switch",
    "verify_switch_data_conditions",
    "restrict_chained",
    "chained_directions",
    "switch_implications",
    "order_zero_conditions",
    "GHZ_IMPLICATIONS",
]
