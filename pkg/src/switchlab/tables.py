"""Dense joint tables over named finite variables.

Two value semirings are supported: nonnegative reals (:class:`ProbTable`)
and Booleans (:class:`PossTable`, where ``+`` is OR and ``*`` is AND).
Axis order is fixed at construction; the flat index is mixed-radix with the
first variable most significant (numpy C order).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

DEFAULT_EPS = 1e-9
ZERO_MASS = 1e-12


class TableError(ValueError):
    pass


class ZeroMassError(TableError):
    """Conditioning on an event of (numerically) zero probability."""


@dataclass(frozen=True)
class VarSpec:
    name: str
    card: int

    def __post_init__(self):
        if self.card < 1:
            raise TableError(f"variable {self.name!r} needs positive cardinality")


def binary(*names: str) -> list[VarSpec]:
    return [VarSpec(n, 2) for n in names]


class _Table:
    _dtype: type = float

    def __init__(self, variables: Sequence[VarSpec], values):
        variables = tuple(variables)
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise TableError(f"duplicate variable names: {names}")
        shape = tuple(v.card for v in variables)
        values = np.asarray(values, dtype=self._dtype)
        if values.size != int(np.prod(shape, dtype=int)):
            raise TableError(f"{values.size} values do not fill grid of shape {shape}")
        self.vars = variables
        self.values = values.reshape(shape)
        self.values.flags.writeable = False
        self._axes = {n: i for i, n in enumerate(names)}

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def axis(self, name: str) -> int:
        try:
            return self._axes[name]
        except KeyError:
            raise TableError(f"unknown variable {name!r}; table has {self.names}") from None

    def card(self, name: str) -> int:
        return self.vars[self.axis(name)].card

    def coords(self, name: str) -> np.ndarray:
        """Values of ``name`` broadcast against the table shape."""
        ax = self.axis(name)
        shape = [1] * len(self.vars)
        shape[ax] = self.vars[ax].card
        return np.arange(self.vars[ax].card).reshape(shape)

    def _new(self, variables, values):
        return type(self)(variables, values)

    def _sum(self, values, axes):
        raise NotImplementedError

    def marginalize(self, keep: Iterable[str]):
        keep = set(keep)
        for k in keep:
            self.axis(k)
        drop = tuple(i for i, n in enumerate(self.names) if n not in keep)
        kept = [v for v in self.vars if v.name in keep]
        return self._new(kept, self._sum(self.values, drop))

    def reorder(self, names: Sequence[str]):
        if sorted(names) != sorted(self.names):
            raise TableError("reorder needs a permutation of the table's variables")
        axes = [self.axis(n) for n in names]
        return self._new([self.vars[a] for a in axes], np.transpose(self.values, axes))

    def to_json(self) -> dict:
        return {
            "vars": [{"name": v.name, "card": v.card} for v in self.vars],
            "values": [_json_value(x) for x in self.values.ravel()],
        }

    @classmethod
    def from_json(cls, obj: Mapping):
        return cls([VarSpec(v["name"], int(v["card"])) for v in obj["vars"]], obj["values"])

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(f'{v.name}:{v.card}' for v in self.vars)})"


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return int(x)
    return round(float(x), 9)


class ProbTable(_Table):
    """Nonnegative real table.

    ``given`` names the conditioning variables of a conditional table; a
    joint table has ``given == ()``.
    """

    _dtype = float

    def __init__(self, variables: Sequence[VarSpec], values, given: Sequence[str] = ()):
        super().__init__(variables, values)
        if np.any(self.values < 0):
            raise TableError("probabilities must be nonnegative")
        self.given = tuple(given)
        for g in self.given:
            self.axis(g)

    def _new(self, variables, values):
        names = {v.name for v in variables}
        return ProbTable(variables, values, [g for g in self.given if g in names])

    def _sum(self, values, axes):
        return values.sum(axis=axes)

    def total(self) -> float:
        return float(self.values.sum())

    def normalization_defect(self) -> float:
        """Largest deviation from unit mass, per conditioning cell for conditional tables."""
        if not self.given:
            return abs(self.total() - 1.0)
        axes = tuple(i for i, n in enumerate(self.names) if n not in self.given)
        return float(np.abs(self.values.sum(axis=axes) - 1.0).max())

    def to_json(self) -> dict:
        out = super().to_json()
        if self.given:
            out["given"] = list(self.given)
        return out

    @classmethod
    def from_json(cls, obj: Mapping):
        return cls([VarSpec(v["name"], int(v["card"])) for v in obj["vars"]], obj["values"], obj.get("given", ()))


class PossTable(_Table):
    """Boolean possibility table; at least one cell must be possible."""

    _dtype = bool

    def __init__(self, variables: Sequence[VarSpec], values):
        super().__init__(variables, values)
        if not self.values.any():
            raise TableError("a possibility distribution needs at least one possible cell")

    def _sum(self, values, axes):
        return values.any(axis=axes)


# ---------------------------------------------------------------------------
# events
# ---------------------------------------------------------------------------


class Event:
    def mask(self, t: _Table) -> np.ndarray:
        raise NotImplementedError

    def variables(self) -> set[str]:
        raise NotImplementedError

    def __and__(self, other: "Event") -> "Event":
        return AllOf((self, other))

    def __invert__(self) -> "Event":
        return Not(self)


@dataclass(frozen=True)
class Assignment(Event):
    """Conjunction of ``var == value`` constraints."""

    items: tuple[tuple[str, int], ...]

    @classmethod
    def of(cls, mapping: Mapping[str, int] | None = None, **kw: int) -> "Assignment":
        d = dict(mapping or {}, **kw)
        return cls(tuple(d.items()))

    def as_dict(self) -> dict:
        return dict(self.items)

    def mask(self, t):
        m = np.ones(t.shape, dtype=bool)
        for name, value in self.items:
            m = m & (t.coords(name) == value)
        return m

    def variables(self):
        return {n for n, _ in self.items}


@dataclass(frozen=True)
class Parity(Event):
    """``XOR of vars == target`` over binary variables."""

    vars: tuple[str, ...]
    target: int

    def __init__(self, vars: Iterable[str], target: int):
        object.__setattr__(self, "vars", tuple(vars))
        object.__setattr__(self, "target", int(target) & 1)

    def mask(self, t):
        s = np.zeros(t.shape, dtype=int)
        for name in self.vars:
            s = s + t.coords(name)
        return (s % 2) == self.target

    def variables(self):
        return set(self.vars)


@dataclass(frozen=True)
class Equal(Event):
    """``left == right`` for two variables."""

    left: str
    right: str

    def mask(self, t):
        return np.broadcast_to(t.coords(self.left) == t.coords(self.right), t.shape)

    def variables(self):
        return {self.left, self.right}


@dataclass(frozen=True)
class AllOf(Event):
    events: tuple[Event, ...]

    def mask(self, t):
        m = np.ones(t.shape, dtype=bool)
        for e in self.events:
            m = m & e.mask(t)
        return m

    def variables(self):
        return set().union(*(e.variables() for e in self.events))


@dataclass(frozen=True)
class Not(Event):
    event: Event

    def mask(self, t):
        return ~self.event.mask(t)

    def variables(self):
        return self.event.variables()


def _as_event(e) -> Event | None:
    if e is None or isinstance(e, Event):
        return e
    return Assignment.of(e)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def possibilize(t: ProbTable, eps: float = DEFAULT_EPS) -> PossTable:
    """Cells with probability above ``eps`` become possible."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    return PossTable(t.vars, t.values > eps)


def marginalize(t, keep: Iterable[str]):
    return t.marginalize(keep)


def mass(t: ProbTable, event) -> float:
    event = _as_event(event)
    used = event.variables()
    if len(used) < len(t.vars):
        t = t.marginalize(used)
    return float(t.values[np.broadcast_to(event.mask(t), t.shape)].sum())


def prob(t: ProbTable, event, given=None) -> float:
    """``P(event | given)`` computed from a joint table."""
    event, given = _as_event(event), _as_event(given)
    if given is None:
        return mass(t, event)
    denom = mass(t, given)
    if denom <= ZERO_MASS:
        raise ZeroMassError(f"conditioning event has mass {denom:.3g}")
    return mass(t, AllOf((event, given))) / denom


def condition(t: ProbTable, on: Mapping[str, int] | Assignment) -> ProbTable:
    """Renormalised slice of a joint table; conditioned variables are dropped."""
    on = _as_event(on)
    if not isinstance(on, Assignment):
        raise TableError("condition() takes a variable assignment")
    idx = [slice(None)] * len(t.vars)
    for name, value in on.items:
        ax = t.axis(name)
        if not 0 <= value < t.vars[ax].card:
            raise TableError(f"value {value} out of range for {name!r}")
        idx[ax] = value
    sub = t.values[tuple(idx)]
    total = float(sub.sum())
    if total <= ZERO_MASS:
        raise ZeroMassError(f"conditioning cell {on.as_dict()} has mass {total:.3g}")
    fixed = on.variables()
    return ProbTable([v for v in t.vars if v.name not in fixed], sub / total)


class IndependenceResult(NamedTuple):
    independent: bool
    defect: float


def _grouped(t, xs, ys, zs):
    """Marginal of ``t`` reshaped to (|X|, |Y|, |Z|)."""
    m = t.marginalize([*xs, *ys, *zs]).reorder([*xs, *ys, *zs])
    size = lambda names: int(np.prod([t.card(n) for n in names], dtype=int))
    return m.values.reshape(size(xs), size(ys), size(zs))


def check_independence(t, xs: Iterable[str], ys: Iterable[str], given=None, tol: float = DEFAULT_EPS) -> IndependenceResult:
    """Test ``xs`` independent of ``ys`` (given ``given``).

    ``given`` may be ``None``, a list of variable names (independence in
    every conditioning cell) or an assignment (independence within that
    slice only). For probability tables the defect is the largest
    ``|P(xy|z) - P(x|z)P(y|z)|``; for possibility tables it is 0 or 1.
    """
    xs, ys = list(xs), list(ys)
    if isinstance(given, (Mapping, Assignment)):
        sl = _as_event(given)
        zs: list[str] = []
        keep = [n for n in t.names if n not in sl.variables()]
        if set(xs) & sl.variables() or set(ys) & sl.variables():
            raise TableError("independence variables overlap the conditioning assignment")
        if isinstance(t, PossTable):
            vals = t.values & np.broadcast_to(sl.mask(t), t.shape)
            if not vals.any():
                return IndependenceResult(True, 0.0)
            t = PossTable(t.vars, vals).marginalize(keep)
        else:
            try:
                t = condition(t, sl)
            except ZeroMassError:
                return IndependenceResult(True, 0.0)
    else:
        zs = list(given or [])
    if set(xs) & set(ys) or set(xs) & set(zs) or set(ys) & set(zs):
        raise TableError("independence variable sets must be disjoint")
    g = _grouped(t, xs, ys, zs)
    if isinstance(t, PossTable):
        px = g.any(axis=1, keepdims=True)
        py = g.any(axis=0, keepdims=True)
        ok = bool(np.array_equal(g, px & py))
        return IndependenceResult(ok, 0.0 if ok else 1.0)
    pz = g.sum(axis=(0, 1))
    live = pz > ZERO_MASS
    if not live.any():
        return IndependenceResult(True, 0.0)
    g = g[:, :, live] / pz[live]
    px = g.sum(axis=1, keepdims=True)
    py = g.sum(axis=0, keepdims=True)
    defect = float(np.abs(g - px * py).max())
    return IndependenceResult(defect <= tol, defect)


def check_implication(t: PossTable, antecedent, consequent) -> bool:
    """``antecedent => consequent``: no possible cell satisfies antecedent and not consequent."""
    antecedent, consequent = _as_event(antecedent), _as_event(consequent)
    bad = antecedent.mask(t) & ~consequent.mask(t)
    return not bool((t.values & bad).any())


def violation_mass(t: ProbTable, antecedent, consequent) -> float:
    """Probability mass on cells with antecedent and not consequent."""
    antecedent, consequent = _as_event(antecedent), _as_event(consequent)
    return mass(t, AllOf((antecedent, Not(consequent))))


class LowerBound(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def joint_lower_bound(t: ProbTable, events: Sequence, tol: float = ZERO_MASS) -> LowerBound:
    """Evaluate ``sum_i P(A_i) <= P(A_1, ..., A_n) + n - 1``."""
    events = [_as_event(e) for e in events]
    if not events:
        raise ValueError("need at least one event")
    lhs = sum(mass(t, e) for e in events)
    rhs = mass(t, AllOf(tuple(events))) + len(events) - 1
    return LowerBound(lhs, rhs, lhs <= rhs + tol)


def joint_from_conditional(cond: ProbTable, input_dist: ProbTable | None = None) -> ProbTable:
    """Multiply a conditional table by a distribution over its conditioning variables.

    Defaults to the uniform input distribution.
    """
    given = list(cond.given)
    if not given:
        raise TableError("table has no conditioning variables")
    if input_dist is None:
        n = int(np.prod([cond.card(g) for g in given], dtype=int))
        input_dist = ProbTable([cond.vars[cond.axis(g)] for g in given], np.full(n, 1.0 / n))
    shape = [1] * len(cond.vars)
    for g in given:
        shape[cond.axis(g)] = cond.card(g)
    order = sorted(given, key=cond.axis)
    w = input_dist.reorder(order).values.reshape(shape)
    return ProbTable(cond.vars, cond.values * w)
