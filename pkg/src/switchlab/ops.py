"""Quantum operations: CP maps, instruments and the quantum switch."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import numpy as np

from .linalg import (
    ALGEBRAIC_TOL,
    KET0,
    KET1,
    KET_MINUS,
    KET_PLUS,
    adjoint,
    bloch_ket,
    ketbra,
    projector,
    tensor_product,
)


class DimensionError(ValueError):
    pass


class ControlBasis(enum.Enum):
    X = "X"
    Z = "Z"

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        """(first-order branch, second-order branch) control projectors."""
        if self is ControlBasis.X:
            return projector(KET_PLUS), projector(KET_MINUS)
        return projector(KET0), projector(KET1)


@dataclass(frozen=True)
class CPMap:
    """A completely positive map ``rho -> sum_k K rho K^dagger``.

    An empty Kraus list is the zero map; dimensions are then taken from
    ``dim_in``/``dim_out``, which are otherwise inferred.
    """

    kraus: tuple[np.ndarray, ...]
    dim_in: int
    dim_out: int

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray], dim_in: int | None = None, dim_out: int | None = None) -> "CPMap":
        ops = tuple(np.asarray(k, dtype=complex) for k in kraus)
        if ops:
            dim_out, dim_in = ops[0].shape
            for k in ops:
                if k.shape != (dim_out, dim_in):
                    raise DimensionError(f"Kraus operators disagree in shape: {k.shape} vs {(dim_out, dim_in)}")
        if dim_in is None or dim_out is None:
            raise DimensionError("a zero map needs explicit dimensions")
        return cls(ops, int(dim_in), int(dim_out))

    @classmethod
    def identity(cls, d: int) -> "CPMap":
        return cls.from_kraus([np.eye(d, dtype=complex)])

    @classmethod
    def zero(cls, dim_in: int, dim_out: int | None = None) -> "CPMap":
        return cls((), dim_in, dim_in if dim_out is None else dim_out)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros((self.dim_out, self.dim_out), dtype=complex)
        for k in self.kraus:
            out += k @ rho @ adjoint(k)
        return out

    def effect(self) -> np.ndarray:
        """Heisenberg-picture image of the identity, ``sum_k K^dagger K``."""
        out = np.zeros((self.dim_in, self.dim_in), dtype=complex)
        for k in self.kraus:
            out += adjoint(k) @ k
        return out


@dataclass(frozen=True)
class Instrument:
    """Outcome-indexed CP maps. Outcome order is the insertion order of ``maps``."""

    maps: Mapping[Hashable, CPMap]
    dim_in: int = field(init=False)
    dim_out: int = field(init=False)

    def __post_init__(self):
        if not self.maps:
            raise ValueError("an instrument needs at least one outcome")
        first = next(iter(self.maps.values()))
        for m in self.maps.values():
            if (m.dim_in, m.dim_out) != (first.dim_in, first.dim_out):
                raise DimensionError("all outcome maps of an instrument must share dimensions")
        object.__setattr__(self, "dim_in", first.dim_in)
        object.__setattr__(self, "dim_out", first.dim_out)

    @property
    def outcomes(self) -> list:
        return list(self.maps)

    def __getitem__(self, outcome) -> CPMap:
        return self.maps[outcome]

    def apply(self, rho: np.ndarray) -> dict:
        """Unnormalised post-measurement states per outcome."""
        return {o: m(rho) for o, m in self.maps.items()}

    def probabilities(self, rho: np.ndarray) -> dict:
        return {o: float(np.real(np.trace(m(rho)))) for o, m in self.maps.items()}

    def effects(self) -> dict:
        return {o: m.effect() for o, m in self.maps.items()}


def identity_instrument(d: int = 2) -> Instrument:
    return Instrument({0: CPMap.identity(d)})


def switch_operator(e: np.ndarray, f: np.ndarray, basis: ControlBasis = ControlBasis.X) -> np.ndarray:
    """``P_first (x) FE + P_second (x) EF`` on control (x) target.

    In the first branch ``e`` acts before ``f``.
    """
    e = np.asarray(e, dtype=complex)
    f = np.asarray(f, dtype=complex)
    if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape != f.shape:
        raise DimensionError(f"switch needs two square operators of equal size, got {e.shape} and {f.shape}")
    p_first, p_second = basis.projectors()
    return tensor_product(p_first, f @ e) + tensor_product(p_second, e @ f)


def switch_supermap(e_inst: Instrument, f_inst: Instrument, basis: ControlBasis = ControlBasis.X) -> Instrument:
    """Quantum switch of two instruments on the same target.

    Outcomes are pairs ``(e_outcome, f_outcome)``; each pair's Kraus set is
    the switch of every pair of Kraus operators.
    """
    for inst in (e_inst, f_inst):
        if inst.dim_in != inst.dim_out:
            raise DimensionError("switched operations must map the target to itself")
    if e_inst.dim_in != f_inst.dim_in:
        raise DimensionError(f"target dimensions differ: {e_inst.dim_in} vs {f_inst.dim_in}")
    d = 2 * e_inst.dim_in
    maps = {}
    for (oe, me), (of, mf) in itertools.product(e_inst.maps.items(), f_inst.maps.items()):
        kraus = [switch_operator(ke, kf, basis) for ke in me.kraus for kf in mf.kraus]
        maps[(oe, of)] = CPMap.from_kraus(kraus, d, d)
    return Instrument(maps)


def agent_instrument(x: int) -> Instrument:
    """Intervention of an agent inside a switch.

    ``x = 0``: do nothing and report 0 (outcome 1 is the zero map).
    ``x = 1``: measure the target in the computational basis and reprepare ``|1>``.
    """
    if x == 0:
        return Instrument({0: CPMap.identity(2), 1: CPMap.zero(2)})
    if x == 1:
        return Instrument({a: CPMap.from_kraus([ketbra(KET1, k)]) for a, k in ((0, KET0), (1, KET1))})
    raise ValueError(f"agent setting must be 0 or 1, got {x!r}")


def direction_measurement(direction: Sequence[float]) -> Instrument:
    """Destructive two-outcome qubit measurement of ``n.sigma``; outcome 0 is the +1 eigenvector."""
    n = np.asarray(direction, dtype=float)
    plus, minus = bloch_ket(n), bloch_ket(-n)
    return Instrument({0: CPMap.from_kraus([adjoint(plus)]), 1: CPMap.from_kraus([adjoint(minus)])})


def angle_measurement(phi: float) -> Instrument:
    """Measurement along ``cos(phi) Z + sin(phi) X``."""
    return direction_measurement((np.sin(phi), 0.0, np.cos(phi)))


def y_measurement() -> Instrument:
    """Y-basis measurement; outcome 0 is ``|+i>``."""
    return direction_measurement((0.0, 1.0, 0.0))


def x_measurement() -> Instrument:
    return direction_measurement((1.0, 0.0, 0.0))


def _purification(rho: np.ndarray) -> list[np.ndarray]:
    """Weighted kets ``sqrt(p_j)|phi_j>`` whose projectors sum to ``rho``."""
    w, v = np.linalg.eigh((rho + adjoint(rho)) / 2)
    return [np.sqrt(p) * v[:, [j]] for j, p in enumerate(w) if p > ALGEBRAIC_TOL]


def joint_switch_instrument(
    x1: int,
    x2: int,
    final: Instrument | None = None,
    basis: ControlBasis = ControlBasis.X,
    target_init: np.ndarray | None = None,
) -> Instrument:
    """Instrument on the control qubit with outcomes ``(a1, a2, a3)``.

    The target starts in ``target_init`` (default ``|0><0|``), the switch of
    the two agents' instruments acts, ``final`` measures the control and the
    target is discarded.
    """
    final = y_measurement() if final is None else final
    target_init = projector(KET0) if target_init is None else np.asarray(target_init, dtype=complex)
    if target_init.shape != (2, 2):
        raise DimensionError("target must be a qubit")
    if final.dim_in != 2:
        raise DimensionError("final measurement must act on the control qubit")
    switched = switch_supermap(agent_instrument(x1), agent_instrument(x2), basis)
    prep = [tensor_product(np.eye(2), phi) for phi in _purification(target_init)]
    maps = {}
    for (a1, a2), sw in switched.maps.items():
        for a3, fm in final.maps.items():
            # measure control then drop target: (M (x) <t|) W (1 (x) |phi>)
            kraus = [
                np.kron(m, adjoint(t)) @ w @ p
                for w in sw.kraus
                for m in fm.kraus
                for t in (KET0, KET1)
                for p in prep
            ]
            maps[(a1, a2, a3)] = CPMap.from_kraus(kraus, 2, final.dim_out)
    return Instrument(maps)


@dataclass(frozen=True)
class InstrumentReport:
    max_deviation: float
    passed: bool
    tol: float


def validate_instrument(inst: Instrument, tol: float = ALGEBRAIC_TOL) -> InstrumentReport:
    """Check that the outcome maps sum to a trace-preserving map."""
    total = sum(inst.effects().values())
    dev = float(np.abs(total - np.eye(inst.dim_in)).max())
    return InstrumentReport(dev, dev < tol, tol)
