"""Causal Mermin and chained Braunstein-Caves evaluators."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .scenarios import WING_LETTERS, ScenarioData, chained_alpha, restrict_chained
from .tables import Assignment, Parity, ProbTable, prob

SLACK = 1e-9

MERMIN_TERMS = (
    (("a1", "b1", "c1"), 0, (1, 1, 1)),
    (("a1", "b3", "c3"), 1, (1, 0, 0)),
    (("a3", "b1", "c3"), 1, (0, 1, 0)),
    (("a3", "b3", "c1"), 1, (0, 0, 1)),
)


def _joint(d) -> ProbTable:
    return d.joint if isinstance(d, ScenarioData) else d


def _r(x: float) -> float:
    return round(float(x), 9)


@dataclass(frozen=True)
class MerminReport:
    parity_terms: tuple[float, float, float, float]
    alpha: float
    beta: float
    gamma: float
    total: float
    classical_bound: float = 3.0
    algebraic_max: float = 4.0

    @property
    def violated(self) -> bool:
        return self.total > self.classical_bound + SLACK

    @property
    def verdict(self) -> str:
        return "VIOLATED" if self.violated else "SATISFIED"

    def to_json(self) -> dict:
        return {
            "parityTerms": [_r(p) for p in self.parity_terms],
            "alpha": _r(self.alpha),
            "beta": _r(self.beta),
            "gamma": _r(self.gamma),
            "total": _r(self.total),
            "classicalBound": _r(self.classical_bound),
            "algebraicMax": _r(self.algebraic_max),
            "verdict": self.verdict,
        }


def mermin_parity_terms(joint: ProbTable) -> tuple[float, ...]:
    joint = joint.marginalize(["a1", "a3", "b1", "b3", "c1", "c3", "x1", "x2", "y1", "y2", "z1", "z2"])
    terms = []
    for outs, target, (xv, yv, zv) in MERMIN_TERMS:
        given = Assignment.of(x1=xv, x2=xv, y1=yv, y2=yv, z1=zv, z2=zv)
        terms.append(prob(joint, Parity(outs, target), given))
    return tuple(terms)


def eval_causal_mermin(d: ScenarioData | ProbTable) -> MerminReport:
    """Four parity probabilities minus twice the three determinism penalties."""
    joint = _joint(d)
    joint = joint.marginalize([n for n in joint.names if n[0] in "abcxyz" and n[1:] in "123"])
    terms = mermin_parity_terms(joint)
    alpha = chained_alpha(joint, "a", "x")
    beta = chained_alpha(joint, "b", "y")
    gamma = chained_alpha(joint, "c", "z")
    total = sum(terms) - 2 * (alpha + beta + gamma)
    return MerminReport(terms, alpha, beta, gamma, total)


# ---------------------------------------------------------------------------
# chained expressions on R(a b | x3 y)
# ---------------------------------------------------------------------------


def equality_prob(R: ProbTable, x: int, y: int) -> float:
    """``R(a = b | x3 = x, y = y)``."""
    nx, ny = R.card("x3"), R.card("y")
    if not (0 <= x < nx and 0 <= y < ny):
        raise IndexError(f"setting pair ({x}, {y}) outside table range {nx}x{ny}")
    v = R.reorder(["a", "b", "x3", "y"]).values
    return float(sum(v[k, k, x, y] for k in range(min(v.shape[0], v.shape[1]))))


def chsh_expr(R: ProbTable, xi0: int, xi1: int, up0: int, up1: int) -> float:
    return (
        equality_prob(R, xi0, up0)
        + equality_prob(R, xi1, up0)
        + equality_prob(R, xi1, up1)
        - equality_prob(R, xi0, up1)
    )


def _check_settings(R: ProbTable, N: int):
    if N < 1:
        raise ValueError("N must be positive")
    if R.card("x3") < N + 1 or R.card("y") < N + 1:
        raise ValueError(f"table covers {R.card('x3')}x{R.card('y')} settings, need {(N + 1)}x{(N + 1)}")


def eval_bc(R: ProbTable, N: int) -> float:
    """The 2N+2-term Braunstein-Caves sum."""
    _check_settings(R, N)
    eq = lambda x, y: equality_prob(R, x, y)
    total = sum(eq(i, i) + eq(i + 1, i) for i in range(N))
    return total + eq(N, N) - eq(0, N)


def eval_bc_chsh_sum(R: ProbTable, N: int) -> float:
    """Same quantity as a sum of N CHSH expressions ``CHSH_{0,i;i-1,i}``, ``i = 1..N``."""
    _check_settings(R, N)
    return sum(chsh_expr(R, 0, i, i - 1, i) for i in range(1, N + 1))


def closed_form_bc(N: int) -> float:
    return (N + 1) * (math.cos(math.pi / (N + 1)) + 1) - 1


def causal_fraction_bound(N: int) -> float:
    """Upper bound on the fraction of runs with a definite causal order."""
    if N < 2:
        raise ValueError(f"N must be at least 2, got {N}")
    return (N + 1) * (1 - math.cos(math.pi / (N + 1)))


@dataclass(frozen=True)
class ChainReport:
    N: int
    bc_value: float
    alpha: float

    @property
    def constrained_value(self) -> float:
        return self.bc_value - 2 * self.N * self.alpha

    @property
    def classical_bound(self) -> float:
        return 2.0 * self.N

    @property
    def algebraic_max(self) -> float:
        return 2.0 * self.N + 1

    @property
    def closed_form(self) -> float:
        return closed_form_bc(self.N)

    @property
    def causal_fraction_bound(self) -> float:
        return causal_fraction_bound(self.N)

    @property
    def violated(self) -> bool:
        return self.constrained_value > self.classical_bound + SLACK

    @property
    def verdict(self) -> str:
        return "VIOLATED" if self.violated else "SATISFIED"

    CSV_COLUMNS = ("N", "bcValue", "alpha", "constrainedValue", "classicalBound", "algebraicMax", "closedForm",
                   "causalFractionBound")

    def csv_row(self) -> list:
        return [self.N, *(f"{v:.9f}" for v in (self.bc_value, self.alpha, self.constrained_value, self.classical_bound,
                                               self.algebraic_max, self.closed_form, self.causal_fraction_bound))]

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "bcValue": _r(self.bc_value),
            "alpha": _r(self.alpha),
            "constrainedValue": _r(self.constrained_value),
            "classicalBound": _r(self.classical_bound),
            "algebraicMax": _r(self.algebraic_max),
            "closedForm": _r(self.closed_form),
            "causalFractionBound": _r(self.causal_fraction_bound),
            "verdict": self.verdict,
        }


def eval_chain_causal(d: ScenarioData | ProbTable, N: int) -> ChainReport:
    R, alpha = restrict_chained(d, N)
    return ChainReport(N, eval_bc(R, N), alpha)


def first_violating_n(reports) -> int | None:
    """Smallest N among ``reports`` whose constrained value beats 2N."""
    hits = [r.N for r in reports if r.violated]
    return min(hits) if hits else None


def mermin_determinism_claim(joint: ProbTable, switch: str = "A") -> tuple[float, float]:
    """``(P(o1 = lam | inputs = 11), 1 - penalty)`` for one switch of a hidden-variable model."""
    o, i = WING_LETTERS[switch]
    lam = f"lam{switch}"
    given = {f"{i}1": 1, f"{i}2": 1}
    joint = joint.marginalize([f"{o}1", f"{o}2", f"{i}1", f"{i}2", lam])
    p = sum(prob(joint, {f"{o}1": v, lam: v}, given) for v in (0, 1))
    return p, 1 - chained_alpha(joint, o, i)


__all__ = [
    "MerminReport",
    "ChainReport",
    "eval_causal_mermin",
    "chsh_expr",
    "eval_bc",
    "eval_bc_chsh_sum",
    "eval_chain_causal",
    "closed_form_bc",
    "causal_fraction_bound",
    "equality_prob",
    "first_violating_n",
    "mermin_determinism_claim",
]
