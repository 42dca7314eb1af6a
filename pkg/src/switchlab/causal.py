"""Hidden causal order models: possibilistic extensions, proof replay, brute-force oracles.

Possibilistic side: every extension of a base possibility table by a
causal-order bit ``lam`` is an assignment of each possible base cell to a
nonempty subset of ``{0, 1}`` (marginalising ``lam`` must give the base
back), so the search space is ``3 ** support``.

Probabilistic side: random models in product form whose conditional
independences hold by construction, for property testing the inequalities.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .scenarios import (
    SWITCHES,
    WING_LETTERS,
    ScenarioData,
    switch_implications,
    verify_switch_data_conditions,
)
from .tables import (
    Assignment,
    Equal,
    PossTable,
    ProbTable,
    VarSpec,
    check_implication,
    check_independence,
)

MAX_SUPPORT = 20
LAMBDA_SUBSETS = (frozenset({0}), frozenset({1}), frozenset({0, 1}))


class SupportTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class HcoExtension:
    """A base table extended by ``lam``, with the lam-subset chosen for each possible cell."""

    table: PossTable
    provenance: tuple[tuple[tuple[int, ...], frozenset], ...]
    lam: str = "lam"

    def marginal(self) -> PossTable:
        return self.table.marginalize([n for n in self.table.names if n != self.lam])


def support_cells(base: PossTable) -> list[tuple[int, ...]]:
    """Possible cells in lexicographic (flat index) order."""
    return [tuple(int(i) for i in idx) for idx in np.argwhere(base.values)]


def _hco_constraints(ext: PossTable, outputs: Sequence[str], inputs: Sequence[str], lam: str) -> bool:
    o1, o2 = outputs
    i1, i2 = inputs
    return (
        check_independence(ext, [lam], [i1, i2]).independent
        and check_independence(ext, [o1], [i2], given={lam: 0}).independent
        and check_independence(ext, [o2], [i1], given={lam: 1}).independent
    )


def enumerate_single_switch_extensions(
    base: PossTable,
    outputs: Sequence[str] = ("a1", "a2"),
    inputs: Sequence[str] = ("x1", "x2"),
    lam: str = "lam",
    max_support: int = MAX_SUPPORT,
) -> list[HcoExtension]:
    """All hidden causal order models of a single-switch possibility table.

    Constraints: ``lam`` independent of both inputs, ``o1`` independent of
    ``i2`` given ``lam = 0`` and ``o2`` independent of ``i1`` given ``lam = 1``.
    """
    names = [*outputs, *inputs]
    base = base.marginalize(names).reorder(names)
    if not base.marginalize(inputs).values.all():
        raise ValueError("base table must give every input combination nonzero possibility")
    cells = support_cells(base)
    if len(cells) > min(max_support, MAX_SUPPORT):
        raise SupportTooLarge(f"support of {len(cells)} cells gives 3**{len(cells)} candidates; refusing")
    variables = [*base.vars, VarSpec(lam, 2)]
    found = []
    for choice in itertools.product(LAMBDA_SUBSETS, repeat=len(cells)):
        vals = np.zeros(base.shape + (2,), dtype=bool)
        for cell, subset in zip(cells, choice):
            for lv in subset:
                vals[cell + (lv,)] = True
        ext = PossTable(variables, vals)
        if _hco_constraints(ext, outputs, inputs, lam):
            found.append(HcoExtension(ext, tuple(zip(cells, choice)), lam))
    return found


def candidate_count(base: PossTable, names: Sequence[str] = ("a1", "a2", "x1", "x2")) -> int:
    return 3 ** len(support_cells(base.marginalize(names).reorder(names)))


def check_forced_determinism(exts: Sequence[HcoExtension], o1: str = "a1", inputs: Sequence[str] = ("x1", "x2")) -> bool:
    """Every extension satisfies ``i1 = i2 = 1 => o1 = lam``."""
    ant = Assignment.of({inputs[0]: 1, inputs[1]: 1})
    return all(check_implication(e.table, ant, Equal(o1, e.lam)) for e in exts)


# ---------------------------------------------------------------------------
# deterministic oracles
# ---------------------------------------------------------------------------


class DeterministicJointModel(NamedTuple):
    lamA: int
    lamB: int
    lamC: int
    a3: int
    b3: int
    c3: int


# the XOR system left after substituting lam for o1 and moving to all-zero settings
PARITY_CONSTRAINTS = (
    ("lamA", "lamB", "lamC"),
    ("lamA", "b3", "c3"),
    ("a3", "lamB", "c3"),
    ("a3", "b3", "lamC"),
)
SWITCH_PARITY_TARGETS = (0, 1, 1, 1)


class ParityBruteForce(NamedTuple):
    max_satisfied: int
    satisfying_all: int


def bruteforce_parity_models(targets: Sequence[int] = SWITCH_PARITY_TARGETS) -> ParityBruteForce:
    """Exhaust all 64 deterministic assignments of the six hidden bits."""
    best, count = 0, 0
    for bits in itertools.product((0, 1), repeat=6):
        model = DeterministicJointModel(*bits)._asdict()
        sat = sum((sum(model[v] for v in vs) % 2) == t for vs, t in zip(PARITY_CONSTRAINTS, targets))
        best = max(best, sat)
        count += sat == len(PARITY_CONSTRAINTS)
    return ParityBruteForce(best, count)


@dataclass(frozen=True)
class DeterministicChainModel:
    lam: int
    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise ValueError("response functions must share their domain size")

    @property
    def N(self) -> int:
        return len(self.a) - 1

    def restricted_table(self) -> ProbTable:
        """Point-mass ``R(a b | x3 y)``."""
        n = len(self.a)
        r = np.zeros((2, 2, n, n))
        for x, y in itertools.product(range(n), repeat=2):
            r[self.a[x], self.b[y], x, y] = 1.0
        return ProbTable([VarSpec("a", 2), VarSpec("b", 2), VarSpec("x3", n), VarSpec("y", n)], r, given=("x3", "y"))


class BcBruteForce(NamedTuple):
    max_constrained: float
    monogamy_holds: bool
    models: int


def _all_responses(n: int) -> np.ndarray:
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int8)


def bruteforce_bc_bound(N: int) -> BcBruteForce:
    """Maximum of BC_N over deterministic models with ``a(0) = lam``; monogamy check on all models.

    The monogamy check asserts, for every ``(lam, a, b)`` and every
    ``i = 1..N``, ``CHSH_{0,i;i-1,i} <= 4 - 2 [a(0) = lam]`` and its sum over
    ``i``.
    """
    if not 2 <= N <= 10:
        raise ValueError(f"N must lie in 2..10, got {N}")
    resp = _all_responses(N + 1)
    # eq[i, j, x, y] = [a_i(x) == b_j(y)]
    eq = (resp[:, None, :, None] == resp[None, :, None, :]).astype(np.int16)
    diag = eq[:, :, np.arange(N + 1), np.arange(N + 1)]
    sub = eq[:, :, np.arange(1, N + 1), np.arange(N)]
    bc = diag.sum(axis=2) + sub.sum(axis=2) - eq[:, :, 0, N]
    chsh = np.stack([eq[:, :, 0, i - 1] + eq[:, :, i, i - 1] + eq[:, :, i, i] - eq[:, :, 0, i] for i in range(1, N + 1)])
    best = -np.inf
    monogamy = True
    for lam in (0, 1):
        agrees = (resp[:, 0] == lam)[:, None]  # depends on a only
        allowed = np.broadcast_to(agrees, bc.shape)
        if allowed.any():
            best = max(best, float(bc[allowed].max()))
        bound = 4 - 2 * agrees.astype(np.int16)
        monogamy &= bool((chsh <= bound[None]).all())
        monogamy &= bool((bc <= N * bound).all())
    return BcBruteForce(best, monogamy, 2 * len(resp) ** 2)


# ---------------------------------------------------------------------------
# possibilistic proof replay
# ---------------------------------------------------------------------------


@dataclass
class ProofCertificate:
    verdict: str
    conditions: list = field(default_factory=list)
    input_support: bool = False
    forced_determinism: dict = field(default_factory=dict)
    xor_targets: tuple[int, ...] = SWITCH_PARITY_TARGETS
    failures: list = field(default_factory=list)

    INFEASIBLE = "INFEASIBLE"
    NOT_APPLICABLE = "NOT_APPLICABLE"
    NO_CONTRADICTION = "NO_CONTRADICTION"

    @property
    def xor_system_parity(self) -> int:
        return sum(self.xor_targets) % 2

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "conditions": [c.to_json() for c in self.conditions],
            "inputSupport": self.input_support,
            "forcedDeterminism": self.forced_determinism,
            "xorTargets": list(self.xor_targets),
            "xorSystemParity": self.xor_system_parity,
            "failures": list(self.failures),
        }


def replay_possibilistic_contradiction(
    d: ScenarioData, xor_targets: Sequence[int] | None = None
) -> ProofCertificate:
    """Check the premises of the possibilistic argument on ``d`` and replay it.

    ``xor_targets`` overrides the parity right-hand sides fed to the final
    XOR stage only (the data checks always use the true targets).
    """
    cert = ProofCertificate(ProofCertificate.NOT_APPLICABLE)
    report = verify_switch_data_conditions(d)
    cert.conditions = report.conditions
    cert.failures = report.failures()
    q = d.possible
    inputs = [n for n in d.inputs]
    cert.input_support = bool(q.marginalize(inputs).values.all())
    if not cert.input_support:
        cert.failures.append("not every input combination is possible")
    if cert.failures:
        return cert

    forced_all = True
    for s in SWITCHES:
        o, i = WING_LETTERS[s]
        outs, ins = (f"{o}1", f"{o}2"), (f"{i}1", f"{i}2")
        base = q.marginalize([*outs, *ins])
        exts = enumerate_single_switch_extensions(base, outs, ins, lam=f"lam{s}")
        forced = check_forced_determinism(exts, outs[0], ins)
        forced_all &= forced
        cert.forced_determinism[s] = {
            "candidates": candidate_count(base, [*outs, *ins]),
            "valid": len(exts),
            "forced": forced,
        }

    data_targets = tuple(p.target for _, _, p in switch_implications())
    cert.xor_targets = tuple(int(t) for t in (data_targets if xor_targets is None else xor_targets))
    brute = bruteforce_parity_models(cert.xor_targets)
    # each hidden bit appears in exactly two constraints, so the LHS sums to 0 mod 2
    unsat = cert.xor_system_parity == 1
    if unsat != (brute.satisfying_all == 0):
        raise AssertionError("XOR parity argument disagrees with exhaustive search")
    if not forced_all:
        cert.failures.append("forced determinism does not hold for every switch")
        return cert
    cert.verdict = ProofCertificate.INFEASIBLE if unsat else ProofCertificate.NO_CONTRADICTION
    return cert


# ---------------------------------------------------------------------------
# random probabilistic models
# ---------------------------------------------------------------------------

FAMILIES = ("mermin", "chained")


@dataclass(frozen=True)
class RandomHcoSpec:
    seed: int
    family: str = "mermin"
    N: int = 3
    hidden_card: int = 2
    concentration: float | None = None
    deterministic: bool = False
    fixed_lambda: int | None = None
    zero_penalty: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if self.hidden_card < 1:
            raise ValueError("hidden_card must be positive")


class _Sampler:
    def __init__(self, spec: RandomHcoSpec):
        self.rng = np.random.default_rng(spec.seed)
        self.deterministic = spec.deterministic
        self.zero_penalty = spec.zero_penalty
        self.conc = spec.concentration if spec.concentration is not None else float(self.rng.choice([0.05, 0.3, 1.0]))

    def cond(self, *shape: int) -> np.ndarray:
        """Random conditional distributions; the last axis is the outcome."""
        *ctx, k = shape
        if self.deterministic:
            out = np.zeros(shape)
            idx = self.rng.integers(k, size=ctx)
            np.put_along_axis(out, idx[..., None], 1.0, axis=-1)
            return out
        return self.rng.dirichlet(np.full(k, self.conc), size=tuple(ctx))

    def input_marginal(self, k: int) -> np.ndarray:
        # bounded away from zero: every input combination must stay possible
        return 0.5 / k + 0.5 * self.rng.dirichlet(np.ones(k))


def _point(k: int, value: int) -> np.ndarray:
    out = np.zeros(k)
    out[value] = 1.0
    return out


def _order_pair(sampler: _Sampler, K: int) -> np.ndarray:
    """``P(o1 o2 | i1 i2 lam mu)`` as array ``[o1, o2, i1, i2, lam, mu]``.

    With ``lam = 0`` the first output ignores the second input; with
    ``lam = 1`` the second output ignores the first input. ``zero_penalty``
    pins the responses that would contribute to the determinism penalty.
    """
    out = np.zeros((2, 2, 2, 2, 2, K))
    first = sampler.cond(2, K, 2)  # [i1, mu, o1]
    then = sampler.cond(2, 2, 2, K, 2)  # [o1, i1, i2, mu, o2]
    if sampler.zero_penalty:
        first[1] = _point(2, 0)
        then[0, 1, 1] = _point(2, 1)
        then[:, 0, 1] = _point(2, 0)
    out[..., 0, :] = np.einsum("imo,oijmp->opijm", first, then)
    second = sampler.cond(2, K, 2)  # [i2, mu, o2]
    then = sampler.cond(2, 2, 2, K, 2)  # [o2, i1, i2, mu, o1]
    if sampler.zero_penalty:
        second[1] = _point(2, 0)
        then[0, 1, 1] = _point(2, 1)
        then[:, 1, 0] = _point(2, 0)
    out[..., 1, :] = np.einsum("jmp,pijmo->opijm", second, then)
    return out


def _hidden(sampler: _Sampler, n_lambdas: int, K: int, fixed_lambda: int | None) -> np.ndarray:
    h = sampler.rng.dirichlet(np.ones(2**n_lambdas * K)).reshape((2,) * n_lambdas + (K,))
    if fixed_lambda is not None:
        mask = np.zeros_like(h)
        idx = (fixed_lambda,) * n_lambdas
        mask[idx] = 1.0
        h = h * mask
        h /= h.sum()
    return h


def _mermin_model(spec: RandomHcoSpec) -> ProbTable:
    s = _Sampler(spec)
    K = spec.hidden_card
    inputs = [s.input_marginal(2) for _ in range(6)]
    hidden = _hidden(s, 3, K, spec.fixed_lambda)  # [lA lB lC mu]
    wings = []
    for _ in SWITCHES:
        pair = _order_pair(s, K)  # [o1 o2 i1 i2 l mu]
        third = s.cond(2, 2, 2, 2, 2, K, 2)  # [o1 o2 i1 i2 l mu o3]
        wings.append(np.einsum("abxylm,abxylmc->abcxylm", pair, third))
    # axes: a1 a2 a3 b1 b2 b3 c1 c2 c3 x1 x2 y1 y2 z1 z2 lA lB lC
    joint = np.einsum(
        "A,B,C,D,E,F,PQRm,abcABPm,defCDQm,ghiEFRm->abcdefghiABCDEFPQR",
        *inputs, hidden, *wings, optimize=True,
    )
    names = ("a1", "a2", "a3", "b1", "b2", "b3", "c1", "c2", "c3",
             "x1", "x2", "y1", "y2", "z1", "z2", "lamA", "lamB", "lamC")
    return ProbTable([VarSpec(n, 2) for n in names], joint)


def _chained_model(spec: RandomHcoSpec) -> ProbTable:
    s = _Sampler(spec)
    K, n = spec.hidden_card, spec.N + 1
    px1, px2 = s.input_marginal(2), s.input_marginal(2)
    px3, py = s.input_marginal(n), s.input_marginal(n)
    hidden = _hidden(s, 1, K, spec.fixed_lambda)  # [lam mu]
    pair = _order_pair(s, K)  # [a1 a2 x1 x2 l mu]
    a3 = s.cond(2, 2, 2, 2, n, 2, K, 2)  # [a1 a2 x1 x2 x3 l mu a3]
    b = s.cond(n, 2, K, 2)  # [y l mu b]
    joint = np.einsum(
        "A,B,C,D,lm,pqABlm,pqABClmr,Dlmb->pqrbABCDl",
        px1, px2, px3, py, hidden, pair, a3, b, optimize=True,
    )
    variables = [VarSpec("a1", 2), VarSpec("a2", 2), VarSpec("a3", 2), VarSpec("b", 2), VarSpec("x1", 2),
                 VarSpec("x2", 2), VarSpec("x3", n), VarSpec("y", n), VarSpec("lam", 2)]
    return ProbTable(variables, joint)


def random_probabilistic_hco(spec: RandomHcoSpec) -> ProbTable:
    """Random joint table with causal-order variables satisfying the model conditions by construction.

    Hidden variables (``lam...`` and a shared ``mu`` that is summed out) are
    independent of the inputs; each output reads only its own wing's inputs,
    and the ``lam``-dependent order decides which agent ignores the other's
    input.
    """
    if spec.family == "mermin":
        return _mermin_model(spec)
    return _chained_model(spec)
