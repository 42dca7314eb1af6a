"""Acceptance checks: one function per criterion, aggregated by :func:`selfcheck`."""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .causal import (
    ProofCertificate,
    RandomHcoSpec,
    bruteforce_bc_bound,
    bruteforce_parity_models,
    random_probabilistic_hco,
    replay_possibilistic_contradiction,
)
from .inequalities import (
    causal_fraction_bound,
    closed_form_bc,
    eval_causal_mermin,
    eval_chain_causal,
    mermin_determinism_claim,
)
from .linalg import ALGEBRAIC_TOL, KET_MINUS, KET_PLUS, PHYSICAL_TOL, ketbra, projector
from .ops import joint_switch_instrument, y_measurement
from .scenarios import (
    GHZ_IMPLICATIONS,
    SWITCHES,
    ChainedScenarioConfig,
    GhzScenarioConfig,
    build_chained_switch,
    build_ghz_mermin,
    build_ghz_three_switch,
    verify_switch_data_conditions,
)
from .tables import ZERO_MASS, Assignment, ProbTable, VarSpec, joint_lower_bound, violation_mass


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    tol: float
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: value={self.value:.9g} tol={self.tol:.0e}  {self.detail}".rstrip()

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "value": round(float(self.value), 9),
            "tol": self.tol,
            "detail": self.detail,
        }


@dataclass
class SuiteResult:
    checks: list[Check] = field(default_factory=list)
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_json(self, include_timing: bool = False) -> dict:
        out = {
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }
        if include_timing:
            out["wallClockSeconds"] = round(self.wall_clock, 3)
        return out


def _quote(values) -> str:
    return ", ".join(f"{v:.3g}" for v in values)


# 1 ---------------------------------------------------------------------------


def check_ghz_correlations(noise: float = 0.0) -> Check:
    d = build_ghz_mermin(noise)
    worst = max(violation_mass(d.joint, ant, cons) for ant, cons in GHZ_IMPLICATIONS)
    return Check("ghz-correlations", worst < ZERO_MASS, worst, ZERO_MASS, "largest violating-cell mass of 4 parity implications")


# 2 ---------------------------------------------------------------------------


def check_switch_data_conditions(noise: float = 0.0) -> Check:
    report = verify_switch_data_conditions(build_ghz_three_switch(GhzScenarioConfig(noise)))
    worst = max(c.mass for c in report.conditions)
    return Check("switch-data-conditions", report.passed and len(report.conditions) == 13, worst, ZERO_MASS,
                 f"{len(report.conditions)} conditions, failing: {report.failures() or 'none'}")


# 3 ---------------------------------------------------------------------------


def _operator_basis() -> list[np.ndarray]:
    return [ketbra(np.eye(2)[:, [i]], np.eye(2)[:, [j]]) for i, j in itertools.product(range(2), repeat=2)]


def check_operator_identities() -> Check:
    """Joint instrument identities at all-zero and all-one settings, on the matrix-unit basis."""
    final = y_measurement()
    basis = _operator_basis()
    dev = 0.0
    zero = joint_switch_instrument(0, 0)
    for (a1, a2, a3), m in zero.maps.items():
        for rho in basis:
            expect = final[a3](rho) if a1 == a2 == 0 else np.zeros((1, 1))
            dev = max(dev, float(np.abs(m(rho) - expect).max()))
    one = joint_switch_instrument(1, 1)
    for a1, ket in ((0, KET_PLUS), (1, KET_MINUS)):
        proj = projector(ket)
        for rho in basis:
            total = sum(one[(a1, a2, a3)](rho) for a2 in (0, 1) for a3 in (0, 1))
            dev = max(dev, float(abs(total[0, 0] - np.trace(proj @ rho))))
    return Check("operator-identities", dev < ALGEBRAIC_TOL, dev, ALGEBRAIC_TOL,
                 "all-zero settings reduce to the control measurement; all-one marginal is the +/- projection")


# 4 ---------------------------------------------------------------------------


def check_causal_mermin(noise: float = 0.0) -> Check:
    report = eval_causal_mermin(build_ghz_three_switch(GhzScenarioConfig(noise)))
    brute = bruteforce_parity_models()
    dev = abs(report.total - 4.0)
    ok = dev < PHYSICAL_TOL and brute.max_satisfied == 3 and brute.satisfying_all == 0
    return Check("causal-mermin", ok, report.total, PHYSICAL_TOL,
                 f"maxSatisfied={brute.max_satisfied} satisfyingAll={brute.satisfying_all} over 64 models")


# 5 ---------------------------------------------------------------------------


def check_possibilistic_infeasibility(noise: float = 0.0) -> Check:
    d = build_ghz_three_switch(GhzScenarioConfig(noise))
    cert = replay_possibilistic_contradiction(d)
    if cert.verdict == ProofCertificate.NOT_APPLICABLE:
        # no enumeration on noisy data: the support blows up to 3**16 candidates
        return Check("possibilistic-infeasibility", False, 0, 0.0, f"verdict={cert.verdict}: {'; '.join(cert.failures)}")
    per_switch = cert.forced_determinism.values()
    ok = (
        all(f["candidates"] == 243 and f["valid"] > 0 and f["forced"] for f in per_switch)
        and cert.verdict == ProofCertificate.INFEASIBLE
    )
    counts = ", ".join(f"{s}: {f['valid']}/{f['candidates']}" for s, f in cert.forced_determinism.items())
    return Check("possibilistic-infeasibility", ok, min(f["valid"] for f in per_switch), 0.0,
                 f"valid/candidates per switch {counts}; verdict={cert.verdict}")


# 6 ---------------------------------------------------------------------------


def check_chained_closed_form(noise: float = 0.0, schedule: str = "spherical") -> Check:
    dev, worst_alpha = 0.0, 0.0
    for N in range(2, 9):
        r = eval_chain_causal(build_chained_switch(ChainedScenarioConfig(N, schedule, noise)), N)
        dev = max(dev, abs(r.bc_value - closed_form_bc(N)))
        worst_alpha = max(worst_alpha, r.alpha)
    ok = dev < PHYSICAL_TOL and worst_alpha < ALGEBRAIC_TOL
    return Check("chained-closed-form", ok, dev, PHYSICAL_TOL, f"N=2..8, max alpha={worst_alpha:.3g}")


# 7 ---------------------------------------------------------------------------


def check_chained_classical_bound(noise: float = 0.0, schedule: str = "spherical") -> Check:
    brute = {N: bruteforce_bc_bound(N) for N in range(2, 7)}
    exact = all(b.max_constrained == 2 * N and b.monogamy_holds for N, b in brute.items())
    reports = [eval_chain_causal(build_chained_switch(ChainedScenarioConfig(N, schedule, noise)), N) for N in range(2, 17)]
    exceeds = all(r.constrained_value > 2 * r.N + PHYSICAL_TOL for r in reports if r.N >= 4)
    # beyond the simulated range the closed form carries the claim
    exceeds &= all(closed_form_bc(N) > 2 * N for N in range(17, 65))
    deficits = [r.algebraic_max - r.bc_value for r in reports]
    monotone = all(b < a for a, b in zip(deficits, deficits[1:]))
    ok = exact and exceeds and monotone
    return Check("chained-classical-bound", ok, min(r.constrained_value - 2 * r.N for r in reports if r.N >= 4), 0.0,
                 f"brute-force max 2N for N=2..6: {exact}; quantum > 2N for N>=4: {exceeds}; "
                 f"deficit decreasing on 2..16: {monotone}")


# 8 ---------------------------------------------------------------------------


def check_causal_fraction() -> Check:
    values = [causal_fraction_bound(N) for N in range(2, 65)]
    dev = max(abs(v - (N + 1) * (1 - math.cos(math.pi / (N + 1)))) for N, v in zip(range(2, 65), values))
    monotone = all(b < a for a, b in zip(values, values[1:]))
    at9 = causal_fraction_bound(9)
    ok = dev < ALGEBRAIC_TOL and monotone and abs(at9 - 0.489435) < 5e-7
    return Check("causal-fraction", ok, at9, ALGEBRAIC_TOL, f"decreasing on 2..64: {monotone}; closed-form deviation {dev:.3g}")


# 9 ---------------------------------------------------------------------------


def property_spec(seed: int, family: str = "mermin", N: int = 3) -> RandomHcoSpec:
    """Vary model structure with the seed so the suite covers loose and tight models."""
    return RandomHcoSpec(
        seed=seed,
        family=family,
        N=N,
        hidden_card=1 + seed % 3,
        deterministic=seed % 2 == 1,
        zero_penalty=seed % 4 >= 2,
        fixed_lambda=None if seed % 5 else seed // 5 % 2,
    )


def random_events_table(seed: int) -> tuple[ProbTable, list[Assignment]]:
    rng = np.random.default_rng(seed)
    n_vars = int(rng.integers(2, 5))
    cards = rng.integers(2, 4, size=n_vars)
    variables = [VarSpec(f"v{i}", int(c)) for i, c in enumerate(cards)]
    t = ProbTable(variables, rng.dirichlet(np.full(int(np.prod(cards)), float(rng.choice([0.2, 1.0])))))
    events = []
    for _ in range(int(rng.integers(1, 5))):
        k = int(rng.integers(1, n_vars + 1))
        picked = rng.choice(n_vars, size=k, replace=False)
        events.append(Assignment.of({f"v{i}": int(rng.integers(cards[i])) for i in sorted(picked)}))
    return t, events


def check_property_suites(mermin_seeds: int = 1000, chained_seeds: int = 500, table_seeds: int = 1000) -> Check:
    worst_mermin, worst_claim = -math.inf, -math.inf
    for seed in range(mermin_seeds):
        P = random_probabilistic_hco(property_spec(seed))
        worst_mermin = max(worst_mermin, eval_causal_mermin(P).total - 3.0)
        for s in SWITCHES:
            p, bound = mermin_determinism_claim(P, s)
            worst_claim = max(worst_claim, bound - p)
    worst_chain = -math.inf
    for N in (2, 3, 4):
        for seed in range(chained_seeds):
            r = eval_chain_causal(random_probabilistic_hco(property_spec(seed, "chained", N)), N)
            worst_chain = max(worst_chain, r.constrained_value - 2 * N)
    worst_lb = -math.inf
    for seed in range(table_seeds):
        t, events = random_events_table(seed)
        lb = joint_lower_bound(t, events)
        worst_lb = max(worst_lb, lb.lhs - lb.rhs)
    worst = max(worst_mermin, worst_claim, worst_chain, worst_lb)
    return Check("property-suites", worst <= PHYSICAL_TOL, worst, PHYSICAL_TOL,
                 f"{mermin_seeds} mermin, {chained_seeds}x3 chained, {table_seeds} tables; "
                 f"worst slack: {_quote((worst_mermin, worst_claim, worst_chain, worst_lb))}")


def selfcheck(noise: float = 0.0, mermin_seeds: int = 1000, chained_seeds: int = 500, table_seeds: int = 1000,
              schedule: str = "spherical") -> SuiteResult:
    """Run every acceptance criterion. ``noise`` depolarizes the simulated control states."""
    start = time.perf_counter()
    checks = [
        check_ghz_correlations(noise),
        check_switch_data_conditions(noise),
        check_operator_identities(),
        check_causal_mermin(noise),
        check_possibilistic_infeasibility(noise),
        check_chained_closed_form(noise, schedule),
        check_chained_classical_bound(noise, schedule),
        check_causal_fraction(),
        check_property_suites(mermin_seeds, chained_seeds, table_seeds),
    ]
    return SuiteResult(checks, time.perf_counter() - start)
