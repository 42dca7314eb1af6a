"""Quantum switch simulation, hidden causal order models and causal inequalities."""
from .acceptance import Check, SuiteResult, selfcheck
from .causal import (
    HcoExtension,
    ProofCertificate,
    RandomHcoSpec,
    bruteforce_bc_bound,
    bruteforce_parity_models,
    check_forced_determinism,
    enumerate_single_switch_extensions,
    random_probabilistic_hco,
    replay_possibilistic_contradiction,
)
from .inequalities import (
    ChainReport,
    MerminReport,
    causal_fraction_bound,
    chsh_expr,
    closed_form_bc,
    eval_bc,
    eval_causal_mermin,
    eval_chain_causal,
)
from .ops import CPMap, ControlBasis, Instrument, joint_switch_instrument, switch_supermap
from .scenarios import (
    ChainedScenarioConfig,
    GhzScenarioConfig,
    ScenarioData,
    build_chained_switch,
    build_ghz_mermin,
    build_ghz_three_switch,
    verify_switch_data_conditions,
)
from .tables import PossTable, ProbTable, VarSpec, check_independence, possibilize

__version__ = "0.1.0"

__all__ = [
    "HcoExtension",
    "ProofCertificate",
    "RandomHcoSpec",
    "bruteforce_bc_bound",
    "bruteforce_parity_models",
    "check_forced_determinism",
    "enumerate_single_switch_extensions",
    "random_probabilistic_hco",
    "replay_possibilistic_contradiction",
    "ChainReport",
    "MerminReport",
    "causal_fraction_bound",
    "chsh_expr",
    "closed_form_bc",
    "eval_bc",
    "eval_causal_mermin",
    "eval_chain_causal",
    "ChainedScenarioConfig",
    "GhzScenarioConfig",
    "ScenarioData",
    "build_chained_switch",
    "build_ghz_mermin",
    "build_ghz_three_switch",
    "verify_switch_data_conditions",
    "Check",
    "SuiteResult",
    "selfcheck",
    "CPMap",
    "ControlBasis",
    "Instrument",
    "joint_switch_instrument",
    "switch_supermap",
    "PossTable",
    "ProbTable",
    "VarSpec",
    "check_independence",
    "possibilize",
]
