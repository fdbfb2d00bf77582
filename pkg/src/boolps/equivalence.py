"""Exhaustive transition-relation comparisons certifying the embeddings.

Each check builds the compared relation twice: once through the rewriting
machinery under test, once independently from network primitives (formula
evaluation and stepping), and requires exact labelled equality.  Failures
carry a counterexample state together with both successor sets, so they can
be re-checked by hand or replayed through the CLI trace command.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .bcn import BooleanControlNetwork, freeze_extend
from .bn import BooleanMode, BooleanNetwork
from .boolp import (
    BooleanPSystem,
    ModeView,
    Quasimode,
    derive_mode,
    dotted_product,
    successors,
    union_systems,
)
from .errors import UsageError
from .formula import StateSet
from .limits import check_enumerable
from .relation import TransitionRelation, label_text
from .translate import (
    ReactionSystem,
    bcn_to_composite,
    bn_mode_to_quasimode,
    bn_to_boolp,
    rs_to_boolp,
    variable_rule_ids,
)


def boolp_transitions(system: BooleanPSystem, mode: ModeView, cap=None) -> TransitionRelation:
    """Edges for every configuration and every fired set the mode allows there."""
    check_enumerable(len(system.table), cap, "system")
    edges = set()
    for configuration in system.table.subsets():
        for fired, nxt in successors(system, mode, configuration):
            edges.add((configuration, fired, nxt))
    return TransitionRelation(system.table, frozenset(edges))


def _item_text(item) -> str:
    if isinstance(item, tuple) and len(item) == 2 and isinstance(item[1], StateSet):
        return f"{label_text(item[0])} -> {item[1].set_text()}"
    return label_text(item)


@dataclass(frozen=True)
class Counterexample:
    """A state with the two successor families (or advised families) that differ."""

    state: StateSet
    expected: frozenset
    actual: frozenset

    def describe(self) -> str:
        def fmt(items):
            if not items:
                return "(none)"
            return "; ".join(sorted(_item_text(i) for i in items))

        return (
            f"at {self.state.set_text()}: expected {fmt(self.expected)} "
            f"but got {fmt(self.actual)}"
        )


@dataclass(frozen=True)
class EquivalenceReport:
    passed: bool
    detail: str
    counterexample: Counterexample | None = None

    def __bool__(self):
        return self.passed

    def to_json_dict(self):
        doc = {"passed": self.passed, "detail": self.detail}
        if self.counterexample is not None:
            ce = self.counterexample
            doc["counterexample"] = {
                "state": ce.state.set_text(),
                "expected": sorted(_item_text(i) for i in ce.expected),
                "actual": sorted(_item_text(i) for i in ce.actual),
            }
        return doc


def check_bn_simulation(
    network: BooleanNetwork,
    mode: BooleanMode,
    cap=None,
    system: BooleanPSystem | None = None,
    quasimode: Quasimode | None = None,
) -> EquivalenceReport:
    """Compare a network's labelled dynamics with its rewriting encoding.

    The encoding's edge at W advised by mode element m carries the
    applicable part of m's rule pairs; the expected side rebuilds that
    label directly from the update formulas (introduce x where the update
    holds, erase x where it fails and x is present) and steps the network.

    `system` and `quasimode` default to the canonical encoding; fault
    injection tests pass mutated ones.
    """
    if mode.table != network.table:
        raise UsageError("mode over a different variable table")
    check_enumerable(len(network.table), cap, "network")
    if system is None:
        system = bn_to_boolp(network)
    if quasimode is None:
        quasimode = bn_mode_to_quasimode(mode, system)
    view = derive_mode(system, quasimode)
    table = network.table
    pair_ids = {name: variable_rule_ids(name) for name in table.names}
    for configuration in table.subsets():
        expected = set()
        for element in mode.elements:
            label = set()
            bits = configuration.bits
            for name in element:
                pos = table.position(name)
                value = network.updates[pos].evaluate(configuration)
                set_id, clr_id = pair_ids[name]
                if value:
                    label.add(set_id)
                    bits |= 1 << pos
                else:
                    bits &= ~(1 << pos)
                    if configuration.bits >> pos & 1:
                        label.add(clr_id)
            expected.add((frozenset(label), table.state(bits)))
        actual = set(successors(system, view, configuration))
        if expected != actual:
            return EquivalenceReport(
                passed=False,
                detail="network encoding and network dynamics disagree",
                counterexample=Counterexample(
                    configuration, frozenset(expected), frozenset(actual)
                ),
            )
    return EquivalenceReport(passed=True, detail="labelled transition relations coincide")


def check_bcn_simulation(
    bcn: BooleanControlNetwork,
    mode: BooleanMode,
    cap=None,
    composite=None,
) -> EquivalenceReport:
    """Compare the composed controlled embedding with the controlled dynamics.

    Expected successors of a configuration split into variables part W and
    control part W_U: for every mode element, the variables move one step
    of the network selected by W_U (labels from the update formulas as in
    the network check, controls read verbatim); the present control
    symbols are all erased and every subset of control symbols may be
    re-introduced.  `composite` defaults to the canonical embedding; fault
    injection tests pass a mutated one.
    """
    check_enumerable(len(bcn.table), cap, "composite")
    if composite is None:
        composite = bcn_to_composite(bcn, mode)
    system = composite.system
    view = composite.mode_view()
    x_table = bcn.x_table
    u_table = bcn.u_table
    n_x = len(x_table)
    pair_ids = {name: variable_rule_ids(name) for name in x_table.names}
    u_set_ids = [f"u_set_{name}" for name in u_table.names]
    u_clr_ids = [f"u_clr_{name}" for name in u_table.names]
    n_u = len(u_table)
    intro_labels = []
    for s_bits in range(1 << n_u):
        intro_labels.append(
            frozenset(u_set_ids[p] for p in range(n_u) if s_bits >> p & 1)
        )
    erase_labels = [
        frozenset(u_clr_ids[p] for p in range(n_u) if u_bits >> p & 1)
        for u_bits in range(1 << n_u)
    ]
    full = system.table
    for configuration in full.subsets():
        u_bits = configuration.bits >> n_x
        erase_label = erase_labels[u_bits]
        expected = set()
        for element in mode.elements:
            label = set()
            bits = configuration.bits & ((1 << n_x) - 1)
            for name in element:
                pos = x_table.position(name)
                value = bcn.updates[pos].evaluate(configuration)
                set_id, clr_id = pair_ids[name]
                if value:
                    label.add(set_id)
                    bits |= 1 << pos
                else:
                    bits &= ~(1 << pos)
                    if configuration.bits >> pos & 1:
                        label.add(clr_id)
            x_label = frozenset(label) | erase_label
            for s_bits in range(1 << n_u):
                expected.add(
                    (x_label | intro_labels[s_bits], full.state(bits | s_bits << n_x))
                )
        actual = set(successors(system, view, configuration))
        if expected != actual:
            return EquivalenceReport(
                passed=False,
                detail="composed embedding and controlled dynamics disagree",
                counterexample=Counterexample(
                    configuration, frozenset(expected), frozenset(actual)
                ),
            )
    return EquivalenceReport(passed=True, detail="labelled transition relations coincide")


def check_product_lemma(
    first: BooleanPSystem,
    second: BooleanPSystem,
    first_quasimode: Quasimode,
    second_quasimode: Quasimode,
    cap=None,
) -> EquivalenceReport:
    """Deriving the dotted product of two quasimodes must equal the pointwise
    dotted product of the modes they derive, at every configuration of the
    union system."""
    union = union_systems(first, second)
    check_enumerable(len(union.table), cap, "union system")
    left = derive_mode(union, first_quasimode.dot(second_quasimode))
    right_first = derive_mode(union, first_quasimode)
    right_second = derive_mode(union, second_quasimode)
    for configuration in union.table.subsets():
        lhs = left.at(configuration)
        rhs = dotted_product(right_first.at(configuration), right_second.at(configuration))
        if lhs != rhs:
            return EquivalenceReport(
                passed=False,
                detail="derived product mode differs from product of derived modes",
                counterexample=Counterexample(configuration, rhs, lhs),
            )
    return EquivalenceReport(passed=True, detail="derived modes coincide at every configuration")


def reaction_result(rs: ReactionSystem, state: StateSet) -> StateSet:
    """Direct interpreter: union of the products of the enabled reactions."""
    bits = 0
    for reaction in rs.reactions:
        if reaction.reactants <= state and not (reaction.inhibitors & state).bits:
            bits |= reaction.products.bits
    return rs.table.state(bits)


def check_rs_embedding(rs: ReactionSystem, cap=None) -> EquivalenceReport:
    """One maximally parallel step of the embedding equals the direct result
    function on every state (a halting state can only be the empty one, and
    there both sides stay empty)."""
    check_enumerable(len(rs.table), cap, "reaction system")
    system, mode = rs_to_boolp(rs)
    for state in rs.table.subsets():
        expected = reaction_result(rs, state)
        steps = successors(system, mode, state)
        actual = steps[0][1] if steps else state
        if expected != actual:
            return EquivalenceReport(
                passed=False,
                detail="embedded step and direct result function disagree",
                counterexample=Counterexample(
                    state,
                    frozenset({(frozenset(), expected)}),
                    frozenset({(frozenset(), actual)}),
                ),
            )
    return EquivalenceReport(passed=True, detail="embedded step equals the result function")


# --- seeded random suites -----------------------------------------------------


@dataclass(frozen=True)
class SuiteResult:
    name: str
    total: int
    failures: tuple  # of (case label, EquivalenceReport)

    def __bool__(self):
        return not self.failures

    @property
    def passed(self) -> int:
        return self.total - len(self.failures)

    def summary(self) -> str:
        status = "pass" if self else "FAIL"
        out = [f"{self.name}: {self.passed}/{self.total} cases pass [{status}]"]
        for label, report in self.failures:
            out.append(f"  {label}: {report.detail}")
            if report.counterexample is not None:
                out.append(f"    {report.counterexample.describe()}")
        return "\n".join(out)


def run_bn_simulation_suite(count=100, seed=2024, sizes=(2, 5)) -> SuiteResult:
    """Random networks under the synchronous, asynchronous and one random mode."""
    from .generators import random_mode, random_network, random_table

    rng = random.Random(seed)
    failures = []
    total = 0
    for index in range(count):
        table = random_table(rng, rng.randint(sizes[0], sizes[1]))
        network = random_network(rng, table)
        modes = [
            ("syn", BooleanMode.syn(table)),
            ("asyn", BooleanMode.asyn(table)),
            ("random", random_mode(rng, table)),
        ]
        for mode_name, mode in modes:
            total += 1
            report = check_bn_simulation(network, mode)
            if not report:
                failures.append((f"case {index} ({mode_name})", report))
    return SuiteResult("network-embedding suite", total, tuple(failures))


def run_bcn_simulation_suite(count=50, seed=2025, sizes=(2, 3)) -> SuiteResult:
    """Random freeze-extended networks under syn and asyn."""
    from .generators import random_network, random_table

    rng = random.Random(seed)
    failures = []
    total = 0
    for index in range(count):
        table = random_table(rng, rng.randint(sizes[0], sizes[1]))
        bcn = freeze_extend(random_network(rng, table))
        for mode_name in ("syn", "asyn"):
            total += 1
            mode = BooleanMode.syn(table) if mode_name == "syn" else BooleanMode.asyn(table)
            report = check_bcn_simulation(bcn, mode)
            if not report:
                failures.append((f"case {index} ({mode_name})", report))
    return SuiteResult("controlled-embedding suite", total, tuple(failures))


def run_product_lemma_suite(count=100, seed=2026) -> SuiteResult:
    """Random system pairs with random explicit quasimodes."""
    from .generators import random_psystem, random_quasimode, random_table

    rng = random.Random(seed)
    failures = []
    for index in range(count):
        table = random_table(rng, rng.randint(2, 5))
        first = random_psystem(rng, table, prefix="a")
        second = random_psystem(rng, table, prefix="b")
        report = check_product_lemma(
            first,
            second,
            random_quasimode(rng, first),
            random_quasimode(rng, second),
        )
        if not report:
            failures.append((f"case {index}", report))
    return SuiteResult("mode-product suite", count, tuple(failures))


def run_rs_embedding_suite(count=100, seed=2027, max_species=6) -> SuiteResult:
    from .generators import random_reaction_system

    rng = random.Random(seed)
    failures = []
    for index in range(count):
        rs = random_reaction_system(rng, rng.randint(1, max_species))
        report = check_rs_embedding(rs)
        if not report:
            failures.append((f"case {index}", report))
    return SuiteResult("reaction-embedding suite", count, tuple(failures))
