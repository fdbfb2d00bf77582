"""Boolean networks: update schedules (modes), stepping, transition graphs, attractors.

A network assigns one update formula per variable.  A mode is a family of
variable groups; one step picks a group and recomputes exactly those
variables from the current state, leaving the rest unchanged.  The
synchronous mode updates all variables at once, the asynchronous one a
single variable at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import networkx as nx

from .errors import CapacityError, ParseError, UsageError, ValidationError
from .formula import Formula, StateSet, VarTable, parse_formula, parse_state
from .limits import DEFAULT_BREADTH_CAP, check_enumerable
from .relation import TransitionRelation


@dataclass(frozen=True)
class BooleanNetwork:
    table: VarTable
    updates: tuple[Formula, ...]

    def __post_init__(self):
        if len(self.updates) != len(self.table):
            raise ValidationError(
                f"expected {len(self.table)} update formulas, got {len(self.updates)}"
            )
        for formula in self.updates:
            if formula.table != self.table:
                raise ValidationError("update formula over a different variable table")

    def update_for(self, name: str) -> Formula:
        return self.updates[self.table.position(name)]


@dataclass(frozen=True)
class BooleanMode:
    """Family of variable groups that may be updated together in one step."""

    table: VarTable
    elements: frozenset[StateSet]

    def __post_init__(self):
        for element in self.elements:
            if element.table != self.table:
                raise ValidationError("mode element over a different variable table")

    @classmethod
    def syn(cls, table: VarTable) -> "BooleanMode":
        return cls(table, frozenset({StateSet.full(table)}))

    @classmethod
    def asyn(cls, table: VarTable) -> "BooleanMode":
        return cls(
            table, frozenset(StateSet.of(table, [name]) for name in table)
        )

    @classmethod
    def of(cls, table: VarTable, groups: Iterable[Iterable[str]]) -> "BooleanMode":
        return cls(table, frozenset(StateSet.of(table, g) for g in groups))

    def sorted_elements(self):
        return sorted(self.elements, key=StateSet.sort_key)


@dataclass(frozen=True)
class Trajectory:
    """Finite run: a non-empty state sequence with optional per-step labels."""

    states: tuple[StateSet, ...]
    labels: tuple = None
    halting: bool = False

    def __post_init__(self):
        if not self.states:
            raise ValidationError("a trajectory needs at least one state")
        if self.labels is not None and len(self.labels) != len(self.states) - 1:
            raise ValidationError("need exactly one label per step")

    @property
    def first(self) -> StateSet:
        return self.states[0]

    @property
    def last(self) -> StateSet:
        return self.states[-1]

    def __len__(self):
        return len(self.states)

    def text(self, style: str = "digits") -> str:
        if style == "digits":
            parts = [s.digits() for s in self.states]
        else:
            parts = [s.set_text() for s in self.states]
        out = " -> ".join(parts)
        if self.halting:
            out += " [halting]"
        return out


def bn_step(network: BooleanNetwork, state: StateSet, group: StateSet) -> StateSet:
    """One step updating exactly the variables of `group` from `state`."""
    if group.table != network.table:
        raise UsageError("update group over a different variable table")
    if state.table != network.table:
        raise UsageError("state over a different variable table")
    bits = state.bits
    for pos in range(len(network.table)):
        if group.bits >> pos & 1:
            if network.updates[pos].evaluate(state):
                bits |= 1 << pos
            else:
                bits &= ~(1 << pos)
    return network.table.state(bits)


def bn_transitions(network: BooleanNetwork, mode: BooleanMode, cap=None) -> TransitionRelation:
    """Full labelled edge set over all 2**n states, one edge per mode element."""
    if mode.table != network.table:
        raise UsageError("mode over a different variable table")
    check_enumerable(len(network.table), cap, "network")
    edges = set()
    elements = mode.sorted_elements()
    for state in network.table.subsets():
        for element in elements:
            edges.add((state, element, bn_step(network, state, element)))
    return TransitionRelation(network.table, frozenset(edges))


def bn_trajectories(
    network: BooleanNetwork,
    mode: BooleanMode,
    start: StateSet,
    max_steps: int,
    breadth_cap=None,
) -> tuple[Trajectory, ...]:
    """All labelled runs from `start`, each extended for `max_steps` steps."""
    limit = DEFAULT_BREADTH_CAP if breadth_cap is None else breadth_cap
    elements = mode.sorted_elements()
    paths = [((start,), ())]
    for _ in range(max_steps):
        if not elements:
            break
        grown = []
        for states, labels in paths:
            for element in elements:
                grown.append(
                    (states + (bn_step(network, states[-1], element),), labels + (element,))
                )
        if len(grown) > limit:
            raise CapacityError(
                f"trajectory breadth exceeded cap {limit}",
                partial=tuple(Trajectory(s, l) for s, l in paths),
            )
        paths = grown
    # distinct state sequences; label choices may coincide state-wise
    seen = {}
    for states, labels in paths:
        seen.setdefault(states, labels)
    return tuple(Trajectory(states, labels) for states, labels in seen.items())


def attractors(network: BooleanNetwork, mode: BooleanMode, cap=None):
    """Terminal strongly-connected components of the one-step graph.

    Every run eventually stays inside one of these: they are the sets of
    mutually reachable states the dynamics cannot escape.  Returned as
    canonically sorted tuples of states, sorted among themselves.
    """
    check_enumerable(len(network.table), cap, "network")
    graph = nx.DiGraph()
    n = len(network.table)
    graph.add_nodes_from(range(1 << n))
    for state in network.table.subsets():
        for element in mode.elements:
            graph.add_edge(state.bits, bn_step(network, state, element).bits)
    result = []
    for component in nx.attracting_components(graph):
        states = sorted(
            (network.table.state(bits) for bits in component), key=StateSet.sort_key
        )
        result.append(tuple(states))
    result.sort(key=lambda states: tuple(s.sort_key() for s in states))
    return result


# --- text format ------------------------------------------------------------
#
#   # comment
#   var x, y
#   x' = !x & y
#   y' = x & !y


def _split_decl(line: str, keyword: str):
    names = [n.strip() for n in line[len(keyword):].split(",")]
    return [n for n in names if n]


def parse_bn_text(text: str, source=None) -> BooleanNetwork:
    names = []
    update_lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("var "):
            names.extend(_split_decl(line, "var "))
        elif "'" in line and "=" in line:
            target, _, rhs = line.partition("=")
            target = target.strip()
            if not target.endswith("'"):
                raise ParseError(
                    f"update target must end with ' : {target!r}", line=lineno, source=source
                )
            update_lines[target[:-1].strip()] = (rhs.strip(), lineno)
        else:
            raise ParseError(f"cannot read line {raw!r}", line=lineno, source=source)
    if not names:
        raise ParseError("no `var` declaration found", source=source)
    try:
        table = VarTable(names)
    except ValidationError as exc:
        raise ParseError(str(exc), source=source) from None
    updates = []
    for name in names:
        if name not in update_lines:
            raise ParseError(f"missing update for variable {name!r}", source=source)
        rhs, lineno = update_lines.pop(name)
        try:
            updates.append(parse_formula(rhs, table))
        except ParseError as exc:
            raise ParseError(exc.message, offset=exc.offset, line=lineno, source=source) from None
    if update_lines:
        extra = ", ".join(sorted(update_lines))
        raise ParseError(f"updates for undeclared variables: {extra}", source=source)
    return BooleanNetwork(table, tuple(updates))


def format_bn_text(network: BooleanNetwork) -> str:
    lines = ["var " + ", ".join(network.table.names)]
    for name, update in zip(network.table.names, network.updates):
        lines.append(f"{name}' = {update.to_text()}")
    return "\n".join(lines) + "\n"


def parse_mode_text(text: str, table: VarTable, source=None) -> BooleanMode:
    """Mode file: one `group {x,y}` line per element (``group {}`` allowed)."""
    groups = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not line.startswith("group"):
            raise ParseError(f"cannot read line {raw!r}", line=lineno, source=source)
        groups.append(parse_state(table, line[len("group"):].strip()))
    return BooleanMode(table, frozenset(groups))


def format_mode_text(mode: BooleanMode) -> str:
    return "\n".join(f"group {e.set_text()}" for e in mode.sorted_elements()) + "\n"


def named_mode(name: str, table: VarTable) -> BooleanMode:
    if name == "syn":
        return BooleanMode.syn(table)
    if name == "asyn":
        return BooleanMode.asyn(table)
    raise UsageError(f"unknown mode name {name!r} (expected syn or asyn)")
