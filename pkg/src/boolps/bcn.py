"""Boolean control networks: freeze controls, control application, trajectory gluing.

A control network is a network template whose update formulas may mention a
disjoint alphabet of control inputs.  Fixing a Boolean assignment to the
controls yields a plain Boolean network.  Networks are stored intensionally
(formulas over the combined table); extensional per-control network maps
are flattened into one disjunction per variable at ingestion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .bn import BooleanNetwork, Trajectory
from .errors import ParseError, UsageError, ValidationError
from .formula import Formula, StateSet, VarTable, parse_formula
from .limits import check_enumerable


@dataclass(frozen=True)
class BooleanControlNetwork:
    """Per-variable update formulas over the combined table X followed by U."""

    x_table: VarTable
    u_table: VarTable
    table: VarTable  # x names then u names
    updates: tuple[Formula, ...]  # one per x, over `table`

    def __post_init__(self):
        overlap = set(self.x_table.names) & set(self.u_table.names)
        if overlap:
            raise ValidationError(f"control names collide with variables: {sorted(overlap)}")
        if self.table.names != self.x_table.names + self.u_table.names:
            raise ValidationError("combined table must list variables then controls")
        if len(self.updates) != len(self.x_table):
            raise ValidationError("need exactly one update per (non-control) variable")
        for formula in self.updates:
            if formula.table != self.table:
                raise ValidationError("update formula over a different combined table")

    @classmethod
    def build(
        cls, x_table: VarTable, u_table: VarTable, updates: Sequence[Formula]
    ) -> "BooleanControlNetwork":
        table = VarTable(x_table.names + u_table.names)
        fixed = []
        for formula in updates:
            if formula.table == table:
                fixed.append(formula)
            elif formula.table == x_table:
                fixed.append(formula.remap(table, {i: i for i in range(len(x_table))}))
            else:
                raise ValidationError("update formula over an unrelated table")
        return cls(x_table, u_table, table, tuple(fixed))

    @classmethod
    def from_network_map(
        cls,
        x_table: VarTable,
        u_table: VarTable,
        networks: Mapping["Control", BooleanNetwork],
        cap=None,
    ) -> "BooleanControlNetwork":
        """Flatten an extensional control-to-network map into one formula per variable.

        Each update becomes the disjunction, over all control assignments,
        of (the conjunction fixing that assignment) and (the network formula
        the assignment selects).
        """
        check_enumerable(len(u_table), cap, "control alphabet")
        table = VarTable(x_table.names + u_table.names)
        x_map = {i: i for i in range(len(x_table))}
        controls = list(enumerate_controls(u_table))
        missing = [c for c in controls if c not in networks]
        if missing:
            raise ValidationError(f"no network for control {missing[0].set_text()}")
        literals = {}
        for control in controls:
            parts = []
            for pos, name in enumerate(u_table.names):
                var = Formula.var(table, name)
                parts.append(var if control.assignment.bits >> pos & 1 else var.negate())
            literals[control] = parts
        updates = []
        for x_pos in range(len(x_table)):
            branches = []
            for control in controls:
                selected = networks[control]
                if selected.table != x_table:
                    raise ValidationError("selected network over a different variable table")
                branch = selected.updates[x_pos].remap(table, x_map)
                lits = literals[control]
                if lits:
                    branch = lits[0].conj(*lits[1:], branch)
                branches.append(branch)
            updates.append(Formula.const(table, False).disj(*branches))
        return cls(x_table, u_table, table, tuple(updates))

    def lift_state(self, state: StateSet, control: "Control") -> StateSet:
        """Combined-table state pairing an X-state with a control assignment."""
        if state.table != self.x_table:
            raise UsageError("state over a different variable table")
        if control.assignment.table != self.u_table:
            raise UsageError("control over a different control table")
        bits = state.bits | control.assignment.bits << len(self.x_table)
        return self.table.state(bits)


@dataclass(frozen=True)
class Control:
    """Boolean assignment to the control inputs, as the set of raised inputs."""

    assignment: StateSet

    def names(self):
        return self.assignment.names()

    def set_text(self) -> str:
        return self.assignment.set_text()

    def digits(self) -> str:
        return self.assignment.digits()

    def sort_key(self):
        return self.assignment.sort_key()


@dataclass(frozen=True)
class ControlSequence:
    controls: tuple[Control, ...]

    def __len__(self):
        return len(self.controls)

    def __iter__(self):
        return iter(self.controls)

    def text(self) -> str:
        return "(" + ", ".join(c.set_text() for c in self.controls) + ")"


def enumerate_controls(u_table: VarTable, cap=None) -> Iterable[Control]:
    """All control assignments in canonical (digit-value) order."""
    check_enumerable(len(u_table), cap, "control alphabet")
    ordered = sorted(u_table.subsets(), key=StateSet.sort_key)
    return [Control(s) for s in ordered]


def apply_control(bcn: BooleanControlNetwork, control: Control) -> BooleanNetwork:
    """The plain network selected by a control: substitute, fold, drop the controls."""
    if control.assignment.table != bcn.u_table:
        raise UsageError("control over a different control table")
    values = {
        name: bool(control.assignment.bits >> pos & 1)
        for pos, name in enumerate(bcn.u_table.names)
    }
    n_x = len(bcn.x_table)
    x_map = {i: i for i in range(n_x)}
    updates = []
    for formula in bcn.updates:
        folded = formula.substitute(values)
        leftover = folded.variables() & set(bcn.u_table.names)
        if leftover:
            raise ValidationError(f"control inputs survived substitution: {sorted(leftover)}")
        updates.append(folded.remap(bcn.x_table, x_map))
    return BooleanNetwork(bcn.x_table, tuple(updates))


def control_pair_names(name: str) -> tuple[str, str]:
    """Names of the freeze pair for a variable: raise the first to pin it to 0,
    the second to pin it to 1."""
    return f"u_{name}0", f"u_{name}1"


def freeze_extend(network: BooleanNetwork, variables=None) -> BooleanControlNetwork:
    """Extend a network with freeze controls for `variables` (default: all).

    Each controllable x gets the pair ``u_<x>0`` / ``u_<x>1`` and the update
    ``(f_x & !u_<x>0) | u_<x>1``: raising the first pins x to 0, raising the
    second pins x to 1, and the second wins when both are raised.  The
    all-zero control recovers the original network.
    """
    if variables is None:
        variables = network.table.names
    chosen = []
    seen = set()
    for name in variables:
        network.table.position(name)  # validates membership
        if name not in seen:
            seen.add(name)
            chosen.append(name)
    u_names = []
    for name in network.table.names:
        if name in seen:
            u_names.extend(control_pair_names(name))
    u_table = VarTable(u_names)
    table = VarTable(network.table.names + u_table.names)
    x_map = {i: i for i in range(len(network.table))}
    updates = []
    for name, update in zip(network.table.names, network.updates):
        lifted = update.remap(table, x_map)
        if name in seen:
            off, on = control_pair_names(name)
            lifted = lifted.conj(Formula.var(table, off).negate()).disj(
                Formula.var(table, on)
            )
        updates.append(lifted)
    return BooleanControlNetwork(network.table, u_table, table, tuple(updates))


def flatten_bcn(bcn: BooleanControlNetwork) -> dict[str, Formula]:
    """Per-variable update formulas over the combined table.

    Networks are stored flattened, so this is the stored family; kept as an
    operation so extensional ingestion and intensional storage share one
    contract (truth-table equality over the combined table).
    """
    return {name: bcn.updates[i] for i, name in enumerate(bcn.x_table.names)}


def glue_trajectories(parts: Sequence[Trajectory]) -> Trajectory:
    """Concatenate runs whose endpoints meet, identifying shared states once."""
    if not parts:
        raise ValidationError("nothing to glue")
    states = list(parts[0].states)
    labels = list(parts[0].labels) if parts[0].labels is not None else None
    for index, part in enumerate(parts[1:], start=1):
        if part.first != states[-1]:
            raise ValidationError(
                f"trajectory {index} starts at {part.first.set_text()}, expected "
                f"{states[-1].set_text()}"
            )
        states.extend(part.states[1:])
        if labels is not None and part.labels is not None:
            labels.extend(part.labels)
        else:
            labels = None
    return Trajectory(tuple(states), tuple(labels) if labels is not None else None,
                      halting=parts[-1].halting)


# --- text format ------------------------------------------------------------
#
#   var x, y
#   control a, b          # optional explicit controls
#   freeze x              # sugar: adds u_x0/u_x1 and wraps x's update
#   x' = !x & y
#   y' = x & !y


def parse_bcn_text(text: str, source=None) -> BooleanControlNetwork:
    x_names = []
    u_names = []
    frozen = []
    update_lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("var "):
            x_names.extend(n.strip() for n in line[4:].split(",") if n.strip())
        elif line.startswith("control "):
            u_names.extend(n.strip() for n in line[8:].split(",") if n.strip())
        elif line.startswith("freeze "):
            frozen.extend(n.strip() for n in line[7:].split(",") if n.strip())
        elif "'" in line and "=" in line:
            target, _, rhs = line.partition("=")
            target = target.strip()
            if not target.endswith("'"):
                raise ParseError(f"update target must end with ' : {target!r}",
                                 line=lineno, source=source)
            update_lines[target[:-1].strip()] = (rhs.strip(), lineno)
        else:
            raise ParseError(f"cannot read line {raw!r}", line=lineno, source=source)
    if not x_names:
        raise ParseError("no `var` declaration found", source=source)
    for name in frozen:
        if name not in x_names:
            raise ParseError(f"freeze of undeclared variable {name!r}", source=source)
        for control in control_pair_names(name):
            if control in u_names:
                raise ParseError(f"control {control!r} declared twice", source=source)
            u_names.append(control)
    try:
        x_table = VarTable(x_names)
        u_table = VarTable(u_names)
        table = VarTable(x_names + u_names)
    except ValidationError as exc:
        raise ParseError(str(exc), source=source) from None
    updates = []
    for name in x_names:
        if name not in update_lines:
            raise ParseError(f"missing update for variable {name!r}", source=source)
        rhs, lineno = update_lines.pop(name)
        try:
            formula = parse_formula(rhs, table)
        except ParseError as exc:
            raise ParseError(exc.message, offset=exc.offset, line=lineno, source=source) from None
        if name in frozen:
            off, on = control_pair_names(name)
            formula = formula.conj(Formula.var(table, off).negate()).disj(
                Formula.var(table, on)
            )
        updates.append(formula)
    if update_lines:
        extra = ", ".join(sorted(update_lines))
        raise ParseError(f"updates for undeclared variables: {extra}", source=source)
    return BooleanControlNetwork(x_table, u_table, table, tuple(updates))


def format_bcn_text(bcn: BooleanControlNetwork) -> str:
    lines = ["var " + ", ".join(bcn.x_table.names)]
    if len(bcn.u_table):
        lines.append("control " + ", ".join(bcn.u_table.names))
    for name, update in zip(bcn.x_table.names, bcn.updates):
        lines.append(f"{name}' = {update.to_text()}")
    return "\n".join(lines) + "\n"
