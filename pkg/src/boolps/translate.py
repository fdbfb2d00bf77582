"""Constructions embedding network dynamics into guarded set-rewriting systems.

The central encoding represents each variable x by a pair of rules: one
that introduces x when its update formula holds, and one that erases x when
it does not.  A network mode maps to the quasimode advising, per mode
element, the union of the rule pairs of its variables.  Controlled
networks additionally get a controller system over the control alphabet
whose rules erase and re-introduce control symbols freely; composing the
two systems under the dotted product of their quasimodes reproduces the
controlled dynamics.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass

from .bcn import BooleanControlNetwork, Control, control_pair_names
from .bn import BooleanMode, BooleanNetwork
from .boolp import (
    _RULE_LINE_RE,
    BooleanPSystem,
    ExplicitQuasimode,
    ModeView,
    PowersetQuasimode,
    ProductQuasimode,
    Quasimode,
    Rule,
    derive_mode,
    maximally_parallel_mode,
    union_systems,
)
from .errors import ParseError, UsageError, ValidationError
from .formula import Formula, StateSet, VarTable, parse_formula, parse_state
from .limits import var_cap


def variable_rule_ids(name: str) -> tuple[str, str]:
    """Ids of the introduce/erase rule pair encoding one variable's update."""
    return f"set_{name}", f"clr_{name}"


def control_rule_ids(name: str) -> tuple[str, str]:
    """Ids of the introduce/erase rule pair for one control symbol."""
    return f"u_set_{name}", f"u_clr_{name}"


def _variable_rules(table: VarTable, name: str, update: Formula) -> tuple[Rule, Rule]:
    set_id, clr_id = variable_rule_ids(name)
    target = StateSet.of(table, [name])
    empty = StateSet.empty(table)
    return (
        Rule(set_id, empty, target, update),
        Rule(clr_id, target, empty, update.negate()),
    )


def bn_to_boolp(network: BooleanNetwork) -> BooleanPSystem:
    """Encode a network: per variable, an introduce rule guarded by the update
    formula and an erase rule guarded by its negation."""
    rules = []
    for name, update in zip(network.table.names, network.updates):
        rules.extend(_variable_rules(network.table, name, update))
    return BooleanPSystem(network.table, tuple(rules))


def bn_mode_to_quasimode(mode: BooleanMode, system: BooleanPSystem) -> ExplicitQuasimode:
    """Advise, per mode element, both rules of every variable in the element."""
    known = system.rule_ids()
    family = []
    for element in mode.elements:
        ids = set()
        for name in element:
            ids.update(variable_rule_ids(name))
        missing = ids - known
        if missing:
            raise ValidationError(f"system lacks encoded rules {sorted(missing)}")
        family.append(frozenset(ids))
    return ExplicitQuasimode(frozenset(family))


# --- controlled composition -------------------------------------------------


def controller_system(u_table: VarTable) -> BooleanPSystem:
    """Always-enabled erase/introduce rules for every control symbol."""
    rules = []
    for name in u_table.names:
        set_id, clr_id = control_rule_ids(name)
        symbol = StateSet.of(u_table, [name])
        empty = StateSet.empty(u_table)
        true = Formula.const(u_table, True)
        rules.append(Rule(clr_id, symbol, empty, true))
        rules.append(Rule(set_id, empty, symbol, true))
    return BooleanPSystem(u_table, tuple(rules))


def controller_quasimode(u_table: VarTable) -> Quasimode:
    """All erase rules, dotted with any subset of the introduce rules."""
    erase = frozenset(control_rule_ids(n)[1] for n in u_table.names)
    introduce = frozenset(control_rule_ids(n)[0] for n in u_table.names)
    return ProductQuasimode(
        (
            ExplicitQuasimode(frozenset({erase})),
            PowersetQuasimode(introduce),
        ),
        name="free",
    )


def _paired_controls(u_table: VarTable):
    """Split control names into freeze pairs (stem -> (off-name, on-name))."""
    names = set(u_table.names)
    pairs = []
    seen = set()
    for name in u_table.names:
        if name in seen:
            continue
        if not (name.startswith("u_") and name[-1] in "01"):
            raise ValidationError(f"control {name!r} is not part of a freeze pair")
        stem = name[2:-1]
        off, on = control_pair_names(stem)
        if off not in names or on not in names:
            raise ValidationError(f"control {name!r} lacks its partner")
        seen.update((off, on))
        pairs.append((stem, off, on))
    return pairs


def _tcs_quasimode(u_table: VarTable) -> Quasimode:
    erase = frozenset(control_rule_ids(n)[1] for n in u_table.names)
    factors = [ExplicitQuasimode(frozenset({erase}))]
    for _stem, off, on in _paired_controls(u_table):
        factors.append(
            ExplicitQuasimode(
                frozenset(
                    {
                        frozenset({control_rule_ids(off)[0]}),
                        frozenset({control_rule_ids(on)[0]}),
                    }
                )
            )
        )
    return ProductQuasimode(tuple(factors), name="tcs")


def quasimode_tcs(composite: "ControlledComposite") -> Quasimode:
    """Controller quasimode for total control: every pair introduces exactly
    one of its two symbols each step (on top of erasing everything)."""
    return _tcs_quasimode(composite.u_table)


def acs_rewrite_id(source: str, target: str) -> str:
    return f"u_rw_{source}_{target}"


def piU_acs(u_table: VarTable) -> tuple[BooleanPSystem, Quasimode]:
    """Abiding controller: introduce rules plus value rewrites, no erasure.

    Once some symbol of a pair is present it can change polarity but never
    disappear, so the set of controlled variables only grows.
    """
    rules = []
    true = Formula.const(u_table, True)
    empty = StateSet.empty(u_table)
    for name in u_table.names:
        rules.append(Rule(control_rule_ids(name)[0], empty, StateSet.of(u_table, [name]), true))
    for _stem, off, on in _paired_controls(u_table):
        for source in (off, on):
            for target in (off, on):
                rules.append(
                    Rule(
                        acs_rewrite_id(source, target),
                        StateSet.of(u_table, [source]),
                        StateSet.of(u_table, [target]),
                        true,
                    )
                )
    system = BooleanPSystem(u_table, tuple(rules))
    return system, PowersetQuasimode(system.rule_ids(), name="acs")


@dataclass(frozen=True)
class ControlledComposite:
    """A controlled network embedded as the union of two rewriting systems.

    `pi` encodes the controlled update formulas over variables plus control
    symbols; `pi_u` is the controller over the control symbols alone.  The
    composed quasimode is the dotted product of the update quasimode (from
    the network mode) and the controller quasimode for the chosen regime.
    """

    system: BooleanPSystem  # union of pi and pi_u
    pi: BooleanPSystem
    pi_u: BooleanPSystem
    quasimode: Quasimode
    base_quasimode: Quasimode
    control_quasimode: Quasimode
    x_table: VarTable
    u_table: VarTable
    mode: BooleanMode
    regime: str

    def mode_view(self, strict=False) -> ModeView:
        return derive_mode(self.system, self.quasimode, strict=strict)

    def initial_config(self, state: StateSet, control: Control) -> StateSet:
        """Starting configuration: the first control must be present from the start."""
        if state.table != self.x_table:
            raise UsageError("state over a different variable table")
        if control.assignment.table != self.u_table:
            raise UsageError("control over a different control table")
        bits = state.bits | control.assignment.bits << len(self.x_table)
        return self.system.table.state(bits)

    def project_x(self, configuration: StateSet) -> StateSet:
        mask = (1 << len(self.x_table)) - 1
        return self.x_table.state(configuration.bits & mask)

    def project_u(self, configuration: StateSet) -> Control:
        return Control(self.u_table.state(configuration.bits >> len(self.x_table)))


def bcn_to_composite(
    bcn: BooleanControlNetwork, mode: BooleanMode, regime: str = "free"
) -> ControlledComposite:
    """Embed a controlled network with its controller under a control regime.

    Regimes: ``free`` (controls may change arbitrarily each step), ``tcs``
    (every freeze pair keeps exactly one symbol raised), ``acs`` (control
    symbols are never erased, only rewritten).
    """
    if mode.table != bcn.x_table:
        raise UsageError("mode over a different variable table")
    if len(bcn.u_table) > var_cap():
        warnings.warn(
            f"{len(bcn.u_table)} control symbols: controller families stay lazy, "
            "but exhaustive runs will not be feasible",
            RuntimeWarning,
            stacklevel=2,
        )
    rules = []
    for name, update in zip(bcn.x_table.names, bcn.updates):
        rules.extend(_variable_rules(bcn.table, name, update))
    pi = BooleanPSystem(bcn.table, tuple(rules))
    base_quasimode = ExplicitQuasimode(
        frozenset(
            frozenset(
                rule_id
                for name in element
                for rule_id in variable_rule_ids(name)
            )
            for element in mode.elements
        )
    )
    if regime == "acs":
        pi_u, control_quasimode = piU_acs(bcn.u_table)
    elif regime == "free":
        pi_u = controller_system(bcn.u_table)
        control_quasimode = controller_quasimode(bcn.u_table)
    elif regime == "tcs":
        pi_u = controller_system(bcn.u_table)
        control_quasimode = _tcs_quasimode(bcn.u_table)
    else:
        raise UsageError(f"unknown control regime {regime!r}")
    system = union_systems(pi, pi_u)
    return ControlledComposite(
        system=system,
        pi=pi,
        pi_u=pi_u,
        quasimode=base_quasimode.dot(control_quasimode),
        base_quasimode=base_quasimode,
        control_quasimode=control_quasimode,
        x_table=bcn.x_table,
        u_table=bcn.u_table,
        mode=mode,
        regime=regime,
    )


# --- reaction systems ---------------------------------------------------------


@dataclass(frozen=True)
class Reaction:
    """Reactants enable, inhibitors block, products appear."""

    id: str
    reactants: StateSet
    inhibitors: StateSet
    products: StateSet

    def __post_init__(self):
        tables = {self.reactants.table, self.inhibitors.table, self.products.table}
        if len(tables) != 1:
            raise ValidationError(f"reaction {self.id}: parts over different tables")

    @property
    def table(self) -> VarTable:
        return self.reactants.table

    def text(self) -> str:
        return (
            f"{self.id}: reactants {self.reactants.set_text()} "
            f"inhibitors {self.inhibitors.set_text()} "
            f"products {self.products.set_text()}"
        )


@dataclass(frozen=True)
class ReactionSystem:
    table: VarTable
    reactions: tuple[Reaction, ...]
    allow_degenerate: bool = False

    def __post_init__(self):
        seen = set()
        for reaction in self.reactions:
            if reaction.table != self.table:
                raise ValidationError(f"reaction {reaction.id} over a different table")
            if reaction.id in seen:
                raise ValidationError(f"duplicate reaction id {reaction.id!r}")
            seen.add(reaction.id)
            if not self.allow_degenerate and (reaction.reactants & reaction.inhibitors).bits:
                raise ValidationError(
                    f"reaction {reaction.id} lists a species as both reactant and "
                    "inhibitor (pass allow_degenerate to keep such dead reactions)"
                )


def degradation_rule_id(name: str) -> str:
    return f"deg_{name}"


def rs_to_boolp(rs: ReactionSystem) -> tuple[BooleanPSystem, ModeView]:
    """Embed a reaction system: one introduce rule per reaction, one
    always-enabled erase rule per species, run maximally parallel.

    One maximally parallel step from W then produces exactly the union of
    the products of the reactions enabled at W: everything not sustained by
    a reaction is erased.
    """
    table = rs.table
    empty = StateSet.empty(table)
    rules = []
    for reaction in rs.reactions:
        guard = Formula.const(table, True)
        parts = [Formula.var(table, n) for n in reaction.reactants]
        parts += [Formula.var(table, n).negate() for n in reaction.inhibitors]
        if parts:
            guard = parts[0].conj(*parts[1:])
        rules.append(Rule(reaction.id, empty, reaction.products, guard))
    for name in table.names:
        rules.append(
            Rule(
                degradation_rule_id(name),
                StateSet.of(table, [name]),
                empty,
                Formula.const(table, True),
            )
        )
    system = BooleanPSystem(table, tuple(rules))
    return system, maximally_parallel_mode(system)


# --- reaction system text format ----------------------------------------------
#
#   species a, b, c        # optional; inferred from mentions otherwise
#   a1: reactants {a} inhibitors {c} products {b}


_REACTION_RE = re.compile(
    r"(?P<id>[A-Za-z0-9_]+)\s*:\s*reactants\s*(?P<r>\{[^}]*\})\s*"
    r"inhibitors\s*(?P<i>\{[^}]*\})\s*products\s*(?P<p>\{[^}]*\})\s*$"
)


def _set_names(text: str) -> list[str]:
    inner = text.strip()[1:-1].strip()
    return [n.strip() for n in inner.split(",") if n.strip()] if inner else []


def parse_reactions_text(text: str, source=None, allow_degenerate=False) -> ReactionSystem:
    species = []
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("species "):
            species.extend(n.strip() for n in line[8:].split(",") if n.strip())
            continue
        m = _REACTION_RE.match(line)
        if m is None:
            raise ParseError(f"cannot read line {raw!r}", line=lineno, source=source)
        lines.append((m, lineno))
    if not species:
        seen = []
        for m, _ in lines:
            for group in ("r", "i", "p"):
                for name in _set_names(m.group(group)):
                    if name not in seen:
                        seen.append(name)
        species = seen
    if not species:
        raise ParseError("no species declared or mentioned", source=source)
    try:
        table = VarTable(species)
    except ValidationError as exc:
        raise ParseError(str(exc), source=source) from None
    reactions = []
    for m, lineno in lines:
        try:
            reactions.append(
                Reaction(
                    m.group("id"),
                    StateSet.of(table, _set_names(m.group("r"))),
                    StateSet.of(table, _set_names(m.group("i"))),
                    StateSet.of(table, _set_names(m.group("p"))),
                )
            )
        except (UsageError, ValidationError) as exc:
            raise ParseError(str(exc), line=lineno, source=source) from None
    try:
        return ReactionSystem(table, tuple(reactions), allow_degenerate=allow_degenerate)
    except ValidationError as exc:
        raise ParseError(str(exc), source=source) from None


def format_reactions_text(rs: ReactionSystem) -> str:
    lines = ["species " + ", ".join(rs.table.names)]
    lines.extend(r.text() for r in rs.reactions)
    return "\n".join(lines) + "\n"


# --- composite dump format ------------------------------------------------------
#
#   alphabet x, y, u_x0, ...
#   controls u_x0, u_x1, ...
#   regime free
#   mode syn                  # or one `group {...}` line per mode element
#   <rule lines of the union system>
#
# The controlled update formulas are recoverable from the introduce-rule
# guards, so re-parsing rebuilds a semantically identical composite.


def format_composite_text(composite: ControlledComposite) -> str:
    lines = ["alphabet " + ", ".join(composite.system.table.names)]
    if len(composite.u_table):
        lines.append("controls " + ", ".join(composite.u_table.names))
    lines.append(f"regime {composite.regime}")
    if composite.mode == BooleanMode.syn(composite.x_table):
        lines.append("mode syn")
    elif composite.mode == BooleanMode.asyn(composite.x_table):
        lines.append("mode asyn")
    else:
        for element in composite.mode.sorted_elements():
            lines.append(f"group {element.set_text()}")
    for rule in composite.system.rules:
        lines.append(rule.text())
    return "\n".join(lines) + "\n"


def parse_composite_text(text: str, source=None) -> ControlledComposite:
    alphabet = []
    controls = []
    regime = "free"
    mode_name = None
    groups = []
    rule_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("alphabet "):
            alphabet.extend(n.strip() for n in line[9:].split(",") if n.strip())
        elif line.startswith("controls "):
            controls.extend(n.strip() for n in line[9:].split(",") if n.strip())
        elif line.startswith("regime "):
            regime = line[7:].strip()
        elif line.startswith("mode "):
            mode_name = line[5:].strip()
        elif line.startswith("group "):
            groups.append((line[6:].strip(), lineno))
        else:
            rule_lines.append((line, lineno))
    if not alphabet:
        raise ParseError("no `alphabet` declaration found", source=source)
    x_names = [n for n in alphabet if n not in set(controls)]
    try:
        x_table = VarTable(x_names)
        u_table = VarTable(controls)
        full = VarTable(x_names + controls)
    except ValidationError as exc:
        raise ParseError(str(exc), source=source) from None
    if tuple(alphabet) != full.names:
        raise ParseError("alphabet must list variables before controls", source=source)
    set_guards = {}
    for line, lineno in rule_lines:
        m = _RULE_LINE_RE.match(line)
        if m is None:
            raise ParseError(f"cannot read line {line!r}", line=lineno, source=source)
        rid = m.group("id")
        if rid.startswith("set_"):
            guard_text = (m.group("guard") or "1").strip() or "1"
            try:
                set_guards[rid[4:]] = parse_formula(guard_text, full)
            except ParseError as exc:
                raise ParseError(exc.message, offset=exc.offset, line=lineno,
                                 source=source) from None
    missing = [n for n in x_names if n not in set_guards]
    if missing:
        raise ParseError(f"no introduce rule found for {missing[0]!r}", source=source)
    bcn = BooleanControlNetwork(
        x_table, u_table, full, tuple(set_guards[n] for n in x_names)
    )
    if groups:
        mode = BooleanMode(
            x_table,
            frozenset(
                parse_state(x_table, text_part) for text_part, _ in groups
            ),
        )
    elif mode_name == "asyn":
        mode = BooleanMode.asyn(x_table)
    else:
        mode = BooleanMode.syn(x_table)
    return bcn_to_composite(bcn, mode, regime=regime)
