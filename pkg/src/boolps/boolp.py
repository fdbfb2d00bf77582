"""Guarded set-rewriting systems: rules, applicability, modes, quasimodes, evolutions.

A system is an alphabet plus rules ``A -> B | guard``.  A rule is applicable
to a configuration W when ``A`` is contained in W and the guard holds at W;
applying a set of individually applicable rules yields
``(W - union of As) | union of Bs``.  Only individual applicability is ever
checked, so rules never compete and joint application is order-independent
and idempotent.

Modes pick which rule sets may fire at each configuration.  A quasimode is
a configuration-independent family of advised rule sets; the mode it
derives restricts each advised set to its applicable part at the current
configuration (an advised set whose rules are all inapplicable contributes
an explicit empty firing, i.e. a stutter step).  The strict variant instead
drops advised sets that are not entirely applicable.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .bn import Trajectory
from .errors import CapacityError, ParseError, UsageError, ValidationError
from .formula import (
    Formula,
    StateSet,
    VarTable,
    equivalent,
    merge_tables,
    parse_formula,
    parse_state,
)
from .limits import DEFAULT_BREADTH_CAP, check_enumerable

RuleSet = frozenset  # of rule id strings

_RULE_ID_RE = re.compile(r"[A-Za-z0-9_]+")


@dataclass(frozen=True)
class Rule:
    """Guarded set-rewriting rule ``id: lhs -> rhs | guard``."""

    id: str
    lhs: StateSet
    rhs: StateSet
    guard: Formula

    def __post_init__(self):
        if not _RULE_ID_RE.fullmatch(self.id):
            raise ValidationError(f"invalid rule id {self.id!r}")
        if self.lhs.table != self.rhs.table or self.lhs.table != self.guard.table:
            raise ValidationError(f"rule {self.id}: parts over different tables")

    @property
    def table(self) -> VarTable:
        return self.lhs.table

    def applicable_to(self, configuration: StateSet) -> bool:
        """True iff lhs is contained in the configuration and the guard holds there."""
        if configuration.table != self.table:
            raise UsageError("configuration over a different variable table")
        return self.lhs <= configuration and self.guard.evaluate(configuration)

    def text(self) -> str:
        return f"{self.id}: {self.lhs.set_text()} -> {self.rhs.set_text()} | {self.guard.to_text()}"


def rule_applicable(rule: Rule, configuration: StateSet) -> bool:
    return rule.applicable_to(configuration)


@dataclass(frozen=True)
class BooleanPSystem:
    table: VarTable
    rules: tuple[Rule, ...]
    _by_id: dict = field(init=False, repr=False, compare=False)
    _app_cache: dict = field(init=False, repr=False, compare=False)
    _masks: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_id = {}
        masks = {}
        for rule in self.rules:
            if rule.table != self.table:
                raise ValidationError(f"rule {rule.id} over a different variable table")
            if rule.id in by_id:
                raise ValidationError(f"duplicate rule id {rule.id!r}")
            by_id[rule.id] = rule
            masks[rule.id] = (rule.lhs.bits, rule.rhs.bits)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_app_cache", {})
        object.__setattr__(self, "_masks", masks)

    def rule(self, rule_id: str) -> Rule:
        try:
            return self._by_id[rule_id]
        except KeyError:
            raise UsageError(f"unknown rule id {rule_id!r}") from None

    def rule_ids(self) -> frozenset:
        return frozenset(self._by_id)

    def applicable_rules(self, configuration: StateSet) -> RuleSet:
        """Ids of the rules individually applicable to the configuration."""
        got = self._app_cache.get(configuration.bits)
        if got is None:
            if configuration.table != self.table:
                raise UsageError("configuration over a different variable table")
            got = frozenset(
                r.id for r in self.rules if r.applicable_to(configuration)
            )
            self._app_cache[configuration.bits] = got
        return got

    def is_halting(self, configuration: StateSet) -> bool:
        return not self.applicable_rules(configuration)

    def apply_rule_set(self, configuration: StateSet, rule_ids: Iterable[str]) -> StateSet:
        """Joint application; every member must be individually applicable."""
        ids = frozenset(rule_ids)
        applicable = self.applicable_rules(configuration)
        for rule_id in sorted(ids):
            if rule_id not in self._by_id:
                raise UsageError(f"unknown rule id {rule_id!r}")
            if rule_id not in applicable:
                raise ValidationError(
                    f"rule {rule_id} is not applicable to {configuration.set_text()}"
                )
        return self._apply_unchecked(configuration, ids)

    def _apply_unchecked(self, configuration: StateSet, rule_ids) -> StateSet:
        erase = 0
        add = 0
        masks = self._masks
        for rule_id in rule_ids:
            lhs_bits, rhs_bits = masks[rule_id]
            erase |= lhs_bits
            add |= rhs_bits
        return self.table.state(configuration.bits & ~erase | add)


def applicable_rules(system: BooleanPSystem, configuration: StateSet) -> RuleSet:
    return system.applicable_rules(configuration)


def apply_rule_set(configuration: StateSet, rules: Iterable[Rule]) -> StateSet:
    """Joint application of rule objects; duplicates are harmless.

    Raises ValidationError naming the first inapplicable member.
    """
    erase = 0
    add = 0
    for rule in rules:
        if not rule.applicable_to(configuration):
            raise ValidationError(
                f"rule {rule.id} is not applicable to {configuration.set_text()}"
            )
        erase |= rule.lhs.bits
        add |= rule.rhs.bits
    return configuration.table.state(configuration.bits & ~erase | add)


# --- quasimodes ---------------------------------------------------------------


def dotted_product(a: Iterable[frozenset], b: Iterable[frozenset]) -> frozenset:
    """All unions of one element from each family."""
    b = tuple(b)
    return frozenset(x | y for x in a for y in b)


class Quasimode:
    """Configuration-independent family of advised rule-id sets."""

    name: str | None = None

    def elements(self) -> Iterator[RuleSet]:
        """Enumerate the family without duplicates (may be exponentially large)."""
        raise NotImplementedError

    def advised(self, system: BooleanPSystem, configuration: StateSet, strict=False):
        """The derived mode's value at a configuration.

        Filtered semantics keeps the applicable part of every advised set
        (retaining empty results as stutter elements); strict semantics
        keeps only advised sets that are entirely applicable.
        """
        raise NotImplementedError

    def size_hint(self) -> int:
        raise NotImplementedError

    def dot(self, other: "Quasimode") -> "Quasimode":
        return ProductQuasimode((self, other))

    def validate(self, system: BooleanPSystem):
        known = system.rule_ids()
        for element in self.elements():
            missing = element - known
            if missing:
                raise ValidationError(f"advised unknown rule ids {sorted(missing)}")


@dataclass(frozen=True)
class ExplicitQuasimode(Quasimode):
    family: frozenset  # of RuleSet
    name: str | None = None

    def elements(self):
        return iter(self.family)

    def advised(self, system, configuration, strict=False):
        app = system.applicable_rules(configuration)
        if strict:
            return frozenset(m for m in self.family if m <= app)
        return frozenset(m & app for m in self.family)

    def size_hint(self):
        return len(self.family)


@dataclass(frozen=True)
class PowersetQuasimode(Quasimode):
    """The family of all subsets of a base rule set, never materialized eagerly."""

    base: RuleSet
    name: str | None = None

    def elements(self):
        base = sorted(self.base)
        for size in range(len(base) + 1):
            for combo in itertools.combinations(base, size):
                yield frozenset(combo)

    def advised(self, system, configuration, strict=False):
        # every subset of the applicable part is entirely applicable, so the
        # strict and filtered readings coincide here
        usable = sorted(self.base & system.applicable_rules(configuration))
        check_enumerable(len(usable), what="applicable advised rules")
        return frozenset(
            frozenset(combo)
            for size in range(len(usable) + 1)
            for combo in itertools.combinations(usable, size)
        )

    def size_hint(self):
        return 1 << len(self.base)


@dataclass(frozen=True)
class ProductQuasimode(Quasimode):
    """Dotted product of factor families: all unions of one element per factor.

    Restriction to the applicable part distributes over union, so the
    derived mode of a product is the dotted product of the factors' derived
    modes; that keeps evaluation lazy in the factors.
    """

    factors: tuple[Quasimode, ...]
    name: str | None = None

    def elements(self):
        seen = set()
        for combo in itertools.product(*(tuple(f.elements()) for f in self.factors)):
            union = frozenset().union(*combo)
            if union not in seen:
                seen.add(union)
                yield union

    def advised(self, system, configuration, strict=False):
        parts = [f.advised(system, configuration, strict) for f in self.factors]
        result = parts[0]
        for part in parts[1:]:
            result = dotted_product(result, part)
        return result

    def size_hint(self):
        size = 1
        for factor in self.factors:
            size *= factor.size_hint()
        return size


def explicit_quasimode(family: Iterable[Iterable[str]], name=None) -> ExplicitQuasimode:
    return ExplicitQuasimode(frozenset(frozenset(m) for m in family), name=name)


def quasimode_maxpar(system: BooleanPSystem) -> ExplicitQuasimode:
    """Advise all rules; the filtered mode fires the non-extendable applicable set."""
    return ExplicitQuasimode(frozenset({system.rule_ids()}), name="maxpar")


def quasimode_seq(system: BooleanPSystem) -> ExplicitQuasimode:
    """Advise each rule alone (sequential firing)."""
    return ExplicitQuasimode(
        frozenset(frozenset({r.id}) for r in system.rules), name="seq"
    )


def quasimode_async(system: BooleanPSystem) -> PowersetQuasimode:
    """Advise every set of rules (asynchronous firing)."""
    return PowersetQuasimode(system.rule_ids(), name="async")


# --- modes --------------------------------------------------------------------


class ModeView:
    """Configuration-indexed view of the rule sets a system may fire.

    Every rule in a returned set is individually applicable at that
    configuration; the value is cached per configuration.
    """

    def __init__(self, system: BooleanPSystem, at, name=None):
        self.system = system
        self._at = at
        self.name = name
        self._cache = {}

    def at(self, configuration: StateSet) -> frozenset:
        got = self._cache.get(configuration.bits)
        if got is None:
            got = self._at(configuration)
            self._cache[configuration.bits] = got
        return got


def derive_mode(system: BooleanPSystem, quasimode: Quasimode, strict=False) -> ModeView:
    """The mode a quasimode induces (filtered by default, strict on request)."""
    return ModeView(
        system,
        lambda configuration: quasimode.advised(system, configuration, strict),
        name=quasimode.name,
    )


def maximally_parallel_mode(system: BooleanPSystem) -> ModeView:
    """Fire the unique non-extendable applicable set; nothing at halting states."""

    def at(configuration):
        app = system.applicable_rules(configuration)
        if not app:
            return frozenset()
        return frozenset({app})

    return ModeView(system, at, name="maxpar")


def product_mode(first: ModeView, second: ModeView) -> ModeView:
    """Pointwise dotted product of two mode views over the same system."""
    if first.system != second.system:
        raise UsageError("product of modes over different systems")
    return ModeView(
        first.system,
        lambda configuration: dotted_product(first.at(configuration), second.at(configuration)),
    )


def successors(system: BooleanPSystem, mode: ModeView, configuration: StateSet):
    """Fired-set/result pairs at a configuration, in rule-id lexicographic order."""
    out = set()
    for fired in mode.at(configuration):
        out.add((fired, system._apply_unchecked(configuration, fired)))
    return tuple(sorted(out, key=lambda p: (tuple(sorted(p[0])), p[1].sort_key())))


def evolve(
    system: BooleanPSystem,
    mode: ModeView,
    start: StateSet,
    max_steps: int,
    breadth_cap=None,
) -> tuple[Trajectory, ...]:
    """All evolutions from `start`, each extended until `max_steps` or a dead end.

    A trajectory is flagged halting iff no rule is applicable at its last
    state; a dead end under the mode without that (an empty mode value at a
    non-halting state) just stops the branch.
    """
    if max_steps < 0:
        raise UsageError("max_steps must be non-negative")
    limit = DEFAULT_BREADTH_CAP if breadth_cap is None else breadth_cap
    done = []
    paths = [((start,), ())]
    for _ in range(max_steps):
        grown = []
        for states, labels in paths:
            succ = successors(system, mode, states[-1])
            if not succ:
                done.append((states, labels))
                continue
            for fired, nxt in succ:
                grown.append((states + (nxt,), labels + (fired,)))
        if len(grown) + len(done) > limit:
            partial = tuple(
                Trajectory(s, l, halting=system.is_halting(s[-1]))
                for s, l in done + grown
            )
            raise CapacityError(f"evolution breadth exceeded cap {limit}", partial=partial)
        if not grown:
            break
        paths = grown
    done.extend(paths)
    seen = {}
    for states, labels in done:
        seen.setdefault((states, labels), None)
    return tuple(
        Trajectory(states, labels, halting=system.is_halting(states[-1]))
        for states, labels in seen
    )


# --- composition ----------------------------------------------------------------


def _remap_rule(rule: Rule, table: VarTable, position_map) -> Rule:
    return Rule(
        rule.id,
        rule.lhs.remap(table, position_map),
        rule.rhs.remap(table, position_map),
        rule.guard.remap(table, position_map),
    )


def remap_system(system: BooleanPSystem, table: VarTable) -> BooleanPSystem:
    """Re-intern a system into a larger table containing all its names."""
    position_map = {
        i: table.position(name) for i, name in enumerate(system.table.names)
    }
    return BooleanPSystem(table, tuple(_remap_rule(r, table, position_map) for r in system.rules))


def union_systems(first: BooleanPSystem, second: BooleanPSystem) -> BooleanPSystem:
    """Union of alphabets and rules; shared names are merged positionally.

    A rule id occurring in both systems must name the same rule (same lhs
    and rhs, guards equal as truth tables); such duplicates are kept once.
    """
    merged, _map_a, _map_b = merge_tables(first.table, second.table)
    left = remap_system(first, merged)
    right = remap_system(second, merged)
    rules = list(left.rules)
    by_id = {r.id: r for r in rules}
    for rule in right.rules:
        other = by_id.get(rule.id)
        if other is None:
            by_id[rule.id] = rule
            rules.append(rule)
            continue
        same = (
            other.lhs == rule.lhs
            and other.rhs == rule.rhs
            and (other.guard == rule.guard or equivalent(other.guard, rule.guard))
        )
        if not same:
            raise ValidationError(f"rule id {rule.id!r} names two different rules")
    return BooleanPSystem(merged, tuple(rules))


# --- text format ----------------------------------------------------------------
#
#   alphabet a, b
#   r1: {a, b} -> {a} | 1
#   r2: {a} -> {} | !b
#   quasimode maxpar          # optional; or explicit `advise {r1, r2}` lines


_RULE_LINE_RE = re.compile(
    r"(?P<id>[A-Za-z0-9_]+)\s*:\s*(?P<lhs>\{[^}]*\})\s*->\s*(?P<rhs>\{[^}]*\})\s*(?:\|(?P<guard>.*))?$"
)


def _parse_name_set(table: VarTable, text: str, lineno, source) -> StateSet:
    try:
        return parse_state(table, text)
    except ParseError as exc:
        raise ParseError(exc.message, line=lineno, source=source) from None


def parse_system_text(text: str, source=None):
    """Parse a system file; returns ``(system, quasimode or None)``."""
    names = []
    rule_lines = []
    quasimode_name = None
    advised = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("alphabet "):
            names.extend(n.strip() for n in line[9:].split(",") if n.strip())
        elif line.startswith("quasimode "):
            quasimode_name = line[10:].strip()
        elif line.startswith("advise "):
            advised.append((line[7:].strip(), lineno))
        else:
            m = _RULE_LINE_RE.match(line)
            if m is None:
                raise ParseError(f"cannot read line {raw!r}", line=lineno, source=source)
            rule_lines.append((m, lineno))
    if not names:
        raise ParseError("no `alphabet` declaration found", source=source)
    try:
        table = VarTable(names)
    except ValidationError as exc:
        raise ParseError(str(exc), source=source) from None
    rules = []
    for m, lineno in rule_lines:
        lhs = _parse_name_set(table, m.group("lhs"), lineno, source)
        rhs = _parse_name_set(table, m.group("rhs"), lineno, source)
        guard_text = (m.group("guard") or "1").strip() or "1"
        try:
            guard = parse_formula(guard_text, table)
        except ParseError as exc:
            raise ParseError(exc.message, offset=exc.offset, line=lineno, source=source) from None
        rules.append(Rule(m.group("id"), lhs, rhs, guard))
    try:
        system = BooleanPSystem(table, tuple(rules))
    except ValidationError as exc:
        raise ParseError(str(exc), source=source) from None
    quasimode = None
    if advised:
        if quasimode_name is not None:
            raise ParseError("both a named quasimode and advise lines given", source=source)
        family = []
        for text_part, lineno in advised:
            inner = text_part.strip()
            if not (inner.startswith("{") and inner.endswith("}")):
                raise ParseError(f"advise needs a rule set literal, got {inner!r}",
                                 line=lineno, source=source)
            ids = [i.strip() for i in inner[1:-1].split(",") if i.strip()]
            family.append(frozenset(ids))
        quasimode = explicit_quasimode(family)
        try:
            quasimode.validate(system)
        except ValidationError as exc:
            raise ParseError(str(exc), source=source) from None
    elif quasimode_name is not None:
        try:
            quasimode = named_quasimode(quasimode_name, system)
        except UsageError as exc:
            raise ParseError(str(exc), source=source) from None
    return system, quasimode


def named_quasimode(name: str, system: BooleanPSystem) -> Quasimode:
    if name == "maxpar":
        return quasimode_maxpar(system)
    if name == "seq":
        return quasimode_seq(system)
    if name == "async":
        return quasimode_async(system)
    raise UsageError(f"unknown quasimode name {name!r} (expected maxpar, seq or async)")


def format_system_text(system: BooleanPSystem, quasimode: Quasimode | None = None) -> str:
    lines = ["alphabet " + ", ".join(system.table.names)]
    for rule in system.rules:
        lines.append(rule.text())
    if quasimode is not None:
        if quasimode.name in ("maxpar", "seq", "async"):
            lines.append(f"quasimode {quasimode.name}")
        else:
            for element in sorted(quasimode.elements(), key=lambda m: tuple(sorted(m))):
                lines.append("advise {" + ", ".join(sorted(element)) + "}")
    return "\n".join(lines) + "\n"
