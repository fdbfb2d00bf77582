"""Propositional formulas over an interned variable table.

Variables are interned once per model into a :class:`VarTable`; subsets of
the table double as Boolean states via their indicator functions
(:class:`StateSet`).  Formulas are immutable ASTs evaluated against such
subsets.  Everything here is pure and hashable, so values can be shared
freely and used as dict keys.

The concrete grammar for formulas is::

    disj  := conj ('|' conj)*
    conj  := unary ('&' unary)*
    unary := '!' unary | atom
    atom  := '(' disj ')' | '0' | '1' | identifier

with precedence ``!`` > ``&`` > ``|``.  Serialization emits the same
grammar with parentheses only where needed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import ParseError, UsageError, ValidationError
from .limits import check_enumerable

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class VarTable:
    """Ordered, interned alphabet of distinct variable names.

    Positions are assigned in declaration order and never change; all
    subsets and formulas over the table address variables by position.
    """

    __slots__ = ("names", "_index", "_hash", "_states")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        index = {}
        for pos, name in enumerate(names):
            if not name or not _IDENT_RE.fullmatch(name):
                raise ValidationError(f"invalid variable name {name!r}")
            if name in index:
                raise ValidationError(f"duplicate variable name {name!r}")
            index[name] = pos
        self.names = names
        self._index = index
        self._hash = hash(names)
        self._states = {}  # bits -> StateSet, interned lazily

    @classmethod
    def of(cls, *names: str) -> "VarTable":
        return cls(names)

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        return isinstance(other, VarTable) and self.names == other.names

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"VarTable({', '.join(self.names)})"

    def position(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UsageError(f"unknown variable {name!r}") from None

    def name(self, position: int) -> str:
        return self.names[position]

    def state(self, bits: int) -> "StateSet":
        """Interned StateSet for a bit pattern (bit i set = variable i present)."""
        got = self._states.get(bits)
        if got is None:
            got = StateSet(self, bits)
            self._states[bits] = got
        return got

    def subsets(self) -> Iterator["StateSet"]:
        """All 2**n subsets in ascending bit order.  Callers enforce caps."""
        for bits in range(1 << len(self.names)):
            yield self.state(bits)


def merge_tables(a: VarTable, b: VarTable):
    """Merge two tables by name.

    Returns ``(merged, map_a, map_b)`` where the maps send old positions to
    positions in the merged table.  Names of `a` keep their order; names
    only in `b` follow in `b`'s order.
    """
    names = list(a.names)
    for name in b.names:
        if name not in a:
            names.append(name)
    merged = VarTable(names)
    map_a = {i: merged.position(n) for i, n in enumerate(a.names)}
    map_b = {i: merged.position(n) for i, n in enumerate(b.names)}
    return merged, map_a, map_b


class StateSet:
    """Subset of a VarTable, read as the indicator function of a Boolean state.

    `bits` has bit ``i`` set iff variable ``i`` is a member.  The canonical
    display order puts the lowest-position variable first, so the digit
    string of ``{y}`` over ``(x, y)`` is ``01``.
    """

    __slots__ = ("table", "bits", "_hash", "_digits")

    def __init__(self, table: VarTable, bits: int):
        if bits < 0 or bits >> len(table):
            raise ValidationError(f"bit pattern {bits:#x} out of range for {table!r}")
        self.table = table
        self.bits = bits
        self._hash = table._hash ^ hash(bits)
        self._digits = None

    @classmethod
    def of(cls, table: VarTable, names: Iterable[str] = ()) -> "StateSet":
        bits = 0
        for name in names:
            bits |= 1 << table.position(name)
        return table.state(bits)

    @classmethod
    def empty(cls, table: VarTable) -> "StateSet":
        return table.state(0)

    @classmethod
    def full(cls, table: VarTable) -> "StateSet":
        return table.state((1 << len(table)) - 1)

    @classmethod
    def from_digits(cls, table: VarTable, text: str) -> "StateSet":
        if len(text) != len(table) or any(c not in "01" for c in text):
            raise ValidationError(
                f"digit state {text!r} does not match table of {len(table)} variables"
            )
        bits = 0
        for pos, c in enumerate(text):
            if c == "1":
                bits |= 1 << pos
        return table.state(bits)

    def _check(self, other: "StateSet"):
        if self.table != other.table:
            raise UsageError("state sets belong to different variable tables")

    def __eq__(self, other):
        return (
            isinstance(other, StateSet)
            and self.bits == other.bits
            and self.table == other.table
        )

    def __hash__(self):
        return self._hash

    def __len__(self):
        return bin(self.bits).count("1")

    def __iter__(self):
        for pos, name in enumerate(self.table.names):
            if self.bits >> pos & 1:
                yield name

    def __contains__(self, name):
        return bool(self.bits >> self.table.position(name) & 1)

    def __or__(self, other):
        self._check(other)
        return self.table.state(self.bits | other.bits)

    def __and__(self, other):
        self._check(other)
        return self.table.state(self.bits & other.bits)

    def __sub__(self, other):
        self._check(other)
        return self.table.state(self.bits & ~other.bits)

    def __le__(self, other):
        self._check(other)
        return self.bits & ~other.bits == 0

    def value(self, name: str) -> bool:
        """Indicator reading: 1 iff the variable is a member."""
        return name in self

    def names(self) -> tuple[str, ...]:
        return tuple(self)

    def digits(self) -> str:
        if self._digits is None:
            self._digits = "".join(
                "1" if self.bits >> p & 1 else "0" for p in range(len(self.table))
            )
        return self._digits

    def set_text(self) -> str:
        return "{" + ", ".join(self) + "}"

    def sort_key(self):
        # lowest position = most significant digit, matching digit display
        return self.digits()

    def remap(self, table: VarTable, position_map: Mapping[int, int]) -> "StateSet":
        bits = 0
        for pos in range(len(self.table)):
            if self.bits >> pos & 1:
                bits |= 1 << position_map[pos]
        return table.state(bits)

    def __repr__(self):
        return f"StateSet({self.set_text()})"

    def __str__(self):
        return self.set_text()


def parse_state(table: VarTable, text: str) -> StateSet:
    """Parse a state literal, either digit notation `01` or set notation `{a,b}`."""
    text = text.strip()
    if text.startswith("{"):
        if not text.endswith("}"):
            raise ParseError(f"unterminated set literal {text!r}")
        inner = text[1:-1].strip()
        names = [n.strip() for n in inner.split(",")] if inner else []
        try:
            return StateSet.of(table, names)
        except UsageError as exc:
            raise ParseError(str(exc)) from None
    if text and all(c in "01" for c in text):
        try:
            return StateSet.from_digits(table, text)
        except ValidationError as exc:
            raise ParseError(str(exc)) from None
    raise ParseError(f"cannot read state literal {text!r}")


# --- formula AST ------------------------------------------------------------


class Node:
    """Marker base class for AST nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(Node):
    value: bool


@dataclass(frozen=True)
class Var(Node):
    position: int


@dataclass(frozen=True)
class Not(Node):
    child: Node


@dataclass(frozen=True)
class And(Node):
    children: tuple[Node, ...]


@dataclass(frozen=True)
class Or(Node):
    children: tuple[Node, ...]


CONST0 = Const(False)
CONST1 = Const(True)


def _check_positions(node: Node, size: int):
    if isinstance(node, Var):
        if not 0 <= node.position < size:
            raise ValidationError(f"variable position {node.position} out of range")
    elif isinstance(node, Not):
        _check_positions(node.child, size)
    elif isinstance(node, (And, Or)):
        for child in node.children:
            _check_positions(child, size)
    elif not isinstance(node, Const):
        raise ValidationError(f"unknown formula node {node!r}")


def _eval_node(node: Node, bits: int) -> bool:
    if isinstance(node, Var):
        return bool(bits >> node.position & 1)
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Not):
        return not _eval_node(node.child, bits)
    if isinstance(node, And):
        return all(_eval_node(c, bits) for c in node.children)
    return any(_eval_node(c, bits) for c in node.children)


def _vars_of(node: Node, acc: set):
    if isinstance(node, Var):
        acc.add(node.position)
    elif isinstance(node, Not):
        _vars_of(node.child, acc)
    elif isinstance(node, (And, Or)):
        for child in node.children:
            _vars_of(child, acc)


# folded smart constructors, used by substitution and the construction helpers

def _not(node: Node) -> Node:
    if isinstance(node, Const):
        return CONST0 if node.value else CONST1
    if isinstance(node, Not):
        return node.child
    return Not(node)


def _nary(cls, absorbing: Const, neutral: Const, nodes) -> Node:
    flat = []
    seen = set()
    for node in nodes:
        if isinstance(node, cls):
            inner = node.children
        else:
            inner = (node,)
        for child in inner:
            if child == absorbing:
                return absorbing
            if child == neutral or child in seen:
                continue
            seen.add(child)
            flat.append(child)
    if not flat:
        return neutral
    if len(flat) == 1:
        return flat[0]
    return cls(tuple(flat))


def _and(nodes) -> Node:
    return _nary(And, CONST0, CONST1, nodes)


def _or(nodes) -> Node:
    return _nary(Or, CONST1, CONST0, nodes)


@dataclass(frozen=True)
class Formula:
    """A propositional formula tied to the table its variables live in."""

    table: VarTable
    root: Node

    def __post_init__(self):
        _check_positions(self.root, len(self.table))

    # -- constructors

    @classmethod
    def const(cls, table: VarTable, value) -> "Formula":
        return cls(table, CONST1 if value else CONST0)

    @classmethod
    def var(cls, table: VarTable, name: str) -> "Formula":
        return cls(table, Var(table.position(name)))

    # -- combinators (constant-folding, flattening)

    def negate(self) -> "Formula":
        return Formula(self.table, _not(self.root))

    def _align(self, others):
        for other in others:
            if other.table != self.table:
                raise UsageError("formulas belong to different variable tables")
        return [self.root] + [o.root for o in others]

    def conj(self, *others: "Formula") -> "Formula":
        return Formula(self.table, _and(self._align(others)))

    def disj(self, *others: "Formula") -> "Formula":
        return Formula(self.table, _or(self._align(others)))

    # -- semantics

    def evaluate(self, state: StateSet) -> bool:
        """Truth value at `state`: members read 1, non-members read 0."""
        if state.table != self.table:
            raise UsageError("formula and state belong to different variable tables")
        return _eval_node(self.root, state.bits)

    def variables(self) -> frozenset[str]:
        """Names actually mentioned by the formula."""
        acc: set = set()
        _vars_of(self.root, acc)
        return frozenset(self.table.name(p) for p in acc)

    def substitute(self, values: Mapping[str, bool]) -> "Formula":
        """Replace variables by constants and fold the result."""
        positions = {self.table.position(n): bool(v) for n, v in values.items()}

        def rec(node: Node) -> Node:
            if isinstance(node, Var):
                if node.position in positions:
                    return CONST1 if positions[node.position] else CONST0
                return node
            if isinstance(node, Const):
                return node
            if isinstance(node, Not):
                return _not(rec(node.child))
            if isinstance(node, And):
                return _and(rec(c) for c in node.children)
            return _or(rec(c) for c in node.children)

        return Formula(self.table, rec(self.root))

    def remap(self, table: VarTable, position_map: Mapping[int, int]) -> "Formula":
        """Re-intern into another table via a position-to-position map."""

        def rec(node: Node) -> Node:
            if isinstance(node, Var):
                return Var(position_map[node.position])
            if isinstance(node, Const):
                return node
            if isinstance(node, Not):
                return Not(rec(node.child))
            if isinstance(node, And):
                return And(tuple(rec(c) for c in node.children))
            return Or(tuple(rec(c) for c in node.children))

        return Formula(table, rec(self.root))

    # -- text form

    def to_text(self) -> str:
        """Canonical text: `!`, `&`, `|`, parentheses only where precedence needs them."""
        return _render(self.root, self.table.names, 0)

    def __str__(self):
        return self.to_text()


_PREC = {Or: 1, And: 2, Not: 3, Var: 4, Const: 4}


def _render(node: Node, names: tuple[str, ...], required: int) -> str:
    prec = _PREC[type(node)]
    if isinstance(node, Const):
        text = "1" if node.value else "0"
    elif isinstance(node, Var):
        text = names[node.position]
    elif isinstance(node, Not):
        text = "!" + _render(node.child, names, 3)
    elif isinstance(node, And):
        text = " & ".join(_render(c, names, 3) for c in node.children)
    else:
        text = " | ".join(_render(c, names, 2) for c in node.children)
    if prec < required:
        return "(" + text + ")"
    return text


# --- parsing ----------------------------------------------------------------

_TOKEN_RE = re.compile(r"(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[!&|()01])")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", offset=pos)
        if m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append((m.group("op"), m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, table: VarTable):
        self.text = text
        self.table = table
        self.tokens = _tokenize(text)
        self.at = 0

    def peek(self):
        return self.tokens[self.at]

    def advance(self):
        token = self.tokens[self.at]
        self.at += 1
        return token

    def expect(self, kind: str):
        token = self.advance()
        if token[0] != kind:
            raise ParseError(
                f"expected {kind!r}, found {token[1] or 'end of input'!r}",
                offset=token[2],
            )
        return token

    def parse(self) -> Node:
        node = self.disj()
        token = self.peek()
        if token[0] != "end":
            raise ParseError(f"trailing input {token[1]!r}", offset=token[2])
        return node

    def disj(self) -> Node:
        parts = [self.conj()]
        while self.peek()[0] == "|":
            self.advance()
            parts.append(self.conj())
        if len(parts) == 1:
            return parts[0]
        flat = []
        for part in parts:  # keep chains n-ary and flat
            flat.extend(part.children if isinstance(part, Or) else (part,))
        return Or(tuple(flat))

    def conj(self) -> Node:
        parts = [self.unary()]
        while self.peek()[0] == "&":
            self.advance()
            parts.append(self.unary())
        if len(parts) == 1:
            return parts[0]
        flat = []
        for part in parts:
            flat.extend(part.children if isinstance(part, And) else (part,))
        return And(tuple(flat))

    def unary(self) -> Node:
        token = self.peek()
        if token[0] == "!":
            self.advance()
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Node:
        token = self.advance()
        kind, text, offset = token
        if kind == "(":
            node = self.disj()
            self.expect(")")
            return node
        if kind == "0":
            return CONST0
        if kind == "1":
            return CONST1
        if kind == "ident":
            if text not in self.table:
                raise ParseError(f"unknown identifier {text!r}", offset=offset)
            return Var(self.table.position(text))
        raise ParseError(
            f"expected a formula, found {text or 'end of input'!r}", offset=offset
        )


def parse_formula(text: str, table: VarTable) -> Formula:
    """Parse a formula over `table`; syntax errors carry a byte offset."""
    return Formula(table, _Parser(text, table).parse())


# --- exhaustive semantics ---------------------------------------------------


def truth_bitmask(formula: Formula, cap=None) -> int:
    """Bitmask over all 2**n states: bit `b` set iff the state with bits `b` satisfies."""
    n = check_enumerable(len(formula.table), cap, "formula table")
    mask = 0
    root = formula.root
    for bits in range(1 << n):
        if _eval_node(root, bits):
            mask |= 1 << bits
    return mask


def satisfying_sets(formula: Formula, cap=None) -> frozenset[StateSet]:
    """All subsets of the table satisfying the formula, by exhaustive enumeration."""
    n = check_enumerable(len(formula.table), cap, "formula table")
    table = formula.table
    root = formula.root
    return frozenset(
        table.state(bits) for bits in range(1 << n) if _eval_node(root, bits)
    )


def equivalent(a: Formula, b: Formula, cap=None) -> bool:
    """Truth-table equality of two formulas over the same table."""
    if a.table != b.table:
        raise UsageError("formulas belong to different variable tables")
    return truth_bitmask(a, cap) == truth_bitmask(b, cap)
