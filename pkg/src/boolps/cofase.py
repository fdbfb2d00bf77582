"""Bounded search for control sequences driving a controlled network.

An instance asks for a sequence of controls such that, switching the
network from one control to the next, some trajectory leads from each
start state into the target set.  A phase (one control's tenure) may last
any number of steps, including zero by default; pass
``min_steps_per_phase=1`` for the stricter reading.

Two engines are provided.  The direct engine searches the phase graph:
for each control it precomputes the reflexive-transitive closure of the
selected network's step relation and runs a breadth-first search over
per-start frontier sets, returning a shortest sequence (ties broken by
canonical control order).  The second engine searches the composed
set-rewriting embedding of the instance and decodes the control sequence
from the control-symbol history; the two must agree, which is used as a
cross-check throughout the test suite.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass

from .bcn import (
    BooleanControlNetwork,
    Control,
    ControlSequence,
    apply_control,
    control_pair_names,
    enumerate_controls,
    glue_trajectories,
    parse_bcn_text,
)
from .bn import BooleanMode, BooleanNetwork, Trajectory, bn_step, named_mode
from .boolp import successors as boolp_successors
from .errors import CapacityError, ParseError, UsageError, ValidationError
from .formula import StateSet, VarTable, parse_state
from .limits import check_enumerable, var_cap
from .translate import bcn_to_composite


@dataclass(frozen=True)
class CoFaSeInstance:
    bcn: BooleanControlNetwork
    starts: tuple[StateSet, ...]
    targets: frozenset[StateSet]
    mode: BooleanMode

    def __post_init__(self):
        if not self.starts or not self.targets:
            raise ValidationError("need at least one start and one target state")
        for state in list(self.starts) + list(self.targets):
            if state.table != self.bcn.x_table:
                raise ValidationError("start/target state over a different table")
        if self.mode.table != self.bcn.x_table:
            raise ValidationError("mode over a different variable table")

    @classmethod
    def of(cls, bcn, starts, targets, mode) -> "CoFaSeInstance":
        ordered = sorted(set(starts), key=StateSet.sort_key)
        return cls(bcn, tuple(ordered), frozenset(targets), mode)


@dataclass(frozen=True)
class PhaseWitness:
    """Per start state: the sequence, the glued trajectory, and the indices
    (into the trajectory) at which the interior phase switches happen."""

    start: StateSet
    sequence: ControlSequence
    trajectory: Trajectory
    boundaries: tuple[int, ...]


@dataclass(frozen=True)
class CoFaSeSolution:
    policy: str
    witnesses: tuple[PhaseWitness, ...]

    def __bool__(self):
        return True

    @property
    def phases(self) -> int:
        return max(len(w.sequence) for w in self.witnesses)

    @property
    def sequence(self) -> ControlSequence:
        sequences = {w.sequence.controls for w in self.witnesses}
        if len(sequences) != 1:
            raise UsageError("per-start solution has no single shared sequence")
        return self.witnesses[0].sequence


@dataclass(frozen=True)
class NoSolutionWithinBound:
    phase_bound: int | None
    step_bound: int | None
    explored: int
    detail: str = ""

    def __bool__(self):
        return False

    @property
    def phases(self):
        return None


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    failed_step: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


# --- control space ------------------------------------------------------------


def control_space(bcn: BooleanControlNetwork, cap=None) -> list[Control]:
    """All controls in canonical order; falls back to the freeze-pair
    generator (none / pin-to-0 / pin-to-1 per pair) when the control
    alphabet is too large to enumerate fully."""
    try:
        return list(enumerate_controls(bcn.u_table, cap))
    except CapacityError:
        pass
    u_table = bcn.u_table
    names = set(u_table.names)
    pairs = []
    seen = set()
    for name in u_table.names:
        if name in seen:
            continue
        if not (name.startswith("u_") and name[-1] in "01"):
            raise CapacityError(
                f"{len(u_table)} control inputs exceed the cap {var_cap(cap)} and are "
                "not freeze pairs, so no reduced generator applies"
            )
        stem = name[2:-1]
        off, on = control_pair_names(stem)
        if off not in names or on not in names:
            raise CapacityError(f"control {name!r} lacks its freeze partner")
        seen.update((off, on))
        pairs.append((off, on))
    if 3 ** len(pairs) > 1 << var_cap(cap):
        raise CapacityError(
            f"{len(pairs)} freeze pairs still give {3 ** len(pairs)} controls"
        )
    controls = []

    def build(index, bits):
        if index == len(pairs):
            controls.append(Control(u_table.state(bits)))
            return
        off, on = pairs[index]
        build(index + 1, bits)
        build(index + 1, bits | 1 << u_table.position(off))
        build(index + 1, bits | 1 << u_table.position(on))

    build(0, 0)
    controls.sort(key=Control.sort_key)
    return controls


# --- phase relations ------------------------------------------------------------


def _step_map(network: BooleanNetwork, mode: BooleanMode, cap=None):
    """state -> tuple of (mode element, next state), canonically ordered."""
    check_enumerable(len(network.table), cap, "network")
    elements = mode.sorted_elements()
    out = {}
    for state in network.table.subsets():
        out[state] = tuple((m, bn_step(network, state, m)) for m in elements)
    return out


def _closure_from(step_map, source) -> frozenset:
    """States reachable from source in any number of steps, source included."""
    frontier = [source]
    seen = {source}
    while frontier:
        nxt = []
        for state in frontier:
            for _m, dst in step_map[state]:
                if dst not in seen:
                    seen.add(dst)
                    nxt.append(dst)
        frontier = nxt
    return frozenset(seen)


def _phase_reach(step_map, min_steps: int):
    """state -> states reachable within one phase (>= min_steps steps)."""
    closure = {source: _closure_from(step_map, source) for source in step_map}
    if min_steps == 0:
        return closure
    reach = {}
    for source in step_map:
        out = set()
        for _m, dst in step_map[source]:
            out |= closure[dst]
        reach[source] = frozenset(out)
    return reach


def _shortest_phase_path(step_map, source, target, min_steps: int) -> Trajectory:
    """Shortest labelled run from source to target inside one phase."""
    if min_steps == 0 and source == target:
        return Trajectory((source,), ())
    # breadth-first with >= 1 step: seed from the one-step successors, so a
    # path back to the source itself counts as a cycle, not as length zero
    parents = {}
    frontier = []
    for element, dst in step_map[source]:
        if dst not in parents:
            parents[dst] = (source, element)
            frontier.append(dst)
    while target not in parents and frontier:
        nxt = []
        for state in frontier:
            for element, dst in step_map[state]:
                if dst not in parents:
                    parents[dst] = (state, element)
                    nxt.append(dst)
        frontier = nxt
    if target not in parents:
        raise ValidationError("no path inside a phase; reachability bookkeeping broken")
    states = [target]
    labels = []
    cursor = target
    while True:
        prev, element = parents[cursor]
        states.insert(0, prev)
        labels.insert(0, element)
        if prev == source:
            break
        cursor = prev
    return Trajectory(tuple(states), tuple(labels))


# --- direct engine --------------------------------------------------------------


def _image(reach, states) -> frozenset:
    out = set()
    for state in states:
        out |= reach[state]
    return frozenset(out)


def solve_cofase(
    instance: CoFaSeInstance,
    max_phases: int,
    policy: str = "uniform",
    min_steps_per_phase: int = 0,
    cap=None,
):
    """Breadth-first search over phase graphs for a shortest control sequence.

    `uniform` finds one sequence that works for every start state (with an
    existential choice of trajectory per start); `per-start` allows a
    different sequence per start state.  Returns a CoFaSeSolution or a
    NoSolutionWithinBound carrying the explored bound.
    """
    if max_phases < 1:
        raise UsageError("max_phases must be at least 1")
    if policy not in ("uniform", "per-start"):
        raise UsageError(f"unknown policy {policy!r}")
    if min_steps_per_phase not in (0, 1):
        raise UsageError("min_steps_per_phase must be 0 or 1")
    check_enumerable(len(instance.bcn.x_table), cap, "state space")
    controls = control_space(instance.bcn, cap)
    step_maps = {}
    reach_maps = {}
    for control in controls:
        network = apply_control(instance.bcn, control)
        step_maps[control] = _step_map(network, instance.mode, cap)
        reach_maps[control] = _phase_reach(step_maps[control], min_steps_per_phase)

    if policy == "per-start":
        witnesses = []
        explored = 0
        for start in instance.starts:
            sub = CoFaSeInstance(instance.bcn, (start,), instance.targets, instance.mode)
            result = _solve_uniform(
                sub, controls, reach_maps, step_maps, max_phases, min_steps_per_phase
            )
            if not result:
                return NoSolutionWithinBound(
                    phase_bound=max_phases,
                    step_bound=None,
                    explored=explored + result.explored,
                    detail=f"no sequence for start {start.set_text()}",
                )
            explored += 1
            witnesses.extend(result.witnesses)
        return CoFaSeSolution(policy="per-start", witnesses=tuple(witnesses))

    return _solve_uniform(
        instance, controls, reach_maps, step_maps, max_phases, min_steps_per_phase
    )


def _solve_uniform(instance, controls, reach_maps, step_maps, max_phases, min_steps):
    targets = instance.targets
    initial = tuple(frozenset({start}) for start in instance.starts)
    visited = {initial}
    queue = [(initial, ())]
    depth = 0
    while queue and depth < max_phases:
        depth += 1
        next_queue = []
        for node, sequence in queue:
            for control in controls:
                successors = tuple(_image(reach_maps[control], comp) for comp in node)
                grown = sequence + (control,)
                if all(comp & targets for comp in successors):
                    return _build_solution(
                        instance, grown, reach_maps, step_maps, min_steps
                    )
                if successors not in visited:
                    visited.add(successors)
                    next_queue.append((successors, grown))
        queue = next_queue
    return NoSolutionWithinBound(
        phase_bound=max_phases, step_bound=None, explored=len(visited)
    )


def _build_solution(instance, sequence, reach_maps, step_maps, min_steps):
    witnesses = []
    for start in instance.starts:
        witnesses.append(
            _witness_for(start, sequence, instance.targets, reach_maps, step_maps, min_steps)
        )
    return CoFaSeSolution(policy="uniform", witnesses=tuple(witnesses))


def _witness_for(start, sequence, targets, reach_maps, step_maps, min_steps):
    frontiers = [frozenset({start})]
    for control in sequence:
        frontiers.append(_image(reach_maps[control], frontiers[-1]))
    final = sorted(frontiers[-1] & targets, key=StateSet.sort_key)[0]
    endpoints = [final]
    for i in reversed(range(len(sequence))):
        candidates = sorted(
            (s for s in frontiers[i] if endpoints[0] in reach_maps[sequence[i]][s]),
            key=StateSet.sort_key,
        )
        endpoints.insert(0, candidates[0])
    segments = []
    for i, control in enumerate(sequence):
        segments.append(
            _shortest_phase_path(step_maps[control], endpoints[i], endpoints[i + 1], min_steps)
        )
    trajectory = glue_trajectories(segments)
    boundaries = []
    at = 0
    for segment in segments[:-1]:
        at += len(segment.states) - 1
        boundaries.append(at)
    return PhaseWitness(
        start=start,
        sequence=ControlSequence(tuple(sequence)),
        trajectory=trajectory,
        boundaries=tuple(boundaries),
    )


# --- verification ----------------------------------------------------------------


def verify_control_sequence(
    bcn: BooleanControlNetwork,
    sequence: ControlSequence,
    mode: BooleanMode,
    witness: Trajectory,
    boundaries,
) -> VerificationResult:
    """Check a glued trajectory against a control sequence.

    `boundaries` are the interior split indices: phase i covers the states
    from boundary i-1 to boundary i (with 0 and the last index implied).
    Each step of phase i must be one step of the network selected by the
    i-th control under the mode.
    """
    boundaries = tuple(boundaries)
    if len(sequence) == 0:
        raise ValidationError("empty control sequence")
    if len(boundaries) != len(sequence) - 1:
        raise ValidationError(
            f"{len(sequence)} phases need {len(sequence) - 1} boundaries, "
            f"got {len(boundaries)}"
        )
    last = len(witness.states) - 1
    cuts = (0,) + boundaries + (last,)
    for left, right in zip(cuts, cuts[1:]):
        if not 0 <= left <= right <= last:
            raise ValidationError(f"boundaries {boundaries} do not partition the witness")
    for state in witness.states:
        if state.table != bcn.x_table:
            raise UsageError("witness state over a different variable table")
    elements = mode.sorted_elements()
    for i, control in enumerate(sequence):
        network = apply_control(bcn, control)
        for t in range(cuts[i], cuts[i + 1]):
            src, dst = witness.states[t], witness.states[t + 1]
            if not any(bn_step(network, src, m) == dst for m in elements):
                return VerificationResult(
                    ok=False,
                    failed_step=t,
                    reason=(
                        f"step {t}: {src.digits()} -> {dst.digits()} is not a move of "
                        f"the network under control {control.set_text()}"
                    ),
                )
    return VerificationResult(ok=True)


# --- composite engine --------------------------------------------------------------


def solve_cofase_via_composite(
    instance: CoFaSeInstance,
    max_steps: int,
    max_phases: int | None = None,
    cap=None,
):
    """Solve by searching the composed set-rewriting embedding.

    Runs a lexicographic Dijkstra over composite configurations with cost
    (control switches, steps), per start state, trying every initial
    control-symbol set; decodes the control sequence from the control
    symbols along the path, collapsing consecutive equal controls into
    phases.  Inherently per-start: with several starts each gets its own
    sequence.
    """
    check_enumerable(len(instance.bcn.table), cap, "composite state space")
    composite = bcn_to_composite(instance.bcn, instance.mode)
    mode_view = composite.mode_view()
    system = composite.system
    controls = control_space(instance.bcn, cap)
    witnesses = []
    explored = 0
    for start in instance.starts:
        found = None
        parents = {}
        best = {}
        counter = 0
        heap = []
        for control in controls:
            config = composite.initial_config(start, control)
            if config not in best or best[config] > (0, 0):
                best[config] = (0, 0)
                parents[config] = None
                heapq.heappush(heap, (0, 0, counter, config))
                counter += 1
        while heap:
            switches, steps, _tick, config = heapq.heappop(heap)
            if best.get(config, (-1, -1)) != (switches, steps):
                continue  # stale entry
            explored += 1
            if composite.project_x(config) in instance.targets:
                found = config
                break
            if steps >= max_steps:
                continue
            here = composite.project_u(config)
            for _fired, nxt in boolp_successors(system, mode_view, config):
                cost = (
                    switches + (composite.project_u(nxt) != here),
                    steps + 1,
                )
                if max_phases is not None and cost[0] > max_phases - 1:
                    continue
                if nxt not in best or cost < best[nxt]:
                    best[nxt] = cost
                    parents[nxt] = config
                    heapq.heappush(heap, (cost[0], cost[1], counter, nxt))
                    counter += 1
        if found is None:
            return NoSolutionWithinBound(
                phase_bound=max_phases,
                step_bound=max_steps,
                explored=explored,
                detail=f"no composite run for start {start.set_text()}",
            )
        witnesses.append(_decode_composite_run(composite, parents, found, start))
    return CoFaSeSolution(policy="per-start", witnesses=tuple(witnesses))


def _decode_composite_run(composite, parents, final, start) -> PhaseWitness:
    path = [final]
    while parents[path[0]] is not None:
        path.insert(0, parents[path[0]])
    states = tuple(composite.project_x(config) for config in path)
    if len(path) == 1:
        step_controls = [composite.project_u(path[0])]
    else:
        step_controls = [composite.project_u(config) for config in path[:-1]]
    controls = [step_controls[0]]
    boundaries = []
    for index, control in enumerate(step_controls[1:], start=1):
        if control != controls[-1]:
            controls.append(control)
            boundaries.append(index)
    return PhaseWitness(
        start=start,
        sequence=ControlSequence(tuple(controls)),
        trajectory=Trajectory(states),
        boundaries=tuple(boundaries),
    )


# --- instance files and solution JSON ------------------------------------------------


def _parse_state_list(table: VarTable, text: str) -> list[StateSet]:
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        inner = text[1:-1].strip()
        if inner.startswith("{"):
            # list of brace sets: {{x}, {x,y}}
            parts = []
            depth = 0
            current = ""
            for char in inner:
                if char == "{":
                    depth += 1
                if char == "}":
                    depth -= 1
                if char == "," and depth == 0:
                    parts.append(current)
                    current = ""
                else:
                    current += char
            if current.strip():
                parts.append(current)
            return [parse_state(table, p.strip()) for p in parts]
        items = [p.strip() for p in inner.split(",") if p.strip()]
        if items and all(all(c in "01" for c in item) for item in items):
            return [parse_state(table, item) for item in items]
        # a single set literal such as {x, y}
        return [parse_state(table, text)]
    return [parse_state(table, p.strip()) for p in text.split(",") if p.strip()]


def parse_instance_text(text: str, source=None) -> CoFaSeInstance:
    """Instance file: a control-network block plus start/target/mode lines."""
    bcn_lines = []
    start_text = None
    target_text = None
    mode_name = "syn"
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line.startswith("start "):
            start_text = line[6:].strip()
        elif line.startswith("target "):
            target_text = line[7:].strip()
        elif line.startswith("mode "):
            mode_name = line[5:].strip()
        else:
            bcn_lines.append(raw)
    bcn = parse_bcn_text("\n".join(bcn_lines), source=source)
    if start_text is None or target_text is None:
        raise ParseError("instance needs `start` and `target` lines", source=source)
    try:
        starts = _parse_state_list(bcn.x_table, start_text)
        targets = _parse_state_list(bcn.x_table, target_text)
        mode = named_mode(mode_name, bcn.x_table)
    except (UsageError, ValidationError) as exc:
        raise ParseError(str(exc), source=source) from None
    return CoFaSeInstance.of(bcn, starts, targets, mode)


def solution_to_json(result) -> str:
    if not result:
        return json.dumps(
            {
                "solvable": False,
                "phase_bound": result.phase_bound,
                "step_bound": result.step_bound,
                "explored": result.explored,
                "detail": result.detail,
            },
            indent=2,
        )
    doc = {"solvable": True, "policy": result.policy, "phases": result.phases,
           "witnesses": []}
    for witness in result.witnesses:
        doc["witnesses"].append(
            {
                "start": witness.start.digits(),
                "controls": [sorted(c.names()) for c in witness.sequence],
                "states": [s.digits() for s in witness.trajectory.states],
                "boundaries": list(witness.boundaries),
            }
        )
    return json.dumps(doc, indent=2)


def solution_from_json(instance: CoFaSeInstance, text: str) -> CoFaSeSolution:
    doc = json.loads(text)
    if not doc.get("solvable", False):
        raise ValidationError("solution document says the instance is unsolvable")
    witnesses = []
    for entry in doc["witnesses"]:
        sequence = ControlSequence(
            tuple(
                Control(StateSet.of(instance.bcn.u_table, names))
                for names in entry["controls"]
            )
        )
        states = tuple(
            StateSet.from_digits(instance.bcn.x_table, s) for s in entry["states"]
        )
        witnesses.append(
            PhaseWitness(
                start=StateSet.from_digits(instance.bcn.x_table, entry["start"]),
                sequence=sequence,
                trajectory=Trajectory(states),
                boundaries=tuple(entry["boundaries"]),
            )
        )
    return CoFaSeSolution(policy=doc.get("policy", "uniform"), witnesses=tuple(witnesses))
