import random

import pytest

from boolps.bcn import Control, freeze_extend
from boolps.bn import BooleanMode, BooleanNetwork
from boolps.boolp import derive_mode, successors
from boolps.errors import ValidationError
from boolps.formula import Formula, StateSet, VarTable, equivalent, parse_formula
from boolps.translate import (
    Reaction,
    ReactionSystem,
    bcn_to_composite,
    bn_mode_to_quasimode,
    bn_to_boolp,
    format_composite_text,
    format_reactions_text,
    parse_composite_text,
    parse_reactions_text,
    piU_acs,
    quasimode_tcs,
    rs_to_boolp,
)


@pytest.fixture
def toggle():
    t = VarTable.of("x", "y")
    return BooleanNetwork(t, (parse_formula("!x & y", t), parse_formula("x & !y", t)))


class TestNetworkEncoding:
    def test_rule_pairs(self, toggle):
        system = bn_to_boolp(toggle)
        assert {r.id for r in system.rules} == {"set_x", "clr_x", "set_y", "clr_y"}
        t = system.table
        set_x = system.rule("set_x")
        assert set_x.lhs == StateSet.empty(t)
        assert set_x.rhs == StateSet.of(t, ["x"])
        assert equivalent(set_x.guard, parse_formula("!x & y", t))
        clr_x = system.rule("clr_x")
        assert clr_x.lhs == StateSet.of(t, ["x"])
        assert clr_x.rhs == StateSet.empty(t)
        assert equivalent(clr_x.guard, parse_formula("!(!x & y)", t))

    def test_constant_one_never_erases(self):
        t = VarTable.of("a")
        network = BooleanNetwork(t, (Formula.const(t, True),))
        system = bn_to_boolp(network)
        for state in t.subsets():
            assert not system.rule("clr_a").applicable_to(state)

    def test_applicable_rules_at_full_state(self, toggle):
        # guards at x=1, y=1: both updates are 0, so only the erase rules fire
        system = bn_to_boolp(toggle)
        full = StateSet.full(system.table)
        assert system.applicable_rules(full) == {"clr_x", "clr_y"}


class TestModeToQuasimode:
    def test_synchronous(self, toggle):
        system = bn_to_boolp(toggle)
        quasimode = bn_mode_to_quasimode(BooleanMode.syn(toggle.table), system)
        assert set(quasimode.elements()) == {
            frozenset({"set_x", "clr_x", "set_y", "clr_y"})
        }

    def test_asynchronous(self, toggle):
        system = bn_to_boolp(toggle)
        quasimode = bn_mode_to_quasimode(BooleanMode.asyn(toggle.table), system)
        assert set(quasimode.elements()) == {
            frozenset({"set_x", "clr_x"}),
            frozenset({"set_y", "clr_y"}),
        }

    def test_empty_mode(self, toggle):
        system = bn_to_boolp(toggle)
        mode = BooleanMode(toggle.table, frozenset())
        assert set(bn_mode_to_quasimode(mode, system).elements()) == set()


class TestComposite:
    def test_shape(self, toggle):
        composite = bcn_to_composite(freeze_extend(toggle), BooleanMode.syn(toggle.table))
        assert composite.system.table.names == ("x", "y", "u_x0", "u_x1", "u_y0", "u_y1")
        assert len(composite.pi_u.rules) == 8  # erase + introduce per control symbol
        assert all(
            r.guard.evaluate(state)
            for r in composite.pi_u.rules
            for state in composite.pi_u.table.subsets()
        )

    def test_no_controls_degenerates_to_plain_encoding(self, toggle):
        empty = VarTable(())
        from boolps.bcn import BooleanControlNetwork

        bcn = BooleanControlNetwork.build(toggle.table, empty, toggle.updates)
        composite = bcn_to_composite(bcn, BooleanMode.syn(toggle.table))
        plain = bn_to_boolp(toggle)
        assert composite.system == plain
        assert set(composite.control_quasimode.elements()) == {frozenset()}

    def test_replays_the_three_phase_trajectory(self, toggle):
        # the controller introduces the next phase's control symbols during
        # the step before they take effect; the driven walk visits
        # 01 -> 10 -> 01 -> 00 -> 00 -> 01 -> 11 on the variables
        composite = bcn_to_composite(freeze_extend(toggle), BooleanMode.syn(toggle.table))
        view = composite.mode_view()
        t = toggle.table
        u = composite.u_table

        def config(digits, controls):
            return composite.initial_config(
                StateSet.from_digits(t, digits), Control(StateSet.of(u, controls))
            )

        walk = [
            config("01", []),
            config("10", []),
            config("01", ["u_x0"]),
            config("00", ["u_x0"]),
            config("00", ["u_y1"]),
            config("01", ["u_y1"]),
            config("11", []),
        ]
        for here, there in zip(walk, walk[1:]):
            reached = {nxt for _fired, nxt in successors(composite.system, view, here)}
            assert there in reached

    def test_projections(self, toggle):
        composite = bcn_to_composite(freeze_extend(toggle), BooleanMode.syn(toggle.table))
        config = composite.initial_config(
            StateSet.from_digits(toggle.table, "10"),
            Control(StateSet.of(composite.u_table, ["u_y1"])),
        )
        assert composite.project_x(config).digits() == "10"
        assert composite.project_u(config).names() == ("u_y1",)


class TestTotalControl:
    def test_two_pairs_give_four_choices(self, toggle):
        composite = bcn_to_composite(freeze_extend(toggle), BooleanMode.syn(toggle.table))
        tcs = quasimode_tcs(composite)
        elements = set(tcs.elements())
        assert len(elements) == 4
        erasers = frozenset(f"u_clr_{n}" for n in composite.u_table.names)
        for element in elements:
            assert erasers <= element
            for stem in ("x", "y"):
                setters = element & {f"u_set_u_{stem}0", f"u_set_u_{stem}1"}
                assert len(setters) == 1

    def test_no_pairs(self, toggle):
        from boolps.bcn import BooleanControlNetwork

        bcn = BooleanControlNetwork.build(toggle.table, VarTable(()), toggle.updates)
        composite = bcn_to_composite(bcn, BooleanMode.syn(toggle.table))
        assert set(quasimode_tcs(composite).elements()) == {frozenset()}

    def test_total_choices_are_among_free_ones(self, toggle):
        composite = bcn_to_composite(freeze_extend(toggle), BooleanMode.syn(toggle.table))
        free = set(composite.control_quasimode.elements())
        assert set(quasimode_tcs(composite).elements()) <= free

    def test_unpaired_controls_rejected(self, toggle):
        from boolps.bcn import BooleanControlNetwork

        bcn = BooleanControlNetwork.build(
            toggle.table,
            VarTable.of("k"),
            tuple(
                f.remap(VarTable.of("x", "y", "k"), {0: 0, 1: 1})
                for f in toggle.updates
            ),
        )
        composite = bcn_to_composite(bcn, BooleanMode.syn(toggle.table))
        with pytest.raises(ValidationError):
            quasimode_tcs(composite)


class TestAbidingControl:
    @pytest.fixture
    def pair_table(self):
        return VarTable.of("u_x0", "u_x1")

    def test_rule_inventory(self, pair_table):
        system, quasimode = piU_acs(pair_table)
        ids = {r.id for r in system.rules}
        assert ids == {
            "u_set_u_x0",
            "u_set_u_x1",
            "u_rw_u_x0_u_x0",
            "u_rw_u_x0_u_x1",
            "u_rw_u_x1_u_x0",
            "u_rw_u_x1_u_x1",
        }
        assert quasimode.size_hint() == 2 ** 6

    def test_polarity_switch(self, pair_table):
        system, _ = piU_acs(pair_table)
        start = StateSet.of(pair_table, ["u_x0"])
        assert system.apply_rule_set(start, {"u_rw_u_x0_u_x1"}) == StateSet.of(
            pair_table, ["u_x1"]
        )

    def test_identity_rewrite_is_noop(self, pair_table):
        system, _ = piU_acs(pair_table)
        start = StateSet.of(pair_table, ["u_x0"])
        assert system.apply_rule_set(start, {"u_rw_u_x0_u_x0"}) == start

    def test_controlled_variables_never_released(self):
        # exhaustive over two pairs: wherever a pair has a symbol, every
        # successor keeps some symbol of that pair
        table = VarTable.of("u_x0", "u_x1", "u_y0", "u_y1")
        system, quasimode = piU_acs(table)
        view = derive_mode(system, quasimode)
        pairs = [("u_x0", "u_x1"), ("u_y0", "u_y1")]
        for state in table.subsets():
            held = [p for p in pairs if p[0] in state or p[1] in state]
            for _fired, nxt in successors(system, view, state):
                for off, on in held:
                    assert off in nxt or on in nxt


class TestRegimeDynamics:
    @pytest.fixture
    def one_var(self):
        t = VarTable.of("x")
        return BooleanNetwork(t, (parse_formula("!x", t),))

    def test_tcs_keeps_exactly_one_symbol_per_pair(self, one_var):
        composite = bcn_to_composite(
            freeze_extend(one_var), BooleanMode.syn(one_var.table), regime="tcs"
        )
        view = composite.mode_view()
        table = composite.system.table
        for config in table.subsets():
            for _fired, nxt in successors(composite.system, view, config):
                assert len({"u_x0", "u_x1"} & set(nxt)) == 1

    def test_acs_never_releases_a_controlled_variable(self, one_var):
        composite = bcn_to_composite(
            freeze_extend(one_var), BooleanMode.syn(one_var.table), regime="acs"
        )
        view = composite.mode_view()
        table = composite.system.table
        for config in table.subsets():
            controlled = bool({"u_x0", "u_x1"} & set(config))
            for _fired, nxt in successors(composite.system, view, config):
                if controlled:
                    assert {"u_x0", "u_x1"} & set(nxt)

    def test_free_regime_can_release(self, one_var):
        composite = bcn_to_composite(
            freeze_extend(one_var), BooleanMode.syn(one_var.table), regime="free"
        )
        view = composite.mode_view()
        table = composite.system.table
        config = StateSet.of(table, ["u_x0"])
        released = {
            nxt for _f, nxt in successors(composite.system, view, config)
            if not {"u_x0", "u_x1"} & set(nxt)
        }
        assert released


def reaction_oracle(rs, state):
    """Independent result function: union of products of enabled reactions."""
    out = StateSet.empty(rs.table)
    for reaction in rs.reactions:
        if reaction.reactants <= state and not (reaction.inhibitors & state).bits:
            out = out | reaction.products
    return out


class TestReactionEmbedding:
    @pytest.fixture
    def loop(self):
        text = (
            "species a, b, c\n"
            "a1: reactants {a} inhibitors {c} products {b}\n"
            "a2: reactants {b} inhibitors {} products {a, c}\n"
        )
        return parse_reactions_text(text)

    def test_one_step_equals_result_function(self, loop):
        system, view = rs_to_boolp(loop)
        for state in loop.table.subsets():
            steps = successors(system, view, state)
            got = steps[0][1] if steps else state
            assert got == reaction_oracle(loop, state)

    def test_nothing_enabled_erases_everything(self, loop):
        system, view = rs_to_boolp(loop)
        state = StateSet.of(loop.table, ["a", "c"])  # a1 inhibited by c, a2 lacks b
        assert reaction_oracle(loop, state) == StateSet.empty(loop.table)
        ((fired, nxt),) = successors(system, view, state)
        assert nxt == StateSet.empty(loop.table)
        assert fired == {"deg_a", "deg_c"}

    def test_empty_state_halts_when_reactions_need_reactants(self, loop):
        system, _view = rs_to_boolp(loop)
        assert system.is_halting(StateSet.empty(loop.table))

    def test_reactant_free_reaction_fires_at_empty_state(self):
        rs = ReactionSystem(
            VarTable.of("a"),
            (
                Reaction(
                    "spawn",
                    StateSet.empty(VarTable.of("a")),
                    StateSet.empty(VarTable.of("a")),
                    StateSet.of(VarTable.of("a"), ["a"]),
                ),
            ),
        )
        system, view = rs_to_boolp(rs)
        state = StateSet.empty(rs.table)
        assert not system.is_halting(state)
        ((_, nxt),) = successors(system, view, state)
        assert nxt == reaction_oracle(rs, state)

    def test_overlapping_reactant_inhibitor_rejected(self):
        t = VarTable.of("a")
        a = StateSet.of(t, ["a"])
        with pytest.raises(ValidationError):
            ReactionSystem(t, (Reaction("bad", a, a, a),))
        kept = ReactionSystem(t, (Reaction("bad", a, a, a),), allow_degenerate=True)
        system, view = rs_to_boolp(kept)
        for state in t.subsets():
            assert not system.rule("bad").applicable_to(state)

    def test_random_small_systems_against_oracle(self):
        from boolps.generators import random_reaction_system

        rng = random.Random(71)
        for _ in range(20):
            rs = random_reaction_system(rng, rng.randint(1, 4))
            system, view = rs_to_boolp(rs)
            for state in rs.table.subsets():
                steps = successors(system, view, state)
                got = steps[0][1] if steps else state
                assert got == reaction_oracle(rs, state)

    def test_text_round_trip(self, loop):
        text = format_reactions_text(loop)
        again = parse_reactions_text(text)
        assert again == loop


class TestCompositeDump:
    def test_round_trip(self, toggle):
        composite = bcn_to_composite(freeze_extend(toggle), BooleanMode.asyn(toggle.table))
        text = format_composite_text(composite)
        again = parse_composite_text(text)
        assert format_composite_text(again) == text
        assert again.system == composite.system
        assert again.mode == composite.mode

    def test_custom_mode_round_trip(self, toggle):
        mode = BooleanMode.of(toggle.table, [["x"], []])
        composite = bcn_to_composite(freeze_extend(toggle), mode)
        text = format_composite_text(composite)
        assert parse_composite_text(text).mode == mode

    def test_regimes_round_trip(self, toggle):
        for regime in ("free", "tcs", "acs"):
            composite = bcn_to_composite(
                freeze_extend(toggle), BooleanMode.syn(toggle.table), regime=regime
            )
            again = parse_composite_text(format_composite_text(composite))
            assert again.regime == regime
            assert again.system == composite.system
