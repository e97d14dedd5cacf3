import itertools
import random
from fractions import Fraction

import pytest

from quantmon import domain as dom
from quantmon import machine as mc
from quantmon import qprop as qp
from quantmon.errors import MachineError
from quantmon.trace import (Alphabet, FiniteTrace, all_finite_traces, all_lassos,
                            lasso, parse_finite, parse_lasso, random_finite_trace)
from quantmon.verdict import (LimitBudget, Monotonicity, check_monotone, eval_liminf,
                              eval_limsup, verdict_sequence)

SMALL = LimitBudget(max_loop_iterations=48)
FIG = "req ack req other ack req ack other"


class TestValidation:
    def test_two_unguarded_edges_rejected(self):
        a = Alphabet(("a",))
        edges = [mc.Edge("q", "a", mc.TRUE_GUARD, (), "q"),
                 mc.Edge("q", "a", mc.TRUE_GUARD, (), "q")]
        with pytest.raises(MachineError, match="q.*a"):
            mc.RegisterMachine("bad", ("x",), ("q",), a, "q", edges,
                               {"q": mc.OUT_ZERO}, mc.InstructionSet.COUNTER,
                               dom.NATINF)

    def test_missing_case_rejected(self):
        ab = Alphabet(("a", "b"))
        edges = [mc.Edge("q", "a", mc.TRUE_GUARD, (), "q")]
        with pytest.raises(MachineError, match="missing case"):
            mc.RegisterMachine("bad", (), ("q",), ab, "q", edges,
                               {"q": mc.OUT_ZERO}, mc.InstructionSet.COUNTER,
                               dom.NATINF)

    def test_non_exhaustive_guards_rejected(self):
        a = Alphabet(("a",))
        edges = [mc.Edge("q", "a", mc.Guard((mc.GuardAtom("x", "y"),)), (), "q")]
        with pytest.raises(MachineError):
            mc.RegisterMachine("bad", ("x", "y"), ("q",), a, "q", edges,
                               {"q": mc.OUT_ZERO}, mc.InstructionSet.COUNTER,
                               dom.NATINF)

    def test_counter_output_restriction(self):
        a = Alphabet(("a",))
        edges = [mc.Edge("q", "a", mc.TRUE_GUARD, (), "q")]
        with pytest.raises(MachineError, match="extended"):
            mc.RegisterMachine("bad", ("x", "y"), ("q",), a, "q", edges,
                               {"q": mc.out_div("x", "y")},
                               mc.InstructionSet.COUNTER, dom.NATINF)

    def test_counter_instruction_restriction(self):
        a = Alphabet(("a",))
        edges = [mc.Edge("q", "a", mc.TRUE_GUARD, (mc.Update("x", "dec"),), "q")]
        with pytest.raises(MachineError, match="not allowed"):
            mc.RegisterMachine("bad", ("x",), ("q",), a, "q", edges,
                               {"q": mc.OUT_ZERO}, mc.InstructionSet.COUNTER,
                               dom.NATINF)

    def test_probe_invariant_random_machines(self):
        # every loaded machine satisfies exactly-one-guard on random probes
        rng = random.Random(5)
        for machine in (mc.build_mmax(), mc.build_kpair_monitor(2),
                        mc.build_pk_monitor(3), mc.build_doubling_adder()):
            valuation = {r: rng.randint(0, 12) for r in machine.registers}
            for q in machine.states:
                for a in machine.alphabet:
                    group = machine._by_key[(q, a)]
                    hits = sum(1 for e in group if e.guard.holds(valuation))
                    assert hits == 1


class TestFileFormat:
    def test_mmax_round_trip(self, server):
        m = mc.build_mmax()
        text = mc.render_machine(m)
        again = mc.load_machine(text, output_domain=dom.NATINF)
        assert again.instruction_set is mc.InstructionSet.COUNTER
        assert len(again.registers) == 2
        fig = parse_finite(FIG, server)
        assert verdict_sequence(mc.generated_verdict(again), fig) == \
            verdict_sequence(mc.generated_verdict(m), fig)

    def test_load_errors(self):
        with pytest.raises(MachineError, match="missing"):
            mc.load_machine("registers: x\nstates: q\ninitial: q\n")
        bad = ("registers: x\ninstruction-set: counter\nstates: q\ninitial: q\n"
               "edge: q a [true] -> q\nedge: q a [true] -> q\noutput: q = 0\n")
        with pytest.raises(MachineError):
            mc.load_machine(bad)

    def test_output_grammar(self):
        assert mc._parse_output("0").kind == "zero"
        assert mc._parse_output("inf").kind == "inf"
        assert mc._parse_output("x").regs == ("x",)
        div = mc._parse_output("(t)/(n)")
        assert div.kind == "div" and div.regs == ("t", "n")

    def test_code_outputs_not_renderable(self):
        with pytest.raises(MachineError, match="code outputs"):
            mc.render_machine(mc.build_mavg())


class TestMmax:
    def test_figure_sequence(self, server):
        v = mc.generated_verdict(mc.build_mmax())
        assert verdict_sequence(v, parse_finite(FIG, server)) == \
            [0, 0, 1, 1, 1, 2, 2, 2, 2]

    def test_double_request(self, server):
        _, out = mc.run(mc.build_mmax(), parse_finite("req req", server))
        assert out == dom.INF

    def test_empty_trace_outputs_initial(self, server):
        cfg, out = mc.run(mc.build_mmax(), FiniteTrace((), server))
        assert out == 0 and cfg.state == "idle"
        assert set(cfg.valuation.values()) == {0}

    def test_exhaustive_equivalence_short(self, server):
        v = mc.generated_verdict(mc.build_mmax())
        for s in all_finite_traces(server, 5):
            assert v(s) == qp.mrt(s), s.symbols

    def test_monotone(self, server):
        suite = list(all_lassos(server, 1, 2))
        assert check_monotone(mc.generated_verdict(mc.build_mmax()), suite, 6) is \
            Monotonicity.INCREASING


class TestMavg:
    def test_figure_sequence(self, server):
        expected = [0, 0, 1, Fraction(1, 2), 1, Fraction(3, 2), 1,
                    Fraction(4, 3), Fraction(4, 3)]
        for build in (mc.build_mavg, mc.build_mavg_running):
            v = mc.generated_verdict(build())
            assert verdict_sequence(v, parse_finite(FIG, server)) == expected

    def test_three_register_and_running_variants_agree(self, server):
        v1 = mc.generated_verdict(mc.build_mavg())
        v2 = mc.generated_verdict(mc.build_mavg_running())
        rng = random.Random(2)
        for _ in range(200):
            s = random_finite_trace(rng, server, rng.randint(0, 12))
            assert v1(s) == v2(s), s.symbols

    def test_periodic_liminf(self, server):
        v = mc.generated_verdict(mc.build_mavg())
        t = parse_lasso("req ack req other ack req ack other ; other", server)
        res = eval_liminf(v, t, SMALL)
        assert res.value == Fraction(4, 3)

    def test_agrees_with_art_function(self, server):
        v = mc.generated_verdict(mc.build_mavg())
        for s in all_finite_traces(server, 5):
            assert v(s) == qp.art(s)


class TestFiniteState:
    def test_exact_when_budget_sufficient(self, server):
        v = mc.generated_verdict(mc.build_finite_state_mrt(4))
        assert verdict_sequence(v, parse_finite(FIG, server)) == \
            [0, 0, 1, 1, 1, 2, 2, 2, 2]

    def test_saturates_at_budget(self, server):
        v = mc.generated_verdict(mc.build_finite_state_mrt(3))
        s = parse_finite("req " + "other " * 9 + "ack", server)
        assert qp.mrt(s) == 10
        assert v(s) == 3

    def test_always_below_truth(self, server):
        v = mc.generated_verdict(mc.build_finite_state_mrt(2))
        for s in all_finite_traces(server, 5):
            assert dom.NATINF.le(v(s), qp.mrt(s))

    def test_budget_growth_is_more_precise(self, server):
        lo = mc.generated_verdict(mc.build_finite_state_mrt(2))
        hi = mc.generated_verdict(mc.build_finite_state_mrt(3))
        witness = parse_finite("req other other ack", server)  # true maximum 3
        assert lo(witness) == 2 < hi(witness) == 3
        for s in all_finite_traces(server, 5):
            assert dom.NATINF.le(lo(s), hi(s))


class TestKPair:
    def test_exact_machine_matches_oracle(self):
        m = mc.build_kpair_monitor(2)
        v = mc.generated_verdict(m)
        t = parse_lasso("req1 ack1 req2 other ack2 ; other", m.alphabet)
        assert eval_limsup(v, t, SMALL).value == (1, 2) == qp.eval_kpair_mrt(t, 2)

    def test_exact_machine_random_lassos(self):
        m = mc.build_kpair_monitor(2)
        v = mc.generated_verdict(m)
        rng = random.Random(9)
        for _ in range(60):
            t = lasso(tuple(rng.choice(m.alphabet.symbols)
                            for _ in range(rng.randint(0, 4))),
                      tuple(rng.choice(m.alphabet.symbols)
                            for _ in range(rng.randint(1, 3))), m.alphabet)
            res = eval_limsup(v, t, LimitBudget(max_loop_iterations=96))
            if res.is_determined:
                assert res.value == qp.eval_kpair_mrt(t, 2), t.render()

    def test_priority_underapproximates_componentwise(self):
        m = mc.build_kpair_priority(2)
        v = mc.generated_verdict(m)
        exact = qp.kpair_property(2)
        d = dom.product(dom.NATINF, 2)
        overlap = parse_lasso("req1 req2 ack2 ack1 ; other", m.alphabet)
        got = eval_limsup(v, overlap, SMALL).value
        want = exact.eval_lasso(overlap)
        assert d.le(got, want) and got != want

    def test_priority_exact_without_overlap(self):
        m = mc.build_kpair_priority(2)
        v = mc.generated_verdict(m)
        for text in ("req1 ack1 req2 other ack2 ; other",
                     "; req2 other ack2 req1 ack1",
                     "req1 other other ack1 ; other"):
            t = parse_lasso(text, m.alphabet)
            assert eval_limsup(v, t, SMALL).value == qp.eval_kpair_mrt(t, 2), text

    def test_priority_never_overshoots(self):
        m = mc.build_kpair_priority(2)
        v = mc.generated_verdict(m)
        d = dom.product(dom.NATINF, 2)
        rng = random.Random(13)
        for _ in range(60):
            t = lasso(tuple(rng.choice(m.alphabet.symbols)
                            for _ in range(rng.randint(0, 4))),
                      tuple(rng.choice(m.alphabet.symbols)
                            for _ in range(rng.randint(1, 3))), m.alphabet)
            res = eval_limsup(v, t, LimitBudget(max_loop_iterations=96))
            if res.is_determined:
                assert d.le(res.value, qp.eval_kpair_mrt(t, 2)), t.render()

    def test_sequential_tracks_common_minimum(self):
        m = mc.build_kpair_sequential(2)
        v = mc.generated_verdict(m)
        t = parse_lasso("; req1 other ack1 req2 other ack2", m.alphabet)
        assert eval_limsup(v, t, SMALL).value == (2, 2)
        t = parse_lasso("; req1 ack1 req2 other ack2", m.alphabet)
        assert eval_limsup(v, t, SMALL).value == (1, 1)  # capped by the faster pair

    def test_sequential_never_overshoots(self):
        m = mc.build_kpair_sequential(2)
        v = mc.generated_verdict(m)
        d = dom.product(dom.NATINF, 2)
        rng = random.Random(17)
        for _ in range(60):
            t = lasso(tuple(rng.choice(m.alphabet.symbols)
                            for _ in range(rng.randint(0, 3))),
                      tuple(rng.choice(m.alphabet.symbols)
                            for _ in range(rng.randint(1, 3))), m.alphabet)
            res = eval_limsup(v, t, LimitBudget(max_loop_iterations=96))
            if res.is_determined:
                assert d.le(res.value, qp.eval_kpair_mrt(t, 2)), t.render()

    def test_grouped_is_precise_for_one_and_over_for_the_other(self):
        m = mc.build_kpair_grouped(3)
        v = mc.generated_verdict(m)
        t = parse_lasso("req1 other ack1 ; other", m.alphabet)
        got = eval_limsup(v, t, SMALL).value
        assert got == (2, 2, 0)  # group register reports the group maximum
        assert qp.eval_kpair_mrt(t, 3) == (2, 0, 0)

    def test_budget_dispatch(self):
        assert mc.build_kpair_approx(2, 3).name.startswith("Mkprio")
        assert mc.build_kpair_approx(2, 2).name.startswith("Mkseq")
        assert mc.build_kpair_approx(4, 3).name.startswith("Mkgrp")
        with pytest.raises(MachineError):
            mc.build_kpair_approx(2, 5)


class TestPk:
    def test_violation_freezes_length(self):
        m = mc.build_pk_monitor(2)
        v = mc.generated_verdict(m)
        t = parse_lasso("2 ; 1", m.alphabet)
        assert verdict_sequence(v, t.prefix(3)) == [dom.INF, 1, 1, 1]
        assert eval_limsup(v, t, SMALL).value == 1 == mc.eval_pk(t, 2)

    def test_clean_trace_stays_infinite(self):
        m = mc.build_pk_monitor(3)
        t = parse_lasso("1 2 3 ; 1", m.alphabet)
        assert eval_limsup(mc.generated_verdict(m), t, SMALL).value == dom.INF
        assert mc.eval_pk(t, 3) == dom.INF

    def test_monotonically_decreasing(self):
        m = mc.build_pk_monitor(3)
        suite = [parse_lasso("1 2 ; 3", m.alphabet), parse_lasso("; 1", m.alphabet),
                 parse_lasso("3 ; 1", m.alphabet)]
        assert check_monotone(mc.generated_verdict(m), suite, 8) is \
            Monotonicity.DECREASING

    def test_exact_machine_matches_oracle_on_lassos(self):
        m = mc.build_pk_monitor(3)
        v = mc.generated_verdict(m)
        for t in itertools.islice(all_lassos(m.alphabet, 2, 2), 0, None, 3):
            res = eval_liminf(v, t, LimitBudget(max_loop_iterations=200))
            assert res.is_determined
            assert res.value == mc.eval_pk(t, 3), t.render()

    def test_delayed_violation_found(self):
        m = mc.build_pk_monitor(2)
        t = parse_lasso("1 1 1 ; 2", m.alphabet)
        # three 1s tolerate three 2s; the fourth 2 (length 7) violates
        assert mc.eval_pk(t, 2) == 7
        assert eval_liminf(mc.generated_verdict(m), t, SMALL).value == 7

    def test_approx_misses_untracked_pairs_from_above(self):
        exact = mc.generated_verdict(mc.build_pk_monitor(3))
        approx = mc.generated_verdict(mc.build_pk_approx(3, 2))
        t = parse_lasso("3 ; 1", mc.pk_alphabet(3))
        assert eval_liminf(approx, t, SMALL).value == dom.INF
        assert eval_liminf(exact, t, SMALL).value == 1

    def test_approx_dominates_truth_from_above(self):
        approx = mc.generated_verdict(mc.build_pk_approx(4, 2))
        for t in itertools.islice(all_lassos(mc.pk_alphabet(4), 1, 2), 0, None, 5):
            res = eval_liminf(approx, t, LimitBudget(max_loop_iterations=200))
            if res.is_determined:
                assert dom.NATINF.le(mc.eval_pk(t, 4), res.value)

    def test_approx_bounds(self):
        with pytest.raises(MachineError):
            mc.build_pk_approx(3, 3)
        with pytest.raises(MachineError):
            mc.build_pk_approx(3, 1)


class TestBinary:
    def test_prefix_without_violation(self):
        m = mc.build_binary_pk(2)
        s = parse_finite("1 mark 1 0 mark", m.alphabet)
        assert mc.run(m, s)[1] == dom.INF

    def test_pumping_higher_value_violates(self):
        m = mc.build_binary_pk(2)
        t = parse_lasso("1 mark ; 1 0 mark", m.alphabet)
        assert mc.eval_binary_pk(t) == 3
        assert eval_liminf(mc.generated_verdict(m), t, SMALL).value == 3

    def test_first_unsupported_value_violates_immediately(self):
        t = parse_lasso("1 0 mark ; 0 mark", mc.BINARY_ALPHABET)
        # a block of value 2 with no prior block of value 1
        assert mc.eval_binary_pk(t) == 1

    def test_machines_match_oracle_when_tracked(self):
        m = mc.build_binary_pk(3)
        v = mc.generated_verdict(m)
        for text in ("1 mark ; 1 0 mark", "1 mark 1 0 mark ; mark",
                     "; 1 mark", "1 mark 1 mark 1 0 mark ; 1 1 mark"):
            t = parse_lasso(text, m.alphabet)
            res = eval_liminf(v, t, LimitBudget(max_loop_iterations=200))
            truth = mc.eval_binary_pk(t)
            assert res.is_determined
            assert dom.NATINF.le(truth, res.value), text
            if truth != dom.INF and truth == res.value:
                assert res.value == truth


class TestDoubling:
    def test_closed_forms(self):
        m = mc.build_doubling_adder()
        s = parse_finite("a a a b", m.alphabet)
        assert mc.generated_verdict(m)(s) == 8 == mc.closed_v_add(s)
        c = mc.build_doubling_counter()
        assert mc.generated_verdict(c)(s) == 6 == mc.closed_v_count(s)

    def test_empty_block_conventions(self):
        m = mc.build_doubling_adder()
        s = parse_finite("b b", m.alphabet)
        assert mc.generated_verdict(m)(s) == 1
        c = mc.build_doubling_counter()
        assert mc.generated_verdict(c)(s) == 0

    def test_exponential_vs_linear_growth(self):
        va = mc.generated_verdict(mc.build_doubling_adder())
        vc = mc.generated_verdict(mc.build_doubling_counter())
        for n in range(1, 12):
            s = parse_finite(" ".join(["a"] * n), mc.DOUBLING_ALPHABET)
            assert va(s) == 2 ** n
            assert vc(s) == 2 * n

    def test_counter_registers_grow_linearly(self):
        rng = random.Random(23)
        for machine in (mc.build_mmax(), mc.build_doubling_counter()):
            for _ in range(40):
                s = random_finite_trace(rng, machine.alphabet, rng.randint(0, 30))
                cfg, _ = mc.run(machine, s)
                assert all(v <= len(s) for v in cfg.valuation.values()), machine.name

    def test_adder_grows_exponentially(self):
        m = mc.build_doubling_adder()
        s = parse_finite(" ".join(["a"] * 10), m.alphabet)
        cfg, _ = mc.run(m, s)
        assert max(cfg.valuation.values()) == 2 ** 9  # beyond any linear bound

    def test_lasso_limits(self):
        va = mc.generated_verdict(mc.build_doubling_adder())
        vc = mc.generated_verdict(mc.build_doubling_counter())
        for n in (1, 3, 7):
            t = parse_lasso(" ".join(["a"] * n) + " b ; b", mc.DOUBLING_ALPHABET)
            assert eval_limsup(va, t, SMALL).value == 2 ** n == mc.eval_doubling(t)
            assert eval_limsup(vc, t, SMALL).value == 2 * n


class TestGeneratedVerdictEquivalences:
    def test_mmax_equals_mrt_on_random_traces(self, server):
        v = mc.generated_verdict(mc.build_mmax())
        rng = random.Random(1)
        for _ in range(500):
            s = random_finite_trace(rng, server, rng.randint(0, 40))
            assert v(s) == qp.mrt(s)

    def test_constant_machine(self):
        a = Alphabet(("a",))
        m = mc.RegisterMachine("konst", (), ("q",), a, "q",
                               [mc.Edge("q", "a", mc.TRUE_GUARD, (), "q")],
                               {"q": mc.OUT_ZERO}, mc.InstructionSet.COUNTER,
                               dom.NATINF)
        v = mc.generated_verdict(m)
        assert v(FiniteTrace(("a", "a"), a)) == 0
        assert eval_limsup(v, lasso((), ("a",), a), SMALL).value == 0
