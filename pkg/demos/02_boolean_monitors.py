"""Boolean properties through the quantitative lens.

Builds the canonical monitor for each acceptance kind over the two-letter
alphabet {a, b}, shows its verdict stream, and checks the monitoring
modality empirically over every small lasso.
"""

from quantmon import boolprop as bp
from quantmon.boolprop import Side
from quantmon.domain import render_value
from quantmon.trace import Alphabet, FiniteTrace, all_lassos, parse_lasso
from quantmon.verdict import LimitBudget, count_switches, eval_limsup, verdict_sequence

BUDGET = LimitBudget(max_loop_iterations=64)


def show_stream(label, verdict, symbols, alphabet):
    seq = verdict_sequence(verdict, FiniteTrace(tuple(symbols.split()), alphabet))
    print(f"  {label:<28} {symbols:<12} -> {' '.join(render_value(v) for v in seq)}")


def main():
    ab = Alphabet(("a", "b"))
    never_b = bp.safety_never(ab, "b")
    eventually_a = bp.cosafety_eventually(ab, "a")
    inf_a = bp.buchi_infinitely_often(ab, "a")
    ev_always_a = bp.cobuchi_eventually_always(ab, "a")

    print("verdict streams (empty prefix first)")
    show_stream("never b (safety)", bp.monitor_safety(never_b), "a b a", ab)
    show_stream("eventually a (co-safety)", bp.monitor_cosafety(eventually_a),
                "b b a", ab)
    obligation = bp.ObligationList(((never_b, eventually_a),))
    show_stream("obligation (1 pair)", bp.monitor_obligation(obligation), "b a b", ab)
    show_stream("infinitely many a", bp.monitor_response(inf_a), "a b a b", ab)
    reactivity = bp.ReactivityList(((inf_a, bp.empty_cobuchi(ab)),))
    show_stream("reactivity (1 pair)", bp.monitor_reactivity(reactivity), "a a b a", ab)

    print()
    print("determination structure")
    for name, P in (("never b", never_b), ("eventually a", eventually_a),
                    ("infinitely many a", inf_a), ("eventually always a", ev_always_a)):
        print(f"  {name:<22} pos={sorted(P.pos_states) or '-'} "
              f"neg={sorted(P.neg_states) or '-'} "
              f"classically monitorable: {bp.classically_monitorable(P)}")

    print()
    print("obligation monitors switch at most twice per conjunct")
    worst = 0
    monitor = bp.monitor_obligation(obligation)
    for t in all_lassos(ab, 2, 3):
        seq = verdict_sequence(monitor, t.prefix(10))
        worst = max(worst, count_switches(seq))
    print(f"  worst switch count over all small lassos: {worst} (bound 2)")

    print()
    print("universal modality over every lasso with stem <= 2 and loop <= 3")
    suite = list(all_lassos(ab, 2, 3))
    checks = [("safety", bp.monitor_safety(never_b), never_b),
              ("co-safety", bp.monitor_cosafety(eventually_a), eventually_a),
              ("response", bp.monitor_response(inf_a), inf_a),
              ("persistence", bp.monitor_persistence(ev_always_a), ev_always_a)]
    for label, monitor, P in checks:
        report = bp.classify_modality(monitor, bp.characteristic_property(P),
                                      Side.BELOW, suite, budget=BUDGET)
        print(f"  {label:<12} {report.summary()}")

    print()
    print("a reactivity monitor approximates from below and reaches the truth")
    monitor = bp.monitor_reactivity(reactivity)
    for text in ("; a", "; b", "b b ; a b"):
        t = parse_lasso(text, ab)
        res = eval_limsup(monitor, t, BUDGET)
        print(f"  {text:<10} limit {render_value(res.value):<4} "
              f"member: {reactivity.membership(t)}")


if __name__ == "__main__":
    main()
