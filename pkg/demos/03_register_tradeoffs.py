"""Precision against resources: more registers buy better verdicts.

Four experiments: state-budgeted response-time monitors, counter budgets
for per-pair response times, the letter-ordering counter hierarchy, and
adder-versus-counter arithmetic.
"""

from quantmon import machine as mc
from quantmon import precision as pr
from quantmon import qprop as qp
from quantmon.boolprop import Side
from quantmon.domain import render_value
from quantmon.trace import parse_finite, parse_lasso
from quantmon.verdict import LimitBudget, eval_limsup

BUDGET = LimitBudget(max_loop_iterations=64)


def banner(title):
    print()
    print(title)
    print("-" * len(title))


def main():
    server = qp.server_alphabet(1).alphabet

    banner("finite-state saturation")
    long_wait = parse_finite("req " + "other " * 9 + "ack", server)
    print(f"  true maximal response time: {qp.mrt(long_wait)}")
    for cap in (2, 3, 5):
        v = mc.generated_verdict(mc.build_finite_state_mrt(cap))
        print(f"  budget {cap}: reports {v(long_wait)}")

    banner("counter budgets for two request/acknowledgement pairs")
    exact_machine = mc.build_kpair_monitor(2)
    overlap = parse_lasso("req1 req2 ack2 ack1 ; other", exact_machine.alphabet)
    print(f"  trace: {overlap.render()}   truth: "
          f"{render_value(qp.eval_kpair_mrt(overlap, 2))}")
    for label, machine in (("4 counters (exact)", exact_machine),
                           ("3 counters (priority)", mc.build_kpair_approx(2, 3)),
                           ("2 counters (sequential)", mc.build_kpair_approx(2, 2))):
        v = mc.generated_verdict(machine)
        res = eval_limsup(v, overlap, BUDGET)
        print(f"  {label:<26} -> {render_value(res.value)}")

    banner("letter-ordering hierarchy: each tracker catches one more pair")
    k = 4
    alphabet = mc.pk_alphabet(k)
    suite = pr.LassoSuite((parse_lasso("2 ; 1", alphabet),
                           parse_lasso("3 ; 1", alphabet),
                           parse_lasso("4 ; 1", alphabet),
                           parse_lasso("; 1", alphabet)), "ordering-witnesses")
    family = [(2, mc.generated_verdict(mc.build_pk_approx(k, 2))),
              (3, mc.generated_verdict(mc.build_pk_approx(k, 3))),
              (4, mc.generated_verdict(mc.build_pk_monitor(k)))]
    for entry in pr.hierarchy_experiment(family, suite, Side.ABOVE, BUDGET,
                                         prop=mc.pk_property(k)):
        hi, lo = entry["pair"]
        print(f"  {hi} counters vs {lo}: {entry['report'].summary()}")

    banner("the same story with binary-encoded blocks")
    witnesses = pr.LassoSuite((parse_lasso("; 1 0 mark", mc.BINARY_ALPHABET),
                               parse_lasso("; 1 1 mark", mc.BINARY_ALPHABET),
                               parse_lasso("; 1 0 0 mark", mc.BINARY_ALPHABET),
                               parse_lasso("; 1 mark", mc.BINARY_ALPHABET)),
                              "binary-witnesses")
    family = [(kk, mc.generated_verdict(mc.build_binary_pk(kk))) for kk in (2, 3, 4)]
    for entry in pr.hierarchy_experiment(family, witnesses, Side.ABOVE, BUDGET,
                                         prop=mc.binary_pk_property()):
        hi, lo = entry["pair"]
        print(f"  {hi} counters vs {lo}: {entry['report'].summary()}")

    banner("adders grow exponentially, counters linearly")
    v_add = mc.generated_verdict(mc.build_doubling_adder())
    v_count = mc.generated_verdict(mc.build_doubling_counter())
    for n in (1, 4, 8):
        s = parse_finite(" ".join(["a"] * n + ["b"]), mc.DOUBLING_ALPHABET)
        print(f"  block of {n} a's: adder {v_add(s):>4} counter {v_count(s):>3}")
    blocks = pr.LassoSuite(tuple(
        parse_lasso(" ".join(["a"] * n) + " b ; b", mc.DOUBLING_ALPHABET)
        for n in range(1, 9)), "a-blocks")
    report = pr.compare(v_add, v_count, blocks, Side.BELOW, BUDGET)
    print(f"  verdict: {report.summary()}")


if __name__ == "__main__":
    main()
