"""Response-time monitoring walkthrough.

A server over the events req/ack/other is watched by two register machines:
a two-counter one tracking the maximal response time and a three-register
one (with a dividing output) tracking the running average.  This script
replays the bundled demonstration trace through both and then evaluates
their limits on ultimately periodic extensions.
"""

from quantmon import machine as mc
from quantmon import qprop as qp
from quantmon.trace import parse_finite, parse_lasso
from quantmon.verdict import eval_liminf, eval_limsup, verdict_sequence
from quantmon.domain import render_value

TRACE = "req ack req other ack req ack other"


def banner(title):
    print()
    print(title)
    print("-" * len(title))


def main():
    server = qp.server_alphabet(1).alphabet
    events = parse_finite(TRACE, server)

    banner("maximal response time, step by step")
    mmax = mc.build_mmax()
    v_max = mc.generated_verdict(mmax)
    print(f"machine: {mmax}")
    for i, value in enumerate(verdict_sequence(v_max, events)):
        prefix = " ".join(events.symbols[:i]) or "(empty)"
        print(f"  after {prefix:<45} -> {render_value(value)}")

    banner("average response time over the same events")
    v_avg = mc.generated_verdict(mc.build_mavg())
    values = verdict_sequence(v_avg, events)
    print("  " + ", ".join(render_value(v) for v in values))
    print("  the dips mark moments with an open request; the average")
    print("  settles at 4/3 once all three requests are acknowledged")

    banner("limits on ultimately periodic traces")
    for text in ("req ack req other ack req ack other ; other",
                 "; req ack",
                 "req ; other",
                 "req req ; other"):
        t = parse_lasso(text, server)
        up = eval_limsup(v_max, t)
        print(f"  {text:<45} max limit: {up.kind.value}/{render_value(up.value)}"
              f"   ground truth: {render_value(qp.eval_mrt(t))}")
    t = parse_lasso("req ack req other ack req ack other ; other", server)
    lo = eval_liminf(v_avg, t)
    print(f"  average on the idling loop: {lo.kind.value}/{render_value(lo.value)}"
          f"   ground truth: {render_value(qp.eval_art(t))}")


if __name__ == "__main__":
    main()
