"""Command-line front end.

Subcommands:

* ``run``      replay a machine over a trace file, emitting a verdict CSV;
* ``eval``     print a property's exact value on a lasso;
* ``compare``  precision-compare two verdicts over a suite (JSON lines);
* ``classify`` determination structure and monitor modality of an automaton;
* ``demo``     emit the bundled response-time demonstration series.

Exit codes: 0 on success, 1 when a requested check fails, 2 on usage or
parse errors.  All randomness is seeded (default 42) so identical inputs
produce byte-identical outputs.
"""

import argparse
import sys
from fractions import Fraction

from . import boolprop as bp
from . import domain as dom
from . import machine as mc
from . import precision as pr
from . import qprop as qp
from .errors import QuantmonError
from .trace import parse_finite, parse_lasso
from .verdict import (LimitBudget, eval_liminf, eval_limsup, verdict_csv_lines,
                      verdict_sequence)
from .boolprop import Side


def _read(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise QuantmonError(f"cannot read {path}: {exc.strerror}")


def _budget(args):
    return LimitBudget(max_loop_iterations=args.budget_iters,
                       confirm_window=args.confirm_window,
                       epsilon=Fraction(args.epsilon) if args.epsilon else Fraction(0))


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_machine_file(path, domain_name=None):
    domain = dom.parse_domain(domain_name) if domain_name else None
    return mc.load_machine(_read(path), output_domain=domain, name=path)


def _property_for(selector):
    if selector == "mrt":
        return qp.mrt_property()
    if selector == "art":
        return qp.art_property()
    if selector.startswith("kmrt:"):
        return qp.kpair_property(int(selector.split(":", 1)[1]))
    if selector.startswith("disc-safe:"):
        return qp.discounted_safety_property(bp.load_automaton(_read(selector.split(":", 1)[1])))
    if selector.startswith("disc-cosafe:"):
        return qp.discounted_cosafety_property(bp.load_automaton(_read(selector.split(":", 1)[1])))
    if selector.startswith("energy:"):
        return qp.energy_property(qp.load_weighted_automaton(_read(selector.split(":", 1)[1])))
    raise QuantmonError(f"unknown property selector {selector!r}")


def _verdict_for(selector):
    """Returns (verdict, alphabet-or-None)."""
    if selector == "mrt":
        return qp.mrt_verdict(), qp.server_alphabet(1).alphabet
    if selector == "art":
        return qp.art_verdict(), qp.server_alphabet(1).alphabet
    if selector.startswith("machine:"):
        machine = _load_machine_file(selector.split(":", 1)[1])
        return mc.generated_verdict(machine), machine.alphabet
    if selector.startswith("const:"):
        _, domain_name, value_text = selector.split(":", 2)
        domain = dom.parse_domain(domain_name)
        from .verdict import constant_verdict
        return constant_verdict(domain, dom.parse_value(value_text, domain)), None
    raise QuantmonError(f"unknown verdict selector {selector!r}")


def _suite_for(spec, alphabet, seed):
    if spec.startswith("exhaustive:"):
        _, u, v = spec.split(":")
        return pr.exhaustive_suite(alphabet, int(u), int(v))
    if spec.startswith("sample:"):
        n = int(spec.split(":", 1)[1])
        return pr.sampled_suite(alphabet, n, seed)
    if spec.startswith("file:"):
        lines = [ln for ln in _read(spec.split(":", 1)[1]).splitlines()
                 if ln.split("#", 1)[0].strip()]
        return pr.LassoSuite(tuple(parse_lasso(ln, alphabet) for ln in lines), spec)
    raise QuantmonError(f"unknown suite spec {spec!r}")


def cmd_run(args):
    machine = _load_machine_file(args.machine, args.domain)
    verdict = mc.generated_verdict(machine)
    if args.stdin:
        run = mc.MachineRun(machine)
        for raw in sys.stdin:
            token = raw.split("#", 1)[0].strip()
            if not token:
                continue
            sys.stdout.write(dom.render_value(run.step(token)) + "\n")
            sys.stdout.flush()
        return 0
    text = _read(args.trace)
    if args.lasso:
        t = parse_lasso(text, machine.alphabet)
        budget = _budget(args)
        window = t.prefix(len(t.stem) + args.unroll * len(t.loop))
        lines = verdict_csv_lines(verdict, window)
        up = eval_limsup(verdict, t, budget)
        lo = eval_liminf(verdict, t, budget)
        lines.append(f"limsup,{up.render()}")
        lines.append(f"liminf,{lo.render()}")
    else:
        s = parse_finite(text, machine.alphabet)
        lines = verdict_csv_lines(verdict, s)
    _emit(lines, args.output)
    return 0


def cmd_eval(args):
    prop = _property_for(args.property)
    t = parse_lasso(_read(args.trace), prop.alphabet)
    print(dom.render_value(prop.eval_lasso(t)))
    return 0


def cmd_compare(args):
    v1, a1 = _verdict_for(args.verdict1)
    v2, a2 = _verdict_for(args.verdict2)
    alphabet = a1 or a2
    if alphabet is None:
        raise QuantmonError("at least one verdict selector must fix an alphabet")
    suite = _suite_for(args.suite, alphabet, args.seed)
    side = Side(args.side)
    report = pr.compare(v1, v2, suite, side, _budget(args))
    _emit(pr.report_jsonl(report, args.verdict1, args.verdict2), args.output)
    return 0


_CANONICAL_MONITORS = {
    bp.AcceptanceKind.SAFETY: ("safety", bp.monitor_safety),
    bp.AcceptanceKind.COSAFETY: ("cosafety", bp.monitor_cosafety),
    bp.AcceptanceKind.BUCHI: ("response", bp.monitor_response),
    bp.AcceptanceKind.FINITE_MEMBERSHIP: ("response", bp.monitor_response),
    bp.AcceptanceKind.COBUCHI: ("persistence", bp.monitor_persistence),
}


def cmd_classify(args):
    budget = _budget(args)
    if args.obligation:
        pairs = []
        for spec in args.obligation:
            s_path, _, c_path = spec.partition(":")
            if not c_path:
                raise QuantmonError(f"obligation pair must be 'safety.aut:cosafety.aut', "
                                    f"got {spec!r}")
            pairs.append((bp.load_automaton(_read(s_path)),
                          bp.load_automaton(_read(c_path))))
        obligation = bp.ObligationList(tuple(pairs))
        monitor = bp.monitor_obligation(obligation)
        alphabet = pairs[0][0].alphabet
        suite = _suite_for(args.suite, alphabet, args.seed)
        bound = 2 * obligation.k
        worst = 0
        for t in suite:
            seq = verdict_sequence(monitor, t.prefix(len(t.stem) + 4 * len(t.loop)))
            worst = max(worst, sum(1 for x, y in zip(seq, seq[1:]) if x != y))
        report = bp.classify_modality(monitor, obligation.membership, Side.BELOW,
                                      suite, budget=budget)
        print(f"obligation k={obligation.k}")
        print(f"switches: worst={worst} bound={bound} "
              f"{'ok' if worst <= bound else 'VIOLATED'}")
        print(f"modality: {report.summary()}")
        return 0 if worst <= bound and report.universal_ok else 1
    P = bp.load_automaton(_read(args.automaton))
    print(f"kind: {P.kind.value}")
    print(f"states: {len(P.states)}  pos-determining: {sorted(P.pos_states)}  "
          f"neg-determining: {sorted(P.neg_states)}")
    print(f"classically-monitorable: {bp.classically_monitorable(P)}")
    label, build = _CANONICAL_MONITORS[P.kind]
    monitor = build(P)
    suite = _suite_for(args.suite, P.alphabet, args.seed)
    report = bp.classify_modality(monitor, bp.characteristic_property(P),
                                  Side.BELOW, suite, budget=budget)
    print(f"{label}-monitor: {report.summary()}")
    wanted_ok = report.universal_ok if args.modality == "universal" else (
        report.existential_ok if args.modality == "existential" else report.approximate_ok)
    return 0 if wanted_ok else 1


_FIG_TRACE = "req ack req other ack req ack other"


def cmd_demo(args):
    if args.figure == "fig1":
        machine = mc.build_mmax()
    elif args.figure == "fig2":
        machine = mc.build_mavg()
    else:
        raise QuantmonError(f"unknown demo id {args.figure!r} (use fig1 or fig2)")
    verdict = mc.generated_verdict(machine)
    s = parse_finite(_FIG_TRACE, machine.alphabet)
    _emit(verdict_csv_lines(verdict, s), args.output)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(prog="quantmon",
                                     description="quantitative runtime monitoring")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--budget-iters", type=int, default=1024)
    parser.add_argument("--confirm-window", type=int, default=3)
    parser.add_argument("--epsilon", default=None,
                        help="numeric tolerance for limit detection (exact rational)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="replay a machine over a trace")
    p.add_argument("machine")
    p.add_argument("trace", nargs="?")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--lasso", action="store_true")
    mode.add_argument("--finite", action="store_true")
    mode.add_argument("--stdin", action="store_true",
                      help="stream events from standard input, one token per line")
    p.add_argument("--unroll", type=int, default=3,
                   help="loop unrollings shown in lasso mode")
    p.add_argument("--domain", default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("eval", help="exact property value on a lasso")
    p.add_argument("property", help="mrt | art | kmrt:<k> | disc-safe:<file> | "
                                    "disc-cosafe:<file> | energy:<file>")
    p.add_argument("trace")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("compare", help="precision-compare two verdicts")
    p.add_argument("verdict1", help="machine:<file> | mrt | art | const:<domain>:<value>")
    p.add_argument("verdict2")
    p.add_argument("--suite", required=True,
                   help="exhaustive:<u>:<v> | sample:<n> | file:<path>")
    p.add_argument("--side", choices=("below", "above"), default="below")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("classify", help="determination and modality report")
    p.add_argument("automaton", nargs="?")
    p.add_argument("--obligation", nargs="+", default=None,
                   metavar="SAFETY.aut:COSAFETY.aut")
    p.add_argument("--suite", default="exhaustive:2:3")
    p.add_argument("--modality", choices=("universal", "existential", "approximate"),
                   default="universal")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("demo", help="bundled figure data series")
    p.add_argument("figure")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=cmd_demo)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "run" and not args.stdin and args.trace is None:
        parser.error("run needs a trace file (or --stdin)")
    if args.command == "classify" and not args.obligation and args.automaton is None:
        parser.error("classify needs an automaton file or --obligation pairs")
    try:
        return args.fn(args)
    except QuantmonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
