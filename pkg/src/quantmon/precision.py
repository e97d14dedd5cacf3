"""Empirical precision comparison between verdict functions.

Two verdicts monitoring the same side compare by their limits on every
suite trace: one is more precise when it dominates pointwise and beats the
other strictly somewhere.  All claims are relative to the suite and
reported as such; nothing is extrapolated to unseen traces.
"""

import enum
import json
import random
from dataclasses import dataclass, field

from . import domain as dom
from .boolprop import Side
from .errors import UnsupportedDomainError
from .trace import all_lassos, random_lasso
from .verdict import DEFAULT_BUDGET, eval_liminf, eval_limsup


class PrecisionRelation(enum.Enum):
    MORE_PRECISE = "more-precise"
    LESS_PRECISE = "less-precise"
    EQUALLY_PRECISE = "equally-precise"
    INCOMPARABLE = "incomparable"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class LassoSuite:
    traces: tuple
    provenance: str = "explicit"

    def __post_init__(self):
        if not self.traces:
            raise ValueError("suite must be non-empty")
        first = self.traces[0].alphabet
        if any(t.alphabet != first for t in self.traces):
            raise ValueError("suite traces must share an alphabet")

    @property
    def alphabet(self):
        return self.traces[0].alphabet

    def __iter__(self):
        return iter(self.traces)

    def __len__(self):
        return len(self.traces)

    def extended(self, extras):
        return LassoSuite(self.traces + tuple(extras), self.provenance + "+explicit")


def exhaustive_suite(alphabet, max_stem=2, max_loop=3):
    return LassoSuite(tuple(all_lassos(alphabet, max_stem, max_loop)),
                      f"exhaustive:{max_stem}:{max_loop}")


def sampled_suite(alphabet, count=500, seed=42, max_stem=4, max_loop=4):
    rng = random.Random(seed)
    traces = tuple(random_lasso(rng, alphabet, max_stem, max_loop) for _ in range(count))
    return LassoSuite(traces, f"sample:{count}:seed{seed}")


def default_suite(alphabet, seed=42):
    """Exhaustive small lassos for alphabets up to 3 symbols, seeded samples
    beyond, matching the harness defaults."""
    if len(alphabet) <= 3:
        return exhaustive_suite(alphabet, 2, 3)
    return sampled_suite(alphabet, 500, seed)


@dataclass
class TraceRow:
    trace: object
    limit_1: object
    limit_2: object
    relation: str  # eq | lt (v2 below v1) | gt | incomparable | unresolved


@dataclass
class PrecisionReport:
    relation: PrecisionRelation
    side: Side
    suite: LassoSuite
    rows: list
    witness: object = None        # strict witness for More/LessPrecise
    witness_pair: object = None   # one failure in each direction for Incomparable
    unresolved: list = field(default_factory=list)

    def summary(self):
        out = f"{self.relation.value} (side={self.side.value}, suite={self.suite.provenance})"
        if self.witness is not None:
            out += f", witness={self.witness.render()!r}"
        if self.unresolved:
            out += f", unresolved={len(self.unresolved)}"
        return out


def _limits(verdict, suite, side, budget):
    fn = eval_limsup if side is Side.BELOW else eval_liminf
    return [fn(verdict, t, budget) for t in suite]


def compare(v1, v2, suite, side=Side.BELOW, budget=DEFAULT_BUDGET):
    """Classify the precision relation of v1 versus v2 on the suite.

    Both verdicts must share a codomain and are compared on one fixed side;
    a trace whose limit is undetermined for either verdict is set aside and
    blocks equality and dominance claims (but cannot block incomparability,
    which is witnessed positively).
    """
    if v1.codomain != v2.codomain:
        raise UnsupportedDomainError(
            f"cannot compare verdicts over {v1.codomain.name} and {v2.codomain.name}")
    d = v1.codomain
    lim1 = _limits(v1, suite, side, budget)
    lim2 = _limits(v2, suite, side, budget)
    rows = []
    unresolved = []
    fail_dom1 = fail_dom2 = None  # traces where v1 (resp. v2) fails to dominate
    strict1 = strict2 = None
    for t, r1, r2 in zip(suite, lim1, lim2):
        if not (r1.is_determined and r2.is_determined):
            rows.append(TraceRow(t, r1, r2, "unresolved"))
            unresolved.append(t)
            continue
        a, b = r1.value, r2.value
        # orient so that "dominates" means closer to the property value
        v1_covers = d.le(b, a) if side is Side.BELOW else d.le(a, b)
        v2_covers = d.le(a, b) if side is Side.BELOW else d.le(b, a)
        if a == b:
            rows.append(TraceRow(t, r1, r2, "eq"))
            continue
        if v1_covers:
            rows.append(TraceRow(t, r1, r2, "lt"))
            strict1 = strict1 or t
        elif v2_covers:
            rows.append(TraceRow(t, r1, r2, "gt"))
            strict2 = strict2 or t
        else:
            rows.append(TraceRow(t, r1, r2, "incomparable"))
        if not v1_covers:
            fail_dom1 = fail_dom1 or t
        if not v2_covers:
            fail_dom2 = fail_dom2 or t
    if fail_dom1 is not None and fail_dom2 is not None:
        return PrecisionReport(PrecisionRelation.INCOMPARABLE, side, suite, rows,
                               witness_pair=(fail_dom1, fail_dom2),
                               unresolved=unresolved)
    if unresolved:
        return PrecisionReport(PrecisionRelation.UNDETERMINED, side, suite, rows,
                               unresolved=unresolved)
    if fail_dom1 is None and strict1 is not None:
        return PrecisionReport(PrecisionRelation.MORE_PRECISE, side, suite, rows,
                               witness=strict1)
    if fail_dom2 is None and strict2 is not None:
        return PrecisionReport(PrecisionRelation.LESS_PRECISE, side, suite, rows,
                               witness=strict2)
    return PrecisionReport(PrecisionRelation.EQUALLY_PRECISE, side, suite, rows)


def hierarchy_experiment(family, suite, side=Side.BELOW, budget=DEFAULT_BUDGET,
                         prop=None):
    """Pairwise-compare an indexed verdict family (low to high resource).

    ``family`` is a list of (index, verdict) with indices ascending; the
    report list pairs each adjacent couple with compare(higher, lower).
    When ``prop`` is given, each verdict is additionally checked to
    approximate it on the suite (from the given side), and the returned
    entries carry that soundness flag.
    """
    results = []
    prop_fn = getattr(prop, "eval_lasso", prop) if prop is not None else None
    sound = {}
    if prop_fn is not None:
        for idx, v in family:
            d = v.codomain
            ok = True
            for t in suite:
                res = (eval_limsup if side is Side.BELOW else eval_liminf)(v, t, budget)
                if not res.is_determined:
                    continue
                pv = prop_fn(t)
                covered = d.le(res.value, pv) if side is Side.BELOW else d.le(pv, res.value)
                if not covered:
                    ok = False
                    break
            sound[idx] = ok
    for (lo_idx, lo_v), (hi_idx, hi_v) in zip(family, family[1:]):
        report = compare(hi_v, lo_v, suite, side, budget)
        entry = {"pair": (hi_idx, lo_idx), "report": report}
        if prop_fn is not None:
            entry["sound"] = (sound[hi_idx], sound[lo_idx])
        results.append(entry)
    return results


def report_jsonl(report, name_1="v1", name_2="v2"):
    """One JSON record per suite trace plus a summary record."""
    lines = []
    for row in report.rows:
        lines.append(json.dumps({
            "trace": row.trace.render(),
            f"limit_{name_1}": row.limit_1.render(),
            f"limit_{name_2}": row.limit_2.render(),
            "relation": row.relation,
        }, sort_keys=True))
    summary = {
        "summary": report.relation.value,
        "side": report.side.value,
        "suite": report.suite.provenance,
        "unresolved": len(report.unresolved),
    }
    if report.witness is not None:
        summary["witness"] = report.witness.render()
    if report.witness_pair is not None:
        summary["witness_pair"] = [t.render() for t in report.witness_pair]
    lines.append(json.dumps(summary, sort_keys=True))
    return lines
