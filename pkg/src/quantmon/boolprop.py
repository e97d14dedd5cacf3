"""Boolean trace properties as deterministic automata, and the monitor
constructions for the safety-progress classes.

An automaton is total and deterministic; its acceptance kind fixes the
omega-semantics.  Safety/co-safety determining sets must be traps (closed
under transitions) so that the reached state alone carries the history.

Determination, classical monitorability, and lasso membership all reduce to
reachability and cycle analysis on the (tiny) transition graph.
"""

import enum
from dataclasses import dataclass
from functools import cached_property

from . import domain as dom
from .errors import AcceptanceKindError, AutomatonError
from .trace import Alphabet, all_finite_traces, all_lassos
from .verdict import (
    FunctionStepper, LimitKind, Monotonicity, VerdictFunction,
    DEFAULT_BUDGET, eval_liminf, eval_limsup,
)


class AcceptanceKind(enum.Enum):
    SAFETY = "safety"
    COSAFETY = "cosafety"
    BUCHI = "buchi"
    COBUCHI = "cobuchi"
    FINITE_MEMBERSHIP = "finite-membership"


class Side(enum.Enum):
    BELOW = "below"
    ABOVE = "above"


class BooleanPropertyAutomaton:
    """Deterministic total automaton over a finite alphabet with one of the
    acceptance kinds above.  ``accepting`` is the kind's state set: bad states
    for safety, good states for co-safety, the accepting set otherwise."""

    def __init__(self, alphabet, states, initial, transitions, kind, accepting):
        self.alphabet = alphabet
        self.states = tuple(states)
        self.initial = initial
        self.transitions = dict(transitions)
        self.kind = kind
        self.accepting = frozenset(accepting)
        self._validate()

    def _validate(self):
        if len(set(self.states)) != len(self.states) or not self.states:
            raise AutomatonError("states must be non-empty and distinct")
        if self.initial not in self.states:
            raise AutomatonError(f"initial state {self.initial!r} unknown")
        for st in self.accepting:
            if st not in self.states:
                raise AutomatonError(f"accepting state {st!r} unknown")
        for q in self.states:
            for a in self.alphabet:
                if (q, a) not in self.transitions:
                    raise AutomatonError(f"missing transition from {q!r} on {a!r}")
                if self.transitions[(q, a)] not in self.states:
                    raise AutomatonError(f"transition from {q!r} on {a!r} leaves the state set")
        if len(self.transitions) != len(self.states) * len(self.alphabet):
            extra = set(self.transitions) - {(q, a) for q in self.states for a in self.alphabet}
            raise AutomatonError(f"unexpected transitions {sorted(extra)}")
        if self.kind in (AcceptanceKind.SAFETY, AcceptanceKind.COSAFETY):
            for q in self.accepting:
                for a in self.alphabet:
                    if self.transitions[(q, a)] not in self.accepting:
                        raise AutomatonError(
                            f"{self.kind.value} set must be a trap: "
                            f"{q!r} --{a}--> {self.transitions[(q, a)]!r} escapes")

    def step(self, state, symbol):
        return self.transitions[(state, symbol)]

    def run_state(self, finite_trace):
        q = self.initial
        for a in finite_trace:
            q = self.transitions[(q, a)]
        return q

    # -- graph analysis -------------------------------------------------

    def reachable(self, start, allowed=None):
        if allowed is not None and start not in allowed:
            return frozenset()
        seen = {start}
        frontier = [start]
        while frontier:
            q = frontier.pop()
            for a in self.alphabet:
                nxt = self.transitions[(q, a)]
                if nxt in seen or (allowed is not None and nxt not in allowed):
                    continue
                seen.add(nxt)
                frontier.append(nxt)
        return frozenset(seen)

    def _has_cycle_within(self, subset):
        color = {}
        for root in subset:
            if color.get(root):
                continue
            stack = [(root, iter(self._succs(root, subset)))]
            color[root] = "grey"
            while stack:
                node, it = stack[-1]
                advanced = False
                for nxt in it:
                    if color.get(nxt) == "grey":
                        return True
                    if nxt not in color:
                        color[nxt] = "grey"
                        stack.append((nxt, iter(self._succs(nxt, subset))))
                        advanced = True
                        break
                if not advanced:
                    color[node] = "black"
                    stack.pop()
        return False

    def _succs(self, q, subset):
        out = set()
        for a in self.alphabet:
            nxt = self.transitions[(q, a)]
            if nxt in subset:
                out.add(nxt)
        return out

    def _on_cycle(self, q, subset):
        if q not in subset:
            return False
        frontier = list(self._succs(q, subset))
        seen = set(frontier)
        while frontier:
            cur = frontier.pop()
            if cur == q:
                return True
            for nxt in self._succs(cur, subset):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return False

    @cached_property
    def pos_states(self):
        """States from which every infinite continuation is accepted."""
        return frozenset(q for q in self.states if self._pos(q))

    @cached_property
    def neg_states(self):
        """States from which every infinite continuation is rejected."""
        return frozenset(q for q in self.states if self._neg(q))

    def _pos(self, q):
        acc = self.accepting
        others = frozenset(self.states) - acc
        if self.kind is AcceptanceKind.SAFETY:
            return not (self.reachable(q) & acc)
        if self.kind is AcceptanceKind.COSAFETY:
            return not self._has_cycle_within(self.reachable(q, allowed=others))
        if self.kind in (AcceptanceKind.BUCHI, AcceptanceKind.FINITE_MEMBERSHIP):
            return not self._has_cycle_within(self.reachable(q) & others)
        if self.kind is AcceptanceKind.COBUCHI:
            reach = self.reachable(q)
            return not any(self._on_cycle(n, reach) for n in reach & others)
        raise AcceptanceKindError(f"unsupported kind {self.kind}")

    def _neg(self, q):
        acc = self.accepting
        others = frozenset(self.states) - acc
        if self.kind is AcceptanceKind.SAFETY:
            return not self._has_cycle_within(self.reachable(q, allowed=others))
        if self.kind is AcceptanceKind.COSAFETY:
            return not (self.reachable(q) & acc)
        if self.kind in (AcceptanceKind.BUCHI, AcceptanceKind.FINITE_MEMBERSHIP):
            reach = self.reachable(q)
            return not any(self._on_cycle(a, reach) for a in reach & acc)
        if self.kind is AcceptanceKind.COBUCHI:
            return not self._has_cycle_within(self.reachable(q) & acc)
        raise AcceptanceKindError(f"unsupported kind {self.kind}")

    def __repr__(self):
        return (f"<automaton {self.kind.value} |Q|={len(self.states)} "
                f"over {{{','.join(self.alphabet)}}}>")


def membership(P, t):
    """Exact omega-acceptance of the lasso's eventually periodic run."""
    visited = {P.initial}
    q = P.initial
    for a in t.stem:
        q = P.step(q, a)
        visited.add(q)
    boundary = {q: 0}
    iteration_states = []
    recurring = None
    for k in range(1, len(P.states) + 2):
        states_this = []
        for a in t.loop:
            q = P.step(q, a)
            states_this.append(q)
            visited.add(q)
        iteration_states.append(states_this)
        if q in boundary:
            j = boundary[q]
            recurring = frozenset(s for it in iteration_states[j:] for s in it)
            break
        boundary[q] = k
    assert recurring is not None, "boundary state must repeat within |Q|+1 iterations"
    acc = P.accepting
    if P.kind is AcceptanceKind.SAFETY:
        return not (visited & acc)
    if P.kind is AcceptanceKind.COSAFETY:
        return bool(visited & acc)
    if P.kind in (AcceptanceKind.BUCHI, AcceptanceKind.FINITE_MEMBERSHIP):
        return bool(recurring & acc)
    if P.kind is AcceptanceKind.COBUCHI:
        return recurring <= acc
    raise AcceptanceKindError(f"unsupported kind {P.kind}")


def determines(P, s, polarity):
    """Does the finite trace ``s`` positively/negatively determine P?"""
    q = P.run_state(s)
    if polarity == "pos":
        return q in P.pos_states
    if polarity == "neg":
        return q in P.neg_states
    raise ValueError("polarity must be 'pos' or 'neg'")


def classically_monitorable(P):
    """From every reachable state, some determining state stays reachable."""
    determining = P.pos_states | P.neg_states
    for q in P.reachable(P.initial):
        if not (P.reachable(q) & determining):
            return False
    return True


def characteristic_property(P):
    """The lasso evaluator of P's characteristic function (T iff member)."""
    return lambda t: membership(P, t)


# -- monitor constructions ---------------------------------------------


def _state_output_verdict(P, out_fn, codomain, monotonicity, name):
    factory = lambda alphabet: FunctionStepper(P.initial, P.step, out_fn)
    return VerdictFunction(codomain,
                           evaluate=lambda s: out_fn(P.run_state(s)),
                           stepper_factory=factory,
                           monotonicity=monotonicity, name=name)


def monitor_safety(P):
    """Irrevocably reports F once the safety property is violated."""
    if P.kind is not AcceptanceKind.SAFETY:
        raise AcceptanceKindError("monitor_safety needs a safety automaton")
    neg = P.neg_states
    return _state_output_verdict(P, lambda q: False if q in neg else True,
                                 dom.BF, Monotonicity.INCREASING, "safety-monitor")


def monitor_cosafety(P):
    """Irrevocably reports T once the co-safety property is satisfied."""
    if P.kind is not AcceptanceKind.COSAFETY:
        raise AcceptanceKindError("monitor_cosafety needs a co-safety automaton")
    pos = P.pos_states
    return _state_output_verdict(P, lambda q: q in pos,
                                 dom.BT, Monotonicity.INCREASING, "cosafety-monitor")


def monitor_response(P):
    """T exactly on the witness prefixes (those ending in an accepting state);
    its limsup on a lasso equals membership."""
    if P.kind not in (AcceptanceKind.BUCHI, AcceptanceKind.FINITE_MEMBERSHIP):
        raise AcceptanceKindError("monitor_response needs a Buchi automaton")
    acc = P.accepting
    return _state_output_verdict(P, lambda q: q in acc,
                                 dom.BT, Monotonicity.UNRESTRICTED, "response-monitor")


def monitor_persistence(P):
    """T on witness prefixes over the F-topped domain; its limsup there is T
    exactly when all but finitely many prefixes are witnesses."""
    if P.kind is not AcceptanceKind.COBUCHI:
        raise AcceptanceKindError("monitor_persistence needs a co-Buchi automaton")
    acc = P.accepting
    return _state_output_verdict(P, lambda q: q in acc,
                                 dom.BF, Monotonicity.UNRESTRICTED, "persistence-monitor")


def monitor_any_existential(P):
    """T once the property is positively determined, F otherwise.

    Monotone on the T-topped domain and existential from below for every
    property: no overshoot, and equality is reachable from every prefix.
    """
    pos = P.pos_states
    return _state_output_verdict(P, lambda q: q in pos,
                                 dom.BT, Monotonicity.INCREASING, "existential-monitor")


@dataclass(frozen=True)
class ObligationList:
    """Conjunction of safety-or-cosafety disjunctions (S_i or C_i)."""
    pairs: tuple

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("obligation list must have at least one pair")
        for s, c in self.pairs:
            if s.kind is not AcceptanceKind.SAFETY:
                raise AcceptanceKindError("first pair member must be a safety automaton")
            if c.kind is not AcceptanceKind.COSAFETY:
                raise AcceptanceKindError("second pair member must be a co-safety automaton")

    @property
    def k(self):
        return len(self.pairs)

    def membership(self, t):
        return all(membership(s, t) or membership(c, t) for s, c in self.pairs)


def monitor_obligation(obligation):
    """T while every conjunct is still alive: the i-th conjunct is alive when
    its safety part is not yet refuted or its co-safety part is confirmed.
    The verdict lives on the flat boolean domain and switches at most twice
    per conjunct."""
    pairs = obligation.pairs
    neg_s = [s.neg_states for s, _ in pairs]
    pos_c = [c.pos_states for _, c in pairs]

    def out(states):
        half = len(pairs)
        return all(states[i] not in neg_s[i] or states[half + i] in pos_c[i]
                   for i in range(half))

    def step(states, symbol):
        half = len(pairs)
        return tuple(pairs[i][0].step(states[i], symbol) for i in range(half)) + \
            tuple(pairs[i][1].step(states[half + i], symbol) for i in range(half))

    init = tuple(s.initial for s, _ in pairs) + tuple(c.initial for _, c in pairs)
    factory = lambda alphabet: FunctionStepper(init, step, out)
    return VerdictFunction(dom.B, stepper_factory=factory,
                           monotonicity=Monotonicity.UNRESTRICTED,
                           name=f"obligation-monitor(k={len(pairs)})")


@dataclass(frozen=True)
class ReactivityList:
    """Conjunction of response-or-persistence disjunctions (R_i or P_i)."""
    pairs: tuple

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("reactivity list must have at least one pair")
        for r, p in self.pairs:
            if r.kind is not AcceptanceKind.BUCHI:
                raise AcceptanceKindError("first pair member must be a Buchi automaton")
            if p.kind is not AcceptanceKind.COBUCHI:
                raise AcceptanceKindError("second pair member must be a co-Buchi automaton")

    @property
    def k(self):
        return len(self.pairs)

    def membership(self, t):
        return all(membership(r, t) or membership(p, t) for r, p in self.pairs)


_RESP, _PERS, _DONE = 0, 1, 2


def monitor_reactivity(reactivity):
    """Existential-from-below monitor on the bottomed boolean domain.

    Each conjunct starts in a response phase where it "fires" whenever its
    response witness shows T (or the response part is positively determined).
    The combined monitor emits T whenever every conjunct has fired since the
    last T, then resets its memory.  When a response part becomes negatively
    determined the conjunct switches to watching its persistence part: from
    then on the conjunct only fires once the persistence part is positively
    determined, the monitor emits F at every non-witness prefix of the
    persistence part, and a conjunct whose persistence part is also
    negatively determined pins the output to F.  Everything else is bottom.
    """
    pairs = reactivity.pairs
    k = len(pairs)
    acc_r = [r.accepting for r, _ in pairs]
    pos_r = [r.pos_states for r, _ in pairs]
    neg_r = [r.neg_states for r, _ in pairs]
    acc_p = [p.accepting for _, p in pairs]
    pos_p = [p.pos_states for _, p in pairs]
    neg_p = [p.neg_states for _, p in pairs]

    def init():
        return (tuple(r.initial for r, _ in pairs),
                tuple(p.initial for _, p in pairs),
                (_RESP,) * k, (False,) * k, True)

    def step(state, symbol):
        r_states, p_states, phases, fired, _ = state
        r_states = tuple(pairs[i][0].step(r_states[i], symbol) for i in range(k))
        p_states = tuple(pairs[i][1].step(p_states[i], symbol) for i in range(k))
        phases = list(phases)
        fired = list(fired)
        for i in range(k):
            if phases[i] == _RESP:
                if r_states[i] in neg_r[i]:
                    phases[i] = _PERS
                    fired[i] = False
                elif r_states[i] in acc_r[i] or r_states[i] in pos_r[i]:
                    fired[i] = True
            if phases[i] == _PERS and p_states[i] in pos_p[i]:
                phases[i] = _DONE
        if all(fired[i] or phases[i] == _DONE for i in range(k)):
            fired = [False] * k
            emitted_t = True
        else:
            emitted_t = False
        return (r_states, p_states, tuple(phases), tuple(fired), emitted_t)

    def out(state):
        _r_states, p_states, phases, _fired, emitted_t = state
        if any(phases[i] == _PERS and p_states[i] in neg_p[i] for i in range(k)):
            return False  # some conjunct is refuted for every continuation
        if emitted_t:
            return True
        if any(phases[i] == _PERS and p_states[i] not in acc_p[i] for i in range(k)):
            return False
        return dom.BOT

    factory = lambda alphabet: FunctionStepper(init(), step, out)
    return VerdictFunction(dom.BBOT, stepper_factory=factory,
                           monotonicity=Monotonicity.UNRESTRICTED,
                           name=f"reactivity-monitor(k={k})")


def smooth_bot(v):
    """Flatten a bottomed boolean verdict onto the flat domain by repeating
    the last non-bottom output (T before any output arrives)."""

    class _Smooth:
        def __init__(self, alphabet):
            self._inner = v.stepper(alphabet)
            self._last = True if self._inner.value is dom.BOT else self._inner.value
            self.value = self._last

        def step(self, symbol):
            x = self._inner.step(symbol)
            if x is not dom.BOT:
                self._last = x
            self.value = self._last
            return self.value

        def config(self):
            c = self._inner.config()
            return None if c is None else (c, self._last)

    return VerdictFunction(dom.B, stepper_factory=_Smooth,
                           monotonicity=Monotonicity.UNRESTRICTED,
                           name=f"smooth({v.name})")


# -- empirical modality checks -----------------------------------------


@dataclass
class ModalityReport:
    side: Side
    approximate_ok: bool
    universal_ok: bool
    existential_ok: object  # bool, or None when the check was not requested
    approximate_witnesses: list
    universal_witnesses: list
    existential_witnesses: list
    unresolved: list

    def summary(self):
        parts = [f"side={self.side.value}",
                 f"approximate={'pass' if self.approximate_ok else 'FAIL'}",
                 f"universal={'pass' if self.universal_ok else 'FAIL'}"]
        if self.existential_ok is not None:
            parts.append(f"existential={'pass' if self.existential_ok else 'FAIL'}")
        if self.unresolved:
            parts.append(f"unresolved={len(self.unresolved)}")
        return " ".join(parts)


def _limit(verdict, t, side, budget):
    fn = eval_limsup if side is Side.BELOW else eval_liminf
    return fn(verdict, t, budget)


def classify_modality(verdict, prop, side, suite, *, budget=DEFAULT_BUDGET,
                      existential_prefix_len=None, continuation_stems=2,
                      continuation_loops=2):
    """Empirically check approximate/universal/existential monitoring of
    ``prop`` by ``verdict`` on one side, over a finite lasso suite.

    ``prop`` is a lasso evaluator (or an object exposing ``eval_lasso``).
    The existential check is only run when ``existential_prefix_len`` is
    given: it asks, for every finite trace up to that length, whether some
    bounded lasso continuation reaches the property value exactly.
    """
    suite = list(suite)
    prop_fn = getattr(prop, "eval_lasso", prop)
    # compare in the property's domain when it declares one: a coarser
    # verdict codomain (naturals vs. rationals) embeds into it
    d = getattr(prop, "codomain", None) or verdict.codomain
    approx_witnesses, universal_witnesses, unresolved = [], [], []
    for t in suite:
        res = _limit(verdict, t, side, budget)
        pv = prop_fn(t)
        if not res.is_determined:
            unresolved.append(t)
            continue
        ok_approx = d.le(res.value, pv) if side is Side.BELOW else d.le(pv, res.value)
        if not ok_approx:
            approx_witnesses.append((t, res.value, pv))
        if res.value != pv:
            universal_witnesses.append((t, res.value, pv))
    approximate_ok = not approx_witnesses and not unresolved
    universal_ok = not universal_witnesses and not unresolved

    existential_ok = None
    existential_witnesses = []
    if existential_prefix_len is not None:
        alphabet = next(iter(suite)).alphabet
        existential_ok = True
        for s in all_finite_traces(alphabet, existential_prefix_len):
            found = False
            for g in all_lassos(alphabet, continuation_stems, continuation_loops):
                t = g.prepend(s)
                res = _limit(verdict, t, side, budget)
                if res.is_determined and res.value == prop_fn(t):
                    found = True
                    break
            if not found:
                existential_ok = False
                existential_witnesses.append(s)
        existential_ok = existential_ok and not approx_witnesses
    return ModalityReport(side, approximate_ok, universal_ok, existential_ok,
                          approx_witnesses, universal_witnesses,
                          existential_witnesses, unresolved)


# -- canonical and random automata -------------------------------------


def _table(alphabet, rows):
    return {(q, a): rows[q][a] for q in rows for a in alphabet}


def safety_never(alphabet, forbidden):
    """Safety: the forbidden symbol never occurs."""
    rows = {"ok": {a: ("bad" if a == forbidden else "ok") for a in alphabet},
            "bad": {a: "bad" for a in alphabet}}
    return BooleanPropertyAutomaton(alphabet, ("ok", "bad"), "ok",
                                    _table(alphabet, rows),
                                    AcceptanceKind.SAFETY, {"bad"})


def cosafety_eventually(alphabet, target):
    """Co-safety: the target symbol eventually occurs."""
    rows = {"wait": {a: ("good" if a == target else "wait") for a in alphabet},
            "good": {a: "good" for a in alphabet}}
    return BooleanPropertyAutomaton(alphabet, ("wait", "good"), "wait",
                                    _table(alphabet, rows),
                                    AcceptanceKind.COSAFETY, {"good"})


def buchi_infinitely_often(alphabet, target):
    """Response: the target symbol occurs infinitely often."""
    rows = {"hit": {a: ("hit" if a == target else "miss") for a in alphabet},
            "miss": {a: ("hit" if a == target else "miss") for a in alphabet}}
    return BooleanPropertyAutomaton(alphabet, ("hit", "miss"), "miss",
                                    _table(alphabet, rows),
                                    AcceptanceKind.BUCHI, {"hit"})


def cobuchi_eventually_always(alphabet, target):
    """Persistence: eventually only the target symbol occurs."""
    rows = {"hit": {a: ("hit" if a == target else "miss") for a in alphabet},
            "miss": {a: ("hit" if a == target else "miss") for a in alphabet}}
    return BooleanPropertyAutomaton(alphabet, ("hit", "miss"), "miss",
                                    _table(alphabet, rows),
                                    AcceptanceKind.COBUCHI, {"hit"})


def first_symbol_is(alphabet, symbol, kind=AcceptanceKind.SAFETY):
    """Both safe and co-safe: the first observation equals ``symbol``."""
    rows = {"start": {a: ("yes" if a == symbol else "no") for a in alphabet},
            "yes": {a: "yes" for a in alphabet},
            "no": {a: "no" for a in alphabet}}
    accepting = {"no"} if kind is AcceptanceKind.SAFETY else {"yes"}
    return BooleanPropertyAutomaton(alphabet, ("start", "yes", "no"), "start",
                                    _table(alphabet, rows), kind, accepting)


def empty_cobuchi(alphabet):
    """The empty persistence property (no accepting states)."""
    rows = {"q": {a: "q" for a in alphabet}}
    return BooleanPropertyAutomaton(alphabet, ("q",), "q", _table(alphabet, rows),
                                    AcceptanceKind.COBUCHI, set())


def random_safety_automaton(rng, alphabet, n_states=3):
    """Random total DFA with one absorbing bad state."""
    names = [f"q{i}" for i in range(n_states)] + ["bad"]
    transitions = {}
    for q in names:
        for a in alphabet:
            transitions[(q, a)] = "bad" if q == "bad" else rng.choice(names)
    return BooleanPropertyAutomaton(alphabet, names, "q0", transitions,
                                    AcceptanceKind.SAFETY, {"bad"})


def random_cosafety_automaton(rng, alphabet, n_states=3):
    """Random total DFA with one absorbing good state."""
    names = [f"q{i}" for i in range(n_states)] + ["good"]
    transitions = {}
    for q in names:
        for a in alphabet:
            transitions[(q, a)] = "good" if q == "good" else rng.choice(names)
    return BooleanPropertyAutomaton(alphabet, names, "q0", transitions,
                                    AcceptanceKind.COSAFETY, {"good"})


def random_obligation_list(rng, alphabet, k):
    return ObligationList(tuple(
        (random_safety_automaton(rng, alphabet), random_cosafety_automaton(rng, alphabet))
        for _ in range(k)))


# -- file format --------------------------------------------------------


def load_automaton(text):
    """Parse the line-based automaton format.

    Required lines: ``alphabet:``, ``states:``, ``initial:``,
    ``accept-kind:``, ``accept:`` plus one ``q a -> q'`` line per
    (state, symbol).  For safety automata the accept set lists the bad trap
    states; for co-safety automata the good trap states.
    """
    header = {}
    transition_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if sep and key in ("alphabet", "states", "initial", "accept-kind", "accept"):
            header[key] = rest.split()
        else:
            transition_lines.append((lineno, line))
    for required in ("alphabet", "states", "initial", "accept-kind"):
        if required not in header:
            raise AutomatonError(f"missing '{required}:' line")
    alphabet = Alphabet(tuple(header["alphabet"]))
    try:
        kind = AcceptanceKind(header["accept-kind"][0])
    except (ValueError, IndexError):
        raise AutomatonError(f"bad accept-kind {header['accept-kind']}")
    if len(header["initial"]) != 1:
        raise AutomatonError("initial must name exactly one state")
    transitions = {}
    for lineno, line in transition_lines:
        parts = line.split()
        if len(parts) != 4 or parts[2] != "->":
            raise AutomatonError(f"line {lineno}: expected 'q a -> q2', got {line!r}")
        q, a, _, q2 = parts
        if (q, a) in transitions:
            raise AutomatonError(f"line {lineno}: duplicate transition for ({q}, {a})")
        transitions[(q, a)] = q2
    return BooleanPropertyAutomaton(alphabet, tuple(header["states"]),
                                    header["initial"][0], transitions, kind,
                                    set(header.get("accept", ())))


def render_automaton(P):
    lines = [f"alphabet: {' '.join(P.alphabet)}",
             f"states: {' '.join(P.states)}",
             f"initial: {P.initial}",
             f"accept-kind: {P.kind.value}",
             f"accept: {' '.join(sorted(P.accepting))}"]
    for q in P.states:
        for a in P.alphabet:
            lines.append(f"{q} {a} -> {P.transitions[(q, a)]}")
    return "\n".join(lines) + "\n"
