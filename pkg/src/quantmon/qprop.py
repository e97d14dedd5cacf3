"""Ground-truth evaluators for quantitative trace properties on lassos.

The request/acknowledgement properties run over a server alphabet with
(req, ack) pairs plus a neutral token.  The response time of a pair counts
the observations after the request up to and including the acknowledgement,
so an immediately acknowledged request has response time 1.

Each property carries a lasso evaluator (its exact value on an ultimately
periodic trace) and, where a closed form exists, the best/worst-continuation
functionals used by the continuity checks; otherwise those are approximated
by a bounded search over lasso continuations.
"""

import random
from dataclasses import dataclass
from fractions import Fraction

from . import domain as dom
from .boolprop import AcceptanceKind
from .errors import AcceptanceKindError, AutomatonError, DomainMismatchError
from .trace import Alphabet, FiniteTrace, all_lassos, lasso, random_lasso
from .verdict import FunctionStepper, Monotonicity, VerdictFunction


@dataclass(frozen=True)
class ServerAlphabet:
    req_tokens: tuple
    ack_tokens: tuple
    other_token: str = "other"

    def __post_init__(self):
        if len(self.req_tokens) != len(self.ack_tokens) or not self.req_tokens:
            raise ValueError("request and acknowledgement token lists must pair up")

    @property
    def k(self):
        return len(self.req_tokens)

    @property
    def alphabet(self):
        tokens = []
        for r, a in zip(self.req_tokens, self.ack_tokens):
            tokens.extend((r, a))
        tokens.append(self.other_token)
        return Alphabet(tuple(tokens))


def server_alphabet(k=1):
    """The standard server alphabet: req/ack for one pair, req1/ack1/... beyond."""
    if k == 1:
        return ServerAlphabet(("req",), ("ack",))
    return ServerAlphabet(tuple(f"req{i}" for i in range(1, k + 1)),
                          tuple(f"ack{i}" for i in range(1, k + 1)))


# -- maximal response time ----------------------------------------------

_IDLE, _PEND, _DEAD = "i", "p", "d"


def _mrt_step(state, symbol, req="req", ack="ack"):
    mode, m, n = state
    if mode == _DEAD:
        return state
    if mode == _IDLE:
        if symbol == req:
            return (_PEND, m, 0)
        return state
    if symbol == req:
        return (_DEAD, m, n)
    if symbol == ack:
        return (_IDLE, max(m, n + 1), 0)
    return (_PEND, m, n + 1)


def _mrt_out(state):
    mode, m, n = state
    if mode == _DEAD:
        return dom.INF
    if mode == _PEND:
        return max(m, n)
    return m


def mrt(s, req="req", ack="ack"):
    """Maximal response time of a finite trace (infinite on double requests)."""
    state = (_IDLE, 0, 0)
    for sym in s:
        state = _mrt_step(state, sym, req, ack)
    return _mrt_out(state)


def mrt_verdict(req="req", ack="ack"):
    factory = lambda alphabet: FunctionStepper(
        (_IDLE, 0, 0), lambda st, sym: _mrt_step(st, sym, req, ack), _mrt_out)
    return VerdictFunction(dom.NATINF, stepper_factory=factory,
                           monotonicity=Monotonicity.INCREASING, name="mrt")


def eval_mrt(t, req="req", ack="ack"):
    """Limit of the maximal-response-time verdict on a lasso."""
    state = (_IDLE, 0, 0)
    for sym in t.stem:
        state = _mrt_step(state, sym, req, ack)
    checkpoints = []
    for _ in range(4):
        for sym in t.loop:
            state = _mrt_step(state, sym, req, ack)
        checkpoints.append(_mrt_out(state))
    mode = state[0]
    if mode == _DEAD:
        return dom.INF
    if mode == _PEND and ack not in t.loop.symbols:
        return dom.INF
    assert checkpoints[-1] == checkpoints[-2], "response pattern failed to stabilize"
    return checkpoints[-1]


# -- average response time ----------------------------------------------


def _art_step(state, symbol):
    mode, total, count, since = state
    if mode == _DEAD:
        return state
    if mode == _IDLE:
        if symbol == "req":
            return (_PEND, total, count, 0)
        return state
    if symbol == "req":
        return (_DEAD, total, count, since)
    if symbol == "ack":
        return (_IDLE, total + since + 1, count + 1, 0)
    return (_PEND, total, count, since + 1)


def _art_out(state):
    mode, total, count, since = state
    if mode == _DEAD:
        return dom.INF
    if mode == _PEND:
        return Fraction(total + since, count + 1)
    return Fraction(total, count) if count else Fraction(0)


def art(s):
    """Average response time of a finite trace; 0 before the first pair."""
    state = (_IDLE, 0, 0, 0)
    for sym in s:
        state = _art_step(state, sym)
    return _art_out(state)


def art_verdict():
    factory = lambda alphabet: FunctionStepper((_IDLE, 0, 0, 0), _art_step, _art_out)
    return VerdictFunction(dom.RATINF, stepper_factory=factory,
                           monotonicity=Monotonicity.UNRESTRICTED, name="art")


def eval_art(t):
    """Long-run average response time of a lasso.

    Infinite after a double request or an eternally pending request; the
    periodic per-loop average when the loop keeps completing pairs; the
    final prefix average otherwise.
    """
    state = (_IDLE, 0, 0, 0)
    for sym in t.stem:
        state = _art_step(state, sym)
    lv = len(t.loop)
    period_total = period_count = 0
    for it in range(6):
        for sym in t.loop:
            before = state
            state = _art_step(state, sym)
            if it == 4 and before[0] == _PEND and state[0] == _IDLE:
                period_total += before[3] + 1
                period_count += 1
    if state[0] == _DEAD:
        return dom.INF
    if state[0] == _PEND and "ack" not in t.loop.symbols:
        return dom.INF
    if period_count:
        return Fraction(period_total, period_count)
    return _art_out(state)


# -- per-pair response times --------------------------------------------


def _project_server(t, req, ack):
    base = server_alphabet(1).alphabet
    rename = lambda sym: "req" if sym == req else ("ack" if sym == ack else "other")
    return lasso([rename(s) for s in t.stem], [rename(s) for s in t.loop], base)


def eval_kpair_mrt(t, k):
    """Componentwise maximal response times over a k-pair server alphabet."""
    sa = server_alphabet(k)
    if set(sa.alphabet.symbols) != set(t.alphabet.symbols):
        raise DomainMismatchError(
            f"trace alphabet {t.alphabet.symbols} is not the {k}-pair server alphabet")
    return tuple(eval_mrt(_project_server(t, r, a))
                 for r, a in zip(sa.req_tokens, sa.ack_tokens))


# -- discounted safety and co-safety ------------------------------------


def _first_hit(P, t, targets):
    """1-based index of the first prefix of ``t`` whose state is in targets,
    scanning stem plus |Q| loop unrollings; None if never."""
    q = P.run_state(FiniteTrace((), t.alphabet))
    if q in targets:
        return 0
    idx = 0
    for sym in t.stem:
        idx += 1
        q = P.step(q, sym)
        if q in targets:
            return idx
    for _ in range(len(P.states)):
        for sym in t.loop:
            idx += 1
            q = P.step(q, sym)
            if q in targets:
                return idx
    return None


def eval_discounted_safety(P, t):
    """1 when no prefix refutes the safety property, else 1 - 2^-n for the
    shortest refuting prefix length n."""
    if P.kind is not AcceptanceKind.SAFETY:
        raise AcceptanceKindError("discounted safety needs a safety automaton")
    n = _first_hit(P, t, P.neg_states)
    if n is None:
        return Fraction(1)
    return 1 - Fraction(1, 2 ** n)


def eval_discounted_cosafety(P, t):
    """2^-n for the shortest confirming prefix length n, 0 when never."""
    if P.kind is not AcceptanceKind.COSAFETY:
        raise AcceptanceKindError("discounted co-safety needs a co-safety automaton")
    n = _first_hit(P, t, P.pos_states)
    if n is None:
        return Fraction(0)
    return Fraction(1, 2 ** n)


def _shortest_distance(P, q, targets):
    """Fewest steps from q into ``targets`` (None if unreachable)."""
    if q in targets:
        return 0
    dist = {q: 0}
    frontier = [q]
    while frontier:
        nxt_frontier = []
        for cur in frontier:
            for a in P.alphabet:
                nxt = P.step(cur, a)
                if nxt in dist:
                    continue
                dist[nxt] = dist[cur] + 1
                if nxt in targets:
                    return dist[nxt]
                nxt_frontier.append(nxt)
        frontier = nxt_frontier
    return None


def _longest_avoidance(P, q, targets):
    """Maximal steps staying outside ``targets`` from q, or None when some
    run avoids the targets forever."""
    avoid = frozenset(P.states) - frozenset(targets)
    region = P.reachable(q, allowed=avoid)
    if P._has_cycle_within(region):
        return None
    memo = {}

    def depth(state):
        if state in memo:
            return memo[state]
        best = 0
        for a in P.alphabet:
            nxt = P.step(state, a)
            best = max(best, 1 if nxt in targets else 1 + depth(nxt))
        memo[state] = best
        return best

    return depth(q) if q in avoid else 0


def _disc_run_info(P, s, targets):
    q = P.initial
    hit = 0 if q in targets else None
    for i, sym in enumerate(s, start=1):
        q = P.step(q, sym)
        if hit is None and q in targets:
            hit = i
    return q, hit


def _disc_safety_nu(P, s):
    q, hit = _disc_run_info(P, s, P.neg_states)
    if hit is not None:
        return 1 - Fraction(1, 2 ** hit)
    latest = _longest_avoidance(P, q, P.neg_states)
    if latest is None:
        return Fraction(1)
    return 1 - Fraction(1, 2 ** (len(s) + latest))


def _disc_safety_mu(P, s):
    q, hit = _disc_run_info(P, s, P.neg_states)
    if hit is not None:
        return 1 - Fraction(1, 2 ** hit)
    d = _shortest_distance(P, q, P.neg_states)
    if d is None:
        return Fraction(1)
    return 1 - Fraction(1, 2 ** (len(s) + d))


def _disc_cosafety_nu(P, s):
    q, hit = _disc_run_info(P, s, P.pos_states)
    if hit is not None:
        return Fraction(1, 2 ** hit)
    d = _shortest_distance(P, q, P.pos_states)
    if d is None:
        return Fraction(0)
    return Fraction(1, 2 ** (len(s) + d))


def _disc_cosafety_mu(P, s):
    q, hit = _disc_run_info(P, s, P.pos_states)
    if hit is not None:
        return Fraction(1, 2 ** hit)
    latest = _longest_avoidance(P, q, P.pos_states)
    if latest is None:
        return Fraction(0)
    return Fraction(1, 2 ** (len(s) + latest))


# -- energy --------------------------------------------------------------


class WeightedAutomaton:
    """Deterministic total automaton with integer edge weights."""

    def __init__(self, alphabet, states, initial, transitions):
        self.alphabet = alphabet
        self.states = tuple(states)
        self.initial = initial
        self.transitions = dict(transitions)
        if self.initial not in self.states:
            raise AutomatonError(f"initial state {initial!r} unknown")
        for q in self.states:
            for a in alphabet:
                if (q, a) not in self.transitions:
                    raise AutomatonError(f"missing weighted transition from {q!r} on {a!r}")
                nxt, w = self.transitions[(q, a)]
                if nxt not in self.states or not isinstance(w, int):
                    raise AutomatonError(f"bad weighted transition ({q!r}, {a!r})")

    def step(self, state, symbol):
        return self.transitions[(state, symbol)]

    def level(self, s):
        """Sum of edge weights along the run of a finite trace."""
        q, total = self.initial, 0
        for sym in s:
            q, w = self.step(q, sym)
            total += w
        return total


def eval_energy(A, t):
    """Least initial credit keeping every prefix level nonnegative; infinite
    when the lasso's recurrent cycle on A loses energy."""
    q, total, lowest = A.initial, 0, 0
    for sym in t.stem:
        q, w = A.step(q, sym)
        total += w
        lowest = min(lowest, total)
    boundary = {q: total}
    for _ in range(len(A.states) + 1):
        for sym in t.loop:
            q, w = A.step(q, sym)
            total += w
            lowest = min(lowest, total)
        if q in boundary:
            if total < boundary[q]:
                return dom.INF
            return max(0, -lowest)
        boundary[q] = total
    raise AssertionError("loop boundary state must repeat within |Q|+1 iterations")


def energy_verdict(A):
    """Monotone deficit tracker: the least credit covering the prefixes so far."""

    def step(state, symbol):
        q, total, lowest = state
        q2, w = A.step(q, symbol)
        return (q2, total + w, min(lowest, total + w))

    factory = lambda alphabet: FunctionStepper((A.initial, 0, 0), step,
                                               lambda st: -st[2])
    return VerdictFunction(dom.INTINF, stepper_factory=factory,
                           monotonicity=Monotonicity.INCREASING, name="energy")


def load_weighted_automaton(text):
    """Line-based weighted automaton: header lines plus ``q a -> q2 w``."""
    header = {}
    transition_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if sep and key in ("alphabet", "states", "initial"):
            header[key] = rest.split()
        else:
            transition_lines.append((lineno, line))
    for required in ("alphabet", "states", "initial"):
        if required not in header:
            raise AutomatonError(f"missing '{required}:' line")
    alphabet = Alphabet(tuple(header["alphabet"]))
    transitions = {}
    for lineno, line in transition_lines:
        parts = line.split()
        if len(parts) != 5 or parts[2] != "->":
            raise AutomatonError(f"line {lineno}: expected 'q a -> q2 w', got {line!r}")
        q, a, _, q2, w = parts
        try:
            transitions[(q, a)] = (q2, int(w))
        except ValueError:
            raise AutomatonError(f"line {lineno}: weight must be an integer")
    return WeightedAutomaton(alphabet, tuple(header["states"]), header["initial"][0],
                             transitions)


# -- properties and continuation functionals -----------------------------


@dataclass
class QuantitativeProperty:
    """A lassoevaluator with optional closed-form continuation functionals."""
    name: str
    codomain: dom.ValueDomain
    eval_lasso: object
    alphabet: Alphabet = None
    nu_at: object = None
    mu_at: object = None


@dataclass(frozen=True)
class LassoSearchBudget:
    max_stem: int = 3
    max_loop: int = 3
    samples: int = 1000
    seed: int = 42


DEFAULT_SEARCH = LassoSearchBudget()


def _continuations(alphabet, search):
    if len(alphabet) <= 3:
        yield from all_lassos(alphabet, search.max_stem, search.max_loop)
    else:
        rng = random.Random(search.seed)
        for _ in range(search.samples):
            yield random_lasso(rng, alphabet, search.max_stem, search.max_loop)


def nu(p, s, search=DEFAULT_SEARCH):
    """sup of the property over all continuations of ``s``: closed form when
    available, otherwise a bounded-search lower bound of the true sup."""
    if p.nu_at is not None:
        return p.nu_at(s)
    values = [p.eval_lasso(g.prepend(s.symbols)) for g in _continuations(s.alphabet, search)]
    return p.codomain.sup(values)


def mu(p, s, search=DEFAULT_SEARCH):
    """inf of the property over all continuations of ``s``: closed form when
    available, otherwise a bounded-search upper bound of the true inf."""
    if p.mu_at is not None:
        return p.mu_at(s)
    values = [p.eval_lasso(g.prepend(s.symbols)) for g in _continuations(s.alphabet, search)]
    return p.codomain.inf(values)


def mrt_property():
    def mu_at(s):
        state = (_IDLE, 0, 0)
        for sym in s:
            state = _mrt_step(state, sym)
        mode, m, n = state
        if mode == _DEAD:
            return dom.INF
        if mode == _PEND:
            return max(m, n + 1)
        return m

    return QuantitativeProperty("mrt", dom.NATINF, eval_mrt,
                                alphabet=server_alphabet(1).alphabet,
                                nu_at=lambda s: dom.INF, mu_at=mu_at)


def art_property():
    def mu_at(s):
        state = (_IDLE, 0, 0, 0)
        for sym in s:
            state = _art_step(state, sym)
        mode, _total, count, _since = state
        if mode == _DEAD:
            return dom.INF
        if mode == _IDLE and count == 0:
            return Fraction(0)
        return Fraction(1)

    return QuantitativeProperty("art", dom.RATINF, eval_art,
                                alphabet=server_alphabet(1).alphabet,
                                nu_at=lambda s: dom.INF, mu_at=mu_at)


def kpair_property(k):
    sa = server_alphabet(k)
    top = (dom.INF,) * k
    return QuantitativeProperty(f"kmrt:{k}", dom.product(dom.NATINF, k),
                                lambda t: eval_kpair_mrt(t, k),
                                alphabet=sa.alphabet,
                                nu_at=lambda s: top)


def discounted_safety_property(P):
    return QuantitativeProperty("disc-safe", dom.RATINF,
                                lambda t: eval_discounted_safety(P, t),
                                alphabet=P.alphabet,
                                nu_at=lambda s: _disc_safety_nu(P, s),
                                mu_at=lambda s: _disc_safety_mu(P, s))


def discounted_cosafety_property(P):
    return QuantitativeProperty("disc-cosafe", dom.RATINF,
                                lambda t: eval_discounted_cosafety(P, t),
                                alphabet=P.alphabet,
                                nu_at=lambda s: _disc_cosafety_nu(P, s),
                                mu_at=lambda s: _disc_cosafety_mu(P, s))


def energy_property(A):
    return QuantitativeProperty("energy", dom.INTINF,
                                lambda t: eval_energy(A, t),
                                alphabet=A.alphabet)


# -- continuity ----------------------------------------------------------


@dataclass
class ContinuityReport:
    """Outcome of the two independent sampled checks.

    ``continuity_witness`` (trace, limit-estimate, property-value) is set
    when the best-continuation limit provably exceeds the property value on
    some suite trace; dually for ``cocontinuity_witness``.  A None witness
    means the suite is consistent with the respective notion, which is
    evidence, not proof.
    """
    continuous_consistent: bool
    continuity_witness: object
    cocontinuous_consistent: bool
    cocontinuity_witness: object


def _stalled_gap(d, tail, pv, above):
    """The functional's last-window values agree and sit strictly on the
    wrong side of the property value.  Requiring the stall keeps a sequence
    that is still converging toward the value from being mistaken for a gap."""
    if any(x != tail[0] for x in tail[1:]):
        return False
    return d.lt(pv, tail[0]) if above else d.lt(tail[0], pv)


def check_continuity(p, suite, depth=6, search=DEFAULT_SEARCH, window=3):
    d = p.codomain
    continuity_witness = None
    cocontinuity_witness = None
    for t in suite:
        pv = p.eval_lasso(t)
        nus = [nu(p, t.prefix(i), search) for i in range(depth + 1)]
        mus = [mu(p, t.prefix(i), search) for i in range(depth + 1)]
        if continuity_witness is None and _stalled_gap(d, nus[-window:], pv, above=True):
            continuity_witness = (t, nus[-1], pv)
        if cocontinuity_witness is None and _stalled_gap(d, mus[-window:], pv, above=False):
            cocontinuity_witness = (t, mus[-1], pv)
        if continuity_witness and cocontinuity_witness:
            break
    return ContinuityReport(continuity_witness is None, continuity_witness,
                            cocontinuity_witness is None, cocontinuity_witness)


def continuity_suite(alphabet, max_stem=2, max_loop=2, extras=()):
    """Small exhaustive lasso suite plus caller-chosen witness traces."""
    traces = list(all_lassos(alphabet, max_stem, max_loop))
    traces.extend(extras)
    return traces
