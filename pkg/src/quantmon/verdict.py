"""Verdict functions and their limits along lasso traces.

A verdict function maps finite traces into a value domain; the monitor's
estimate for an infinite trace is the limsup (or liminf) of the verdict
values along its prefixes.  On a lasso ``u ; v`` the engine watches the
verdict values produced inside consecutive loop iterations and resolves the
limit three ways, in order of preference:

1.  *Configuration cycle* (early exit, sound): if the verdict exposes a
    hashable run configuration and the configuration at a loop boundary
    repeats, the values inside the detected cycle recur forever, so their
    sup/inf is the exact limit.
2.  *Stable window*: once the iteration budget is exhausted, per-iteration
    extrema that are identical (or periodic) over the final confirmation
    window report an exact limit.  Counter-style machines produce
    eventually periodic output on lassos, which this settles; for anything
    else the window is a heuristic.
3.  *Arithmetic escape*: final-window extrema moving by a constant nonzero
    step extrapolate to the domain's extremal element.

Window checks deliberately wait for the full budget: early windows can
mistake a transient (a counter still climbing toward a guard threshold)
for settled behaviour.  Everything else is reported Undetermined, never
guessed.
"""

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import domain as dom
from .errors import NoBoundError, UnsupportedDomainError, InvalidFunctionError
from .trace import FiniteTrace


class Monotonicity(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    UNRESTRICTED = "unrestricted"


class _ReplayStepper:
    """Fallback stepper: re-evaluates the verdict on each grown prefix."""

    def __init__(self, verdict, alphabet):
        self._verdict = verdict
        self._alphabet = alphabet
        self._symbols = []
        self.value = verdict(FiniteTrace((), alphabet))

    def step(self, symbol):
        self._symbols.append(symbol)
        self.value = self._verdict(FiniteTrace(tuple(self._symbols), self._alphabet))
        return self.value

    def config(self):
        return None


class FunctionStepper:
    """Stepper driven by a pure state-transition function.

    ``init`` is the start state, ``step_fn(state, symbol) -> state``, and
    ``out_fn(state) -> value``.  States must be hashable for cycle detection;
    pass ``hashable=False`` to opt out.
    """

    def __init__(self, init, step_fn, out_fn, hashable=True):
        self._state = init
        self._step_fn = step_fn
        self._out_fn = out_fn
        self._hashable = hashable
        self.value = out_fn(init)

    def step(self, symbol):
        self._state = self._step_fn(self._state, symbol)
        self.value = self._out_fn(self._state)
        return self.value

    def config(self):
        return self._state if self._hashable else None


class VerdictFunction:
    """A total, deterministic map from finite traces to domain values."""

    def __init__(self, codomain, evaluate=None, stepper_factory=None,
                 monotonicity=Monotonicity.UNRESTRICTED, name="v"):
        if evaluate is None and stepper_factory is None:
            raise ValueError("verdict needs an evaluator or a stepper factory")
        self.codomain = codomain
        self.monotonicity = monotonicity
        self.name = name
        self._evaluate = evaluate
        self._stepper_factory = stepper_factory

    def __call__(self, trace):
        if self._evaluate is not None:
            return self._evaluate(trace)
        st = self.stepper(trace.alphabet)
        for sym in trace:
            st.step(sym)
        return st.value

    def stepper(self, alphabet):
        if self._stepper_factory is not None:
            return self._stepper_factory(alphabet)
        return _ReplayStepper(self, alphabet)

    def __repr__(self):
        return f"<verdict {self.name} on {self.codomain.name}>"


def constant_verdict(codomain, value, name=None):
    codomain.check(value)
    factory = lambda alphabet: FunctionStepper((), lambda st, sym: st, lambda st: value)
    return VerdictFunction(codomain, evaluate=lambda s: value,
                           stepper_factory=factory,
                           monotonicity=Monotonicity.INCREASING,
                           name=name or f"const({dom.render_value(value)})")


class LimitKind(enum.Enum):
    EXACT = "exact"
    TOLERANCE = "tolerance"
    DIVERGED_TO_TOP = "diverged-to-top"
    DIVERGED_TO_BOTTOM = "diverged-to-bottom"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class LimitResult:
    value: object
    kind: LimitKind
    iterations_used: int
    epsilon: object = None

    @property
    def is_determined(self):
        return self.kind is not LimitKind.UNDETERMINED

    def render(self):
        return f"{self.kind.value},{dom.render_value(self.value)}"


@dataclass(frozen=True)
class LimitBudget:
    max_loop_iterations: int = 1024
    confirm_window: int = 3
    epsilon: Fraction = Fraction(0)
    max_period: int = 6

    def __post_init__(self):
        if not (self.max_loop_iterations >= self.confirm_window >= 2):
            raise ValueError("need max_loop_iterations >= confirm_window >= 2")


DEFAULT_BUDGET = LimitBudget()


def _finite_number(v):
    return dom.is_numeric(v) and v != dom.INF and v != dom.NEG_INF


def _window_equal(maxima, window):
    tail = maxima[-window:]
    if len(tail) < window or any(m is None for m in tail):
        return None
    first = tail[0]
    if all(m == first for m in tail[1:]):
        return first
    return None


def _window_periodic(d, maxima, window, max_period, take_sup):
    for period in range(2, max_period + 1):
        need = period * window
        tail = maxima[-need:]
        if len(tail) < need or any(m is None for m in tail):
            continue
        if all(tail[i] == tail[i % period] for i in range(need)):
            try:
                combine = d.sup if take_sup else d.inf
                return combine(tail[:period])
            except NoBoundError:
                continue
    return None


def _extrapolate_scalar(d, tail):
    diffs = [tail[i + 1] - tail[i] for i in range(len(tail) - 1)]
    if any(df != diffs[0] for df in diffs) or diffs[0] == 0:
        return None
    limit = dom.INF if diffs[0] > 0 else dom.NEG_INF
    if not d.contains(limit):
        return None
    return limit


def _window_diverged(d, maxima, window, take_sup):
    tail = maxima[-(window + 1):]
    if len(tail) < window + 1 or any(m is None for m in tail):
        return None
    if isinstance(d, dom.ProductDomain):
        if not all(isinstance(m, tuple) and all(_finite_number(c) for c in m) for m in tail):
            return None
        comps = []
        moved = False
        for i in range(d.arity):
            col = [m[i] for m in tail]
            diffs = [col[j + 1] - col[j] for j in range(len(col) - 1)]
            if any(df != diffs[0] for df in diffs):
                return None
            if diffs[0] == 0:
                comps.append(col[-1])
            else:
                lim = dom.INF if diffs[0] > 0 else dom.NEG_INF
                if not d.inner.contains(lim):
                    return None
                comps.append(lim)
                moved = True
        if not moved:
            return None
        value = tuple(comps)
        kind = LimitKind.DIVERGED_TO_TOP if any(c == dom.INF for c in comps) \
            else LimitKind.DIVERGED_TO_BOTTOM
        return value, kind
    if not all(_finite_number(m) for m in tail):
        return None
    limit = _extrapolate_scalar(d, tail)
    if limit is None:
        return None
    if limit == d.top:
        return limit, LimitKind.DIVERGED_TO_TOP
    if limit == d.bottom:
        return limit, LimitKind.DIVERGED_TO_BOTTOM
    return None


def _window_tolerance(maxima, window, epsilon):
    if epsilon <= 0:
        return None
    tail = maxima[-(window + 1):]
    if len(tail) < window + 1 or not all(m is not None and _finite_number(m) for m in tail):
        return None
    if all(abs(tail[i + 1] - tail[i]) <= epsilon for i in range(len(tail) - 1)):
        return tail[-1]
    return None


def _eval_limit(verdict, t, budget, take_sup):
    d = verdict.codomain
    st = verdict.stepper(t.alphabet)
    for sym in t.stem:
        st.step(sym)
    combine = d.sup if take_sup else d.inf
    window = budget.confirm_window
    maxima = []
    iteration_values = []
    seen = {}
    for k in range(budget.max_loop_iterations):
        cfg = st.config()
        if cfg is not None:
            if cfg in seen:
                # the run configuration recurs, so the values inside the
                # cycle repeat forever: their extremum is the exact limit
                j = seen[cfg]
                cycle_vals = [v for it in iteration_values[j:] for v in it]
                try:
                    return LimitResult(combine(cycle_vals), LimitKind.EXACT, k)
                except NoBoundError:
                    return LimitResult(None, LimitKind.UNDETERMINED, k)
            seen[cfg] = k
        vals = [st.step(sym) for sym in t.loop]
        iteration_values.append(vals)
        try:
            maxima.append(combine(vals))
        except NoBoundError:
            maxima.append(None)
        if budget.epsilon > 0:
            m = _window_tolerance(maxima, window, budget.epsilon)
            if m is not None:
                return LimitResult(m, LimitKind.TOLERANCE, k + 1, epsilon=budget.epsilon)
    # Window heuristics judge only the final iterations: deciding on an
    # early window would mistake transients (a counter still climbing
    # toward saturation, a guard about to flip) for settled behaviour.
    used = budget.max_loop_iterations
    m = _window_equal(maxima, window)
    if m is not None:
        return LimitResult(m, LimitKind.EXACT, used)
    m = _window_periodic(d, maxima, window, budget.max_period, take_sup)
    if m is not None:
        return LimitResult(m, LimitKind.EXACT, used)
    div = _window_diverged(d, maxima, window, take_sup)
    if div is not None:
        value, kind = div
        return LimitResult(value, kind, used)
    return LimitResult(None, LimitKind.UNDETERMINED, used)


def eval_limsup(verdict, t, budget=DEFAULT_BUDGET):
    """Limit superior of the verdict sequence along the lasso ``t``."""
    return _eval_limit(verdict, t, budget, take_sup=True)


def eval_liminf(verdict, t, budget=DEFAULT_BUDGET):
    """Limit inferior of the verdict sequence along the lasso ``t``."""
    return _eval_limit(verdict, t, budget, take_sup=False)


def check_monotone(verdict, suite, depth):
    """Classify a verdict over all prefix chains of the suite up to ``depth``.

    Returns INCREASING, DECREASING, or UNRESTRICTED (neither: both a strict
    increase and a strict decrease, or an incomparable step, were witnessed).
    Constant verdicts classify as Increasing: the tie is broken toward
    Increasing so the result is deterministic.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    d = verdict.codomain
    saw_inc = saw_dec = saw_incomparable = False
    for t in suite:
        st = verdict.stepper(t.alphabet)
        prev = st.value
        for i in range(depth):
            cur = st.step(t.symbol_at(i))
            rel = d.leq(prev, cur)
            if rel is dom.INCOMPARABLE:
                saw_incomparable = True
            elif rel is True:
                if prev != cur:
                    saw_inc = True
            else:
                saw_dec = True
            prev = cur
    if saw_incomparable or (saw_inc and saw_dec):
        return Monotonicity.UNRESTRICTED
    if saw_dec:
        return Monotonicity.DECREASING
    return Monotonicity.INCREASING


class _PairStepper:
    def __init__(self, st1, st2, combine):
        self._st1 = st1
        self._st2 = st2
        self._combine = combine
        self.value = combine(st1.value, st2.value)

    def step(self, symbol):
        a = self._st1.step(symbol)
        b = self._st2.step(symbol)
        self.value = self._combine(a, b)
        return self.value

    def config(self):
        c1, c2 = self._st1.config(), self._st2.config()
        if c1 is None or c2 is None:
            return None
        return (c1, c2)


def _combine(v1, v2, pointwise, name, monotonicity):
    if v1.codomain != v2.codomain:
        raise UnsupportedDomainError(
            f"cannot combine verdicts over {v1.codomain.name} and {v2.codomain.name}")
    factory = lambda alphabet: _PairStepper(v1.stepper(alphabet), v2.stepper(alphabet), pointwise)
    return VerdictFunction(v1.codomain,
                           evaluate=lambda s: pointwise(v1(s), v2(s)),
                           stepper_factory=factory,
                           monotonicity=monotonicity,
                           name=name)


def _joint_monotonicity(v1, v2):
    if v1.monotonicity is Monotonicity.INCREASING and v2.monotonicity is Monotonicity.INCREASING:
        return Monotonicity.INCREASING
    return Monotonicity.UNRESTRICTED


def combine_max(v1, v2):
    """Pointwise join of two verdicts over a shared lattice codomain."""
    d = v1.codomain
    if not d.is_lattice:
        raise UnsupportedDomainError(f"{d.name} is not a lattice; max is unsupported")
    return _combine(v1, v2, lambda a, b: d.sup([a, b]),
                    f"max({v1.name},{v2.name})", _joint_monotonicity(v1, v2))


def combine_min(v1, v2):
    """Pointwise meet of two verdicts over a shared lattice codomain."""
    d = v1.codomain
    if not d.is_lattice:
        raise UnsupportedDomainError(f"{d.name} is not a lattice; min is unsupported")
    return _combine(v1, v2, lambda a, b: d.inf([a, b]),
                    f"min({v1.name},{v2.name})", _joint_monotonicity(v1, v2))


def _require_numeric(d):
    base = d.inner if isinstance(d, dom.InverseDomain) else d
    if not isinstance(base, dom.NumericDomain):
        raise UnsupportedDomainError(f"{d.name} is not a numeric domain")


def combine_sum(v1, v2):
    """Pointwise sum; infinity absorbs addition."""
    _require_numeric(v1.codomain)
    return _combine(v1, v2, dom.value_add, f"sum({v1.name},{v2.name})",
                    _joint_monotonicity(v1, v2))


def combine_product(v1, v2):
    """Pointwise product with the convention 0 * inf = 0."""
    _require_numeric(v1.codomain)
    return _combine(v1, v2, dom.value_mul, f"prod({v1.name},{v2.name})",
                    Monotonicity.UNRESTRICTED)


def _monotonicity_samples(d):
    if isinstance(d, dom.BooleanDomain):
        return [v for v in (True, False, dom.BOT, dom.TOP) if d.contains(v)]
    if isinstance(d, dom.NumericDomain):
        pts = [0, 1, 2, 3, 5, 8, 13, 21, -1, -4, Fraction(1, 2), Fraction(4, 3),
               dom.INF, dom.NEG_INF]
        return [p for p in pts if d.contains(p)]
    if isinstance(d, dom.ProductDomain):
        inner = _monotonicity_samples(d.inner)[:4]
        return [t for t in itertools.product(inner, repeat=d.arity)]
    if isinstance(d, dom.InverseDomain):
        return _monotonicity_samples(d.inner)
    return []


def map_continuous(verdict, fn, name=None):
    """Compose a verdict with a monotone unary function on its codomain.

    Monotonicity of ``fn`` is checked on a sample grid; a witnessed
    violation raises InvalidFunctionError.
    """
    d = verdict.codomain
    if not d.is_lattice:
        raise UnsupportedDomainError(f"{d.name} is not a lattice")
    samples = _monotonicity_samples(d)
    for a in samples:
        for b in samples:
            if d.le(a, b) and not d.le(fn(a), fn(b)):
                raise InvalidFunctionError(
                    f"function is not monotone: maps {dom.render_value(a)} <= "
                    f"{dom.render_value(b)} to incomparable/decreasing images")

    class _MapStepper:
        def __init__(self, inner):
            self._inner = inner
            self.value = fn(inner.value)

        def step(self, symbol):
            self.value = fn(self._inner.step(symbol))
            return self.value

        def config(self):
            return self._inner.config()

    return VerdictFunction(d,
                           evaluate=lambda s: fn(verdict(s)),
                           stepper_factory=lambda a: _MapStepper(verdict.stepper(a)),
                           monotonicity=verdict.monotonicity,
                           name=name or f"map({verdict.name})")


_FLIP = {Monotonicity.INCREASING: Monotonicity.DECREASING,
         Monotonicity.DECREASING: Monotonicity.INCREASING,
         Monotonicity.UNRESTRICTED: Monotonicity.UNRESTRICTED}


def complement(verdict):
    """The same evaluator read in the inverse order of its codomain."""
    return VerdictFunction(dom.inverse(verdict.codomain),
                           evaluate=verdict._evaluate,
                           stepper_factory=verdict._stepper_factory
                           if verdict._stepper_factory is not None else
                           (lambda a, v=verdict: _ReplayStepper(v, a)),
                           monotonicity=_FLIP[verdict.monotonicity],
                           name=f"compl({verdict.name})")


def verdict_sequence(verdict, finite_trace):
    """Verdict values over all prefixes of a finite trace, empty prefix included."""
    st = verdict.stepper(finite_trace.alphabet)
    values = [st.value]
    for sym in finite_trace:
        values.append(st.step(sym))
    return values


def count_switches(values):
    """Number of positions where consecutive values differ."""
    return sum(1 for a, b in zip(values, values[1:]) if a != b)


def verdict_csv_lines(verdict, finite_trace):
    """CSV rows ``index,prefix_len,value`` for every prefix of the trace."""
    lines = ["index,prefix_len,value"]
    for i, v in enumerate(verdict_sequence(verdict, finite_trace)):
        lines.append(f"{i},{i},{dom.render_value(v)}")
    return lines
