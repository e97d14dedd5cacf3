"""Deterministic register machines that generate verdict functions.

A machine has named integer registers (all starting at 0), a finite state
graph with guarded edges, and a per-state output map.  Guards are
conjunctions of (possibly negated) ``reg >= reg`` / ``reg >= const`` atoms;
updates are parallel single assignments reading the pre-step valuation.

Determinism and totality are enforced syntactically at build time: the
edges of each (state, symbol) group must enumerate the sign patterns of a
shared atom set exactly once each (a lone edge must carry the trivial
guard).  A seeded valuation probe double-checks the exactly-one-edge
property.

Instruction sets restrict which update and guard forms a machine may use:

* ``counter``: reset/increment updates, register-to-register comparisons;
* ``counter+-``: reset/increment/decrement, comparisons against constants
  (a constant test is shorthand for the repeated decrement-and-test-zero
  idiom, so it costs no extra register);
* ``adder``: set-to-one, add-register, copy updates, register comparisons;
* ``extended``: anything, including outputs that divide registers.

Per-state outputs are either grammar objects (``0``, ``inf``, a register,
or a register quotient) or arbitrary callables for machines whose output
map needs arithmetic the file grammar cannot spell (those machines cannot
be rendered to text).
"""

import enum
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from . import domain as dom
from .errors import MachineError
from .qprop import server_alphabet
from .trace import Alphabet
from .verdict import Monotonicity, VerdictFunction


class InstructionSet(enum.Enum):
    COUNTER = "counter"
    COUNTER_INC_DEC = "counter+-"
    ADDER = "adder"
    EXTENDED = "extended"


@dataclass(frozen=True)
class GuardAtom:
    left: str
    right: object  # register name or integer constant
    negated: bool = False

    def holds(self, valuation):
        rhs = self.right if isinstance(self.right, int) else valuation[self.right]
        return (valuation[self.left] >= rhs) != self.negated

    def render(self):
        body = f"{self.left}>={self.right}"
        return f"!({body})" if self.negated else body

    def complement(self):
        return GuardAtom(self.left, self.right, not self.negated)


@dataclass(frozen=True)
class Guard:
    atoms: tuple = ()

    def holds(self, valuation):
        return all(a.holds(valuation) for a in self.atoms)

    def render(self):
        return " & ".join(a.render() for a in self.atoms) if self.atoms else "true"


TRUE_GUARD = Guard(())

_UPDATE_KINDS = ("zero", "one", "inc", "dec", "add", "copy")


@dataclass(frozen=True)
class Update:
    target: str
    kind: str
    operand: str = None

    def __post_init__(self):
        if self.kind not in _UPDATE_KINDS:
            raise MachineError(f"unknown update kind {self.kind!r}")
        if self.kind in ("add", "copy") and self.operand is None:
            raise MachineError(f"update {self.kind} needs an operand register")

    def value(self, valuation):
        if self.kind == "zero":
            return 0
        if self.kind == "one":
            return 1
        if self.kind == "inc":
            return valuation[self.target] + 1
        if self.kind == "dec":
            return valuation[self.target] - 1
        if self.kind == "add":
            return valuation[self.target] + valuation[self.operand]
        return valuation[self.operand]

    def render(self):
        rhs = {"zero": "0", "one": "1", "inc": f"{self.target}+1",
               "dec": f"{self.target}-1", "add": f"{self.target}+{self.operand}",
               "copy": f"{self.operand}"}[self.kind]
        return f"{self.target}:={rhs}"


@dataclass(frozen=True)
class Edge:
    source: str
    symbol: str
    guard: Guard
    updates: tuple
    target: str


class OutputSpec:
    """Grammar-backed output: 0, inf, a register, or a register quotient."""

    def __init__(self, kind, *regs):
        if kind not in ("zero", "inf", "reg", "div"):
            raise MachineError(f"unknown output kind {kind!r}")
        self.kind = kind
        self.regs = regs

    def eval(self, valuation):
        if self.kind == "zero":
            return 0
        if self.kind == "inf":
            return dom.INF
        if self.kind == "reg":
            return valuation[self.regs[0]]
        num, den = valuation[self.regs[0]], valuation[self.regs[1]]
        return Fraction(num, den) if den else Fraction(0)

    def render(self):
        if self.kind == "zero":
            return "0"
        if self.kind == "inf":
            return "inf"
        if self.kind == "reg":
            return self.regs[0]
        return f"({self.regs[0]})/({self.regs[1]})"


OUT_ZERO = OutputSpec("zero")
OUT_INF = OutputSpec("inf")


def out_reg(x):
    return OutputSpec("reg", x)


def out_div(x, y):
    return OutputSpec("div", x, y)


@dataclass(frozen=True)
class Configuration:
    state: str
    valuation: dict

    def __hash__(self):
        return hash((self.state, tuple(sorted(self.valuation.items()))))


_SET_UPDATES = {
    InstructionSet.COUNTER: {"zero", "inc"},
    InstructionSet.COUNTER_INC_DEC: {"zero", "inc", "dec"},
    InstructionSet.ADDER: {"one", "add", "copy"},
    InstructionSet.EXTENDED: set(_UPDATE_KINDS),
}


def _atom_allowed(atom, iset):
    if iset is InstructionSet.EXTENDED:
        return True
    if iset is InstructionSet.COUNTER_INC_DEC:
        return isinstance(atom.right, int)
    if iset is InstructionSet.COUNTER:
        return not isinstance(atom.right, int) or atom.right == 0
    return not isinstance(atom.right, int)  # adder compares registers


class RegisterMachine:
    def __init__(self, name, registers, states, alphabet, initial, edges, outputs,
                 instruction_set, output_domain, monotonicity=Monotonicity.UNRESTRICTED):
        self.name = name
        self.registers = tuple(registers)
        self.states = tuple(states)
        self.alphabet = alphabet
        self.initial = initial
        self.edges = tuple(edges)
        self.outputs = dict(outputs)
        self.instruction_set = instruction_set
        self.output_domain = output_domain
        self.monotonicity = monotonicity
        self._by_key = {}
        for e in self.edges:
            self._by_key.setdefault((e.source, e.symbol), []).append(e)
        self._validate()

    # -- validation ------------------------------------------------------

    def _validate(self):
        regs = set(self.registers)
        if len(regs) != len(self.registers):
            raise MachineError("duplicate register names")
        if len(set(self.states)) != len(self.states):
            raise MachineError("duplicate state names")
        if self.initial not in self.states:
            raise MachineError(f"unknown initial state {self.initial!r}")
        for e in self.edges:
            if e.source not in self.states or e.target not in self.states:
                raise MachineError(f"edge {e} references unknown states")
            if e.symbol not in self.alphabet:
                raise MachineError(f"edge {e} uses symbol outside the alphabet")
            self._check_instructions(e, regs)
            targets = [u.target for u in e.updates]
            if len(set(targets)) != len(targets):
                raise MachineError(f"edge {e.source}--{e.symbol}: register assigned twice")
        for q in self.states:
            if q not in self.outputs:
                raise MachineError(f"state {q!r} has no output")
            out = self.outputs[q]
            if isinstance(out, OutputSpec):
                for r in out.regs:
                    if r not in regs:
                        raise MachineError(f"output of {q!r} uses unknown register {r!r}")
                if out.kind == "div" and self.instruction_set is not InstructionSet.EXTENDED:
                    raise MachineError("dividing outputs need the extended instruction set")
        for q in self.states:
            for a in self.alphabet:
                group = self._by_key.get((q, a))
                if not group:
                    raise MachineError(f"missing case: no edge from {q!r} on {a!r}")
                self._check_case_split(q, a, group)
        self._probe_determinism()

    def _check_instructions(self, edge, regs):
        iset = self.instruction_set
        for atom in edge.guard.atoms:
            if atom.left not in regs or \
                    (not isinstance(atom.right, int) and atom.right not in regs):
                raise MachineError(f"guard {atom.render()} uses unknown register")
            if not _atom_allowed(atom, iset):
                raise MachineError(
                    f"guard atom {atom.render()} not allowed by instruction set {iset.value}")
        for u in edge.updates:
            if u.target not in regs or (u.operand is not None and u.operand not in regs):
                raise MachineError(f"update {u.render()} uses unknown register")
            if u.kind not in _SET_UPDATES[iset]:
                raise MachineError(
                    f"update {u.render()} not allowed by instruction set {iset.value}")

    def _check_case_split(self, q, a, group):
        if len(group) == 1:
            if group[0].guard.atoms:
                raise MachineError(
                    f"single edge from {q!r} on {a!r} must carry the trivial guard; "
                    f"got [{group[0].guard.render()}]")
            return
        base = {(atom.left, atom.right) for atom in group[0].guard.atoms}
        patterns = set()
        for e in group:
            atoms = e.guard.atoms
            if {(x.left, x.right) for x in atoms} != base or len(atoms) != len(base):
                raise MachineError(
                    f"edges from {q!r} on {a!r} must split cases over one atom set")
            pattern = tuple(sorted((x.left, str(x.right), x.negated) for x in atoms))
            if pattern in patterns:
                raise MachineError(f"overlapping guards from {q!r} on {a!r}")
            patterns.add(pattern)
        if len(patterns) != 2 ** len(base):
            raise MachineError(
                f"guards from {q!r} on {a!r} do not cover all cases "
                f"({len(patterns)} of {2 ** len(base)} sign patterns)")

    def _probe_determinism(self):
        rng = random.Random(7)
        pool = (0, 1, 2, 3, 5, 10)
        probes = [dict.fromkeys(self.registers, 0),
                  dict.fromkeys(self.registers, 2)]
        for _ in range(24):
            probes.append({r: rng.choice(pool) for r in self.registers})
        for (q, a), group in self._by_key.items():
            if len(group) == 1:
                continue
            for valuation in probes:
                hits = sum(1 for e in group if e.guard.holds(valuation))
                if hits != 1:
                    raise MachineError(
                        f"guards from {q!r} on {a!r} select {hits} edges for "
                        f"valuation {valuation}")

    # -- execution ---------------------------------------------------------

    def initial_configuration(self):
        return Configuration(self.initial, dict.fromkeys(self.registers, 0))

    def _fire(self, state, valuation, symbol):
        group = self._by_key.get((state, symbol))
        if group is None:
            raise MachineError(f"symbol {symbol!r} is outside machine {self.name}'s alphabet")
        for e in group:
            if e.guard.holds(valuation):
                new_valuation = dict(valuation)
                for u in e.updates:
                    new_valuation[u.target] = u.value(valuation)
                return e.target, new_valuation
        raise MachineError(f"no guard held from {state!r} on {symbol!r} (valuation {valuation})")

    def output(self, state, valuation):
        out = self.outputs[state]
        if isinstance(out, OutputSpec):
            return out.eval(valuation)
        return out(state, valuation)

    def has_grammar_outputs(self):
        return all(isinstance(o, OutputSpec) for o in self.outputs.values())

    def __repr__(self):
        return (f"<machine {self.name}: {len(self.registers)} registers, "
                f"{len(self.states)} states, {self.instruction_set.value}>")


class MachineRun:
    """Single run of a machine; one instance per trace."""

    def __init__(self, machine):
        self._m = machine
        self._state = machine.initial
        self._valuation = dict.fromkeys(machine.registers, 0)
        self.value = machine.output(self._state, self._valuation)

    def step(self, symbol):
        self._state, self._valuation = self._m._fire(self._state, self._valuation, symbol)
        self.value = self._m.output(self._state, self._valuation)
        return self.value

    def config(self):
        return (self._state, tuple(self._valuation[r] for r in self._m.registers))

    def configuration(self):
        return Configuration(self._state, dict(self._valuation))


def run(machine, s):
    """Run the machine on a finite trace; the final configuration and output."""
    r = MachineRun(machine)
    for sym in s:
        r.step(sym)
    return r.configuration(), r.value


def generated_verdict(machine):
    """The verdict function generated by the machine's output stream."""
    return VerdictFunction(machine.output_domain,
                           evaluate=lambda s: run(machine, s)[1],
                           stepper_factory=lambda alphabet: MachineRun(machine),
                           monotonicity=machine.monotonicity,
                           name=machine.name)


# -- machine text format -------------------------------------------------


def _parse_guard(text):
    text = text.strip()
    if text == "true" or not text:
        return TRUE_GUARD
    atoms = []
    for part in text.split("&"):
        part = part.strip()
        negated = part.startswith("!")
        if negated:
            if not (part.startswith("!(") and part.endswith(")")):
                raise MachineError(f"malformed guard atom {part!r}")
            part = part[2:-1].strip()
        if ">=" not in part:
            raise MachineError(f"malformed guard atom {part!r}")
        left, right = (x.strip() for x in part.split(">=", 1))
        rhs = int(right) if right.lstrip("-").isdigit() else right
        atoms.append(GuardAtom(left, rhs, negated))
    return Guard(tuple(atoms))


def _parse_update(text):
    text = text.strip()
    if ":=" not in text:
        raise MachineError(f"malformed update {text!r}")
    target, rhs = (x.strip() for x in text.split(":=", 1))
    if rhs == "0":
        return Update(target, "zero")
    if rhs == "1":
        return Update(target, "one")
    if rhs == f"{target}+1":
        return Update(target, "inc")
    if rhs == f"{target}-1":
        return Update(target, "dec")
    if rhs.startswith(f"{target}+"):
        return Update(target, "add", rhs[len(target) + 1:].strip())
    return Update(target, "copy", rhs)


def _parse_output(text):
    text = text.strip()
    if text == "0":
        return OUT_ZERO
    if text == "inf":
        return OUT_INF
    if "/" in text:
        num, den = (x.strip() for x in text.split("/", 1))
        if not (num.startswith("(") and num.endswith(")") and
                den.startswith("(") and den.endswith(")")):
            raise MachineError(f"malformed dividing output {text!r}")
        return out_div(num[1:-1].strip(), den[1:-1].strip())
    return out_reg(text)


def _parse_edge(body, lineno):
    head, arrow, target = body.rpartition("->")
    if not arrow:
        raise MachineError(f"line {lineno}: edge has no '->'")
    target = target.strip()
    updates = ()
    if "/" in head:
        head, _, update_text = head.partition("/")
        update_text = update_text.strip()
        if update_text:
            updates = tuple(_parse_update(u) for u in update_text.split(","))
    head = head.strip()
    guard = TRUE_GUARD
    if "[" in head:
        head, _, guard_part = head.partition("[")
        guard_text, bracket, trailing = guard_part.partition("]")
        if not bracket or trailing.strip():
            raise MachineError(f"line {lineno}: malformed guard brackets")
        guard = _parse_guard(guard_text)
    parts = head.split()
    if len(parts) != 2:
        raise MachineError(f"line {lineno}: edge head must be 'state symbol'")
    return Edge(parts[0], parts[1], guard, updates, target)


def load_machine(text, output_domain=None, name="machine"):
    """Parse the line-based machine format (see ``render_machine``)."""
    header = {}
    edges = []
    outputs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if key == "edge" and sep:
            edges.append(_parse_edge(rest, lineno))
        elif key == "output" and sep:
            state, eq, expr = rest.partition("=")
            if not eq:
                raise MachineError(f"line {lineno}: output line needs '='")
            outputs[state.strip()] = _parse_output(expr)
        elif key in ("registers", "states", "initial", "instruction-set") and sep:
            header[key] = rest.split()
        else:
            raise MachineError(f"line {lineno}: cannot parse {line!r}")
    for required in ("registers", "instruction-set", "states", "initial"):
        if required not in header:
            raise MachineError(f"missing '{required}:' line")
    try:
        iset = InstructionSet(header["instruction-set"][0])
    except (ValueError, IndexError):
        raise MachineError(f"unknown instruction set {header['instruction-set']}")
    symbols = []
    for e in edges:
        if e.symbol not in symbols:
            symbols.append(e.symbol)
    if output_domain is None:
        output_domain = dom.RATINF if iset is InstructionSet.EXTENDED else dom.NATINF
    return RegisterMachine(name, tuple(header["registers"]), tuple(header["states"]),
                           Alphabet(tuple(symbols)), header["initial"][0], edges,
                           outputs, iset, output_domain)


def render_machine(machine):
    """Inverse of ``load_machine`` for machines whose outputs fit the grammar."""
    if not machine.has_grammar_outputs():
        raise MachineError(f"machine {machine.name} has code outputs; not renderable")
    for e in machine.edges:
        for atom in e.guard.atoms:
            if isinstance(atom.right, int) and atom.right != 0:
                raise MachineError("constant guard thresholds are outside the file grammar")
    lines = [f"registers: {' '.join(machine.registers)}",
             f"instruction-set: {machine.instruction_set.value}",
             f"states: {' '.join(machine.states)}",
             f"initial: {machine.initial}"]
    for e in machine.edges:
        upd = ", ".join(u.render() for u in e.updates)
        upd_part = f" / {upd}" if upd else ""
        lines.append(f"edge: {e.source} {e.symbol} [{e.guard.render()}]{upd_part} -> {e.target}")
    for q in machine.states:
        lines.append(f"output: {q} = {machine.outputs[q].render()}")
    return "\n".join(lines) + "\n"


# -- response-time machines ----------------------------------------------


def _mmax_counting_edges(source, symbol, target, extra=()):
    grow = Edge(source, symbol, Guard((GuardAtom("x", "y"),)),
                tuple(extra) + (Update("x", "inc"), Update("y", "inc")), target)
    keep = Edge(source, symbol, Guard((GuardAtom("x", "y", negated=True),)),
                tuple(extra) + (Update("x", "inc"),), target)
    return [grow, keep]


def build_mmax():
    """Two-counter maximal-response-time monitor.

    While a request is pending, x counts the current response time; y holds
    the answer.  While x is still below y only x advances; once x catches up
    both advance, so y tracks the running maximum.  A second request before
    the acknowledgement jumps to an infinity sink.
    """
    alphabet = server_alphabet(1).alphabet
    edges = [
        Edge("idle", "req", TRUE_GUARD, (Update("x", "zero"),), "pending"),
        Edge("idle", "ack", TRUE_GUARD, (), "idle"),
        Edge("idle", "other", TRUE_GUARD, (), "idle"),
        Edge("pending", "req", TRUE_GUARD, (), "sink"),
    ]
    edges += _mmax_counting_edges("pending", "ack", "idle")
    edges += _mmax_counting_edges("pending", "other", "pending")
    edges += [Edge("sink", a, TRUE_GUARD, (), "sink") for a in alphabet]
    outputs = {"idle": out_reg("y"), "pending": out_reg("y"), "sink": OUT_INF}
    return RegisterMachine("Mmax", ("x", "y"), ("idle", "pending", "sink"), alphabet,
                           "idle", edges, outputs, InstructionSet.COUNTER, dom.NATINF,
                           monotonicity=Monotonicity.INCREASING)


def build_mavg():
    """Three-register average-response-time monitor with a dividing output.

    ``total`` accumulates completed response times, ``count`` the completed
    requests, and ``burst`` the response time of the open request measured
    inclusively, so the pending output is (total + burst - 1) / (count + 1).
    """
    alphabet = server_alphabet(1).alphabet
    edges = [
        Edge("idle", "req", TRUE_GUARD, (Update("burst", "one"),), "pending"),
        Edge("idle", "ack", TRUE_GUARD, (), "idle"),
        Edge("idle", "other", TRUE_GUARD, (), "idle"),
        Edge("pending", "req", TRUE_GUARD, (), "sink"),
        Edge("pending", "other", TRUE_GUARD, (Update("burst", "inc"),), "pending"),
        Edge("pending", "ack", TRUE_GUARD,
             (Update("total", "add", "burst"), Update("count", "inc"),
              Update("burst", "zero")), "idle"),
    ]
    edges += [Edge("sink", a, TRUE_GUARD, (), "sink") for a in alphabet]

    def out_idle(state, valuation):
        return Fraction(valuation["total"], valuation["count"]) \
            if valuation["count"] else Fraction(0)

    def out_pending(state, valuation):
        return Fraction(valuation["total"] + valuation["burst"] - 1,
                        valuation["count"] + 1)

    outputs = {"idle": out_idle, "pending": out_pending,
               "sink": lambda st, v: dom.INF}
    return RegisterMachine("Mavg", ("total", "count", "burst"),
                           ("idle", "pending", "sink"), alphabet, "idle", edges,
                           outputs, InstructionSet.EXTENDED, dom.RATINF)


def build_mavg_running():
    """Two-register variant of the average monitor with grammar outputs.

    ``rtotal`` counts every observation made while a request is open (which
    equals completed response time plus the open burst) and ``rcount``
    counts requests as they arrive, so every state outputs rtotal/rcount.
    Generates the same verdict function as ``build_mavg`` and can be
    rendered to the machine file format.
    """
    alphabet = server_alphabet(1).alphabet
    edges = [
        Edge("idle", "req", TRUE_GUARD, (Update("rcount", "inc"),), "pending"),
        Edge("idle", "ack", TRUE_GUARD, (), "idle"),
        Edge("idle", "other", TRUE_GUARD, (), "idle"),
        Edge("pending", "req", TRUE_GUARD, (), "sink"),
        Edge("pending", "other", TRUE_GUARD, (Update("rtotal", "inc"),), "pending"),
        Edge("pending", "ack", TRUE_GUARD, (Update("rtotal", "inc"),), "idle"),
    ]
    edges += [Edge("sink", a, TRUE_GUARD, (), "sink") for a in alphabet]
    outputs = {"idle": out_div("rtotal", "rcount"),
               "pending": out_div("rtotal", "rcount"),
               "sink": OUT_INF}
    return RegisterMachine("Mavg2", ("rtotal", "rcount"), ("idle", "pending", "sink"),
                           alphabet, "idle", edges, outputs, InstructionSet.EXTENDED,
                           dom.RATINF)


def build_finite_state_mrt(cap):
    """Finite-state under-approximation of maximal response time.

    All counting saturates at ``cap``; traces whose true maximum (possibly
    infinite) exceeds the budget are reported as ``cap``.
    """
    if cap < 1:
        raise MachineError("saturation budget must be >= 1")
    alphabet = server_alphabet(1).alphabet
    states = [f"i{m}" for m in range(cap + 1)]
    states += [f"p{m}_{n}" for m in range(cap + 1) for n in range(cap + 1)]
    states.append("sat")
    edges = []
    values = {}
    for m in range(cap + 1):
        values[f"i{m}"] = m
        edges.append(Edge(f"i{m}", "req", TRUE_GUARD, (), f"p{m}_0"))
        edges.append(Edge(f"i{m}", "ack", TRUE_GUARD, (), f"i{m}"))
        edges.append(Edge(f"i{m}", "other", TRUE_GUARD, (), f"i{m}"))
        for n in range(cap + 1):
            values[f"p{m}_{n}"] = max(m, n)
            m_done = min(cap, max(m, n + 1))
            edges.append(Edge(f"p{m}_{n}", "req", TRUE_GUARD, (), "sat"))
            edges.append(Edge(f"p{m}_{n}", "ack", TRUE_GUARD, (), f"i{m_done}"))
            edges.append(Edge(f"p{m}_{n}", "other", TRUE_GUARD, (),
                              f"p{m}_{min(cap, n + 1)}"))
    values["sat"] = cap
    edges += [Edge("sat", a, TRUE_GUARD, (), "sat") for a in alphabet]
    outputs = {q: (lambda st, v, c=values[q]: c) for q in states}
    return RegisterMachine(f"Mfin{cap}", (), tuple(states), alphabet, "i0", edges,
                           outputs, InstructionSet.EXTENDED, dom.NATINF,
                           monotonicity=Monotonicity.INCREASING)


# -- k-pair response-time machines ----------------------------------------


def _classify_server_symbol(sym, sa):
    if sym in sa.req_tokens:
        return "req", sa.req_tokens.index(sym) + 1
    if sym in sa.ack_tokens:
        return "ack", sa.ack_tokens.index(sym) + 1
    return "other", None


def _status_states(k):
    return ["".join(c) for c in itertools.product("IPD", repeat=k)]


def _kpair_output(statuses, max_reg_of):
    def out(state, valuation, cs=statuses):
        return tuple(dom.INF if c == "D" else valuation[max_reg_of(i + 1)]
                     for i, c in enumerate(cs))
    return out


def build_kpair_monitor(k):
    """Exact per-pair maxima with a dedicated (x_i, y_i) counter pair each:
    2k counters."""
    sa = server_alphabet(k)
    alphabet = sa.alphabet
    regs = [f"x{i}" for i in range(1, k + 1)] + [f"y{i}" for i in range(1, k + 1)]
    edges = []
    outputs = {}
    for statuses in itertools.product("IPD", repeat=k):
        st = "".join(statuses)
        outputs[st] = _kpair_output(statuses, lambda i: f"y{i}")
        for sym in alphabet:
            kind, j = _classify_server_symbol(sym, sa)
            new = list(statuses)
            extra = []
            counting = [i for i in range(1, k + 1) if statuses[i - 1] == "P"]
            if kind == "req":
                if statuses[j - 1] == "I":
                    new[j - 1] = "P"
                    extra.append(Update(f"x{j}", "zero"))
                elif statuses[j - 1] == "P":
                    new[j - 1] = "D"
                counting = [i for i in counting if i != j]
            elif kind == "ack" and statuses[j - 1] == "P":
                new[j - 1] = "I"  # the ack itself still counts for pair j
            target = "".join(new)
            if not counting:
                edges.append(Edge(st, sym, TRUE_GUARD, tuple(extra), target))
                continue
            for bits in itertools.product((True, False), repeat=len(counting)):
                atoms, ups = [], list(extra)
                for i, grow in zip(counting, bits):
                    atoms.append(GuardAtom(f"x{i}", f"y{i}", negated=not grow))
                    ups.append(Update(f"x{i}", "inc"))
                    if grow:
                        ups.append(Update(f"y{i}", "inc"))
                edges.append(Edge(st, sym, Guard(tuple(atoms)), tuple(ups), target))
    return RegisterMachine(f"Mkpair{k}", regs, tuple(_status_states(k)), alphabet,
                           "I" * k, edges, outputs, InstructionSet.COUNTER,
                           dom.product(dom.NATINF, k),
                           monotonicity=Monotonicity.INCREASING)


def _serving(statuses):
    pend = [i + 1 for i, c in enumerate(statuses) if c == "P"]
    return min(pend) if pend else None


def _build_kpair_shared(k, max_reg_of, regs, name):
    """Shared current-response counter x serving the lowest-index open pair;
    completed responses fold into per-pair (or per-group) max registers."""
    sa = server_alphabet(k)
    alphabet = sa.alphabet
    edges = []
    outputs = {}

    def count_edges(st, sym, target, serving, extra=()):
        m = max_reg_of(serving)
        grow = Edge(st, sym, Guard((GuardAtom("x", m),)),
                    tuple(extra) + (Update("x", "inc"), Update(m, "inc")), target)
        keep = Edge(st, sym, Guard((GuardAtom("x", m, negated=True),)),
                    tuple(extra) + (Update("x", "inc"),), target)
        return [grow, keep]

    def credit_and_reset(st, sym, target, serving, extra=()):
        m = max_reg_of(serving)
        yes = Edge(st, sym, Guard((GuardAtom("x", m),)),
                   tuple(extra) + (Update(m, "inc"), Update("x", "zero")), target)
        no = Edge(st, sym, Guard((GuardAtom("x", m, negated=True),)),
                  tuple(extra) + (Update("x", "zero"),), target)
        return [yes, no]

    for statuses in itertools.product("IPD", repeat=k):
        st = "".join(statuses)
        outputs[st] = _kpair_output(statuses, max_reg_of)
        before = _serving(statuses)
        for sym in alphabet:
            kind, j = _classify_server_symbol(sym, sa)
            new = list(statuses)
            if kind == "req":
                if statuses[j - 1] == "I":
                    new[j - 1] = "P"
                    target = "".join(new)
                    if before is None or j < before:
                        # new pair takes over the shared counter
                        if before is None:
                            edges.append(Edge(st, sym, TRUE_GUARD,
                                              (Update("x", "zero"),), target))
                        else:
                            edges += credit_and_reset(st, sym, target, before)
                    else:
                        edges += count_edges(st, sym, target, before)
                elif statuses[j - 1] == "P":
                    new[j - 1] = "D"
                    target = "".join(new)
                    if j == before:
                        # serving pair died; restart the counter for the next one
                        edges.append(Edge(st, sym, TRUE_GUARD,
                                          (Update("x", "zero"),), target))
                    else:
                        edges += count_edges(st, sym, target, before)
                else:
                    target = "".join(new)
                    if before is None:
                        edges.append(Edge(st, sym, TRUE_GUARD, (), target))
                    else:
                        edges += count_edges(st, sym, target, before)
            elif kind == "ack" and statuses[j - 1] == "P" and j == before:
                new[j - 1] = "I"
                target = "".join(new)
                edges += credit_and_reset(st, sym, target, j)
            elif kind == "ack" and statuses[j - 1] == "P":
                new[j - 1] = "I"  # completes unmeasured; the served pair counts
                target = "".join(new)
                edges += count_edges(st, sym, target, before)
            else:
                target = st
                if before is None:
                    edges.append(Edge(st, sym, TRUE_GUARD, (), target))
                else:
                    edges += count_edges(st, sym, target, before)
    return RegisterMachine(name, regs, tuple(_status_states(k)), alphabet, "I" * k,
                           edges, outputs, InstructionSet.COUNTER,
                           dom.product(dom.NATINF, k),
                           monotonicity=Monotonicity.INCREASING)


def build_kpair_priority(k):
    """(k+1)-counter under-approximation: per-pair maxima plus one shared
    response counter serving the lowest-index open request.  Exact whenever
    requests never overlap."""
    regs = [f"y{i}" for i in range(1, k + 1)] + ["x"]
    return _build_kpair_shared(k, lambda i: f"y{i}", regs, f"Mkprio{k}")


def build_kpair_grouped(k):
    """(ceil(k/2)+1)-counter variant sharing one max register per pair group
    {2g-1, 2g}.  The grouped register reports the group maximum, so it can
    exceed the true value of the smaller group member."""
    if k < 3:
        raise MachineError("grouped scheme needs k >= 3 to differ from the 2-counter one")
    groups = (k + 1) // 2
    regs = [f"z{g}" for g in range(1, groups + 1)] + ["x"]
    return _build_kpair_shared(k, lambda i: f"z{(i + 1) // 2}", regs, f"Mkgrp{k}")


def _next_alive(alive, t):
    after = [i for i in alive if i > t]
    return (min(after), False) if after else (min(alive), True)


def build_kpair_sequential(k):
    """Two-counter under-approximation of all pair maxima at once.

    A single value z is raised only after witnessing, pair by pair in a
    fixed cyclic order, a completed response exceeding it; x measures the
    response of the pair currently awaited.  Dead (double-requested) pairs
    stop gating the cycle.
    """
    sa = server_alphabet(k)
    alphabet = sa.alphabet
    edges = []
    outputs = {}
    states = [f"{st}_t{t}_{ph}" for st in _status_states(k)
              for t in range(1, k + 1) for ph in "wc"]
    states.append("alldead")

    def normalize(statuses, t):
        alive = [i + 1 for i, c in enumerate(statuses) if c != "D"]
        if not alive:
            return None
        while statuses[t - 1] == "D":
            t, _ = _next_alive(alive, t)
        return t

    def state_name(statuses, t, ph):
        return f"{''.join(statuses)}_t{t}_{ph}"

    for statuses in itertools.product("IPD", repeat=k):
        for t in range(1, k + 1):
            for ph in "wc":
                st = state_name(statuses, t, ph)
                outputs[st] = _kpair_output(statuses, lambda i: "z")
                for sym in alphabet:
                    kind, j = _classify_server_symbol(sym, sa)
                    new = list(statuses)
                    if kind == "req":
                        new[j - 1] = {"I": "P", "P": "D", "D": "D"}[statuses[j - 1]]
                    elif kind == "ack" and statuses[j - 1] == "P":
                        new[j - 1] = "I"
                    alive = [i + 1 for i, c in enumerate(new) if c != "D"]
                    if not alive:
                        edges.append(Edge(st, sym, TRUE_GUARD, (), "alldead"))
                        continue
                    counting = ph == "c" and statuses[t - 1] == "P"
                    if counting and kind == "ack" and j == t:
                        # completion: success advances the cycle, failure re-arms
                        t_ok, wrapped = _next_alive(alive, t)
                        t_ok = normalize(new, t_ok)
                        ups = (Update("z", "inc"),) if wrapped else ()
                        edges.append(Edge(st, sym, Guard((GuardAtom("x", "z"),)),
                                          ups, state_name(new, t_ok, "w")))
                        t_no = normalize(new, t)
                        edges.append(Edge(st, sym,
                                          Guard((GuardAtom("x", "z", negated=True),)),
                                          (), state_name(new, t_no, "w")))
                        continue
                    if counting and kind == "req" and j == t:
                        t2 = normalize(new, t)  # target died; move on without credit
                        edges.append(Edge(st, sym, TRUE_GUARD, (),
                                          state_name(new, t2, "w")))
                        continue
                    if counting:
                        t2 = normalize(new, t)
                        ph2 = "c" if t2 == t else "w"
                        edges.append(Edge(st, sym, TRUE_GUARD, (Update("x", "inc"),),
                                          state_name(new, t2, ph2)))
                        continue
                    # waiting phase (or stale counting state): arm on a fresh request
                    if kind == "req" and j == t and statuses[t - 1] == "I" \
                            and new[t - 1] == "P":
                        edges.append(Edge(st, sym, TRUE_GUARD, (Update("x", "zero"),),
                                          state_name(new, t, "c")))
                        continue
                    t2 = normalize(new, t)
                    edges.append(Edge(st, sym, TRUE_GUARD, (),
                                      state_name(new, t2, "w")))
    outputs["alldead"] = lambda state, valuation: (dom.INF,) * k
    edges += [Edge("alldead", a, TRUE_GUARD, (), "alldead") for a in alphabet]
    return RegisterMachine(f"Mkseq{k}", ("z", "x"), tuple(states), alphabet,
                           state_name(("I",) * k, 1, "w"), edges, outputs,
                           InstructionSet.COUNTER, dom.product(dom.NATINF, k),
                           monotonicity=Monotonicity.INCREASING)


def build_kpair_approx(k, counters):
    """Approximate k-pair monitor for a counter budget of k+1, ceil(k/2)+1,
    or 2 registers."""
    if counters == k + 1:
        return build_kpair_priority(k)
    if counters == 2:
        return build_kpair_sequential(k)
    if k >= 3 and counters == (k + 1) // 2 + 1:
        return build_kpair_grouped(k)
    raise MachineError(f"unsupported counter budget {counters} for {k} pairs")


# -- letter-frequency ordering machines ------------------------------------


def pk_alphabet(k):
    return Alphabet(tuple(str(i) for i in range(1, k + 1)))


def _build_pk(k, trackers, name):
    alphabet = pk_alphabet(k)
    regs = [f"d{i}" for i in range(1, trackers)] + ["length"]
    edges = []
    for j in range(1, k + 1):
        sym = str(j)
        base = [Update("length", "inc")]
        if j <= trackers - 1:
            base.append(Update(f"d{j}", "inc"))
        if 2 <= j <= trackers:
            guard_reg = f"d{j - 1}"
            ok = base + [Update(guard_reg, "dec")]
            edges.append(Edge("live", sym, Guard((GuardAtom(guard_reg, 1),)),
                              tuple(ok), "live"))
            edges.append(Edge("live", sym,
                              Guard((GuardAtom(guard_reg, 1, negated=True),)),
                              (Update("length", "inc"),), "frozen"))
        else:
            edges.append(Edge("live", sym, TRUE_GUARD, tuple(base), "live"))
        edges.append(Edge("frozen", sym, TRUE_GUARD, (), "frozen"))
    outputs = {"live": OUT_INF, "frozen": out_reg("length")}
    return RegisterMachine(name, regs, ("live", "frozen"), alphabet, "live", edges,
                           outputs, InstructionSet.COUNTER_INC_DEC, dom.NATINF,
                           monotonicity=Monotonicity.DECREASING)


def build_pk_monitor(k):
    """Exact k-counter monitor of the letter-ordering property over {1..k}:
    counter d_i holds the count difference of letters i and i+1, and the
    last counter freezes the violating prefix length."""
    if k < 2:
        raise MachineError("need at least a 2-letter alphabet")
    return _build_pk(k, k, f"Mpk{k}")


def build_pk_approx(k, trackers):
    """Monitor tracking only the first ``trackers - 1`` count differences;
    over-approximates from above by missing later-pair violations."""
    if not 2 <= trackers < k:
        raise MachineError("approximations need 2 <= trackers < k (otherwise use the "
                           "exact machine)")
    return _build_pk(k, trackers, f"Mpk{k}l{trackers}")


def eval_pk(t, k):
    """Ground truth for the letter-ordering property: infinity while every
    prefix has monotone letter counts, else the shortest violating length."""
    counts = [0] * (k + 2)
    length = 0

    def feed(sym):
        nonlocal length
        length += 1
        j = int(sym)
        counts[j] += 1
        if j >= 2 and counts[j] > counts[j - 1]:
            return length
        return None

    for sym in t.stem:
        hit = feed(sym)
        if hit:
            return hit
    for _ in range(2):
        for sym in t.loop:
            hit = feed(sym)
            if hit:
                return hit
    delta = [0] * (k + 2)
    for sym in t.loop:
        delta[int(sym)] += 1
    needed = 0
    for j in range(1, k):
        slope = delta[j] - delta[j + 1]
        if slope < 0:
            margin = counts[j] - counts[j + 1]
            needed = max(needed, margin // (-slope) + 2)
    if needed == 0:
        return dom.INF
    for _ in range(needed + 2):
        for sym in t.loop:
            hit = feed(sym)
            if hit:
                return hit
    raise AssertionError("expected an ordering violation within the computed bound")


def pk_property(k):
    from .qprop import QuantitativeProperty
    return QuantitativeProperty(f"pk:{k}", dom.NATINF, lambda t: eval_pk(t, k),
                                alphabet=pk_alphabet(k))


# -- binary-encoded ordering machines ---------------------------------------


BINARY_ALPHABET = Alphabet(("0", "1", "mark"))
_MARK = "mark"


def build_binary_pk(k):
    """k-counter monitor of the block-value ordering property over bits plus
    a block separator: counters track adjacent block-value count differences
    for values below k, and separators seen; violations freeze the separator
    count."""
    if k < 2:
        raise MachineError("need at least 2 counters")
    alphabet = BINARY_ALPHABET
    regs = [f"d{i}" for i in range(1, k)] + ["marks"]
    states = [f"v{n}" for n in range(k + 1)] + ["over", "frozen"]
    edges = []

    def bit_target(n, bit):
        n2 = 2 * n + bit
        return f"v{n2}" if n2 <= k else "over"

    for n in range(k + 1):
        st = f"v{n}"
        edges.append(Edge(st, "0", TRUE_GUARD, (), bit_target(n, 0)))
        edges.append(Edge(st, "1", TRUE_GUARD, (), bit_target(n, 1)))
        base = [Update("marks", "inc")]
        if 2 <= n <= k:
            ok = base + [Update(f"d{n - 1}", "dec")]
            if n <= k - 1:
                ok.append(Update(f"d{n}", "inc"))
            edges.append(Edge(st, _MARK, Guard((GuardAtom(f"d{n - 1}", 1),)),
                              tuple(ok), "v0"))
            edges.append(Edge(st, _MARK,
                              Guard((GuardAtom(f"d{n - 1}", 1, negated=True),)),
                              (Update("marks", "inc"),), "frozen"))
        elif n == 1:
            edges.append(Edge(st, _MARK, TRUE_GUARD,
                              (Update("marks", "inc"), Update("d1", "inc")), "v0"))
        else:
            edges.append(Edge(st, _MARK, TRUE_GUARD, (Update("marks", "inc"),), "v0"))
    edges.append(Edge("over", "0", TRUE_GUARD, (), "over"))
    edges.append(Edge("over", "1", TRUE_GUARD, (), "over"))
    edges.append(Edge("over", _MARK, TRUE_GUARD, (Update("marks", "inc"),), "v0"))
    for a in alphabet:
        edges.append(Edge("frozen", a, TRUE_GUARD, (), "frozen"))
    outputs = {q: OUT_INF for q in states}
    outputs["frozen"] = out_reg("marks")
    return RegisterMachine(f"Mbin{k}", regs, tuple(states), alphabet, "v0", edges,
                           outputs, InstructionSet.COUNTER_INC_DEC, dom.NATINF,
                           monotonicity=Monotonicity.DECREASING)


def eval_binary_pk(t):
    """Ground truth for the block-value ordering property: the number of
    separators in the shortest violating prefix, infinity when none."""
    counts = {}
    marks = 0
    block = 0

    def feed(sym):
        nonlocal marks, block
        if sym != _MARK:
            block = 2 * block + int(sym)
            return None
        marks += 1
        value, block = block, 0
        counts[value] = counts.get(value, 0) + 1
        if value >= 2 and counts[value] > counts.get(value - 1, 0):
            return marks
        return None

    for sym in t.stem:
        hit = feed(sym)
        if hit:
            return hit
    if _MARK not in t.loop.symbols:
        return dom.INF
    per_loop = [{} for _ in range(4)]
    for it in range(4):
        for sym in t.loop:
            hit = feed(sym)
            if hit:
                return hit
        per_loop[it] = dict(counts)
    delta = {v: per_loop[3].get(v, 0) - per_loop[2].get(v, 0) for v in per_loop[3]}
    needed = 0
    for v, dv in delta.items():
        if v < 2 or dv == 0:
            continue
        slope = delta.get(v - 1, 0) - dv
        if slope < 0:
            margin = counts.get(v - 1, 0) - counts.get(v, 0)
            needed = max(needed, margin // (-slope) + 2)
    if needed == 0:
        return dom.INF
    for _ in range(needed + 2):
        for sym in t.loop:
            hit = feed(sym)
            if hit:
                return hit
    raise AssertionError("expected a block-ordering violation within the computed bound")


def binary_pk_property():
    from .qprop import QuantitativeProperty
    return QuantitativeProperty("binary-pk", dom.NATINF, eval_binary_pk,
                                alphabet=BINARY_ALPHABET)


# -- doubling machines ------------------------------------------------------


DOUBLING_ALPHABET = Alphabet(("a", "b"))


def build_doubling_adder():
    """Two-register adder machine whose verdict is 2^n for the longest run
    of a's seen so far (1 when none yet).

    Along a run, x doubles so that x = 2^(len-1); y remembers the best x of
    any completed run.  Since both stay powers of two, the closing
    comparison x >= y decides max exactly, and the output map doubles the
    registers back to 2^len.
    """
    alphabet = DOUBLING_ALPHABET
    edges = [
        Edge("virgin", "a", TRUE_GUARD, (Update("x", "one"),), "inblock"),
        Edge("virgin", "b", TRUE_GUARD, (), "virgin"),
        Edge("inblock", "a", TRUE_GUARD, (Update("x", "add", "x"),), "inblock"),
        Edge("inblock", "b", Guard((GuardAtom("x", "y"),)),
             (Update("y", "copy", "x"),), "outside"),
        Edge("inblock", "b", Guard((GuardAtom("x", "y", negated=True),)), (), "outside"),
        Edge("outside", "a", TRUE_GUARD, (Update("x", "one"),), "inblock"),
        Edge("outside", "b", TRUE_GUARD, (), "outside"),
    ]
    outputs = {"virgin": lambda st, v: 1,
               "inblock": lambda st, v: max(2 * v["x"], 2 * v["y"]),
               "outside": lambda st, v: 2 * v["y"]}
    return RegisterMachine("Madd", ("x", "y"), ("virgin", "inblock", "outside"),
                           alphabet, "virgin", edges, outputs, InstructionSet.ADDER,
                           dom.NATINF, monotonicity=Monotonicity.INCREASING)


def build_doubling_counter():
    """Two-counter machine whose verdict is twice the longest run of a's."""
    alphabet = DOUBLING_ALPHABET
    edges = [
        Edge("q", "a", Guard((GuardAtom("c", "m"),)),
             (Update("c", "inc"), Update("m", "inc")), "q"),
        Edge("q", "a", Guard((GuardAtom("c", "m", negated=True),)),
             (Update("c", "inc"),), "q"),
        Edge("q", "b", TRUE_GUARD, (Update("c", "zero"),), "q"),
    ]
    outputs = {"q": lambda st, v: 2 * v["m"]}
    return RegisterMachine("Mcount", ("c", "m"), ("q",), alphabet, "q", edges,
                           outputs, InstructionSet.COUNTER, dom.NATINF,
                           monotonicity=Monotonicity.INCREASING)


def longest_a_run(s):
    best = cur = 0
    for sym in s:
        cur = cur + 1 if sym == "a" else 0
        best = max(best, cur)
    return best


def closed_v_add(s):
    return 2 ** longest_a_run(s)


def closed_v_count(s):
    return 2 * longest_a_run(s)


def eval_doubling(t):
    """2^n for the longest a-run of the lasso, infinite for an all-a loop."""
    if all(sym == "a" for sym in t.loop):
        return dom.INF
    window = t.prefix(len(t.stem) + 2 * len(t.loop))
    return 2 ** longest_a_run(window)


def doubling_property():
    from .qprop import QuantitativeProperty
    return QuantitativeProperty("doubling", dom.NATINF, eval_doubling,
                                alphabet=DOUBLING_ALPHABET)
