"""Alphabets, finite traces, and lasso (ultimately periodic) traces.

A lasso ``u ; v`` stands for the infinite trace u v v v ...  Trace files are
whitespace-tokenized, ``#`` starts a comment, and a single ``;`` separates
the stem from the loop in lasso files.
"""

import itertools
import re
from dataclasses import dataclass

from .errors import TraceParseError

_TOKEN_RE = re.compile(r"^[A-Za-z0-9_]+$")


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise ValueError("alphabet must be non-empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be distinct")
        for s in self.symbols:
            if not _TOKEN_RE.match(s):
                raise ValueError(f"bad alphabet token {s!r}")

    def __contains__(self, token):
        return token in self.symbols

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)


@dataclass(frozen=True)
class FiniteTrace:
    symbols: tuple
    alphabet: Alphabet

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        for s in self.symbols:
            if s not in self.alphabet:
                raise ValueError(f"symbol {s!r} not in alphabet")

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def extend(self, symbols):
        return FiniteTrace(self.symbols + tuple(symbols), self.alphabet)

    def is_prefix_of(self, other):
        return len(self) <= len(other) and other.symbols[:len(self)] == self.symbols

    def render(self):
        return " ".join(self.symbols)


@dataclass(frozen=True)
class LassoTrace:
    stem: FiniteTrace
    loop: FiniteTrace

    def __post_init__(self):
        if self.stem.alphabet != self.loop.alphabet:
            raise ValueError("stem and loop must share an alphabet")
        if len(self.loop) == 0:
            raise ValueError("lasso loop must be non-empty")

    @property
    def alphabet(self):
        return self.stem.alphabet

    def symbol_at(self, i):
        """Symbol at position i (0-based) of the infinite trace."""
        if i < len(self.stem):
            return self.stem[i]
        return self.loop[(i - len(self.stem)) % len(self.loop)]

    def prefix(self, i):
        """The length-i finite prefix of the infinite trace."""
        syms = [self.symbol_at(j) for j in range(i)]
        return FiniteTrace(tuple(syms), self.alphabet)

    def symbols(self):
        """Infinite iterator over the trace's symbols."""
        yield from self.stem
        while True:
            yield from self.loop

    def prepend(self, finite):
        """The lasso for ``finite`` followed by this infinite trace."""
        return LassoTrace(FiniteTrace(tuple(finite) + self.stem.symbols, self.alphabet),
                          self.loop)

    def render(self):
        return (self.stem.render() + " ; " + self.loop.render()).strip()


def lasso(stem_symbols, loop_symbols, alphabet):
    return LassoTrace(FiniteTrace(tuple(stem_symbols), alphabet),
                      FiniteTrace(tuple(loop_symbols), alphabet))


def _tokenize(text):
    out = []
    for line in text.splitlines():
        body = line.split("#", 1)[0]
        # `;` is its own token even when glued to a neighbour
        body = body.replace(";", " ; ")
        out.extend(body.split())
    return out


def _check_tokens(tokens, alphabet):
    for pos, tok in enumerate(tokens):
        if tok == ";":
            continue
        if tok not in alphabet:
            raise TraceParseError(f"unknown token {tok!r} at position {pos}", position=pos)


def parse_lasso(text, alphabet):
    """Parse ``u ; v`` lasso text; the loop must be non-empty."""
    tokens = _tokenize(text)
    seps = [i for i, t in enumerate(tokens) if t == ";"]
    if len(seps) == 0:
        raise TraceParseError("lasso text has no ';' loop separator")
    if len(seps) > 1:
        raise TraceParseError(f"more than one ';' separator (positions {seps})",
                              position=seps[1])
    _check_tokens(tokens, alphabet)
    cut = seps[0]
    stem, loop = tokens[:cut], tokens[cut + 1:]
    if not loop:
        raise TraceParseError("empty lasso loop")
    return lasso(stem, loop, alphabet)


def parse_finite(text, alphabet):
    """Parse a finite replay trace (no ';' allowed)."""
    tokens = _tokenize(text)
    seps = [i for i, t in enumerate(tokens) if t == ";"]
    if seps:
        raise TraceParseError("finite trace text must not contain ';'", position=seps[0])
    _check_tokens(tokens, alphabet)
    return FiniteTrace(tuple(tokens), alphabet)


def all_finite_traces(alphabet, max_len, min_len=0):
    """Every finite trace with min_len <= length <= max_len, shortest first."""
    for n in range(min_len, max_len + 1):
        for syms in itertools.product(alphabet.symbols, repeat=n):
            yield FiniteTrace(syms, alphabet)


def all_lassos(alphabet, max_stem, max_loop):
    """Every lasso with |stem| <= max_stem and 1 <= |loop| <= max_loop."""
    for stem in all_finite_traces(alphabet, max_stem):
        for loop_len in range(1, max_loop + 1):
            for loop_syms in itertools.product(alphabet.symbols, repeat=loop_len):
                yield LassoTrace(stem, FiniteTrace(loop_syms, alphabet))


def random_finite_trace(rng, alphabet, length):
    return FiniteTrace(tuple(rng.choice(alphabet.symbols) for _ in range(length)), alphabet)


def random_lasso(rng, alphabet, max_stem, max_loop):
    stem_len = rng.randint(0, max_stem)
    loop_len = rng.randint(1, max_loop)
    return LassoTrace(random_finite_trace(rng, alphabet, stem_len),
                      random_finite_trace(rng, alphabet, loop_len))
