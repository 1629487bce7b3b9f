"""Signatures, first-order terms, substitutions, and the syntactic lgg baseline.

Terms are immutable trees over a fixed signature.  The canonical printer
emits prefix form only; a small amount of infix sugar is accepted on input
(see ``parse_term``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence, Union

__all__ = [
    "Signature",
    "Term",
    "Var",
    "App",
    "Substitution",
    "TermError",
    "ParseError",
    "parse_term",
    "term_to_str",
    "term_size",
    "term_rank",
    "term_vars",
    "subterms",
    "apply_subst",
    "lgg_syntactic",
]

# Variable names g1, g2, ... are reserved for generalization variables
# minted by lgg_syntactic; the parser rejects them as user variables.
_MINTED_RE = re.compile(r"^g[0-9]+$")

_IDENT_RE = re.compile(r"[A-Za-z0-9_]+")

# Infix sugar accepted on input; each symbol maps to a signature op name.
_SUGAR = {"∧": "and", "∨": "or", "¬": "not",
          "→": "imp", "+": "plus", "⊕": "oplus"}


class TermError(ValueError):
    """Malformed term, signature, or substitution."""


class ParseError(TermError):
    """Syntax or arity error in term input, with a byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Signature:
    """An ordered list of operation symbols with arities.

    The order is fixed at construction and used for deterministic
    tie-breaking wherever terms are ranked.
    """

    ops: tuple[tuple[str, int], ...]

    def __post_init__(self):
        seen = set()
        for name, arity in self.ops:
            if not name or not _IDENT_RE.fullmatch(name):
                raise TermError(f"bad operation name {name!r}")
            if name in seen:
                raise TermError(f"duplicate operation name {name!r}")
            if arity < 0:
                raise TermError(f"negative arity for {name!r}")
            seen.add(name)

    @classmethod
    def make(cls, ops: Sequence[tuple[str, int]]) -> "Signature":
        return cls(tuple((str(n), int(a)) for n, a in ops))

    def arity(self, name: str) -> int:
        for n, a in self.ops:
            if n == name:
                return a
        raise TermError(f"unknown operation {name!r}")

    def has_op(self, name: str) -> bool:
        return any(n == name for n, _ in self.ops)

    def op_index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.ops):
            if n == name:
                return i
        raise TermError(f"unknown operation {name!r}")


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    op: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        return term_to_str(self)


Term = Union[Var, App]


def term_to_str(t: Term) -> str:
    """Canonical prefix printer; nullary operations print bare."""
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.op
    return f"{t.op}({','.join(term_to_str(a) for a in t.args)})"


def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def term_vars(t: Term, acc: list[str] | None = None) -> list[str]:
    """Variable names in first-occurrence order."""
    if acc is None:
        acc = []
    if isinstance(t, Var):
        if t.name not in acc:
            acc.append(t.name)
    else:
        for a in t.args:
            term_vars(a, acc)
    return acc


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def term_rank(t: Term, sig: Signature) -> tuple:
    """Total order key: size first, then preorder node codes.

    Variables sort before operations; operations sort by signature order;
    variables sort by (length, name) so x2 < x10.
    """
    codes: list[tuple] = []

    def walk(u: Term):
        if isinstance(u, Var):
            codes.append((0, len(u.name), u.name))
        else:
            codes.append((1, sig.op_index(u.op)))
            for a in u.args:
                walk(a)

    walk(t)
    return (term_size(t), tuple(codes))


def check_term(t: Term, sig: Signature) -> None:
    """Raise TermError unless every App matches the signature's arity."""
    if isinstance(t, App):
        if sig.arity(t.op) != len(t.args):
            raise TermError(
                f"operation {t.op!r} expects {sig.arity(t.op)} arguments, got {len(t.args)}")
        for a in t.args:
            check_term(a, sig)


# ---------------------------------------------------------------------------
# Parsing


class _Parser:
    """Recursive-descent parser with precedence for the infix sugar.

    Precedence (tightest first): not, and, or, plus/oplus, imp.
    imp is right-associative, the rest left-associative.
    """

    def __init__(self, src: str, sig: Signature):
        self.src = src
        self.sig = sig
        self.pos = 0  # character position

    def byte_offset(self, pos: int | None = None) -> int:
        p = self.pos if pos is None else pos
        return len(self.src[:p].encode("utf-8"))

    def error(self, message: str, pos: int | None = None):
        raise ParseError(message, self.byte_offset(pos))

    def skip_ws(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def eat(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def sugar_op(self, symbol: str, want_arity: int) -> str:
        name = _SUGAR[symbol]
        if not self.sig.has_op(name):
            self.error(f"unknown operation {symbol!r} (no {name!r} in signature)")
        if self.sig.arity(name) != want_arity:
            self.error(f"operation {name!r} has arity {self.sig.arity(name)}, "
                       f"cannot be used as {symbol!r}")
        return name

    def parse(self) -> Term:
        t = self.parse_imp()
        self.skip_ws()
        if self.pos < len(self.src):
            self.error("unexpected trailing input")
        return t

    def parse_imp(self) -> Term:
        left = self.parse_sum()
        if self.peek() == "→":
            start = self.pos
            self.pos += 1
            name = self.sugar_op("→", 2)
            right = self.parse_imp()
            return App(name, (left, right))
        return left

    def parse_sum(self) -> Term:
        t = self.parse_or()
        while self.peek() in ("+", "⊕"):
            sym = self.peek()
            self.pos += 1
            name = self.sugar_op(sym, 2)
            t = App(name, (t, self.parse_or()))
        return t

    def parse_or(self) -> Term:
        t = self.parse_and()
        while self.peek() == "∨":
            self.pos += 1
            name = self.sugar_op("∨", 2)
            t = App(name, (t, self.parse_and()))
        return t

    def parse_and(self) -> Term:
        t = self.parse_not()
        while self.peek() == "∧":
            self.pos += 1
            name = self.sugar_op("∧", 2)
            t = App(name, (t, self.parse_not()))
        return t

    def parse_not(self) -> Term:
        if self.peek() == "¬":
            self.pos += 1
            name = self.sugar_op("¬", 1)
            return App(name, (self.parse_not(),))
        return self.parse_atom()

    def parse_atom(self) -> Term:
        ch = self.peek()
        if ch == "(":
            self.eat("(")
            t = self.parse_imp()
            if self.peek() != ")":
                self.error("unbalanced parenthesis")
            self.eat(")")
            return t
        m = _IDENT_RE.match(self.src, self.pos)
        if not m:
            self.error("expected identifier or '('")
        name = m.group(0)
        name_pos = self.pos
        self.pos = m.end()
        if self.peek() == "(":
            self.eat("(")
            args = []
            if self.peek() != ")":
                args.append(self.parse_imp())
                while self.peek() == ",":
                    self.eat(",")
                    args.append(self.parse_imp())
            if self.peek() != ")":
                self.error("unbalanced parenthesis")
            self.eat(")")
            if not self.sig.has_op(name):
                self.error(f"unknown operation {name!r}", name_pos)
            if self.sig.arity(name) != len(args):
                self.error(f"operation {name!r} expects {self.sig.arity(name)} "
                           f"arguments, got {len(args)}", name_pos)
            return App(name, tuple(args))
        if self.sig.has_op(name):
            if self.sig.arity(name) != 0:
                self.error(f"operation {name!r} expects "
                           f"{self.sig.arity(name)} arguments, got 0", name_pos)
            return App(name, ())
        if _MINTED_RE.match(name):
            self.error(f"variable name {name!r} is reserved for minted "
                       "generalization variables", name_pos)
        return Var(name)


def parse_term(src: str, sig: Signature) -> Term:
    """Parse a term.  Identifiers naming signature ops become applications
    (nullary ops may be written bare); all other identifiers are variables.
    """
    return _Parser(src, sig).parse()


# ---------------------------------------------------------------------------
# Substitutions


@dataclass(frozen=True)
class Substitution:
    """Finite map from variable names to terms; unbound variables are fixed."""

    bindings: tuple[tuple[str, Term], ...]

    @classmethod
    def make(cls, mapping: Mapping[str, Term]) -> "Substitution":
        return cls(tuple(sorted(mapping.items())))

    @classmethod
    def empty(cls) -> "Substitution":
        return cls(())

    def get(self, name: str) -> Term:
        for n, t in self.bindings:
            if n == name:
                return t
        return Var(name)

    def as_dict(self) -> dict[str, Term]:
        return dict(self.bindings)

    def compose(self, other: "Substitution") -> "Substitution":
        """self after other: apply(self.compose(other), t) = apply(self, apply(other, t))."""
        out = {n: apply_subst(self, t) for n, t in other.bindings}
        for n, t in self.bindings:
            out.setdefault(n, t)
        return Substitution.make(out)

    def __str__(self) -> str:
        inner = ", ".join(f"{n} -> {term_to_str(t)}" for n, t in self.bindings)
        return "{" + inner + "}"


def apply_subst(s: Substitution, t: Term) -> Term:
    if isinstance(t, Var):
        return s.get(t.name)
    return App(t.op, tuple(apply_subst(s, a) for a in t.args))


# ---------------------------------------------------------------------------
# Syntactic least general generalization (anti-unification)


def lgg_syntactic(ts: Sequence[Term]) -> tuple[Term, list[Substitution]]:
    """Plotkin-style syntactic lgg of a nonempty list of terms.

    Generalization variables are minted g1, g2, ... in first-occurrence
    order; identical tuples of mismatched subterms reuse the same variable.
    Returns the generalizer and one witnessing substitution per input.
    """
    if not ts:
        raise TermError("lgg of an empty list")
    ts = list(ts)
    minted: dict[tuple[Term, ...], str] = {}

    def go(parts: tuple[Term, ...]) -> Term:
        first = parts[0]
        if all(p == first for p in parts):
            return first
        if (all(isinstance(p, App) for p in parts)
                and len({(p.op, len(p.args)) for p in parts}) == 1):
            width = len(first.args)
            return App(first.op,
                       tuple(go(tuple(p.args[i] for p in parts)) for i in range(width)))
        if parts not in minted:
            minted[parts] = f"g{len(minted) + 1}"
        return Var(minted[parts])

    g = go(tuple(ts))
    witnesses = [Substitution.make({v: parts[k] for parts, v in minted.items()})
                 for k in range(len(ts))]
    return g, witnesses
