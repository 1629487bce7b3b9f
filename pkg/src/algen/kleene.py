"""Finite involutive-poset duality for Kleene algebras.

Independent criteria for exactness (a quasi-equation plus join-irreducibility
of the top) and projectivity (four order-theoretic conditions on the dual
poset); used to cross-check the generic congruence classification.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .algebra import AlgebraError, FiniteAlgebra

__all__ = [
    "NotKleeneError",
    "InvolutivePoset",
    "verify_kleene",
    "dual_poset",
    "is_projective_by_duality",
    "is_exact_by_quasieq",
    "poset_to_dot",
]

_REQUIRED_OPS = {"and": 2, "or": 2, "not": 1, "0": 0, "1": 0}

# identities checked on the input algebra, by exhaustive assignment
_AXIOMS = [
    ("meet commutative", "and(x,y)", "and(y,x)"),
    ("join commutative", "or(x,y)", "or(y,x)"),
    ("meet associative", "and(x,and(y,w))", "and(and(x,y),w)"),
    ("join associative", "or(x,or(y,w))", "or(or(x,y),w)"),
    ("absorption", "and(x,or(x,y))", "x"),
    ("absorption dual", "or(x,and(x,y))", "x"),
    ("distributivity", "and(x,or(y,w))", "or(and(x,y),and(x,w))"),
    ("bottom", "and(x,0)", "0"),
    ("top", "or(x,1)", "1"),
    ("involution", "not(not(x))", "x"),
    ("De Morgan", "not(or(x,y))", "and(not(x),not(y))"),
    ("Kleene", "and(and(x,not(x)),or(y,not(y)))", "and(x,not(x))"),
]


class NotKleeneError(AlgebraError):
    """The input algebra is not a Kleene algebra; names the failed axiom."""

    def __init__(self, axiom: str):
        super().__init__(f"not a Kleene algebra: {axiom} fails")
        self.axiom = axiom


def _check_identity(a: FiniteAlgebra, s_src: str, t_src: str) -> bool:
    from .terms import parse_term, term_vars

    s = parse_term(s_src, a.sig)
    t = parse_term(t_src, a.sig)
    names = sorted(set(term_vars(s)) | set(term_vars(t)))
    for assign in itertools.product(range(a.size), repeat=len(names)):
        env = dict(zip(names, assign))
        if a.eval(s, env) != a.eval(t, env):
            return False
    return True


def verify_kleene(a: FiniteAlgebra) -> None:
    """Raise NotKleeneError unless the algebra is a Kleene algebra."""
    for op, arity in _REQUIRED_OPS.items():
        if not a.sig.has_op(op) or a.sig.arity(op) != arity:
            raise NotKleeneError(f"signature lacks {op}/{arity}")
    for name, s, t in _AXIOMS:
        if not _check_identity(a, s, t):
            raise NotKleeneError(name)


def _leq(a: FiniteAlgebra, x: int, y: int) -> bool:
    return a.tables["and"][(x, y)] == x


def _join_irreducibles(a: FiniteAlgebra) -> list[int]:
    """Elements not equal to the join of their strict lower set; the bottom
    (the empty join) is excluded."""
    out = []
    for x in range(a.size):
        below = [y for y in range(a.size) if y != x and _leq(a, y, x)]
        j = a.tables["0"][()]
        for y in below:
            j = a.tables["or"][(j, y)]
        if j != x:
            out.append(x)
    return out


@dataclass(frozen=True)
class InvolutivePoset:
    """A finite poset with an order-reversing involution where every point
    is comparable with its image; all three laws are checked at
    construction."""

    labels: tuple[str, ...]
    leq: frozenset  # pairs of positions
    iota: tuple[int, ...]

    def __post_init__(self):
        n = len(self.labels)
        le = lambda x, y: (x, y) in self.leq
        for x in range(n):
            if not le(x, x):
                raise AlgebraError("order not reflexive")
        for x in range(n):
            for y in range(n):
                if le(x, y) and le(y, x) and x != y:
                    raise AlgebraError("order not antisymmetric")
                for w in range(n):
                    if le(x, y) and le(y, w) and not le(x, w):
                        raise AlgebraError("order not transitive")
        if sorted(self.iota) != list(range(n)):
            raise AlgebraError("involution is not a bijection")
        for x in range(n):
            if self.iota[self.iota[x]] != x:
                raise AlgebraError("involution is not an involution")
            if not (le(x, self.iota[x]) or le(self.iota[x], x)):
                raise AlgebraError("a point is incomparable with its image")
            for y in range(n):
                if le(x, y) and not le(self.iota[y], self.iota[x]):
                    raise AlgebraError("involution is not order-reversing")

    @property
    def size(self) -> int:
        return len(self.labels)

    def le(self, x: int, y: int) -> bool:
        return (x, y) in self.leq

    def upper_bounds(self, xs, within=None) -> list[int]:
        dom = range(self.size) if within is None else within
        return [u for u in dom if all(self.le(x, u) for x in xs)]

    def lower_bounds(self, xs, within=None) -> list[int]:
        dom = range(self.size) if within is None else within
        return [u for u in dom if all(self.le(u, x) for x in xs)]


def dual_poset(a: FiniteAlgebra) -> InvolutivePoset:
    """The involutive poset dual to a finite Kleene algebra: its
    join-irreducible elements with the inherited order, the involution
    sending x to the meet of the complement of {not a : x <= a} (meets
    taken in the algebra, which quantifies over all its elements)."""
    verify_kleene(a)
    points = _join_irreducibles(a)
    pos = {p: i for i, p in enumerate(points)}
    iota = []
    for x in points:
        excluded = {a.tables["not"][(y,)] for y in range(a.size) if _leq(a, x, y)}
        m = a.tables["1"][()]
        for y in range(a.size):
            if y not in excluded:
                m = a.tables["and"][(m, y)]
        if m not in pos:
            raise AlgebraError(
                "involution left the join-irreducibles; input is not Kleene")
        iota.append(pos[m])
    leq = frozenset((i, j) for i, p in enumerate(points)
                    for j, q in enumerate(points) if _leq(a, p, q))
    return InvolutivePoset(tuple(a.labels[p] for p in points), leq, tuple(iota))


def is_projective_by_duality(p: InvolutivePoset):
    """The four conditions characterizing duals of projective finite Kleene
    algebras.  Returns (True, None) or (False, first failed condition 1-4).

    1. every x <= iota(x) lies below an involution fixpoint;
    2. {x : x <= iota(x)} is 3-complete (any subset whose pairs all have
       upper bounds there has a join there);
    3. {x : x <= iota(x)} is a non-empty meet-semilattice;
    4. points x, y below both iota(x) and iota(y) have a common upper
       bound w with w <= iota(w).
    """
    n = p.size
    q = [x for x in range(n) if p.le(x, p.iota[x])]

    for x in q:
        if not any(p.le(x, y) and p.iota[y] == y for y in range(n)):
            return False, 1

    for r in range(1, len(q) + 1):
        for xs in itertools.combinations(q, r):
            if all(p.upper_bounds((x, y), within=q)
                   for x, y in itertools.combinations(xs, 2)):
                ubs = p.upper_bounds(xs, within=q)
                if not any(all(p.le(u, v) for v in ubs) for u in ubs):
                    return False, 2

    if not q:
        return False, 3
    for x, y in itertools.combinations(q, 2):
        lbs = p.lower_bounds((x, y), within=q)
        if not any(all(p.le(v, u) for v in lbs) for u in lbs):
            return False, 3

    for x in range(n):
        for y in range(n):
            if (p.le(x, p.iota[x]) and p.le(x, p.iota[y])
                    and p.le(y, p.iota[x]) and p.le(y, p.iota[y])):
                if not p.upper_bounds((x, y), within=q):
                    return False, 4

    return True, None


def is_exact_by_quasieq(a: FiniteAlgebra):
    """Exactness criterion for finite Kleene algebras: non-trivial, 1 join
    irreducible, and the quasi-equation

        not x <= x  and  x and not y <= not x or y   implies   not y <= y

    holds (checked over all element pairs).  Returns (True, None) or
    (False, reason)."""
    verify_kleene(a)
    if a.size == 1:
        return False, "trivial algebra"
    one = a.tables["1"][()]
    if one not in _join_irreducibles(a):
        return False, "1 is not join irreducible"
    neg = lambda x: a.tables["not"][(x,)]
    for x in range(a.size):
        if not _leq(a, neg(x), x):
            continue
        for y in range(a.size):
            premise = _leq(a, a.tables["and"][(x, neg(y))],
                           a.tables["or"][(neg(x), y)])
            if premise and not _leq(a, neg(y), y):
                return False, (f"quasi-equation fails at x={a.labels[x]}, "
                               f"y={a.labels[y]}")
    return True, None


def poset_to_dot(p: InvolutivePoset, name: str = "dual") -> str:
    """DOT rendering: cover edges solid (drawn bottom-up), the involution
    as dashed arcs."""
    lines = [f'digraph "{name}" {{', "  rankdir=BT;", '  node [shape=box];']
    for i, lab in enumerate(p.labels):
        lines.append(f'  p{i} [label="{lab}"];')
    n = p.size
    for i in range(n):
        for j in range(n):
            if i != j and p.le(i, j) and not any(
                    k != i and k != j and p.le(i, k) and p.le(k, j)
                    for k in range(n)):
                lines.append(f"  p{i} -> p{j};")
    for i in range(n):
        j = p.iota[i]
        if i < j:
            lines.append(f"  p{i} -> p{j} [dir=both, style=dashed, constraint=false];")
        elif i == j:
            lines.append(f"  p{i} -> p{i} [style=dashed, constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"
