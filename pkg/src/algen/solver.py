"""The generalization solver.

Pipeline: a symbolic problem (a multiset of terms) is translated to an
algebraic one (a homomorphism from the 1-generated free algebra into a
product of 1-generated exact factors), its kernel is computed factorwise,
the congruences of F(1) are classified as exact / projective / strongly
projective, the generalizing congruences are read off, and maximal ones are
translated back to witnessed 1-variable terms.  Every emitted solution is
re-verified against the variety before it leaves this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .algebra import (
    AlgebraError,
    Congruence,
    FiniteAlgebra,
    congruence_lattice,
    direct_product,
    enumerate_homs,
    min_generators,
    poset_covers,
    quotient,
)
from .terms import (
    App,
    Substitution,
    Term,
    Var,
    apply_subst,
    check_term,
    term_rank,
    term_to_str,
    term_vars,
)
from .variety import (
    Budget,
    BudgetExceeded,
    FreeAlgebra,
    GeneratedSubalgebra,
    VarietyContext,
    var_name,
)

__all__ = [
    "DEFAULT_BOUND",
    "SolverError",
    "InternalVerificationError",
    "Verdict",
    "SymbolicProblem",
    "AlgebraicProblem",
    "CongruenceClassification",
    "GCongruences",
    "SolutionEntry",
    "TypeVerdict",
    "GeneralizationReport",
    "alg_of",
    "classify_congruence",
    "classify_all",
    "exact_congruences",
    "e_congruences",
    "g_congruences",
    "check_1ep",
    "check_1esp",
    "symbolic_solution",
    "solve",
    "compare_generality",
    "pairwise_reduce",
    "congruence_name",
    "congruence_blocks_labels",
]

DEFAULT_BOUND = 2
_PRODUCT_CAP = 128

OUTPUT_VAR = "z"


class SolverError(ValueError):
    """Violated precondition of a solver operation."""


class InternalVerificationError(RuntimeError):
    """The final soundness re-check failed; indicates a bug, not bad input."""


@dataclass(frozen=True)
class Verdict:
    """A three-valued answer.  ``bound`` records the search bound a "yes"
    or "unknown" rests on; "no" verdicts always carry an explicit witness
    or reason in ``detail``."""

    status: str
    bound: int | None = None
    detail: object = None

    def __post_init__(self):
        if self.status not in ("yes", "no", "unknown"):
            raise SolverError(f"bad verdict status {self.status!r}")

    def to_dict(self) -> dict:
        out = {"status": self.status}
        if self.bound is not None:
            out["bound"] = self.bound
        if self.detail is not None:
            out["detail"] = self.detail
        return out


# ---------------------------------------------------------------------------
# Problems


@dataclass(frozen=True)
class SymbolicProblem:
    """A finite multiset of terms over one variety; duplicates preserved."""

    ctx: VarietyContext
    terms: tuple[Term, ...]

    def __post_init__(self):
        if not self.terms:
            raise SolverError("a problem needs at least one term")
        for t in self.terms:
            check_term(t, self.ctx.spec.sig)

    @property
    def variables(self) -> tuple[str, ...]:
        names: list[str] = []
        for t in self.terms:
            term_vars(t, names)
        return tuple(names)


class AlgebraicProblem:
    """The algebraic form of a symbolic problem: the 1-generated free
    algebra, the exact factors generated by each term, and the factorwise
    kernels whose intersection is the problem kernel."""

    def __init__(self, problem: SymbolicProblem):
        self.problem = problem
        ctx = problem.ctx
        self.free1 = ctx.free_algebra(1)
        names = list(problem.variables)
        self.factors: list[GeneratedSubalgebra] = [
            ctx.generated_by_terms(names, [t], name=f"E(t{k + 1})")
            for k, t in enumerate(problem.terms)
        ]
        self.factor_generators = tuple(f.generator_indices[0] for f in self.factors)
        self.factor_kernels = tuple(
            _kernel_of_evaluation(self.free1, f.algebra, g)
            for f, g in zip(self.factors, self.factor_generators))
        acc = self.factor_kernels[0]
        for k in self.factor_kernels[1:]:
            acc = acc.meet(k)
        self.kernel = acc

    @property
    def ctx(self) -> VarietyContext:
        return self.problem.ctx


def alg_of(problem: SymbolicProblem) -> AlgebraicProblem:
    return AlgebraicProblem(problem)


def _kernel_of_evaluation(free1: FreeAlgebra, target: FiniteAlgebra,
                          elem: int) -> Congruence:
    """Kernel of the homomorphism F(1) -> target sending the generator to
    ``elem``: every element of F(1) is a unary term function, evaluated via
    its representative."""
    images = [target.eval(rep, {var_name(0): elem}) for rep in free1.reps]
    return Congruence.from_map(images)


# ---------------------------------------------------------------------------
# Classification of congruences of F(1)


@dataclass(frozen=True)
class CongruenceClassification:
    theta: Congruence
    exact: Verdict
    projective: Verdict
    strongly_projective: Verdict
    # retract pair for projective congruences: (element t of F(1) embedding
    # the quotient, element q of the quotient determining the retraction)
    retract: tuple[int, int] | None = None

    def __post_init__(self):
        if self.projective.status == "yes" and self.exact.status != "yes":
            raise InternalVerificationError("projective implies exact")
        if (self.strongly_projective.status == "yes"
                and self.projective.status != "yes"):
            raise InternalVerificationError("strongly projective implies projective")


def _evaluation_kernels(ctx: VarietyContext,
                        target_free: FreeAlgebra) -> list[Congruence]:
    """ker(z -> t) for every element t of the target free algebra, cached."""
    key = ("evaluation-kernels", target_free.n)
    cache = ctx._classification_cache
    if key not in cache:
        f1 = ctx.free_algebra(1)
        cache[key] = [
            _kernel_of_evaluation(f1, target_free.algebra, t)
            for t in range(target_free.size)
        ]
    return cache[key]


def _embedding_elements(ctx: VarietyContext, theta: Congruence,
                        target_free: FreeAlgebra) -> list[int]:
    """Elements t of a free algebra with ker(z -> t) equal to theta, i.e.
    the embeddings of F(1)/theta determined by their generator image;
    ordered by representative rank."""
    sig = ctx.spec.sig
    kernels = _evaluation_kernels(ctx, target_free)
    hits = [t for t in range(target_free.size) if kernels[t] == theta]
    hits.sort(key=lambda t: term_rank(target_free.reps[t], sig))
    return hits


def classify_congruence(ctx: VarietyContext, theta: Congruence,
                        bound: int = DEFAULT_BOUND) -> CongruenceClassification:
    """Classify a congruence of F(1) as exact / projective / strongly
    projective.

    Projectivity is decided exactly: the quotient is 1-generated, so it is
    projective iff it is a retract of F(1).  Exactness searches generator
    images in F(k) for k up to the bound and falls back to a sound
    impossibility certificate; only when neither settles it is the verdict
    unknown(bound).  Strong projectivity is checked against free codomains
    F(k), k up to the bound (an embedding into a projective algebra factors
    through its section into a free algebra, so free targets suffice);
    "yes" carries the bound, "no" carries an explicit witness.
    """
    f1 = ctx.free_algebra(1)
    a1 = f1.algebra
    if theta.size != a1.size:
        raise SolverError("congruence is not over F(1)")
    q_alg, nat = quotient(a1, theta)
    zq = nat(f1.generators[0])

    blocks = congruence_blocks_labels(ctx, theta)
    embeddings1 = _embedding_elements(ctx, theta, f1)
    retract = None
    attempts = []
    for t in embeddings1:
        rep_t = f1.reps[t]
        found = None
        for q in range(q_alg.size):
            if q_alg.eval(rep_t, {var_name(0): q}) == zq:
                found = q
                break
        attempts.append({"embedding": term_to_str(_rename_to_output(rep_t)),
                         "retraction_images_tried": q_alg.size,
                         "retraction_found": found is not None,
                         "retraction_image": None if found is None
                         else blocks[found]})
        if found is not None:
            retract = (t, found)
            break
    if retract is not None:
        projective = Verdict("yes", None, {"search": attempts})
    else:
        projective = Verdict("no", None, {
            "search": attempts,
            "reason": ("no embedding of the quotient into F(1) exists"
                       if not embeddings1 else
                       "every embedding into F(1) admits no retraction"),
        })

    if projective.status == "yes":
        exact = Verdict("yes", None, {"arity": 1,
                                      "element": term_to_str(
                                          _rename_to_output(f1.reps[retract[0]]))})
    else:
        exact = None
        for k in range(1, bound + 1):
            fk = ctx.free_algebra(k)
            hits = _embedding_elements(ctx, theta, fk)
            if hits:
                exact = Verdict("yes", None,
                                {"arity": k, "element": term_to_str(fk.reps[hits[0]])})
                break
        if exact is None:
            reason = _no_exact_certificate(ctx, theta)
            if reason is not None:
                exact = Verdict("no", None, reason)
            else:
                exact = Verdict("unknown", bound,
                                "no generator image found within the bound")

    if projective.status != "yes":
        sp = Verdict("no", None, "not projective")
    else:
        sp = None
        for k in range(1, bound + 1):
            fk = ctx.free_algebra(k)
            for t in _embedding_elements(ctx, theta, fk):
                rep_t = fk.reps[t]
                env_vars = [var_name(i) for i in range(k)]
                ok = False
                for qs in itertools.product(range(q_alg.size), repeat=k):
                    if q_alg.eval(rep_t, dict(zip(env_vars, qs))) == zq:
                        ok = True
                        break
                if not ok:
                    sp = Verdict("no", None, {
                        "arity": k,
                        "embedding": term_to_str(rep_t),
                        "reason": "embedding admits no retraction",
                    })
                    break
            if sp is not None:
                break
        if sp is None:
            sp = Verdict("yes", bound)

    return CongruenceClassification(theta, exact, projective, sp, retract)


def _no_exact_certificate(ctx: VarietyContext, theta: Congruence) -> str | None:
    """Sound, bound-free impossibility argument for exactness.

    A generator image t in any F(k) yields ker(t) as the intersection of
    the value kernels kappa[A,a] over the values a that t attains on each
    generating algebra A.  Three facts prune the attainable value sets:
    the values lie inside Allowed = {a : kappa[A,a] >= theta}; they include
    the range of the diagonal collapse of t, a unary term function; and for
    every base point b they lie inside the row of the compatible relation
    generated by {b} x A at the diagonal's value at b.  If no unary term
    function is consistent with these constraints, theta is not exact.
    Returns a reason string, or None when no certificate exists.
    """
    f1 = ctx.free_algebra(1)
    spec = ctx.spec
    x1 = var_name(0)

    kappas: list[list[Congruence]] = []
    for gen in spec.generators:
        kappas.append([
            Congruence.from_map([gen.eval(rep, {x1: a}) for rep in f1.reps])
            for a in range(gen.size)
        ])
    allowed = [
        [a for a in range(gen.size) if theta.leq(kappas[gi][a])]
        for gi, gen in enumerate(spec.generators)
    ]
    for gi, vals in enumerate(allowed):
        if not vals:
            return (f"no element of generator {gi} identifies the classes "
                    "of the congruence")

    ranges = [
        [frozenset(gen.eval(rep, {x1: a}) for a in range(gen.size))
         for rep in f1.reps]
        for gi, gen in enumerate(spec.generators)
    ]
    unary_ok = [u for u in range(f1.size)
                if all(ranges[gi][u] <= set(allowed[gi])
                       for gi in range(len(spec.generators)))]
    if not unary_ok:
        return ("every unary term function attains a value outside the "
                "admissible generator values")

    # rows of the pointed compatible relations Sg_{A^2}({b} x A)
    rows: list[list[list[set[int]]]] = []
    for gen in spec.generators:
        sq, _ = direct_product([gen, gen])
        per_b = []
        for b in range(gen.size):
            seeds = [b * gen.size + c for c in range(gen.size)]
            members = sq.subuniverse(seeds)
            row = [set() for _ in range(gen.size)]
            for m in members:
                row[m // gen.size].add(m % gen.size)
            per_b.append(row)
        rows.append(per_b)

    total = Congruence.total(f1.size)
    for u in unary_ok:
        rep_u = f1.reps[u]
        viable = True
        theta_u = total
        eta_u = total
        for gi, gen in enumerate(spec.generators):
            s_vals = set(allowed[gi])
            for b in range(gen.size):
                v = gen.eval(rep_u, {x1: b})
                s_vals &= rows[gi][b][v]
            for a in sorted(s_vals):
                theta_u = theta_u.meet(kappas[gi][a])
            for a in sorted(ranges[gi][u]):
                eta_u = eta_u.meet(kappas[gi][a])
        if theta_u == theta and theta.leq(eta_u):
            return None
    return ("no unary diagonal is consistent with the admissible generator "
            "values under the pointed compatible relations")


def classify_all(ctx: VarietyContext,
                 bound: int = DEFAULT_BOUND) -> dict[Congruence, CongruenceClassification]:
    key = ("classify", bound)
    if key not in ctx._classification_cache:
        lat = congruence_lattice(ctx.free_algebra(1).algebra)
        ctx._classification_cache[key] = {
            theta: classify_congruence(ctx, theta, bound) for theta in lat
        }
    return ctx._classification_cache[key]


# ---------------------------------------------------------------------------
# E- and G-congruences


def exact_congruences(ctx: VarietyContext, bound: int = DEFAULT_BOUND):
    cls = classify_all(ctx, bound)
    yes = [t for t, c in cls.items() if c.exact.status == "yes"]
    complete = all(c.exact.status in ("yes", "no") for c in cls.values())
    return sorted(yes, key=Congruence.sort_key), complete


def e_congruences(ctx: VarietyContext, bound: int = DEFAULT_BOUND):
    """All finite intersections of exact congruences of F(1).

    Returns (congruences, complete); ``complete`` is False when some
    exactness verdict is unknown at the bound, in which case the set is a
    lower approximation.
    """
    base, complete = exact_congruences(ctx, bound)
    found = set(base)
    frontier = set(base)
    while frontier:
        new = set()
        for t1 in frontier:
            for t2 in found:
                m = t1.meet(t2)
                if m not in found and m not in new:
                    new.add(m)
        found |= new
        frontier = new
    return sorted(found, key=Congruence.sort_key), complete


@dataclass(frozen=True)
class GCongruences:
    """Generalizing congruences of a problem.

    When the variety is 1EP the set is exact: the projective congruences
    below the kernel.  Otherwise only two-sided bounds are available:
    every projective congruence below the kernel generalizes, and every
    generalizing congruence is exact and below the kernel.
    """

    status: str                       # "exact" | "approximate"
    members: tuple[Congruence, ...]   # = lower bound when approximate
    lower: tuple[Congruence, ...]
    upper: tuple[Congruence, ...]
    maximal: tuple[Congruence, ...]


def _maximal(congs: Sequence[Congruence]) -> tuple[Congruence, ...]:
    out = [t for t in congs
           if not any(t is not u and t.leq(u) for u in congs)]
    return tuple(sorted(out, key=Congruence.sort_key))


def g_congruences(ap: AlgebraicProblem,
                  bound: int = DEFAULT_BOUND) -> GCongruences:
    cls = classify_all(ap.ctx, bound)
    ker = ap.kernel
    lower = tuple(sorted(
        (t for t, c in cls.items()
         if c.projective.status == "yes" and t.leq(ker)),
        key=Congruence.sort_key))
    upper = tuple(sorted(
        (t for t, c in cls.items()
         if c.exact.status in ("yes", "unknown") and t.leq(ker)),
        key=Congruence.sort_key))
    ep = check_1ep(ap.ctx, bound)
    if ep.status == "yes":
        return GCongruences("exact", lower, lower, lower, _maximal(lower))
    return GCongruences("approximate", lower, lower, upper, _maximal(lower))


def check_1ep(ctx: VarietyContext, bound: int = DEFAULT_BOUND) -> Verdict:
    """Whether every 1-generated exact algebra in the variety is projective."""
    key = ("1ep", bound)
    if key in ctx._property_cache:
        return ctx._property_cache[key]
    cls = classify_all(ctx, bound)
    verdict = None
    for theta, c in cls.items():
        if c.exact.status == "yes" and c.projective.status == "no":
            verdict = Verdict("no", None,
                              {"witness": congruence_name(ctx, theta),
                               "projectivity_search": c.projective.detail})
            break
    if verdict is None:
        if any(c.exact.status == "unknown" and c.projective.status == "no"
               for c in cls.values()):
            verdict = Verdict("unknown", bound,
                              "a non-projective congruence has unresolved exactness")
        else:
            verdict = Verdict("yes", bound)
    ctx._property_cache[key] = verdict
    return verdict


def check_1esp(ctx: VarietyContext, bound: int = DEFAULT_BOUND) -> Verdict:
    """Whether every 1-generated exact algebra is strongly projective."""
    key = ("1esp", bound)
    if key in ctx._property_cache:
        return ctx._property_cache[key]
    cls = classify_all(ctx, bound)
    verdict = None
    for theta, c in cls.items():
        if c.exact.status == "yes" and c.strongly_projective.status == "no":
            verdict = Verdict("no", None,
                              {"witness": congruence_name(ctx, theta),
                               "failure": c.strongly_projective.detail})
            break
    if verdict is None:
        if any(c.exact.status == "unknown" and c.strongly_projective.status != "yes"
               for c in cls.values()):
            verdict = Verdict("unknown", bound,
                              "a non-strongly-projective congruence has "
                              "unresolved exactness")
        else:
            verdict = Verdict("yes", bound)
    ctx._property_cache[key] = verdict
    return verdict


# ---------------------------------------------------------------------------
# Translating solutions back to terms


def _rename_to_output(t: Term) -> Term:
    return apply_subst(Substitution.make({var_name(0): Var(OUTPUT_VAR)}), t)


@dataclass(frozen=True)
class SolutionEntry:
    term: Term
    witnesses: tuple[Substitution, ...]

    def to_dict(self) -> dict:
        return {
            "term": term_to_str(self.term),
            "witnesses": [
                {v: term_to_str(t) for v, t in w.bindings} for w in self.witnesses
            ],
        }


def symbolic_solution(ap: AlgebraicProblem, theta: Congruence,
                      retract: tuple[int, int]) -> SolutionEntry:
    """Translate the natural-epimorphism solution for a projective
    congruence back to a witnessed 1-variable term, via the supplied
    retract pair (generator images of the embedding and retraction).

    The retract pair is re-verified, the witnesses are re-checked against
    the variety, and any failure raises InternalVerificationError.
    """
    ctx = ap.ctx
    f1 = ap.free1
    a1 = f1.algebra
    q_alg, nat = quotient(a1, theta)
    zq = nat(f1.generators[0])
    t, q = retract
    if _kernel_of_evaluation(f1, a1, t) != theta:
        raise InternalVerificationError("embedding element does not realize the kernel")
    if q_alg.eval(f1.reps[t], {var_name(0): q}) != zq:
        raise InternalVerificationError("retract pair does not compose to the identity")
    if not theta.leq(ap.kernel):
        raise InternalVerificationError("solution kernel exceeds the problem kernel")

    s_term = _rename_to_output(f1.reps[t])
    # f factors the problem through the quotient; its value on the block q
    # is h(u) for the least element u of that block
    u = min(e for e in range(a1.size) if nat(e) == q)
    witnesses = []
    for factor, gen in zip(ap.factors, ap.factor_generators):
        elem = factor.algebra.eval(f1.reps[u], {var_name(0): gen})
        witnesses.append(Substitution.make({OUTPUT_VAR: factor.reps[elem]}))
    entry = SolutionEntry(s_term, tuple(witnesses))
    _verify_entry(ctx, entry, ap.problem.terms)
    return entry


def _verify_entry(ctx: VarietyContext, entry: SolutionEntry,
                  terms: Sequence[Term]) -> None:
    if len(entry.witnesses) != len(terms):
        raise InternalVerificationError("wrong number of witnesses")
    for sigma, t in zip(entry.witnesses, terms):
        if not ctx.holds_identity(apply_subst(sigma, entry.term), t):
            raise InternalVerificationError(
                f"witness fails: {sigma}({term_to_str(entry.term)}) is not "
                f"{term_to_str(t)} in the variety")


# ---------------------------------------------------------------------------
# Generality comparison


def _instance_substitution(ctx: VarietyContext, s: Term, more_general: Term):
    """A substitution sending ``more_general`` to ``s`` modulo the variety,
    or None.  Candidate images range over the free algebra on Var(s)."""
    vars_target = term_vars(more_general)
    if not vars_target:
        return (Substitution.empty()
                if ctx.holds_identity(s, more_general) else None)
    vars_s = term_vars(s)
    try:
        free_s = ctx.generated_by_terms(vars_s, [Var(v) for v in vars_s],
                                        name="F(src)")
    except AlgebraError:
        return None  # no ground terms exist, so nothing to map into
    Budget(ctx.budget_limit).charge(
        free_s.algebra.size ** len(vars_target), "generality search")
    target_vec = free_s.comps.eval_term(s)
    for assign in itertools.product(range(free_s.algebra.size),
                                    repeat=len(vars_target)):
        sigma = Substitution.make(
            {v: free_s.reps[e] for v, e in zip(vars_target, assign)})
        if free_s.comps.eval_term(apply_subst(sigma, more_general)) == target_vec:
            return sigma
    return None


def compare_generality(ctx: VarietyContext, s: Term, s2: Term) -> str:
    """Compare two terms in the generality preorder of the variety.

    Returns "less" when s is strictly less general than s2, "greater",
    "equal", or "incomparable"; both directions are decided by exhaustive
    search over images in the free algebra on the other side's variables.
    """
    check_term(s, ctx.spec.sig)
    check_term(s2, ctx.spec.sig)
    le = _instance_substitution(ctx, s, s2) is not None
    ge = _instance_substitution(ctx, s2, s) is not None
    if le and ge:
        return "equal"
    if le:
        return "less"
    if ge:
        return "greater"
    return "incomparable"


# ---------------------------------------------------------------------------
# Reports and the top-level pipeline


@dataclass(frozen=True)
class TypeVerdict:
    kind: str                 # "unitary" | "finitary" | "inconclusive"
    size: int | None = None
    reason: str | None = None

    def render(self) -> str:
        if self.kind == "finitary":
            return f"finitary({self.size})"
        return self.kind

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.size is not None:
            out["size"] = self.size
        if self.reason is not None:
            out["reason"] = self.reason
        return out


def congruence_blocks_labels(ctx: VarietyContext, theta: Congruence) -> list[list[str]]:
    f1 = ctx.free_algebra(1)
    return [[term_to_str(_rename_to_output(f1.reps[e])) for e in block]
            for block in theta.classes()]


def congruence_name(ctx: VarietyContext, theta: Congruence) -> str:
    """Stable display name: identity/total, else a minimal generating pair."""
    from .algebra import principal_congruence

    if theta.is_identity():
        return "identity" if not theta.is_total() else "identity=total"
    if theta.is_total():
        return "total"
    f1 = ctx.free_algebra(1)
    sig = ctx.spec.sig
    order = sorted(range(f1.size), key=lambda e: term_rank(f1.reps[e], sig))
    for i_pos in range(len(order)):
        for j_pos in range(i_pos + 1, len(order)):
            x, y = order[i_pos], order[j_pos]
            if theta.related(x, y) and principal_congruence(f1.algebra, x, y) == theta:
                return (f"con({term_to_str(_rename_to_output(f1.reps[x]))},"
                        f"{term_to_str(_rename_to_output(f1.reps[y]))})")
    return "congruence" + str(theta.blocks)


@dataclass
class GeneralizationReport:
    problem: SymbolicProblem
    bound: int
    kernel: Congruence
    classifications: dict[Congruence, CongruenceClassification]
    g: GCongruences
    mcsg: tuple[SolutionEntry, ...]
    type: TypeVerdict
    ep: Verdict
    esp: Verdict
    caveats: tuple[str, ...]
    shortcut: dict
    method: str = "congruence-pipeline"

    @property
    def ctx(self) -> VarietyContext:
        return self.problem.ctx

    def to_dict(self) -> dict:
        ctx = self.ctx
        lat = sorted(self.classifications, key=Congruence.sort_key)
        return {
            "variety": ctx.spec.name,
            "terms": [term_to_str(t) for t in self.problem.terms],
            "variables": list(self.problem.variables),
            "bound": self.bound,
            "method": self.method,
            "kernel": {
                "name": congruence_name(ctx, self.kernel),
                "blocks": congruence_blocks_labels(ctx, self.kernel),
            },
            "congruences": [
                {
                    "name": congruence_name(ctx, t),
                    "blocks": congruence_blocks_labels(ctx, t),
                    "exact": self.classifications[t].exact.to_dict(),
                    "projective": self.classifications[t].projective.to_dict(),
                    "strongly_projective":
                        self.classifications[t].strongly_projective.to_dict(),
                }
                for t in lat
            ],
            "g_congruences": {
                "status": self.g.status,
                "members": [congruence_name(ctx, t) for t in self.g.members],
                "lower": [congruence_name(ctx, t) for t in self.g.lower],
                "upper": [congruence_name(ctx, t) for t in self.g.upper],
                "maximal": [congruence_name(ctx, t) for t in self.g.maximal],
            },
            "mcsg": [e.to_dict() for e in self.mcsg],
            "type": self.type.to_dict(),
            "properties": {"1ep": self.ep.to_dict(), "1esp": self.esp.to_dict()},
            "caveats": list(self.caveats),
            "shortcut": self.shortcut,
        }


def _product_shortcut(ap: AlgebraicProblem, bound: int):
    """Check whether the product of the exact factors is itself projective
    (then the problem is its own least general solution and the type is
    unitary).  The generator search is capped at the bound.

    Returns (report dict, retract data or None); the retract data is
    (product, projections, free algebra, embedding, retraction).
    """
    ctx = ap.ctx
    sizes = 1
    for f in ap.factors:
        sizes *= f.algebra.size
    if sizes > _PRODUCT_CAP:
        return {"status": "skipped",
                "reason": f"product has {sizes} elements"}, None
    prod, projs = direct_product([f.algebra for f in ap.factors])
    try:
        n, gens = min_generators(prod, max_size=bound)
    except AlgebraError:
        return {"status": "skipped",
                "reason": f"no generating set of size <= {bound}"}, None
    n_search = max(n, 1)
    try:
        fk = ctx.free_algebra(n_search)
    except BudgetExceeded:
        return {"status": "skipped", "reason": "free algebra above budget"}, None
    for i_hom in enumerate_homs(prod, fk.algebra, injective=True, gens=gens):
        pinned = {i_hom(x): x for x in range(prod.size)}
        for j_hom in enumerate_homs(fk.algebra, prod, pinned,
                                    gens=fk.generators):
            note = {"status": "projective", "generators": n,
                    "note": "the problem is the minimum of its solution "
                            "poset; type unitary"}
            return note, (prod, projs, fk, i_hom, j_hom)
    return {"status": "not-projective", "generators": n}, None


def solve(problem: SymbolicProblem,
          bound: int = DEFAULT_BOUND) -> GeneralizationReport:
    """Full pipeline: kernel, classification, G-congruences, minimal
    complete set of generalizers, and the type verdict."""
    ctx = problem.ctx
    ap = alg_of(problem)
    cls = classify_all(ctx, bound)
    ep = check_1ep(ctx, bound)
    esp = check_1esp(ctx, bound)
    g = g_congruences(ap, bound)
    shortcut, retract_data = _product_shortcut(ap, bound)
    caveats: list[str] = []
    mcsg: list[SolutionEntry] = []

    if ep.status == "yes":
        for theta in g.maximal:
            mcsg.append(symbolic_solution(ap, theta, cls[theta].retract))
        mcsg.sort(key=lambda e: term_rank(e.term, ctx.spec.sig))
        size = len(mcsg)
        kind = "unitary" if size == 1 else "finitary"
        if esp.status == "yes":
            type_verdict = TypeVerdict(kind, size)
        else:
            type_verdict = TypeVerdict(kind, size)
            caveats.append(
                "soundness verified; minimal completeness of the emitted set "
                f"rests on 1ESP, which is {esp.status} at bound {bound}")
        if shortcut.get("status") == "projective" and size != 1:
            raise InternalVerificationError(
                "product projectivity implies a unitary type")
    elif shortcut.get("status") == "projective":
        entry = _shortcut_solution(ap, retract_data)
        mcsg = [entry]
        type_verdict = TypeVerdict("unitary", 1,
                                   "product of exact factors is projective")
        caveats.append("variety is not 1EP; verdict rests on the projectivity "
                       "of the factor product")
    else:
        type_verdict = TypeVerdict(
            "inconclusive", None,
            f"variety is not 1EP (1EP is {ep.status}); only two-sided "
            "congruence bounds are available")
        caveats.append("no minimal complete set emitted; G-congruences are "
                       "bracketed by the lower and upper sets")

    report = GeneralizationReport(
        problem=problem, bound=bound, kernel=ap.kernel, classifications=cls,
        g=g, mcsg=tuple(mcsg), type=type_verdict, ep=ep, esp=esp,
        caveats=tuple(caveats), shortcut=shortcut)
    for entry in report.mcsg:
        _verify_entry(ctx, entry, problem.terms)
    return report


def _shortcut_solution(ap: AlgebraicProblem, retract_data) -> SolutionEntry:
    """Sym of the problem itself, valid when the factor product is
    projective: embed the product into F(n) and read the term off the
    image of the problem tuple.  Output variables are z1..zn."""
    ctx = ap.ctx
    prod, projs, fk, i_hom, j_hom = retract_data
    n_search = fk.n
    h_elem = next(
        e for e in range(prod.size)
        if all(pr(e) == g for pr, g in zip(projs, ap.factor_generators)))
    out_vars = {var_name(i): Var(f"z{i + 1}") for i in range(n_search)}
    s_term = apply_subst(Substitution.make(out_vars), fk.reps[i_hom(h_elem)])
    witnesses = []
    for factor, pr in zip(ap.factors, projs):
        bind = {}
        for i in range(n_search):
            elem = pr(j_hom(fk.generators[i]))
            bind[f"z{i + 1}"] = factor.reps[elem]
        witnesses.append(Substitution.make(bind))
    entry = SolutionEntry(s_term, tuple(witnesses))
    _verify_entry(ctx, entry, ap.problem.terms)
    return entry


# ---------------------------------------------------------------------------
# Pairwise reduction


def two_term_unitary(ctx: VarietyContext, bound: int = DEFAULT_BOUND) -> Verdict:
    """Whether every 2-term problem in the variety has unitary type:
    1ESP must hold and every intersection of two exact congruences must
    have a unique maximal projective congruence below it."""
    esp = check_1esp(ctx, bound)
    if esp.status != "yes":
        return Verdict(esp.status, bound, {"1esp": esp.to_dict()})
    cls = classify_all(ctx, bound)
    exact = [t for t, c in cls.items() if c.exact.status == "yes"]
    projective = [t for t, c in cls.items() if c.projective.status == "yes"]
    for t1 in exact:
        for t2 in exact:
            ker = t1.meet(t2)
            below = [p for p in projective if p.leq(ker)]
            if len(_maximal(below)) != 1:
                return Verdict("no", bound,
                               {"kernel": congruence_name(ctx, ker)})
    return Verdict("yes", bound)


def pairwise_reduce(problem: SymbolicProblem,
                    bound: int = DEFAULT_BOUND) -> GeneralizationReport:
    """Iterated pairing: solve 2-term subproblems and recurse on their
    solutions (duplicating the odd tail) until a single term remains.
    Requires the variety to be verified unitary on 2-term problems."""
    ctx = problem.ctx
    ok = two_term_unitary(ctx, bound)
    if ok.status != "yes":
        raise SolverError(
            f"pairwise reduction requires unitary 2-term type; check is {ok.status}")
    terms = list(problem.terms)
    if len(terms) == 1:
        terms = [terms[0], terms[0]]
    while len(terms) > 1:
        if len(terms) % 2 == 1:
            terms.append(terms[-1])
        next_terms = []
        for i in range(0, len(terms), 2):
            sub = SymbolicProblem(ctx, (terms[i], terms[i + 1]))
            rep = solve(sub, bound)
            if rep.type.kind != "unitary":
                raise SolverError("a 2-term subproblem was not unitary")
            next_terms.append(rep.mcsg[0].term)
        terms = next_terms
    final = terms[0]

    ap = alg_of(problem)
    witnesses = []
    for factor, t in zip(ap.factors, problem.terms):
        sigma = None
        comps = factor.comps
        target = comps.eval_term(t)
        for e in range(factor.algebra.size):
            cand = Substitution.make({OUTPUT_VAR: factor.reps[e]})
            if comps.eval_term(apply_subst(cand, final)) == target:
                sigma = cand
                break
        if sigma is None:
            raise InternalVerificationError(
                "no witness for the pairwise solution inside the exact factor")
        witnesses.append(sigma)
    entry = SolutionEntry(final, tuple(witnesses))
    _verify_entry(ctx, entry, problem.terms)

    cls = classify_all(ctx, bound)
    report = GeneralizationReport(
        problem=problem, bound=bound, kernel=ap.kernel, classifications=cls,
        g=g_congruences(ap, bound), mcsg=(entry,),
        type=TypeVerdict("unitary", 1), ep=check_1ep(ctx, bound),
        esp=check_1esp(ctx, bound), caveats=(),
        shortcut={"status": "skipped", "reason": "pairwise reduction"},
        method="pairwise-reduction")
    return report
