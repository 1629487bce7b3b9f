import itertools
import random

import pytest

from algen.algebra import (
    Congruence,
    direct_product,
    find_isomorphism,
    principal_congruence,
    quotient,
)
from algen.solver import (
    InternalVerificationError,
    SolverError,
    SymbolicProblem,
    alg_of,
    check_1ep,
    check_1esp,
    classify_all,
    classify_congruence,
    compare_generality,
    congruence_name,
    e_congruences,
    g_congruences,
    pairwise_reduce,
    solve,
    symbolic_solution,
    two_term_unitary,
)
from algen.terms import Substitution, Var, apply_subst, parse_term, term_to_str, term_vars
from algen.variety import BudgetExceeded, VarietyContext, VarietySpec

from factories import bool2, goedel_chain, k3, k4, ka4_diamond, n3, semilattice2
from test_variety import identity_holds_oracle


def mk(name, *gens, budget=None):
    spec = VarietySpec(name, gens[0].sig, tuple(gens))
    if budget is None:
        return VarietyContext(spec)
    return VarietyContext(spec, budget_limit=budget)


@pytest.fixture(scope="module")
def ba():
    return mk("BA", bool2())


@pytest.fixture(scope="module")
def ka():
    return mk("KA", k3())


@pytest.fixture(scope="module")
def n3v():
    return mk("N3", n3())


@pytest.fixture(scope="module")
def sl():
    return mk("SL", semilattice2())


def prob(ctx, *sources):
    return SymbolicProblem(ctx, tuple(parse_term(s, ctx.spec.sig) for s in sources))


def f1_element(ctx, src):
    f1 = ctx.free_algebra(1)
    return f1.eval_term(parse_term(src, ctx.spec.sig))


def f1_congruence(ctx, src_x, src_y):
    f1 = ctx.free_algebra(1)
    return principal_congruence(f1.algebra, f1_element(ctx, src_x),
                                f1_element(ctx, src_y))


# ---------------------------------------------------------------------------
# Oracles


def kernel_by_product_oracle(ap):
    """Lemma-free route: materialize the factor product and take the kernel
    of the evaluation into it directly."""
    prod, projs = direct_product([f.algebra for f in ap.factors])
    f1 = ap.free1
    images = []
    for rep in f1.reps:
        per_factor = tuple(f.algebra.eval(rep, {"x1": g})
                           for f, g in zip(ap.factors, ap.factor_generators))
        elem = next(e for e in range(prod.size)
                    if tuple(pr(e) for pr in projs) == per_factor)
        images.append(elem)
    return Congruence.from_map(images)


def unary_solution_classes(ctx, terms):
    """Oracle: all 1-variable solutions of the problem, found by exhaustive
    search over generalization images in F(X), grouped into equal-generality
    classes and returned with their minimal classes.

    A 1-variable candidate s solves {t_k} iff every t_k lies in the range of
    s as a function on F(X)."""
    names = []
    for t in terms:
        term_vars(t, names)
    fx = ctx.generated_by_terms(names, [Var(v) for v in names])
    comps = fx.comps
    f1 = ctx.free_algebra(1)
    rename = Substitution.make({"x1": Var("z")})

    sols = []
    for u in range(f1.size):
        s = apply_subst(rename, f1.reps[u])
        ok = True
        for t in terms:
            target = comps.eval_term(t)
            if not any(comps.eval_term(
                    apply_subst(Substitution.make({"z": fx.reps[e]}), s)) == target
                    for e in range(fx.algebra.size)):
                ok = False
                break
        if ok:
            sols.append(s)

    classes = []
    for s in sols:
        for cls in classes:
            if compare_generality(ctx, s, cls[0]) == "equal":
                cls.append(s)
                break
        else:
            classes.append([s])

    def class_leq(c1, c2):
        return compare_generality(ctx, c1[0], c2[0]) in ("less", "equal")

    minimal = [c for c in classes
               if not any(c2 is not c and class_leq(c2, c) for c2 in classes)]
    return classes, minimal


# ---------------------------------------------------------------------------
# alg_of


def test_alg_of_boolean_factors(ba):
    ap = alg_of(prob(ba, "or(x,not(x))", "1"))
    for f, g in zip(ap.factors, ap.factor_generators):
        assert f.algebra.size == 2
        assert f.algebra.labels[g] == "1"


def test_alg_of_kleene_chain_factors(ka):
    ap = alg_of(prob(ka, "and(x,not(x))", "and(y,not(y))"))
    assert [f.algebra.size for f in ap.factors] == [4, 4]
    for f in ap.factors:
        assert find_isomorphism(f.algebra, k4()) is not None


def test_alg_of_single_term_injective(ka):
    ap = alg_of(prob(ka, "x"))
    assert len(ap.factors) == 1
    assert ap.kernel.is_identity()


def test_alg_of_projections_surjective(ka):
    # p_k . h is onto E(t_k): the unary-term images of t_k cover the factor
    ap = alg_of(prob(ka, "and(x,not(x))", "or(y,1)"))
    f1 = ap.free1
    for f, g in zip(ap.factors, ap.factor_generators):
        images = {f.algebra.eval(rep, {"x1": g}) for rep in f1.reps}
        assert images == set(range(f.algebra.size))


# ---------------------------------------------------------------------------
# Kernels


def test_kernel_kleene_meet_of_contradictions(ka):
    ap = alg_of(prob(ka, "and(x,not(x))", "and(y,not(y))"))
    assert ap.kernel == f1_congruence(ka, "x1", "and(x1,not(x1))")


def test_kernel_boolean_tautology(ba):
    ap = alg_of(prob(ba, "or(x,not(x))", "1"))
    assert ap.kernel == f1_congruence(ba, "x1", "1")


def test_kernel_intersection_vs_product_oracle(ba, ka):
    rng = random.Random(7)
    from test_variety import random_term

    for ctx in (ba, ka):
        for _ in range(100):
            m = rng.choice([1, 2, 3])
            terms = tuple(random_term(rng, ctx.spec.sig, ["x", "y"], 2)
                          for _ in range(m))
            ap = alg_of(SymbolicProblem(ctx, terms))
            assert ap.kernel == kernel_by_product_oracle(ap)


# ---------------------------------------------------------------------------
# Classification


def test_classify_kleene_k4_quotient(ka):
    theta = f1_congruence(ka, "x1", "and(x1,not(x1))")
    c = classify_congruence(ka, theta)
    assert c.exact.status == "yes"
    assert c.projective.status == "yes"
    q, _ = quotient(ka.free_algebra(1).algebra, theta)
    assert find_isomorphism(q, k4()) is not None


def test_classify_kleene_k3_quotient_not_exact(ka):
    theta = f1_congruence(ka, "x1", "not(x1)")
    c = classify_congruence(ka, theta)
    assert c.exact.status == "no"
    q, _ = quotient(ka.free_algebra(1).algebra, theta)
    assert find_isomorphism(q, k3()) is not None


def test_classify_kleene_diamond_quotient_not_exact(ka):
    theta = f1_congruence(ka, "or(x1,not(x1))", "1")
    c = classify_congruence(ka, theta)
    assert c.exact.status == "no"
    q, _ = quotient(ka.free_algebra(1).algebra, theta)
    assert find_isomorphism(q, ka4_diamond()) is not None


def test_classify_kleene_exact_quotients_are_f1_k4_2(ka):
    f1 = ka.free_algebra(1)
    exact_quotients = []
    for theta, c in classify_all(ka).items():
        assert c.exact.status in ("yes", "no")  # all definitive at bound 2
        if c.exact.status == "yes":
            q, _ = quotient(f1.algebra, theta)
            exact_quotients.append(q)
    expected = [ka.free_algebra(1).algebra, k4(), bool2()]
    for q in exact_quotients:
        assert any(find_isomorphism(q, e) is not None for e in expected)
    for e in expected:
        assert any(find_isomorphism(q, e) is not None for q in exact_quotients)


def test_classify_n3_subalgebra_exact_not_projective(n3v):
    theta = f1_congruence(n3v, "oplus(x1,x1)", "oplus(x1,oplus(x1,x1))")
    c = classify_congruence(n3v, theta)
    assert c.exact.status == "yes"
    assert c.projective.status == "no"
    search = c.projective.detail["search"]
    assert search and all(not row["retraction_found"] for row in search)
    assert all(row["retraction_images_tried"] > 0 for row in search)


def test_classify_flag_consistency(ba, ka, n3v):
    for ctx in (ba, ka, n3v):
        for c in classify_all(ctx).values():
            if c.projective.status == "yes":
                assert c.exact.status == "yes"
            if c.strongly_projective.status == "yes":
                assert c.projective.status == "yes"


# ---------------------------------------------------------------------------
# E-congruences


def test_e_congruences_boolean(ba):
    members, complete = e_congruences(ba)
    assert complete
    cls = classify_all(ba)
    projective = {t for t, c in cls.items() if c.projective.status == "yes"}
    assert set(members) == projective
    assert len(members) == 3


def test_e_congruences_kleene(ka):
    members, complete = e_congruences(ka)
    assert complete
    cls = classify_all(ka)
    projective = {t for t, c in cls.items() if c.projective.status == "yes"}
    extra = f1_congruence(ka, "or(x1,not(x1))", "1")
    assert set(members) == projective | {extra}
    assert len(members) == 6


def test_e_congruences_trivial_free_algebra(sl):
    members, complete = e_congruences(sl)
    assert complete
    assert len(members) == 1
    assert members[0].is_identity() and members[0].is_total()


def test_e_congruence_characterization_depth2(ba, ka):
    # kernels of problems built from depth<=2 terms (variables at depth 0)
    # generate exactly the E-congruences, for Boolean and Kleene
    from algen.solver import _kernel_of_evaluation
    from algen.terms import App

    for ctx in (ba, ka):
        sig = ctx.spec.sig
        layer = [Var("x"), Var("y")] + [App(n, ()) for n, a in sig.ops if a == 0]
        terms = set(layer)
        for _ in range(2):
            grown = set(terms)
            for n, a in sig.ops:
                if a == 1:
                    grown |= {App(n, (t,)) for t in terms}
                if a == 2:
                    grown |= {App(n, (u, v)) for u in terms for v in terms}
            terms = grown
        f1 = ctx.free_algebra(1)
        comps = ctx.components_for(["x", "y"])
        rename = Substitution.make({"x1": Var("w")})
        single_kernels = set()
        for t in terms:
            images = [comps.eval_term(
                apply_subst(Substitution.make({"w": t}),
                            apply_subst(rename, rep))) for rep in f1.reps]
            single_kernels.add(Congruence.from_map(images))
        found = set(single_kernels)
        frontier = set(single_kernels)
        while frontier:
            new = set()
            for a_ in frontier:
                for b_ in found:
                    m = a_.meet(b_)
                    if m not in found and m not in new:
                        new.add(m)
            found |= new
            frontier = new
        members, complete = e_congruences(ctx)
        assert complete
        assert found == set(members)


# ---------------------------------------------------------------------------
# G-congruences and properties


def test_g_congruences_kleene(ka):
    ap = alg_of(prob(ka, "and(x,not(x))", "and(y,not(y))"))
    g = g_congruences(ap)
    assert g.status == "exact"
    expected = {Congruence.identity(6), f1_congruence(ka, "x1", "and(x1,not(x1))")}
    assert set(g.members) == expected
    assert set(g.maximal) == {f1_congruence(ka, "x1", "and(x1,not(x1))")}


def test_g_congruences_boolean(ba):
    ap = alg_of(prob(ba, "or(x,not(x))", "1"))
    g = g_congruences(ap)
    assert set(g.members) == {Congruence.identity(4), f1_congruence(ba, "x1", "1")}


def test_g_congruences_identity_kernel(ka):
    ap = alg_of(prob(ka, "x", "not(x)"))
    assert ap.kernel.is_identity()
    g = g_congruences(ap)
    assert set(g.members) == {Congruence.identity(6)}
    assert set(g.maximal) == {Congruence.identity(6)}


def test_1ep_1esp_verdicts(ba, ka, n3v):
    assert check_1ep(ba).status == "yes"
    assert check_1esp(ba).status == "yes"
    assert check_1ep(ka).status == "yes"
    assert check_1esp(ka).status == "yes"
    assert check_1esp(ka).bound == 2
    ep_n3 = check_1ep(n3v)
    assert ep_n3.status == "no"
    assert "con(" in ep_n3.detail["witness"]


def test_goedel_engine_1ep_yes_1esp_no_with_g4():
    g3 = mk("G3", goedel_chain(3))
    assert check_1ep(g3).status == "yes"
    g34 = mk("G34", goedel_chain(3), goedel_chain(4))
    assert check_1ep(g34).status == "yes"
    esp = check_1esp(g34)
    assert esp.status == "no"
    assert esp.detail["failure"]["reason"] == "embedding admits no retraction"


# ---------------------------------------------------------------------------
# solve


def assert_report_sound(report):
    ctx = report.ctx
    gens = ctx.spec.generators
    for entry in report.mcsg:
        for sigma, t in zip(entry.witnesses, report.problem.terms):
            assert identity_holds_oracle(gens, apply_subst(sigma, entry.term), t)
    for theta in report.g.maximal:
        assert theta.leq(report.kernel)


def test_solve_kleene_contradictions(ka):
    r = solve(prob(ka, "and(x,not(x))", "and(y,not(y))"))
    assert [term_to_str(e.term) for e in r.mcsg] == ["and(z,not(z))"]
    assert r.type.render() == "unitary"
    assert [str(w) for w in r.mcsg[0].witnesses] == [
        "{z -> and(x,not(x))}", "{z -> and(y,not(y))}"]
    assert_report_sound(r)
    # oracle: exhaustive 1-variable search agrees
    classes, minimal = unary_solution_classes(ka, r.problem.terms)
    assert len(minimal) == 1
    assert compare_generality(ka, r.mcsg[0].term, minimal[0][0]) == "equal"


def test_solve_boolean_tautology(ba):
    r = solve(prob(ba, "or(x,not(x))", "1"))
    assert [term_to_str(e.term) for e in r.mcsg] == ["1"]
    assert r.type.render() == "unitary"
    assert_report_sound(r)
    classes, minimal = unary_solution_classes(ba, r.problem.terms)
    assert len(minimal) == 1
    assert compare_generality(ba, r.mcsg[0].term, minimal[0][0]) == "equal"


def test_solve_semilattice_fresh_variable(sl):
    r = solve(prob(sl, "or(x,y)", "or(y,w)"))
    assert [term_to_str(e.term) for e in r.mcsg] == ["z"]
    assert r.type.render() == "unitary"
    assert_report_sound(r)


def test_solve_kleene_involution_pair(ka):
    r = solve(prob(ka, "x", "not(x)"))
    assert [term_to_str(e.term) for e in r.mcsg] == ["z"]
    assert r.kernel.is_identity()
    assert r.type.render() == "unitary"
    assert_report_sound(r)


def test_solve_kleene_classical_pair_maximal_is_identity(ka):
    # kernel con(0,and(z,not(z))) is an E-congruence but not projective;
    # the best generalizer is the fresh variable
    r = solve(prob(ka, "1", "0"))
    assert r.kernel == f1_congruence(ka, "or(x1,not(x1))", "1")
    assert [term_to_str(e.term) for e in r.mcsg] == ["z"]
    assert_report_sound(r)


def test_solve_n3_inconclusive(n3v):
    r = solve(prob(n3v, "oplus(x,x)", "oplus(y,oplus(y,y))"))
    assert r.type.kind == "inconclusive"
    assert r.mcsg == ()
    assert r.g.status == "approximate"
    assert len(r.g.upper) > len(r.g.lower)


def test_solve_duplicate_terms_kept(ka):
    p = prob(ka, "and(x,not(x))", "and(x,not(x))")
    assert len(p.terms) == 2
    r = solve(p)
    assert len(r.mcsg[0].witnesses) == 2
    assert_report_sound(r)


def test_solve_shortcut_consistency(ba, ka):
    # for these 1ESP varieties the product-projectivity shortcut, when it
    # fires, must agree with the congruence route
    for ctx, sources in [(ba, ("or(x,not(x))", "1")),
                         (ka, ("and(x,not(x))", "and(y,not(y))"))]:
        r = solve(prob(ctx, *sources))
        if r.shortcut["status"] == "projective":
            assert r.type.render() == "unitary"


def test_solve_budget_error():
    from factories import truncated_monoid

    ctx = mk("M9", truncated_monoid(9), budget=200)
    with pytest.raises(BudgetExceeded):
        solve(prob(ctx, "oplus(x,x)", "oplus(y,y)"))


def test_solve_three_variable_kleene_terms(ka):
    # F(3) is far beyond budget; the solver must not need it
    r = solve(prob(ka, "and(x,and(y,w))", "and(w,not(w))"))
    assert r.type.render() == "unitary"
    assert_report_sound(r)


# ---------------------------------------------------------------------------
# Round trip: symbolic solutions vs G-congruences


def test_round_trip_poset_isomorphism(ba, ka):
    cases = [
        (ba, ("or(x,not(x))", "1")),
        (ba, ("and(x,y)", "and(y,x)")),
        (ba, ("x", "not(x)")),
        (ka, ("and(x,not(x))", "and(y,not(y))")),
        (ka, ("x", "y")),
        (ka, ("or(x,not(x))", "1")),
    ]
    for ctx, sources in cases:
        p = prob(ctx, *sources)
        ap = alg_of(p)
        g = g_congruences(ap)
        classes, _ = unary_solution_classes(ctx, p.terms)
        # the kernel map is a bijection classes -> G(h)
        f1 = ctx.free_algebra(1)
        kernels = []
        for cls in classes:
            elem = f1.eval_term(apply_subst(Substitution.make({"z": Var("x1")}),
                                            cls[0]))
            from algen.solver import _kernel_of_evaluation
            kernels.append(_kernel_of_evaluation(f1, f1.algebra, elem))
        assert len(set(kernels)) == len(kernels)
        assert set(kernels) == set(g.members)
        # and it reverses the generality order
        for i, ci in enumerate(classes):
            for j, cj in enumerate(classes):
                rel = compare_generality(ctx, ci[0], cj[0])
                if rel == "less":
                    assert kernels[j].leq(kernels[i])
                    assert not kernels[i].leq(kernels[j])


# ---------------------------------------------------------------------------
# compare_generality


def test_compare_generality_examples(ba, ka):
    sig_b = ba.spec.sig
    assert compare_generality(ba, parse_term("1", sig_b),
                              parse_term("z", sig_b)) == "less"
    t = parse_term("and(z,not(z))", ka.spec.sig)
    assert compare_generality(ka, t, t) == "equal"
    assert compare_generality(ka, parse_term("and(z,not(z))", ka.spec.sig),
                              parse_term("or(z,not(z))", ka.spec.sig)) == "incomparable"


def test_compare_generality_modulo_variety(ka):
    sig = ka.spec.sig
    # not(not(z)) equals z in the variety
    assert compare_generality(ka, parse_term("not(not(z))", sig),
                              parse_term("z", sig)) == "equal"


# ---------------------------------------------------------------------------
# pairwise_reduce


def test_pairwise_boolean_three_terms(ba):
    p = prob(ba, "1", "or(x,not(x))", "or(y,not(y))")
    r = pairwise_reduce(p)
    assert r.type.render() == "unitary"
    full = solve(p)
    assert compare_generality(ba, r.mcsg[0].term, full.mcsg[0].term) == "equal"
    assert_report_sound(r)


def test_pairwise_single_term(ka):
    p = prob(ka, "and(x,not(x))")
    r = pairwise_reduce(p)
    assert compare_generality(ka, r.mcsg[0].term,
                              solve(p).mcsg[0].term) == "equal"


def test_pairwise_kleene_four_contradictions(ka):
    p = prob(ka, *[f"and({v},not({v}))" for v in ("x", "y", "w", "v")])
    r = pairwise_reduce(p)
    assert term_to_str(r.mcsg[0].term) == "and(z,not(z))"
    assert_report_sound(r)


def test_pairwise_requires_unitary_two_type(n3v):
    assert two_term_unitary(n3v).status != "yes"
    with pytest.raises(SolverError):
        pairwise_reduce(prob(n3v, "x", "oplus(y,y)", "0"))


def test_pairwise_agrees_with_solve_random(ba, ka):
    from test_variety import random_term

    rng = random.Random(20250810)
    for ctx in (ba, ka):
        for _ in range(12):
            m = rng.choice([3, 4, 5])
            terms = tuple(random_term(rng, ctx.spec.sig, ["x", "y"], 2)
                          for _ in range(m))
            p = SymbolicProblem(ctx, terms)
            r1 = pairwise_reduce(p)
            r2 = solve(p)
            assert r2.type.render() == "unitary"
            assert compare_generality(ctx, r1.mcsg[0].term,
                                      r2.mcsg[0].term) == "equal"


# ---------------------------------------------------------------------------
# Report shape


def test_report_dict_stable(ka):
    r = solve(prob(ka, "and(x,not(x))", "and(y,not(y))"))
    d1 = r.to_dict()
    d2 = solve(prob(ka, "and(x,not(x))", "and(y,not(y))")).to_dict()
    assert d1 == d2
    assert list(d1.keys()) == [
        "variety", "terms", "variables", "bound", "method", "kernel",
        "congruences", "g_congruences", "mcsg", "type", "properties",
        "caveats", "shortcut"]


def test_symbolic_solution_rejects_bad_retract(ka):
    ap = alg_of(prob(ka, "and(x,not(x))", "and(y,not(y))"))
    theta = f1_congruence(ka, "x1", "and(x1,not(x1))")
    cls = classify_all(ka)[theta]
    t, _ = cls.retract
    q_alg, nat = quotient(ka.free_algebra(1).algebra, theta)
    zq = nat(ka.free_algebra(1).generators[0])
    bad_q = next(q for q in range(q_alg.size)
                 if q_alg.eval(ka.free_algebra(1).reps[t], {"x1": q}) != zq)
    with pytest.raises(InternalVerificationError):
        symbolic_solution(ap, theta, (t, bad_q))
    bad_t = ka.free_algebra(1).algebra.label_index["0"]
    with pytest.raises(InternalVerificationError):
        symbolic_solution(ap, theta, (bad_t, 0))
