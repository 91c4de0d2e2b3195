import pytest

from vsc_lab.classify import is_rigid
from vsc_lab.enumerate import enumerate_terms
from vsc_lab.multitypes import (
    EMPTY, G, Arrow, MultiType, Rule, TypeContext, check_derivation, deriv_size,
    is_left, is_left_ctx, is_shrinking, lam, many, var_derivation,
)
from vsc_lab.rewrite import RuleTag, Step, Strategy, redexes, step
from vsc_lab.syntax import parse
from vsc_lab.terms import Move, Var, alpha_eq, subst
from vsc_lab.transform import (
    Mode, TransformError, TypedStep, align, anti_substitute, empty_value_derivation,
    infer, infer_report, merge_value_derivations, spreading_violations,
    split_value_derivation, subject_expand, subject_reduce, substitute_derivation,
    type_fireball_open, type_fireball_shrinking, type_inert_open, type_inert_shrinking,
)

OMEGA = "((\\x.x x) (\\x.x x))"
GG = MultiType.of(G)
ID_TYPE = MultiType.of(Arrow(GG, GG))


def identity(binder="z"):
    return many(parse(f"\\{binder}.{binder}"), [lam(var_derivation(binder, GG), binder)])


def first_step(src, strategy=Strategy.VSC):
    t = parse(src)
    return TypedStep.of(t, step(t, strategy))


# -- value derivations ----------------------------------------------------------

def test_empty_value_derivation():
    d = empty_value_derivation(parse(f"\\x.{OMEGA}"))
    assert d.rhs == EMPTY and deriv_size(d) == 0
    check_derivation(empty_value_derivation(Var("x")))
    with pytest.raises(TransformError):
        empty_value_derivation(parse("x y"))


def test_split_degenerate_and_balanced():
    d = merge_value_derivations(identity(), identity())
    assert deriv_size(d) == 4 and d.rhs == ID_TYPE + ID_TYPE
    whole, nothing = split_value_derivation(d, d.rhs, EMPTY)
    assert whole == d and nothing.premises == ()
    left, right = split_value_derivation(d, ID_TYPE, ID_TYPE)
    for part in (left, right):
        check_derivation(part)
    assert deriv_size(left) + deriv_size(right) == deriv_size(d)
    assert left.ctx + right.ctx == d.ctx
    with pytest.raises(TransformError):
        split_value_derivation(d, ID_TYPE, EMPTY)


def test_split_of_empty_type():
    d = empty_value_derivation(parse("\\x.x"))
    a, b = split_value_derivation(d, EMPTY, EMPTY)
    assert deriv_size(a) == deriv_size(b) == 0


def test_merge_laws():
    d = identity()
    unit = merge_value_derivations(empty_value_derivation(d.subject), d)
    assert unit.conclusion == d.conclusion
    mixed = merge_value_derivations(d, many(d.subject, [lam(var_derivation("z", EMPTY), "z")]))
    a, b = split_value_derivation(mixed, ID_TYPE, mixed.rhs - ID_TYPE)
    assert merge_value_derivations(a, b) == mixed
    # α-variant subjects are aligned
    assert merge_value_derivations(d, identity("w")).subject == d.subject
    with pytest.raises(TransformError):
        merge_value_derivations(d, many(parse("\\z.\\w.z"), []))


# -- substitution ----------------------------------------------------------------

def test_substitute_into_variable():
    dt = var_derivation("x", ID_TYPE)
    dv = identity()
    theta = substitute_derivation(dt, "x", dv)
    assert theta == dv
    assert deriv_size(theta) <= deriv_size(dt) + deriv_size(dv)


def test_substitute_into_other_variable():
    dt = var_derivation("z", GG)
    theta = substitute_derivation(dt, "x", empty_value_derivation(parse("\\w.w")))
    assert theta == dt


def test_substitute_when_variable_absent():
    dt = identity("y")
    theta = substitute_derivation(dt, "x", empty_value_derivation(parse("\\w.w")))
    assert (theta.ctx, theta.rhs) == (dt.ctx, dt.rhs)


def test_substitute_type_mismatch():
    with pytest.raises(TransformError):
        substitute_derivation(var_derivation("x", GG), "x", identity())


def test_substitute_avoids_capture():
    # (\y.x y){x <- \w.y w}: the binder y must be renamed
    t = parse("\\y.x y")
    d = infer(parse("(\\x.\\y.x y) (\\w.y w)"), Mode.SHRINKING, 50)
    assert d is not None
    ts = TypedStep.of(d.subject, step(d.subject, Strategy.VSC))
    d1 = subject_reduce(d, ts)
    d2 = subject_reduce(d1, TypedStep.of(d1.subject, step(d1.subject, Strategy.VSC)))
    check_derivation(d2)
    assert alpha_eq(d2.subject, subst(t, "x", parse("\\w.y w")))
    assert d2.ctx == d.ctx


def test_anti_substitute_examples():
    v = parse("\\z.z")
    psi, theta = anti_substitute(identity(), Var("x"), "x", v)
    assert psi == var_derivation("x", ID_TYPE) and theta == identity()
    d = var_derivation("w", GG)
    psi, theta = anti_substitute(d, Var("w"), "x", v)
    assert theta.rhs == EMPTY and theta.premises == ()
    assert psi == d
    with pytest.raises(TransformError):
        anti_substitute(d, Var("q"), "x", v)


def test_anti_substitute_round_trip():
    t = parse("(\\a.x a) (x y)")
    v = parse("\\b.b")
    d = infer(subst(t, "x", v), Mode.SHRINKING, 100)
    psi, theta = anti_substitute(d, t, "x", v)
    check_derivation(psi)
    check_derivation(theta)
    assert psi.ctx.remove("x") + theta.ctx == d.ctx
    back = substitute_derivation(psi, "x", theta)
    assert (back.ctx, back.rhs, back.subject) == (d.ctx, d.rhs, d.subject)


# -- subject reduction and expansion -----------------------------------------

def test_multiplicative_step_drops_size_by_one():
    t = parse("(\\x.x) (\\y.y)")
    d = infer(t, Mode.SHRINKING, 10)
    ts = TypedStep.of(t, step(t, Strategy.VSC))
    assert ts.step.rule is RuleTag.M
    d2 = subject_reduce(d, ts)
    check_derivation(d2)
    assert deriv_size(d2) == deriv_size(d) - 1
    assert (d2.ctx, d2.rhs) == (d.ctx, d.rhs)


def test_exponential_step_drops_size():
    t = parse("x[x <- \\y.y]")
    d = infer(t, Mode.SHRINKING, 10)
    d2 = subject_reduce(d, TypedStep.of(t, step(t, Strategy.VSC)))
    check_derivation(d2)
    assert deriv_size(d2) < deriv_size(d)
    assert d2.subject == parse("\\y.y")


def test_step_under_empty_many_keeps_size():
    t = parse("\\z.(\\x.x) (\\y.y)")
    d = many(t, [])
    s = Step((Move.LAM_BODY,), RuleTag.M, parse("\\z.x[x <- \\y.y]"))
    d2 = subject_reduce(d, TypedStep(s, t, s.reduct))
    assert deriv_size(d2) == 0 and d2.subject == s.reduct


def test_expansion_across_exponential_step():
    before = parse("x[x <- \\y.y]")
    ts = TypedStep.of(before, step(before, Strategy.VSC))
    d = identity("y")
    expanded = subject_expand(d, ts)
    check_derivation(expanded)
    assert expanded.rule is Rule.ES
    assert (expanded.ctx, expanded.rhs, expanded.subject) == (d.ctx, d.rhs, before)
    assert subject_reduce(expanded, ts).conclusion == d.conclusion
    assert is_shrinking(expanded) == is_shrinking(d)


def test_transport_rejects_mismatches():
    ts = first_step("(\\x.x) (\\y.y)")
    with pytest.raises(TransformError):
        subject_reduce(identity(), ts)
    with pytest.raises(TransformError):
        subject_expand(var_derivation("q", GG), ts)
    bad = TypedStep(ts.step, ts.before, parse("\\y.y"))
    with pytest.raises(TransformError):
        subject_reduce(infer(ts.before, Mode.SHRINKING, 10), bad)


def test_transport_with_layer_renaming():
    # the substitution layer binds y, which is also free in the argument
    t = parse("((\\x.x y)[y <- \\a.a]) y")
    for mode in (Mode.OPEN, Mode.SHRINKING):
        res = infer_report(t, mode, 50)
        assert res.derivation is not None
        for s in redexes(t, Strategy.VSC):
            ts = TypedStep.of(t, s)
            d2 = subject_reduce(res.derivation, ts)
            check_derivation(d2)
            assert subject_expand(d2, ts).conclusion == res.derivation.conclusion


# -- typing normal forms -----------------------------------------------------

def test_type_inert_open_examples():
    assert var_derivation("x", GG) == type_inert_open(Var("x"), GG)
    d = type_inert_open(parse("y (\\x.x)"), GG)
    check_derivation(d)
    assert d.ctx == TypeContext.of(y=MultiType.of(Arrow(EMPTY, GG)))
    d = type_inert_open(Var("x"), EMPTY)
    assert d.premises == () and d.rhs == EMPTY
    with pytest.raises(TransformError):
        type_inert_open(parse("\\x.x"), GG)


def test_type_fireball_open_examples():
    d = type_fireball_open(parse(f"\\x.{OMEGA}"))
    assert d.rule is Rule.MANY and d.premises == ()
    for src in ("y y", "(\\x.x)[y <- z w]"):
        d = type_fireball_open(parse(src))
        check_derivation(d)
        assert d.rhs == EMPTY
    assert type_fireball_open(parse("(\\x.x)[y <- z w]")).rule is Rule.ES
    with pytest.raises(TransformError):
        type_fireball_open(parse(OMEGA))


def test_type_inert_shrinking_examples():
    assert type_inert_shrinking(Var("x"), GG) == var_derivation("x", GG)
    d = type_inert_shrinking(parse("y (\\z.z)"), GG)
    check_derivation(d)
    assert is_left_ctx(d.ctx) and d.rhs == GG
    d = type_inert_shrinking(parse("x[y <- z]"), EMPTY)
    check_derivation(d)
    assert is_left_ctx(d.ctx)
    with pytest.raises(TransformError):
        type_inert_shrinking(Var("x"), MultiType.of(Arrow(EMPTY, GG)))


def test_type_fireball_shrinking_examples():
    d = type_fireball_shrinking(Var("x"))
    assert d == var_derivation("x", GG) and is_shrinking(d)
    d = type_fireball_shrinking(parse("\\x.x"))
    check_derivation(d)
    assert d.rhs == ID_TYPE and is_shrinking(d)
    with pytest.raises(TransformError):
        type_fireball_shrinking(parse(f"\\x.{OMEGA}"))


def test_infer_examples():
    d = infer(parse(f"\\x.{OMEGA}"), Mode.OPEN, 100)
    assert d.rhs == EMPTY and deriv_size(d) == 0
    d = infer(parse(f"(\\x.y) (\\z.{OMEGA})"), Mode.SHRINKING, 200)
    check_derivation(d)
    assert is_shrinking(d)
    res = infer_report(parse(f"(\\x.\\z.z) (y (\\z.{OMEGA}))"), Mode.SHRINKING, 500)
    assert res.derivation is None and res.status == "cycle"
    res = infer_report(parse("(\\x.x x) (\\y.y)"), Mode.SHRINKING, 2)
    assert res.status == "exhausted"


# -- population-wide contracts ------------------------------------------------

POP = list(enumerate_terms(6, ["y"]))


def test_inferred_derivations_are_valid_and_respect_free_variables():
    for t in POP:
        for mode in (Mode.OPEN, Mode.SHRINKING):
            res = infer_report(t, mode, 100)
            assert res.derivation is not None
            for d in res.chain:
                check_derivation(d)
                stack = [d]
                while stack:
                    node = stack.pop()
                    stack.extend(node.premises)
                    assert node.ctx.dom() <= node.subject.fv
            assert len(res.outcome.trace) <= deriv_size(res.derivation)
            if mode is Mode.SHRINKING:
                assert is_shrinking(res.derivation)


def test_spreading_on_rigid_subjects():
    rigid_seen = 0
    for t in POP:
        d = infer(t, Mode.SHRINKING, 100)
        assert spreading_violations(d) == []
        if is_rigid(t) and is_left_ctx(d.ctx):
            rigid_seen += 1
            assert is_left(d.rhs)
    assert rigid_seen > 0


def test_align_renames_binders():
    d = identity("z")
    a = align(d, parse("\\q.q"))
    check_derivation(a)
    assert a.subject == parse("\\q.q") and a.rhs == d.rhs
    with pytest.raises(TransformError):
        align(d, parse("x y"))
