import itertools

import pytest
from hypothesis import given, settings

from conftest import terms_strategy
from vsc_lab.enumerate import enumerate_terms
from vsc_lab.syntax import ParseError, parse, print_term
from vsc_lab.terms import (
    App, Es, Lam, Move, NamePool, Var, alpha_eq, alpha_key, canon, free_vars,
    is_pure, replace_at, resolve, subst, subterms,
)

x, y, z = Var("x"), Var("y"), Var("z")


def test_parse_examples():
    assert parse("\\x.x x") == Lam("x", App(x, x))
    assert parse("(x x)[x <- \\y.y]") == Es(App(x, x), "x", Lam("y", y))
    assert parse("\\x.\\y.x y z") == Lam("x", Lam("y", App(App(x, y), z)))


def test_parse_unicode_lambda_and_suffix_binding():
    assert parse("λx.x") == Lam("x", x)
    # the substitution suffixes the argument, not the whole application
    assert parse("x y[y <- z]") == App(x, Es(y, "y", z))
    assert parse("(x y)[y <- z][x <- z]") == Es(Es(App(x, y), "y", z), "x", z)


def test_parse_errors_report_position():
    with pytest.raises(ParseError) as err:
        parse("x \\y.y")
    assert err.value.column == 3
    with pytest.raises(ParseError) as err:
        parse("x\n  (y")
    assert err.value.line == 2
    with pytest.raises(ParseError):
        parse("x [y z]")
    with pytest.raises(ParseError):
        parse("X")


def test_open_terms_are_accepted():
    assert free_vars(parse("foo bar'")) == {"foo", "bar'"}


def test_print_examples():
    assert print_term(Lam("x", x)) == "\\x.x"
    assert print_term(Es(x, "x", Lam("y", y))) == "x[x <- \\y.y]"
    assert print_term(App(Lam("x", x), Lam("y", y))) == "(\\x.x) (\\y.y)"


def test_full_parens_mode():
    t = parse("(\\x.x) y[y <- z]")
    assert print_term(t, full_parens=True) == "((\\x.x) (y[y <- z]))"
    assert parse(print_term(t, full_parens=True)) == t


@given(terms_strategy())
def test_print_parse_round_trip(t):
    assert parse(print_term(t)) == t
    assert parse(print_term(t, full_parens=True)) == t


def test_round_trip_on_enumeration():
    for t in enumerate_terms(6, ["y"]):
        assert alpha_eq(parse(print_term(t)), t)


def test_free_vars_examples():
    assert free_vars(parse("\\x.x y")) == {"y"}
    assert free_vars(parse("(x y)[x <- z]")) == {"y", "z"}
    assert free_vars(parse("(\\x.x x) (\\x.x x)")) == frozenset()


def test_subst_avoids_capture():
    t = parse("\\x.\\y.z")
    out = subst(t, "z", parse("x y"))
    assert alpha_eq(out, parse("\\a.\\b.x y"))
    assert out.binder != "x" and out.body.binder != "y"


def test_subst_trivial_cases():
    v = parse("\\w.w")
    assert subst(x, "x", v) == v
    assert subst(y, "x", v) == y
    # binder of an ES shadows in the body only
    assert subst(parse("x[x <- x]"), "x", y) == parse("x[x <- y]")


@given(terms_strategy(), terms_strategy())
def test_subst_free_variables(t, u):
    out = subst(t, "x", u)
    expected = (free_vars(t) - {"x"}) | free_vars(u)
    if "x" in free_vars(t):
        assert free_vars(out) == expected
    else:
        assert out == t


def test_name_pool_is_deterministic():
    assert NamePool({"x", "x1"}).fresh("x") == "x2"
    assert NamePool({"x", "x1"}).fresh("x5") == "x2"
    pool = NamePool({"a"})
    assert [pool.fresh("a"), pool.fresh("a")] == ["a1", "a2"]


def test_alpha_eq_examples():
    assert alpha_eq(parse("\\x.x"), parse("\\y.y"))
    assert not alpha_eq(parse("\\x.\\y.x"), parse("\\x.\\y.y"))
    assert alpha_eq(parse("x[x <- y]"), parse("z[z <- y]"))
    assert not alpha_eq(parse("x[x <- y]"), parse("x[z <- y]"))


@given(terms_strategy())
def test_canon_idempotent_and_sound(t):
    c = canon(t)
    assert canon(c) == c
    assert alpha_eq(c, t)


def test_paths():
    t = parse("(\\x.x y)[y <- z]")
    path = (Move.ES_BODY, Move.LAM_BODY, Move.APP_R)
    assert resolve(t, path) == y
    assert replace_at(t, path, z) == parse("(\\x.x z)[y <- z]")
    assert [p for p, _ in subterms(parse("x y"))] == [(), (Move.APP_L,), (Move.APP_R,)]
    with pytest.raises(ValueError):
        resolve(t, (Move.APP_L,))


def test_is_pure():
    assert is_pure(parse("\\x.x y"))
    assert not is_pure(parse("\\x.x[x <- y]"))


# -- enumeration --------------------------------------------------------------

def test_enumeration_examples():
    assert list(enumerate_terms(1, [], True)) == []
    assert [print_term(t) for t in enumerate_terms(2, [], True)] == ["\\a.a"]
    # sizes are node counts and the bound is inclusive
    got = {alpha_key(t) for t in enumerate_terms(3, [], True)}
    assert got == {alpha_key(parse(s)) for s in ("\\a.a", "\\a.\\b.a", "\\a.\\b.b")}


def _raw_trees(size, binders, free):
    """Every named tree of exactly ``size`` nodes over the given names."""
    if size == 1:
        for n in binders + free:
            yield Var(n)
        return
    for b in binders:
        for body in _raw_trees(size - 1, binders, free):
            yield Lam(b, body)
    for left in range(1, size - 1):
        for f, a in itertools.product(list(_raw_trees(left, binders, free)),
                                      list(_raw_trees(size - 1 - left, binders, free))):
            yield App(f, a)
            for b in binders:
                yield Es(f, b, a)


def test_enumeration_matches_brute_force_up_to_size_4():
    binders = ["a", "b", "c"]
    expected = set()
    for size in range(1, 5):
        for t in _raw_trees(size, binders, ["y"]):
            if t.fv <= {"y"}:
                expected.add(alpha_key(t))
    got = [alpha_key(t) for t in enumerate_terms(4, ["y"])]
    assert len(got) == len(set(got))
    assert set(got) == expected


def test_enumeration_is_deterministic_and_ordered():
    first = list(enumerate_terms(5, ["y"]))
    assert first == list(enumerate_terms(5, ["y"]))
    assert [t.size for t in first] == sorted(t.size for t in first)
    assert all(t.fv <= {"y"} for t in first)
    assert all(is_pure(t) for t in enumerate_terms(5, ["y"], True))
