"""Terms with explicit substitutions, binding machinery and positions."""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union


@dataclass(frozen=True)
class Var:
    name: str
    fv: frozenset = field(init=False, repr=False, compare=False)
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", frozenset((self.name,)))
        object.__setattr__(self, "size", 1)


@dataclass(frozen=True)
class Lam:
    binder: str
    body: "Term"
    fv: frozenset = field(init=False, repr=False, compare=False)
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", self.body.fv - {self.binder})
        object.__setattr__(self, "size", 1 + self.body.size)


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"
    fv: frozenset = field(init=False, repr=False, compare=False)
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", self.fun.fv | self.arg.fv)
        object.__setattr__(self, "size", 1 + self.fun.size + self.arg.size)


@dataclass(frozen=True)
class Es:
    """``body[binder <- subject]``; the binder scopes over ``body`` only."""

    body: "Term"
    binder: str
    subject: "Term"
    fv: frozenset = field(init=False, repr=False, compare=False)
    size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", (self.body.fv - {self.binder}) | self.subject.fv)
        object.__setattr__(self, "size", 1 + self.body.size + self.subject.size)


Term = Union[Var, Lam, App, Es]


def free_vars(t: Term) -> frozenset:
    return t.fv


def is_pure(t: Term) -> bool:
    if isinstance(t, Var):
        return True
    if isinstance(t, Lam):
        return is_pure(t.body)
    if isinstance(t, App):
        return is_pure(t.fun) and is_pure(t.arg)
    return False


def names(t: Term) -> set:
    """Every identifier occurring in ``t``, bound or free."""
    out = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            out.add(u.name)
        elif isinstance(u, Lam):
            out.add(u.binder)
            stack.append(u.body)
        elif isinstance(u, App):
            stack.extend((u.fun, u.arg))
        else:
            out.add(u.binder)
            stack.extend((u.body, u.subject))
    return out


_TRAILING_DIGITS = re.compile(r"\d+$")


class NamePool:
    """Deterministic fresh identifiers: base name plus the smallest unused suffix."""

    def __init__(self, avoid: Iterable[str] = ()):
        self.avoid = set(avoid)

    def fresh(self, base: str) -> str:
        stem = _TRAILING_DIGITS.sub("", base) or "v"
        for i in itertools.count(1):
            name = f"{stem}{i}"
            if name not in self.avoid:
                self.avoid.add(name)
                return name
        raise AssertionError("unreachable")


def subst(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding ``t{x <- u}``; ``t`` is returned unchanged when ``x`` is not free."""
    if x not in t.fv:
        return t
    if isinstance(t, Var):
        return u
    if isinstance(t, App):
        return App(subst(t.fun, x, u), subst(t.arg, x, u))
    if isinstance(t, Lam):
        binder, body = _avoid_capture(t.binder, t.body, x, u)
        return Lam(binder, subst(body, x, u))
    subject = subst(t.subject, x, u)
    if t.binder == x or x not in t.body.fv:
        return Es(t.body, t.binder, subject)
    binder, body = _avoid_capture(t.binder, t.body, x, u)
    return Es(subst(body, x, u), binder, subject)


def _avoid_capture(binder: str, body: Term, x: str, u: Term) -> tuple[str, Term]:
    if binder not in u.fv:
        return binder, body
    fresh = NamePool(body.fv | u.fv | {x}).fresh(binder)
    return fresh, subst(body, binder, Var(fresh))


def rename(t: Term, old: str, new: str) -> Term:
    return subst(t, old, Var(new))


def alpha_key(t: Term, env: tuple = ()) -> tuple:
    """Nameless key: bound occurrences become binder distances, free ones keep their name."""
    if isinstance(t, Var):
        for i, name in enumerate(reversed(env)):
            if name == t.name:
                return ("b", i)
        return ("f", t.name)
    if isinstance(t, Lam):
        return ("L", alpha_key(t.body, env + (t.binder,)))
    if isinstance(t, App):
        return ("A", alpha_key(t.fun, env), alpha_key(t.arg, env))
    return ("E", alpha_key(t.body, env + (t.binder,)), alpha_key(t.subject, env))


def alpha_eq(t: Term, u: Term) -> bool:
    return t == u or alpha_key(t) == alpha_key(u)


def canon(t: Term) -> Term:
    """Rename binders in preorder to ``v0, v1, ...`` skipping the free names of ``t``."""
    taken = t.fv
    counter = itertools.count()

    def next_name():
        while True:
            name = f"v{next(counter)}"
            if name not in taken:
                return name

    def go(u, env):
        if isinstance(u, Var):
            return Var(env.get(u.name, u.name))
        if isinstance(u, Lam):
            name = next_name()
            return Lam(name, go(u.body, {**env, u.binder: name}))
        if isinstance(u, App):
            return App(go(u.fun, env), go(u.arg, env))
        name = next_name()
        body = go(u.body, {**env, u.binder: name})
        return Es(body, name, go(u.subject, env))

    return go(t, {})


class Move(enum.Enum):
    APP_L = "appL"
    APP_R = "appR"
    LAM_BODY = "lamBody"
    ES_BODY = "esBody"
    ES_SUBJECT = "esSubject"


# document order: a node precedes its children, children left to right
_MOVE_RANK = {
    Move.APP_L: 0,
    Move.APP_R: 1,
    Move.LAM_BODY: 0,
    Move.ES_BODY: 0,
    Move.ES_SUBJECT: 1,
}

Path = tuple  # tuple[Move, ...]


def path_key(path: Path) -> tuple:
    return tuple(_MOVE_RANK[m] for m in path)


def resolve(t: Term, path: Path) -> Term:
    for move in path:
        t = _child(t, move)
    return t


def _child(t: Term, move: Move) -> Term:
    if move is Move.APP_L and isinstance(t, App):
        return t.fun
    if move is Move.APP_R and isinstance(t, App):
        return t.arg
    if move is Move.LAM_BODY and isinstance(t, Lam):
        return t.body
    if move is Move.ES_BODY and isinstance(t, Es):
        return t.body
    if move is Move.ES_SUBJECT and isinstance(t, Es):
        return t.subject
    raise ValueError(f"path move {move.value} does not fit {type(t).__name__}")


def replace_at(t: Term, path: Path, new: Term) -> Term:
    """Positional plugging; no renaming is performed."""
    if not path:
        return new
    move, rest = path[0], path[1:]
    if move is Move.APP_L and isinstance(t, App):
        return App(replace_at(t.fun, rest, new), t.arg)
    if move is Move.APP_R and isinstance(t, App):
        return App(t.fun, replace_at(t.arg, rest, new))
    if move is Move.LAM_BODY and isinstance(t, Lam):
        return Lam(t.binder, replace_at(t.body, rest, new))
    if move is Move.ES_BODY and isinstance(t, Es):
        return Es(replace_at(t.body, rest, new), t.binder, t.subject)
    if move is Move.ES_SUBJECT and isinstance(t, Es):
        return Es(t.body, t.binder, replace_at(t.subject, rest, new))
    raise ValueError(f"path move {move.value} does not fit {type(t).__name__}")


def subterms(t: Term, path: Path = ()) -> Iterator[tuple[Path, Term]]:
    """All positions of ``t`` in document order."""
    yield path, t
    if isinstance(t, Lam):
        yield from subterms(t.body, path + (Move.LAM_BODY,))
    elif isinstance(t, App):
        yield from subterms(t.fun, path + (Move.APP_L,))
        yield from subterms(t.arg, path + (Move.APP_R,))
    elif isinstance(t, Es):
        yield from subterms(t.body, path + (Move.ES_BODY,))
        yield from subterms(t.subject, path + (Move.ES_SUBJECT,))
