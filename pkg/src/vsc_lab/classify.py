"""Membership in the grammar-defined term classes."""

from __future__ import annotations

import enum

from .terms import App, Es, Lam, Term, Var, is_pure


class TermClass(enum.Enum):
    VALUE = "value"
    THEORETICAL_VALUE = "theoretical-value"
    INERT = "inert"
    FIREBALL = "fireball"
    STRONG_INERT = "strong-inert"
    STRONG_VALUE = "strong-value"
    STRONG_FIREBALL = "strong-fireball"
    RIGID = "rigid"
    ANSWER = "answer"
    FIRE_INERT = "fire-inert"
    FIRE_FIREBALL = "fire-fireball"


def is_value(t: Term) -> bool:
    return isinstance(t, Lam)


def is_theoretical_value(t: Term) -> bool:
    return isinstance(t, (Var, Lam))


# open fireballs:  i ::= x | i f | i[x<-i']    f ::= v | i | f[x<-i]

def is_inert(t: Term) -> bool:
    if isinstance(t, Var):
        return True
    if isinstance(t, App):
        return is_inert(t.fun) and is_fireball(t.arg)
    if isinstance(t, Es):
        return is_inert(t.body) and is_inert(t.subject)
    return False


def is_fireball(t: Term) -> bool:
    if isinstance(t, Lam) or is_inert(t):
        return True
    if isinstance(t, Es):
        return is_fireball(t.body) and is_inert(t.subject)
    return False


# strong fireballs:  i_s ::= x | i_s f_s | i_s[x<-i_s']    v_s ::= \x.f_s    f_s ::= i_s | v_s | f_s[x<-i_s]

def is_strong_inert(t: Term) -> bool:
    if isinstance(t, Var):
        return True
    if isinstance(t, App):
        return is_strong_inert(t.fun) and is_strong_fireball(t.arg)
    if isinstance(t, Es):
        return is_strong_inert(t.body) and is_strong_inert(t.subject)
    return False


def is_strong_value(t: Term) -> bool:
    return isinstance(t, Lam) and is_strong_fireball(t.body)


def is_strong_fireball(t: Term) -> bool:
    if is_strong_value(t) or is_strong_inert(t):
        return True
    if isinstance(t, Es):
        return is_strong_fireball(t.body) and is_strong_inert(t.subject)
    return False


def is_rigid(t: Term) -> bool:
    """r ::= x | r t | r[x<-r']"""
    if isinstance(t, Var):
        return True
    if isinstance(t, App):
        return is_rigid(t.fun)
    if isinstance(t, Es):
        return is_rigid(t.body) and is_rigid(t.subject)
    return False


def is_answer(t: Term) -> bool:
    while isinstance(t, Es):
        t = t.body
    return isinstance(t, Lam)


# fireball calculus (pure terms only):  i ::= x f1 ... fn    f ::= v | i

def _require_pure(t: Term) -> None:
    if not is_pure(t):
        raise ValueError("fireball-calculus classes are defined on terms without explicit substitutions")


def is_fire_inert(t: Term) -> bool:
    _require_pure(t)
    return _fire_inert(t)


def is_fire_fireball(t: Term) -> bool:
    _require_pure(t)
    return isinstance(t, Lam) or _fire_inert(t)


def _fire_inert(t: Term) -> bool:
    while isinstance(t, App):
        if not (isinstance(t.arg, Lam) or _fire_inert(t.arg)):
            return False
        t = t.fun
    return isinstance(t, Var)


_DECIDERS = {
    TermClass.VALUE: is_value,
    TermClass.THEORETICAL_VALUE: is_theoretical_value,
    TermClass.INERT: is_inert,
    TermClass.FIREBALL: is_fireball,
    TermClass.STRONG_INERT: is_strong_inert,
    TermClass.STRONG_VALUE: is_strong_value,
    TermClass.STRONG_FIREBALL: is_strong_fireball,
    TermClass.RIGID: is_rigid,
    TermClass.ANSWER: is_answer,
    TermClass.FIRE_INERT: is_fire_inert,
    TermClass.FIRE_FIREBALL: is_fire_fireball,
}


def classify(t: Term) -> dict[TermClass, bool | None]:
    """Every class membership; fireball-calculus classes are ``None`` on terms with ES."""
    pure = is_pure(t)
    out: dict[TermClass, bool | None] = {}
    for cls, decide in _DECIDERS.items():
        if cls in (TermClass.FIRE_INERT, TermClass.FIRE_FIREBALL) and not pure:
            out[cls] = None
        else:
            out[cls] = decide(t)
    return out
