"""Derivation transformers: substitution, splitting, subject reduction/expansion, synthesis."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .classify import (
    is_fireball, is_inert, is_rigid, is_strong_fireball, is_strong_inert,
    is_strong_value, is_theoretical_value,
)
from .multitypes import (
    EMPTY, Arrow, Derivation, G, MultiType, Rule, app, ax, deriv_size, es,
    is_left, is_left_ctx, lam, many, var_derivation,
)
from .rewrite import (
    Cycle, Normal, Outcome, RuleTag, Step, Strategy, contract,
    decompose_answer, evaluate, freshen_layers, trace_terms,
)
from .terms import App, Es, Lam, Move, NamePool, Term, Var, alpha_eq, names, resolve, subst


class TransformError(ValueError):
    pass


@dataclass(frozen=True)
class TypedStep:
    step: Step
    before: Term
    after: Term

    @classmethod
    def of(cls, before: Term, step: Step) -> "TypedStep":
        return cls(step, before, step.reduct)


# -- renaming --------------------------------------------------------------

def align(d: Derivation, target: Term) -> Derivation:
    """Rebuild ``d`` over ``target``, which must have the same shape as ``d``'s subject.

    Contexts are recomputed from the axioms, so this realizes α-renaming of
    derivations when ``target`` is α-equivalent to the subject.
    """
    if d.subject == target:
        return d
    rule = d.rule
    if rule is Rule.MANY and isinstance(target, (Var, Lam)):
        return many(target, [align(p, target) for p in d.premises])
    if rule is Rule.AX and isinstance(target, Var):
        return ax(target.name, d.rhs)
    if rule is Rule.LAM and isinstance(target, Lam):
        return lam(align(d.premises[0], target.body), target.binder)
    if rule is Rule.APP and isinstance(target, App):
        return app(align(d.premises[0], target.fun), align(d.premises[1], target.arg))
    if rule is Rule.ES and isinstance(target, Es):
        return es(align(d.premises[0], target.body), target.binder, align(d.premises[1], target.subject))
    raise TransformError(f"cannot align a {rule.value} node with {type(target).__name__}")


def freshen_binders(t: Term, avoid) -> Term:
    """α-variant of ``t`` whose binders are pairwise distinct and outside ``avoid`` and ``names(t)``."""
    pool = NamePool(names(t) | set(avoid))

    def go(u: Term, env: dict) -> Term:
        if isinstance(u, Var):
            return Var(env.get(u.name, u.name))
        if isinstance(u, Lam):
            new = pool.fresh(u.binder)
            return Lam(new, go(u.body, {**env, u.binder: new}))
        if isinstance(u, App):
            return App(go(u.fun, env), go(u.arg, env))
        new = pool.fresh(u.binder)
        return Es(go(u.body, {**env, u.binder: new}), new, go(u.subject, env))

    return go(t, {})


def _graft(t: Term, x: str, v: Term) -> Term:
    # substitution without renaming; callers guarantee no capture
    if isinstance(t, Var):
        return v if t.name == x else t
    if isinstance(t, Lam):
        return t if t.binder == x else Lam(t.binder, _graft(t.body, x, v))
    if isinstance(t, App):
        return App(_graft(t.fun, x, v), _graft(t.arg, x, v))
    body = t.body if t.binder == x else _graft(t.body, x, v)
    return Es(body, t.binder, _graft(t.subject, x, v))


# -- value derivations -----------------------------------------------------

def empty_value_derivation(v: Term) -> Derivation:
    if not is_theoretical_value(v):
        raise TransformError("only variables and abstractions can be typed by an empty many rule")
    return many(v, [])


def split_value_derivation(d: Derivation, m1: MultiType, m2: MultiType) -> tuple[Derivation, Derivation]:
    if d.rule is not Rule.MANY or not is_theoretical_value(d.subject):
        raise TransformError("expected a many rule over a theoretical value")
    if m1 + m2 != d.rhs:
        raise TransformError(f"{m1} + {m2} is not the multi type {d.rhs}")
    if len(d.rhs) == 0 and (d.ctx.dom() or deriv_size(d) != 0):
        raise TransformError("a derivation with the empty multi type must have empty context and size 0")
    need = Counter(a.key for a in m1)
    first, second = [], []
    for p in d.premises:
        if need[p.rhs.key] > 0:
            need[p.rhs.key] -= 1
            first.append(p)
        else:
            second.append(p)
    return many(d.subject, first), many(d.subject, second)


def merge_value_derivations(d1: Derivation, d2: Derivation) -> Derivation:
    if d1.rule is not Rule.MANY or d2.rule is not Rule.MANY:
        raise TransformError("expected many rules")
    if d1.subject != d2.subject:
        if not alpha_eq(d1.subject, d2.subject):
            raise TransformError("value derivations over different subjects")
        d2 = align(d2, d1.subject)
    return many(d1.subject, d1.premises + d2.premises)


# -- substitution and anti-substitution -----------------------------------

def substitute_derivation(dt: Derivation, x: str, dv: Derivation) -> Derivation:
    """From ``G, x:N |- t : M`` and ``D |- v : N`` build ``G + D |- t{x<-v} : M``."""
    v = dv.subject
    if dv.rule is not Rule.MANY or not isinstance(v, Lam):
        raise TransformError("the substituted derivation must be a many rule over a value")
    if dt.ctx.get(x) != dv.rhs:
        raise TransformError(f"type of {x} is {dt.ctx.get(x)} but the value has type {dv.rhs}")
    t = dt.subject
    fresh_t = freshen_binders(t, v.fv | {x})
    remaining = [dv]

    def take(n: MultiType) -> Derivation:
        piece, rest = split_value_derivation(remaining[0], n, remaining[0].rhs - n)
        remaining[0] = rest
        return piece

    def go(d: Derivation) -> Derivation:
        if d.rule is Rule.MANY and d.subject == Var(x):
            return take(d.rhs)
        if d.rule is Rule.AX:
            return d
        if d.rule is Rule.MANY:
            return many(_graft(d.subject, x, v), [go(p) for p in d.premises])
        if d.rule is Rule.LAM:
            return lam(go(d.premises[0]), d.subject.binder)
        if d.rule is Rule.APP:
            return app(go(d.premises[0]), go(d.premises[1]))
        return es(go(d.premises[0]), d.subject.binder, go(d.premises[1]))

    theta = go(align(dt, fresh_t))
    assert len(remaining[0].rhs) == 0
    return align(theta, subst(t, x, v))


def anti_substitute(d: Derivation, t: Term, x: str, v: Term) -> tuple[Derivation, Derivation]:
    """Split a derivation of ``t{x<-v}`` into one of ``t`` (with ``x`` typed) and one of ``v``."""
    if not isinstance(v, Lam):
        raise TransformError("anti-substitution expects a value")
    if not alpha_eq(d.subject, subst(t, x, v)):
        raise TransformError("the derivation does not type the substituted term")
    fresh_t = freshen_binders(t, v.fv | {x})
    pieces: list[Derivation] = []

    def go(dn: Derivation, u: Term) -> Derivation:
        if isinstance(u, Var):
            if u.name == x:
                pieces.append(dn)
                return var_derivation(x, dn.rhs)
            return dn
        if isinstance(u, Lam):
            return many(u, [lam(go(p.premises[0], u.body), u.binder) for p in dn.premises])
        if isinstance(u, App):
            return app(go(dn.premises[0], u.fun), go(dn.premises[1], u.arg))
        return es(go(dn.premises[0], u.body), u.binder, go(dn.premises[1], u.subject))

    psi = go(align(d, _graft(fresh_t, x, v)), fresh_t)
    theta = empty_value_derivation(v)
    for piece in pieces:
        theta = merge_value_derivations(theta, piece)
    return align(psi, t), theta


# -- subject reduction and expansion --------------------------------------

def _check_vsc_step(ts: TypedStep) -> None:
    if ts.step.rule not in (RuleTag.M, RuleTag.E):
        raise TransformError("only m and e steps can be transported")
    reduct = contract(ts.before, ts.step.path, ts.step.rule)
    if reduct is None or not alpha_eq(reduct, ts.after):
        raise TransformError("the step does not rewrite before into after")


def _peel(d: Derivation, depth: int) -> tuple[list[tuple[str, Derivation]], Derivation]:
    layers = []
    for _ in range(depth):
        if d.rule is not Rule.ES:
            raise TransformError("expected an explicit substitution layer")
        layers.append((d.subject.binder, d.premises[1]))
        d = d.premises[0]
    return layers, d


def _wrap(layers: list[tuple[str, Derivation]], core: Derivation) -> Derivation:
    for binder, sub in reversed(layers):
        core = es(core, binder, sub)
    return core


def _along(d: Derivation, t: Term, other: Term, path: tuple, at_root) -> Derivation:
    """Rebuild ``d`` (typing ``t``) with ``at_root`` applied at ``path``.

    ``other`` is the subterm at the same position in the term being produced.
    """
    if not path:
        return align(at_root(d, t), other)
    move, rest = path[0], path[1:]
    if move is Move.LAM_BODY:
        return many(other, [lam(_along(p.premises[0], t.body, other.body, rest, at_root), t.binder)
                            for p in d.premises])
    left, right = d.premises
    if move is Move.APP_L:
        return app(_along(left, t.fun, other.fun, rest, at_root), right)
    if move is Move.APP_R:
        return app(left, _along(right, t.arg, other.arg, rest, at_root))
    if move is Move.ES_BODY:
        return es(_along(left, t.body, other.body, rest, at_root), t.binder, right)
    return es(left, t.binder, _along(right, t.subject, other.subject, rest, at_root))


def subject_reduce(d: Derivation, ts: TypedStep) -> Derivation:
    """Transport a derivation of ``before`` along one step to a derivation of ``after``."""
    _check_vsc_step(ts)
    if not alpha_eq(d.subject, ts.before):
        raise TransformError("the derivation does not type the source of the step")
    before = ts.before
    after = contract(before, ts.step.path, ts.step.rule)

    def root(dn: Derivation, t: Term) -> Derivation:
        if ts.step.rule is RuleTag.M:
            dl, du = dn.premises
            fun = freshen_layers(t.fun, t.arg.fv)
            layers_t, abstraction = decompose_answer(fun)
            layers, dlam = _peel(align(dl, fun), len(layers_t))
            (dbody,) = (p.premises[0] for p in dlam.premises)
            return _wrap(layers, es(dbody, abstraction.binder, du))
        db, ds = dn.premises
        subject = freshen_layers(t.subject, t.body.fv | {t.binder})
        layers_t, _ = decompose_answer(subject)
        layers, dv = _peel(align(ds, subject), len(layers_t))
        return _wrap(layers, substitute_derivation(db, t.binder, dv))

    out = _along(align(d, before), before, after, ts.step.path, root)
    return align(out, ts.after)


def subject_expand(d: Derivation, ts: TypedStep) -> Derivation:
    """Transport a derivation of ``after`` back to a derivation of ``before``."""
    _check_vsc_step(ts)
    if not alpha_eq(d.subject, ts.after):
        raise TransformError("the derivation does not type the target of the step")
    before = ts.before
    after = contract(before, ts.step.path, ts.step.rule)
    redex = resolve(before, ts.step.path)

    def root(dn: Derivation, t: Term) -> Derivation:
        if ts.step.rule is RuleTag.M:
            fun = freshen_layers(redex.fun, redex.arg.fv)
            layers_t, abstraction = decompose_answer(fun)
            layers, core = _peel(dn, len(layers_t))
            dbody, du = core.premises
            dfun = _wrap(layers, many(abstraction, [lam(dbody, abstraction.binder)]))
            return app(dfun, du)
        subject = freshen_layers(redex.subject, redex.body.fv | {redex.binder})
        layers_t, value = decompose_answer(subject)
        layers, core = _peel(dn, len(layers_t))
        psi, theta = anti_substitute(core, redex.body, redex.binder, value)
        return es(psi, redex.binder, _wrap(layers, theta))

    out = _along(align(d, after), after, before, ts.step.path, root)
    return align(out, ts.before)


# -- typability of normal forms -------------------------------------------

def type_inert_open(i: Term, m: MultiType) -> Derivation:
    if not is_inert(i):
        raise TransformError("not an inert term")
    if isinstance(i, Var):
        return var_derivation(i.name, m)
    if isinstance(i, App):
        darg = type_fireball_open(i.arg)
        return app(type_inert_open(i.fun, MultiType.of(Arrow(EMPTY, m))), darg)
    dbody = type_inert_open(i.body, m)
    return es(dbody, i.binder, type_inert_open(i.subject, dbody.ctx.get(i.binder)))


def type_fireball_open(f: Term) -> Derivation:
    """A derivation of ``f`` with the empty multi type."""
    if not is_fireball(f):
        raise TransformError("not a fireball")
    if isinstance(f, Lam):
        return many(f, [])
    if is_inert(f):
        return type_inert_open(f, EMPTY)
    dbody = type_fireball_open(f.body)
    return es(dbody, f.binder, type_inert_open(f.subject, dbody.ctx.get(f.binder)))


def type_inert_shrinking(i: Term, m: MultiType) -> Derivation:
    if not is_strong_inert(i):
        raise TransformError("not a strong inert term")
    if not is_left(m):
        raise TransformError(f"{m} is not a left multi type")
    if isinstance(i, Var):
        return var_derivation(i.name, m)
    if isinstance(i, App):
        darg = type_fireball_shrinking(i.arg)
        return app(type_inert_shrinking(i.fun, MultiType.of(Arrow(darg.rhs, m))), darg)
    dbody = type_inert_shrinking(i.body, m)
    return es(dbody, i.binder, type_inert_shrinking(i.subject, dbody.ctx.get(i.binder)))


def type_fireball_shrinking(f: Term) -> Derivation:
    """A shrinking derivation of a strong fireball."""
    if not is_strong_fireball(f):
        raise TransformError("not a strong fireball")
    if is_strong_value(f):
        return many(f, [lam(type_fireball_shrinking(f.body), f.binder)])
    if is_strong_inert(f):
        return type_inert_shrinking(f, MultiType.of(G))
    dbody = type_fireball_shrinking(f.body)
    return es(dbody, f.binder, type_inert_shrinking(f.subject, dbody.ctx.get(f.binder)))


# -- inference by evaluation and expansion --------------------------------

class Mode(enum.Enum):
    OPEN = "open"
    SHRINKING = "shrinking"


@dataclass
class InferResult:
    term: Term
    mode: Mode
    outcome: Outcome
    derivation: Optional[Derivation] = None
    chain: list[Derivation] = field(default_factory=list)  # one derivation per trace term

    @property
    def status(self) -> str:
        if self.derivation is not None:
            return "typed"
        return "cycle" if isinstance(self.outcome, Cycle) else "exhausted"


def infer_report(t: Term, mode: Mode, fuel: int) -> InferResult:
    strategy = Strategy.OPEN if mode is Mode.OPEN else Strategy.EXTERNAL
    outcome = evaluate(t, strategy, fuel)
    if not isinstance(outcome, Normal):
        return InferResult(t, mode, outcome)
    terms = trace_terms(t, outcome.trace)
    if mode is Mode.OPEN:
        d = type_fireball_open(outcome.result)
    else:
        d = type_fireball_shrinking(outcome.result)
    chain = [d]
    for k in range(len(outcome.trace) - 1, -1, -1):
        d = subject_expand(d, TypedStep(outcome.trace[k], terms[k], terms[k + 1]))
        chain.append(d)
    chain.reverse()
    return InferResult(t, mode, outcome, d, chain)


def infer(t: Term, mode: Mode, fuel: int) -> Optional[Derivation]:
    return infer_report(t, mode, fuel).derivation


# -- spreading -------------------------------------------------------------

def spreading_violations(d: Derivation) -> list[Derivation]:
    """Subderivations with rigid subject and left context whose multi type is not left."""
    out = []
    stack = [d]
    while stack:
        node = stack.pop()
        stack.extend(node.premises)
        if (isinstance(node.rhs, MultiType) and is_rigid(node.subject)
                and is_left_ctx(node.ctx) and not is_left(node.rhs)):
            out.append(node)
    return out
