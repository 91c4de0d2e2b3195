"""Call-by-value multi types, typing derivations and their checker."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .syntax import parse, print_term
from .terms import App, Es, Lam, Term, Var


# -- types -----------------------------------------------------------------

@dataclass(frozen=True)
class Ground:
    def __str__(self) -> str:
        return "G"

    @property
    def key(self) -> tuple:
        return (0,)


@dataclass(frozen=True)
class Arrow:
    left: "MultiType"
    right: "MultiType"
    key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "key", (1, self.left.key, self.right.key))

    def __str__(self) -> str:
        return f"{self.left} -o {self.right}"


LinearType = Union[Ground, Arrow]
G = Ground()


@dataclass(frozen=True)
class MultiType:
    """Finite multiset of linear types, stored sorted so that ``==`` is multiset equality."""

    items: tuple = ()
    key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ordered = tuple(sorted(self.items, key=lambda a: a.key))
        object.__setattr__(self, "items", ordered)
        object.__setattr__(self, "key", tuple(a.key for a in ordered))

    @classmethod
    def of(cls, *items: LinearType) -> "MultiType":
        return cls(tuple(items))

    def __add__(self, other: "MultiType") -> "MultiType":
        return MultiType(self.items + other.items)

    def __sub__(self, other: "MultiType") -> "MultiType":
        """Multiset difference; ``other`` must be included in ``self``."""
        remaining = list(self.items)
        for a in other.items:
            remaining.remove(a)
        return MultiType(tuple(remaining))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def includes(self, other: "MultiType") -> bool:
        mine = Counter(a.key for a in self.items)
        theirs = Counter(a.key for a in other.items)
        return all(mine[k] >= n for k, n in theirs.items())

    def __str__(self) -> str:
        if not self.items:
            return "0"
        return "[" + ", ".join(str(a) for a in self.items) + "]"


EMPTY = MultiType()


def arrow(left: MultiType, right: MultiType) -> Arrow:
    return Arrow(left, right)


# -- type contexts ---------------------------------------------------------

@dataclass(frozen=True)
class TypeContext:
    """Total map from variables to multi types; only non-empty entries are stored."""

    entries: tuple = ()

    def __post_init__(self):
        clean = tuple(sorted(((x, m) for x, m in self.entries if len(m)), key=lambda e: e[0]))
        object.__setattr__(self, "entries", clean)

    @classmethod
    def of(cls, mapping: Mapping[str, MultiType] | None = None, **kw: MultiType) -> "TypeContext":
        items = dict(mapping or {})
        items.update(kw)
        return cls(tuple(items.items()))

    def get(self, x: str) -> MultiType:
        for name, m in self.entries:
            if name == x:
                return m
        return EMPTY

    def dom(self) -> frozenset:
        return frozenset(x for x, _ in self.entries)

    def __add__(self, other: "TypeContext") -> "TypeContext":
        acc = dict(self.entries)
        for x, m in other.entries:
            acc[x] = acc.get(x, EMPTY) + m
        return TypeContext(tuple(acc.items()))

    def remove(self, x: str) -> "TypeContext":
        return TypeContext(tuple((y, m) for y, m in self.entries if y != x))

    def extend(self, x: str, m: MultiType) -> "TypeContext":
        return self.remove(x) + TypeContext(((x, m),))

    def rename(self, env: Mapping[str, str]) -> "TypeContext":
        acc: dict[str, MultiType] = {}
        for x, m in self.entries:
            y = env.get(x, x)
            acc[y] = acc.get(y, EMPTY) + m
        return TypeContext(tuple(acc.items()))

    def items(self):
        return iter(self.entries)

    def __str__(self) -> str:
        return ", ".join(f"{x}:{m}" for x, m in self.entries)


EMPTY_CTX = TypeContext()


def sum_contexts(ctxs: Iterable[TypeContext]) -> TypeContext:
    acc = EMPTY_CTX
    for c in ctxs:
        acc = acc + c
    return acc


# -- derivations -----------------------------------------------------------

class Rule(enum.Enum):
    AX = "ax"
    APP = "@"
    LAM = "lam"
    ES = "es"
    MANY = "many"


@dataclass(frozen=True)
class Judgment:
    ctx: TypeContext
    subject: Term
    rhs: Union[MultiType, Ground, Arrow]

    def __str__(self) -> str:
        ctx = f"{self.ctx} " if self.ctx.entries else ""
        return f"{ctx}|- {print_term(self.subject)} : {self.rhs}"


@dataclass(frozen=True)
class Derivation:
    rule: Rule
    premises: tuple
    conclusion: Judgment

    @property
    def ctx(self) -> TypeContext:
        return self.conclusion.ctx

    @property
    def subject(self) -> Term:
        return self.conclusion.subject

    @property
    def rhs(self):
        return self.conclusion.rhs


class DerivationError(ValueError):
    def __init__(self, rule: Rule, message: str, node: Derivation | None = None):
        super().__init__(f"{rule.value}: {message}")
        self.rule = rule
        self.node = node


def ax(x: str, a: LinearType) -> Derivation:
    return Derivation(Rule.AX, (), Judgment(TypeContext(((x, MultiType.of(a)),)), Var(x), a))


def many(subject: Term, premises: Iterable[Derivation] = ()) -> Derivation:
    prems = tuple(premises)
    ctx = sum_contexts(p.ctx for p in prems)
    return Derivation(Rule.MANY, prems, Judgment(ctx, subject, MultiType(tuple(p.rhs for p in prems))))


def lam(premise: Derivation, binder: str) -> Derivation:
    subject = Lam(binder, premise.subject)
    a = Arrow(premise.ctx.get(binder), premise.rhs)
    return Derivation(Rule.LAM, (premise,), Judgment(premise.ctx.remove(binder), subject, a))


def app(left: Derivation, right: Derivation) -> Derivation:
    (arr,) = left.rhs.items
    return Derivation(Rule.APP, (left, right), Judgment(left.ctx + right.ctx, App(left.subject, right.subject), arr.right))


def es(body: Derivation, binder: str, arg: Derivation) -> Derivation:
    ctx = body.ctx.remove(binder) + arg.ctx
    return Derivation(Rule.ES, (body, arg), Judgment(ctx, Es(body.subject, binder, arg.subject), body.rhs))


def var_derivation(x: str, m: MultiType) -> Derivation:
    """``x:M |- x : M`` as a many rule over one axiom per item of ``M``."""
    return many(Var(x), [ax(x, a) for a in m])


def deriv_size(d: Derivation) -> int:
    own = 0 if d.rule is Rule.MANY else 1
    return own + sum(deriv_size(p) for p in d.premises)


def _same(a: Term, b: Term) -> bool:
    # derivations carry exact subjects; use transform.align to move across α-variants
    return a == b


def _is_linear(x) -> bool:
    return isinstance(x, (Ground, Arrow))


def check_derivation(d: Derivation) -> Judgment:
    """Validate every node; raise :class:`DerivationError` at the first bad one (post-order)."""
    for p in d.premises:
        check_derivation(p)
    j = d.conclusion
    rule = d.rule

    def fail(msg: str):
        raise DerivationError(rule, f"{msg} in {j}", d)

    if rule is Rule.AX:
        if d.premises:
            fail("axiom with premises")
        if not isinstance(j.subject, Var):
            fail("subject of an axiom must be a variable")
        if not _is_linear(j.rhs):
            fail("rhs-kind mismatch, axiom concludes a linear type")
        if j.ctx != TypeContext(((j.subject.name, MultiType.of(j.rhs)),)):
            fail("context must be exactly x:[A]")
    elif rule is Rule.MANY:
        if not isinstance(j.subject, (Var, Lam)):
            fail("many over a term that is not a theoretical value")
        if not isinstance(j.rhs, MultiType):
            fail("rhs-kind mismatch, many concludes a multi type")
        for p in d.premises:
            if p.rule not in (Rule.AX, Rule.LAM):
                fail(f"premise of many concluded by {p.rule.value}")
            if not _same(p.subject, j.subject):
                fail("subject mismatch between many and its premise")
        if j.rhs != MultiType(tuple(p.rhs for p in d.premises)):
            fail("multi type is not the multiset of premise types")
        if j.ctx != sum_contexts(p.ctx for p in d.premises):
            fail("context-sum mismatch")
    elif rule is Rule.LAM:
        if len(d.premises) != 1:
            fail("abstraction rule needs one premise")
        (p,) = d.premises
        if not isinstance(j.subject, Lam) or not _same(p.subject, j.subject.body):
            fail("subject mismatch")
        if not isinstance(p.rhs, MultiType):
            fail("rhs-kind mismatch in premise")
        x = j.subject.binder
        if j.rhs != Arrow(p.ctx.get(x), p.rhs):
            fail("arrow type does not match the premise")
        if j.ctx != p.ctx.remove(x):
            fail("context-sum mismatch")
    elif rule is Rule.APP:
        if len(d.premises) != 2:
            fail("application rule needs two premises")
        left, right = d.premises
        if not isinstance(j.subject, App):
            fail("subject mismatch")
        if not (_same(left.subject, j.subject.fun) and _same(right.subject, j.subject.arg)):
            fail("subject mismatch")
        if not (isinstance(left.rhs, MultiType) and len(left.rhs) == 1 and isinstance(left.rhs.items[0], Arrow)):
            fail("rhs-kind mismatch, left premise must have type [M -o N]")
        if not isinstance(right.rhs, MultiType):
            fail("rhs-kind mismatch in right premise")
        arr = left.rhs.items[0]
        if arr.left != right.rhs:
            fail("argument type does not match the arrow source")
        if j.rhs != arr.right:
            fail("conclusion type does not match the arrow target")
        if j.ctx != left.ctx + right.ctx:
            fail("context-sum mismatch")
    elif rule is Rule.ES:
        if len(d.premises) != 2:
            fail("substitution rule needs two premises")
        body, arg = d.premises
        if not isinstance(j.subject, Es):
            fail("subject mismatch")
        if not (_same(body.subject, j.subject.body) and _same(arg.subject, j.subject.subject)):
            fail("subject mismatch")
        if not (isinstance(body.rhs, MultiType) and isinstance(arg.rhs, MultiType)):
            fail("rhs-kind mismatch in premise")
        x = j.subject.binder
        if body.ctx.get(x) != arg.rhs:
            fail("type of the substituted variable does not match the argument")
        if j.rhs != body.rhs:
            fail("conclusion type differs from the body type")
        if j.ctx != body.ctx.remove(x) + arg.ctx:
            fail("context-sum mismatch")
    return j


def is_valid(d: Derivation) -> bool:
    try:
        check_derivation(d)
    except DerivationError:
        return False
    return True


# -- shrinking types -------------------------------------------------------

def is_right_linear(a: LinearType) -> bool:
    if isinstance(a, Ground):
        return True
    return is_left(a.left) and is_right(a.right)


def is_left_linear(a: LinearType) -> bool:
    if isinstance(a, Ground):
        return True
    return is_right(a.left) and is_left(a.right)


def is_right(m: MultiType) -> bool:
    return len(m) >= 1 and all(is_right_linear(a) for a in m)


def is_left(m: MultiType) -> bool:
    return all(is_left_linear(a) for a in m)


def is_left_ctx(ctx: TypeContext) -> bool:
    return all(is_left(m) for _, m in ctx.items())


def is_shrinking(d: Derivation) -> bool:
    return isinstance(d.rhs, MultiType) and is_left_ctx(d.ctx) and is_right(d.rhs)


# -- JSON ------------------------------------------------------------------

def type_to_json(a):
    if isinstance(a, Ground):
        return "G"
    if isinstance(a, Arrow):
        return {"l": type_to_json(a.left), "r": type_to_json(a.right)}
    return [type_to_json(b) for b in a.items]


def type_from_json(obj):
    if obj == "G":
        return G
    if isinstance(obj, list):
        return MultiType(tuple(type_from_json(b) for b in obj))
    if isinstance(obj, dict) and set(obj) == {"l", "r"}:
        left, right = type_from_json(obj["l"]), type_from_json(obj["r"])
        if not (isinstance(left, MultiType) and isinstance(right, MultiType)):
            raise ValueError("arrow sides must be multi types")
        return Arrow(left, right)
    raise ValueError(f"not a type encoding: {obj!r}")


def derivation_to_json(d: Derivation) -> dict:
    return {
        "rule": d.rule.value,
        "conclusion": {
            "ctx": {x: type_to_json(m) for x, m in d.ctx.items()},
            "subject": print_term(d.subject),
            "rhs": type_to_json(d.rhs),
        },
        "premises": [derivation_to_json(p) for p in d.premises],
    }


def derivation_from_json(obj: dict) -> Derivation:
    c = obj["conclusion"]
    ctx = TypeContext(tuple((x, type_from_json(m)) for x, m in c.get("ctx", {}).items()))
    for _, m in ctx.items():
        if not isinstance(m, MultiType):
            raise ValueError("context entries must be multi types")
    judgment = Judgment(ctx, parse(c["subject"]), type_from_json(c["rhs"]))
    premises = tuple(derivation_from_json(p) for p in obj.get("premises", []))
    return Derivation(Rule(obj["rule"]), premises, judgment)


def render(d: Derivation, indent: int = 0) -> str:
    """Indented text rendering, conclusion first."""
    lines = [f"{'  ' * indent}{d.rule.value}: {d.conclusion}"]
    for p in d.premises:
        lines.append(render(p, indent + 1))
    return "\n".join(lines)
