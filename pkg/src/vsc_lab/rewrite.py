"""Root rules at a distance, the five reduction relations, and evaluation."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

from .classify import _fire_inert, is_rigid
from .terms import (
    App, Es, Lam, Move, NamePool, Path, Term, Var,
    alpha_key, is_pure, names, path_key, replace_at, resolve, subst,
)


class RuleTag(enum.Enum):
    M = "m"
    E = "e"
    BETA_V = "betav"
    BETA_I = "betai"


class Strategy(enum.Enum):
    PLOTKIN = "plotkin"
    FIRE = "fire"
    OPEN = "open"
    VSC = "vsc"
    EXTERNAL = "external"


@dataclass(frozen=True)
class Step:
    path: Path
    rule: RuleTag
    reduct: Term


# -- substitution contexts -------------------------------------------------

def decompose_answer(t: Term) -> Optional[tuple[list[tuple[str, Term]], Lam]]:
    """Split ``L<v>`` into its ES layers (outermost first) and the abstraction."""
    layers = []
    while isinstance(t, Es):
        layers.append((t.binder, t.subject))
        t = t.body
    if isinstance(t, Lam):
        return layers, t
    return None


def plug(layers: list[tuple[str, Term]], core: Term) -> Term:
    for binder, subject in reversed(layers):
        core = Es(core, binder, subject)
    return core


def freshen_layers(t: Term, avoid: frozenset | set) -> Term:
    """Rename the binders of the outer ES stack of ``t`` that clash with ``avoid``."""
    if not isinstance(t, Es):
        return t
    pool = NamePool(names(t) | set(avoid))
    return _freshen(t, set(avoid), pool)


def _freshen(t: Term, avoid: set, pool: NamePool) -> Term:
    if not isinstance(t, Es):
        return t
    body, binder = t.body, t.binder
    if binder in avoid:
        new = pool.fresh(binder)
        body = subst(body, binder, Var(new))
        binder = new
    return Es(_freshen(body, avoid, pool), binder, t.subject)


# -- root rules ------------------------------------------------------------

def root_m(t: Term) -> Optional[Term]:
    """``L<\\x.b> u  ->  L<b[x<-u]>``"""
    if not isinstance(t, App):
        return None
    fun = t.fun
    if decompose_answer(fun) is None:
        return None
    layers, lam = decompose_answer(freshen_layers(fun, t.arg.fv))
    return plug(layers, Es(lam.body, lam.binder, t.arg))


def root_e(t: Term) -> Optional[Term]:
    """``b[x<-L<v>]  ->  L<b{x<-v}>``"""
    if not isinstance(t, Es):
        return None
    if decompose_answer(t.subject) is None:
        return None
    layers, lam = decompose_answer(freshen_layers(t.subject, t.body.fv | {t.binder}))
    return plug(layers, subst(t.body, t.binder, lam))


def root_beta(t: Term, rule: RuleTag) -> Optional[Term]:
    if not (isinstance(t, App) and isinstance(t.fun, Lam)):
        return None
    arg = t.arg
    if rule is RuleTag.BETA_V and not isinstance(arg, Lam):
        return None
    if rule is RuleTag.BETA_I and not _fire_inert(arg):
        return None
    return subst(t.fun.body, t.fun.binder, arg)


def contract(t: Term, path: Path, rule: RuleTag) -> Optional[Term]:
    """Fire ``rule`` at ``path``; ``None`` if the subterm there is not such a redex."""
    sub = resolve(t, path)
    if rule is RuleTag.M:
        new = root_m(sub)
    elif rule is RuleTag.E:
        new = root_e(sub)
    else:
        new = root_beta(sub, rule)
    return None if new is None else replace_at(t, path, new)


# -- redex positions -------------------------------------------------------

def _root_tags(t: Term) -> list[RuleTag]:
    if isinstance(t, App) and decompose_answer(t.fun) is not None:
        return [RuleTag.M]
    if isinstance(t, Es) and decompose_answer(t.subject) is not None:
        return [RuleTag.E]
    return []


def _open_sites(t: Term, path: Path, out: list) -> None:
    out.extend((path, tag) for tag in _root_tags(t))
    if isinstance(t, App):
        _open_sites(t.fun, path + (Move.APP_L,), out)
        _open_sites(t.arg, path + (Move.APP_R,), out)
    elif isinstance(t, Es):
        _open_sites(t.body, path + (Move.ES_BODY,), out)
        _open_sites(t.subject, path + (Move.ES_SUBJECT,), out)


def _vsc_sites(t: Term, path: Path, out: list) -> None:
    out.extend((path, tag) for tag in _root_tags(t))
    if isinstance(t, Lam):
        _vsc_sites(t.body, path + (Move.LAM_BODY,), out)
    elif isinstance(t, App):
        _vsc_sites(t.fun, path + (Move.APP_L,), out)
        _vsc_sites(t.arg, path + (Move.APP_R,), out)
    elif isinstance(t, Es):
        _vsc_sites(t.body, path + (Move.ES_BODY,), out)
        _vsc_sites(t.subject, path + (Move.ES_SUBJECT,), out)


def _external_sites(t: Term, path: Path, out: list) -> None:
    # X ::= <.> | \x.X | t[x<-R] | X[x<-r] | R   (the hole takes any open step)
    _open_sites(t, path, out)
    if isinstance(t, Lam):
        _external_sites(t.body, path + (Move.LAM_BODY,), out)
    elif isinstance(t, Es):
        _rigid_sites(t.subject, path + (Move.ES_SUBJECT,), out)
        if is_rigid(t.subject):
            _external_sites(t.body, path + (Move.ES_BODY,), out)
    _rigid_sites(t, path, out)


def _rigid_sites(t: Term, path: Path, out: list) -> None:
    # R ::= r X | R t | R[x<-r] | r[x<-R]
    if isinstance(t, App):
        if is_rigid(t.fun):
            _external_sites(t.arg, path + (Move.APP_R,), out)
        _rigid_sites(t.fun, path + (Move.APP_L,), out)
    elif isinstance(t, Es):
        if is_rigid(t.subject):
            _rigid_sites(t.body, path + (Move.ES_BODY,), out)
        if is_rigid(t.body):
            _rigid_sites(t.subject, path + (Move.ES_SUBJECT,), out)


def _weak_sites(t: Term, path: Path, rules: tuple, out: list) -> None:
    # E ::= <.> | t E | E t
    if isinstance(t, App):
        if isinstance(t.fun, Lam):
            if isinstance(t.arg, Lam):
                out.append((path, RuleTag.BETA_V))
            elif RuleTag.BETA_I in rules and _fire_inert(t.arg):
                out.append((path, RuleTag.BETA_I))
        _weak_sites(t.fun, path + (Move.APP_L,), rules, out)
        _weak_sites(t.arg, path + (Move.APP_R,), rules, out)


_RULE_ORDER = {RuleTag.M: 0, RuleTag.E: 1, RuleTag.BETA_V: 2, RuleTag.BETA_I: 3}


def redex_sites(t: Term, strategy: Strategy) -> list[tuple[Path, RuleTag]]:
    out: list = []
    if strategy in (Strategy.PLOTKIN, Strategy.FIRE):
        if not is_pure(t):
            raise ValueError(f"the {strategy.value} strategy only accepts terms without explicit substitutions")
        rules = (RuleTag.BETA_V,) if strategy is Strategy.PLOTKIN else (RuleTag.BETA_V, RuleTag.BETA_I)
        _weak_sites(t, (), rules, out)
    elif strategy is Strategy.OPEN:
        _open_sites(t, (), out)
    elif strategy is Strategy.VSC:
        _vsc_sites(t, (), out)
    else:
        _external_sites(t, (), out)
    unique = dict.fromkeys(out)
    return sorted(unique, key=lambda site: (path_key(site[0]), _RULE_ORDER[site[1]]))


def redexes(t: Term, strategy: Strategy) -> list[Step]:
    """Every one-step reduct permitted by ``strategy``, in document order."""
    return [Step(path, rule, contract(t, path, rule)) for path, rule in redex_sites(t, strategy)]


def step(t: Term, strategy: Strategy) -> Optional[Step]:
    """Leftmost-outermost permitted step, or ``None`` on normal forms."""
    sites = redex_sites(t, strategy)
    if not sites:
        return None
    path, rule = sites[0]
    return Step(path, rule, contract(t, path, rule))


def is_normal(t: Term, strategy: Strategy) -> bool:
    return not redex_sites(t, strategy)


# -- evaluation ------------------------------------------------------------

@dataclass
class Normal:
    result: Term
    trace: list[Step]
    m_count: int
    e_count: int
    beta_v_count: int = 0
    beta_i_count: int = 0

    @property
    def length(self) -> int:
        return len(self.trace)


@dataclass
class Cycle:
    prefix: list[Step]
    loop_start: int  # index in the term sequence start, reduct1, ... where the loop begins


@dataclass
class Exhausted:
    trace: list[Step]


Outcome = Union[Normal, Cycle, Exhausted]


def evaluate(t: Term, strategy: Strategy, fuel: int) -> Outcome:
    seen = {alpha_key(t): 0}
    trace: list[Step] = []
    current = t
    while True:
        s = step(current, strategy)
        if s is None:
            counts = {tag: 0 for tag in RuleTag}
            for st in trace:
                counts[st.rule] += 1
            return Normal(current, trace, counts[RuleTag.M], counts[RuleTag.E],
                          counts[RuleTag.BETA_V], counts[RuleTag.BETA_I])
        if len(trace) >= fuel:
            return Exhausted(trace)
        trace.append(s)
        current = s.reduct
        key = alpha_key(current)
        if key in seen:
            return Cycle(trace, seen[key])
        seen[key] = len(trace)


def trace_terms(start: Term, trace: list[Step]) -> list[Term]:
    return [start] + [s.reduct for s in trace]


# -- diamond ---------------------------------------------------------------

@dataclass
class DiamondReport:
    term: Term
    strategy: Strategy
    peaks_checked: int = 0
    violation: Optional[tuple[Step, Step]] = None

    @property
    def ok(self) -> bool:
        return self.violation is None


def diamond_check(t: Term, strategy: Strategy) -> DiamondReport:
    """Every pair of α-distinct one-step reducts must share a one-step reduct."""
    report = DiamondReport(t, strategy)
    distinct: dict[tuple, Step] = {}
    for s in redexes(t, strategy):
        distinct.setdefault(alpha_key(s.reduct), s)
    steps = list(distinct.values())
    next_keys = [{alpha_key(r.reduct) for r in redexes(s.reduct, strategy)} for s in steps]
    for i in range(len(steps)):
        for j in range(i + 1, len(steps)):
            report.peaks_checked += 1
            if not next_keys[i] & next_keys[j]:
                report.violation = (steps[i], steps[j])
                return report
    return report


# -- breadth-first oracles -------------------------------------------------

@dataclass
class SearchResult:
    normal_forms: list[Term] = field(default_factory=list)
    explored: int = 0
    complete: bool = True  # False when the budget cut the search short


def bfs_normal_forms(t: Term, strategy: Strategy, node_budget: int) -> SearchResult:
    res = SearchResult()
    seen = {alpha_key(t)}
    queue = deque([t])
    nf_keys = set()
    while queue:
        u = queue.popleft()
        res.explored += 1
        reducts = redexes(u, strategy)
        if not reducts:
            key = alpha_key(u)
            if key not in nf_keys:
                nf_keys.add(key)
                res.normal_forms.append(u)
            continue
        for s in reducts:
            key = alpha_key(s.reduct)
            if key in seen:
                continue
            if len(seen) >= node_budget:
                res.complete = False
                continue
            seen.add(key)
            queue.append(s.reduct)
    return res


def bfs_normalize(t: Term, strategy: Strategy, node_budget: int) -> Optional[Term]:
    """First normal form met by breadth-first search within ``node_budget`` α-distinct terms."""
    seen = {alpha_key(t)}
    queue = deque([t])
    while queue:
        u = queue.popleft()
        reducts = redexes(u, strategy)
        if not reducts:
            return u
        for s in reducts:
            key = alpha_key(s.reduct)
            if key not in seen and len(seen) < node_budget:
                seen.add(key)
                queue.append(s.reduct)
    return None


def normalizing_lengths(t: Term, strategy: Strategy, node_budget: int) -> Optional[dict[tuple, set[int]]]:
    """For each reachable normal form (by α-key), the set of lengths of all paths to it.

    ``None`` when the reduction graph has a cycle or exceeds the budget.
    """
    memo: dict[tuple, dict[tuple, frozenset]] = {}
    on_stack: set = set()

    class _Abort(Exception):
        pass

    def go(u: Term, key: tuple) -> dict[tuple, frozenset]:
        if key in memo:
            return memo[key]
        if key in on_stack:
            raise _Abort
        if len(memo) + len(on_stack) >= node_budget:
            raise _Abort
        on_stack.add(key)
        reducts = redexes(u, strategy)
        if not reducts:
            out = {key: frozenset({0})}
        else:
            acc: dict[tuple, set] = {}
            for s in reducts:
                for nf, lengths in go(s.reduct, alpha_key(s.reduct)).items():
                    acc.setdefault(nf, set()).update(n + 1 for n in lengths)
            out = {nf: frozenset(v) for nf, v in acc.items()}
        on_stack.discard(key)
        memo[key] = out
        return out

    try:
        result = go(t, alpha_key(t))
    except (_Abort, RecursionError):
        return None
    return {nf: set(v) for nf, v in result.items()}
