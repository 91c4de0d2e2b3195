"""Property suites over enumerated terms and replays of the canonical example traces."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .classify import is_fire_fireball, is_fireball, is_rigid, is_strong_fireball
from .enumerate import enumerate_terms
from .multitypes import (
    Derivation, MultiType, check_derivation, deriv_size, is_shrinking,
)
from .rewrite import (
    Cycle, Exhausted, Normal, RuleTag, Strategy, bfs_normalize, diamond_check,
    evaluate, is_normal, normalizing_lengths, redexes, trace_terms,
)
from .syntax import parse, print_term
from .terms import Term, alpha_eq, is_pure, subst
from .transform import (
    Mode, TypedStep, anti_substitute, infer_report, merge_value_derivations,
    spreading_violations, split_value_derivation, subject_expand, subject_reduce,
    substitute_derivation,
)

DEFAULT_POOL = ("y",)
DEFAULT_MAX_SIZE = 7
DEFAULT_FUEL = 200
DEFAULT_BUDGET = 5000

DELTA = "(\\x.x x)"
OMEGA = f"({DELTA} {DELTA})"
IDENTITY = "(\\z.z)"


@dataclass
class SuiteReport:
    suite: str
    population: int = 0
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    counterexample: Optional[dict] = None
    details: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, term: Term, verdict: Optional[str]) -> None:
        """``verdict`` is ``None`` for a pass, ``"skip"`` for undecided, else a failure reason."""
        if verdict is None:
            self.passed += 1
        elif verdict == "skip":
            self.skipped += 1
        else:
            self.failed += 1
            if self.counterexample is None:
                self.counterexample = {"term": print_term(term), "reason": verdict}


def report_json(r: SuiteReport) -> str:
    return json.dumps({
        "suite": r.suite,
        "population": r.population,
        "passed": r.passed,
        "failures": r.failed,
        "skipped": r.skipped,
        "counterexample": r.counterexample,
        "details": r.details,
        "wall_time": round(r.wall_time, 3),
    }, indent=2, sort_keys=True)


# -- individual checks, one term at a time ---------------------------------
# each returns None (pass), "skip", or a failure description

def _check_diamond(strategy: Strategy, budget: int):
    def check(t: Term, fuel: int, details: dict):
        rep = diamond_check(t, strategy)
        details["peaks"] = details.get("peaks", 0) + rep.peaks_checked
        if not rep.ok:
            a, b = rep.violation
            return f"peak {print_term(a.reduct)} / {print_term(b.reduct)} has no one-step join"
        lengths = normalizing_lengths(t, strategy, budget)
        if lengths is None:
            details["length_undecided"] = details.get("length_undecided", 0) + 1
            return None
        for nf_lengths in lengths.values():
            if len(nf_lengths) > 1:
                return f"evaluations to one normal form have lengths {sorted(nf_lengths)}"
        return None
    return check


def _check_harmony_open(t, fuel, details):
    if is_fireball(t) != is_normal(t, Strategy.OPEN):
        return f"fireball={is_fireball(t)} but open-normal={is_normal(t, Strategy.OPEN)}"
    return None


def _check_harmony_strong(t, fuel, details):
    if is_strong_fireball(t) != is_normal(t, Strategy.VSC):
        return f"strong fireball={is_strong_fireball(t)} but vsc-normal={is_normal(t, Strategy.VSC)}"
    return None


def _check_harmony_fire(t, fuel, details):
    if not is_pure(t):
        return "skip"
    if is_fire_fireball(t) != is_normal(t, Strategy.FIRE):
        return f"fire-fireball={is_fire_fireball(t)} but fire-normal={is_normal(t, Strategy.FIRE)}"
    return None


def _check_fullness(t, fuel, details):
    if is_normal(t, Strategy.EXTERNAL) != is_normal(t, Strategy.VSC):
        return "external-normal and vsc-normal disagree"
    return None


def _transport_checks(mode: Mode):
    strategy = Strategy.OPEN if mode is Mode.OPEN else Strategy.EXTERNAL

    def check(t: Term, fuel: int, details: dict):
        res = infer_report(t, mode, fuel)
        if res.derivation is None:
            details[res.status] = details.get(res.status, 0) + 1
            return "skip"
        terms = trace_terms(t, res.outcome.trace)
        if len(res.outcome.trace) > deriv_size(res.derivation):
            return f"evaluation length {len(res.outcome.trace)} exceeds derivation size {deriv_size(res.derivation)}"
        for k, (term, d) in enumerate(zip(terms, res.chain)):
            # every permitted step from every term on the evaluation, not only the chosen one
            for s in redexes(term, strategy):
                d2 = subject_reduce(d, TypedStep.of(term, s))
                check_derivation(d2)
                if (d2.ctx, d2.rhs) != (d.ctx, d.rhs):
                    return f"judgment changed along {print_term(term)} -> {print_term(s.reduct)}"
                if deriv_size(d2) >= deriv_size(d):
                    return (f"size did not decrease ({deriv_size(d)} -> {deriv_size(d2)}) "
                            f"along {print_term(term)} -> {print_term(s.reduct)}")
                details["steps"] = details.get("steps", 0) + 1
        return None
    return check


def _check_expansion(t: Term, fuel: int, details: dict):
    verdict = "skip"
    for mode in (Mode.OPEN, Mode.SHRINKING):
        res = infer_report(t, mode, fuel)
        if res.derivation is None:
            continue
        verdict = None
        final = res.chain[-1]
        for d in res.chain:
            check_derivation(d)
            if (d.ctx, d.rhs) != (final.ctx, final.rhs):
                return f"{mode.value}: conclusion changed during expansion"
        if mode is Mode.SHRINKING and not is_shrinking(res.derivation):
            return "expanded derivation is not shrinking"
        if mode is Mode.OPEN and len(res.derivation.rhs) != 0:
            return "open derivation does not have the empty type"
        # arbitrary strong steps: reduce, then expand back
        d = res.derivation
        for s in redexes(t, Strategy.VSC):
            ts = TypedStep.of(t, s)
            d2 = subject_reduce(d, ts)
            check_derivation(d2)
            if (d2.ctx, d2.rhs) != (d.ctx, d.rhs) or deriv_size(d2) > deriv_size(d):
                return f"{mode.value}: reduction along {print_term(s.reduct)} broke the judgment or grew"
            d3 = subject_expand(d2, ts)
            check_derivation(d3)
            if (d3.ctx, d3.rhs, d3.subject) != (d.ctx, d.rhs, t):
                return f"{mode.value}: expansion along {print_term(s.reduct)} broke the judgment"
            details["vsc_steps"] = details.get("vsc_steps", 0) + 1
    return verdict


def _check_length_bound(t: Term, fuel: int, details: dict):
    verdict = "skip"
    for mode in (Mode.OPEN, Mode.SHRINKING):
        res = infer_report(t, mode, fuel)
        if res.derivation is None:
            continue
        verdict = None
        if len(res.outcome.trace) > deriv_size(res.derivation):
            return f"{mode.value}: |d| = {len(res.outcome.trace)} > |D| = {deriv_size(res.derivation)}"
    return verdict


SUBSTITUTED_VALUES = ("\\a.a", "\\a.\\b.a", "\\a.a a")


def _check_substitution(t: Term, fuel: int, details: dict):
    x = "y"
    if x not in t.fv:
        return "skip"
    checked = False
    for v_src in SUBSTITUTED_VALUES:
        v = parse(v_src)
        s = subst(t, x, v)
        for mode in (Mode.OPEN, Mode.SHRINKING):
            d = infer_report(s, mode, fuel).derivation
            if d is None:
                continue
            checked = True
            psi, theta = anti_substitute(d, t, x, v)
            check_derivation(psi)
            check_derivation(theta)
            if psi.ctx.remove(x) + theta.ctx != d.ctx or psi.rhs != d.rhs or psi.ctx.get(x) != theta.rhs:
                return f"anti-substitution contexts do not add up for {v_src}"
            back = substitute_derivation(psi, x, theta)
            check_derivation(back)
            if (back.ctx, back.rhs) != (d.ctx, d.rhs) or not alpha_eq(back.subject, s):
                return f"substitution after anti-substitution changed the judgment for {v_src}"
            if deriv_size(back) > deriv_size(psi) + deriv_size(theta):
                return f"substitution size bound fails for {v_src}"
            half = MultiType(theta.rhs.items[: len(theta.rhs) // 2])
            d1, d2 = split_value_derivation(theta, half, theta.rhs - half)
            check_derivation(d1)
            check_derivation(d2)
            if deriv_size(d1) + deriv_size(d2) != deriv_size(theta) or d1.ctx + d2.ctx != theta.ctx:
                return "split does not preserve size and context"
            merged = merge_value_derivations(d1, d2)
            check_derivation(merged)
            if deriv_size(merged) != deriv_size(theta) or (merged.ctx, merged.rhs) != (theta.ctx, theta.rhs):
                return "merge does not preserve size and judgment"
            details["pairs"] = details.get("pairs", 0) + 1
    return None if checked else "skip"


def _check_spreading(t: Term, fuel: int, details: dict):
    seen_any = False
    for mode in (Mode.OPEN, Mode.SHRINKING):
        res = infer_report(t, mode, fuel)
        for d in res.chain:
            seen_any = True
            stack = [d]
            while stack:
                node = stack.pop()
                stack.extend(node.premises)
                if isinstance(node.rhs, MultiType) and is_rigid(node.subject):
                    details["rigid_judgments"] = details.get("rigid_judgments", 0) + 1
            bad = spreading_violations(d)
            if bad:
                return f"rigid judgment {bad[0].conclusion} has left context but non-left type"
    return None if seen_any else "skip"


def _check_untyped_normalization(budget: int):
    def check(t: Term, fuel: int, details: dict):
        nf = bfs_normalize(t, Strategy.VSC, budget)
        if nf is None:
            return "skip"
        out = evaluate(t, Strategy.EXTERNAL, fuel)
        if isinstance(out, Exhausted):
            details["exhausted"] = details.get("exhausted", 0) + 1
            return "skip"
        if isinstance(out, Cycle):
            return f"vsc normal form {print_term(nf)} exists but external evaluation cycles"
        if not alpha_eq(out.result, nf):
            return f"external result {print_term(out.result)} differs from {print_term(nf)}"
        return None
    return check


def _check_plotkin_simulation(t: Term, fuel: int, details: dict):
    if not is_pure(t):
        return "skip"
    steps = redexes(t, Strategy.PLOTKIN)
    if not steps:
        return None
    vsc_m = [s for s in redexes(t, Strategy.VSC) if s.rule is RuleTag.M]
    for s in steps:
        joined = any(
            alpha_eq(e.reduct, s.reduct)
            for m in vsc_m
            for e in redexes(m.reduct, Strategy.VSC) if e.rule is RuleTag.E
        )
        if not joined:
            return f"beta-v step to {print_term(s.reduct)} has no m-then-e simulation"
        details["beta_v_steps"] = details.get("beta_v_steps", 0) + 1
    return None


# witnesses for the failure of the diamond property under unrestricted strong reduction
NON_DIAMOND_WITNESSES = (
    f"(x x)[x <- \\y.{IDENTITY} {IDENTITY}]",
    f"(x x)[x <- \\y.{IDENTITY} y]",
    f"(x (x y))[x <- \\w.{IDENTITY} w]",
)


def _run_vsc_not_diamond(report: SuiteReport) -> None:
    peaks = []
    for src in NON_DIAMOND_WITNESSES:
        t = parse(src)
        rep = diamond_check(t, Strategy.VSC)
        if rep.ok:
            report.record(t, "no violating peak found")
        else:
            report.record(t, None)
            a, b = rep.violation
            peaks.append({"term": src, "peak": [print_term(a.reduct), print_term(b.reduct)]})
    report.population = len(NON_DIAMOND_WITNESSES)
    report.details["peaks"] = peaks


SUITES = (
    "diamond-open", "diamond-external", "vsc-not-diamond", "harmony-open",
    "harmony-strong", "harmony-fire", "fullness", "subject-reduction-open",
    "subject-reduction-shrinking", "subject-expansion", "length-bound",
    "substitution-bound", "spreading", "untyped-normalization", "plotkin-simulation",
)


def _suite_check(name: str, budget: int) -> Callable:
    table = {
        "diamond-open": _check_diamond(Strategy.OPEN, budget),
        "diamond-external": _check_diamond(Strategy.EXTERNAL, budget),
        "harmony-open": _check_harmony_open,
        "harmony-strong": _check_harmony_strong,
        "harmony-fire": _check_harmony_fire,
        "fullness": _check_fullness,
        "subject-reduction-open": _transport_checks(Mode.OPEN),
        "subject-reduction-shrinking": _transport_checks(Mode.SHRINKING),
        "subject-expansion": _check_expansion,
        "length-bound": _check_length_bound,
        "substitution-bound": _check_substitution,
        "spreading": _check_spreading,
        "untyped-normalization": _check_untyped_normalization(budget),
        "plotkin-simulation": _check_plotkin_simulation,
    }
    return table[name]


# hand-picked terms beyond the enumeration cap: divergent, erasing and duplicating examples
EXAMPLE_TERMS = (
    OMEGA,
    f"\\x.{OMEGA}",
    f"x (\\y.{OMEGA})",
    f"(\\x.y) (\\z.{OMEGA})",
    f"(\\x.{IDENTITY}) (y (\\z.{OMEGA}))",
    f"(\\x.{IDENTITY}) (y y)",
    f"(\\x.{DELTA}) (y y) {DELTA}",
    f"{DELTA} ((\\x.{DELTA}) (y y))",
    f"({IDENTITY} {IDENTITY}) ({IDENTITY} {IDENTITY})",
    f"(\\x.({IDENTITY} {IDENTITY})) (\\w.w)",
    f"x (\\y.{IDENTITY} {IDENTITY})[x <- x ({IDENTITY} {IDENTITY})]",
    f"(x x)[x <- \\y.{IDENTITY} {IDENTITY}]",
    f"{DELTA} (\\w.w)",
    f"(\\y.(\\x.{IDENTITY}) (y y)) {DELTA}",
    f"(\\x.\\y.x y) (\\w.w) (\\w.w)",
    f"(y y)[y <- z z]",
)


def population(max_size: int, free_pool: Sequence[str], with_examples: bool = True) -> list[Term]:
    """Enumerated terms up to ``max_size``, followed by the example terms when requested."""
    terms = list(enumerate_terms(max_size, tuple(free_pool)))
    if with_examples:
        terms.extend(parse(src) for src in EXAMPLE_TERMS)
    return terms


def run_suite(
    name: str,
    max_size: int = DEFAULT_MAX_SIZE,
    free_pool: Sequence[str] = DEFAULT_POOL,
    fuel: int = DEFAULT_FUEL,
    budget: int = DEFAULT_BUDGET,
    terms: Optional[Iterable[Term]] = None,
    with_examples: bool = True,
) -> SuiteReport:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    started = time.perf_counter()
    report = SuiteReport(name)
    if name == "vsc-not-diamond":
        _run_vsc_not_diamond(report)
    else:
        check = _suite_check(name, budget)
        pop = list(terms) if terms is not None else population(max_size, free_pool, with_examples)
        report.population = len(pop)
        for t in pop:
            try:
                verdict = check(t, fuel, report.details)
            except Exception as exc:  # a crash in a constructive proof is a failure, not an abort
                verdict = f"{type(exc).__name__}: {exc}"
            report.record(t, verdict)
    report.wall_time = time.perf_counter() - started
    return report


# -- canned experiments ----------------------------------------------------

@dataclass
class ExperimentReport:
    name: str
    checks: list = field(default_factory=list)  # (description, passed)
    traces: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.checks)

    def check(self, description: str, passed: bool) -> None:
        self.checks.append((description, bool(passed)))

    def text(self) -> str:
        lines = [f"experiment {self.name}: {'ok' if self.ok else 'FAILED'}"]
        for description, passed in self.checks:
            lines.append(f"  [{'pass' if passed else 'FAIL'}] {description}")
        for label, trace in self.traces.items():
            lines.append(f"  {label}:")
            lines.extend(f"    {term}" for term in trace)
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps({
            "experiment": self.name,
            "ok": self.ok,
            "checks": [{"check": d, "passed": p} for d, p in self.checks],
            "traces": self.traces,
        }, indent=2)


def replays(start: Term, expected: Sequence[str], strategy: Strategy) -> bool:
    """Each listed term is a one-step reduct of the previous one, up to α."""
    current = start
    for src in expected:
        nxt = parse(src)
        if not any(alpha_eq(s.reduct, nxt) for s in redexes(current, strategy)):
            return False
        current = nxt
    return True


def _outcome_trace(start: Term, outcome) -> list[str]:
    steps = outcome.prefix if isinstance(outcome, Cycle) else outcome.trace
    return [print_term(t) for t in trace_terms(start, steps)]


def _omega_l(rep: ExperimentReport) -> None:
    t = parse(f"(\\x.{DELTA}) (y y) {DELTA}")
    plotkin = evaluate(t, Strategy.PLOTKIN, 100)
    rep.check("beta-v normal under the weak strategy", isinstance(plotkin, Normal) and plotkin.length == 0)
    expected = [
        f"{DELTA}[x <- y y] {DELTA}",
        f"(x x)[x <- {DELTA}][x <- y y]",
        f"({DELTA} {DELTA})[x <- y y]",
    ]
    rep.check("open trace prefix replays step by step", replays(t, expected, Strategy.OPEN))
    out = evaluate(t, Strategy.OPEN, 100)
    rep.check("open evaluation cycles", isinstance(out, Cycle))
    first = [print_term(s.reduct) for s in out.prefix[:3]] if isinstance(out, Cycle) else []
    rep.check("deterministic open trace starts with the same three terms",
              len(first) == 3 and all(alpha_eq(parse(a), parse(b)) for a, b in zip(first, expected)))
    rep.traces["open"] = _outcome_trace(t, out)


def _omega_r(rep: ExperimentReport) -> None:
    t = parse(f"{DELTA} ((\\x.{DELTA}) (y y))")
    plotkin = evaluate(t, Strategy.PLOTKIN, 100)
    rep.check("beta-v normal under the weak strategy", isinstance(plotkin, Normal) and plotkin.length == 0)
    expected = [
        f"{DELTA} ({DELTA}[x <- y y])",
        f"(x x)[x <- {DELTA}[x <- y y]]",
        f"({DELTA} {DELTA})[x <- y y]",
    ]
    rep.check("open trace prefix replays step by step", replays(t, expected, Strategy.OPEN))
    out = evaluate(t, Strategy.OPEN, 100)
    rep.check("open evaluation cycles", isinstance(out, Cycle))
    rep.traces["open"] = _outcome_trace(t, out)


def _fireball_erasure(rep: ExperimentReport) -> None:
    t = parse(f"(\\x.{IDENTITY}) (y y)")
    fire = evaluate(t, Strategy.FIRE, 10)
    rep.check("one beta-i step to the identity",
              isinstance(fire, Normal) and fire.length == 1 and fire.beta_i_count == 1
              and alpha_eq(fire.result, parse(IDENTITY)))
    opened = evaluate(t, Strategy.OPEN, 10)
    rep.check("open reduction keeps the inert argument in a substitution",
              isinstance(opened, Normal) and alpha_eq(opened.result, parse(f"{IDENTITY}[x <- y y]")))
    rep.traces["fire"] = _outcome_trace(t, fire)
    rep.traces["open"] = _outcome_trace(t, opened)


def _strong_separation(rep: ExperimentReport) -> None:
    u = parse(f"(\\x.{IDENTITY}) (y (\\z.{OMEGA}))")
    fire = evaluate(u, Strategy.FIRE, 10)
    rep.check("fire: one beta-i step to the identity",
              isinstance(fire, Normal) and fire.length == 1 and fire.beta_i_count == 1
              and alpha_eq(fire.result, parse(IDENTITY)))
    ext = evaluate(u, Strategy.EXTERNAL, 100)
    rep.check("external evaluation cycles", isinstance(ext, Cycle))
    rep.check("first external step substitutes the inert argument",
              replays(u, [f"{IDENTITY}[x <- y (\\z.{OMEGA})]"], Strategy.EXTERNAL))
    rep.traces["fire"] = _outcome_trace(u, fire)
    rep.traces["external"] = _outcome_trace(u, ext)


def _instability(rep: ExperimentReport, context_arg: str, inner: str, expected: list[str]) -> None:
    plugged = parse(f"(\\y.{inner}) {context_arg}")
    rep.check("plugged term replays the weak trace", replays(plugged, expected, Strategy.PLOTKIN))
    out = evaluate(plugged, Strategy.PLOTKIN, 100)
    rep.check("plugged term cycles under the weak strategy", isinstance(out, Cycle))
    plugged_id = parse(f"(\\y.{IDENTITY}) {context_arg}")
    out_id = evaluate(plugged_id, Strategy.PLOTKIN, 100)
    rep.check("plugging the identity normalizes to the identity",
              isinstance(out_id, Normal) and alpha_eq(out_id.result, parse(IDENTITY)))
    fire = evaluate(parse(inner), Strategy.FIRE, 10)
    rep.check("the unplugged term reduces to the identity by beta-i",
              isinstance(fire, Normal) and fire.beta_i_count == 1 and alpha_eq(fire.result, parse(IDENTITY)))
    rep.traces["plugged"] = _outcome_trace(plugged, out)
    rep.traces["plugged identity"] = _outcome_trace(plugged_id, out_id)


def _instability_open(rep: ExperimentReport) -> None:
    inner = f"((\\x.{IDENTITY}) (y y))"
    _instability(rep, DELTA, inner, [
        f"(\\x.{IDENTITY}) ({DELTA} {DELTA})",
        f"(\\x.{IDENTITY}) ({DELTA} {DELTA})",
    ])


def _instability_strong(rep: ExperimentReport) -> None:
    inner = f"((\\x.{IDENTITY}) (y (\\z.{OMEGA})))"
    arg = f"(\\w.w {IDENTITY})"
    _instability(rep, arg, inner, [
        f"(\\x.{IDENTITY}) ({arg} (\\z.{OMEGA}))",
        f"(\\x.{IDENTITY}) ((\\z.{OMEGA}) {IDENTITY})",
        f"(\\x.{IDENTITY}) {OMEGA}",
    ])


EXPERIMENTS = {
    "omega-l": _omega_l,
    "omega-r": _omega_r,
    "fireball-erasure": _fireball_erasure,
    "strong-separation": _strong_separation,
    "instability-open": _instability_open,
    "instability-strong": _instability_strong,
}


def run_experiment(name: str) -> ExperimentReport:
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    rep = ExperimentReport(name)
    EXPERIMENTS[name](rep)
    return rep
