"""Exhaustive enumeration of terms up to α-equivalence, by node count."""

from __future__ import annotations

import itertools
import string
from functools import lru_cache
from typing import Iterator, Sequence

from .terms import App, Es, Lam, Term, Var


def bound_names(free_pool: Sequence[str]) -> tuple[str, ...]:
    """Canonical binder names by binding depth: a, b, c, ... skipping the free pool."""
    taken = set(free_pool)
    letters = [c for c in string.ascii_lowercase if c not in taken]
    out = list(letters)
    for i in itertools.count(1):
        if len(out) >= 64:
            break
        out.extend(f"{c}{i}" for c in letters if f"{c}{i}" not in taken)
    return tuple(out)


def enumerate_terms(max_size: int, free_pool: Sequence[str] = (), pure_only: bool = False) -> Iterator[Term]:
    """Every α-class of size ``<= max_size`` whose free variables lie in ``free_pool``.

    Binders are named after their binding depth, which makes the choice of
    representative canonical. Output is ordered by size, then constructor
    (Var, Lam, App, Es), then recursively by components.
    """
    gen = _Generator(tuple(free_pool), pure_only)
    for size in range(1, max_size + 1):
        yield from gen.exact(size, 0)


class _Generator:
    def __init__(self, free_pool: tuple[str, ...], pure_only: bool):
        self.free_pool = free_pool
        self.pure_only = pure_only
        self.names = bound_names(free_pool)
        self.exact = lru_cache(maxsize=None)(self._exact)

    def _exact(self, size: int, depth: int) -> tuple[Term, ...]:
        out: list[Term] = []
        if size == 1:
            out.extend(Var(n) for n in self.names[:depth])
            out.extend(Var(n) for n in self.free_pool)
            return tuple(out)
        binder = self.names[depth]
        out.extend(Lam(binder, body) for body in self.exact(size - 1, depth + 1))
        for left in range(1, size - 1):
            right = size - 1 - left
            for f in self.exact(left, depth):
                for a in self.exact(right, depth):
                    out.append(App(f, a))
        if not self.pure_only:
            for left in range(1, size - 1):
                right = size - 1 - left
                for b in self.exact(left, depth + 1):
                    for s in self.exact(right, depth):
                        out.append(Es(b, binder, s))
        return tuple(out)
