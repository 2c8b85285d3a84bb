"""Small word combinatorics shared by the shuffle algebras."""

from __future__ import annotations

from typing import Sequence


def shuffle_multiset(u: Sequence, v: Sequence) -> dict[tuple, int]:
    """All shuffles of u and v with multiplicities.

    Returns a map word-tuple -> multiplicity; the sum of multiplicities is
    binom(|u|+|v|, |u|).
    """
    out: dict[tuple, int] = {}

    def rec(i: int, j: int, prefix: tuple) -> None:
        if i == len(u) and j == len(v):
            out[prefix] = out.get(prefix, 0) + 1
            return
        if i < len(u):
            rec(i + 1, j, prefix + (u[i],))
        if j < len(v):
            rec(i, j + 1, prefix + (v[j],))

    rec(0, 0, ())
    return out


def deconcatenations(w: Sequence) -> list[tuple[tuple, tuple]]:
    """All splits w = u . v including the trivial ones."""
    t = tuple(w)
    return [(t[:i], t[i:]) for i in range(len(t) + 1)]
