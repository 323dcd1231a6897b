"""Small bosonic Fock-space builder.

Basis states are multisets of mode labels stored as sorted tuples, e.g.
``(0, 0, 5)`` is two quanta in mode 0 and one in mode 5.  Operators are sums
of normal-ordered monomials ``coef * a_c1^+ ... a_cm^+ a_a1 ... a_an``.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy import sparse


@dataclass(frozen=True)
class Term:
    coef: complex
    create: tuple
    annihilate: tuple


def _apply(state, term):
    """Apply one monomial to a basis multiset; return (new_state, amplitude) or None."""
    counts = Counter(state)
    amp = 1.0
    for mode in term.annihilate:
        n = counts[mode]
        if n == 0:
            return None
        amp *= math.sqrt(n)
        counts[mode] = n - 1
    for mode in term.create:
        n = counts[mode]
        amp *= math.sqrt(n + 1)
        counts[mode] = n + 1
    new = tuple(sorted(counts.elements()))
    return new, amp


class FockBasis:
    """Enumerated list of multisets with a reverse index."""

    def __init__(self, states):
        self.states = [tuple(sorted(s)) for s in states]
        self.index = {s: i for i, s in enumerate(self.states)}
        if len(self.index) != len(self.states):
            raise ValueError("duplicate basis states")

    def __len__(self):
        return len(self.states)

    def operator(self, terms, dtype=complex) -> sparse.csr_matrix:
        """Sparse matrix of ``sum(terms)`` restricted to this basis.

        Matrix elements leading outside the basis are dropped; callers check
        closure separately when it matters.
        """
        by_annihilated = defaultdict(list)
        for t in terms:
            by_annihilated[tuple(sorted(t.annihilate))].append(t)
        sizes = sorted({len(k) for k in by_annihilated})
        rows, cols, vals = [], [], []
        for col, state in enumerate(self.states):
            seen = set()
            for size in sizes:
                for sub in combinations(state, size):
                    if sub in seen:
                        continue
                    seen.add(sub)
                    for t in by_annihilated.get(sub, ()):
                        res = _apply(state, t)
                        if res is None:
                            continue
                        new, amp = res
                        row = self.index.get(new)
                        if row is None:
                            continue
                        rows.append(row)
                        cols.append(col)
                        vals.append(t.coef * amp)
        n = len(self.states)
        return sparse.csr_matrix((np.asarray(vals, dtype=dtype), (rows, cols)), shape=(n, n))

    def leaks(self, terms) -> bool:
        """True if some term maps a basis state outside the basis."""
        for state in self.states:
            for t in terms:
                res = _apply(state, t)
                if res is not None and res[0] not in self.index:
                    return True
        return False

    def occupation(self, mode) -> np.ndarray:
        return np.array([s.count(mode) for s in self.states], dtype=float)


def hermitian_pair(coef, create, annihilate):
    """A monomial together with its Hermitian conjugate."""
    return [Term(coef, tuple(create), tuple(annihilate)),
            Term(np.conj(coef), tuple(annihilate), tuple(create))]
